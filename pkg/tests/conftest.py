import pytest

from wastekit.model import FileKind, FileRecord, RuleSet


def make_record(path="f.dat", size=10, mtime=1000, atime=1000, kind=FileKind.REGULAR, **kw):
    return FileRecord(path=path, size_bytes=size, mtime=mtime, atime=atime, kind=kind, **kw)


@pytest.fixture
def record():
    return make_record()


@pytest.fixture
def basic_rules():
    return RuleSet(
        not_waste_globs=("keep/*",),
        unintentional_globs=("*.aux", "*.tmp"),
        unwanted_globs=("*.spam",),
        used_threshold_secs=30 * 86400,
    )
