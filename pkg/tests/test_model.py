"""Core taxonomy: f-lifetime, rule parsing, and the classification ladder."""

import hashlib
import json
import random

import pytest
from hypothesis import given, strategies as st

from wastekit.errors import RuleSetError, WastekitError
from wastekit.model import (
    FileKind,
    FileRecord,
    RuleSet,
    WasteCategory,
    classify,
    f_lifetime,
    load_rules,
    path_matches,
    ruleset_from_json_obj,
)

from conftest import make_record


class TestFLifetime:
    def test_atime_equals_mtime_is_zero(self):
        assert f_lifetime(make_record(mtime=100, atime=100)) == 0

    def test_direct_subtraction(self):
        assert f_lifetime(make_record(mtime=100, atime=150)) == 50

    def test_negative_delta_clamps(self):
        assert f_lifetime(make_record(mtime=150, atime=100)) == 0

    @pytest.mark.parametrize("kind", [FileKind.DIRECTORY, FileKind.SYMLINK, FileKind.OTHER])
    def test_undefined_for_non_regular(self, kind):
        with pytest.raises(WastekitError, match="f-lifetime undefined"):
            f_lifetime(make_record(kind=kind))

    def test_random_pairs_against_formula(self):
        # Brute-force oracle over random timestamp pairs: the value is
        # max(0, a - m) and zero exactly when a <= m.
        rng = random.Random(0xF11FE)
        for _ in range(10_000):
            m = rng.randrange(0, 2**31)
            a = rng.randrange(0, 2**31)
            rec = make_record(mtime=m, atime=a)
            val = f_lifetime(rec)
            assert val == max(0, a - m)
            assert (val == 0) == (a <= m)

    @given(st.integers(0, 2**40), st.integers(0, 2**40))
    def test_clamp_property(self, m, a):
        assert f_lifetime(make_record(mtime=m, atime=a)) >= 0


class TestPathMatches:
    def test_extension_glob_matches_nested_path(self):
        assert path_matches("docs/paper.aux", "*.aux")

    def test_directory_glob_is_anchored(self):
        assert path_matches("build/x.o", "build/*")
        assert not path_matches("src/build/x.o", "build/*")

    def test_case_sensitive(self):
        assert not path_matches("X.TMP", "*.tmp")


class TestRuleSet:
    def test_rejects_empty_pattern(self):
        with pytest.raises(RuleSetError):
            RuleSet(unintentional_globs=("",))

    def test_rejects_nonpositive_threshold(self):
        with pytest.raises(RuleSetError):
            RuleSet(used_threshold_secs=0)

    def test_rejects_bad_digest(self):
        with pytest.raises(RuleSetError):
            RuleSet(degraded_checks=(("*.bin", "XYZ"),))

    def test_rejects_unknown_keys(self):
        with pytest.raises(RuleSetError, match="unknown rules keys"):
            ruleset_from_json_obj({"unintentional_glob": ["*.tmp"]})

    def test_load_from_file(self, tmp_path):
        digest = hashlib.sha256(b"golden").hexdigest()
        cfg = {
            "not_waste_globs": ["keep/*"],
            "unintentional_globs": ["*.aux"],
            "unwanted_globs": ["*.spam"],
            "degraded_checks": [{"glob": "*.bin", "sha256": digest}],
            "used_threshold_secs": 3600,
        }
        p = tmp_path / "rules.json"
        p.write_text(json.dumps(cfg))
        rules = load_rules(str(p))
        assert rules.degraded_checks == (("*.bin", digest),)
        assert rules.used_threshold_secs == 3600

    def test_load_missing_file(self):
        with pytest.raises(RuleSetError):
            load_rules("/nonexistent/rules.json")


NOW = 10_000_000_000


class TestClassify:
    def test_latex_byproduct_is_unintentional(self, basic_rules):
        rec = make_record(path="paper.aux")
        assert classify(rec, basic_rules, NOW) is WasteCategory.UNINTENTIONAL

    def test_allowlist_beats_unintentional(self):
        rules = RuleSet(not_waste_globs=("*.aux",), unintentional_globs=("*.aux",))
        assert classify(make_record(path="paper.aux"), rules, NOW) is WasteCategory.NOT_WASTE

    def test_used_when_read_then_idle(self, basic_rules):
        # accessed an hour after writing, then idle for 90 days
        atime = NOW - 90 * 86400
        rec = make_record(path="input.csv", mtime=atime - 3600, atime=atime)
        assert classify(rec, basic_rules, NOW) is WasteCategory.USED

    def test_never_read_is_not_used(self, basic_rules):
        rec = make_record(path="input.csv", mtime=NOW - 10**8, atime=NOW - 10**8)
        assert classify(rec, basic_rules, NOW) is WasteCategory.NOT_WASTE

    def test_recently_read_is_not_used(self, basic_rules):
        rec = make_record(path="input.csv", mtime=NOW - 10**8, atime=NOW - 60)
        assert classify(rec, basic_rules, NOW) is WasteCategory.NOT_WASTE

    def test_degraded_on_digest_mismatch(self):
        rules = RuleSet(degraded_checks=(("*.bin", hashlib.sha256(b"good").hexdigest()),))
        rec = make_record(path="data.bin")
        got = classify(rec, rules, NOW, digest_provider=lambda p: hashlib.sha256(b"bad").hexdigest())
        assert got is WasteCategory.DEGRADED

    def test_intact_digest_falls_through(self):
        digest = hashlib.sha256(b"good").hexdigest()
        rules = RuleSet(degraded_checks=(("*.bin", digest),))
        got = classify(make_record(path="data.bin"), rules, NOW, digest_provider=lambda p: digest)
        assert got is WasteCategory.NOT_WASTE

    def test_unreadable_counts_degraded(self):
        rules = RuleSet(degraded_checks=(("*.bin", hashlib.sha256(b"x").hexdigest()),))
        got = classify(make_record(path="data.bin"), rules, NOW, digest_provider=lambda p: None)
        assert got is WasteCategory.DEGRADED

    def test_degraded_check_skips_directories(self):
        rules = RuleSet(degraded_checks=(("*", hashlib.sha256(b"x").hexdigest()),))
        rec = make_record(path="somedir", kind=FileKind.DIRECTORY)
        # must not attempt to hash a directory; falls through to NotWaste
        assert classify(rec, rules, NOW, digest_provider=lambda p: pytest.fail("hashed a dir")) is WasteCategory.NOT_WASTE

    def test_totality_over_kinds(self, basic_rules):
        for kind in FileKind:
            rec = make_record(path="anything.xyz", kind=kind)
            assert classify(rec, basic_rules, NOW) in WasteCategory


def _expected_by_precedence(not_waste, degraded, unintentional, unwanted, used):
    """Independent hand-evaluation of the precedence ladder."""
    if not_waste:
        return WasteCategory.NOT_WASTE
    if degraded:
        return WasteCategory.DEGRADED
    if unintentional:
        return WasteCategory.UNINTENTIONAL
    if unwanted:
        return WasteCategory.UNWANTED
    if used:
        return WasteCategory.USED
    return WasteCategory.NOT_WASTE


@pytest.mark.parametrize("mask", range(32))
def test_precedence_exhaustive(mask):
    """All 2^5 combinations of matching rule groups resolve to the
    highest-precedence match."""
    not_waste = bool(mask & 1)
    degraded = bool(mask & 2)
    unintentional = bool(mask & 4)
    unwanted = bool(mask & 8)
    used = bool(mask & 16)

    path = "work/item.dat"
    wrong = hashlib.sha256(b"other").hexdigest()
    right = hashlib.sha256(b"content").hexdigest()
    rules = RuleSet(
        not_waste_globs=("*.dat",) if not_waste else ("*.nomatch",),
        degraded_checks=((("*.dat", wrong),) if degraded else (("*.dat", right),)),
        unintentional_globs=("work/*",) if unintentional else (),
        unwanted_globs=("item.*",) if unwanted else (),
        used_threshold_secs=30 * 86400,
    )
    if used:
        rec = make_record(path=path, mtime=NOW - 10**8, atime=NOW - 10**7)
    else:
        rec = make_record(path=path, mtime=NOW - 10**8, atime=NOW - 10**8)

    got = classify(rec, rules, NOW, digest_provider=lambda p: right)
    assert got is _expected_by_precedence(not_waste, degraded, unintentional, unwanted, used)


class TestFileRecord:
    def test_json_round_trip(self):
        rec = make_record(path="a/b.c", size=7, mtime=1, atime=2, allocated_bytes=4096)
        assert FileRecord.from_json_obj(rec.to_json_obj()) == rec

    def test_rejects_negative_size(self):
        with pytest.raises(ValueError):
            make_record(size=-1)

    def test_malformed_json_object(self):
        with pytest.raises(WastekitError):
            FileRecord.from_json_obj({"path": "x"})
