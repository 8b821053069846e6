"""Filesystem scanning, snapshot persistence, waste reports, and diffs.

The scanner is strictly read-only: it stats and lists, never modifies.
Snapshots are persisted as line-delimited JSON (one header object, then
one record object per line, sorted by path) so they stream, diff, and
survive manual inspection.
"""

from __future__ import annotations

import json
import os
import stat
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

from ._version import __version__
from .errors import WastekitError
from .model import (
    DigestProvider,
    FileKind,
    FileRecord,
    RuleSet,
    WasteCategory,
    classify,
    f_lifetime,
    path_matches,
    sha256_file,
)

SNAPSHOT_FORMAT = "wastekit-snapshot-v1"


@dataclass(frozen=True)
class ScanOptions:
    follow_symlinks: bool = False
    one_filesystem: bool = False
    exclude_globs: tuple[str, ...] = ()
    workers: int = 1

    def __post_init__(self):
        if self.workers < 1:
            raise ValueError("workers must be >= 1")


@dataclass
class Snapshot:
    """A persisted scan: root, capture time, and sorted file records."""

    root: str
    taken_at: int
    records: list[FileRecord]
    atime_reliable: bool = True
    warnings: list[str] = field(default_factory=list)

    def validate(self) -> None:
        prev = None
        for rec in self.records:
            if prev is not None and rec.path <= prev:
                raise WastekitError(f"snapshot records not sorted/unique at {rec.path!r}")
            prev = rec.path

    def record_map(self) -> dict[str, FileRecord]:
        return {r.path: r for r in self.records}


def _json_line(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":")) + "\n"


def write_snapshot(snapshot: Snapshot, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        dump_snapshot(snapshot, fh)


def dump_snapshot(snapshot: Snapshot, fh) -> None:
    fh.write(
        _json_line(
            {
                "format": SNAPSHOT_FORMAT,
                "root": snapshot.root,
                "taken_at": snapshot.taken_at,
                "tool_version": __version__,
                "atime_reliable": snapshot.atime_reliable,
                "warnings": snapshot.warnings,
            }
        )
    )
    for rec in snapshot.records:
        fh.write(_json_line(rec.to_json_obj()))


def read_snapshot(path: str) -> Snapshot:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            lines = fh.read().splitlines()
    except OSError as exc:
        raise WastekitError(f"cannot read snapshot {path}: {exc}") from exc
    if not lines:
        raise WastekitError(f"snapshot {path} is empty")
    try:
        header = json.loads(lines[0])
    except json.JSONDecodeError as exc:
        raise WastekitError(f"snapshot {path} header is not valid JSON: {exc}") from exc
    if not isinstance(header, dict) or header.get("format") != SNAPSHOT_FORMAT:
        raise WastekitError(f"{path} is not a {SNAPSHOT_FORMAT} file")
    records = []
    for i, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        try:
            records.append(FileRecord.from_json_obj(json.loads(line)))
        except json.JSONDecodeError as exc:
            raise WastekitError(f"snapshot {path} line {i} is not valid JSON: {exc}") from exc
    snap = Snapshot(
        root=header["root"],
        taken_at=header["taken_at"],
        records=records,
        atime_reliable=header.get("atime_reliable", True),
        warnings=list(header.get("warnings", [])),
    )
    snap.validate()
    return snap


def _list_names(abspath: str):
    try:
        with os.scandir(abspath) as it:
            return sorted(e.name for e in it), None
    except OSError as exc:
        return None, str(exc)


def scan(root: str, options: ScanOptions | None = None, *, now: int | None = None) -> Snapshot:
    """Walk `root` and build a Snapshot of everything underneath it.

    Regular files carry logical size plus allocated size; directories
    contribute structure but zero bytes; symlinks are recorded and never
    followed unless `follow_symlinks`. Unreadable subtrees are skipped
    with a warning (a partial snapshot is valid); a missing root is
    fatal. Hardlinked inodes are kept once, under their lexicographically
    smallest path. Output is independent of `workers`.
    """
    opts = options or ScanOptions()
    root_abs = os.path.abspath(root)
    if not os.path.isdir(root_abs):
        raise WastekitError(f"scan root does not exist or is not a directory: {root}")
    taken_at = int(time.time()) if now is None else int(now)

    try:
        root_st = os.lstat(root_abs)
        with os.scandir(root_abs):
            pass
    except OSError as exc:
        raise WastekitError(f"scan root is not readable: {root}: {exc}") from exc
    root_dev = root_st.st_dev

    warnings: list[str] = []
    collected: list[tuple[FileRecord, tuple | None]] = []  # (record, hardlink inode key)
    visited_dirs = {(root_st.st_dev, root_st.st_ino)}
    clamped_times = 0

    def make_record(rel, st, kind, size, allocated=None):
        nonlocal clamped_times
        mtime, atime = int(st.st_mtime), int(st.st_atime)
        if mtime < 0 or atime < 0:
            clamped_times += 1
            mtime, atime = max(0, mtime), max(0, atime)
        return FileRecord(
            path=rel, size_bytes=size, mtime=mtime, atime=atime, kind=kind, allocated_bytes=allocated
        )

    pool = ThreadPoolExecutor(max_workers=opts.workers) if opts.workers > 1 else None
    try:
        level = [("", root_abs)]
        while level:
            level.sort(key=lambda item: item[0])
            dirs = [ab for _, ab in level]
            if pool is not None:
                listings = list(pool.map(_list_names, dirs))
            else:
                listings = [_list_names(ab) for ab in dirs]
            next_level = []
            for (rel, ab), (names, err) in zip(level, listings):
                if err is not None:
                    warnings.append(f"unreadable directory skipped: {rel or '.'}: {err}")
                    continue
                for name in names:
                    child_rel = f"{rel}/{name}" if rel else name
                    if any(path_matches(child_rel, pat) for pat in opts.exclude_globs):
                        continue
                    child_ab = os.path.join(ab, name)
                    try:
                        st_info = os.lstat(child_ab)
                    except OSError as exc:
                        warnings.append(f"unreadable entry skipped: {child_rel}: {exc}")
                        continue
                    mode = st_info.st_mode
                    if stat.S_ISLNK(mode):
                        if not opts.follow_symlinks:
                            collected.append(
                                (make_record(child_rel, st_info, FileKind.SYMLINK, st_info.st_size), None)
                            )
                            continue
                        try:
                            tgt = os.stat(child_ab)
                        except OSError:
                            warnings.append(f"broken symlink recorded unfollowed: {child_rel}")
                            collected.append(
                                (make_record(child_rel, st_info, FileKind.SYMLINK, st_info.st_size), None)
                            )
                            continue
                        if stat.S_ISDIR(tgt.st_mode):
                            collected.append((make_record(child_rel, tgt, FileKind.DIRECTORY, 0), None))
                            key = (tgt.st_dev, tgt.st_ino)
                            if key not in visited_dirs and (not opts.one_filesystem or tgt.st_dev == root_dev):
                                visited_dirs.add(key)
                                next_level.append((child_rel, child_ab))
                        elif stat.S_ISREG(tgt.st_mode):
                            ikey = (tgt.st_dev, tgt.st_ino) if tgt.st_nlink > 1 else None
                            alloc = getattr(tgt, "st_blocks", None)
                            collected.append(
                                (
                                    make_record(
                                        child_rel, tgt, FileKind.REGULAR, tgt.st_size,
                                        alloc * 512 if alloc is not None else None,
                                    ),
                                    ikey,
                                )
                            )
                        else:
                            collected.append((make_record(child_rel, tgt, FileKind.OTHER, 0), None))
                    elif stat.S_ISDIR(mode):
                        collected.append((make_record(child_rel, st_info, FileKind.DIRECTORY, 0), None))
                        key = (st_info.st_dev, st_info.st_ino)
                        if key not in visited_dirs and (not opts.one_filesystem or st_info.st_dev == root_dev):
                            visited_dirs.add(key)
                            next_level.append((child_rel, child_ab))
                    elif stat.S_ISREG(mode):
                        ikey = (st_info.st_dev, st_info.st_ino) if st_info.st_nlink > 1 else None
                        alloc = getattr(st_info, "st_blocks", None)
                        collected.append(
                            (
                                make_record(
                                    child_rel, st_info, FileKind.REGULAR, st_info.st_size,
                                    alloc * 512 if alloc is not None else None,
                                ),
                                ikey,
                            )
                        )
                    else:
                        collected.append((make_record(child_rel, st_info, FileKind.OTHER, 0), None))
            level = next_level
    finally:
        if pool is not None:
            pool.shutdown(wait=False)

    if clamped_times:
        warnings.append(f"negative timestamps clamped to 0 on {clamped_times} entr(ies)")

    collected.sort(key=lambda pair: pair[0].path)
    records: list[FileRecord] = []
    seen_inodes: set[tuple] = set()
    dropped_links = 0
    for rec, ikey in collected:
        if ikey is not None:
            if ikey in seen_inodes:
                dropped_links += 1
                continue
            seen_inodes.add(ikey)
        records.append(rec)
    if dropped_links:
        warnings.append(f"hardlink duplicates skipped: {dropped_links}")

    future = sum(1 for r in records if r.mtime > taken_at or r.atime > taken_at)
    if future:
        warnings.append(f"future timestamps on {future} entr(ies)")
    atime_reliable = not any(r.atime < r.mtime for r in records if r.kind is FileKind.REGULAR)

    return Snapshot(
        root=root_abs,
        taken_at=taken_at,
        records=records,
        atime_reliable=atime_reliable,
        warnings=warnings,
    )


@dataclass
class WasteReport:
    """Aggregate waste figures for one snapshot.

    The never-accessed percentages are computed over regular files only
    (directories and symlinks have no meaningful f-lifetime); the
    per-category tallies cover every record.
    """

    total_files: int
    total_bytes: int
    never_accessed_files_pct: float
    never_accessed_space_pct: float
    per_category: dict[WasteCategory, tuple[int, int]]  # category -> (files, bytes)
    warnings: list[str] = field(default_factory=list)

    def to_json_obj(self) -> dict:
        return {
            "total_files": self.total_files,
            "total_bytes": self.total_bytes,
            "never_accessed_files_pct": self.never_accessed_files_pct,
            "never_accessed_space_pct": self.never_accessed_space_pct,
            "per_category": {
                cat.value: {"files": files, "bytes": nbytes}
                for cat, (files, nbytes) in self.per_category.items()
            },
            "warnings": self.warnings,
        }


def snapshot_digest_provider(snapshot: Snapshot, failures: list[str] | None = None) -> DigestProvider:
    """Provider resolving record paths against the snapshot root."""

    def provider(rel_path: str) -> str | None:
        digest = sha256_file(os.path.join(snapshot.root, rel_path))
        if digest is None and failures is not None:
            failures.append(rel_path)
        return digest

    return provider


def report(snapshot: Snapshot, rules: RuleSet, digest_provider: DigestProvider | None = None) -> WasteReport:
    """Classify every record and aggregate Table-style waste figures.

    `now` for classification is the snapshot's own capture time, so a
    stored snapshot always reproduces the same report.
    """
    digest_failures: list[str] = []
    if digest_provider is None:
        digest_provider = snapshot_digest_provider(snapshot, digest_failures)

    tallies = {cat: [0, 0] for cat in WasteCategory}
    total_files = 0
    total_bytes = 0
    reg_files = reg_bytes = 0
    never_files = never_bytes = 0
    for rec in snapshot.records:
        total_files += 1
        total_bytes += rec.size_bytes
        cat = classify(rec, rules, snapshot.taken_at, digest_provider)
        tallies[cat][0] += 1
        tallies[cat][1] += rec.size_bytes
        if rec.kind is FileKind.REGULAR:
            reg_files += 1
            reg_bytes += rec.size_bytes
            if f_lifetime(rec) == 0:
                never_files += 1
                never_bytes += rec.size_bytes

    warnings = list(snapshot.warnings)
    if not snapshot.atime_reliable:
        warnings.append("atime may be unreliable: some files have atime < mtime (copied timestamps or noatime mount)")
    for path in digest_failures:
        warnings.append(f"digest unreadable, file counted Degraded: {path}")

    return WasteReport(
        total_files=total_files,
        total_bytes=total_bytes,
        never_accessed_files_pct=(100.0 * never_files / reg_files) if reg_files else 0.0,
        never_accessed_space_pct=(100.0 * never_bytes / reg_bytes) if reg_bytes else 0.0,
        per_category={cat: (n, b) for cat, (n, b) in tallies.items()},
        warnings=warnings,
    )


@dataclass
class ChurnReport:
    """Path-level changes between two snapshots of the same root."""

    added: list[str]
    removed: list[str]
    became_waste: list[str]
    reactivated: list[str]

    def to_json_obj(self) -> dict:
        return {
            "added": self.added,
            "removed": self.removed,
            "became_waste": self.became_waste,
            "reactivated": self.reactivated,
        }


def diff(
    old: Snapshot,
    new: Snapshot,
    rules: RuleSet,
    old_digest_provider: DigestProvider | None = None,
    new_digest_provider: DigestProvider | None = None,
) -> ChurnReport:
    """Set-diff two snapshots and track NotWaste <-> waste transitions.

    Each snapshot is classified at its own capture time. Both snapshots
    must share the same root.
    """
    if old.root != new.root:
        raise WastekitError(f"snapshots have different roots: {old.root!r} vs {new.root!r}")
    if old_digest_provider is None:
        old_digest_provider = snapshot_digest_provider(old)
    if new_digest_provider is None:
        new_digest_provider = snapshot_digest_provider(new)

    old_map = old.record_map()
    new_map = new.record_map()
    added = sorted(set(new_map) - set(old_map))
    removed = sorted(set(old_map) - set(new_map))
    became_waste = []
    reactivated = []
    for path in sorted(set(old_map) & set(new_map)):
        old_waste = classify(old_map[path], rules, old.taken_at, old_digest_provider).is_waste()
        new_waste = classify(new_map[path], rules, new.taken_at, new_digest_provider).is_waste()
        if not old_waste and new_waste:
            became_waste.append(path)
        elif old_waste and not new_waste:
            reactivated.append(path)
    return ChurnReport(added=added, removed=removed, became_waste=became_waste, reactivated=reactivated)
