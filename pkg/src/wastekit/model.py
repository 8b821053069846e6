"""Core domain types and pure classification logic.

Everything here is immutable and side-effect free: records are value
objects, and `classify` is deterministic given its inputs (content
digests enter through an injectable provider so callers control where
bytes come from).
"""

from __future__ import annotations

import fnmatch
import hashlib
import json
import posixpath
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Optional

from .errors import RuleSetError, WastekitError

# Idle-time cutoff separating "accessed once, then abandoned" from merely
# quiet data. No authoritative value exists; 30 days is a config default.
DEFAULT_USED_THRESHOLD_SECS = 30 * 86400

DIGEST_HEX_LEN = 64  # sha256

# Maps a record path to the lowercase hex sha256 of its current content,
# or None when the content cannot be read.
DigestProvider = Callable[[str], Optional[str]]


class FileKind(Enum):
    REGULAR = "Regular"
    DIRECTORY = "Directory"
    SYMLINK = "Symlink"
    OTHER = "Other"


class WasteCategory(Enum):
    """Primary waste category of a filesystem object.

    A file can plausibly sit in several categories at once; downstream
    planning needs one decision per object, so classification resolves
    to a single primary category by fixed precedence (see `classify`).
    """

    UNINTENTIONAL = "Unintentional"
    USED = "Used"
    DEGRADED = "Degraded"
    UNWANTED = "Unwanted"
    NOT_WASTE = "NotWaste"

    def is_waste(self) -> bool:
        return self is not WasteCategory.NOT_WASTE


@dataclass(frozen=True)
class FileRecord:
    """One scanned filesystem object; the unit of classification.

    Timestamps are raw seconds since epoch as reported by the
    filesystem. atime < mtime is stored as-is (copy-preserved
    timestamps, noatime mounts); the f-lifetime computation clamps.
    """

    path: str
    size_bytes: int
    mtime: int
    atime: int
    kind: FileKind
    allocated_bytes: int | None = None

    def __post_init__(self):
        if self.size_bytes < 0:
            raise ValueError(f"size_bytes must be >= 0, got {self.size_bytes}")
        if self.mtime < 0 or self.atime < 0:
            raise ValueError(f"timestamps must be >= 0, got mtime={self.mtime} atime={self.atime}")
        if not self.path:
            raise ValueError("path must be non-empty")

    def to_json_obj(self) -> dict:
        obj = {
            "path": self.path,
            "size_bytes": self.size_bytes,
            "mtime": self.mtime,
            "atime": self.atime,
            "kind": self.kind.value,
        }
        if self.allocated_bytes is not None:
            obj["allocated_bytes"] = self.allocated_bytes
        return obj

    @classmethod
    def from_json_obj(cls, obj: dict) -> "FileRecord":
        try:
            return cls(
                path=obj["path"],
                size_bytes=obj["size_bytes"],
                mtime=obj["mtime"],
                atime=obj["atime"],
                kind=FileKind(obj["kind"]),
                allocated_bytes=obj.get("allocated_bytes"),
            )
        except (KeyError, ValueError, TypeError) as exc:
            raise WastekitError(f"malformed file record: {exc}") from exc


def normalize_path(path: str) -> str:
    """Normalize to a forward-slash relative path without leading './'."""
    norm = path.replace("\\", "/")
    norm = posixpath.normpath(norm)
    if norm.startswith("./"):
        norm = norm[2:]
    return norm


def path_matches(path: str, pattern: str) -> bool:
    """Case-sensitive glob match against the full path or its basename.

    '*.aux' matches 'docs/paper.aux'; 'build/*' matches only paths under
    a top-level build directory.
    """
    if fnmatch.fnmatchcase(path, pattern):
        return True
    base = posixpath.basename(path)
    return fnmatch.fnmatchcase(base, pattern)


def _validate_globs(patterns, group: str) -> tuple[str, ...]:
    out = []
    for pat in patterns:
        if not isinstance(pat, str) or not pat or pat.isspace():
            raise RuleSetError(f"{group}: invalid glob pattern {pat!r}")
        out.append(pat)
    return tuple(out)


@dataclass(frozen=True)
class RuleSet:
    """Classification rules: glob groups plus the idle-time cutoff.

    `not_waste_globs` is an allowlist evaluated before everything else.
    `degraded_checks` pairs a glob with the expected sha256 of matching
    files; a mismatch (or unreadable content) marks the file Degraded.
    """

    not_waste_globs: tuple[str, ...] = ()
    unintentional_globs: tuple[str, ...] = ()
    unwanted_globs: tuple[str, ...] = ()
    degraded_checks: tuple[tuple[str, str], ...] = ()
    used_threshold_secs: int = DEFAULT_USED_THRESHOLD_SECS

    def __post_init__(self):
        object.__setattr__(self, "not_waste_globs", _validate_globs(self.not_waste_globs, "not_waste_globs"))
        object.__setattr__(
            self, "unintentional_globs", _validate_globs(self.unintentional_globs, "unintentional_globs")
        )
        object.__setattr__(self, "unwanted_globs", _validate_globs(self.unwanted_globs, "unwanted_globs"))
        checks = []
        for item in self.degraded_checks:
            glob_pat, digest = item
            _validate_globs([glob_pat], "degraded_checks")
            if (
                not isinstance(digest, str)
                or len(digest) != DIGEST_HEX_LEN
                or digest != digest.lower()
                or any(c not in "0123456789abcdef" for c in digest)
            ):
                raise RuleSetError(f"degraded_checks: expected {DIGEST_HEX_LEN}-char lowercase hex digest, got {digest!r}")
            checks.append((glob_pat, digest))
        object.__setattr__(self, "degraded_checks", tuple(checks))
        if not isinstance(self.used_threshold_secs, int) or self.used_threshold_secs <= 0:
            raise RuleSetError(f"used_threshold_secs must be a positive integer, got {self.used_threshold_secs!r}")


_RULESET_KEYS = {"not_waste_globs", "unintentional_globs", "unwanted_globs", "degraded_checks", "used_threshold_secs"}


def ruleset_from_json_obj(obj: dict) -> RuleSet:
    if not isinstance(obj, dict):
        raise RuleSetError("rules config must be a JSON object")
    unknown = set(obj) - _RULESET_KEYS
    if unknown:
        raise RuleSetError(f"unknown rules keys: {sorted(unknown)}")
    checks = []
    for entry in obj.get("degraded_checks", []):
        if not isinstance(entry, dict) or set(entry) != {"glob", "sha256"}:
            raise RuleSetError(f"degraded_checks entries must be {{glob, sha256}} objects, got {entry!r}")
        checks.append((entry["glob"], entry["sha256"]))
    return RuleSet(
        not_waste_globs=tuple(obj.get("not_waste_globs", [])),
        unintentional_globs=tuple(obj.get("unintentional_globs", [])),
        unwanted_globs=tuple(obj.get("unwanted_globs", [])),
        degraded_checks=tuple(checks),
        used_threshold_secs=obj.get("used_threshold_secs", DEFAULT_USED_THRESHOLD_SECS),
    )


def load_rules(path: str) -> RuleSet:
    """Load and validate a rules config file (JSON)."""
    try:
        with open(path, "r", encoding="utf-8") as fh:
            obj = json.load(fh)
    except OSError as exc:
        raise RuleSetError(f"cannot read rules file {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise RuleSetError(f"rules file {path} is not valid JSON: {exc}") from exc
    return ruleset_from_json_obj(obj)


def f_lifetime(record: FileRecord) -> int:
    """Functional lifetime in seconds: max(0, atime - mtime).

    Zero means the file has never been read since it was last written,
    as far as timestamps can tell. Negative raw deltas (copy-preserved
    timestamps) clamp to zero. Undefined for non-regular files.
    """
    if record.kind is not FileKind.REGULAR:
        raise WastekitError(f"f-lifetime undefined for non-regular files: {record.path} is {record.kind.value}")
    return max(0, record.atime - record.mtime)


def sha256_file(path: str) -> str | None:
    """Lowercase hex sha256 of a file's content, or None if unreadable."""
    h = hashlib.sha256()
    try:
        with open(path, "rb") as fh:
            for block in iter(lambda: fh.read(1 << 16), b""):
                h.update(block)
    except OSError:
        return None
    return h.hexdigest()


def classify(
    record: FileRecord,
    rules: RuleSet,
    now: int,
    digest_provider: DigestProvider | None = None,
) -> WasteCategory:
    """Assign the single primary waste category of a record.

    Precedence: NotWaste allowlist, then Degraded, Unintentional,
    Unwanted, Used, and NotWaste as the fallthrough. Degraded wins over
    the others because corruption dominates any usefulness question.

    Degraded checks hash the file content through `digest_provider`
    (default: read `record.path` from the filesystem); an unreadable
    file counts as degraded, since unreadability is itself a quality
    loss. Content is only read when a degraded glob matches, and only
    for regular files.
    """
    path = record.path
    for pat in rules.not_waste_globs:
        if path_matches(path, pat):
            return WasteCategory.NOT_WASTE

    if record.kind is FileKind.REGULAR and rules.degraded_checks:
        digest: str | None = None
        digest_resolved = False
        for pat, expected in rules.degraded_checks:
            if not path_matches(path, pat):
                continue
            if not digest_resolved:
                provider = digest_provider if digest_provider is not None else sha256_file
                digest = provider(path)
                digest_resolved = True
            if digest is None or digest != expected:
                return WasteCategory.DEGRADED

    for pat in rules.unintentional_globs:
        if path_matches(path, pat):
            return WasteCategory.UNINTENTIONAL

    for pat in rules.unwanted_globs:
        if path_matches(path, pat):
            return WasteCategory.UNWANTED

    if record.kind is FileKind.REGULAR:
        if f_lifetime(record) > 0 and (now - record.atime) > rules.used_threshold_secs:
            return WasteCategory.USED

    return WasteCategory.NOT_WASTE
