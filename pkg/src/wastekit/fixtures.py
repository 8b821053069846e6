"""Synthetic tree builders for desk-scale measurements and tests.

The builders construct trees whose never-accessed-file and
never-accessed-space percentages hit exact targets, plus a
compilation-byproduct tree mixing intended products with temporary
object code.
"""

from __future__ import annotations

import os

# (never-accessed % of files, never-accessed % of used space) profiles
# observed on real machines: a personal laptop, a desktop workstation,
# and a shared lab server.
REFERENCE_PROFILES = {
    "laptop": (20.6, 98.5),
    "desktop": (47.4, 38.1),
    "server": (57.1, 99.5),
}

ACCESS_GAP_SECS = 7 * 86400  # atime lead for "accessed" files


def _split_bytes(total: int, parts: int) -> list[int]:
    """Deterministic integer split: floor share plus remainder up front."""
    if parts == 0:
        return []
    base, extra = divmod(total, parts)
    return [base + 1 if i < extra else base for i in range(parts)]


def build_never_accessed_tree(
    dest: str,
    files_pct: float,
    space_pct: float,
    total_files: int = 1000,
    byte_unit: int = 64,
    base_time: int = 1_600_000_000,
) -> None:
    """Build a tree where exactly `files_pct` percent of files (and
    `space_pct` percent of bytes) have never been read since last write.

    Percentages must land on integers given `total_files` files and a
    per-mille byte budget; never-read files get atime == mtime, the rest
    get atime > mtime.
    """
    never_files_exact = total_files * files_pct / 100.0
    never_files = round(never_files_exact)
    if abs(never_files - never_files_exact) > 1e-9:
        raise ValueError(f"files_pct {files_pct} is not exact over {total_files} files")
    space_permille = round(space_pct * 10)
    if abs(space_permille - space_pct * 10) > 1e-9:
        raise ValueError(f"space_pct {space_pct} needs at most one decimal place")

    accessed_files = total_files - never_files
    never_bytes = space_permille * byte_unit
    accessed_bytes = (1000 - space_permille) * byte_unit

    os.makedirs(dest, exist_ok=True)
    never_sizes = _split_bytes(never_bytes, never_files)
    accessed_sizes = _split_bytes(accessed_bytes, accessed_files)

    idx = 0
    for size in never_sizes:
        path = os.path.join(dest, f"f{idx:06d}.dat")
        with open(path, "wb") as fh:
            fh.write(b"x" * size)
        os.utime(path, (base_time, base_time))
        idx += 1
    for size in accessed_sizes:
        path = os.path.join(dest, f"f{idx:06d}.dat")
        with open(path, "wb") as fh:
            fh.write(b"x" * size)
        os.utime(path, (base_time + ACCESS_GAP_SECS, base_time))
        idx += 1


def build_reference_trees(dest: str, **kwargs) -> dict[str, str]:
    """Build one tree per reference profile under `dest`; returns paths."""
    out = {}
    for name, (files_pct, space_pct) in REFERENCE_PROFILES.items():
        tree = os.path.join(dest, name)
        build_never_accessed_tree(tree, files_pct, space_pct, **kwargs)
        out[name] = tree
    return out


def build_compile_byproducts_tree(
    dest: str,
    product_bytes: int = 13_600_000,
    byproduct_bytes: int = 44_500_000,
    byproduct_files: int = 89,
    product_files: int = 4,
    base_time: int = 1_600_000_000,
) -> None:
    """Build a source-build output tree: intended products under lib/,
    temporary object files under obj/.

    Matches the shape left behind by compiling a mid-size C project:
    the .o files are pure by-products, the installed libraries are the
    intended output. Defaults give 13.6 MB of products beside 44.5 MB
    of object code.
    """
    lib_dir = os.path.join(dest, "lib")
    obj_dir = os.path.join(dest, "obj")
    os.makedirs(lib_dir, exist_ok=True)
    os.makedirs(obj_dir, exist_ok=True)

    for i, size in enumerate(_split_bytes(product_bytes, product_files)):
        path = os.path.join(lib_dir, f"libproduct{i}.so")
        with open(path, "wb") as fh:
            fh.write(b"\x7fELF" + b"\0" * max(0, size - 4))
        os.utime(path, (base_time, base_time))
    for i, size in enumerate(_split_bytes(byproduct_bytes, byproduct_files)):
        path = os.path.join(obj_dir, f"unit{i:03d}.o")
        with open(path, "wb") as fh:
            fh.write(b"\x7fELF" + b"\0" * max(0, size - 4))
        os.utime(path, (base_time, base_time))
