"""Content-defined chunking: reuse that survives shifted bytes.

Fixed-size blocks break as soon as one byte is inserted at the front —
every block boundary moves. Content-defined boundaries are computed
from the bytes themselves, so they re-align right after the edit. This
script measures both effects and prints an anonymized waste summary of
the kind `wastekit recover` emits.
"""

import random

from wastekit import ChunkStore, chunk

rng = random.Random(42)
MiB = 1024 * 1024

# -- duplicate detection across objects ----------------------------------

store = ChunkStore()
document = rng.randbytes(2 * MiB)

r1 = store.ingest("home/alice/report.bin", document)
r2 = store.ingest("home/bob/report-copy.bin", document)
print(f"alice's copy: {r1.physical_new_bytes} new bytes out of {r1.logical_bytes}")
print(f"bob's copy:   {r2.physical_new_bytes} new bytes out of {r2.logical_bytes}")
print(f"store-wide dedup ratio: {store.dedup_ratio():.2f}x\n")

# -- shift resistance ------------------------------------------------------

edited = b"v2: " + document  # four bytes prepended, every offset moves
r3 = store.ingest("home/alice/report-v2.bin", edited)
pct = 100 * r3.physical_new_bytes / len(edited)
print(f"4-byte prepend: {r3.physical_new_bytes} new bytes ({pct:.2f}% of the file)")

boundaries_before = len(chunk(document))
boundaries_after = len(chunk(edited))
print(f"chunks before/after the edit: {boundaries_before} / {boundaries_after}")

# contrast: fixed 8 KiB blocks share nothing after the shift
block = 8192
before = {document[i:i + block] for i in range(0, len(document), block)}
after = {edited[i:i + block] for i in range(0, len(edited), block)}
print(f"fixed-size blocks surviving the same edit: {len(before & after)}\n")

# -- everything round-trips ------------------------------------------------

assert store.restore("home/alice/report-v2.bin") == edited
assert store.check_consistency() == []
stats = store.stats()
print(f"{stats['objects']} objects, {stats['chunks']} chunks, "
      f"{stats['logical_bytes']} logical bytes in {stats['physical_bytes']} physical")
