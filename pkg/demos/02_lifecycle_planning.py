"""Pick a lifecycle action for each piece of waste, then price it.

The five-step ladder (Reduce > Reuse > Recycle > Recover > Dispose) is
applied per file under feasibility masks: compile by-products can be
suppressed at the source (Reduce), duplicated media can be deduplicated
(Recycle), and the rest falls through to Dispose. The cost model then
shows why the same plan is 100x cheaper in endurance terms on SLC
flash than on MLC.
"""

from wastekit import (
    CostModel,
    FeasibilityMask,
    FileKind,
    FileRecord,
    WasteCategory,
    estimate_cost,
    plan,
)

MB = 1024 * 1024


def rec(path, size):
    return FileRecord(path=path, kind=FileKind.REGULAR, size_bytes=size, mtime=0, atime=0)


entries = [
    # object files: the build system could simply stop leaving them around
    (rec("obj/parser.o", 2 * MB), WasteCategory.UNINTENTIONAL,
     FeasibilityMask(reduce_ok=True, recycle_ok=True)),
    (rec("obj/lexer.o", 1 * MB), WasteCategory.UNINTENTIONAL,
     FeasibilityMask(reduce_ok=True, recycle_ok=True)),
    # a duplicated video: dedup (recycle) beats deleting it outright
    (rec("media/talk-copy.mp4", 700 * MB), WasteCategory.UNWANTED,
     FeasibilityMask(recycle_ok=True)),
    # stale logs: only their structure is worth keeping
    (rec("logs/app.log.1", 50 * MB), WasteCategory.USED,
     FeasibilityMask(recover_ok=True)),
    # a corrupted download: nothing to salvage
    (rec("dl/broken.iso", 300 * MB), WasteCategory.DEGRADED, FeasibilityMask()),
]

action_plan = plan(entries)
print("chosen actions:")
for entry in action_plan.entries:
    print(f"  {entry.action.label:<8} {entry.path:<22} ({entry.bytes_affected // MB} MB affected)")

print("\nper action totals:")
for action, (files, nbytes) in sorted(action_plan.totals.items(), key=lambda kv: int(kv[0])):
    print(f"  {action.label:<8} {files} file(s), {nbytes // MB} MB")

for device in ("MLC", "SLC"):
    cost = estimate_cost(action_plan, CostModel.for_device(device))
    print(
        f"\non {device}: {cost.erase_cycles_consumed} erase cycles, "
        f"{float(cost.endurance_fraction):.4%} of one cell's endurance, "
        f"energy {cost.energy_units:.3g}"
    )
