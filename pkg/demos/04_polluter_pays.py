"""Pay-as-you-throw bandwidth: producers of waste wait longer.

Two producers ask the storage scheduler for identical bandwidth. One
writes clean data; the other's stream is half waste. The scheduler
scales each producer's share by 1 / (1 + alpha * waste_ratio), so the
polluter's transfers stretch out while the clean producer finishes
early — same total work, different queues.
"""

from fractions import Fraction

from wastekit import SchedulerConfig, parse_workload, simulate

lines = []
for tick in range(8):
    lines.append(f"{tick} clean 100 0.0")
    lines.append(f"{tick} sloppy 100 0.5")
trace = parse_workload(lines)

for alpha in (0, 2):
    config = SchedulerConfig(total_bandwidth=150, alpha=alpha, tick_count=20)
    rep = simulate(trace, config)
    print(f"alpha = {alpha}  (bandwidth 150/tick, both request 100/tick for 8 ticks)")
    for pid, result in sorted(rep.producers.items()):
        bar = ""
        cumulative = 0
        for delivered in result.delivered_per_tick:
            cumulative += delivered
            bar += "#" if delivered else "."
        print(
            f"  {pid:<7} factor={float(result.final_factor):.3f} "
            f"done@tick {result.completion_tick:>2}  |{bar}|"
        )
    print()

print("the waste itself is also tallied per producer:")
rep = simulate(trace, SchedulerConfig(total_bandwidth=150, alpha=Fraction(2), tick_count=20))
for pid, result in sorted(rep.producers.items()):
    print(f"  {pid:<7} useful={float(result.useful_bytes):.0f}B waste={float(result.waste_bytes):.0f}B")
