"""From patent/code events to yearly use-frequency distributions.

A code's use frequency in a year is the number of patents with that
priority year that carry it.
"""
from techineq import EventTable, PatentCodeEvent, Scheme, build_distributions, describe, group_table

events = [
    PatentCodeEvent("WO1", 1990, Scheme.IPC, "A61K 8/02"),
    PatentCodeEvent("WO1", 1990, Scheme.IPC, "C07C 5/00"),
    PatentCodeEvent("WO2", 1990, Scheme.IPC, "C07C 5/00"),
    PatentCodeEvent("WO3", 1990, Scheme.IPC, "C07C 5/00"),
    PatentCodeEvent("WO3", 1990, Scheme.IPC, "G06F 3/01"),
    PatentCodeEvent("WO4", 1991, Scheme.IPC, "G06F 3/01"),
    PatentCodeEvent("WO4", 1991, Scheme.CPC, "G06F 3/0482"),
]
table = EventTable.from_events(events)
dists = build_distributions(table)

for (year, scheme), d in sorted(dists.items()):
    print(f"{year} {scheme.value}: {dict(d.counts)}")
    print("   grouped rows (x, n):", group_table(d).rows)
    s = describe(d)
    print(f"   n={s.n} total={d.total} mean={s.mean:.3f} max={s.max} "
          f"var={s.variance:.3f} cv={s.coefficient_of_variation:.3f} "
          f"skew={s.skewness} kurt={s.kurtosis}")
