"""Gini, Theil and the Lorenz curve for the 1978 frequency tables.

Each row (x, n) says that n distinct codes were each used x times that
year.  The measures work directly on the grouped table; expanding it to
one value per code gives the same numbers.
"""
from techineq import GroupedFrequencyTable, gini, lorenz, theil

IPC_1978 = [(1, 3260), (2, 521), (3, 116), (4, 48), (5, 19), (6, 4), (7, 2), (8, 3),
            (9, 3), (12, 2), (18, 1)]
CPC_1978 = [(1, 3791), (2, 338), (3, 55), (4, 54), (5, 14), (6, 6), (7, 4), (8, 2),
            (9, 2), (11, 1), (13, 1), (15, 1)]

for name, rows in (("IPC", IPC_1978), ("CPC", CPC_1978)):
    t = GroupedFrequencyTable.from_rows(rows)
    per_code = t.values()
    print(f"{name} 1978: n={t.n} codes, {t.total} uses, mean {t.mean:.4f}")
    print(f"  Gini  grouped {gini(t):.6f}   per code {gini(per_code):.6f}")
    print(f"  Theil grouped {theil(t):.6f}   per code {theil(per_code):.6f}")

curve = lorenz(GroupedFrequencyTable.from_rows(IPC_1978))
print("\nIPC 1978 Lorenz breakpoints (share of codes, share of uses):")
for x, y in curve.points:
    print(f"  {x:.4f}  {y:.4f}")
