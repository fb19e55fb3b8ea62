"""Splitting total Theil inequality into within- and between-division parts.

Total = sum_g s_g T_g + sum_g s_g ln(mu_g / mu), with s_g the division's
share of all uses.
"""
import numpy as np

from techineq import FrequencyDistribution, PartitionedDistribution, Scheme, decompose, rank_divisions, theil

rng = np.random.default_rng(0)
subsets = {}
for div, (size, a) in {"20": (300, 2.2), "21": (200, 2.6), "26": (500, 1.9), "Co_IPC": (40, 2.5)}.items():
    values = rng.zipf(a, size=size)
    subsets[div] = FrequencyDistribution(2000, Scheme.IPC, {f"{div}-{i}": int(v) for i, v in enumerate(values)})
part = PartitionedDistribution(2000, subsets)

r = decompose(part)
print(f"total {r.total:.6f} = within {r.within:.6f} + between {r.between:.6f}")
print(f"within share {r.within_share:.3f}; Theil of merged distribution {theil(part.merged()):.6f}")
for div, s in r.per_division.items():
    print(f"  {div:>6}: n={s.n:4d} mu={s.mu:7.3f} share={s.share:.3f} theil={s.theil:.4f}")

print("\nranking by Gini:")
for row in rank_divisions(part, "gini").rows:
    print(f"  {row.division:>6} {row.value:.4f}")
