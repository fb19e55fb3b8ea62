"""
Within/between decomposition of the Theil index over NACE divisions.

For disjoint subsets ``g`` with ``n_g`` codes and mean use ``mu_g``::

    T = sum_g s_g T(y^g)  +  sum_g s_g ln(mu_g / mu),   s_g = n_g mu_g / (n mu)

The first sum is the within-division term, the second the between term.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from decimal import ROUND_HALF_UP, Decimal
from fractions import Fraction
from typing import Mapping

from .frequency import FrequencyDistribution
from .ingest import Scheme
from .measures import gini, theil

ALL_LABEL = "All"


@dataclass(frozen=True)
class PartitionedDistribution:
    """One year's IPC distribution split into disjoint division subsets."""

    year: int
    subsets: Mapping[str, FrequencyDistribution]
    metadata: Mapping[str, str] = field(default_factory=dict)

    def __post_init__(self):
        seen: set[str] = set()
        for div, dist in self.subsets.items():
            overlap = seen.intersection(dist.counts)
            if overlap:
                raise ValueError(f"division {div} shares codes with another subset: {sorted(overlap)[:3]}")
            seen.update(dist.counts)

    @property
    def n(self) -> int:
        return sum(d.n for d in self.subsets.values())

    @property
    def total(self) -> int:
        return sum(d.total for d in self.subsets.values())

    @property
    def mu(self) -> float:
        return self.total / self.n

    @property
    def division_count(self) -> int:
        return sum(1 for d in self.subsets.values() if d.n)

    def merged(self) -> FrequencyDistribution:
        counts: dict[str, int] = {}
        for dist in self.subsets.values():
            counts.update(dist.counts)
        return FrequencyDistribution(self.year, Scheme.IPC, dict(sorted(counts.items())))


@dataclass(frozen=True)
class DivisionStats:
    n: int
    mu: float
    share: float
    theil: float
    gini: float


@dataclass(frozen=True)
class DecompositionResult:
    year: int
    total: float
    within: float
    between: float
    per_division: Mapping[str, DivisionStats]

    @property
    def within_share(self) -> float:
        return self.within / self.total if self.total > 0 else float("nan")


@dataclass(frozen=True)
class RankRow:
    division: str
    value: float
    n: int
    mu: float
    share: float
    degenerate: bool = False


@dataclass(frozen=True)
class DivisionRanking:
    """Divisions in descending order of inequality, plus the ``All`` row."""

    year: int
    measure: str
    rows: tuple[RankRow, ...]
    all_row: RankRow

    @property
    def order(self) -> list[str]:
        return [r.division for r in self.rows]


def _populated(part: PartitionedDistribution) -> dict[str, FrequencyDistribution]:
    subsets = {k: v for k, v in sorted(part.subsets.items()) if v.n}
    if not subsets:
        raise ValueError("partition has no populated subsets")
    return subsets


def decompose(part: PartitionedDistribution) -> DecompositionResult:
    subsets = _populated(part)
    total_uses = sum(d.total for d in subsets.values())
    n = sum(d.n for d in subsets.values())
    mu = total_uses / n
    per = {}
    within_terms, between_terms = [], []
    for div, dist in subsets.items():
        share = dist.total / total_uses
        t_g = theil(dist)
        per[div] = DivisionStats(dist.n, dist.mean, share, t_g, gini(dist))
        within_terms.append(share * t_g)
        between_terms.append(share * math.log(dist.mean / mu))
    return DecompositionResult(
        year=part.year,
        total=theil(part.merged()),
        within=math.fsum(within_terms),
        between=math.fsum(between_terms),
        per_division=per,
    )


def rank_divisions(part: PartitionedDistribution, measure: str = "theil") -> DivisionRanking:
    """Rank populated divisions by their internal Gini or Theil index.

    Divisions with fewer than two codes get value 0 and are flagged
    degenerate. Ties are broken by ascending division label.
    """
    if measure not in ("gini", "theil"):
        raise ValueError(f"unknown measure {measure!r}")
    fn = gini if measure == "gini" else theil
    subsets = _populated(part)
    total_uses = sum(d.total for d in subsets.values())
    rows = []
    for div, dist in subsets.items():
        degenerate = dist.n < 2
        value = 0.0 if degenerate else fn(dist)
        rows.append(RankRow(div, value, dist.n, dist.mean, dist.total / total_uses, degenerate))
    rows.sort(key=lambda r: (-r.value, r.division))
    merged = part.merged()
    all_row = RankRow(ALL_LABEL, fn(merged), merged.n, merged.mean, 1.0, merged.n < 2)
    return DivisionRanking(part.year, measure, tuple(rows), all_row)


@dataclass(frozen=True)
class SeriesRow:
    year: int
    total: float
    within: float
    between: float

    @property
    def within_share(self) -> float:
        return self.within / self.total if self.total > 0 else float("nan")


def decomposition_series(partitions: Mapping[int, PartitionedDistribution]) -> list[SeriesRow]:
    rows = []
    for year in sorted(partitions):
        res = decompose(partitions[year])
        rows.append(SeriesRow(year, res.total, res.within, res.between))
    return rows


def use_shares(totals: Mapping[str, int]) -> dict[str, Fraction]:
    """Exact share of total use held by each division."""
    grand = sum(totals.values())
    if grand <= 0:
        raise ValueError("no uses to share out")
    return {k: Fraction(v, grand) for k, v in totals.items()}


def share_percentages(totals: Mapping[str, int], decimals: int = 2) -> dict[str, Decimal]:
    """Percentage of total use per division, rounded half-up."""
    q = Decimal(1).scaleb(-decimals)
    out = {}
    for k, frac in use_shares(totals).items():
        pct = Decimal(frac.numerator * 100) / Decimal(frac.denominator)
        out[k] = pct.quantize(q, rounding=ROUND_HALF_UP)
    return out
