"""
Yearly use-frequency distributions of technology codes.

The use frequency of a code in a year is the number of distinct patents
with that priority year carrying the code.
"""
from __future__ import annotations

import math
from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Iterable, Mapping

import numpy as np

from .ingest import EventTable, PatentCodeEvent, Scheme, SCHEMES, _SCHEME_CODE


@dataclass(frozen=True)
class FrequencyDistribution:
    """Use counts of each code in one (year, scheme) cell."""

    year: int
    scheme: Scheme
    counts: Mapping[str, int]

    def __post_init__(self):
        for code, c in self.counts.items():
            if c < 1:
                raise ValueError(f"code {code!r} has non-positive count {c}")

    @property
    def n(self) -> int:
        return len(self.counts)

    @property
    def total(self) -> int:
        return sum(self.counts.values())

    @property
    def mean(self) -> float:
        return self.total / self.n

    def values(self) -> np.ndarray:
        """Counts sorted ascending."""
        return np.sort(np.fromiter(self.counts.values(), dtype=np.int64, count=self.n))


@dataclass(frozen=True)
class GroupedFrequencyTable:
    """Frequency-of-frequencies: rows of (use frequency, number of codes)."""

    rows: tuple[tuple[int, int], ...]

    def __post_init__(self):
        xs = [x for x, _ in self.rows]
        if any(b <= a for a, b in zip(xs, xs[1:])):
            raise ValueError("use-frequency values must be strictly increasing")
        if any(m < 1 for _, m in self.rows):
            raise ValueError("every row needs at least one code")

    @classmethod
    def from_rows(cls, rows) -> "GroupedFrequencyTable":
        return cls(tuple((int(x), int(m)) for x, m in rows))

    @property
    def n(self) -> int:
        return sum(m for _, m in self.rows)

    @property
    def total(self) -> int:
        return sum(x * m for x, m in self.rows)

    @property
    def mean(self) -> float:
        return self.total / self.n

    def values(self) -> np.ndarray:
        """Expand to the ascending per-code count vector."""
        if not self.rows:
            return np.zeros(0, dtype=np.int64)
        x, m = np.array(self.rows, dtype=np.int64).T
        return np.repeat(x, m)

    def to_distribution(self, year: int = 0, scheme: Scheme = Scheme.IPC) -> FrequencyDistribution:
        """Rebuild a distribution with anonymous code names."""
        width = len(str(max(self.n - 1, 0)))
        counts = {f"code{i:0{width}d}": int(v) for i, v in enumerate(self.values())}
        return FrequencyDistribution(year, Scheme(scheme), counts)


@dataclass(frozen=True)
class DescriptiveStats:
    """Population moments of the per-code counts.

    ``skewness`` and ``kurtosis`` are None when the variance is zero.
    Kurtosis is the plain fourth standardized moment (normal = 3).
    """

    n: int
    mean: float
    max: int
    variance: float
    coefficient_of_variation: float
    skewness: float | None
    kurtosis: float | None


def _as_table(events) -> EventTable:
    if isinstance(events, EventTable):
        return events
    return EventTable.from_events(events)


def _distributions_of(table: EventTable) -> dict[tuple[int, Scheme], FrequencyDistribution]:
    out = {}
    if not len(table):
        return out
    codes = table.codes
    for s in SCHEMES:
        sub = table.for_scheme(s)
        for y in sub.years():
            c = sub.code[sub.year == y]
            ids, cnt = np.unique(c, return_counts=True)
            out[(y, s)] = FrequencyDistribution(
                y, s, {codes[i]: n for i, n in zip(ids.tolist(), cnt.tolist())})
    return out


def merge_distributions(a: Mapping, b: Mapping) -> dict[tuple[int, Scheme], FrequencyDistribution]:
    """Add two cell maps (count maps add per code)."""
    out = dict(a)
    for key, dist in b.items():
        if key in out:
            merged = Counter(out[key].counts)
            merged.update(dist.counts)
            out[key] = FrequencyDistribution(key[0], key[1], dict(sorted(merged.items())))
        else:
            out[key] = dist
    return {k: out[k] for k in sorted(out, key=lambda k: (k[0], _SCHEME_CODE[k[1]]))}


def build_distributions(events: EventTable | Iterable[PatentCodeEvent], threads: int = 1
                        ) -> dict[tuple[int, Scheme], FrequencyDistribution]:
    """Group events into one distribution per (year, scheme).

    Events must already be deduplicated per (patent, scheme, code), which
    :class:`EventTable` guarantees. With ``threads > 1`` the rows are split
    in contiguous chunks, aggregated independently and merged; the result
    is identical to the sequential one.
    """
    table = _as_table(events)
    if threads <= 1 or len(table) < 2 * threads:
        return merge_distributions({}, _distributions_of(table))
    bounds = np.linspace(0, len(table), threads + 1).astype(int)
    chunks = [table.select(slice(a, b)) for a, b in zip(bounds[:-1], bounds[1:])]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        parts = list(pool.map(_distributions_of, chunks))
    out: dict = {}
    for part in parts:
        out = merge_distributions(out, part)
    return out


def group_table(dist: FrequencyDistribution | Mapping[str, int]) -> GroupedFrequencyTable:
    counts = dist.counts if isinstance(dist, FrequencyDistribution) else dist
    tally = Counter(counts.values())
    return GroupedFrequencyTable(tuple(sorted(tally.items())))


def describe(dist) -> DescriptiveStats:
    """Mean, max, population variance, CV, skewness and kurtosis."""
    if isinstance(dist, (FrequencyDistribution, GroupedFrequencyTable)):
        y = dist.values()
    else:
        y = np.sort(np.asarray(dist))
    n = len(y)
    if n == 0:
        raise ValueError("cannot describe an empty distribution")
    mean = math.fsum(y.tolist()) / n
    d = (y - mean).tolist()
    m2 = math.fsum(v * v for v in d) / n
    if m2 <= 0.0:
        return DescriptiveStats(n, mean, int(y[-1]), 0.0, 0.0, None, None)
    m3 = math.fsum(v ** 3 for v in d) / n
    m4 = math.fsum(v ** 4 for v in d) / n
    return DescriptiveStats(
        n=n,
        mean=mean,
        max=int(y[-1]),
        variance=m2,
        coefficient_of_variation=math.sqrt(m2) / mean,
        skewness=m3 / m2 ** 1.5,
        kurtosis=m4 / (m2 * m2),
    )
