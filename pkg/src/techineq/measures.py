"""
Lorenz curves, the Gini index (Brown formula) and the Theil index.

All functions accept a :class:`FrequencyDistribution`, a
:class:`GroupedFrequencyTable` or a plain array of positive counts. Grouped
input is evaluated on its distinct values directly; the result equals the
per-code evaluation.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .frequency import FrequencyDistribution, GroupedFrequencyTable

_TOL = 1e-12


@dataclass(frozen=True)
class LorenzCurve:
    """Piecewise-linear Lorenz curve through points ``(x[i], y[i])``.

    ``x`` is the cumulative share of codes, ``y`` the cumulative share of
    uses, codes taken from least to most used.
    """

    x: np.ndarray
    y: np.ndarray

    def __post_init__(self):
        x, y = self.x, self.y
        if len(x) != len(y) or len(x) < 2:
            raise ValueError("a Lorenz curve needs matching x, y with at least two points")
        if x[0] != 0 or y[0] != 0:
            raise ValueError("Lorenz curve must start at (0, 0)")
        if abs(x[-1] - 1) > _TOL or abs(y[-1] - 1) > _TOL:
            raise ValueError("Lorenz curve must end at (1, 1)")
        if np.any(np.diff(x) <= 0):
            raise ValueError("x must be strictly increasing")
        if np.any(np.diff(y) < 0):
            raise ValueError("y must be non-decreasing")

    @property
    def k(self) -> int:
        """Number of linear segments."""
        return len(self.x) - 1

    @property
    def points(self) -> list[tuple[float, float]]:
        return list(zip(self.x.tolist(), self.y.tolist()))


@dataclass(frozen=True)
class InequalityResult:
    n: int
    mu: float
    gini: float
    theil: float


def _grouped(data) -> tuple[np.ndarray, np.ndarray]:
    """Return distinct ascending values and their multiplicities."""
    if isinstance(data, GroupedFrequencyTable):
        if not data.rows:
            raise ValueError("empty frequency table")
        x, m = np.array(data.rows, dtype=np.int64).T
        return x, m
    values = _values(data)
    x, m = np.unique(values, return_counts=True)
    return x, m


def _values(data) -> np.ndarray:
    if isinstance(data, (FrequencyDistribution, GroupedFrequencyTable)):
        y = data.values()
    else:
        y = np.sort(np.asarray(data).ravel())
    if len(y) == 0:
        raise ValueError("empty distribution")
    if y[0] <= 0:
        raise ValueError("counts must be positive")
    return y


def lorenz(data, grouped: bool | None = None) -> LorenzCurve:
    """Build the Lorenz curve of a count distribution.

    By default a :class:`GroupedFrequencyTable` gives one point per
    distinct count value and any other input gives one point per code.
    Pass ``grouped`` to force either form; both trace the same curve.
    """
    if grouped is None:
        grouped = isinstance(data, GroupedFrequencyTable)
    if grouped:
        x, m = _grouped(data)
    else:
        x = _values(data)
        m = np.ones(len(x), dtype=np.int64)
    if x[0] <= 0:
        raise ValueError("counts must be positive")
    cum_codes = np.concatenate(([0], np.cumsum(m)))
    cum_uses = np.concatenate(([0], np.cumsum(x * m)))
    X = cum_codes / cum_codes[-1]
    Y = cum_uses / cum_uses[-1]
    return LorenzCurve(X, Y)


def gini(data) -> float:
    """Gini index via the Brown formula.

    ``G = 1 - sum_i (Y[i+1] + Y[i]) * (X[i+1] - X[i])`` over the Lorenz
    curve points. No small-sample correction is applied.
    """
    curve = data if isinstance(data, LorenzCurve) else lorenz(data, grouped=True)
    X, Y = curve.x, curve.y
    terms = (Y[1:] + Y[:-1]) * (X[1:] - X[:-1])
    g = 1.0 - math.fsum(terms.tolist())
    # the empty sum of a perfectly equal curve can leave -1e-16
    return max(g, 0.0)


def theil(data) -> float:
    """Theil index ``(1/n) sum (y/mu) ln(y/mu)`` with natural logs.

    Zero counts contribute nothing (the ``0 ln 0 = 0`` limit).
    """
    if isinstance(data, GroupedFrequencyTable):
        if not data.rows:
            raise ValueError("empty frequency table")
        x, m = np.array(data.rows, dtype=np.float64).T
    else:
        if isinstance(data, FrequencyDistribution):
            y = data.values()
        else:
            y = np.asarray(data).ravel()
        if len(y) == 0:
            raise ValueError("empty distribution")
        if np.any(y < 0):
            raise ValueError("counts must be non-negative")
        x = np.sort(y).astype(np.float64)
        m = np.ones(len(x))
    n = math.fsum(m.tolist())
    total = math.fsum((x * m).tolist())
    if total <= 0:
        raise ValueError("distribution has no uses")
    mu = total / n
    r = x / mu
    with np.errstate(divide="ignore", invalid="ignore"):
        terms = np.where(r > 0, m * r * np.log(r), 0.0)
    t = math.fsum(terms.tolist()) / n
    return max(t, 0.0)


def inequality(data) -> InequalityResult:
    x, m = _grouped(data)
    table = GroupedFrequencyTable(tuple(zip(x.tolist(), m.tolist())))
    return InequalityResult(n=table.n, mu=table.mean, gini=gini(table), theil=theil(table))
