"""Randomized invariants of the measures and the decomposition.

Each property runs EXAMPLES cases with a fresh random seed per session.
"""
import math

import numpy as np
from hypothesis import given, settings, strategies as st

from techineq.decomposition import PartitionedDistribution, decompose
from techineq.frequency import FrequencyDistribution, group_table
from techineq.ingest import Scheme
from techineq.measures import gini, lorenz, theil

from oracles import gini_pairwise, theil_direct

EXAMPLES = 200

counts = st.lists(st.integers(1, 100), min_size=1, max_size=1000)


def dist(values, year=2000):
    return FrequencyDistribution(year, Scheme.IPC, {f"c{i}": int(v) for i, v in enumerate(values)})


@settings(max_examples=EXAMPLES)
@given(counts)
def test_brown_gini_matches_pairwise(values):
    assert abs(gini(values) - gini_pairwise(values)) <= 1e-12
    assert abs(gini(lorenz(values)) - gini_pairwise(values)) <= 1e-12


@settings(max_examples=EXAMPLES)
@given(counts)
def test_grouping_invariance(values):
    d = dist(values)
    t = group_table(d)
    assert abs(theil(t) - theil(d)) <= 1e-12
    assert abs(theil(d) - theil_direct(values)) <= 1e-12
    assert abs(gini(t) - gini(lorenz(d))) <= 1e-12


@settings(max_examples=EXAMPLES)
@given(counts, st.integers(1, 50))
def test_scale_invariance(values, c):
    scaled = [v * c for v in values]
    assert abs(gini(scaled) - gini(values)) <= 1e-12
    assert abs(theil(scaled) - theil(values)) <= 1e-12


@settings(max_examples=EXAMPLES)
@given(st.lists(st.integers(1, 100), min_size=1, max_size=500))
def test_replication_invariance(values):
    doubled = values + values
    assert abs(gini(doubled) - gini(values)) <= 1e-12
    assert abs(theil(doubled) - theil(values)) <= 1e-12


@settings(max_examples=EXAMPLES)
@given(counts)
def test_bounds(values):
    n = len(values)
    g, t = gini(values), theil(values)
    assert 0 <= g <= 1 - 1 / n + 1e-12
    assert 0 <= t <= math.log(n) + 1e-12
    if len(set(values)) == 1:
        assert g == 0 and t == 0
    else:
        assert g > 0 and t > 0


@settings(max_examples=EXAMPLES)
@given(st.lists(st.integers(1, 100), min_size=2, max_size=1000), st.data())
def test_transfer_principle(values, data):
    y = sorted(values)
    if y[-1] - y[0] < 2:
        y[-1] = y[0] + 2
    rich = data.draw(st.sampled_from([i for i, v in enumerate(y) if v >= y[0] + 2]))
    poor = data.draw(st.sampled_from([i for i, v in enumerate(y) if v <= y[rich] - 2]))
    moved = list(y)
    moved[rich] -= 1
    moved[poor] += 1
    assert gini(moved) < gini(y)
    assert theil(moved) < theil(y)


@settings(max_examples=EXAMPLES)
@given(counts, st.randoms())
def test_lorenz_shape_and_tie_order(values, rnd):
    c = lorenz(values)
    assert np.all(c.y <= c.x + 1e-15)
    slopes = np.diff(c.y) / np.diff(c.x)
    assert np.all(np.diff(slopes) >= -1e-9)
    shuffled = list(values)
    rnd.shuffle(shuffled)
    assert lorenz(shuffled).points == c.points


@st.composite
def partitions(draw):
    n_groups = draw(st.integers(1, 27))
    rng = np.random.default_rng(draw(st.integers(0, 2**32 - 1)))
    subsets = {}
    for g in range(n_groups):
        size = int(rng.integers(1, 400))
        values = rng.integers(1, 200, size=size) * int(rng.integers(1, 4))
        subsets[f"{g:02d}"] = FrequencyDistribution(
            2000, Scheme.IPC, {f"{g}-{i}": int(v) for i, v in enumerate(values)})
    return PartitionedDistribution(2000, subsets)


@settings(max_examples=EXAMPLES)
@given(partitions())
def test_decomposition_identity_and_conservation(part):
    r = decompose(part)
    assert abs(r.total - (r.within + r.between)) <= 1e-9
    assert r.between >= -1e-15
    assert abs(math.fsum(d.share for d in r.per_division.values()) - 1) <= 1e-12
    merged = part.merged()
    assert merged.n == sum(d.n for d in part.subsets.values())
    assert merged.total == sum(d.total for d in part.subsets.values())
    assert abs(theil(merged) - r.total) <= 1e-9
