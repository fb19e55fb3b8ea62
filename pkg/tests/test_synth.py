import json

import pytest

from techineq.synth import SKEWED, UNIFORM, SyntheticProfile, generate_synthetic

from oracles import expand, gini_pairwise


def truth_gini(truth, scheme, year):
    return gini_pairwise(expand(truth["tables"][scheme][str(year)]))


def test_same_seed_same_files(tmp_path):
    a = generate_synthetic(tmp_path / "a", seed=3, profile=SyntheticProfile(patents=200))
    b = generate_synthetic(tmp_path / "b", seed=3, profile=SyntheticProfile(patents=200))
    for key in a:
        assert a[key].read_bytes() == b[key].read_bytes(), key
    c = generate_synthetic(tmp_path / "c", seed=4, profile=SyntheticProfile(patents=200))
    assert c["ipc"].read_bytes() != a["ipc"].read_bytes()


def test_truth_totals_consistent(tmp_path):
    paths = generate_synthetic(tmp_path, seed=2, profile=SyntheticProfile(patents=300))
    truth = json.loads(paths["truth"].read_text())
    for scheme in ("IPC", "CPC"):
        rows = [r for year in truth["tables"][scheme].values() for r in year]
        assert sum(x * n for x, n in rows) == truth["totals"][scheme]["total_uses"]
    assert truth["patents"] == 300


def uniform_profile(**kw):
    base = dict(patents=100, years=(2000, 2000), codes_per_patent=(3, 3),
                ipc_vocabulary=10, cpc_vocabulary=10, **UNIFORM)
    base.update(kw)
    return SyntheticProfile(**base)


def test_uniform_profile_is_nearly_equal(tmp_path):
    truth = json.loads(generate_synthetic(tmp_path, seed=1, profile=uniform_profile())["truth"].read_text())
    assert truth_gini(truth, "IPC", 2000) < 0.15
    assert truth_gini(truth, "CPC", 2000) < 0.15


def test_skew_raises_inequality(tmp_path):
    flat = json.loads(generate_synthetic(
        tmp_path / "u", seed=1, profile=uniform_profile(ipc_vocabulary=200, cpc_vocabulary=200))["truth"].read_text())
    steep = json.loads(generate_synthetic(
        tmp_path / "s", seed=1, profile=uniform_profile(ipc_vocabulary=200, cpc_vocabulary=200, **SKEWED))["truth"].read_text())
    assert truth_gini(steep, "IPC", 2000) > truth_gini(flat, "IPC", 2000)


@pytest.mark.parametrize("kw", [dict(patents=0), dict(years=(2005, 2000)),
                                dict(codes_per_patent=(4, 2)), dict(codes_per_patent=(1, 20), ipc_vocabulary=10)])
def test_bad_profiles(kw):
    with pytest.raises(ValueError):
        SyntheticProfile(**kw)
