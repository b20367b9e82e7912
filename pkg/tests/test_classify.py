"""Attractor classification, domain labeling, and threshold scans."""

import numpy as np

from alleepatch.classify import (bracket_cycle_loss_2d, classify_ic,
                                 default_seed_set, local_portrait_2d,
                                 portrait_sweep)
from alleepatch.model import ModelParams, SystemId


def params(alpha=0.1, m=0.5, l=0.1, gamma=1.0):
    return ModelParams.symmetric(alpha=alpha, gamma=gamma, m=m, l=l)


def test_classify_extinction_from_tiny_seed():
    p = params(alpha=0.02, m=0.45, l=0.1)
    r = classify_ic(SystemId.FULL, [0.01, 0.01, 0.01, 0.01], p)
    assert r.kind == "origin_extinction"
    assert np.allclose(r.final_state, 0.0, atol=1e-5)


def test_classify_stable_equilibrium():
    p = params(alpha=0.1, m=0.6, l=0.1)
    vstar = (0.6 - 0.1) * (1 - 0.6)
    r = classify_ic(SystemId.FULL, [0.61, vstar, 0.59, vstar], p)
    assert r.kind == "equilibrium"
    assert r.tag == "AA"


def test_classify_symmetric_cycle():
    p = params(alpha=0.1, m=0.5, l=0.1)
    r = classify_ic(SystemId.FULL, [0.9, 0.2, 0.05, 0.05], p, budget=12000)
    assert r.kind == "cycle"
    assert r.tag == "cu"
    assert r.k == 1
    assert abs(r.period - 26.2092) < 1e-2


def test_classify_one_predator_cycle():
    p = params(alpha=0.07, m=0.45, l=0.1)
    r = classify_ic(SystemId.FULL, [0.8, 0.25, 0.6, 0.0], p, budget=12000)
    assert r.kind in ("cycle", "equilibrium")
    if r.kind == "cycle":
        assert r.tag == "c3"
        assert r.final_state[3] < 1e-8


def test_classify_deterministic():
    p = params(alpha=0.1, m=0.5, l=0.1)
    r1 = classify_ic(SystemId.FULL, [0.9, 0.2, 0.05, 0.05], p, budget=8000)
    r2 = classify_ic(SystemId.FULL, [0.9, 0.2, 0.05, 0.05], p, budget=8000)
    assert r1.kind == r2.kind and r1.tag == r2.tag and r1.k == r2.k
    assert r1.period == r2.period
    assert np.array_equal(r1.final_state, r2.final_state)


def test_default_seed_set_shape_and_symmetry():
    p = params(alpha=0.05, m=0.45, l=0.1)
    seeds = default_seed_set(p)
    assert len(seeds) == 5
    assert all(s.shape == (4,) for s in seeds)
    # one probe lies exactly on the patch-symmetric subspace
    assert any(np.array_equal(s[:2], s[2:]) for s in seeds)
    # one probe starts in a predator-free refuge hyperplane
    assert any(s[3] == 0.0 and s[1] > 0.0 for s in seeds)


def test_local_portrait_regions():
    l = 0.1
    assert local_portrait_2d(l, 1.05) == 1    # predator dies everywhere
    assert local_portrait_2d(l, 0.6) == 2     # stable coexistence point
    assert local_portrait_2d(l, 0.5) == 3     # stable coexistence cycle
    assert local_portrait_2d(l, 0.3) == 4     # cycle lost, extinction
    assert local_portrait_2d(l, 0.05) == 5    # below the Allee threshold


def test_bracket_cycle_loss_contains_heteroclinic_point():
    lo, hi = bracket_cycle_loss_2d(0.1, 0.436, 0.456, tol=2e-3)
    assert 0.436 <= lo < hi <= 0.456
    assert lo <= 0.4456 <= hi or (hi - lo) < 4e-3


def test_portrait_sweep_single_cell_serial():
    cells = portrait_sweep(np.array([0.1]), np.array([0.6]), jobs=1,
                           budget=8000)
    assert len(cells) == 1
    cell = cells[0]
    assert cell.label == "I"
    assert len(cell.reports) == 5


def test_portrait_sweep_is_deterministic_across_jobs():
    a = np.array([0.1])
    m = np.array([0.5])
    c1 = portrait_sweep(a, m, jobs=1, budget=8000)[0]
    c2 = portrait_sweep(a, m, jobs=2, budget=8000)[0]
    assert c1.label == c2.label
    assert [r.kind for r in c1.reports] == [r.kind for r in c2.reports]
