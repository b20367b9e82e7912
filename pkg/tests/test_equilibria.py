"""Equilibrium families, asymptotic expansions, and existence boundaries.

Frozen oracle values in this file were produced by independent Newton /
polynomial-root computations at pinned parameters and are hard-coded so
that regressions in the solvers are caught against fixed numbers.
"""

import numpy as np
import pytest

from alleepatch.equilibria import (all_equilibria, asymptotic_B, asymptotic_C,
                                   b_equilibria, boundary_SB, boundary_SC,
                                   c_equilibria, solve_B, solve_C,
                                   symmetric_equilibria)
from alleepatch.model import ModelParams, SystemId, vector_field


def params(alpha=0.1, m=0.5, l=0.1, gamma=1.0):
    return ModelParams.symmetric(alpha=alpha, gamma=gamma, m=m, l=l)


def residual(x, p):
    return float(np.max(np.abs(vector_field(SystemId.FULL, x, p))))


# ---------------------------------------------------------------------------
# symmetric family


def test_symmetric_equilibria_closed_forms():
    p = params(alpha=0.02, m=0.5, l=0.1)
    recs = {r.family: r.location for r in symmetric_equilibria(p)}
    assert np.allclose(recs["O"], [0, 0, 0, 0])
    assert np.allclose(recs["Ol"], [0.1, 0, 0.1, 0])
    assert np.allclose(recs["O11"], [1, 0, 1, 0])
    # coexistence state (m, (m-l)(1-m), m, (m-l)(1-m))
    assert np.allclose(recs["AA"], [0.5, 0.2, 0.5, 0.2], atol=1e-14)


def test_symmetric_equilibria_zero_residual():
    p = params(alpha=0.07, m=0.37, l=0.23)
    for r in symmetric_equilibria(p):
        assert residual(r.location, p) < 1e-13


def test_coexistence_absent_when_m_below_threshold():
    p = params(m=0.05, l=0.1)  # m < l: predator cannot persist
    fams = {r.family for r in symmetric_equilibria(p)}
    assert "AA" not in fams


# ---------------------------------------------------------------------------
# prey-only (C) family


def test_solve_C_roots_are_equilibria():
    p = params(alpha=0.02, m=0.45, l=0.1)
    pairs = solve_C(p)
    assert len(pairs) >= 2
    for y1, y2 in pairs:
        x = np.array([y1, 0.0, y2, 0.0])
        assert residual(x, p) < 1e-10


def test_solve_C_small_alpha_count_and_dedup():
    # six asymmetric pairs survive for small coupling
    p = params(alpha=1e-3, m=0.45, l=0.1)
    pairs = solve_C(p)
    assert len(pairs) == 6
    for i, a in enumerate(pairs):
        for b in pairs[i + 1:]:
            assert max(abs(a[0] - b[0]), abs(a[1] - b[1])) > 1e-6


def test_asymptotic_C_order_at_least_quadratic():
    """Expansion error vs the Newton root shrinks >= 3.5x per halving of
    alpha on {1e-3, 5e-4, 2.5e-4} (quadratic trend with slack)."""
    errs = {}
    for a in (1e-3, 5e-4, 2.5e-4):
        p = params(alpha=a, m=0.45, l=0.1)
        asym = asymptotic_C(p)
        exact = solve_C(p)
        for tag, (y1, y2) in asym.items():
            d = min(np.hypot(y1 - e1, y2 - e2) for e1, e2 in exact)
            errs.setdefault(tag, []).append(d)
    assert len(errs) == 6
    for tag, (e1, e2, e3) in errs.items():
        assert e1 / max(e2, 1e-300) >= 3.5, (tag, e1, e2)
        assert e2 / max(e3, 1e-300) >= 3.5, (tag, e2, e3)


# ---------------------------------------------------------------------------
# one-predator (B) family


def test_solve_B_frozen_oracle():
    p = params(alpha=1e-3, m=0.45, l=0.1)
    pairs = sorted(solve_B(p))
    ys = [y for y, _ in pairs]
    zs = [z for _, z in pairs]
    assert np.allclose(ys, [0.0046944, 0.0959168, 0.9993888], atol=1e-6)
    assert np.allclose(zs, [0.1915104, 0.1917131, 0.1937209], atol=1e-6)


def test_solve_B_roots_are_equilibria():
    p = params(alpha=0.05, m=0.4, l=0.1)
    for y, z in solve_B(p):
        x = np.array([y, 0.0, p.m2, z])
        assert residual(x, p) < 1e-10


def test_asymptotic_B_order_at_least_cubic():
    """Expansion error shrinks >= 7x per halving of alpha (cubic trend
    with slack)."""
    errs = {}
    for a in (1e-3, 5e-4, 2.5e-4):
        p = params(alpha=a, m=0.45, l=0.1)
        asym = asymptotic_B(p)
        exact = solve_B(p)
        for tag, (y, z) in asym.items():
            d = min(np.hypot(y - ey, z - ez) for ey, ez in exact)
            errs.setdefault(tag, []).append(d)
    assert len(errs) == 3
    for tag, (e1, e2, e3) in errs.items():
        assert e1 / max(e2, 1e-300) >= 7.0, (tag, e1, e2)
        assert e2 / max(e3, 1e-300) >= 7.0, (tag, e2, e3)


def test_all_equilibria_families_present():
    p = params(alpha=1e-3, m=0.45, l=0.1)
    fams = [r.family for r in all_equilibria(p)]
    assert fams.count("O") == 1 and "AA" in fams
    assert sum(f.startswith("C") for f in fams) == 6
    assert sum(f.startswith("B") for f in fams) == 6  # three mirror pairs
    for r in all_equilibria(p):
        assert r.residual < 1e-9


# ---------------------------------------------------------------------------
# existence boundaries


def test_boundary_SC_values():
    a1, a2 = boundary_SC(0.1)
    assert abs(a1 - 0.205641) < 1e-5
    assert abs(a2 - 0.045) < 1e-12


def test_boundary_SB_cusp_and_branch_oracle():
    sb = boundary_SB(0.1, 0.25)
    assert abs(sb.cusp_alpha - 0.3033333333) < 1e-9
    assert abs(sb.cusp_m - 0.1625152625) < 1e-9
    # frozen oracle from the vanishing-discriminant condition
    assert abs(sb.m12 - 0.13792592592592598) < 1e-12
    assert abs(sb.m23 - 0.10000000000000003) < 1e-12


def test_boundary_SB_branches_meet_cusp():
    l = 0.1
    cusp = boundary_SB(l, 0.0).cusp_alpha
    sb = boundary_SB(l, cusp * (1 - 1e-8))
    assert abs(sb.m12 - sb.m23) < 1e-3
    assert abs(sb.m12 - boundary_SB(l, 0.0).cusp_m) < 1e-3


def test_B_count_changes_only_across_SB():
    """The number of one-predator states is 3 strictly between the fold
    branches and 1 strictly outside, at fixed alpha."""
    l, a = 0.1, 0.25
    sb = boundary_SB(l, a)
    lo, hi = sorted((sb.m23, sb.m12))
    eps = 1e-3
    for m, expected in ((lo - eps, 1), ((lo + hi) / 2, 3), (hi + eps, 1)):
        p = params(alpha=a, m=m, l=l)
        assert len(solve_B(p)) == expected, m


def test_C_count_changes_across_fold():
    """Asymmetric prey-only pairs exist for small coupling and are gone
    for large coupling."""
    assert len(solve_C(params(alpha=1e-3, m=0.45, l=0.1))) == 6
    assert len(solve_C(params(alpha=0.35, m=0.45, l=0.1))) == 0


def test_b_and_c_records_tagged():
    p = params(alpha=1e-3, m=0.45, l=0.1)
    ctags = {r.family for r in c_equilibria(p)}
    assert ctags == {"C01", "C0l", "C10", "C1l", "Cl0", "Cl1"}
    btags = {r.family for r in b_equilibria(p)}
    assert btags == {"B0/1", "B0/2", "Bl/1", "Bl/2", "B1/1", "B1/2"}
