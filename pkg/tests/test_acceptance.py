"""Acceptance suite: twelve numbered criteria with their stated tolerances.

Each test implements one acceptance criterion faithfully, at the stated
parameter values and tolerances.  Criteria that the underlying dynamics do
not support are left failing rather than weakened; the companion tests at
the bottom of this file document the behavior that does hold at the same
parameter points.  Known-failing criteria: 5 (closed-form one-predator
stability threshold is ~27% off the located crossing), 7 (no doubled cycle
exists at the stated point; the anti-phase cycle is already unstable
there), 8 (the stated "torus" parameter point is mode-locked at tight
tolerance), and 9 (a seed pair differing in one prey coordinate cannot
split between a transversally unstable 3D cycle and a 4D torus).
"""

import time

import numpy as np
import pytest

from alleepatch.bifurcation import (follow_B_branch, hopf_3d, hopf_H1,
                                    hopf_H2, locate_hopf)
from alleepatch.classify import (bracket_cycle_loss_2d, classify_ic,
                                 default_seed_set, portrait_sweep)
from alleepatch.equilibria import (asymptotic_B, asymptotic_C, b_equilibria,
                                   c_equilibria, solve_B, solve_C,
                                   symmetric_equilibria)
from alleepatch.flow import integrate
from alleepatch.model import ModelParams, SystemId, vector_field
from alleepatch.spectral import (characteristic_coeffs,
                                 characteristic_factors, eigen_quartic,
                                 eigen_symmetric, jacobian)


def params(alpha=0.1, m=0.5, l=0.1, gamma=1.0):
    return ModelParams.symmetric(alpha=alpha, gamma=gamma, m=m, l=l)


def sorted_vals(spec):
    vals = getattr(spec, "eigenvalues", spec)
    return np.sort_complex(np.asarray(vals, dtype=complex))


def test_criterion_01_eigenvalue_oracle_agreement():
    """200 random parameter draws: closed-form spectra match numeric
    quartic roots to 1e-8; budget 5 s."""
    rng = np.random.default_rng(2024)
    t0 = time.perf_counter()
    for _ in range(200):
        p = params(alpha=rng.uniform(0.0, 0.4), m=rng.uniform(0.15, 0.95),
                   l=rng.uniform(0.02, 0.45), gamma=rng.uniform(0.3, 3.0))
        for rec in symmetric_equilibria(p):
            closed = sorted_vals(eigen_symmetric(rec.family, p))
            numeric = sorted_vals(eigen_quartic(jacobian(rec.location, p)))
            assert np.allclose(closed, numeric, atol=1e-8), rec.family
    assert time.perf_counter() - t0 < 5.0


def test_criterion_02_factorization_identity():
    """Factored characteristic polynomials reproduce the full quartic
    coefficients to 1e-10 at every prey-only and one-predator equilibrium
    over a 10x10 (alpha, m) grid at l=.1, gamma=1; budget 10 s."""
    t0 = time.perf_counter()
    for a in np.linspace(0.005, 0.3, 10):
        for m in np.linspace(0.15, 0.9, 10):
            p = params(alpha=a, m=m, l=0.1)
            for rec in c_equilibria(p) + b_equilibria(p):
                prod = np.array([1.0])
                for f in characteristic_factors(rec.location, p):
                    prod = np.polymul(prod, f)
                direct = characteristic_coeffs(jacobian(rec.location, p))
                assert np.allclose(prod, direct, atol=1e-10), rec.family
    assert time.perf_counter() - t0 < 10.0


def test_criterion_03_asymptotic_orders():
    """Asymptotic coordinate errors vs Newton roots shrink >= 3.5x per
    halving of alpha for prey-only pairs (quadratic trend) and >= 7x for
    one-predator states (cubic trend) on {1e-3, 5e-4, 2.5e-4} at l=.1,
    m=.45; budget 5 s."""
    t0 = time.perf_counter()
    errs_c, errs_b = {}, {}
    for a in (1e-3, 5e-4, 2.5e-4):
        p = params(alpha=a, m=0.45, l=0.1)
        exact_c, exact_b = solve_C(p), solve_B(p)
        for tag, (y1, y2) in asymptotic_C(p).items():
            d = min(np.hypot(y1 - e1, y2 - e2) for e1, e2 in exact_c)
            errs_c.setdefault(tag, []).append(d)
        for tag, (y, z) in asymptotic_B(p).items():
            d = min(np.hypot(y - ey, z - ez) for ey, ez in exact_b)
            errs_b.setdefault(tag, []).append(d)
    for tag, e in errs_c.items():
        assert e[0] / e[1] >= 3.5 and e[1] / e[2] >= 3.5, (tag, e)
    for tag, e in errs_b.items():
        assert e[0] / e[1] >= 7.0 and e[1] / e[2] >= 7.0, (tag, e)
    assert time.perf_counter() - t0 < 5.0


def test_criterion_04_hopf_boundaries_and_amplitude_scaling():
    """Located Hopf boundaries match m=.55 (in-phase) and alpha=.045
    (anti-phase, m=.45) to 1e-6 at l=.1; first Lyapunov coefficient is
    negative at both; post-crossing cycle amplitude scales as
    sqrt(epsilon) within 20% over epsilon in {.002,.004,.008};
    budget 2 min."""
    l = 0.1
    hp1 = locate_hopf(SystemId.FULL, params(alpha=0.1, l=l), "m", 0.48, 0.6)
    assert abs(hp1.value - hopf_H1(l)) < 1e-6 and abs(hp1.value - 0.55) < 1e-6
    assert hp1.l1 < 0.0
    hp2 = locate_hopf(SystemId.FULL, params(m=0.45, l=l), "alpha", 0.02, 0.08)
    assert abs(hp2.value - hopf_H2(l, 0.45)) < 1e-6
    assert abs(hp2.value - 0.045) < 1e-6
    assert hp2.l1 < 0.0
    ratios = []
    for eps in (0.002, 0.004, 0.008):
        m = 0.55 - eps
        p = params(alpha=0.1, m=m, l=l)
        vstar = (m - l) * (1.0 - m)
        settle = 12000.0 / (eps / 0.002) ** 0.5
        traj = integrate(SystemId.FULL, [m + 1e-3, vstar, m + 1e-3, vstar],
                         p, 1.5 * settle,
                         t_eval=np.linspace(settle, 1.5 * settle, 4000))
        amp = 0.5 * (traj.states[:, 0].max() - traj.states[:, 0].min())
        ratios.append(amp / np.sqrt(eps))
    for r in ratios:
        assert abs(r - ratios[0]) / ratios[0] < 0.2, ratios


def test_criterion_05_one_predator_stability_threshold():
    """KNOWN FAILING: the located stability change of the one-predator
    state at l=.1, m=.45 (alpha ~= .042441, see companion test) is ~27%
    below the closed-form value m(1+l-2m)/(2-m) = .05806; the criterion
    demands agreement within 10%. Budget 1 min."""
    p = params(alpha=0.01, m=0.45, l=0.1)
    y0 = min(y for y, _ in solve_B(p))
    branch = follow_B_branch(p, y0, "alpha")
    hp = locate_hopf(SystemId.REFUGE_A, p, "alpha", 0.02, 0.08,
                     equilibrium=branch, compute_l1=False)
    target = hopf_3d(0.1, 0.45)
    assert abs(hp.value - target) / target < 0.10, (hp.value, target)


def test_criterion_06_multistable_cycles():
    """At gamma=1, l=.1, m=.46, alpha=.001 the default seed set reaches
    at least two distinct stable 4D cycles whose periods differ by more
    than 10%; budget 2 min."""
    p = params(alpha=0.001, m=0.46, l=0.1)
    cycles_4d = []
    for s in default_seed_set(p):
        r = classify_ic(SystemId.FULL, s, p)
        if r.kind == "cycle" and r.tag in ("cu", "c4"):
            cycles_4d.append(r)
    tags = {r.tag for r in cycles_4d}
    assert {"cu", "c4"} <= tags, tags
    periods = sorted(r.period for r in cycles_4d)
    assert periods[-1] / periods[0] > 1.10, periods


def test_criterion_07_period_doubling_point():
    """KNOWN FAILING: at m=.45, alpha=.0256 the anti-phase cycle family is
    expected to report multiplicity k=2; the located attractor there
    reports k=1 (the anti-phase cycle has already lost stability through
    a torus bifurcation near alpha=.0223 and no doubled closure exists at
    tolerance; see the companion test). Budget 2 min."""
    p = params(alpha=0.0256, m=0.45, l=0.1)
    c4 = None
    for s in default_seed_set(p):
        r = classify_ic(SystemId.FULL, s, p)
        if r.kind == "cycle" and r.tag == "c4":
            c4 = r
            break
    assert c4 is not None
    assert c4.k == 2, c4.k


def test_criterion_08_torus_regime_change():
    """At m=.325 the classifier output changes qualitatively between
    alpha=.0332 and alpha=.0333; the first point is expected to report a
    torus. KNOWN FAILING on the torus clause: at tight tolerance both
    points are mode-locked (finite multiplicity k=7 and k=5), so the
    locked/chaotic clause at .0333 holds but no quasiperiodic curve is
    found at .0332. Budget 5 min."""
    def reports(alpha):
        p = params(alpha=alpha, m=0.325, l=0.1)
        return [classify_ic(SystemId.FULL, s, p, budget=60000)
                for s in default_seed_set(p)]

    later = reports(0.0333)
    assert any(r.kind == "chaotic"
               or (r.kind == "cycle" and (r.k or 1) > 1)
               for r in later), [(r.kind, r.k) for r in later]
    first = reports(0.0332)
    assert any(r.kind == "torus" for r in first), \
        [(r.kind, r.tag, r.k) for r in first]


def test_criterion_09_prey_coordinate_basin_split():
    """KNOWN FAILING: at m=.315, alpha=.027 a seed pair differing only in
    one prey coordinate (0 vs .01) is expected to split between a 3D
    cycle (one predator absent) and a 4D torus/cycle. The 3D cycle is
    transversally unstable there, so no positive-predator seed converges
    to it; both seeds collapse to the origin (see companion tests for
    the attractors that do coexist). Budget 3 min."""
    m, l = 0.315, 0.1
    p = params(alpha=0.027, m=m, l=l)
    vstar = (m - l) * (1.0 - m)
    base = np.array([m, vstar, 0.0, vstar])
    bumped = base.copy()
    bumped[2] = 0.01
    r0 = classify_ic(SystemId.FULL, base, p, budget=40000)
    r1 = classify_ic(SystemId.FULL, bumped, p, budget=40000)
    assert r0.kind == "cycle" and r0.tag == "c3", (r0.kind, r0.tag)
    assert (r1.kind == "torus"
            or (r1.kind == "cycle" and r1.tag in ("c4", "cu"))), \
        (r1.kind, r1.tag)


def test_criterion_10_heteroclinic_bracket():
    """Bisection on cycle existence in the isolated patch at l=.1
    brackets the cycle loss inside m in [.436, .456], containing .446;
    budget 3 min."""
    lo, hi = bracket_cycle_loss_2d(0.1, 0.436, 0.456, tol=1e-3)
    assert 0.436 <= lo < hi <= 0.456
    assert lo <= 0.446 <= hi


def test_criterion_11_property_suite():
    """Structural invariants: orthant forward-invariance, predator-free
    hyperplane invariance, patch-swap symmetry, zero-coupling decoupling,
    integrator order trend, and subsystem eigenvalue inheritance;
    budget 1 min."""
    rng = np.random.default_rng(99)
    for _ in range(100):
        p = params(alpha=rng.uniform(0, 0.4), m=rng.uniform(0.15, 0.95),
                   l=rng.uniform(0.02, 0.45))
        x = rng.uniform(0.0, 1.5, 4)
        # orthant: no outward flow on boundary faces
        for i in range(4):
            y = x.copy()
            y[i] = 0.0
            assert vector_field(SystemId.FULL, y, p)[i] >= 0.0
        # predator-free hyperplane invariance
        y = x.copy()
        y[1] = 0.0
        assert vector_field(SystemId.FULL, y, p)[1] == 0.0
        # swap symmetry
        f = vector_field(SystemId.FULL, x, p)
        g = vector_field(SystemId.FULL, x[[2, 3, 0, 1]], p)
        assert np.array_equal(f[[2, 3, 0, 1]], g)
        # zero-coupling decoupling
        p0 = params(alpha=0.0, m=p.m, l=p.l)
        f0 = vector_field(SystemId.FULL, x, p0)
        g1 = vector_field(SystemId.LOCAL,
                          np.array([x[0], x[1], 0.0, 0.0]), p0)
        assert np.allclose(f0[:2], g1[:2], atol=1e-14)
    # integrator order trend
    p = params(alpha=0.02, m=0.45, l=0.1)
    x0 = [0.9, 0.2, 0.05, 0.05]
    ref = integrate(SystemId.FULL, x0, p, 50.0, rtol=1e-13,
                    atol=1e-14).states[-1]
    errs = [np.linalg.norm(integrate(SystemId.FULL, x0, p, 50.0, rtol=r,
                                     atol=r * 1e-3).states[-1] - ref)
            for r in (1e-4, 1e-6, 1e-8)]
    assert errs[0] / errs[1] > 1e2 and errs[1] / errs[2] > 1e2
    # eigenvalue inheritance at invariant-subspace equilibria
    p = params(alpha=0.02, m=0.45, l=0.1)
    for rec in c_equilibria(p) + b_equilibria(p):
        x = rec.location
        for sys in (SystemId.PREY_PREY, SystemId.REFUGE_A,
                    SystemId.REFUGE_B):
            if any(x[i] != 0.0 for i in sys.pinned):
                continue
            act = list(sys.active)
            sub = np.linalg.eigvals(jacobian(x, p)[np.ix_(act, act)])
            full = sorted_vals(eigen_quartic(jacobian(x, p)))
            for lam in sub:
                assert np.min(np.abs(full - lam)) < 1e-8


def test_criterion_12_coarse_parameter_portrait():
    """An 8x8 sweep over alpha in [0,.05], m in [.3,.6] completes and
    labels every cell; the anchor points of criteria 6-9 (evaluated as
    extra single cells, since they are not grid nodes) plus the
    large-coupling edge cell (alpha=.05, m=.5) receive their expected
    domain labels. Budget 30 min with 8 workers."""
    t0 = time.perf_counter()
    cells = portrait_sweep(np.linspace(0.0, 0.05, 8),
                           np.linspace(0.3, 0.6, 8), jobs=8)
    assert len(cells) == 64
    assert all(c.label in ("I", "II", "III", "IV", "V", "boundary")
               for c in cells)

    def label_at(alpha, m, budget=20000):
        return portrait_sweep(np.array([alpha]), np.array([m]), jobs=1,
                              budget=budget)[0].label

    assert label_at(0.001, 0.46) == "IV"     # two coexisting 4D cycles
    assert label_at(0.0256, 0.45) == "IV"
    assert label_at(0.0332, 0.325, budget=60000) == "V"
    assert label_at(0.027, 0.315, budget=40000) == "V"
    assert label_at(0.05, 0.5) == "II"       # edge cell for large coupling
    assert time.perf_counter() - t0 < 1800.0


# ---------------------------------------------------------------------------
# companions to the known-failing criteria: what does hold at those points


def test_companion_05_located_one_predator_threshold():
    """The stability change of the one-predator state at l=.1, m=.45 sits
    at alpha ~= .042441 (located to 1e-4), not at the closed-form .05806."""
    p = params(alpha=0.01, m=0.45, l=0.1)
    y0 = min(y for y, _ in solve_B(p))
    branch = follow_B_branch(p, y0, "alpha")
    hp = locate_hopf(SystemId.REFUGE_A, p, "alpha", 0.02, 0.08,
                     equilibrium=branch, compute_l1=False)
    assert abs(hp.value - 0.0424412) < 1e-4


def test_companion_07_attractors_near_doubling_point():
    """At m=.45, alpha=.0256 the symmetric cycle is stable and the
    anti-phase family no longer is: the anti-phase probe relaxes toward
    the symmetric cycle (shared period at tolerance) instead of a
    doubled cycle."""
    p = params(alpha=0.0256, m=0.45, l=0.1)
    seeds = default_seed_set(p)
    reports = [classify_ic(SystemId.FULL, s, p) for s in seeds]
    cu = [r for r in reports if r.kind == "cycle" and r.tag == "cu"]
    assert cu, [(r.kind, r.tag) for r in reports]
    others = [r for r in reports if r.kind == "cycle" and r.tag == "c4"]
    for r in others:
        assert abs(r.period - cu[0].period) / cu[0].period < 1e-3


def test_companion_08_mode_locked_multiplicities():
    """Both stated torus-regime points are mode-locked at tight
    tolerance, with different multiplicities (k=7 at .0332, k=5 at
    .0333): the qualitative change between them is real even though
    neither is quasiperiodic."""
    ks = {}
    for alpha in (0.0332, 0.0333):
        p = params(alpha=alpha, m=0.325, l=0.1)
        for s in default_seed_set(p):
            r = classify_ic(SystemId.FULL, s, p, budget=60000)
            if r.kind == "cycle" and r.tag == "c4":
                ks[alpha] = r.k
    assert ks[0.0332] == 7 and ks[0.0333] == 5, ks


def test_companion_09_coexisting_3d_and_4d_attractors():
    """At m=.315, alpha=.027 a 3D cycle (one predator absent) and a 4D
    torus do coexist; they are reached from a predator-free-hyperplane
    seed and an anti-phase perturbation of the coexistence state
    respectively (not from a prey-coordinate seed pair)."""
    m, l = 0.315, 0.1
    p = params(alpha=0.027, m=m, l=l)
    vstar = (m - l) * (1.0 - m)
    r3 = classify_ic(SystemId.FULL, np.array([0.8, 0.25, 0.6, 0.0]), p,
                     budget=40000)
    assert r3.kind == "cycle" and r3.tag == "c3"
    r4 = classify_ic(SystemId.FULL,
                     np.array([m + 0.01, vstar, m - 0.01, vstar]), p,
                     budget=60000)
    assert r4.kind == "torus", (r4.kind, r4.tag, r4.detail)
