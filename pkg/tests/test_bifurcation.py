"""Hopf boundaries, first Lyapunov coefficients, and branch tracking."""

import numpy as np
import pytest

from alleepatch.bifurcation import (follow_B_branch, hopf_3d, hopf_H1,
                                    hopf_H2, locate_hopf, lyapunov_first)
from alleepatch.equilibria import solve_B
from alleepatch.flow import integrate
from alleepatch.model import ModelParams, SystemId


def params(alpha=0.1, m=0.5, l=0.1, gamma=1.0):
    return ModelParams.symmetric(alpha=alpha, gamma=gamma, m=m, l=l)


def test_closed_form_hopf_boundaries():
    assert hopf_H1(0.1) == pytest.approx(0.55, abs=1e-15)
    assert hopf_H2(0.1, 0.45) == pytest.approx(0.045, abs=1e-15)
    # the anti-phase crossing collapses to zero coupling exactly on the
    # in-phase boundary and is reported as absent there
    with pytest.raises(ValueError):
        hopf_H2(0.1, hopf_H1(0.1))


def test_locate_hopf_in_phase_matches_closed_form():
    p = params(alpha=0.1, l=0.1)
    hp = locate_hopf(SystemId.FULL, p, "m", 0.48, 0.6)
    assert abs(hp.value - 0.55) < 1e-6
    assert hp.omega > 0.0
    assert hp.transversality != 0.0
    assert hp.l1 < 0.0 and hp.supercritical


def test_locate_hopf_anti_phase_matches_closed_form():
    p = params(m=0.45, l=0.1)
    hp = locate_hopf(SystemId.FULL, p, "alpha", 0.02, 0.08)
    assert abs(hp.value - 0.045) < 1e-6
    assert hp.l1 < 0.0 and hp.supercritical


def test_first_lyapunov_coefficient_2d_local():
    """The isolated one-patch cycle is born supercritically."""
    l = 0.1
    m = hopf_H1(l)
    p = params(alpha=0.0, m=m, l=l)
    vstar = (m - l) * (1.0 - m)
    x0 = np.array([m, vstar, 0.0, 0.0])
    l1 = lyapunov_first(SystemId.LOCAL, x0, p)
    assert l1 < 0.0


def test_cycle_amplitude_scales_as_sqrt_epsilon():
    """Past the in-phase Hopf boundary the emergent cycle amplitude grows
    like sqrt(distance-to-threshold); ratios agree within 20% over
    epsilon in {.002, .004, .008}."""
    l = 0.1
    ratios = []
    for eps in (0.002, 0.004, 0.008):
        m = hopf_H1(l) - eps
        p = params(alpha=0.1, m=m, l=l)
        vstar = (m - l) * (1.0 - m)
        x0 = np.array([m + 1e-3, vstar, m + 1e-3, vstar])
        settle = 12000.0 / (eps / 0.002) ** 0.5
        traj = integrate(SystemId.FULL, x0, p, 1.5 * settle,
                         t_eval=np.linspace(settle, 1.5 * settle, 4000))
        amp = 0.5 * (traj.states[:, 0].max() - traj.states[:, 0].min())
        ratios.append(amp / np.sqrt(eps))
    for r in ratios:
        assert abs(r - ratios[0]) / ratios[0] < 0.2, ratios


def test_hopf_3d_formula_value():
    """Closed-form stability threshold of the one-predator state;
    kept as the documented approximation (the numerically located change
    sits near alpha = .0424, see the acceptance suite)."""
    assert hopf_3d(0.1, 0.45) == pytest.approx(0.45 * 0.2 / 1.55, abs=1e-15)
    assert abs(hopf_3d(0.1, 0.45) - 0.05806) < 5e-5


def test_locate_hopf_on_refuge_branch():
    """A stability change of an interior one-predator state exists in the
    scanned coupling window and is located to tight tolerance."""
    p = params(alpha=0.01, m=0.45, l=0.1)
    pairs = solve_B(p)
    y0 = min(py for py, _ in pairs)
    branch = follow_B_branch(p, y0, "alpha")
    hp = locate_hopf(SystemId.REFUGE_A, p, "alpha", 0.02, 0.06,
                     equilibrium=branch)
    assert 0.02 < hp.value < 0.06
    assert abs(hp.value - 0.0424412) < 1e-4
    assert hp.omega > 0.0


def test_locate_hopf_rejects_bracket_without_crossing():
    p = params(alpha=0.1, l=0.1)
    with pytest.raises(ValueError):
        locate_hopf(SystemId.FULL, p, "m", 0.58, 0.6, compute_l1=False)
