"""Hopf bifurcation loci and the first Lyapunov coefficient.

Closed-form Hopf curves exist for the symmetric coexistence state: the
single-patch (and in-phase) threshold ``m = (l+1)/2`` and the anti-phase
coupling threshold ``alpha = m(1+l-2m)/2``.  A leading-order estimate of the
Hopf coupling for the three-dimensional refuge subsystem is provided as well,
flagged approximate.  `locate_hopf` refines any of these numerically by
root-finding on the real part of the critical eigenvalue pair, and
`lyapunov_first` evaluates the first Lyapunov coefficient by the projection
method with the exact second- and third-order terms of the vector field.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.optimize import brentq

from .equilibria import solve_B
from .model import ModelParams, SystemId, allee_growth_d2
from .spectral import jacobian_subsystem

__all__ = [
    "HopfPoint",
    "hopf_H1",
    "hopf_H2",
    "hopf_3d",
    "locate_hopf",
    "lyapunov_first",
]


@dataclass(frozen=True)
class HopfPoint:
    sys: SystemId
    param: str              # "alpha" or "m"
    value: float            # critical parameter value
    location: np.ndarray    # equilibrium at the Hopf point
    omega: float            # imaginary part of the critical pair
    l1: float | None        # first Lyapunov coefficient (None if not computed)
    transversality: float   # d(Re lambda)/d(param) at the crossing
    params: ModelParams     # full parameter set at the Hopf point

    @property
    def supercritical(self) -> bool:
        if self.l1 is None:
            raise ValueError("first Lyapunov coefficient was not computed")
        return self.l1 < 0.0


# ---------------------------------------------------------------------------
# closed-form loci


def hopf_H1(l: float) -> float:
    """Prey threshold of the single-patch (and in-phase) Hopf: m = (l+1)/2."""
    if not 0.0 < l < 1.0:
        raise ValueError("need 0 < l < 1")
    return 0.5 * (l + 1.0)


def hopf_H2(l: float, m: float) -> float:
    """Coupling threshold of the anti-phase Hopf: alpha = m(1+l-2m)/2.

    Exists (positive) only below the in-phase threshold, i.e. for
    l < m < (l+1)/2.
    """
    if not 0.0 < l < m < 1.0:
        raise ValueError("need 0 < l < m < 1")
    alpha = 0.5 * m * (1.0 + l - 2.0 * m)
    if alpha <= 0.0:
        raise ValueError("no positive crossing: requires m < (l+1)/2")
    return alpha


def hopf_3d(l: float, m: float) -> float:
    """Leading-order Hopf coupling of the refuge subsystem: m(1+l-2m)/(2-m).

    This is a first-order-in-alpha estimate and can be far from the true
    crossing at moderate coupling; use `locate_hopf` for a numeric value.
    """
    if not 0.0 < l < m < 0.5 * (l + 1.0):
        raise ValueError("need 0 < l < m < (l+1)/2")
    return m * (1.0 + l - 2.0 * m) / (2.0 - m)


# ---------------------------------------------------------------------------
# numeric refinement


def _aa_state(p: ModelParams) -> np.ndarray:
    m, l = p.m, p.l
    if not 0.0 < l < m < 1.0:
        raise ValueError("symmetric coexistence state requires 0 < l < m < 1")
    v = (m - l) * (1.0 - m)
    return np.array([m, v, m, v])


def _critical_pair_re(sys: SystemId, x, p: ModelParams):
    """(Re, omega) of the complex pair nearest the imaginary axis.

    Tracking the smallest-|Re| pair (rather than the largest-Re one) keeps
    the crossing pair in view even when another complex pair is already
    unstable on the far side, as happens for the coupled symmetric state.
    """
    J = jacobian_subsystem(sys, x, p)
    lam = np.linalg.eigvals(J)
    cx = lam[lam.imag > 1e-9]
    if len(cx) == 0:
        return -np.inf, 0.0
    i = int(np.argmin(np.abs(cx.real)))
    return float(cx[i].real), float(abs(cx[i].imag))


def locate_hopf(sys: SystemId, p: ModelParams, param: str, lo: float, hi: float,
                equilibrium: str | Callable[[ModelParams], np.ndarray] = "AA",
                xtol: float = 1e-12, compute_l1: bool = True) -> HopfPoint:
    """Find where the complex eigenvalue pair of a tracked equilibrium
    crosses the imaginary axis, scanning `param` in ["alpha" or "m"] over
    [lo, hi].

    `equilibrium` is either "AA" (symmetric coexistence state, closed form)
    or a callable mapping a parameter set to the equilibrium state; the
    callable is responsible for following the intended branch.
    """
    if param not in ("alpha", "m"):
        raise ValueError("param must be 'alpha' or 'm'")

    def with_value(val: float) -> ModelParams:
        if param == "alpha":
            return p.replace(alpha1=val, alpha2=val)
        return p.replace(m1=val, m2=val)

    if equilibrium == "AA":
        eq_fn = _aa_state
    elif callable(equilibrium):
        eq_fn = equilibrium
    else:
        raise ValueError("equilibrium must be 'AA' or a callable")

    def g(val: float) -> float:
        q = with_value(val)
        return _critical_pair_re(sys, eq_fn(q), q)[0]

    glo, ghi = g(lo), g(hi)
    if not np.isfinite(glo) or not np.isfinite(ghi):
        raise ValueError("no complex pair at a bracket endpoint")
    if glo * ghi > 0.0:
        raise ValueError(f"bracket does not straddle the crossing: "
                         f"g({lo})={glo:.3e}, g({hi})={ghi:.3e}")
    val = brentq(g, lo, hi, xtol=xtol, rtol=8.0 * np.finfo(float).eps)

    q = with_value(val)
    x = eq_fn(q)
    _, omega = _critical_pair_re(sys, x, q)
    # transversality by central differences in the scanned parameter
    h = max(1e-7, 1e-7 * abs(val))
    re_p = _critical_pair_re(sys, eq_fn(with_value(val + h)), with_value(val + h))[0]
    re_m = _critical_pair_re(sys, eq_fn(with_value(val - h)), with_value(val - h))[0]
    trans = (re_p - re_m) / (2.0 * h)

    l1 = lyapunov_first(sys, x, q) if compute_l1 else None
    return HopfPoint(sys, param, float(val), x, omega, l1, float(trans), q)


# ---------------------------------------------------------------------------
# first Lyapunov coefficient (projection method)


def lyapunov_first(sys: SystemId, x0, p: ModelParams, tol: float = 1e-7) -> float:
    """First Lyapunov coefficient at a Hopf equilibrium.

    Uses the projection formula
        l1 = Re[ <p, C(q,q,qb)> - 2 <p, B(q, A^{-1} B(q,qb))>
                 + <p, B(qb, (2 i w I - A)^{-1} B(q,q))> ] / (2 w)
    with A q = i w q, A^H p = -i w p, <p,q> = 1, where B and C are the exact
    second- and third-order multilinear forms of the vector field.  Negative
    values mean a supercritical (stable-cycle) Hopf.

    The equilibrium must carry a pure-imaginary pair to within `tol`
    (relative to the spectral radius).
    """
    x0 = np.asarray(x0, dtype=float)
    act = list(sys.active)
    A = jacobian_subsystem(sys, x0, p)
    lam, V = np.linalg.eig(A)
    scale = max(1.0, float(np.max(np.abs(lam))))
    cand = [i for i in range(len(lam))
            if lam[i].imag > 1e-9 and abs(lam[i].real) < tol * scale]
    if not cand:
        raise ValueError("no pure-imaginary eigenvalue pair within tolerance")
    i = cand[int(np.argmax([lam[j].imag for j in cand]))]
    omega = float(lam[i].imag)
    q = V[:, i]
    lamH, W = np.linalg.eig(A.conj().T)
    j = int(np.argmin(np.abs(lamH - (-1j * omega))))
    pvec = W[:, j]
    # normalize <p, q> = sum(conj(p) q) = 1; note vdot conjugates its first
    # argument, so the scale factor must itself be conjugated
    pvec = pvec / np.conj(np.vdot(pvec, q))

    # exact multilinear forms on the active coordinates
    beta1, beta2 = p.beta1, p.beta2
    g1, g2 = p.gamma1, p.gamma2
    f2_1 = allee_growth_d2(x0[0], p.l1)
    f2_2 = allee_growth_d2(x0[2], p.l2)

    def lift(z):
        full = np.zeros(4, dtype=complex)
        full[act] = z
        return full

    def B(xz, yz):
        x, y = lift(xz), lift(yz)
        out = np.zeros(4, dtype=complex)
        out[0] = beta1 * f2_1 * x[0] * y[0] - (x[0] * y[1] + x[1] * y[0])
        out[1] = g1 * (x[0] * y[1] + x[1] * y[0])
        out[2] = beta2 * f2_2 * x[2] * y[2] - (x[2] * y[3] + x[3] * y[2])
        out[3] = g2 * (x[2] * y[3] + x[3] * y[2])
        return out[act]

    def C(xz, yz, zz):
        x, y, z = lift(xz), lift(yz), lift(zz)
        out = np.zeros(4, dtype=complex)
        out[0] = -6.0 * beta1 * x[0] * y[0] * z[0]
        out[2] = -6.0 * beta2 * x[2] * y[2] * z[2]
        return out[act]

    qb = q.conj()
    n = len(act)
    I = np.eye(n)
    h11 = np.linalg.solve(A, B(q, qb))
    h20 = np.linalg.solve(2j * omega * I - A, B(q, q))
    val = (np.vdot(pvec, C(q, q, qb))
           - 2.0 * np.vdot(pvec, B(q, h11))
           + np.vdot(pvec, B(qb, h20)))
    return float(val.real / (2.0 * omega))


def follow_B_branch(p: ModelParams, y0: float, param: str = "alpha"
                    ) -> Callable[[ModelParams], np.ndarray]:
    """Equilibrium callable for `locate_hopf` that tracks a mixed
    refuge state (one predator extinct) by nearest prey root.

    `y0` selects the branch: the prey root of f(y) + alpha (m - y) = 0
    closest to it at each parameter value.  Returns states of the
    three-dimensional refuge subsystem with the first predator pinned.
    """
    state = {"y": y0}

    def eq_fn(q: ModelParams) -> np.ndarray:
        sols = solve_B(q)
        if not sols:
            raise ValueError("mixed refuge state lost at this parameter value")
        ys = np.array([s[0] for s in sols])
        k = int(np.argmin(np.abs(ys - state["y"])))
        y, z = sols[k]
        state["y"] = y
        return np.array([y, 0.0, q.m2, z])

    return eq_fn
