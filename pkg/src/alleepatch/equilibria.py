"""Equilibria of the symmetric two-patch system and its subsystems.

Families, in the zero-pattern nomenclature used throughout:

* symmetric points ``O(0,0,0,0)``, ``Ol(l,0,l,0)``, ``O11(1,0,1,0)`` and the
  fully positive ``AA(m, v*, m, v*)`` with ``v* = (m-l)(1-m)``;
* predator-free ``C`` points ``(u1, 0, u2, 0)`` whose prey coordinates solve
  the coupled pair of cubics with dispersal;
* one-predator ``B`` points ``(y, 0, m, z)`` / ``(m, z, y, 0)`` where the
  free prey ``y`` solves a single cubic and ``z`` follows from it.

Closed-form existence boundaries (fold curves of the C and B families and
the B cusp) are evaluated in closed asymptotic form; a Newton /
continuation oracle is provided alongside because the asymptotics degrade
away from small dispersal.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from numpy.polynomial import Polynomial

from .model import ModelParams, SystemId, allee_growth, allee_growth_d1, vector_field

__all__ = [
    "EquilibriumRecord",
    "BoundaryCurve",
    "symmetric_equilibria",
    "solve_C",
    "solve_B",
    "c_equilibria",
    "b_equilibria",
    "all_equilibria",
    "asymptotic_C",
    "asymptotic_B",
    "boundary_SC",
    "boundary_SB",
    "fold_condition_C",
    "fold_condition_B",
    "tag_C",
    "tag_B",
    "continue_C_root",
    "find_fold_C",
    "newton_C",
    "sample_boundary_curves",
]

NEWTON_TOL = 1e-12
NEWTON_MAXIT = 50
DEDUP_TOL = 1e-8
BRACKET_MARGIN = 0.05  # roots may sit slightly outside [0, 1]


@dataclass
class EquilibriumRecord:
    """An equilibrium with its family tag and the residual of the field."""

    location: np.ndarray
    family: str
    multiplicity: int = 1
    residual: float = 0.0
    eigenvalues: np.ndarray | None = None
    stability: str | None = None

    def __post_init__(self):
        self.location = np.asarray(self.location, dtype=float)


@dataclass
class BoundaryCurve:
    """Sampled parameterization of a closed-form existence boundary."""

    name: str
    parameter: str
    samples: list[tuple[float, float]] = field(default_factory=list)


def _residual(x, p: ModelParams) -> float:
    return float(np.max(np.abs(vector_field(SystemId.FULL, x, p))))


# ---------------------------------------------------------------------------
# symmetric family


def symmetric_equilibria(p: ModelParams) -> list[EquilibriumRecord]:
    """O, Ol, O11, plus AA when 0 < l < m < 1 (symmetric parameters only)."""
    l, m = p.l, p.m
    recs = [
        EquilibriumRecord(np.zeros(4), "O"),
        EquilibriumRecord(np.array([l, 0.0, l, 0.0]), "Ol"),
        EquilibriumRecord(np.array([1.0, 0.0, 1.0, 0.0]), "O11"),
    ]
    if 0.0 < l < m < 1.0:
        vstar = (m - l) * (1.0 - m)
        recs.append(EquilibriumRecord(np.array([m, vstar, m, vstar]), "AA"))
    for r in recs:
        r.residual = _residual(r.location, p)
    return recs


# ---------------------------------------------------------------------------
# C family: prey-only points


def _f_poly(l: float) -> Polynomial:
    # u(u-l)(1-u) = -u^3 + (1+l)u^2 - l u
    return Polynomial([0.0, -l, 1.0 + l, -1.0])


def newton_C(u1: float, u2: float, p: ModelParams,
             tol: float = NEWTON_TOL, maxit: int = NEWTON_MAXIT):
    """Newton refinement of a prey-only root pair; returns None on divergence."""
    a, l = p.alpha, p.l
    u = np.array([u1, u2], dtype=float)
    for _ in range(maxit):
        F = np.array([
            allee_growth(u[0], l) + a * (u[1] - u[0]),
            allee_growth(u[1], l) + a * (u[0] - u[1]),
        ])
        J = np.array([
            [allee_growth_d1(u[0], l) - a, a],
            [a, allee_growth_d1(u[1], l) - a],
        ])
        det = J[0, 0] * J[1, 1] - J[0, 1] * J[1, 0]
        if abs(det) < 1e-14:
            return None
        step = np.linalg.solve(J, F)
        u -= step
        if not np.all(np.isfinite(u)) or np.max(np.abs(u)) > 10.0:
            return None
        if np.max(np.abs(step)) < tol:
            return u
    return None


def solve_C(p: ModelParams, delta: float = BRACKET_MARGIN) -> list[tuple[float, float]]:
    """All non-symmetric prey-only root pairs (u1, u2) with u in [-delta, 1+delta].

    For positive dispersal the two coupled cubics are reduced by elimination
    (u2 = u1 - f(u1)/alpha) to a degree-9 polynomial whose real roots seed a
    2D Newton polish.  Swap partners appear as separate pairs.
    """
    a, l = p.alpha, p.l
    if a == 0.0:
        vals = [0.0, l, 1.0]
        return [(x, y) for x in vals for y in vals if x != y]
    f = _f_poly(l)
    h = Polynomial([0.0, 1.0]) - f / a  # u2 as a function of u1
    g = f(h) + f  # degree 9 in u1
    roots = g.roots()
    found: list[tuple[float, float]] = []
    for r in roots:
        if abs(r.imag) > 1e-9:
            continue
        u1 = r.real
        u2 = h(u1)
        if not (-delta <= u1 <= 1.0 + delta and -delta <= u2 <= 1.0 + delta):
            continue
        refined = newton_C(u1, u2, p)
        if refined is None:
            continue
        u1, u2 = refined
        if abs(u1 - u2) < 1e-7:  # symmetric root, not a C point
            continue
        if any(max(abs(u1 - v1), abs(u2 - v2)) < DEDUP_TOL for v1, v2 in found):
            continue
        found.append((float(u1), float(u2)))
    found.sort()
    return found


def continue_C_root(u1: float, u2: float, p: ModelParams, alpha_target: float,
                    step: float = 1e-2, min_step: float = 1e-7):
    """Follow a prey-only root pair as alpha moves to alpha_target.

    Natural continuation with adaptive step halving; returns the root at the
    target or None if the branch is lost (fold) on the way.
    """
    a = p.alpha
    u = np.array([u1, u2], dtype=float)
    while a != alpha_target:
        da = np.clip(alpha_target - a, -step, step)
        trial_a = a + da
        while True:
            q = newton_C(u[0], u[1], p.replace(alpha1=trial_a, alpha2=trial_a))
            if q is not None and np.max(np.abs(q - u)) < 0.2:
                break
            da *= 0.5
            if abs(da) < min_step:
                return None
            trial_a = a + da
        a = trial_a
        u = q
    return u


def tag_C(u1: float, u2: float, p: ModelParams) -> str:
    """Branch tag by the zero-dispersal limit of the root pair."""
    u = continue_C_root(u1, u2, p, 0.0)
    if u is None:
        return "C"
    names = {0: "0", 1: "l", 2: "1"}
    vals = np.array([0.0, p.l, 1.0])
    i = int(np.argmin(np.abs(vals - u[0])))
    j = int(np.argmin(np.abs(vals - u[1])))
    return f"C{names[i]}{names[j]}"


def find_fold_C(p0: ModelParams, u1: float, u2: float,
                alpha_max: float = 0.5, tol: float = 1e-10):
    """Continue a C root upward in alpha until it folds; locate the fold.

    Returns (alpha_fold, (u1, u2)) or None if the branch survives to
    alpha_max.  The fold is located by bisection on branch survival, then
    polished so the fold determinant vanishes.
    """
    lo = p0.alpha
    if continue_C_root(u1, u2, p0, alpha_max) is not None:
        return None
    hi = alpha_max
    u_lo = np.array([u1, u2])
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        q = continue_C_root(u_lo[0], u_lo[1], p0.replace(alpha1=lo, alpha2=lo), mid)
        if q is None:
            hi = mid
        else:
            lo, u_lo = mid, q
    return lo, (float(u_lo[0]), float(u_lo[1]))


def fold_condition_C(u1: float, u2: float, p: ModelParams) -> float:
    """Determinant of the prey-only Jacobian; zero when C pairs coalesce."""
    a, l = p.alpha, p.l
    d1 = allee_growth_d1(u1, l)
    d2 = allee_growth_d1(u2, l)
    return d1 * d2 - a * (d1 + d2)


def c_equilibria(p: ModelParams, tag: bool = True) -> list[EquilibriumRecord]:
    """C points embedded as 4D equilibria (u1, 0, u2, 0)."""
    recs = []
    for u1, u2 in solve_C(p):
        x = np.array([u1, 0.0, u2, 0.0])
        fam = tag_C(u1, u2, p) if tag else "C"
        recs.append(EquilibriumRecord(x, fam, residual=_residual(x, p)))
    return recs


# ---------------------------------------------------------------------------
# B family: one-predator points


def solve_B(p: ModelParams, with_tags: bool = False):
    """Real roots (y, z) of the one-predator equilibrium conditions.

    y solves f(y) + alpha (m - y) = 0; z = (f(m) + alpha (y - m)) / m.
    With three roots the branches are tagged B0/Bl/B1 by their
    zero-dispersal limit, otherwise B.
    """
    a, l, m = p.alpha, p.l, p.m
    if m <= 0.0:
        raise ValueError("B equilibria require m > 0")
    coeffs = [-1.0, 1.0 + l, -(l + a), a * m]  # descending powers
    roots = np.roots(coeffs)
    pairs = []
    for r in roots:
        if abs(r.imag) > 1e-9:
            continue
        y = float(r.real)
        # polish on the cubic
        for _ in range(5):
            g = allee_growth(y, l) + a * (m - y)
            gp = allee_growth_d1(y, l) - a
            if gp == 0.0:
                break
            y -= g / gp
        z = (allee_growth(m, l) + a * (y - m)) / m
        pairs.append((y, z))
    pairs.sort()
    if not with_tags:
        return pairs
    return [(y, z, tag_B(y, p)) for y, z in pairs]


def tag_B(y: float, p: ModelParams) -> str:
    """Branch tag of a free-prey root by continuation of alpha to zero."""
    a, l, m = p.alpha, p.l, p.m
    cur = y
    alpha = a
    step = max(alpha / 40.0, 1e-6)
    while alpha > 0.0:
        da = min(step, alpha)
        trial = alpha - da
        nxt = cur
        ok = False
        for _ in range(60):
            g = allee_growth(nxt, l) + trial * (m - nxt)
            gp = allee_growth_d1(nxt, l) - trial
            if gp == 0.0:
                break
            d = g / gp
            nxt -= d
            if abs(d) < 1e-13:
                ok = True
                break
        if not ok or abs(nxt - cur) > 0.2:
            step *= 0.5
            if step < 1e-9:
                return "B"
            continue
        alpha = trial
        cur = nxt
    vals = np.array([0.0, l, 1.0])
    names = ["B0", "Bl", "B1"]
    return names[int(np.argmin(np.abs(vals - cur)))]


def fold_condition_B(y: float, p: ModelParams) -> float:
    """f'(y) - alpha; zero when B pairs coalesce."""
    return allee_growth_d1(y, p.l) - p.alpha


def b_equilibria(p: ModelParams, tags: bool = True) -> list[EquilibriumRecord]:
    """B points embedded as 4D equilibria, both patch assignments."""
    recs = []
    m = p.m
    for y, z in solve_B(p):
        fam = tag_B(y, p) if tags else "B"
        x2 = np.array([y, 0.0, m, z])   # predator lives in patch 2
        x1 = np.array([m, z, y, 0.0])   # predator lives in patch 1
        recs.append(EquilibriumRecord(x2, f"{fam}/2", residual=_residual(x2, p)))
        recs.append(EquilibriumRecord(x1, f"{fam}/1", residual=_residual(x1, p)))
    return recs


def all_equilibria(p: ModelParams, tags: bool = True) -> list[EquilibriumRecord]:
    """Every equilibrium of the symmetric 4D system at these parameters."""
    return symmetric_equilibria(p) + c_equilibria(p, tag=tags) + b_equilibria(p, tags=tags)


# ---------------------------------------------------------------------------
# asymptotic coordinates (small dispersal)


#: C branches keyed by their zero-dispersal limits (a, b); values are the
#: first-order coordinate formulas.
def asymptotic_C(p: ModelParams) -> dict[str, tuple[float, float]]:
    """First-order small-alpha coordinates of the six C branches.

    For a branch limiting on (a, b) the expansion is
    u1 = a - alpha (b - a) / f'(a), u2 = b - alpha (a - b) / f'(b).
    """
    a_, l = p.alpha, p.l
    out = {}
    names = {0.0: "0", l: "l", 1.0: "1"}
    for A in (0.0, l, 1.0):
        for B in (0.0, l, 1.0):
            if A == B:
                continue
            u1 = A - a_ * (B - A) / allee_growth_d1(A, l)
            u2 = B - a_ * (A - B) / allee_growth_d1(B, l)
            out[f"C{names[A]}{names[B]}"] = (u1, u2)
    return out


def asymptotic_B(p: ModelParams) -> dict[str, tuple[float, float]]:
    """Second-order small-alpha coordinates (y, z) of the three B branches.

    Expanding the free-prey cubic about its zero-dispersal root a gives
    y = a + c1 alpha + c2 alpha^2 with c1 = (a - m)/f'(a) and
    c2 = (c1 - f''(a) c1^2 / 2) / f'(a); then
    z = v* - (m - a) alpha / m + c1 alpha^2 / m.
    """
    al, l, m = p.alpha, p.l, p.m
    if not 0.0 < l < m < 1.0:
        raise ValueError("B asymptotics require 0 < l < m < 1")
    vstar = (m - l) * (1.0 - m)
    out = {}
    for a, name in ((0.0, "B0"), (l, "Bl"), (1.0, "B1")):
        fp = allee_growth_d1(a, l)
        fpp = -6.0 * a + 2.0 * (1.0 + l)
        c1 = (a - m) / fp
        c2 = (c1 - 0.5 * fpp * c1 * c1) / fp
        y = a + c1 * al + c2 * al * al
        z = vstar - (m - a) * al / m + c1 * al * al / m
        out[name] = (y, z)
    return out


# ---------------------------------------------------------------------------
# closed-form existence boundaries


def boundary_SC(l: float) -> tuple[float, float]:
    """Asymptotic fold boundaries of the C family, (alpha1, alpha2).

    alpha1 = 1 - l + l^2 - [(2l-1)(l-2)(l+1)]^{2/3} / 2 and
    alpha2 = (l - l^2)/2.  The nominal nesting of the two branches is
    inconsistent at moderate l; the continuation oracle is authoritative for
    region counts, these values are reported as stated.
    """
    if not 0.0 < l < 1.0:
        raise ValueError("l must lie in (0, 1)")
    # the 2/3 power of the (possibly negative) product is the squared real
    # cube root, hence non-negative
    prod = (2.0 * l - 1.0) * (l - 2.0) * (1.0 + l)
    alpha1 = 1.0 - l + l * l - 0.5 * abs(prod) ** (2.0 / 3.0)
    alpha2 = 0.5 * (l - l * l)
    return float(alpha1), float(alpha2)


@dataclass
class SBBoundary:
    """Fold branches and cusp of the B family at fixed Allee threshold."""

    m12: float | None
    m23: float | None
    cusp_alpha: float
    cusp_m: float


def boundary_SB(l: float, alpha: float) -> SBBoundary:
    """Fold branch values m12(alpha, l), m23(alpha, l) and the cusp point.

    The branch values are the two critical values of
    m(y) = y^2 (1 + l - 2y) / alpha along the one-predator equilibrium
    condition alpha m = alpha y - f(y), attained where f'(y) = alpha;
    equivalently they solve the vanishing-discriminant condition
    [27 alpha m - 9(alpha + l)(1 + l) + 2(1 + l)^3]^2
        + 4 (3 alpha - 1 + l - l^2)^3 = 0.
    Branches exist for 0 < alpha < (1 - l + l^2)/3 and meet at the cusp
    alpha_c = (1 - l + l^2)/3, m_c = (1 + l)^3 / (27 alpha_c).  Values
    outside (0, 1) are reported as-is; only the portion inside the unit
    interval is a meaningful parameter boundary.
    """
    if not 0.0 < l < 1.0:
        raise ValueError("l must lie in (0, 1)")
    cusp_alpha = (1.0 - l + l * l) / 3.0
    cusp_m = (1.0 + l) ** 3 / (27.0 * cusp_alpha)
    if alpha <= 0.0 or alpha >= cusp_alpha:
        return SBBoundary(None, None, cusp_alpha, cusp_m)
    s = (1.0 - l + l * l - 3.0 * alpha) ** 1.5
    base = 9.0 * (alpha + l) * (1.0 + l) - 2.0 * (1.0 + l) ** 3
    m12 = (base + 2.0 * s) / (27.0 * alpha)
    m23 = (base - 2.0 * s) / (27.0 * alpha)
    return SBBoundary(float(m12), float(m23), cusp_alpha, cusp_m)


def sample_boundary_curves(l: float, alphas=None) -> list[BoundaryCurve]:
    """Tabulate SC, SB, and cusp boundary curves for reporting."""
    curves = []
    a1, a2 = boundary_SC(l)
    curves.append(BoundaryCurve("SC1", "l", [(l, a1)]))
    curves.append(BoundaryCurve("SC2", "l", [(l, a2)]))
    if alphas is None:
        cusp_alpha = (1.0 - l + l * l) / 3.0
        alphas = np.linspace(cusp_alpha / 20.0, cusp_alpha * 0.98, 16)
    sb12 = BoundaryCurve("SB12", "alpha")
    sb23 = BoundaryCurve("SB23", "alpha")
    for a in alphas:
        sb = boundary_SB(l, float(a))
        if sb.m12 is not None:
            sb12.samples.append((float(a), sb.m12))
            sb23.samples.append((float(a), sb.m23))
    curves.extend([sb12, sb23])
    sb = boundary_SB(l, 1e-3)
    curves.append(BoundaryCurve("CuspB", "alpha", [(sb.cusp_alpha, sb.cusp_m)]))
    return curves
