"""Trajectories, Poincare sections, limit cycles, and Lyapunov exponents.

Integration uses an adaptive Dormand-Prince 5(4) pair with dense output
(compiled in :mod:`alleepatch._stepper`).  Section crossings are refined by
bisection on the dense interpolant, limit cycles are located by Newton
iteration on the Poincare return map, and the largest Lyapunov exponent by
tangent-vector renormalization.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import _stepper
from .model import ModelParams, SystemId, validate_state

__all__ = [
    "IntegrationError",
    "CycleNotFound",
    "Trajectory",
    "Section",
    "SectionCrossings",
    "CycleRecord",
    "LyapunovEstimate",
    "MultiplicityResult",
    "integrate",
    "default_section",
    "poincare",
    "section_crossings",
    "find_cycle",
    "rotation_number",
    "lyapunov_max",
    "detect_period_multiplicity",
]

DEFAULT_RTOL = 1e-9
DEFAULT_ATOL = 1e-12


class IntegrationError(RuntimeError):
    pass


class CycleNotFound(RuntimeError):
    pass


@dataclass(frozen=True)
class Section:
    """Transversal hyperplane: coordinate `index` crosses `level` with sign
    `direction` of the derivative (+1 upward, -1 downward)."""

    index: int
    level: float
    direction: int = -1


@dataclass
class Trajectory:
    t: np.ndarray
    states: np.ndarray
    sys: SystemId
    params: ModelParams
    rtol: float
    atol: float
    n_accepted: int = 0
    n_rejected: int = 0
    n_rhs: int = 0

    @property
    def final(self) -> np.ndarray:
        return self.states[-1]


@dataclass
class SectionCrossings:
    section: Section
    times: np.ndarray
    states: np.ndarray

    def __len__(self):
        return len(self.times)


@dataclass
class CycleRecord:
    period: float
    orbit: np.ndarray          # sampled states, >= 64 rows
    multipliers: np.ndarray    # return-map eigenvalues, dimension-1 values
    multiplicity: int = 1
    label: str = "unlabeled"
    closure_error: float = 0.0
    amplitude: float = 0.0
    section: Section | None = None
    anchor: np.ndarray | None = None   # the section fixed point

    @property
    def stable(self) -> bool:
        return bool(np.all(np.abs(self.multipliers) < 1.0 + 1e-4))


@dataclass
class LyapunovEstimate:
    value: float
    band: float          # half-width of the running-average tail spread
    converged: bool
    history: np.ndarray = field(repr=False, default=None)


@dataclass
class MultiplicityResult:
    k: int | None
    separable: bool
    n_clusters: int
    margin: float


# ---------------------------------------------------------------------------
# integration


def _mask_and_pars(sys: SystemId, p: ModelParams):
    pars = p.as_array()
    if sys is SystemId.LOCAL:
        pars[0] = pars[1] = 0.0
    mask = np.ones(4)
    for i in sys.pinned:
        mask[i] = 0.0
    return pars, mask


def integrate(sys: SystemId, x0, p: ModelParams, t_end: float,
              rtol: float = DEFAULT_RTOL, atol: float = DEFAULT_ATOL,
              t0: float = 0.0, t_eval=None, max_steps: int = 5_000_000,
              store_every: int = 1) -> Trajectory:
    """Integrate a (sub)system over [t0, t_end].

    Pinned coordinates stay exactly zero; states are clipped to the first
    orthant at the -1e-12 roundoff level.  `t_eval` requests dense samples
    at given times (returned instead of the accepted-step record).
    """
    if rtol <= 0.0 or atol <= 0.0:
        raise ValueError("rtol and atol must be positive")
    x0 = validate_state(sys, x0)
    pars, mask = _mask_and_pars(sys, p)
    grid = np.asarray(t_eval, dtype=float) if t_eval is not None else np.empty(0)
    if grid.size and store_every == 1:
        store_every = 0
    status, ts, ys, nacc, nrej, nrhs, _, _, grid_y = _stepper.integrate_core(
        x0, pars, mask, t0, t_end, rtol, atol, max_steps, store_every,
        -1, 0.0, 0, 0, t0, grid)
    _raise_on_status(status)
    if grid.size:
        ts, ys = grid[:len(grid_y)], grid_y
    return Trajectory(ts, ys, sys, p, rtol, atol, nacc, nrej, nrhs)


def _raise_on_status(status: int):
    if status == -1:
        raise IntegrationError("step-size underflow")
    if status == -2:
        raise IntegrationError("step budget exhausted")


def default_section(p: ModelParams) -> Section:
    """Hyperplane u1 = m crossed downward; every nontrivial regime cuts it."""
    return Section(0, p.m1, -1)


def section_crossings(sys: SystemId, x0, p: ModelParams, t_end: float,
                      section: Section, rtol: float = DEFAULT_RTOL,
                      atol: float = DEFAULT_ATOL, t0: float = 0.0,
                      max_crossings: int = 100_000, t_min: float | None = None,
                      max_steps: int = 5_000_000):
    """Integrate and collect refined section crossings.

    Returns (crossings, final_state).  Crossing states satisfy the section
    equation exactly in the section coordinate (refined on the dense
    interpolant, then pinned to the level).
    """
    x0 = validate_state(sys, x0)
    pars, mask = _mask_and_pars(sys, p)
    status, ts, ys, nacc, nrej, nrhs, ct, cy, _ = _stepper.integrate_core(
        x0, pars, mask, t0, t_end, rtol, atol, max_steps, 0,
        section.index, section.level, section.direction, max_crossings,
        t0 if t_min is None else t_min, np.empty(0))
    _raise_on_status(status)
    return SectionCrossings(section, ct, cy), ys[-1]


def poincare(traj: Trajectory, section: Section) -> SectionCrossings:
    """Section crossings of a stored trajectory.

    Uses cubic Hermite interpolation between recorded steps (endpoint
    derivatives from the vector field) with bisection refinement; the
    section coordinate of each returned state is pinned to the level.
    """
    from .model import vector_field

    t, ys = traj.t, traj.states
    idx, level, direction = section.index, section.level, section.direction
    g = ys[:, idx] - level
    times, states = [], []
    for i in range(len(t) - 1):
        g0, g1 = g[i], g[i + 1]
        if g0 * g1 >= 0.0 or direction * (g1 - g0) <= 0.0:
            continue
        h = t[i + 1] - t[i]
        y0, y1 = ys[i], ys[i + 1]
        f0 = vector_field(traj.sys, y0, traj.params)
        f1 = vector_field(traj.sys, y1, traj.params)

        def hermite(theta):
            t2 = theta * theta
            t3 = t2 * theta
            h00 = 2 * t3 - 3 * t2 + 1
            h10 = t3 - 2 * t2 + theta
            h01 = -2 * t3 + 3 * t2
            h11 = t3 - t2
            return h00 * y0 + h10 * h * f0 + h01 * y1 + h11 * h * f1

        lo, hi = 0.0, 1.0
        for _ in range(60):
            mid = 0.5 * (lo + hi)
            if (hermite(mid)[idx] - level) * g0 <= 0.0:
                hi = mid
            else:
                lo = mid
        theta = 0.5 * (lo + hi)
        xc = hermite(theta)
        xc[idx] = level
        times.append(t[i] + theta * h)
        states.append(xc)
    return SectionCrossings(section, np.array(times), np.array(states))


# ---------------------------------------------------------------------------
# limit cycles via the return map


def _return_map(sys: SystemId, p: ModelParams, section: Section, x_sec,
                rtol: float, atol: float, t_budget: float):
    """One full return to the section; returns (state, return_time)."""
    cr, _ = section_crossings(sys, x_sec, p, t_budget, section,
                              rtol=rtol, atol=atol, max_crossings=1,
                              t_min=1e-9)
    if len(cr) == 0:
        raise CycleNotFound("no section return within the time budget")
    return cr.states[0], float(cr.times[0])


def find_cycle(sys: SystemId, seed, p: ModelParams, section: Section | None = None,
               rtol: float = DEFAULT_RTOL, atol: float = DEFAULT_ATOL,
               t_budget: float = 2000.0, newton_tol: float = 1e-10,
               max_newton: int = 25, n_orbit: int = 256,
               multiplicity: int = 1) -> CycleRecord:
    """Locate a limit cycle by Newton iteration on the Poincare return map.

    The seed must be transient-settled (near the cycle).  `multiplicity`
    composes the return map k times, so a period-k cycle of the base section
    map can be targeted directly.  Multipliers are the eigenvalues of the
    finite-difference Jacobian of the (composed) return map restricted to
    the section.
    """
    seed = validate_state(sys, seed)
    if section is None:
        section = default_section(p)
    # land the seed on the section first
    cr, _ = section_crossings(sys, seed, p, t_budget, section,
                              rtol=rtol, atol=atol, max_crossings=1)
    if len(cr) == 0:
        raise CycleNotFound("seed trajectory never reaches the section")
    x = cr.states[0]

    red = [i for i in sys.active if i != section.index]
    if section.index not in sys.active:
        raise ValueError("section coordinate is pinned in this subsystem")

    def compose(xi):
        x_full = np.zeros(4)
        x_full[red] = xi
        x_full[section.index] = section.level
        T = 0.0
        cur = x_full
        for _ in range(multiplicity):
            cur, dt = _return_map(sys, p, section, cur, rtol, atol, t_budget)
            T += dt
        return cur[red], T

    xi = x[red].copy()
    n = len(xi)
    T = None
    converged = False
    for _ in range(max_newton):
        Rx, T = compose(xi)
        res = Rx - xi
        if np.max(np.abs(res)) < newton_tol:
            converged = True
            break
        # forward-difference Jacobian of the return map
        DR = np.empty((n, n))
        for j in range(n):
            eps = 1e-7 * max(1.0, abs(xi[j]))
            xp = xi.copy()
            xp[j] += eps
            Rp, _ = compose(xp)
            DR[:, j] = (Rp - Rx) / eps
        try:
            step = np.linalg.solve(DR - np.eye(n), -res)
        except np.linalg.LinAlgError as exc:
            raise CycleNotFound("singular return-map Jacobian") from exc
        damp = 1.0
        if np.max(np.abs(step)) > 0.2:
            damp = 0.2 / np.max(np.abs(step))
        xi = xi + damp * step
        if not np.all(np.isfinite(xi)) or np.max(np.abs(xi)) > 10.0:
            raise CycleNotFound("Newton iteration diverged")
    if not converged:
        raise CycleNotFound("Newton iteration did not converge")

    # final multipliers at the fixed point
    Rx, T = compose(xi)
    DR = np.empty((n, n))
    for j in range(n):
        eps = 1e-7 * max(1.0, abs(xi[j]))
        xp = xi.copy()
        xp[j] += eps
        Rp, _ = compose(xp)
        DR[:, j] = (Rp - Rx) / eps
    multipliers = np.linalg.eigvals(DR)

    x_fixed = np.zeros(4)
    x_fixed[red] = xi
    x_fixed[section.index] = section.level
    grid = np.linspace(0.0, T, max(n_orbit, 64), endpoint=True)
    orbit = integrate(sys, x_fixed, p, T, rtol=rtol, atol=atol, t_eval=grid).states
    amp = float(np.max(np.linalg.norm(orbit - orbit.mean(axis=0), axis=1)))
    closure = float(np.linalg.norm(orbit[-1] - orbit[0]))

    label = "unlabeled"
    act = list(sys.active)
    if 1 in act and np.max(orbit[:, 1]) < 1e-8:
        label = "c3"
    elif 3 in act and np.max(orbit[:, 3]) < 1e-8:
        label = "c3"

    # section multiplicity of the final orbit
    cr = poincare(Trajectory(grid, orbit, sys, p, rtol, atol), section)
    k = max(1, len(cr))

    return CycleRecord(period=T, orbit=orbit, multipliers=multipliers,
                       multiplicity=k, label=label, closure_error=closure,
                       amplitude=amp, section=section, anchor=x_fixed)


# ---------------------------------------------------------------------------
# section diagnostics


def rotation_number(crossings: SectionCrossings, min_crossings: int = 30) -> float:
    """Average angular advance per return around the crossing centroid.

    The crossing states are projected on the two principal axes of their
    spread inside the section plane; the result lies in [0, 1).
    """
    if len(crossings) < min_crossings:
        raise ValueError(f"need >= {min_crossings} crossings, have {len(crossings)}")
    pts = np.delete(crossings.states, crossings.section.index, axis=1)
    pts = pts - pts.mean(axis=0)
    _, _, vt = np.linalg.svd(pts, full_matrices=False)
    xy = pts @ vt[:2].T
    ang = np.arctan2(xy[:, 1], xy[:, 0])
    adv = np.diff(ang) / (2.0 * np.pi)
    adv = np.mod(adv, 1.0)
    return float(np.mod(np.mean(adv), 1.0))


def detect_period_multiplicity(crossings: SectionCrossings,
                               closure_frac: float = 1e-3,
                               min_crossings: int = 16,
                               k_max: int = 64) -> MultiplicityResult:
    """Section multiplicity by k-step recurrence of the crossing sequence.

    k is the smallest lag for which every crossing returns to itself within
    a tolerance of 1e-3 of the crossing-set diameter (absolute floor 1e-8),
    evaluated on the trailing half to discard transients.  No such lag up
    to `k_max` means the crossings are not a finite periodic set (torus or
    chaos suspected) and k is None; `margin` reports how decisively the
    best lag passed (tolerance / residual) or failed (< 1).
    """
    pts = crossings.states
    if len(pts) < min_crossings:
        return MultiplicityResult(None, False, 0, 0.0)
    pts = pts[len(pts) // 2:]
    diam = float(np.max(np.linalg.norm(pts - pts.mean(axis=0), axis=1))) * 2.0
    if diam < 1e-6:
        return MultiplicityResult(1, True, 1, np.inf)
    tol = max(closure_frac * diam, 1e-8)
    best_res, best_k = np.inf, 0
    for k in range(1, min(k_max, len(pts) - len(pts) // 3) + 1):
        res = float(np.max(np.linalg.norm(pts[k:] - pts[:-k], axis=1)))
        if res < tol:
            return MultiplicityResult(k, True, k, tol / max(res, 1e-300))
        if res < best_res:
            best_res, best_k = res, k
    return MultiplicityResult(None, False, best_k, tol / best_res)


# ---------------------------------------------------------------------------
# largest Lyapunov exponent


def lyapunov_max(sys: SystemId, x0, p: ModelParams, horizon: float = 2000.0,
                 renorm_dt: float = 1.0, rtol: float = 1e-8,
                 atol: float = 1e-11, band_tail: float = 0.5) -> LyapunovEstimate:
    """Largest Lyapunov exponent by repeated tangent renormalization.

    The running average over the last `band_tail` fraction of the horizon
    provides a convergence band; `converged` is False when the band is wider
    than 20% of the exponent magnitude (plus an absolute floor).
    """
    x0 = validate_state(sys, x0)
    pars, mask = _mask_and_pars(sys, p)
    logs = _stepper.benettin_core(x0, pars, mask, 0.0, horizon, renorm_dt,
                                  rtol, atol, 1_000_000)
    logs = logs[np.isfinite(logs)]
    if len(logs) < 10:
        raise IntegrationError("Lyapunov run failed before the horizon")
    cum = np.cumsum(logs) / (renorm_dt * np.arange(1, len(logs) + 1))
    tail = cum[int(len(cum) * (1.0 - band_tail)):]
    value = float(cum[-1])
    band = float(0.5 * (tail.max() - tail.min()))
    converged = band < max(0.2 * abs(value), 0.002)
    return LyapunovEstimate(value, band, converged, cum)
