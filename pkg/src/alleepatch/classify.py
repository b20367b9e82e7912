"""Attractor classification, basin probing, and parameter-portrait sweeps.

`classify_ic` runs a fixed decision pipeline on one initial condition:
burn-in, equilibrium proximity, limit-cycle detection with section
multiplicity, then torus/chaos separation by the largest Lyapunov exponent
and the geometry of the section crossings.  The first conclusive test wins
and inconclusive runs are reported as `undecided` rather than coerced.

`portrait_sweep` maps a seed set over an (alpha, m) grid in parallel and
assigns domain labels I-V; `local_portrait_2d` classifies the uncoupled
single-patch system into its five classical regions; `refuge_alpha_scan`
brackets the coupling thresholds of the one-predator (refuge) subsystem.
"""

from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .equilibria import EquilibriumRecord, all_equilibria
from .flow import (IntegrationError, Section, detect_period_multiplicity,
                   integrate, lyapunov_max, rotation_number,
                   section_crossings)
from .model import ModelParams, SystemId, validate_state

__all__ = [
    "AttractorReport",
    "PortraitCell",
    "RefugeThresholds",
    "classify_ic",
    "default_seed_set",
    "label_cell",
    "portrait_sweep",
    "local_portrait_2d",
    "bracket_cycle_loss_2d",
    "refuge_alpha_scan",
]

EQ_PROXIMITY_TOL = 1e-6
DEFAULT_BURN_IN = 3000.0
DEFAULT_BUDGET = 20000.0
TORUS_LLE_BAND = 0.005
CHAOS_LLE_MIN = 0.01
CLASSIFY_RTOL = 1e-8
CLASSIFY_ATOL = 1e-11


@dataclass
class AttractorReport:
    kind: str                      # origin_extinction | equilibrium | cycle |
                                   # torus | chaotic | undecided
    tag: str = ""                  # equilibrium family or cycle label
    k: int | None = None           # section multiplicity for cycles
    final_state: np.ndarray | None = None
    period: float | None = None
    rotation: float | None = None
    lle: float | None = None
    time_used: float = 0.0
    seed: np.ndarray | None = None
    detail: str = ""               # failing test name when undecided

    @property
    def conclusive(self) -> bool:
        return self.kind != "undecided"


@dataclass
class PortraitCell:
    alpha: float
    m: float
    reports: list[AttractorReport] = field(default_factory=list)
    label: str = "boundary"


@dataclass
class RefugeThresholds:
    alpha_onset: float | None       # cycle onset (bracket midpoint)
    alpha_hopf: float | None        # stability change of the mixed state
    alpha_loss: float | None        # loss of every nontrivial attractor
    onset_bracket: tuple[float, float] | None = None
    loss_bracket: tuple[float, float] | None = None
    notes: str = ""


# ---------------------------------------------------------------------------
# single-orbit classification


def _match_equilibrium(x: np.ndarray, eqs: list[EquilibriumRecord]):
    best, bd = None, np.inf
    for rec in eqs:
        d = float(np.max(np.abs(x - rec.location)))
        if d < bd:
            best, bd = rec, d
    return best, bd


def _symmetric_orbit(samples: np.ndarray, tol: float = 1e-4) -> bool:
    return (float(np.max(np.abs(samples[:, 0] - samples[:, 2]))) < tol and
            float(np.max(np.abs(samples[:, 1] - samples[:, 3]))) < tol)


def _predator_free(samples: np.ndarray, sys: SystemId) -> bool:
    for i in (1, 3):
        if i in sys.active and float(np.max(samples[:, i])) < 1e-6:
            return True
    return False


def _pick_section(samples: np.ndarray, sys: SystemId) -> Section | None:
    """Section on the widest-swinging prey coordinate at its mid level."""
    best, amp = None, 0.0
    for i in (0, 2):
        if i not in sys.active:
            continue
        lo, hi = float(samples[:, i].min()), float(samples[:, i].max())
        if hi - lo > amp:
            amp = hi - lo
            best = Section(i, 0.5 * (lo + hi), -1)
    return best if amp > 1e-6 else None


def _curve_fill(states: np.ndarray, section: Section, n_grid: int = 32):
    """(is_curve_like, fill_ratio): do the crossings trace a 1D curve?

    Projects on the two principal axes inside the section plane and counts
    occupied boxes of an n x n grid: a closed curve occupies O(n) boxes, a
    finite cluster set far fewer, an area-filling set far more.
    """
    pts = np.delete(states, section.index, axis=1)
    pts = pts - pts.mean(axis=0)
    _, sv, vt = np.linalg.svd(pts, full_matrices=False)
    xy = pts @ vt[:2].T
    span = xy.max(axis=0) - xy.min(axis=0)
    if span[0] < 1e-5:
        return False, 0.0
    cells = np.floor((xy - xy.min(axis=0)) / (span + 1e-300) * (n_grid - 1e-9))
    occupied = len({(int(a), int(b)) for a, b in cells})
    ratio = occupied / n_grid
    return (0.8 <= ratio <= 4.0 and occupied >= 12), ratio


def classify_ic(sys: SystemId, x0, p: ModelParams,
                budget: float = DEFAULT_BUDGET,
                burn_in: float = DEFAULT_BURN_IN,
                equilibria: list[EquilibriumRecord] | None = None,
                rtol: float = CLASSIFY_RTOL,
                atol: float = CLASSIFY_ATOL) -> AttractorReport:
    """Classify the attractor reached from one initial condition.

    Pipeline: burn-in; equilibrium proximity (max-norm 1e-6 against the
    tabulated equilibria); limit-cycle detection with section multiplicity;
    torus test (near-zero largest Lyapunov exponent plus a curve-filling
    section); chaos by positive exponent.  Anything still open within the
    time budget returns kind="undecided" naming the failing test.
    """
    x0 = validate_state(sys, x0)
    seed = x0.copy()
    if equilibria is None:
        equilibria = all_equilibria(p)

    try:
        x = integrate(sys, x0, p, burn_in, rtol=rtol, atol=atol,
                      store_every=0).final
    except IntegrationError as exc:
        return AttractorReport("undecided", detail=f"burn_in:{exc}", seed=seed)
    used = burn_in

    # settle phase: converge to a point or reveal a sustained oscillation
    chunk = 500.0
    samples = None
    while used + chunk <= 0.5 * budget:
        grid = np.linspace(0.0, chunk, 201)
        traj = integrate(sys, x, p, chunk, rtol=rtol, atol=atol, t_eval=grid)
        samples, x = traj.states, traj.final
        used += chunk
        rec, dist = _match_equilibrium(x, equilibria)
        if dist < EQ_PROXIMITY_TOL:
            kind = ("origin_extinction"
                    if float(np.max(np.abs(rec.location))) < 1e-12
                    else "equilibrium")
            return AttractorReport(kind, tag=rec.family, final_state=x,
                                   time_used=used, seed=seed)
        diam = float(np.max(samples.max(axis=0) - samples.min(axis=0)))
        if diam > 1e-3:
            break
        if diam < 1e-10:
            return AttractorReport("equilibrium", tag="untabulated",
                                   final_state=x, time_used=used, seed=seed,
                                   detail=f"nearest {rec.family} at {dist:.2e}")
    if samples is None:
        return AttractorReport("undecided", detail="budget:settle",
                               final_state=x, time_used=used, seed=seed)

    # the oscillation check above trips on the first post-burn-in chunk, so
    # give slowly contracting orbits extra settling before the section work
    extra = min(0.25 * budget, max(budget - used - 12000.0, 0.0))
    if extra > 0.0:
        try:
            x = integrate(sys, x, p, extra, rtol=rtol, atol=atol,
                          store_every=0).final
        except IntegrationError as exc:
            return AttractorReport("undecided", detail=f"settle:{exc}",
                                   final_state=x, time_used=used, seed=seed)
        used += extra

    section = _pick_section(samples, sys)
    if section is None:
        return AttractorReport("undecided", detail="section:flat_oscillation",
                               final_state=x, time_used=used, seed=seed)

    t_collect = min(budget - used, 8000.0)
    try:
        crossings, x = section_crossings(sys, x, p, t_collect, section,
                                         rtol=rtol, atol=atol,
                                         max_crossings=4000)
    except IntegrationError as exc:
        return AttractorReport("undecided", detail=f"collect:{exc}",
                               final_state=x, time_used=used, seed=seed)
    used += t_collect
    if len(crossings) < 3:
        return AttractorReport("undecided", detail="section:few_crossings",
                               final_state=x, time_used=used, seed=seed)

    label = "c4"
    if _predator_free(samples, sys):
        label = "c3"
    elif sys is SystemId.FULL and _symmetric_orbit(samples):
        label = "cu"
    elif sys in (SystemId.LOCAL, SystemId.PREY_PREY):
        label = "c2"

    mult = detect_period_multiplicity(crossings, min_crossings=min(16, len(crossings)))
    rot = None
    if len(crossings) >= 30:
        try:
            rot = rotation_number(crossings)
        except ValueError:
            rot = None
    if mult.separable and mult.k is not None:
        dt = np.diff(crossings.times)
        period = float(np.mean(dt[len(dt) // 4:])) * mult.k
        return AttractorReport("cycle", tag=label, k=mult.k, period=period,
                               rotation=rot, final_state=x, time_used=used,
                               seed=seed)

    # not a finite cluster set: torus vs chaos by the Lyapunov exponent
    horizon = min(max(budget - used, 500.0), 4000.0)
    try:
        lle = lyapunov_max(sys, x, p, horizon=horizon, rtol=rtol, atol=atol)
    except IntegrationError as exc:
        return AttractorReport("undecided", detail=f"lyapunov:{exc}",
                               final_state=x, time_used=used, seed=seed)
    used += horizon
    curve_like, fill = _curve_fill(crossings.states, section)
    if abs(lle.value) < TORUS_LLE_BAND and curve_like:
        return AttractorReport("torus", tag=label, rotation=rot,
                               lle=lle.value, final_state=x, time_used=used,
                               seed=seed)
    if lle.value > CHAOS_LLE_MIN:
        return AttractorReport("chaotic", tag=label, rotation=rot,
                               lle=lle.value, final_state=x, time_used=used,
                               seed=seed)
    return AttractorReport("undecided", detail="torus_chaos:inconclusive",
                           rotation=rot, lle=lle.value, final_state=x,
                           time_used=used, seed=seed)


# ---------------------------------------------------------------------------
# seed sets and portrait labels


def default_seed_set(p: ModelParams) -> list[np.ndarray]:
    """Five probes covering the known basin families: near-origin, bulk
    asymmetric, anti-phase and in-phase perturbations of the symmetric
    coexistence state, and a predator-free refuge state (invariant
    hyperplane v2 = 0).  The in-phase probe stays exactly on the symmetric
    subspace, so it reaches the synchronous cycle family whenever that
    family exists -- no fully asymmetric seed can be relied on for that."""
    seeds = [np.array([0.01, 0.01, 0.01, 0.01]),
             np.array([0.9, 0.2, 0.05, 0.05])]
    m, l = p.m, p.l
    if 0.0 < l < m < 1.0:
        v = (m - l) * (1.0 - m)
        seeds.append(np.array([m + 0.01, v, m - 0.01, v]))
        seeds.append(np.array([m + 0.01, v, m + 0.01, v]))
    else:
        seeds.append(np.array([0.5, 0.1, 0.49, 0.1]))
        seeds.append(np.array([0.5, 0.1, 0.5, 0.1]))
    seeds.append(np.array([0.8, 0.25, 0.6, 0.0]))
    return seeds


def label_cell(reports: list[AttractorReport]) -> str:
    """Domain label from a cell's report multiset.

    IV: both the symmetric cycle family (cu) and the asymmetric 4D family
    (c4 cycle/torus/chaos) occur; II: cu without c4; V: c4 family without
    cu; I: the coexistence equilibrium and no 4D cycle; III: every seed is
    conclusive and only trivial attractors remain; otherwise boundary.
    """
    has_cu = any(r.kind == "cycle" and r.tag == "cu" for r in reports)
    has_c4 = any((r.kind == "cycle" and r.tag == "c4") or
                 (r.kind in ("torus", "chaotic") and r.tag != "c3")
                 for r in reports)
    has_aa = any(r.kind == "equilibrium" and r.tag.startswith("AA")
                 for r in reports)
    if has_cu and has_c4:
        return "IV"
    if has_cu:
        return "II"
    if has_c4:
        return "V"
    if has_aa:
        return "I"
    if all(r.conclusive for r in reports):
        nontrivial = [r for r in reports
                      if r.kind not in ("origin_extinction",) and
                      not (r.kind == "equilibrium" and not r.tag.startswith("AA")) and
                      not (r.kind == "cycle" and r.tag == "c3")]
        if not nontrivial:
            return "III"
    return "boundary"


def _sweep_cell(args) -> PortraitCell:
    (alpha, m, gamma, l, seeds, budget, burn_in) = args
    p = ModelParams.symmetric(alpha=alpha, gamma=gamma, m=m, l=l)
    eqs = all_equilibria(p)
    reports = []
    for s in seeds:
        try:
            r = classify_ic(SystemId.FULL, s, p, budget=budget,
                            burn_in=burn_in, equilibria=eqs)
        except Exception as exc:   # a bad cell must not sink the sweep
            r = AttractorReport("undecided", detail=f"error:{exc}",
                                seed=np.asarray(s, dtype=float))
        reports.append(r)
    return PortraitCell(alpha, m, reports, label_cell(reports))


def portrait_sweep(alphas, ms, gamma: float = 1.0, l: float = 0.1,
                   seeds=None, jobs: int | None = None,
                   budget: float = DEFAULT_BUDGET,
                   burn_in: float = DEFAULT_BURN_IN) -> list[PortraitCell]:
    """Classify the default (or given) seed set over an (alpha, m) grid.

    Cells run in parallel across processes; the returned list is ordered
    m-major then alpha, independent of scheduling.
    """
    alphas = np.atleast_1d(np.asarray(alphas, dtype=float))
    ms = np.atleast_1d(np.asarray(ms, dtype=float))
    tasks = []
    for m in ms:
        for a in alphas:
            p = ModelParams.symmetric(alpha=a, gamma=gamma, m=m, l=l)
            cell_seeds = ([np.asarray(s, dtype=float) for s in seeds]
                          if seeds is not None else default_seed_set(p))
            tasks.append((a, m, gamma, l, cell_seeds, budget, burn_in))
    if jobs is None:
        jobs = int(os.environ.get("ALLEE_PATCH_JOBS", "0")) or (os.cpu_count() or 1)
    if jobs <= 1 or len(tasks) == 1:
        return [_sweep_cell(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(_sweep_cell, tasks))


# ---------------------------------------------------------------------------
# uncoupled single-patch portrait and the heteroclinic boundary


def _cycle_exists_2d(l: float, m: float, gamma: float = 1.0,
                     burn_in: float = 4000.0) -> bool:
    """Does the isolated patch carry a stable cycle at (l, m)?

    Starts just outside the coexistence state and checks whether the orbit
    keeps oscillating (cycle) or collapses to the origin / the equilibrium.
    """
    p = ModelParams.symmetric(alpha=0.0, gamma=gamma, m=m, l=l)
    v = (m - l) * (1.0 - m)
    x0 = np.array([min(m + 0.02, 0.99), max(v + 0.02, 0.02), 0.0, 0.0])
    x = integrate(SystemId.LOCAL, x0, p, burn_in, rtol=CLASSIFY_RTOL,
                  atol=CLASSIFY_ATOL, store_every=0).final
    grid = np.linspace(0.0, 400.0, 401)
    sam = integrate(SystemId.LOCAL, x, p, 400.0, rtol=CLASSIFY_RTOL,
                    atol=CLASSIFY_ATOL, t_eval=grid).states
    if float(sam[:, :2].max()) < 1e-4:
        return False                      # extinct
    diam = float(np.max(sam[:, :2].max(axis=0) - sam[:, :2].min(axis=0)))
    return diam > 1e-3


def local_portrait_2d(l: float, m: float, gamma: float = 1.0) -> int:
    """Region tag 1..5 of the uncoupled single-patch system.

    1: m >= 1 (predator extinction); 2: stable coexistence equilibrium
    ((l+1)/2 < m < 1); 3: stable cycle; 4: coexistence state unstable and no
    cycle (orbits reach the origin); 5: m <= l (no coexistence state).
    Regions 3 and 4 are separated by the numerically detected heteroclinic
    value of m, probed directly by simulation at the given point.
    """
    if not 0.0 < l < 1.0:
        raise ValueError("need 0 < l < 1")
    if m >= 1.0:
        return 1
    if m <= l:
        return 5
    if m > 0.5 * (l + 1.0):
        return 2
    return 3 if _cycle_exists_2d(l, m, gamma) else 4


def bracket_cycle_loss_2d(l: float, lo: float, hi: float, gamma: float = 1.0,
                          tol: float = 1e-3) -> tuple[float, float]:
    """Bisection bracket for the heteroclinic loss of the single-patch cycle.

    The cycle must exist at `hi` and be absent at `lo`; the returned bracket
    has width <= tol.
    """
    if _cycle_exists_2d(l, lo, gamma):
        raise ValueError(f"cycle already exists at m={lo}")
    if not _cycle_exists_2d(l, hi, gamma):
        raise ValueError(f"no cycle at m={hi}")
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if _cycle_exists_2d(l, mid, gamma):
            hi = mid
        else:
            lo = mid
    return lo, hi


# ---------------------------------------------------------------------------
# refuge-subsystem coupling thresholds


def _refuge_attractors(alpha: float, l: float, m: float, gamma: float,
                       budget: float = 8000.0) -> list[AttractorReport]:
    p = ModelParams.symmetric(alpha=alpha, gamma=gamma, m=m, l=l)
    v = max((m - l) * (1.0 - m), 0.05)
    seeds = [np.array([0.5, 0.0, min(m + 0.05, 0.95), v]),
             np.array([0.05, 0.0, 0.9, 0.2]),
             np.array([0.9, 0.0, 0.9, v])]
    eqs = all_equilibria(p)
    return [classify_ic(SystemId.REFUGE_A, s, p, budget=budget,
                        burn_in=1500.0, equilibria=eqs) for s in seeds]


def _has_refuge_cycle(alpha, l, m, gamma) -> bool:
    return any(r.kind in ("cycle", "torus", "chaotic")
               for r in _refuge_attractors(alpha, l, m, gamma))


def _has_nontrivial(alpha, l, m, gamma) -> bool:
    """Any attractor besides the origin (cycles, tori, nonzero equilibria)."""
    return any(r.kind in ("cycle", "torus", "chaotic", "equilibrium")
               for r in _refuge_attractors(alpha, l, m, gamma))


def refuge_alpha_scan(l: float, m: float, gamma: float = 1.0,
                      alpha_max: float = 0.4, tol: float = 2e-3
                      ) -> RefugeThresholds:
    """Ordered coupling thresholds of the one-predator (refuge) subsystem.

    Bisects the onset of the three-dimensional cycle (alpha_onset), locates
    the stability change of the mixed one-predator equilibrium by eigenvalue
    continuation (alpha_hopf), and bisects the loss of every nontrivial
    attractor (alpha_loss).  Thresholds absent in the scanned range are
    returned as None with a note.
    """
    if not 0.0 < l < m < 1.0:
        raise ValueError("need 0 < l < m < 1")
    notes = []

    # cycle onset: scan up from alpha ~ 0
    probe = np.linspace(1e-4, alpha_max, 17)
    onset = None
    onset_bracket = None
    prev = probe[0]
    prev_has = _has_refuge_cycle(prev, l, m, gamma)
    if prev_has:
        onset = 0.0
        onset_bracket = (0.0, float(prev))
        notes.append("cycle already present at the lower scan edge")
    else:
        for a in probe[1:]:
            cur = _has_refuge_cycle(a, l, m, gamma)
            if cur:
                lo, hi = prev, a
                while hi - lo > tol:
                    mid = 0.5 * (lo + hi)
                    if _has_refuge_cycle(mid, l, m, gamma):
                        hi = mid
                    else:
                        lo = mid
                onset, onset_bracket = 0.5 * (lo + hi), (float(lo), float(hi))
                break
            prev, prev_has = a, cur
        else:
            notes.append("no cycle onset found in the scanned range")

    # stability change of the surviving mixed equilibrium
    from .bifurcation import follow_B_branch, locate_hopf
    hopf = None
    p0 = ModelParams.symmetric(alpha=1e-3, gamma=gamma, m=m, l=l)
    try:
        hp = locate_hopf(SystemId.REFUGE_A, p0, "alpha", 1e-3, alpha_max,
                         equilibrium=follow_B_branch(p0, 1.0),
                         compute_l1=False)
        hopf = hp.value
    except ValueError as exc:
        notes.append(f"no mixed-state stability change: {exc}")

    # loss of every nontrivial attractor
    loss = None
    loss_bracket = None
    if _has_nontrivial(alpha_max, l, m, gamma):
        notes.append("nontrivial attractors persist at the upper scan edge")
    else:
        lo = onset_bracket[1] if onset_bracket else 1e-3
        if not _has_nontrivial(lo, l, m, gamma):
            notes.append("no nontrivial attractor anywhere in the range")
        else:
            hi = alpha_max
            while hi - lo > tol:
                mid = 0.5 * (lo + hi)
                if _has_nontrivial(mid, l, m, gamma):
                    lo = mid
                else:
                    hi = mid
            loss, loss_bracket = 0.5 * (lo + hi), (float(lo), float(hi))

    return RefugeThresholds(onset, hopf, loss, onset_bracket, loss_bracket,
                            "; ".join(notes))
