"""Jacobians, spectra, and linear stability classification.

The 4D Jacobian has a two-patch block layout whose characteristic quartic
factors at the trivial equilibria: predator rows decouple at C points
(v1 = v2 = 0) and one predator row decouples at B points, so closed-form
eigenvalues are available there and at all symmetric points.  A compiled
quartic root finder (simultaneous Durand-Kerner iteration on the monic
characteristic coefficients) provides the numeric route used to cross-check
every closed form.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .model import (
    ModelParams,
    SystemId,
    allee_growth_d1,
)

__all__ = [
    "Spectrum",
    "StabilityClass",
    "jacobian",
    "jacobian_subsystem",
    "characteristic_coeffs",
    "eigen_quartic",
    "eigen_symmetric",
    "eigen_block_symmetric",
    "characteristic_factors",
    "table_eigen_C",
    "table_eigen_B",
    "classify",
    "polyroots_dk",
]

HYPERBOLIC_TOL = 1e-7


@dataclass
class Spectrum:
    """Eigenvalues sorted by (Re desc, Im desc) with their provenance."""

    eigenvalues: np.ndarray
    provenance: str  # "closed_form" | "quartic_numeric"

    def __post_init__(self):
        self.eigenvalues = _canonicalize(np.asarray(self.eigenvalues, dtype=complex))

    @property
    def max_real(self) -> float:
        return float(np.max(self.eigenvalues.real))


@dataclass
class StabilityClass:
    tag: str
    unstable_dim: int


def _canonicalize(vals: np.ndarray) -> np.ndarray:
    """Zero tiny imaginary parts, enforce conjugate pairing, sort."""
    scale = max(np.max(np.abs(vals)), 1e-30)
    vals = vals.copy()
    vals.imag[np.abs(vals.imag) < 1e-12 * scale] = 0.0
    used = np.zeros(len(vals), dtype=bool)
    out = []
    for i in range(len(vals)):
        if used[i]:
            continue
        if vals[i].imag == 0.0:
            out.append(vals[i])
            used[i] = True
            continue
        # find the best conjugate partner and average the pair
        best, bd = -1, np.inf
        for j in range(i + 1, len(vals)):
            if used[j] or vals[j].imag == 0.0:
                continue
            d = abs(vals[j] - np.conj(vals[i]))
            if d < bd:
                best, bd = j, d
        if best >= 0 and bd < 1e-6 * scale:
            z = 0.5 * (vals[i] + np.conj(vals[best]))
            out.extend([z, np.conj(z)])
            used[i] = used[best] = True
        else:
            out.append(vals[i])
            used[i] = True
    arr = np.array(out)
    order = np.lexsort((-arr.imag, -arr.real))
    return arr[order]


# ---------------------------------------------------------------------------
# Jacobians


def jacobian(x, p: ModelParams) -> np.ndarray:
    """Jacobian of the full 4D field at a state."""
    x = np.asarray(x, dtype=float)
    u1, v1, u2, v2 = x
    J = np.zeros((4, 4))
    J[0, 0] = p.beta1 * allee_growth_d1(u1, p.l1) - v1 - p.alpha1
    J[0, 1] = -u1
    J[0, 2] = p.alpha1
    J[1, 0] = p.gamma1 * v1
    J[1, 1] = p.gamma1 * (u1 - p.m1)
    J[2, 0] = p.alpha2
    J[2, 2] = p.beta2 * allee_growth_d1(u2, p.l2) - v2 - p.alpha2
    J[2, 3] = -u2
    J[3, 2] = p.gamma2 * v2
    J[3, 3] = p.gamma2 * (u2 - p.m2)
    return J


def jacobian_subsystem(sys: SystemId, x, p: ModelParams) -> np.ndarray:
    """Jacobian of a subsystem in its reduced coordinates."""
    if sys is SystemId.LOCAL:
        p = p.replace(alpha1=0.0, alpha2=0.0)
    J = jacobian(x, p)
    idx = list(sys.active)
    return J[np.ix_(idx, idx)]


def characteristic_coeffs(J: np.ndarray) -> np.ndarray:
    """Monic characteristic coefficients [1, c3, c2, c1, c0] (Faddeev-LeVerrier)."""
    n = J.shape[0]
    coeffs = np.empty(n + 1)
    coeffs[0] = 1.0
    M = np.zeros_like(J)
    I = np.eye(n)
    for k in range(1, n + 1):
        M = J @ M + coeffs[k - 1] * I
        coeffs[k] = -np.trace(J @ M) / k
    return coeffs


# ---------------------------------------------------------------------------
# quartic (and lower) root finding


def polyroots_dk(coeffs: np.ndarray, tol: float = 1e-14, maxit: int = 200,
                 restarts: int = 3, rng_seed: int = 12345) -> np.ndarray:
    """Roots of a monic real polynomial by Durand-Kerner simultaneous iteration.

    Close root clusters (multiple roots) are replaced by their centroid,
    which cancels the leading square-root splitting error of multiplicities.
    Falls back to companion-matrix eigenvalues when the simultaneous
    iteration stalls (multiple roots slow it to linear convergence).
    """
    coeffs = np.asarray(coeffs, dtype=float)
    n = len(coeffs) - 1
    if n == 0:
        return np.array([], dtype=complex)
    scale = max(np.max(np.abs(coeffs)), 1.0)

    def peval(z):
        out = np.full_like(z, coeffs[0])
        for c in coeffs[1:]:
            out = out * z + c
        return out

    rng = np.random.default_rng(rng_seed)
    radius = 1.0 + np.max(np.abs(coeffs[1:]))  # Cauchy bound
    for attempt in range(restarts):
        ang = 2.0 * np.pi * (np.arange(n) + 0.35) / n
        z = (0.4 + 0.6 * radius) * np.exp(1j * ang)
        if attempt > 0:
            z = z * (1.0 + 0.3 * rng.standard_normal(n)
                     + 0.3j * rng.standard_normal(n))
        for _ in range(maxit):
            pz = peval(z)
            diff = z[:, None] - z[None, :]
            np.fill_diagonal(diff, 1.0)
            step = pz / diff.prod(axis=1)
            z = z - step
            if np.max(np.abs(step)) < tol * max(1.0, np.max(np.abs(z))):
                break
        zc = _collapse_best(z, coeffs)
        # backward error: reconstructed monic coefficients vs the input
        if np.max(np.abs(np.poly(zc) - coeffs)) <= 1e-9 * scale:
            return zc
    return _collapse_best(np.roots(coeffs).astype(complex), coeffs)


def _collapse_best(z: np.ndarray, coeffs: np.ndarray) -> np.ndarray:
    """Collapse root clusters at increasing radii while the centroid
    substitution does not worsen the reconstructed coefficients.

    A true multiple root split by the square-root error amplification is
    healed by its centroid; genuinely distinct close roots are left alone
    because merging them degrades the backward error.
    """
    best = z
    best_err = np.max(np.abs(np.poly(z) - coeffs))
    for rel in (1e-7, 1e-6, 1e-5, 1e-4):
        zc = _collapse_clusters(z, rel)
        err = np.max(np.abs(np.poly(zc) - coeffs))
        if err <= best_err * 1.5 + 1e-15:
            best, best_err = zc, min(best_err, err)
    return best


def _collapse_clusters(z: np.ndarray, rel: float = 1e-5) -> np.ndarray:
    """Replace near-coincident roots by their cluster centroid."""
    n = len(z)
    zscale = max(np.max(np.abs(z)), 1.0)
    used = np.zeros(n, dtype=bool)
    out = np.empty(n, dtype=complex)
    k = 0
    for i in range(n):
        if used[i]:
            continue
        cluster = [i]
        for j in range(i + 1, n):
            if not used[j] and abs(z[j] - z[i]) < rel * zscale:
                cluster.append(j)
        c = np.mean(z[cluster])
        for j in cluster:
            used[j] = True
            out[k] = c
            k += 1
    return out


def eigen_quartic(J: np.ndarray) -> Spectrum:
    """Numeric spectrum from the characteristic polynomial roots."""
    coeffs = characteristic_coeffs(J)
    roots = polyroots_dk(coeffs)
    return Spectrum(roots, "quartic_numeric")


# ---------------------------------------------------------------------------
# closed forms


def eigen_symmetric(tag: str, p: ModelParams) -> Spectrum:
    """Closed-form spectrum at a symmetric equilibrium (O, Ol, O11, AA).

    At AA the oscillatory pairs use n = 1 + l - 2m, the combination whose
    vanishing reproduces the Hopf surface m = (l+1)/2.
    """
    l, m, g, a = p.l, p.m, p.gamma, p.alpha
    if tag == "O":
        vals = [-g * m, -g * m, -l, -l - 2.0 * a]
    elif tag == "Ol":
        vals = [-g * (m - l), -g * (m - l), l * (1.0 - l), l * (1.0 - l) - 2.0 * a]
    elif tag == "O11":
        vals = [g * (1.0 - m), g * (1.0 - m), -(1.0 - l), -(1.0 - l) - 2.0 * a]
    elif tag == "AA":
        if not 0.0 < l < m < 1.0:
            raise ValueError("AA exists only for 0 < l < m < 1")
        vstar = (m - l) * (1.0 - m)
        n = 1.0 + l - 2.0 * m
        mn = m * n
        d1 = complex(mn * mn - 4.0 * m * g * vstar) ** 0.5
        d2 = complex((mn - 2.0 * a) ** 2 - 4.0 * m * g * vstar) ** 0.5
        vals = [0.5 * (mn + d1), 0.5 * (mn - d1),
                0.5 * (mn - 2.0 * a + d2), 0.5 * (mn - 2.0 * a - d2)]
    else:
        raise ValueError(f"unknown symmetric tag {tag!r}")
    return Spectrum(np.array(vals, dtype=complex), "closed_form")


def eigen_block_symmetric(P: float, Q: float, R: float, S: float, alpha: float) -> Spectrum:
    """Closed-form spectrum of a block-symmetric two-patch Jacobian.

    When both patch blocks carry identical entries (P, Q, R, S with the
    dispersal coupling alpha off the blocks), the quartic splits along the
    in-phase / anti-phase decomposition into two quadratics:

        in-phase:   lambda^2 - (P + alpha + S) lambda + (P + alpha) S - Q R
        anti-phase: lambda^2 - (P - alpha + S) lambda + (P - alpha) S - Q R

    Here P is the diagonal entry as it appears in the Jacobian (dispersal
    already subtracted once).
    """
    vals = []
    for shift in (alpha, -alpha):
        tr = P + shift + S
        disc = complex((P + shift - S) ** 2 + 4.0 * Q * R) ** 0.5
        vals.extend([0.5 * (tr + disc), 0.5 * (tr - disc)])
    return Spectrum(np.array(vals, dtype=complex), "closed_form")


def characteristic_factors(x, p: ModelParams) -> list[np.ndarray]:
    """Factored characteristic polynomial at a C or B equilibrium.

    Returns monic-coefficient arrays (descending powers) whose product is
    the full quartic: [quadratic, (lambda - S2), (lambda - S1)] at C points
    and [cubic, (lambda - S_pinned)] at B points.
    """
    x = np.asarray(x, dtype=float)
    u1, v1, u2, v2 = x
    a, l, m, g = p.alpha, p.l, p.m, p.gamma
    S1 = -g * (m - u1)
    S2 = -g * (m - u2)
    if v1 == 0.0 and v2 == 0.0:
        P1 = allee_growth_d1(u1, l) - a
        P2 = allee_growth_d1(u2, l) - a
        quad = np.array([1.0, -(P1 + P2), P1 * P2 - a * a])
        return [quad, np.array([1.0, -S2]), np.array([1.0, -S1])]
    if (v1 == 0.0) != (v2 == 0.0):
        if v1 == 0.0:
            y, zpred, upred, Spin = u1, v2, u2, S1
        else:
            y, zpred, upred, Spin = u2, v1, u1, S2
        P1 = allee_growth_d1(y, l) - a
        P2 = allee_growth_d1(upred, l) - zpred - a
        # -lambda (P1-lambda)(P2-lambda) + gamma m z (P1-lambda) + alpha^2 lambda,
        # written as a monic cubic in lambda
        cubic = np.array([
            1.0,
            -(P1 + P2),
            P1 * P2 + g * upred * zpred - a * a,
            -g * upred * zpred * P1,
        ])
        return [cubic, np.array([1.0, -Spin])]
    raise ValueError("characteristic factors apply to C and B equilibria only")


def table_eigen_C(branch: str, p: ModelParams) -> Spectrum:
    """First-order small-alpha eigenvalues of a C branch.

    lambda_1,2 are the decoupled predator rates -gamma (m - u_i) and
    lambda_3,4 the prey-block rates f'(u_i) - alpha, all evaluated at the
    first-order branch coordinates.
    """
    from .equilibria import asymptotic_C

    u1, u2 = asymptotic_C(p)[branch]
    a, l, m, g = p.alpha, p.l, p.m, p.gamma
    vals = [
        -g * (m - u1),
        -g * (m - u2),
        allee_growth_d1(u1, l) - a,
        allee_growth_d1(u2, l) - a,
    ]
    return Spectrum(np.array(vals, dtype=complex), "closed_form")


def table_eigen_B(branch: str, p: ModelParams) -> Spectrum:
    """First-order small-alpha eigenvalues of a B branch (4D embedding).

    lambda_1 = -gamma (m - y), lambda_2 = f'(y) - alpha at the asymptotic
    free-prey root y, and the oscillatory pair (Tr +/- sqrt(delta))/2 with
    Tr = m n - alpha y / m (n = 1 + l - 2m) and delta = Tr^2 - 4 gamma m z.
    """
    from .equilibria import asymptotic_B

    y, z = asymptotic_B(p)[branch]
    a, l, m, g = p.alpha, p.l, p.m, p.gamma
    n = 1.0 + l - 2.0 * m
    tr = m * n - a * y / m
    delta = complex(tr * tr - 4.0 * g * m * z) ** 0.5
    vals = [
        -g * (m - y),
        allee_growth_d1(y, l) - a,
        0.5 * (tr + delta),
        0.5 * (tr - delta),
    ]
    return Spectrum(np.array(vals, dtype=complex), "closed_form")


# ---------------------------------------------------------------------------
# stability classification


def classify(spec: Spectrum, tol: float = HYPERBOLIC_TOL) -> StabilityClass:
    """Sign-pattern stability class with a dead zone around Re = 0."""
    vals = spec.eigenvalues
    scale = max(np.max(np.abs(vals)), 1.0)
    re = vals.real
    near_zero = np.abs(re) < tol * scale
    has_complex = np.any(vals.imag != 0.0)
    n_unstable = int(np.sum(re > tol * scale))
    n_stable = int(np.sum(re < -tol * scale))
    n_zero = int(np.sum(near_zero))
    if n_zero > 0:
        if n_zero == 1 and not np.any(vals.imag[near_zero] != 0.0):
            return StabilityClass("saddle_node_like", n_unstable)
        return StabilityClass("nonhyperbolic", n_unstable)
    if n_unstable == 0:
        return StabilityClass("stable_spiral" if has_complex else "stable_node", 0)
    if n_stable == 0:
        return StabilityClass("unstable_spiral" if has_complex else "unstable_node",
                              n_unstable)
    return StabilityClass("saddle_focus" if has_complex else "saddle", n_unstable)
