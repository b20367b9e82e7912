"""Parameters, states, and vector fields of the two-patch predator-prey model.

The full system couples two patches through prey dispersal at rate ``alpha``.
Within each patch the prey grows with a strong Allee effect (cubic growth
``u(u-l)(1-u)``) and is consumed by a patch-specific predator.  Lower
dimensional subsystems (a single patch, a predator-free pair of patches, and
a one-refuge configuration) are obtained by pinning coordinates to zero.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

__all__ = [
    "ModelParams",
    "SystemId",
    "allee_growth",
    "allee_growth_d1",
    "allee_growth_d2",
    "vector_field",
    "embed",
    "project",
    "validate_state",
]


def allee_growth(u, l):
    """Cubic prey growth rate ``u (u - l) (1 - u)`` with Allee threshold ``l``."""
    return u * (u - l) * (1.0 - u)


def allee_growth_d1(u, l):
    """First derivative of the Allee growth cubic."""
    return -3.0 * u * u + 2.0 * (1.0 + l) * u - l


def allee_growth_d2(u, l):
    """Second derivative of the Allee growth cubic."""
    return -6.0 * u + 2.0 * (1.0 + l)


class SystemId(Enum):
    """Identifies which coordinates of the 4D state are dynamical.

    FULL        -- all four coordinates (u1, v1, u2, v2).
    LOCAL       -- single isolated patch (u1, v1); no dispersal term.
    PREY_PREY   -- predator-free pair of patches (u1, u2).
    REFUGE_A    -- patch 1 is a prey refuge: (u1, u2, v2), v1 pinned.
    REFUGE_B    -- patch 2 is a prey refuge: (u1, v1, u2), v2 pinned.
    """

    FULL = "full"
    LOCAL = "local"
    PREY_PREY = "prey_prey"
    REFUGE_A = "refuge_a"
    REFUGE_B = "refuge_b"

    @property
    def pinned(self) -> tuple[int, ...]:
        return _PINNED[self]

    @property
    def active(self) -> tuple[int, ...]:
        return tuple(i for i in range(4) if i not in _PINNED[self])

    @property
    def dim(self) -> int:
        return 4 - len(_PINNED[self])


_PINNED = {
    SystemId.FULL: (),
    SystemId.LOCAL: (2, 3),
    SystemId.PREY_PREY: (1, 3),
    SystemId.REFUGE_A: (1,),
    SystemId.REFUGE_B: (3,),
}


@dataclass(frozen=True)
class ModelParams:
    """Parameter tuple of the two-patch model.

    ``alpha``: prey dispersal rates, ``gamma``: biomass conversion
    coefficients, ``m``: predator adaptation (prey level at which the
    predator holds its own), ``l``: Allee thresholds, ``beta``: prey
    growth-rate multipliers.
    """

    alpha1: float
    alpha2: float
    gamma1: float
    gamma2: float
    m1: float
    m2: float
    l1: float
    l2: float
    beta1: float = 1.0
    beta2: float = 1.0

    def __post_init__(self):
        for name in ("alpha1", "alpha2", "gamma1", "gamma2", "m1", "m2"):
            if getattr(self, name) < 0.0:
                raise ValueError(f"{name} must be >= 0")
        for name in ("l1", "l2"):
            val = getattr(self, name)
            if not 0.0 <= val <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1]")
        for name in ("beta1", "beta2"):
            if getattr(self, name) <= 0.0:
                raise ValueError(f"{name} must be > 0")

    @classmethod
    def symmetric(cls, alpha: float, gamma: float, m: float, l: float) -> "ModelParams":
        """Equal parameters across patches, unit growth rates."""
        return cls(alpha, alpha, gamma, gamma, m, m, l, l, 1.0, 1.0)

    @property
    def is_symmetric(self) -> bool:
        return (
            self.alpha1 == self.alpha2
            and self.gamma1 == self.gamma2
            and self.m1 == self.m2
            and self.l1 == self.l2
            and self.beta1 == 1.0
            and self.beta2 == 1.0
        )

    # Single-letter accessors for the symmetric case.
    @property
    def alpha(self) -> float:
        self._require_symmetric()
        return self.alpha1

    @property
    def gamma(self) -> float:
        self._require_symmetric()
        return self.gamma1

    @property
    def m(self) -> float:
        self._require_symmetric()
        return self.m1

    @property
    def l(self) -> float:
        self._require_symmetric()
        return self.l1

    def _require_symmetric(self):
        if not self.is_symmetric:
            raise ValueError("parameters are not symmetric")

    def as_array(self) -> np.ndarray:
        return np.array(
            [self.alpha1, self.alpha2, self.gamma1, self.gamma2,
             self.m1, self.m2, self.l1, self.l2, self.beta1, self.beta2]
        )

    def replace(self, **kw) -> "ModelParams":
        fields = {k: getattr(self, k) for k in (
            "alpha1", "alpha2", "gamma1", "gamma2", "m1", "m2",
            "l1", "l2", "beta1", "beta2")}
        fields.update(kw)
        return ModelParams(**fields)


def validate_state(sys: SystemId, x) -> np.ndarray:
    """Check shape and pinned coordinates; return the state as an array."""
    x = np.asarray(x, dtype=float)
    if x.shape != (4,):
        raise ValueError(f"state must have shape (4,), got {x.shape}")
    for i in sys.pinned:
        if x[i] != 0.0:
            raise ValueError(
                f"coordinate {i} is pinned to 0 for {sys.name}, got {x[i]!r}")
    return x


def _full_field(x: np.ndarray, p: ModelParams, alpha1: float, alpha2: float) -> np.ndarray:
    u1, v1, u2, v2 = x
    f1 = p.beta1 * allee_growth(u1, p.l1) - u1 * v1 + alpha1 * (u2 - u1)
    g1 = p.gamma1 * v1 * (u1 - p.m1)
    f2 = p.beta2 * allee_growth(u2, p.l2) - u2 * v2 + alpha2 * (u1 - u2)
    g2 = p.gamma2 * v2 * (u2 - p.m2)
    return np.array([f1, g1, f2, g2])


def vector_field(sys: SystemId, x, p: ModelParams) -> np.ndarray:
    """Time derivative of the 4D state under the chosen (sub)system.

    Pinned coordinates must be exactly zero on input and have derivative
    exactly zero on output.  The LOCAL subsystem is the isolated single-patch
    model, so its dispersal term is dropped.
    """
    x = validate_state(sys, x)
    if sys is SystemId.LOCAL:
        dx = _full_field(x, p, 0.0, 0.0)
    else:
        dx = _full_field(x, p, p.alpha1, p.alpha2)
    for i in sys.pinned:
        dx[i] = 0.0
    return dx


def embed(sys: SystemId, reduced) -> np.ndarray:
    """Place reduced subsystem coordinates into the 4D state (pinned -> 0)."""
    reduced = np.asarray(reduced, dtype=float)
    if reduced.shape != (sys.dim,):
        raise ValueError(
            f"{sys.name} expects {sys.dim} coordinates, got {reduced.shape}")
    x = np.zeros(4)
    x[list(sys.active)] = reduced
    return x


def project(sys: SystemId, x) -> np.ndarray:
    """Extract the dynamical coordinates of a 4D state."""
    x = np.asarray(x, dtype=float)
    if x.shape != (4,):
        raise ValueError(f"state must have shape (4,), got {x.shape}")
    return x[list(sys.active)]
