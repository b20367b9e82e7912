"""Two-patch predator-prey dynamics with prey dispersal and an Allee effect.

Library layout:

* :mod:`alleepatch.model` -- parameters, states, vector fields, subsystems.
* :mod:`alleepatch.equilibria` -- equilibrium families, asymptotics, fold
  and cusp boundaries.
* :mod:`alleepatch.spectral` -- Jacobians, closed-form and numeric spectra,
  stability classes.
* :mod:`alleepatch.bifurcation` -- Hopf surfaces, crossing location, first
  Lyapunov coefficient.
* :mod:`alleepatch.flow` -- integration, Poincare sections, limit cycles,
  Lyapunov exponents.
* :mod:`alleepatch.classify` -- attractor classification, basin probing,
  parameter portraits.
* :mod:`alleepatch.cli` -- command-line front end and CSV/SVG output.
"""

from .model import ModelParams, SystemId, allee_growth, vector_field, embed, project
from .equilibria import (
    EquilibriumRecord,
    symmetric_equilibria,
    solve_C,
    solve_B,
    all_equilibria,
    boundary_SC,
    boundary_SB,
)
from .spectral import (Spectrum, StabilityClass, jacobian, eigen_quartic,
                       eigen_symmetric, classify as classify_spectrum)
from .bifurcation import HopfPoint, hopf_H1, hopf_H2, hopf_3d, locate_hopf, lyapunov_first
from .flow import (
    Trajectory,
    Section,
    SectionCrossings,
    CycleRecord,
    integrate,
    find_cycle,
    poincare,
    rotation_number,
    lyapunov_max,
    detect_period_multiplicity,
)
from .classify import AttractorReport, PortraitCell, classify_ic, portrait_sweep

__version__ = "0.1.0"
