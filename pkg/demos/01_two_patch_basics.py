"""Simulate the two-patch model and look at one trajectory.

Two prey-predator patches are coupled by prey dispersal at rate alpha.
Prey growth has a strong Allee effect: below the threshold l the prey
declines even without predation.  This script integrates one trajectory
onto the symmetric coexistence cycle and writes a phase-plane SVG.
"""

from pathlib import Path

import numpy as np

from alleepatch import ModelParams, SystemId, integrate
from alleepatch.cli import write_curve_svg

OUT = Path(__file__).parent / "out"
OUT.mkdir(exist_ok=True)

p = ModelParams.symmetric(alpha=0.1, gamma=1.0, m=0.5, l=0.1)
x0 = [0.9, 0.2, 0.05, 0.05]

traj = integrate(SystemId.FULL, x0, p, 400.0,
                 t_eval=np.linspace(0.0, 400.0, 8001))
print(f"integrated to t=400: {traj.n_accepted} accepted steps, "
      f"{traj.n_rejected} rejected")
print(f"final state: {np.round(traj.states[-1], 6)}")

u1 = traj.states[:, 0]
v1 = traj.states[:, 1]
print(f"prey range   [{u1.min():.4f}, {u1.max():.4f}]")
print(f"predator range [{v1.min():.4f}, {v1.max():.4f}]")

write_curve_svg(OUT / "patch1_phase.svg", u1, v1, "patch 1: prey vs predator")
print(f"wrote {OUT / 'patch1_phase.svg'}")
