"""Coarse parameter portrait over (alpha, m).

Each grid cell is classified from a fixed seed set and assigned a domain
label:

  I   stable coexistence equilibrium
  II  symmetric in-phase cycle only
  III only trivial attractors (extinction / prey-only)
  IV  in-phase and anti-phase 4D cycles coexist
  V   anti-phase family continues as cycle/torus/chaos without the
      coexisting pair structure

Writes the labeled grid as CSV rows and an SVG heat map.
"""

import time
from pathlib import Path

import numpy as np

from alleepatch import portrait_sweep
from alleepatch.cli import write_heatmap_svg

OUT = Path(__file__).parent / "out"
OUT.mkdir(exist_ok=True)

alphas = np.linspace(0.0, 0.05, 8)
ms = np.linspace(0.3, 0.6, 8)

t0 = time.time()
cells = portrait_sweep(alphas, ms, jobs=4)
print(f"classified {len(cells)} cells in {time.time() - t0:.1f} s\n")

lookup = {(c.alpha, c.m): c.label for c in cells}
print("m \\ alpha " + " ".join(f"{a:8.4f}" for a in alphas))
for m in ms[::-1]:
    row = " ".join(f"{lookup[(a, m)]:>8}" for a in alphas)
    print(f"{m:9.4f} {row}")

labels = [[lookup[(a, m)] for a in alphas] for m in ms]
write_heatmap_svg(OUT / "portrait.svg", alphas, ms, labels,
                  "domain labels over (alpha, m)")
print(f"\nwrote {OUT / 'portrait.svg'}")
