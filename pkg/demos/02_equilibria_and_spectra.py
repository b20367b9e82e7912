"""Enumerate all equilibrium families and their stability.

For small coupling there are sixteen steady states: the extinction
states on the diagonal (O, Ol, O11), the coexistence state AA, six
predator-free pairs (C family), and three mirror pairs with exactly one
predator present (B family).  Each is printed with its eigenvalues and
a stability tag.
"""

import numpy as np

from alleepatch import ModelParams, all_equilibria, eigen_quartic
from alleepatch.spectral import classify, jacobian

p = ModelParams.symmetric(alpha=0.001, gamma=1.0, m=0.45, l=0.1)

print(f"alpha={p.alpha}, m={p.m}, l={p.l}\n")
print(f"{'family':>6}  {'state':<44} {'stability':<14} max Re")
for rec in all_equilibria(p):
    spec = eigen_quartic(jacobian(rec.location, p))
    tag = classify(spec).tag
    loc = np.array2string(rec.location, precision=4, suppress_small=True)
    print(f"{rec.family:>6}  {loc:<44} {tag:<14} {spec.max_real:+.4f}")

stable = [r.family for r in all_equilibria(p)
          if classify(eigen_quartic(jacobian(r.location, p))).tag
          in ("stable_node", "stable_focus")]
print(f"\nattracting equilibria at these parameters: {stable}")
