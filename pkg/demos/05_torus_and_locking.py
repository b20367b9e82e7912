"""Torus dynamics and mode locking of the anti-phase cycle.

Past alpha ~ .0223 (at m = .45) the anti-phase cycle sheds an invariant
torus.  Depending on parameters the motion on the torus is quasiperiodic
(irrational rotation number, section points fill a closed curve) or
locks onto a periodic orbit of finite multiplicity k.  This script shows
a genuine torus at (alpha, m) = (.027, .315) and mode-locked states at
m = .325.
"""

import numpy as np

from alleepatch import ModelParams, SystemId, classify_ic

l = 0.1

print("quasiperiodic torus:")
m = 0.315
p = ModelParams.symmetric(alpha=0.027, gamma=1.0, m=m, l=l)
vstar = (m - l) * (1 - m)
seed = np.array([m + 0.01, vstar, m - 0.01, vstar])
r = classify_ic(SystemId.FULL, seed, p, budget=60000)
print(f"  (alpha={p.alpha}, m={m}): {r.kind}, rotation number "
      f"{r.rotation:.6f}, largest Lyapunov exponent {r.lle:+.2e}")

print("\nmode-locked states on the torus branch:")
m = 0.325
for alpha in (0.0332, 0.0333):
    p = ModelParams.symmetric(alpha=alpha, gamma=1.0, m=m, l=l)
    vstar = (m - l) * (1 - m)
    seed = np.array([m + 0.01, vstar, m - 0.01, vstar])
    r = classify_ic(SystemId.FULL, seed, p, budget=60000)
    print(f"  (alpha={alpha}, m={m}): {r.kind} with multiplicity k={r.k}, "
          f"rotation number {r.rotation:.6f}")

print("\nThe rotation number shifts between rational windows as alpha "
      "changes,\nso the locked multiplicity changes.")
