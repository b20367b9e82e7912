"""Locate the oscillation onset boundaries.

The coexistence state loses stability in two distinct Andronov-Hopf
bifurcations: an in-phase one at m = (l+1)/2 (independent of coupling)
and an anti-phase one at alpha = m(1+l-2m)/2.  Both are supercritical
(first Lyapunov coefficient negative), so stable cycles emerge.  The
script verifies the closed forms numerically and prints the fold/cusp
boundaries of the equilibrium families.
"""

from alleepatch import ModelParams, SystemId, hopf_H1, hopf_H2, locate_hopf
from alleepatch.equilibria import boundary_SB, boundary_SC

l = 0.1

hp1 = locate_hopf(SystemId.FULL,
                  ModelParams.symmetric(alpha=0.1, gamma=1.0, m=0.5, l=l),
                  "m", 0.48, 0.6)
print(f"in-phase Hopf:  located m = {hp1.value:.10f} "
      f"(closed form {hopf_H1(l)}), omega = {hp1.omega:.6f}, "
      f"L1 = {hp1.l1:+.4f} -> {'super' if hp1.supercritical else 'sub'}critical")

hp2 = locate_hopf(SystemId.FULL,
                  ModelParams.symmetric(alpha=0.02, gamma=1.0, m=0.45, l=l),
                  "alpha", 0.02, 0.08)
print(f"anti-phase Hopf: located alpha = {hp2.value:.10f} "
      f"(closed form {hopf_H2(l, 0.45)}), omega = {hp2.omega:.6f}, "
      f"L1 = {hp2.l1:+.4f}")

a1, a2 = boundary_SC(l)
print(f"\nprey-only fold boundaries (asymptotic closed forms): "
      f"alpha1 = {a1:.6f}, alpha2 = {a2:.6f}")

sb = boundary_SB(l, 0.25)
print(f"one-predator fold branches at alpha=0.25: "
      f"m12 = {sb.m12:.6f}, m23 = {sb.m23:.6f}")
print(f"cusp point: alpha = {sb.cusp_alpha:.6f}, m = {sb.cusp_m:.6f}")
