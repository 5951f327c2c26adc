"""
Locating the transitions with a theta sweep
===========================================

Repeating the degeneracy campaign on a grid of angles against one shared
reference state makes ``d`` a function of theta. Inside a phase the two
groundstates do not change with theta, so ``d`` is flat; it jumps where
the groundstates change. A coarse grid is enough to bracket all four
first-order transitions at theta = 0, pi/2, pi and 3 pi/2.
"""

import math

from bondising.cli import SweepConfig, cmd_sweep

config = SweepConfig(theta_steps=16, n_trials=6)
result = cmd_sweep(config)

print(" theta     reps")
for theta, report in zip(result.thetas, result.reports):
    if report is None:
        print(f"{theta:6.3f}    (phase boundary, skipped)")
        continue
    reps = "  ".join(f"{d:.6f}" for d in report.representatives)
    print(f"{theta:6.3f}    {reps}")

print(f"\n{len(result.discontinuities)} discontinuities:")
for lo, hi, _, _ in result.discontinuities:
    print(f"  between {lo:.4f} and {hi:.4f}  (width {hi - lo:.4f})")
print("expected near", [round(x, 4) for x in (math.pi / 2, math.pi, 3 * math.pi / 2, 2 * math.pi)])
