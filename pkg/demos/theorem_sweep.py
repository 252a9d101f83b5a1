"""Random sweep of canonical states and a targeted look near the boundary.

Uniform samples never come close to the saturating family, so the second
half scatters states around it to watch the slack shrink with distance.

    python demos/theorem_sweep.py [n] [seed]
"""

import sys

from qss import analysis


def main(n=20_000, seed=7):
    table = analysis.sweep_table(n, seed, include_phase=True)
    rep = analysis.theorem_report(table)
    print(f"{n} states, seed {seed}")
    for name in analysis.THEOREMS:
        print(f"  {name:12s} premise hits {rep.premise_hits[name]:6d}  "
              f"min slack {rep.min_slack[name]:.4g}  violations {rep.violation_counts()[name]}")

    near = analysis.sweep_near_msr(5000, seed)
    print("\nnear the saturating family (distance bins)")
    for lo, hi, count, smin in analysis.boundary_approach(near):
        shown = f"{smin:.3e}" if count else "-"
        print(f"  [{lo:g}, {hi:g})  n={count:5d}  min slack {shown}")


if __name__ == "__main__":
    args = [int(a) for a in sys.argv[1:3]]
    main(*args)
