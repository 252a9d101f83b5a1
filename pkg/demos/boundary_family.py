"""Walk along the one-parameter family that saturates the fidelity bound.

Prints the numeric channel and reconstruction quantities next to their
closed forms, then shows how a small admixture of the middle coefficients
pushes a state strictly inside the bound.
"""

import math

import numpy as np

from qss import analysis, states
from qss.fidelity import msr_closed_forms


def row(label, rec):
    f, b = rec.fidelity, rec.bell
    t2 = max(f.theta2_ab, f.theta2_ac)
    print(f"{label:>14}  theta2={t2:.6f}  theta3={f.theta3:.6f}  F_max={f.f_max:.6f}  "
          f"F_CSR={f.f_csr:.6f}  S_max={b.s_max:.6f}  slack={rec.slacks['thm1']}")


def main():
    print("GHZ")
    row("ghz", analysis.analyze(states.ghz()))

    print("\nboundary family: numeric vs closed form")
    for deg in (0, 15, 30, 45, 60, 75, 89):
        theta = math.radians(deg)
        rec = analysis.analyze(states.from_msr(theta))
        t2, t3 = msr_closed_forms(theta)
        err = max(abs(max(rec.fidelity.theta2_ab, rec.fidelity.theta2_ac) - t2),
                  abs(rec.fidelity.theta3 - t3))
        print(f"  {deg:2d} deg  theta2={t2:.6f}  theta3={t3:.6f}  |numeric - closed|={err:.1e}")

    print("\nmoving off the family at theta = pi/4")
    base = np.array(states.msr_params(math.pi / 4).lambdas)
    for eps in (0.0, 0.01, 0.05, 0.1, 0.2):
        lam = base + eps * np.array([0, 0, 1, 0.5, 0])
        p = states.AcinParams.from_lambdas(lam / np.linalg.norm(lam))
        row(f"eps={eps}", analysis.analyze(states.from_acin(p), p))


if __name__ == "__main__":
    main()
