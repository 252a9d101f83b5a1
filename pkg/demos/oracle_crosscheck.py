"""Compare the formulas against protocol-level simulations.

Teleportation: a Monte Carlo run of the standard protocol, with local
rotations optimised, against the trace-norm fidelity.  When det T > 0 the
protocol falls short by sigma_3 / 3.

Reconstruction: the best conditioned fidelity over assistant axes against
the closed expression in terms of theta3.
"""

import numpy as np

from qss import oracle, states
from qss.correlations import bloch2
from qss.fidelity import csr_fidelity, tele_fidelity


def main(n=8, seed=3):
    rng = np.random.default_rng(seed)
    print("teleportation (2e5 samples)")
    for i in range(n):
        v = rng.normal(size=8) + 1j * rng.normal(size=8)
        psi = v / np.linalg.norm(v)
        rho = states.reduced_pair(psi, states.AB)
        T = bloch2(rho).T
        mean, se = oracle.mc_teleport_fidelity(rho, oracle.McConfig(200_000, seed=i))
        sig = np.linalg.svd(T, compute_uv=False)
        print(f"  det T={np.linalg.det(T):+.4f}  MC={mean:.5f}+-{se:.5f}  "
              f"trace norm={tele_fidelity(rho):.5f}  s1+s2-s3 form={0.5 + (sig[0] + sig[1] - sig[2]) / 6:.5f}")

    print("\nreconstruction")
    for _ in range(n):
        v = rng.normal(size=8) + 1j * rng.normal(size=8)
        psi = v / np.linalg.norm(v)
        found, axis = oracle.csr_oracle_max(psi)
        print(f"  oracle={found:.10f}  formula={csr_fidelity(psi):.10f}  axis={np.round(axis, 3)}")


if __name__ == "__main__":
    main()
