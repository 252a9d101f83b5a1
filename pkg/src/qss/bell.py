"""Bell-CHSH values of the dealer channels."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize

from . import qmath
from .correlations import PAULIS, bloch2
from .fidelity import fibonacci_sphere
from .states import AB, AC, AcinParams, check_state, reduced_pair

CHSH_NODES = 256
CHSH_REFINE_STARTS = 4


@dataclass(frozen=True)
class BellSummary:
    m_ab: float
    m_ac: float
    s_ab: float
    s_ac: float
    s_max: float


def m_from_correlation(T) -> np.ndarray | float:
    """Sum of the two largest eigenvalues of T^T T (batched over leading axes)."""
    T = np.asarray(T, dtype=float)
    w = qmath.symmetric_eigenvalues_3x3(np.swapaxes(T, -1, -2) @ T)
    m = w[..., 0] + w[..., 1]
    return float(m) if np.ndim(m) == 0 else m


def m_value(rho2) -> float:
    return float(m_from_correlation(bloch2(rho2).T))


def s_from_m(m):
    return 2.0 * np.sqrt(np.maximum(m, 0.0))


def s_value(rho2) -> float:
    return float(s_from_m(m_value(rho2)))


def summarize(psi) -> BellSummary:
    psi = check_state(psi)
    m_ab = m_value(reduced_pair(psi, AB))
    m_ac = m_value(reduced_pair(psi, AC))
    s_ab, s_ac = float(s_from_m(m_ab)), float(s_from_m(m_ac))
    return BellSummary(m_ab, m_ac, s_ab, s_ac, max(s_ab, s_ac))


def s_max(psi) -> float:
    return summarize(psi).s_max


# ---------------------------------------------------------------------------
# closed forms on the real slice


def _real_slice(p: AcinParams):
    if p.phi != 0.0:
        raise ValueError("closed forms hold only for phi = 0")
    return p.lambdas


def closed_m_ghzr(p: AcinParams) -> float:
    l0, l1, l2, l3, l4 = _real_slice(p)
    return 1.0 - 4.0 * (l1 * l4 + l2 * l3) ** 2 + 4.0 * l0**2 * abs(l2**2 - l3**2)


def closed_eigenvalues_ghzr(p: AcinParams) -> tuple[list[float], list[float]]:
    """Published spectra of R^T R (dealer-reconstructor) and Q^T Q (dealer-assistant)."""
    l0, l1, l2, l3, l4 = _real_slice(p)
    rr = [4 * l0**2 * l2**2,
          4 * l0**2 * l2**2 + 4 * (l1 * l2 + l3 * l4) ** 2,
          4 * l0**2 * l2**2 + 4 * l0**2 * (l4**2 - l3**2)
          + (l0**2 + l1**2 + l3**2 - l2**2 - l4**2) ** 2]
    qq = [4 * l0**2 * l3**2,
          4 * l0**2 * l3**2 + 4 * (l1 * l3 + l2 * l4) ** 2,
          4 * l0**2 * l3**2 + 4 * l0**2 * (l4**2 - l2**2)
          + (l0**2 + l1**2 + l2**2 - l3**2 - l4**2) ** 2]
    return rr, qq


# ---------------------------------------------------------------------------
# direct CHSH optimisation


def chsh_value(rho2, a, a2, b, b2) -> float:
    """E(a,b) + E(a',b) + E(a,b') - E(a',b') evaluated on the density matrix."""
    rho2 = np.asarray(rho2, dtype=complex)

    def corr(x, y):
        op = np.kron(np.einsum("i,iab->ab", x, PAULIS), np.einsum("i,iab->ab", y, PAULIS))
        return float(np.trace(rho2 @ op).real)

    return corr(a, b) + corr(a2, b) + corr(a, b2) - corr(a2, b2)


def _unit(theta, phi):
    return np.array([math.sin(theta) * math.cos(phi),
                     math.sin(theta) * math.sin(phi), math.cos(theta)])


def _angles(v):
    return math.acos(max(-1.0, min(1.0, v[2]))), math.atan2(v[1], v[0])


def chsh_optimize(rho2):
    """Maximise the CHSH expression over four measurement directions.

    For fixed Alice settings a, a' the Bob side is solved exactly:
    b and b' point along T^T(a + a') and T^T(a - a').  The Alice pair is
    grid-scanned and then refined.

    Returns
    -------
    s : float
    settings : tuple of four unit 3-vectors (a, a', b, b')
    """
    T = bloch2(rho2).T
    nodes = fibonacci_sphere(CHSH_NODES)
    u = nodes @ T  # rows are T^T a
    plus = np.linalg.norm(u[:, None, :] + u[None, :, :], axis=2)
    minus = np.linalg.norm(u[:, None, :] - u[None, :, :], axis=2)
    grid = plus + minus
    order = np.argsort(grid, axis=None)[::-1][:CHSH_REFINE_STARTS]

    def neg(x):
        a, a2 = _unit(x[0], x[1]), _unit(x[2], x[3])
        return -(np.linalg.norm(T.T @ (a + a2)) + np.linalg.norm(T.T @ (a - a2)))

    best_x, best_v = None, -np.inf
    for flat in order:
        i, j = np.unravel_index(flat, grid.shape)
        x0 = np.array(_angles(nodes[i]) + _angles(nodes[j]))
        res = minimize(neg, x0, method="Nelder-Mead",
                       options={"xatol": 1e-10, "fatol": 1e-13, "maxiter": 20000})
        if -res.fun > best_v:
            best_v, best_x = -res.fun, res.x
    if best_x is None or not np.isfinite(best_v):
        raise qmath.ConvergenceError("CHSH optimisation failed")
    a, a2 = _unit(best_x[0], best_x[1]), _unit(best_x[2], best_x[3])
    settings = [a, a2]
    for v in (T.T @ (a + a2), T.T @ (a - a2)):
        nv = np.linalg.norm(v)
        settings.append(v / nv if nv > 0 else np.array([0.0, 0.0, 1.0]))
    s = chsh_value(rho2, *settings)
    return abs(s), tuple(settings)
