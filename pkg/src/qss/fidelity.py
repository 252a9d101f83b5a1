"""Teleportation and controlled-reconstruction fidelities.

The reconstruction score of a three-qubit state is

    theta3 = max_n ( ||R + T(n)||_1 + ||R - T(n)||_1 ) / 2

where R is the dealer/reconstructor correlation matrix and T(n) the
three-body tensor contracted with the assistant's measurement axis n.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import qmath
from .correlations import bloch2, bloch3, pure_pauli_tables
from .states import AB, AC, AcinParams, MsrParams, check_state, reduced_pair

SCAN_NODES = 512
GOLDEN_ITERS = 40
OBJ_TOL = 1e-9
POLISH_TOL = 1e-13
MAX_SWEEPS = 200
STEP0 = 0.3
CHUNK = 500
TIE_TOL = 1e-12

_INVPHI = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class FidelitySummary:
    theta2_ab: float
    theta2_ac: float
    f_ab: float
    f_ac: float
    f_max: float
    theta3: float
    f_csr: float
    best_axis: np.ndarray
    tie_ab_ac: bool = False


def fidelity_from_theta2(theta2):
    return 0.5 * (1.0 + theta2 / 3.0)


def fidelity_from_theta3(theta3):
    return 0.5 + theta3 / 6.0


def theta2(rho2) -> float:
    """Trace norm of the correlation matrix of a two-qubit state."""
    return float(qmath.trace_norm(bloch2(rho2).T))


def tele_fidelity(rho2) -> float:
    return float(fidelity_from_theta2(theta2(rho2)))


# ---------------------------------------------------------------------------
# assistant-axis optimisation


def fibonacci_sphere(n: int) -> np.ndarray:
    k = np.arange(n) + 0.5
    z = 1.0 - 2.0 * k / n
    rho = np.sqrt(1.0 - z * z)
    ang = math.pi * (1.0 + math.sqrt(5.0)) * k
    return np.stack([rho * np.cos(ang), rho * np.sin(ang), z], axis=1)


_NODES = fibonacci_sphere(SCAN_NODES)
# the objective is even in n, so only one node of each near-antipodal pair
# needs evaluating; the upper half of a Fibonacci sphere covers the rest
_HALF_NODES = _NODES[_NODES[:, 2] >= 0.0]


def csr_objective(R, tau, n) -> np.ndarray:
    """(||R + T(n)|| + ||R - T(n)||) / 2 for stacked states and axes.

    Shapes broadcast as R (..., 3, 3), tau (..., 3, 3, 3), n (..., 3).
    """
    R = np.asarray(R, dtype=float)
    T = np.einsum("...ijk,...j->...ik", tau, n)
    return 0.5 * (qmath.trace_norm(R + T) + qmath.trace_norm(R - T))


def _tangent_basis(c):
    # any unit vector orthogonal to each row of c
    helper = np.where(np.abs(c[:, :1]) < 0.9, np.array([[1.0, 0.0, 0.0]]),
                      np.array([[0.0, 1.0, 0.0]]))
    e1 = np.cross(c, helper)
    e1 /= np.linalg.norm(e1, axis=1, keepdims=True)
    e2 = np.cross(c, e1)
    return e1, e2


def _golden(R, tau, c, e, f_c, step):
    """Golden-section maximisation along great circles c cos t + e sin t.

    Returns the improved centre, its objective value and the accepted move.
    The centre is kept wherever the bracket search fails to beat it.
    """
    m = len(c)
    lo = np.full(m, -step)
    hi = np.full(m, step)

    def value(t):
        pts = c * np.cos(t)[:, None] + e * np.sin(t)[:, None]
        return csr_objective(R, tau, pts)

    x1 = hi - _INVPHI * (hi - lo)
    x2 = lo + _INVPHI * (hi - lo)
    f1, f2 = value(x1), value(x2)
    for _ in range(GOLDEN_ITERS):
        right = f2 > f1
        # right: keep [x1, hi], old x2 becomes new x1
        lo = np.where(right, x1, lo)
        hi = np.where(right, hi, x2)
        keep_t = np.where(right, x2, x1)
        keep_f = np.where(right, f2, f1)
        new_t = np.where(right, lo + _INVPHI * (hi - lo), hi - _INVPHI * (hi - lo))
        new_f = value(new_t)
        x1 = np.where(right, keep_t, new_t)
        f1 = np.where(right, keep_f, new_f)
        x2 = np.where(right, new_t, keep_t)
        f2 = np.where(right, new_f, keep_f)
    best_t = np.where(f1 >= f2, x1, x2)
    best_f = np.maximum(f1, f2)
    better = best_f > f_c
    t = np.where(better, best_t, 0.0)
    new_c = c * np.cos(t)[:, None] + e * np.sin(t)[:, None]
    new_c /= np.linalg.norm(new_c, axis=1, keepdims=True)
    return new_c, np.where(better, best_f, f_c), np.abs(t)


def _maximize_chunk(R, tau):
    vals = csr_objective(R[:, None], tau[:, None], _HALF_NODES[None, :, :])
    best = np.argmax(vals, axis=1)
    c = _HALF_NODES[best].copy()
    f = vals[np.arange(len(R)), best]
    step = np.full(len(R), STEP0)
    active = np.ones(len(R), dtype=bool)
    last_gain = np.full(len(R), np.inf)
    for _ in range(MAX_SWEEPS):
        idx = np.nonzero(active)[0]
        if idx.size == 0:
            break
        Ri, Ti, ci, fi, si = R[idx], tau[idx], c[idx], f[idx], step[idx]
        f_start = fi.copy()
        e1, e2 = _tangent_basis(ci)
        moved = np.zeros(idx.size)
        for k in range(2):
            e = e1 if k == 0 else e2
            # move frame with the centre: the second direction is rebuilt
            # orthogonal to the updated centre
            if k == 1:
                e = e - np.sum(e * ci, axis=1, keepdims=True) * ci
                e /= np.linalg.norm(e, axis=1, keepdims=True)
            ci, fi, mv = _golden(Ri, Ti, ci, e, fi, si)
            moved = np.maximum(moved, mv)
        gain = fi - f_start
        c[idx], f[idx] = ci, fi
        last_gain[idx] = gain
        # shrink the bracket when the optimum sits well inside it
        step[idx] = np.where(moved < 0.5 * si, np.maximum(4.0 * moved, 1e-6),
                             np.minimum(2.0 * si, STEP0))
        active[idx] = gain > POLISH_TOL
    stuck = last_gain > OBJ_TOL
    if np.any(stuck):
        raise qmath.ConvergenceError(
            f"axis search did not converge for {int(stuck.sum())} state(s)",
            float(np.max(last_gain)))
    return f, c


def maximize_axis(R, tau):
    """Maximise the reconstruction objective over the assistant axis.

    Parameters
    ----------
    R : (N, 3, 3) or (3, 3) array
    tau : (N, 3, 3, 3) or (3, 3, 3) array

    Returns
    -------
    values : (N,) array, axes : (N, 3) array  (scalars/1-d for single input)
    """
    R = np.asarray(R, dtype=float)
    tau = np.asarray(tau, dtype=float)
    single = R.ndim == 2
    R = R.reshape(-1, 3, 3)
    tau = tau.reshape(-1, 3, 3, 3)
    vals = np.empty(len(R))
    axes = np.empty((len(R), 3))
    trivial = (np.max(np.abs(R), axis=(1, 2)) == 0) & (np.max(np.abs(tau), axis=(1, 2, 3)) == 0)
    vals[trivial] = 0.0
    axes[trivial] = (0.0, 0.0, 1.0)
    work = np.nonzero(~trivial)[0]
    for start in range(0, work.size, CHUNK):
        sl = work[start:start + CHUNK]
        vals[sl], axes[sl] = _maximize_chunk(R[sl], tau[sl])
    if single:
        return float(vals[0]), axes[0]
    return vals, axes


def _three_qubit_parts(state):
    state = np.asarray(state)
    if state.shape == (8,):
        table = pure_pauli_tables(check_state(state))
        return table[1:, 0, 1:], table[1:, 1:, 1:]
    d = bloch3(state)
    return d.R, d.tau


def theta3(state):
    """Reconstruction score and the maximising assistant axis.

    ``state`` is either 8 amplitudes or an 8x8 density matrix.
    """
    R, tau = _three_qubit_parts(state)
    return maximize_axis(R, tau)


def csr_fidelity(state) -> float:
    value, _ = theta3(state)
    return float(fidelity_from_theta3(value))


def summarize(psi) -> FidelitySummary:
    psi = check_state(psi)
    t_ab = theta2(reduced_pair(psi, AB))
    t_ac = theta2(reduced_pair(psi, AC))
    t3, axis = theta3(psi)
    f_ab, f_ac = fidelity_from_theta2(t_ab), fidelity_from_theta2(t_ac)
    return FidelitySummary(
        theta2_ab=t_ab, theta2_ac=t_ac, f_ab=f_ab, f_ac=f_ac,
        f_max=max(f_ab, f_ac), theta3=t3, f_csr=fidelity_from_theta3(t3),
        best_axis=axis, tie_ab_ac=abs(t_ab - t_ac) <= TIE_TOL)


# ---------------------------------------------------------------------------
# closed forms on the real (phi = 0) slice


def _real_slice(p: AcinParams):
    if p.phi != 0.0:
        raise ValueError("closed forms hold only for phi = 0")
    return p.lambdas


def closed_theta3_ghzr(p: AcinParams) -> float:
    l0, l1, l2, l3, l4 = _real_slice(p)
    return 4.0 * l0 * max(l2, l4) + 1.0


def closed_norm_r(p: AcinParams) -> float:
    l0, l1, l2, l3, l4 = _real_slice(p)
    return (2 * l0 * l2 + 2 * math.sqrt(l0**2 * l2**2 + (l1 * l2 + l3 * l4) ** 2)
            + math.sqrt(4 * l0**2 * l1**2 + (l0**2 - l1**2 + l4**2 + l2**2 - l3**2) ** 2))


def closed_norm_q(p: AcinParams) -> float:
    l0, l1, l2, l3, l4 = _real_slice(p)
    return (2 * l0 * l3 + 2 * math.sqrt(l0**2 * l3**2 + (l1 * l3 + l2 * l4) ** 2)
            + math.sqrt(4 * l0**2 * l1**2 + (l0**2 - l1**2 + l4**2 + l3**2 - l2**2) ** 2))


def closed_theta2_ghzr(p: AcinParams) -> float:
    return max(closed_norm_r(p), closed_norm_q(p))


def simplified_theta2_ghzr(p: AcinParams) -> float:
    """Case-split rewrite of the dominant channel norm, transcribed as published.

    Only defined off the tie l2 == l3.  It does not agree with
    :func:`closed_theta2_ghzr` in general; kept for comparison.
    """
    l0, l1, l2, l3, l4 = _real_slice(p)
    if l2 > l3:
        return (2 * l0 * l2 + 2 * math.sqrt(2 * l0**2 * l2**2 + (l1 * l2 + l3 * l4))
                + math.sqrt(4 * l0**2 * l4**2 + 4 * l0**2 * (l2**2 - l3**2)
                            + (l2**2 + l4**2 - l0**2 - l1**2 - l3**2) ** 2))
    if l3 > l2:
        return (2 * l0 * l2 + 2 * math.sqrt(2 * l0**2 * l2**2 + (l1 * l2 + l3 * l4))
                + math.sqrt(4 * l0**2 * l4**2 + 4 * l0**2 * (l3**2 - l2**2)
                            + (l0**2 + l1**2 + l2**2 - l3**2 - l4**2) ** 2))
    raise ValueError("simplified form is undefined at l2 == l3")


def msr_closed_forms(theta: float) -> tuple[float, float]:
    """(theta2, theta3) along the maximal-reconstruction family."""
    MsrParams(theta)
    c = math.cos(theta)
    return c, 2.0 * c + 1.0
