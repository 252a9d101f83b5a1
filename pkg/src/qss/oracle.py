"""Brute-force validators for the fidelity formulas.

The teleportation oracle simulates the Bell-measurement protocol directly
and never looks at singular values; the reconstruction oracle conditions on
the assistant's outcome and searches the axis with a generic optimiser.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize

from . import qmath
from .correlations import (DEGENERATE_PROB, IDENTITY, PAULI4, PAULIS, SIGMA_X, SIGMA_Z,
                           DegenerateOutcomeError, condition_on_assistant)
from .fidelity import fibonacci_sphere, fidelity_from_theta2, tele_fidelity
from .states import check_state, density

BATCH = 1 << 17
ROTATION_STARTS = 4
ROTATION_FTOL = 1e-10
AXIS_GRID = 200
AXIS_STARTS = 2
PATCH_STEP0 = 0.1
PATCH_MIN_STEP = 1e-8

# Bell basis on (input, Alice) and Bob's matching Pauli correction
_BELL = np.array([[1, 0, 0, 1], [0, 1, 1, 0], [0, 1, -1, 0], [1, 0, 0, -1]],
                 dtype=complex) / math.sqrt(2.0)
_CORRECTION = np.array([IDENTITY, SIGMA_X, SIGMA_X @ SIGMA_Z, SIGMA_Z])

# octahedron states form a 2-design, so their average is the exact input average
_OCTAHEDRON = np.array([[1, 0, 0], [-1, 0, 0], [0, 1, 0], [0, -1, 0], [0, 0, 1], [0, 0, -1]],
                       dtype=float)


@dataclass(frozen=True)
class McConfig:
    samples: int = 1_000_000
    seed: int = 0

    def __post_init__(self):
        if self.samples < 1:
            raise ValueError("samples must be at least 1")


def _su2(alpha, beta, gamma) -> np.ndarray:
    """Z-Y-Z Euler rotation."""
    c, s = math.cos(beta / 2), math.sin(beta / 2)
    ep, em = cmath.exp(-0.5j * (alpha + gamma)), cmath.exp(-0.5j * (alpha - gamma))
    return np.array([[ep * c, -em * s], [em.conjugate() * s, ep.conjugate() * c]])


def _protocol_tensor() -> np.ndarray:
    """Linear map rho2 -> protocol maps, tabulated on the matrix-unit basis."""
    tensor = np.empty((4, 4, 4, 4, 4), dtype=complex)
    for m in range(4):
        for i in range(4):
            for j in range(4):
                unit = np.zeros((4, 4), dtype=complex)
                unit[i, j] = 1.0
                # input operator P_m / 2 stands in for the (1, r) basis direction
                joint = np.kron(PAULI4[m] / 2.0, unit).reshape(2, 2, 2, 2, 2, 2)
                for k in range(4):
                    b = _BELL[k].reshape(2, 2)
                    # <beta_k|_{XA} joint |beta_k>_{XA}, leaving Bob
                    out = np.einsum("xa,xabycf,yc->bf", b.conj(), joint, b)
                    c = _CORRECTION[k]
                    out = c @ out @ c.conj().T
                    tensor[k, :, m, i, j] = np.einsum("bf,pfb->p", out, PAULI4)
    return tensor


_TENSOR = _protocol_tensor()


def protocol_maps(rho2) -> np.ndarray:
    """Affine maps from the input Bloch vector to Bob's corrected output.

    Returns ``A`` with shape (4, 4, 4): for Bell outcome k, the Pauli
    components ``Tr(O_k P_p)`` of Bob's unnormalised corrected state are
    ``A[k] @ (1, r)``.
    """
    return np.einsum("kpmij,ij->kpm", _TENSOR, np.asarray(rho2, dtype=complex)).real


def _input_average(maps):
    """Outcome-summed fidelity averaged over the octahedron inputs."""
    x = np.hstack([np.ones((len(_OCTAHEDRON), 1)), _OCTAHEDRON])  # (6, 4)
    comps = np.einsum("kpm,sm->skp", maps, x)
    # <psi|O|psi> = (c0 + r.c) / 2, summed over outcomes
    fid = 0.5 * (comps[..., 0] + np.einsum("skp,sp->sk", comps[..., 1:], _OCTAHEDRON))
    return np.mean(np.sum(fid, axis=1))


def _exact_average(maps) -> float:
    return float(np.real(_input_average(maps)))


# the exact average is linear in the channel state: avg(rho) = sum_ij W_ij rho_ij
_WEIGHTS = np.array([[_input_average(_TENSOR[..., i, j]) for j in range(4)] for i in range(4)])


def average_fidelity(rho2) -> float:
    """Exact input- and outcome-averaged fidelity of the unrotated protocol."""
    return float(np.real(np.sum(_WEIGHTS * np.asarray(rho2, dtype=complex))))


def _rotated(rho2, x):
    u = np.kron(_su2(*x[:3]), _su2(*x[3:]))
    return u @ rho2 @ u.conj().T


def optimize_rotations(rho2, seed: int = 0):
    """Local rotations on both halves maximising the protocol's average fidelity.

    Returns ``(average_fidelity, rotated_state)``.
    """
    rho2 = qmath.check_hermitian(rho2)
    rng = np.random.default_rng(seed)
    starts = [np.zeros(6)] + [rng.uniform(0.0, 2 * math.pi, 6) for _ in range(ROTATION_STARTS - 1)]

    def neg(x):
        return -average_fidelity(_rotated(rho2, x))

    best = None
    for x0 in starts:
        res = minimize(neg, x0, method="Nelder-Mead",
                       options={"xatol": 1e-8, "fatol": ROTATION_FTOL, "maxiter": 20000,
                                "adaptive": True})
        if best is None or res.fun < best.fun:
            best = res
    if best is None or not np.isfinite(best.fun):
        raise qmath.ConvergenceError("rotation search failed")
    return -best.fun, _rotated(rho2, best.x)


def _bloch_uniform(rng, n):
    z = rng.uniform(-1.0, 1.0, n)
    ang = rng.uniform(0.0, 2 * math.pi, n)
    s = np.sqrt(1.0 - z * z)
    return np.column_stack([s * np.cos(ang), s * np.sin(ang), z])


def _mc_batch(maps, rng, n):
    r = _bloch_uniform(rng, n)
    x = np.hstack([np.ones((n, 1)), r])
    comps = np.einsum("kpm,sm->skp", maps, x)  # (n, 4, 4)
    probs = np.clip(comps[..., 0], 0.0, None)
    cum = np.cumsum(probs, axis=1)
    u = rng.random(n) * cum[:, -1]
    k = np.minimum(np.sum(cum <= u[:, None], axis=1), 3)
    c = comps[np.arange(n), k]
    fid = 0.5 * (c[:, 0] + np.sum(c[:, 1:] * r, axis=1)) / c[:, 0]
    return float(np.sum(fid)), float(np.sum(fid * fid))


def mc_teleport_fidelity(rho2, cfg: McConfig = McConfig()) -> tuple[float, float]:
    """Monte Carlo estimate of the best standard-protocol teleportation fidelity.

    Local rotations are optimised first, then random pure inputs are
    teleported with sampled Bell outcomes.  Returns ``(mean, stderr)``.
    """
    _, rotated = optimize_rotations(rho2, cfg.seed)
    maps = protocol_maps(rotated)
    nbatch = -(-cfg.samples // BATCH)
    children = np.random.SeedSequence(cfg.seed).spawn(nbatch)
    total = total_sq = 0.0
    for b, child in enumerate(children):
        n = min(BATCH, cfg.samples - b * BATCH)
        s1, s2 = _mc_batch(maps, np.random.default_rng(child), n)
        total += s1
        total_sq += s2
    mean = total / cfg.samples
    if cfg.samples == 1:
        return mean, 0.0
    var = max(total_sq / cfg.samples - mean * mean, 0.0) * cfg.samples / (cfg.samples - 1)
    return mean, math.sqrt(var / cfg.samples)


# ---------------------------------------------------------------------------
# reconstruction oracle


def csr_conditioned_fidelity(psi, n) -> float:
    """Outcome-weighted teleportation fidelity after the assistant measures along n."""
    rho = density(check_state(psi))
    total = 0.0
    for outcome in (1, -1):
        try:
            p, rho_ac = condition_on_assistant(rho, n, outcome)
        except DegenerateOutcomeError:
            continue
        total += p * tele_fidelity(rho_ac)
    return total


def _conditioned_fidelity_many(psi, axes) -> np.ndarray:
    """:func:`csr_conditioned_fidelity` for a stack of axes at once."""
    r6 = density(psi).reshape(2, 2, 2, 2, 2, 2)
    sigma = np.einsum("nj,jab->nab", axes, PAULIS)
    total = np.zeros(len(axes))
    for outcome in (1, -1):
        proj = 0.5 * (IDENTITY + outcome * sigma)
        unnorm = np.einsum("nbe,aecdbf->nacdf", proj, r6).reshape(-1, 4, 4)
        p = np.trace(unnorm, axis1=1, axis2=2).real
        live = p >= DEGENERATE_PROB
        rho_ac = (unnorm[live] / p[live, None, None]).reshape(-1, 2, 2, 2, 2)
        T = np.einsum("nabcd,ica,jdb->nij", rho_ac, PAULIS, PAULIS).real
        total[live] += p[live] * fidelity_from_theta2(qmath.trace_norm(T))
    return total


def _patch_search(psi, centre, value):
    """Shrinking tangent-plane pattern search around one starting axis."""
    h = PATCH_STEP0
    offsets = np.arange(-3, 4, dtype=float)
    du, dv = (g.ravel() for g in np.meshgrid(offsets, offsets))
    while h > PATCH_MIN_STEP:
        helper = np.array([1.0, 0.0, 0.0]) if abs(centre[0]) < 0.9 else np.array([0.0, 1.0, 0.0])
        e1 = np.cross(centre, helper)
        e1 /= np.linalg.norm(e1)
        e2 = np.cross(centre, e1)
        pts = centre + h * (du[:, None] * e1 + dv[:, None] * e2)
        pts /= np.linalg.norm(pts, axis=1, keepdims=True)
        vals = _conditioned_fidelity_many(psi, pts)
        k = int(np.argmax(vals))
        if vals[k] > value:
            centre, value = pts[k], float(vals[k])
            if max(abs(du[k]), abs(dv[k])) < 3:
                h /= 3.0
        else:
            h /= 3.0
    return value, centre


def csr_oracle_max(psi) -> tuple[float, np.ndarray]:
    """Maximise :func:`csr_conditioned_fidelity` over the whole sphere of axes.

    A coarse sphere grid seeds a pattern search from the best few nodes.
    """
    psi = check_state(psi)
    nodes = fibonacci_sphere(AXIS_GRID)
    vals = _conditioned_fidelity_many(psi, nodes)
    best_v, best_n = -np.inf, None
    for i in np.argsort(vals)[::-1][:AXIS_STARTS]:
        v, n = _patch_search(psi, nodes[i], float(vals[i]))
        if v > best_v:
            best_v, best_n = v, n
    return best_v, best_n
