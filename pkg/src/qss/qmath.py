"""Small dense linear algebra for qubit systems.

Everything here works on dimensions 2, 4 and 8 (one to three qubits) and on
real 3x3 correlation matrices.  The 3x3 routines accept arbitrary leading batch
axes so that sweeps can push many matrices through one call.
"""

from __future__ import annotations

import numpy as np

HERM_TOL = 1e-10
EIG_TOL = 1e-11
POS_TOL = 1e-10
TRACE_TOL = 1e-9
JACOBI_OFF_TOL = 1e-13
JACOBI_MAX_SWEEPS = 100
CLAMP_TOL = 1e-12

ALLOWED_DIMS = (2, 4, 8)


class DimensionError(ValueError):
    """Matrix size outside the supported qubit dimensions."""


class NotHermitianError(ValueError):
    pass


class ConvergenceError(ArithmeticError):
    """An iterative routine hit its cap; ``residual`` holds the last error."""

    def __init__(self, message: str, residual: float = float("nan")):
        super().__init__(message)
        self.residual = residual


def _square(m, name="matrix"):
    m = np.asarray(m)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise DimensionError(f"{name} must be square, got shape {m.shape}")
    return m


def check_hermitian(h, tol: float = HERM_TOL) -> np.ndarray:
    h = _square(h)
    dev = np.max(np.abs(h - h.conj().T)) if h.size else 0.0
    if dev > tol:
        raise NotHermitianError(f"matrix is not Hermitian (max deviation {dev:.3e})")
    return h


def kron(a, b) -> np.ndarray:
    """Kronecker product of two qubit operators, capped at three qubits."""
    a = _square(a, "a")
    b = _square(b, "b")
    for m in (a, b):
        if m.shape[0] not in ALLOWED_DIMS:
            raise DimensionError(f"dimension {m.shape[0]} not in {ALLOWED_DIMS}")
    if a.shape[0] * b.shape[0] > 8:
        raise DimensionError(
            f"product dimension {a.shape[0] * b.shape[0]} exceeds 8")
    return np.kron(a, b)


def partial_trace(rho, keep, dims=None) -> np.ndarray:
    """Reduce ``rho`` to the subsystems listed in ``keep``.

    Parameters
    ----------
    rho : (d, d) complex array
        Density matrix with unit trace.
    keep : iterable of int
        Subsystem indices to retain; output ordering follows ascending index.
    dims : list of int, optional
        Local dimensions.  Defaults to qubits.

    Returns
    -------
    (d_keep, d_keep) complex array
    """
    rho = check_hermitian(rho)
    d = rho.shape[0]
    if dims is None:
        n = int(round(np.log2(d)))
        dims = [2] * n
    dims = [int(x) for x in dims]
    if int(np.prod(dims)) != d:
        raise DimensionError(f"dims {dims} do not match matrix size {d}")
    tr = np.trace(rho)
    if abs(tr - 1) > TRACE_TOL:
        raise ValueError(f"trace {tr.real:.12g} differs from 1")
    raw = [int(k) for k in keep]
    keep = sorted(set(raw))
    n = len(dims)
    if not keep or len(keep) != len(raw) or keep[0] < 0 or keep[-1] >= n:
        raise ValueError(f"invalid subsystem set {keep} for {n} subsystems")

    t = rho.reshape(dims + dims)
    # trace out from the highest index down so axis numbers stay valid
    cur = n
    for k in reversed(range(n)):
        if k in keep:
            continue
        t = np.trace(t, axis1=k, axis2=k + cur)
        cur -= 1
    dk = int(np.prod([dims[k] for k in keep]))
    return t.reshape(dk, dk)


def _jacobi_hermitian(a: np.ndarray):
    """Cyclic Jacobi diagonalisation; returns (eigenvalues, eigenvectors)."""
    a = np.array(a, dtype=complex)
    n = a.shape[0]
    v = np.eye(n, dtype=complex)
    scale = max(1.0, np.linalg.norm(a))
    off = 0.0
    for _ in range(JACOBI_MAX_SWEEPS):
        off = np.sqrt(np.sum(np.abs(a - np.diag(np.diag(a))) ** 2))
        if off <= JACOBI_OFF_TOL * scale:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                z = a[p, q]
                r = abs(z)
                if r == 0.0:
                    continue
                app, aqq = a[p, p].real, a[q, q].real
                # phase makes the (p, q) element real, then a real rotation
                ph = z / r
                diff = aqq - app
                t = 2.0 * r / (abs(diff) + np.hypot(diff, 2.0 * r))
                if diff < 0:
                    t = -t
                c = 1.0 / np.sqrt(t * t + 1.0)
                s = t * c
                g = np.array([[c, s], [-s, c]], dtype=complex)
                g[1, :] *= np.conj(ph)
                idx = [p, q]
                a[:, idx] = a[:, idx] @ g
                a[idx, :] = g.conj().T @ a[idx, :]
                v[:, idx] = v[:, idx] @ g
    else:
        raise ConvergenceError(
            f"Jacobi did not converge in {JACOBI_MAX_SWEEPS} sweeps", off)
    return np.diag(a).real.copy(), v


def hermitian_eigenvalues(h) -> np.ndarray:
    """Eigenvalues of a Hermitian matrix in descending order.

    Uses cyclic Jacobi rotations.  Every returned eigenpair is checked for a
    residual below ``EIG_TOL`` (relative to the matrix scale).
    """
    h = check_hermitian(h)
    w, v = _jacobi_hermitian(h)
    scale = max(1.0, np.linalg.norm(h))
    res = np.linalg.norm(h @ v - v * w, axis=0)
    worst = float(np.max(res)) if res.size else 0.0
    if worst > EIG_TOL * scale:
        raise ConvergenceError(f"eigen residual {worst:.3e} too large", worst)
    return np.sort(w)[::-1]


def symmetric_eigenvalues_3x3(m) -> np.ndarray:
    """Batched cyclic Jacobi for real symmetric 3x3 matrices.

    ``m`` has shape (..., 3, 3).  Returns eigenvalues with shape (..., 3) in
    descending order.
    """
    a = np.array(m, dtype=float)
    if a.shape[-2:] != (3, 3):
        raise DimensionError(f"expected (..., 3, 3), got {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError("non-finite matrix entries")
    a = 0.5 * (a + np.swapaxes(a, -1, -2))
    scale = np.maximum(1.0, np.sqrt(np.sum(a * a, axis=(-2, -1))))
    pairs = ((0, 1), (0, 2), (1, 2))
    for _ in range(JACOBI_MAX_SWEEPS):
        off = np.sqrt(2.0 * (a[..., 0, 1] ** 2 + a[..., 0, 2] ** 2
                             + a[..., 1, 2] ** 2))
        if np.all(off <= JACOBI_OFF_TOL * scale):
            break
        for p, q in pairs:
            apq = a[..., p, q]
            nz = apq != 0.0
            diff = a[..., q, q] - a[..., p, p]
            sgn = np.where(diff >= 0, 1.0, -1.0)
            den = np.abs(diff) + np.hypot(diff, 2.0 * apq)
            t = sgn * 2.0 * apq / np.where(nz, den, 1.0)
            c = np.where(nz, 1.0 / np.sqrt(t * t + 1.0), 1.0)
            s = np.where(nz, t * c, 0.0)
            cc, ss = c[..., None], s[..., None]
            colp = a[..., :, p].copy()
            colq = a[..., :, q].copy()
            a[..., :, p] = cc * colp - ss * colq
            a[..., :, q] = ss * colp + cc * colq
            rowp = a[..., p, :].copy()
            rowq = a[..., q, :].copy()
            a[..., p, :] = cc * rowp - ss * rowq
            a[..., q, :] = ss * rowp + cc * rowq
    else:
        raise ConvergenceError("batched Jacobi did not converge", float(np.max(off)))
    w = np.diagonal(a, axis1=-2, axis2=-1)
    return -np.sort(-w, axis=-1)


def singular_values_3x3(m) -> np.ndarray:
    """Singular values of real 3x3 matrices, descending, shape (..., 3).

    Computed as square roots of the spectrum of M^T M.  Tiny negative
    eigenvalues from roundoff (down to ``-CLAMP_TOL``) are clamped to zero.
    """
    m = np.asarray(m, dtype=float)
    if m.shape[-2:] != (3, 3):
        raise DimensionError(f"expected (..., 3, 3), got {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ValueError("non-finite matrix entries")
    mtm = np.swapaxes(m, -1, -2) @ m
    w = symmetric_eigenvalues_3x3(mtm)
    scale = np.maximum(1.0, np.trace(mtm, axis1=-2, axis2=-1))[..., None]
    if np.any(w < -CLAMP_TOL * scale):
        raise ConvergenceError("M^T M has a negative eigenvalue", float(np.min(w)))
    return np.sqrt(np.clip(w, 0.0, None))


def _trace_norm_components(a):
    """Trace norm from the nine entries of a stack of 3x3 matrices.

    ``a`` is a list of 9 equally shaped float arrays in row-major order.
    """
    a00, a01, a02, a10, a11, a12, a20, a21, a22 = a
    c1 = (a00 * a00 + a01 * a01 + a02 * a02 + a10 * a10 + a11 * a11
          + a12 * a12 + a20 * a20 + a21 * a21 + a22 * a22)
    # cofactors of A; their squares sum to c2 (Cauchy-Binet)
    k00 = a11 * a22 - a12 * a21
    k01 = a10 * a22 - a12 * a20
    k02 = a10 * a21 - a11 * a20
    k10 = a01 * a22 - a02 * a21
    k11 = a00 * a22 - a02 * a20
    k12 = a00 * a21 - a01 * a20
    k20 = a01 * a12 - a02 * a11
    k21 = a00 * a12 - a02 * a10
    k22 = a00 * a11 - a01 * a10
    c2 = (k00 * k00 + k01 * k01 + k02 * k02 + k10 * k10 + k11 * k11
          + k12 * k12 + k20 * k20 + k21 * k21 + k22 * k22)
    d = np.abs(a00 * k00 - a01 * k01 + a02 * k02)
    # B = A^T A, largest eigenvalue by the trigonometric formula
    b00 = a00 * a00 + a10 * a10 + a20 * a20
    b11 = a01 * a01 + a11 * a11 + a21 * a21
    b22 = a02 * a02 + a12 * a12 + a22 * a22
    b01 = a00 * a01 + a10 * a11 + a20 * a21
    b02 = a00 * a02 + a10 * a12 + a20 * a22
    b12 = a01 * a02 + a11 * a12 + a21 * a22
    q = c1 / 3.0
    p1 = b01 * b01 + b02 * b02 + b12 * b12
    d0, d1, d2 = b00 - q, b11 - q, b22 - q
    p = np.sqrt((d0 * d0 + d1 * d1 + d2 * d2 + 2.0 * p1) / 6.0)
    flat = p <= 0.0
    ip = 1.0 / np.where(flat, 1.0, p)
    d0, d1, d2 = d0 * ip, d1 * ip, d2 * ip
    e01, e02, e12 = b01 * ip, b02 * ip, b12 * ip
    r = 0.5 * (d0 * (d1 * d2 - e12 * e12) - e01 * (e01 * d2 - e12 * e02)
               + e02 * (e01 * e12 - d1 * e02))
    r = np.clip(r, -1.0, 1.0)
    e1 = np.where(flat, q, q + 2.0 * p * np.cos(np.arccos(r) / 3.0))
    zero = e1 <= 0.0
    e1s = np.where(zero, 1.0, e1)
    s1 = np.sqrt(e1s)
    # s2^2 + s3^2 and 2 s2 s3, the latter clamped since det carries roundoff
    x = np.maximum((c2 - d * d / e1s) / e1s, 0.0)
    s = s1 + np.sqrt(x + np.minimum(2.0 * d / s1, x))
    thresh = 1e-6 * c1 * np.sqrt(c1)
    for _ in range(2):
        u = s * s - c1
        h = u * u - 4.0 * c2 - 8.0 * d * s
        hp = 4.0 * s * u - 8.0 * d
        ok = hp > thresh
        s = np.where(ok, s - h / np.where(ok, hp, 1.0), s)
    return np.where(zero, 0.0, s)


def trace_norm(m) -> np.ndarray | float:
    """Trace norm (sum of singular values) of real 3x3 matrices.

    Works on shape (..., 3, 3) and returns a float for a single matrix.

    The sum s = s1 + s2 + s3 is the largest root of
    ``(s^2 - c1)^2 = 4 c2 + 8 |det M| s`` where c1, c2 are the first two
    elementary symmetric functions of the spectrum of M^T M.  A closed-form
    start from the top eigenvalue is polished with Newton steps, which keeps
    full precision even when the smallest singular values vanish.
    """
    a = np.asarray(m, dtype=float)
    if a.shape[-2:] != (3, 3):
        raise DimensionError(f"expected (..., 3, 3), got {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError("non-finite matrix entries")
    if a.ndim == 2:
        # numpy scalars are far cheaper than 0-d arrays for a single matrix
        return float(_trace_norm_components([np.float64(v) for v in a.ravel()]))
    comps = [a[..., i, j].copy() for i in range(3) for j in range(3)]
    return _trace_norm_components(comps)
