"""Pauli (Bloch) decompositions of two- and three-qubit states."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import qmath
from .states import AB, AC, BC, ChannelRole  # noqa: F401  (re-exported)

IMAG_TOL = 1e-10
UNIT_TOL = 1e-9
DEGENERATE_PROB = 1e-12

SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)
IDENTITY = np.eye(2, dtype=complex)

# (x, y, z) order
PAULIS = np.array([SIGMA_X, SIGMA_Y, SIGMA_Z])
# identity first, so index 0 is "no operator" on that qubit
PAULI4 = np.array([IDENTITY, SIGMA_X, SIGMA_Y, SIGMA_Z])


class DegenerateOutcomeError(ValueError):
    pass


@dataclass(frozen=True)
class BlochDecomp2:
    r: np.ndarray
    s: np.ndarray
    T: np.ndarray

    def reconstruct(self) -> np.ndarray:
        table = np.zeros((4, 4))
        table[0, 0] = 1.0
        table[1:, 0] = self.r
        table[0, 1:] = self.s
        table[1:, 1:] = self.T
        return np.einsum("mn,mab,ncd->acbd", table, PAULI4, PAULI4).reshape(4, 4) / 4


@dataclass(frozen=True)
class BlochDecomp3:
    a: np.ndarray
    b: np.ndarray
    c: np.ndarray
    Q: np.ndarray
    R: np.ndarray
    S: np.ndarray
    tau: np.ndarray

    def table(self) -> np.ndarray:
        t = np.zeros((4, 4, 4))
        t[0, 0, 0] = 1.0
        t[1:, 0, 0] = self.a
        t[0, 1:, 0] = self.b
        t[0, 0, 1:] = self.c
        t[1:, 1:, 0] = self.Q
        t[1:, 0, 1:] = self.R
        t[0, 1:, 1:] = self.S
        t[1:, 1:, 1:] = self.tau
        return t

    def reconstruct(self) -> np.ndarray:
        rho = np.einsum("mnk,mad,nbe,kcf->abcdef", self.table(),
                        PAULI4, PAULI4, PAULI4)
        return rho.reshape(8, 8) / 8

    @classmethod
    def from_table(cls, t: np.ndarray) -> "BlochDecomp3":
        return cls(a=t[1:, 0, 0].copy(), b=t[0, 1:, 0].copy(), c=t[0, 0, 1:].copy(),
                   Q=t[1:, 1:, 0].copy(), R=t[1:, 0, 1:].copy(),
                   S=t[0, 1:, 1:].copy(), tau=t[1:, 1:, 1:].copy())


def _real_part(x, what):
    resid = float(np.max(np.abs(np.imag(x)))) if np.size(x) else 0.0
    if resid > IMAG_TOL:
        raise qmath.NotHermitianError(
            f"{what}: imaginary residue {resid:.3e} in Pauli expectations")
    return np.real(x).copy()


def _check_density(rho, dim):
    rho = qmath.check_hermitian(rho)
    if rho.shape != (dim, dim):
        raise qmath.DimensionError(f"expected a {dim}x{dim} density matrix, got {rho.shape}")
    return rho


def bloch2(rho) -> BlochDecomp2:
    """Local Bloch vectors and correlation matrix of a two-qubit state."""
    rho = _check_density(rho, 4)
    r4 = rho.reshape(2, 2, 2, 2)
    # table[m, n] = Tr(rho (P_m x P_n))
    table = _real_part(np.einsum("abcd,mca,ndb->mn", r4, PAULI4, PAULI4), "bloch2")
    return BlochDecomp2(r=table[1:, 0], s=table[0, 1:], T=table[1:, 1:])


def pauli_table3(rho) -> np.ndarray:
    rho = _check_density(rho, 8)
    r6 = rho.reshape(2, 2, 2, 2, 2, 2)
    table = np.einsum("abcdef,mda,neb,kfc->mnk", r6, PAULI4, PAULI4, PAULI4)
    return _real_part(table, "bloch3")


def bloch3(rho) -> BlochDecomp3:
    """Full Pauli decomposition of a three-qubit density matrix."""
    return BlochDecomp3.from_table(pauli_table3(rho))


def pure_pauli_tables(psi) -> np.ndarray:
    """Pauli expectation tables for a batch of pure states.

    ``psi`` has shape (N, 8) (or (8,)); returns real (N, 4, 4, 4) with
    ``out[n, m, k, l] = <psi_n| P_m x P_k x P_l |psi_n>``.
    """
    psi = np.asarray(psi, dtype=complex)
    single = psi.ndim == 1
    psi = np.atleast_2d(psi).reshape(-1, 2, 2, 2)
    x = np.einsum("mda,nabc->nmdbc", PAULI4, psi)
    x = np.einsum("keb,nmdbc->nmkdec", PAULI4, x)
    x = np.einsum("lfc,nmkdec->nmkldef", PAULI4, x)
    table = np.einsum("ndef,nmkldef->nmkl", psi.conj(), x)
    table = _real_part(table, "pure_pauli_tables")
    return table[0] if single else table


def contract_assistant(tau, n) -> np.ndarray:
    """Contract the assistant (middle) index of ``tau`` with direction ``n``."""
    n = np.asarray(n, dtype=float)
    if n.shape != (3,) or abs(np.linalg.norm(n) - 1.0) > UNIT_TOL:
        raise ValueError(f"direction must be a unit 3-vector, got {n}")
    return np.einsum("ijk,j->ik", np.asarray(tau, dtype=float), n)


def condition_on_assistant(rho, n, outcome: int):
    """Project the assistant onto the ``outcome`` eigenspace of n.sigma.

    Returns ``(probability, rho_ac)`` with ``rho_ac`` the normalised state of
    the dealer and reconstructor.
    """
    rho = _check_density(rho, 8)
    n = np.asarray(n, dtype=float)
    if n.shape != (3,) or abs(np.linalg.norm(n) - 1.0) > UNIT_TOL:
        raise ValueError(f"direction must be a unit 3-vector, got {n}")
    if outcome not in (1, -1):
        raise ValueError("outcome must be +1 or -1")
    proj = 0.5 * (IDENTITY + outcome * np.einsum("j,jab->ab", n, PAULIS))
    r6 = rho.reshape(2, 2, 2, 2, 2, 2)
    # Tr_B[(I x P x I) rho]
    unnorm = np.einsum("be,aecdbf->acdf", proj, r6).reshape(4, 4)
    p = float(np.trace(unnorm).real)
    if p < DEGENERATE_PROB:
        raise DegenerateOutcomeError(f"outcome {outcome:+d} has probability {p:.3e}")
    return p, unnorm / p
