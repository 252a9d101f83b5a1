import numpy as np
import pytest
from hypothesis import given, strategies as st
from hypothesis.extra.numpy import arrays

from qss import qmath
from qss.correlations import SIGMA_X, SIGMA_Z
from randstates import ginibre_mixed, haar_pure

I2 = np.eye(2)

finite = st.floats(-1.0, 1.0, allow_nan=False, allow_infinity=False)
real3 = arrays(np.float64, (3, 3), elements=finite)


def random_rotation(rng):
    q, r = np.linalg.qr(rng.normal(size=(3, 3)))
    q = q * np.sign(np.diag(r))
    if np.linalg.det(q) < 0:
        q[:, 0] *= -1
    return q


def random_unitary(rng, n):
    z = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))


class TestKron:
    def test_identities(self):
        assert np.array_equal(qmath.kron(I2, I2), np.eye(4))

    def test_zz(self):
        assert np.array_equal(qmath.kron(SIGMA_Z, SIGMA_Z), np.diag([1, -1, -1, 1]))

    def test_x_identity_blocks(self):
        k = qmath.kron(SIGMA_X, I2)
        assert np.array_equal(k[:2, 2:], np.eye(2))
        assert np.array_equal(k[2:, :2], np.eye(2))
        assert np.all(k[:2, :2] == 0)

    def test_too_large(self):
        with pytest.raises(qmath.DimensionError):
            qmath.kron(np.eye(4), np.eye(4))

    def test_bad_dim(self):
        with pytest.raises(qmath.DimensionError):
            qmath.kron(np.eye(3), I2)


class TestPartialTrace:
    def test_bell_marginal(self):
        v = np.array([1, 0, 0, 1]) / np.sqrt(2)
        out = qmath.partial_trace(np.outer(v, v), [0])
        assert np.allclose(out, I2 / 2, atol=1e-15)

    def test_product(self):
        rho = np.zeros((8, 8))
        rho[0, 0] = 1
        out = qmath.partial_trace(rho, [0, 2])
        expected = np.zeros((4, 4))
        expected[0, 0] = 1
        assert np.allclose(out, expected)

    def test_ghz_dealer_reconstructor(self):
        v = np.zeros(8)
        v[0] = v[7] = 1 / np.sqrt(2)
        out = qmath.partial_trace(np.outer(v, v), [0, 2])
        assert np.allclose(out, np.diag([0.5, 0, 0, 0.5]), atol=1e-15)

    def test_matches_brute_force_loop(self, rng):
        rho = ginibre_mixed(rng, 8)
        brute = np.zeros((4, 4), dtype=complex)
        for a in range(2):
            for c in range(2):
                for a2 in range(2):
                    for c2 in range(2):
                        brute[2 * a + c, 2 * a2 + c2] = sum(
                            rho[4 * a + 2 * b + c, 4 * a2 + 2 * b + c2] for b in range(2))
        assert np.allclose(qmath.partial_trace(rho, [0, 2]), brute, atol=1e-14)

    def test_positive_and_trace_preserving(self, rng):
        for _ in range(50):
            rho = ginibre_mixed(rng, 8, rank=int(rng.integers(1, 9)))
            for keep in ([0], [1, 2], [0, 2], [0, 1]):
                out = qmath.partial_trace(rho, keep)
                assert abs(np.trace(out) - 1) <= 1e-12
                assert qmath.hermitian_eigenvalues(out)[-1] >= -qmath.POS_TOL

    def test_rejects_non_hermitian(self):
        m = np.eye(4) / 4
        m[0, 1] = 0.1
        with pytest.raises(qmath.NotHermitianError):
            qmath.partial_trace(m, [0])

    def test_rejects_bad_trace(self):
        with pytest.raises(ValueError):
            qmath.partial_trace(np.eye(4) / 2, [0])

    @pytest.mark.parametrize("keep", [[], [2], [0, 0], [0, 1]])
    def test_rejects_bad_index_set(self, keep):
        with pytest.raises(ValueError):
            qmath.partial_trace(np.eye(2) / 2, keep)


class TestHermitianEigenvalues:
    def test_pauli_x(self):
        assert np.allclose(qmath.hermitian_eigenvalues(SIGMA_X), [1, -1])

    def test_diagonal(self):
        assert np.allclose(qmath.hermitian_eigenvalues(np.diag([0.3, 0.7])), [0.7, 0.3])

    def test_ghz_marginal(self):
        out = qmath.hermitian_eigenvalues(np.diag([0.5, 0, 0, 0.5]))
        assert np.allclose(out, [0.5, 0.5, 0, 0])

    def test_against_lapack(self, rng):
        for n in (2, 4, 8):
            for _ in range(20):
                z = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
                h = z + z.conj().T
                ours = qmath.hermitian_eigenvalues(h)
                assert np.all(np.diff(ours) <= 0)
                assert np.allclose(ours, np.linalg.eigvalsh(h)[::-1], atol=1e-11)
                assert abs(ours.sum() - np.trace(h).real) <= 1e-9

    def test_unitary_invariance(self, rng):
        for _ in range(20):
            rho = ginibre_mixed(rng, 8)
            u = random_unitary(rng, 8)
            a = qmath.hermitian_eigenvalues(rho)
            b = qmath.hermitian_eigenvalues(u @ rho @ u.conj().T)
            assert np.max(np.abs(a - b)) <= 1e-9

    def test_degenerate_spectrum(self):
        assert np.allclose(qmath.hermitian_eigenvalues(np.eye(8)), np.ones(8))

    def test_rejects_non_hermitian(self):
        with pytest.raises(qmath.NotHermitianError):
            qmath.hermitian_eigenvalues(np.array([[0, 1], [0, 0]]))


class TestSingularValues:
    def test_examples(self):
        assert np.allclose(qmath.singular_values_3x3(np.diag([1, -1, 0])), [1, 1, 0])
        assert np.allclose(qmath.singular_values_3x3(np.zeros((3, 3))), [0, 0, 0])
        assert np.allclose(qmath.singular_values_3x3(np.diag([0, 0, 1])), [1, 0, 0])

    @given(real3)
    def test_squares_are_gram_eigenvalues(self, m):
        s = qmath.singular_values_3x3(m)
        assert np.all(s >= 0) and np.all(np.diff(s) <= 1e-15)
        w = np.linalg.eigvalsh(m.T @ m)[::-1]
        assert np.allclose(s**2, w, atol=1e-10)

    def test_rejects_nonfinite(self):
        m = np.eye(3)
        m[0, 0] = np.nan
        with pytest.raises(ValueError):
            qmath.singular_values_3x3(m)


class TestTraceNorm:
    @pytest.mark.parametrize("diag, expected", [
        ((1, -1, 1), 3.0), ((0, 0, 1), 1.0), ((1, -1, 2), 4.0), ((0, 0, 0), 0.0)])
    def test_examples(self, diag, expected):
        out = qmath.trace_norm(np.diag(diag))
        assert isinstance(out, float)
        assert out == pytest.approx(expected, abs=1e-14)

    @given(real3)
    def test_matches_svd(self, m):
        ref = np.linalg.svd(m, compute_uv=False).sum()
        assert qmath.trace_norm(m) == pytest.approx(ref, abs=1e-11)

    @given(real3)
    def test_bounds_and_transpose(self, m):
        t = qmath.trace_norm(m)
        assert t >= np.linalg.norm(m, 2) - 1e-12
        assert abs(t - qmath.trace_norm(m.T)) <= 1e-12

    def test_orthogonal_invariance(self, rng):
        for _ in range(100):
            m = rng.uniform(-1, 1, size=(3, 3))
            o1, o2 = random_rotation(rng), random_rotation(rng)
            assert abs(qmath.trace_norm(o1 @ m @ o2) - qmath.trace_norm(m)) <= 1e-12

    def test_rank_deficient(self, rng):
        for rank in (1, 2):
            for _ in range(100):
                m = rng.normal(size=(3, rank)) @ rng.normal(size=(rank, 3))
                ref = np.linalg.svd(m, compute_uv=False).sum()
                assert abs(qmath.trace_norm(m) - ref) <= 1e-12 * max(1.0, ref)

    def test_zero_only_for_zero(self):
        assert qmath.trace_norm(np.zeros((3, 3))) == 0.0
        m = np.zeros((3, 3))
        m[1, 2] = 1e-6
        assert qmath.trace_norm(m) > 1e-12

    def test_batched(self, rng):
        ms = rng.uniform(-1, 1, size=(7, 5, 3, 3))
        out = qmath.trace_norm(ms)
        assert out.shape == (7, 5)
        ref = np.linalg.svd(ms, compute_uv=False).sum(axis=-1)
        assert np.allclose(out, ref, atol=1e-12)

    def test_physical_gram_trace(self, rng):
        from qss.correlations import pure_pauli_tables
        for _ in range(50):
            t = pure_pauli_tables(haar_pure(rng))
            for m in (t[1:, 1:, 0], t[1:, 0, 1:], t[0, 1:, 1:]):
                assert np.trace(m.T @ m) <= 3 + 1e-9
