import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from qss import correlations as C
from qss import fidelity as F
from qss import qmath, states
from qss.states import AcinParams
from randstates import haar_pure

R2 = 1 / math.sqrt(2)
PHI_PLUS = np.array([1, 0, 0, 1]) / np.sqrt(2)
EXAMPLE2 = states.msr_params(math.pi / 4)


def random_su2(rng):
    z = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))


class TestTheta2:
    def test_bell(self):
        rho = np.outer(PHI_PLUS, PHI_PLUS)
        assert F.theta2(rho) == pytest.approx(3)
        assert F.tele_fidelity(rho) == pytest.approx(1)

    def test_ghz_channel(self):
        rho = states.reduced_pair(states.ghz(), states.AC)
        assert F.theta2(rho) == pytest.approx(1)
        assert F.tele_fidelity(rho) == pytest.approx(2 / 3)

    def test_example2(self):
        rho = states.reduced_pair(states.from_acin(EXAMPLE2), states.AC)
        assert F.theta2(rho) == pytest.approx(R2, abs=1e-12)
        assert F.tele_fidelity(rho) == pytest.approx((6 + math.sqrt(2)) / 12, abs=1e-12)


class TestTheta3:
    def test_ghz(self):
        value, axis = F.theta3(states.ghz())
        assert value == pytest.approx(3, abs=1e-9)
        assert abs(axis[2]) < 1e-6
        assert F.csr_fidelity(states.ghz()) == pytest.approx(1, abs=1e-9)

    def test_product(self):
        psi = np.zeros(8)
        psi[0] = 1
        assert F.theta3(psi)[0] == pytest.approx(1, abs=1e-12)
        assert F.csr_fidelity(psi) == pytest.approx(2 / 3, abs=1e-12)

    def test_example2(self):
        psi = states.from_acin(EXAMPLE2)
        assert F.theta3(psi)[0] == pytest.approx(1 + math.sqrt(2), abs=1e-9)
        assert F.csr_fidelity(psi) == pytest.approx((4 + math.sqrt(2)) / 6, abs=1e-9)

    def test_density_matrix_input(self, rng):
        psi = haar_pure(rng)
        assert F.theta3(states.density(psi))[0] == pytest.approx(F.theta3(psi)[0], abs=1e-12)

    def test_zero_correlations(self):
        value, axis = F.maximize_axis(np.zeros((3, 3)), np.zeros((3, 3, 3)))
        assert value == 0 and np.array_equal(axis, [0, 0, 1])
        assert F.theta3(np.eye(8) / 8)[0] == 0

    def test_maximality_against_probes(self, rng):
        for _ in range(20):
            psi = haar_pure(rng)
            d = C.bloch3(states.density(psi))
            best, axis = F.theta3(psi)
            assert abs(np.linalg.norm(axis) - 1) < 1e-12
            probes = rng.normal(size=(500, 3))
            probes /= np.linalg.norm(probes, axis=1, keepdims=True)
            assert np.all(F.csr_objective(d.R, d.tau, probes) <= best + 1e-12)
            assert F.csr_objective(d.R, d.tau, axis) == pytest.approx(best, abs=1e-14)

    def test_matches_independent_multistart(self, rng):
        from scipy.optimize import minimize
        for _ in range(10):
            psi = haar_pure(rng)
            d = C.bloch3(states.density(psi))

            def neg(x):
                n = np.array([math.sin(x[0]) * math.cos(x[1]),
                              math.sin(x[0]) * math.sin(x[1]), math.cos(x[0])])
                return -float(F.csr_objective(d.R, d.tau, n))

            ref = max(-minimize(neg, rng.uniform(0, 3, 2), method="Nelder-Mead",
                                options={"xatol": 1e-10, "fatol": 1e-13}).fun for _ in range(12))
            assert F.theta3(psi)[0] >= ref - 1e-9

    def test_axis_average_identity(self, rng):
        for _ in range(30):
            psi = haar_pure(rng)
            rho = states.density(psi)
            d = C.bloch3(rho)
            n = rng.normal(size=3)
            n /= np.linalg.norm(n)
            lhs = F.csr_objective(d.R, d.tau, n)
            rhs = 0.0
            for sign in (1, -1):
                p, rho_ac = C.condition_on_assistant(rho, n, sign)
                rhs += p * F.theta2(rho_ac)
            assert abs(lhs - rhs) <= 1e-9

    def test_local_unitary_invariance(self, rng):
        for _ in range(10):
            psi = haar_pure(rng)
            u = np.kron(np.kron(random_su2(rng), random_su2(rng)), random_su2(rng))
            a, b = F.summarize(psi), F.summarize(u @ psi)
            assert abs(a.theta2_ab - b.theta2_ab) <= 1e-8
            assert abs(a.theta2_ac - b.theta2_ac) <= 1e-8
            assert abs(a.theta3 - b.theta3) <= 1e-8

    def test_batched_matches_single(self, rng):
        psis = np.array([haar_pure(rng) for _ in range(8)])
        t = C.pure_pauli_tables(psis)
        vals, axes = F.maximize_axis(t[:, 1:, 0, 1:], t[:, 1:, 1:, 1:])
        assert axes.shape == (8, 3)
        for psi, v in zip(psis, vals):
            assert F.theta3(psi)[0] == pytest.approx(v, abs=1e-12)


class TestSummary:
    def test_ghz_summary(self):
        s = F.summarize(states.ghz())
        assert s.f_ab == pytest.approx(2 / 3) and s.f_ac == pytest.approx(2 / 3)
        assert s.f_csr == pytest.approx(1, abs=1e-9) and s.tie_ab_ac

    @given(st.integers(0, 10_000))
    def test_fidelity_relations(self, seed):
        p = states.sample_acin(seed, include_phase=True)
        s = F.summarize(states.from_acin(p))
        assert s.f_ab == 0.5 * (1 + s.theta2_ab / 3)
        assert s.f_csr == 0.5 + s.theta3 / 6
        assert s.f_max == max(s.f_ab, s.f_ac)
        assert 0.5 - 1e-12 <= s.f_max <= 1 + 1e-12
        assert 0.5 - 1e-12 <= s.f_csr <= 1 + 1e-12


class TestClosedForms:
    def test_ghz(self):
        p = states.msr_params(0.0)
        assert F.closed_theta3_ghzr(p) == pytest.approx(3)
        assert F.closed_norm_r(p) == pytest.approx(1) and F.closed_norm_q(p) == pytest.approx(1)

    def test_product(self):
        assert F.closed_theta3_ghzr(AcinParams(1, 0, 0, 0, 0)) == 1

    def test_example2(self):
        assert F.closed_theta3_ghzr(EXAMPLE2) == pytest.approx(1 + math.sqrt(2))
        assert F.closed_theta2_ghzr(EXAMPLE2) == pytest.approx(R2)

    @pytest.mark.parametrize("theta", [0.0, math.pi / 4, math.pi / 2])
    def test_msr_closed_forms(self, theta):
        t2, t3 = F.msr_closed_forms(theta)
        assert t2 == pytest.approx(math.cos(theta), abs=1e-15)
        assert t3 == pytest.approx(2 * math.cos(theta) + 1, abs=1e-15)

    def test_msr_range(self):
        with pytest.raises(states.ParameterError):
            F.msr_closed_forms(2.0)

    def test_phase_rejected(self):
        with pytest.raises(ValueError):
            F.closed_theta3_ghzr(AcinParams(R2, R2, 0, 0, 0, phi=0.3))

    @given(st.floats(0.0, math.pi / 2))
    def test_boundary_family_numeric(self, theta):
        s = F.summarize(states.from_msr(theta))
        assert max(s.theta2_ab, s.theta2_ac) == pytest.approx(math.cos(theta), abs=1e-9)
        assert s.theta3 == pytest.approx(2 * math.cos(theta) + 1, abs=1e-9)

    @given(st.integers(0, 10_000))
    def test_exact_when_middle_coefficients_vanish(self, seed):
        # the published closed forms hold exactly on the l2 = l3 = 0 slice
        rng = np.random.default_rng(seed)
        w = rng.dirichlet(np.ones(3))
        p = AcinParams(*np.sqrt([w[0], w[1], 0, 0, w[2]]))
        s = F.summarize(states.from_acin(p))
        assert F.closed_theta3_ghzr(p) == pytest.approx(s.theta3, abs=1e-9)
        assert F.closed_norm_r(p) == pytest.approx(s.theta2_ac, abs=1e-9)
        assert F.closed_norm_q(p) == pytest.approx(s.theta2_ab, abs=1e-9)

    def test_simplified_form_undefined_on_tie(self):
        with pytest.raises(ValueError):
            F.simplified_theta2_ghzr(states.msr_params(0.3))
