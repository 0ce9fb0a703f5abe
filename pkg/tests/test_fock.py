import math

import numpy as np
import pytest
from scipy.stats import poisson, unitary_group

from gaussepi.exceptions import ValidationError
from gaussepi.fock import (
    ORACLE_TOL,
    FockDensityMatrix,
    coherent_alpha,
    fock_beam_splitter,
    fock_beam_splitter_block,
    fock_cutoff,
    fock_displacement,
    fock_entropy,
    fock_relative_entropy,
    fock_thermal,
    oracle_residuals,
)
from gaussepi.state import g_function, inverse_temperature

LOG2 = math.log(2.0)


class TestThermal:
    def test_zero_photons(self):
        rho = fock_thermal(0.0, 5)
        assert rho.matrix[0, 0] == 1.0 and rho.trace() == 1.0 and rho.deficit == 0.0

    def test_tail_deficit(self):
        rho = fock_thermal(1.0, 60)
        assert rho.deficit < 1e-18

    @pytest.mark.parametrize("nbar, cutoff", [(0.3, 10), (1.0, 30), (4.0, 40)])
    def test_trace_plus_deficit(self, nbar, cutoff):
        rho = fock_thermal(nbar, cutoff)
        assert rho.trace() + rho.deficit == pytest.approx(1.0, abs=1e-15)

    def test_entropy_matches_g(self):
        assert fock_entropy(fock_thermal(1.0, 60)) == pytest.approx(g_function(1.0), abs=1e-8)

    def test_cutoff_rule(self):
        c = fock_cutoff(1.0)
        assert 0.5 ** (c + 1) < 1e-12 <= 0.5**c
        assert fock_cutoff(1.0, alpha=1.0) == c + 20

    def test_rejects_bad_input(self):
        with pytest.raises(ValidationError):
            fock_thermal(-1.0, 5)
        with pytest.raises(ValidationError):
            fock_thermal(1.0, 0)


class TestDisplacement:
    def test_zero(self):
        assert np.array_equal(fock_displacement(0.0, 6), np.eye(7))

    def test_coherent_state_is_poisson(self):
        alpha = 1.1 - 0.4j
        D = fock_displacement(alpha, 50)
        probs = np.abs(D[:, 0]) ** 2
        assert np.max(np.abs(probs - poisson.pmf(np.arange(51), abs(alpha) ** 2))) < 1e-10

    def test_inverse_on_safe_block(self):
        alpha = 0.7 + 0.2j
        P = fock_displacement(alpha, 40) @ fock_displacement(-alpha, 40)
        assert np.max(np.abs(P[:20, :20] - np.eye(20))) < 1e-12

    def test_too_large_alpha(self):
        with pytest.raises(ValidationError):
            fock_displacement(3.0, 10)

    def test_coherent_alpha_convention(self):
        assert coherent_alpha([1.0, 0.0]) == pytest.approx(1 / math.sqrt(2))
        assert coherent_alpha([0.0, 2.0]) == pytest.approx(math.sqrt(2) * 1j)


class TestBeamSplitter:
    def test_full_transmission_signs(self):
        U = fock_beam_splitter(1.0, 3)
        d = 4
        for n1 in range(d):
            for n2 in range(d - n1):
                assert U[n1 * d + n2, n1 * d + n2] == (-1) ** n2

    def test_hong_ou_mandel(self):
        B = fock_beam_splitter_block(0.5, 2)
        # column |1,1>, row |1,1>
        assert abs(B[1, 1]) < 1e-15
        assert np.allclose(np.abs(B[[0, 2], 1]) ** 2, [0.5, 0.5])

    @pytest.mark.parametrize("lam", [0.0, 0.3, 0.5, 0.9])
    def test_blocks_unitary(self, lam):
        for N in range(8):
            B = fock_beam_splitter_block(lam, N)
            assert np.allclose(B.T @ B, np.eye(N + 1), atol=1e-13)

    def test_photon_number_conserved(self):
        U = fock_beam_splitter(0.37, 5)
        d = 6
        total = np.add.outer(np.arange(d), np.arange(d)).ravel()
        rows, cols = np.nonzero(np.abs(U) > 1e-15)
        assert np.array_equal(total[rows], total[cols])

    def test_one_photon_block(self):
        lam = 0.2
        B = fock_beam_splitter_block(lam, 1)
        # basis |0,1>, |1,0>
        expected = np.array([[-math.sqrt(lam), math.sqrt(1 - lam)], [math.sqrt(1 - lam), math.sqrt(lam)]])
        assert np.allclose(B, expected)

    def test_thermal_pair_entropy(self):
        nu1, nu2, lam = 2.0, 1.5, 0.3
        c = 30
        a, b = fock_thermal((nu1 - 1) / 2, c), fock_thermal((nu2 - 1) / 2, c)
        joint = FockDensityMatrix(np.kron(a.matrix, b.matrix), c, 2)
        out = joint.conjugate(fock_beam_splitter(lam, c)).partial_trace(0)
        assert np.min(np.linalg.eigvalsh(out.matrix)) > -1e-14
        assert out.trace() == pytest.approx(1.0, abs=1e-8)
        # 40-digit evaluation of g((l nu1 + (1 - l) nu2 - 1) / 2)
        assert fock_entropy(out) == pytest.approx(0.7381487901676257, abs=1e-8)

    def test_partial_trace_needs_two_modes(self):
        with pytest.raises(ValidationError):
            fock_thermal(1.0, 4).partial_trace()


class TestEntropies:
    def test_pure_state(self):
        psi = np.zeros(6)
        psi[2] = 1.0
        assert fock_entropy(np.outer(psi, psi)) == 0.0

    def test_unitary_invariance(self):
        rho = fock_thermal(0.8, 30)
        U = unitary_group.rvs(31, random_state=3)
        assert fock_entropy(rho.conjugate(U)) == pytest.approx(fock_entropy(rho), abs=1e-9)

    def test_relative_entropy_self(self):
        rho = fock_thermal(0.7, 30)
        assert fock_relative_entropy(rho, rho) == pytest.approx(0.0, abs=1e-13)

    def test_displaced_thermal(self):
        # corrected single-mode value: beta/2 |xi|^2, with no constant term
        nbar, xi = 1.0, (1.0, 0.0)
        alpha = coherent_alpha(xi)
        c = fock_cutoff(nbar, alpha)
        rho = fock_thermal(nbar, c)
        sigma = rho.conjugate(fock_displacement(alpha, c))
        assert fock_relative_entropy(rho, sigma) == pytest.approx(LOG2 / 2, abs=1e-6)

    def test_thermal_pair_closed_form(self):
        n1, n2, c = 1.0, 0.5, 60
        b2 = inverse_temperature(2 * n2 + 1)
        closed = b2 * n1 - g_function(n1) - math.log(1 - math.exp(-b2))
        assert closed == pytest.approx(0.1177830356563835, abs=1e-14)
        assert fock_relative_entropy(fock_thermal(n1, c), fock_thermal(n2, c)) == pytest.approx(closed, abs=1e-8)

    def test_support_violation(self):
        rho = fock_thermal(1.0, 10)
        sigma = fock_thermal(0.0, 10)
        assert fock_relative_entropy(rho, sigma) == math.inf


def test_oracle_residuals_within_tolerance():
    res = oracle_residuals()
    assert set(res) == {"thermal_entropy", "displaced_relative_entropy", "beam_split_entropy"}
    assert max(res.values()) < ORACLE_TOL
