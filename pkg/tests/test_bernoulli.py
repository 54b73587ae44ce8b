import math

import numpy as np
import pytest

from tabcop import scaling
from tabcop.bernoulli import (
    bernoulli_copula,
    col_perturbation_table,
    odds_ratio,
    perturb,
    reconstruct,
    row_perturbation_table,
    tau_b_2x2,
    upsilon_from_omega,
)
from tabcop.errors import DegenerateError, DimensionMismatchError, DomainError
from tabcop.pmf_core import JointPmf, from_counts, margins

from conftest import LIN_COUNTS, random_positive_pmf

OMEGA_GRID = [1e-6, 0.01, 0.2, 0.5, 1.0, 2.0, 9.0, 93.6, 1e4, 1e8]


class TestOddsRatio:
    def test_lin_value(self):
        # 468/5 in exact arithmetic
        assert odds_ratio(from_counts(LIN_COUNTS)) == pytest.approx(93.6, abs=1e-9)

    def test_product_table(self):
        p = JointPmf(np.outer([0.3, 0.7], [0.6, 0.4]))
        assert odds_ratio(p) == pytest.approx(1.0, abs=1e-15)

    def test_diagonal_table(self):
        assert odds_ratio(JointPmf([[0.5, 0.0], [0.0, 0.5]])) == math.inf

    def test_anti_diagonal_table(self):
        assert odds_ratio(JointPmf([[0.0, 0.5], [0.5, 0.0]])) == 0.0

    def test_requires_2x2(self):
        with pytest.raises(DimensionMismatchError):
            odds_ratio(JointPmf(np.full((2, 3), 1 / 6)))


class TestUpsilon:
    def test_lin_value(self):
        assert upsilon_from_omega(93.6) == pytest.approx(0.813, abs=5e-4)

    def test_endpoints(self):
        assert upsilon_from_omega(1.0) == 0.0
        assert upsilon_from_omega(0.0) == -1.0
        assert upsilon_from_omega(math.inf) == 1.0

    def test_strictly_increasing(self):
        values = [upsilon_from_omega(w) for w in OMEGA_GRID]
        assert all(a < b for a, b in zip(values, values[1:]))

    def test_odd_under_inversion(self):
        for w in OMEGA_GRID:
            assert upsilon_from_omega(1.0 / w) == pytest.approx(
                -upsilon_from_omega(w), abs=1e-12
            )

    def test_domain(self):
        with pytest.raises(DomainError):
            upsilon_from_omega(-0.5)


class TestBernoulliCopula:
    def test_lin_copula(self):
        cop = bernoulli_copula(93.6)
        np.testing.assert_allclose(
            cop.values, [[0.453, 0.047], [0.047, 0.453]], atol=5e-4
        )

    def test_independence(self):
        np.testing.assert_array_equal(bernoulli_copula(1.0).values,
                                      np.full((2, 2), 0.25))

    def test_endpoints(self):
        np.testing.assert_array_equal(bernoulli_copula(0.0).values,
                                      [[0.0, 0.5], [0.5, 0.0]])
        np.testing.assert_array_equal(bernoulli_copula(math.inf).values,
                                      [[0.5, 0.0], [0.0, 0.5]])

    def test_upsilon_form(self):
        for w in OMEGA_GRID:
            u = upsilon_from_omega(w)
            expected = np.array([[1 + u, 1 - u], [1 - u, 1 + u]]) / 4.0
            assert np.abs(bernoulli_copula(w).values - expected).max() <= 1e-15

    def test_matches_scaling_route(self, rng):
        # the closed form and the fitted uniform-margin table coincide
        for _ in range(25):
            p = JointPmf(random_positive_pmf(rng, 2, 2))
            fitted, _ = scaling.copula_pmf(p)
            closed = bernoulli_copula(odds_ratio(p))
            assert np.abs(fitted.values - closed.values).max() <= 1e-10


class TestReconstruct:
    def test_lin_completed_table(self):
        p = reconstruct(93.6, 0.397, 0.525)
        assert p.values[1, 1] == pytest.approx(0.383, abs=1e-3)
        assert p.values[0, 0] == pytest.approx(0.462, abs=1e-3)
        assert p.values[0, 1] == pytest.approx(0.141, abs=1e-3)
        assert p.values[1, 0] == pytest.approx(0.013, abs=1e-3)

    def test_independence(self):
        p = reconstruct(1.0, 0.3, 0.8)
        np.testing.assert_allclose(p.values, np.outer([0.7, 0.3], [0.2, 0.8]),
                                   atol=1e-16)

    def test_zero_omega_small_margins(self):
        p = reconstruct(0.0, 0.3, 0.4)
        np.testing.assert_allclose(p.values, [[0.3, 0.4], [0.3, 0.0]], atol=1e-15)

    def test_zero_omega_three_cases(self):
        heavy = reconstruct(0.0, 0.7, 0.6)
        np.testing.assert_allclose(
            heavy.values, [[0.0, 0.3], [0.4, 0.3]], atol=1e-15
        )
        balanced = reconstruct(0.0, 0.3, 0.7)
        np.testing.assert_allclose(
            balanced.values, [[0.0, 0.7], [0.3, 0.0]], atol=1e-15
        )

    def test_infinite_omega_cases(self):
        np.testing.assert_allclose(
            reconstruct(math.inf, 0.3, 0.3).values, [[0.7, 0.0], [0.0, 0.3]],
            atol=1e-15,
        )
        np.testing.assert_allclose(
            reconstruct(math.inf, 0.3, 0.6).values, [[0.4, 0.3], [0.0, 0.3]],
            atol=1e-15,
        )
        np.testing.assert_allclose(
            reconstruct(math.inf, 0.6, 0.3).values, [[0.4, 0.0], [0.3, 0.3]],
            atol=1e-15,
        )

    def test_margins_recovered(self, rng):
        for _ in range(40):
            w = 10.0 ** rng.uniform(-6, 6)
            pi_x, pi_y = rng.uniform(0.05, 0.95, size=2)
            pair = margins(reconstruct(w, pi_x, pi_y))
            assert abs(pair.row_margins[1] - pi_x) <= 1e-12
            assert abs(pair.col_margins[1] - pi_y) <= 1e-12

    def test_odds_ratio_recovered_over_wide_range(self, rng):
        for exponent in range(-8, 9):
            w = 10.0 ** exponent
            p = reconstruct(w, 0.37, 0.81)
            assert odds_ratio(p) == pytest.approx(w, rel=1e-8)

    def test_p11_increasing_in_omega(self):
        grid = [0.01, 0.1, 0.5, 1.0, 2.0, 10.0, 100.0, 1e4]
        cells = [reconstruct(w, 0.45, 0.3).values[1, 1] for w in grid]
        assert all(a < b for a, b in zip(cells, cells[1:]))

    def test_domain_errors(self):
        with pytest.raises(DomainError):
            reconstruct(1.0, 0.0, 0.5)
        with pytest.raises(DomainError):
            reconstruct(1.0, 0.5, 1.0)
        with pytest.raises(DomainError):
            reconstruct(-2.0, 0.5, 0.5)


class TestTauB:
    def test_equals_upsilon_on_copula(self):
        for w in OMEGA_GRID:
            cop = bernoulli_copula(w)
            assert tau_b_2x2(cop) == pytest.approx(upsilon_from_omega(w), abs=1e-12)

    def test_product_is_zero(self):
        p = JointPmf(np.outer([0.3, 0.7], [0.6, 0.4]))
        assert abs(tau_b_2x2(p)) <= 1e-15

    def test_diagonal_is_one(self):
        assert tau_b_2x2(JointPmf([[0.5, 0.0], [0.0, 0.5]])) == pytest.approx(1.0)


class TestPerturb:
    def test_uniform_is_neutral(self, rng):
        p = JointPmf(random_positive_pmf(rng, 2, 2))
        out = perturb(p, JointPmf(np.full((2, 2), 0.25)))
        np.testing.assert_allclose(out.values, p.values, atol=1e-15)

    def test_commutative(self, rng):
        p = JointPmf(random_positive_pmf(rng, 2, 2))
        q = JointPmf(random_positive_pmf(rng, 2, 2))
        np.testing.assert_allclose(perturb(p, q).values, perturb(q, p).values,
                                   atol=1e-16)

    def test_reproduces_marginal_distortion(self, rng):
        # perturbing by the two rank-one tables = rescaling rows/columns
        p = JointPmf(random_positive_pmf(rng, 2, 2))
        phi, psi = 3.7, 0.21
        via_perturb = perturb(perturb(row_perturbation_table(phi), p),
                              col_perturbation_table(psi))
        direct = scaling.apply_marginal_distortion(p, [1.0, phi], [1.0, psi])
        assert np.abs(via_perturb.values - direct.values).max() <= 1e-14

    def test_degenerate_product(self):
        p = JointPmf([[0.5, 0.0], [0.0, 0.5]])
        q = JointPmf([[0.0, 0.5], [0.5, 0.0]])
        with pytest.raises(DegenerateError):
            perturb(p, q)


class TestClassInvariance:
    def test_odds_ratio_invariant_under_distortion(self, rng):
        for _ in range(50):
            p = JointPmf(random_positive_pmf(rng, 2, 2))
            f = rng.uniform( 0.1, 10.0, size=2)
            g = rng.uniform(0.1, 10.0, size=2)
            q = scaling.apply_marginal_distortion(p, f, g)
            assert odds_ratio(q) == pytest.approx(odds_ratio(p), rel=1e-10)
