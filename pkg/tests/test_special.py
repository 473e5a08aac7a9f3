"""
Tests for Bernoulli numbers, log Gamma, polygamma and Laguerre polynomials.
"""

from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction

import mpmath
import pytest
from mpmath import mpf

from cmdeg.exceptions import DomainError
from cmdeg.special import (
    bernoulli,
    laguerre,
    laguerre_derivative,
    log_gamma,
    polygamma,
    stirling_coefficient,
)


class TestBernoulli:
    """Test exact Bernoulli numbers."""

    def test_golden_value(self):
        """B_12 = -691/2730 exactly."""
        assert bernoulli(12) == Fraction(-691, 2730)

    def test_first_values(self):
        """B_0 = 1, B_1 = -1/2, B_2 = 1/6."""
        assert bernoulli(0) == 1
        assert bernoulli(1) == Fraction(-1, 2)
        assert bernoulli(2) == Fraction(1, 6)

    def test_odd_indices_vanish(self):
        """B_k = 0 for odd k >= 3."""
        assert all(bernoulli(k) == 0 for k in range(3, 60, 2))

    def test_matches_mpmath(self):
        """Agrees with mpmath.bernfrac up to index 80."""
        for k in range(0, 81):
            p, q = mpmath.bernfrac(k)
            assert bernoulli(k) == Fraction(int(p), int(q)), k

    def test_negative_index(self):
        """Negative indices are outside the domain."""
        with pytest.raises(DomainError):
            bernoulli(-1)

    def test_concurrent_readers_agree(self):
        """Threads filling the table concurrently all see the same values."""
        with ThreadPoolExecutor(max_workers=4) as pool:
            results = list(pool.map(bernoulli, [120, 118, 120, 116] * 4))
        assert results[0] == results[2] == bernoulli(120)

    def test_stirling_coefficient(self):
        """The first Stirling coefficients are 1/12 and -1/360."""
        assert stirling_coefficient(1) == Fraction(1, 12)
        assert stirling_coefficient(2) == Fraction(-1, 360)


class TestLogGamma:
    """Test the shifted Stirling evaluation of log Gamma."""

    def test_factorial(self, ctx):
        """log Gamma(10) = log(9!) to 1e-40."""
        value = log_gamma(10, ctx)
        assert abs(value.value - mpmath.log(362880)) <= mpf("1e-40")
        assert value.err_bound <= mpf("1e-40")

    def test_half(self, ctx):
        """log Gamma(1/2) = log(sqrt(pi))."""
        value = log_gamma(mpf(1) / 2, ctx)
        assert value.contains(mpmath.log(mpmath.sqrt(mpmath.pi)))

    @pytest.mark.parametrize("x", ["0.001", "0.7", "3.25", "41", "1e6"])
    def test_against_mpmath(self, ctx, x):
        """Matches mpmath.loggamma over a wide range of arguments."""
        value = log_gamma(x, ctx)
        assert abs(value.value - mpmath.loggamma(mpf(x))) <= mpf("1e-45") * max(1, abs(value.value))

    def test_non_positive(self, ctx):
        """x <= 0 is rejected."""
        with pytest.raises(DomainError):
            log_gamma(0, ctx)


class TestPolygamma:
    """Test psi^(n) against mpmath."""

    @pytest.mark.parametrize("order", [0, 1, 2, 5])
    @pytest.mark.parametrize("x", ["0.3", "1", "7.5", "40"])
    def test_against_mpmath(self, ctx, order, x):
        """Matches mpmath.psi to 45 significant digits."""
        value = polygamma(order, x, ctx)
        reference = mpmath.psi(order, mpf(x))
        assert abs(value.value - reference) <= mpf("1e-45") * max(1, abs(reference))

    def test_trigamma_at_one(self, ctx):
        """psi'(1) = pi^2 / 6."""
        assert polygamma(1, 1, ctx).contains(mpmath.pi**2 / 6)

    def test_negative_order(self, ctx):
        """Negative orders are rejected."""
        with pytest.raises(DomainError):
            polygamma(-1, 1, ctx)


class TestLaguerre:
    """Test the upward three-term recurrence."""

    @pytest.mark.parametrize("n", [0, 1, 2, 7, 30])
    @pytest.mark.parametrize("t", ["0.01", "1", "12.5", "60"])
    def test_against_mpmath(self, ctx, n, t):
        """L_n(t) agrees with mpmath.laguerre within its error bound."""
        value = laguerre(n, t, ctx)
        reference = mpmath.laguerre(n, 0, mpf(t))
        assert abs(value.value - reference) <= value.err_bound + mpf("1e-40")

    def test_generalized_order_one(self, ctx):
        """L_n^(1) matches mpmath for alpha = 1."""
        for n in range(6):
            value = laguerre(n, mpf("2.5"), ctx, alpha=1)
            assert abs(value.value - mpmath.laguerre(n, 1, mpf("2.5"))) <= mpf("1e-45")

    def test_derivative(self, ctx):
        """L_n' = -L_{n-1}^(1)."""
        for n in range(1, 8):
            value = laguerre_derivative(n, mpf("3.5"), ctx)
            expected = -mpmath.laguerre(n - 1, 1, mpf("3.5"))
            assert abs(value.value - expected) <= mpf("1e-45")

    def test_szego_bound(self, ctx, small_grid):
        """|L_m(t)| <= e^(t/2) for m <= 60 with no violations."""
        violations = [
            (m, t)
            for m in range(61)
            for t in small_grid
            if abs(laguerre(m, t, ctx).value) > mpmath.exp(t / 2)
        ]
        assert violations == []

    def test_negative_degree(self, ctx):
        """Negative degree is rejected."""
        with pytest.raises(DomainError):
            laguerre(-1, 1, ctx)
