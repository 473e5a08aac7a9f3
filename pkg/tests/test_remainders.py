"""
Tests for the Stirling remainders and their derivatives.
"""

import math

import mpmath
import pytest
from mpmath import mpf

from cmdeg.exceptions import DomainError, UnsupportedError
from cmdeg.remainders import (
    EvalPath,
    RemainderSpec,
    derivative_ratio,
    evaluate_remainder,
    ratio_bound,
    remainder,
    remainder_deriv,
    remainder_via_laplace,
)
from cmdeg.special import bernoulli


def remainder_reference(n, x):
    """R_n(x) from mpmath.loggamma at 120 digits."""
    with mpmath.workdps(120):
        x = mpf(x)
        value = mpmath.loggamma(x) - (x - mpf(1) / 2) * mpmath.log(x) + x
        value -= mpmath.log(2 * mpmath.pi) / 2
        for k in range(1, n + 1):
            b = bernoulli(2 * k)
            value -= mpf(b.numerator) / b.denominator / (2 * k * (2 * k - 1)) / x ** (2 * k - 1)
        value = (-1) ** n * value
    return +value


class TestRemainderSpec:
    """Test RemainderSpec validation and labels."""

    def test_labels(self):
        """Labels show the sign convention."""
        assert RemainderSpec(2).label == "R_2"
        assert RemainderSpec(1, 1).label == "-R_1^(1)"
        assert RemainderSpec(0, 3).label == "(-1)^3 R_0^(3)"

    def test_negative_index(self):
        """Negative indices are rejected."""
        with pytest.raises(DomainError):
            RemainderSpec(-1)

    def test_laplace_path_needs_n_one(self):
        """R_0 has no Laplace path."""
        with pytest.raises(UnsupportedError):
            RemainderSpec(0, 0, EvalPath.LAPLACE)


class TestRemainder:
    """Test R_n(x) through the closed form and the Laplace transform."""

    def test_golden_value(self, ctx):
        """R_0(1) = 1 - log(2 pi)/2 = 0.0810614667953272..."""
        value = remainder(0, 1, ctx)
        assert value.contains(1 - mpmath.log(2 * mpmath.pi) / 2)
        assert mpmath.nstr(value.value, 16) == "0.0810614667953272"

    def test_first_remainder_at_one(self, ctx):
        """R_1(1) = 1/12 - R_0(1)."""
        assert remainder(1, 1, ctx).contains(mpf(1) / 12 - remainder(0, 1, ctx).value)

    @pytest.mark.parametrize("n", [0, 1, 2, 3, 4])
    @pytest.mark.parametrize("x", ["0.1", "1", "2.5", "10", "100"])
    def test_against_loggamma(self, ctx, n, x):
        """The closed form matches mpmath.loggamma at 120 digits."""
        value = remainder(n, x, ctx, EvalPath.CLOSED_FORM)
        reference = remainder_reference(n, x)
        assert abs(value.value - reference) <= value.err_bound + mpf("1e-45") * abs(reference)

    @pytest.mark.parametrize("n", [0, 1, 2, 3])
    def test_positive(self, ctx, n):
        """R_n(x) > 0 with the alternating sign convention."""
        for x in ["0.05", "1", "7", "300"]:
            assert remainder(n, x, ctx).is_certified_positive()

    def test_laplace_matches_closed_form(self, ctx):
        """R_1(1) from the Laplace transform of g_0 agrees to 1e-25."""
        closed = remainder(1, 1, ctx, EvalPath.CLOSED_FORM)
        laplace = remainder_via_laplace(1, 1, ctx)
        assert abs(closed.value - laplace.value) <= mpf("1e-25")

    @pytest.mark.slow
    @pytest.mark.parametrize("n", [1, 2, 3])
    @pytest.mark.parametrize("x", ["0.5", "1", "5", "20"])
    def test_dual_representation(self, ctx, n, x):
        """Closed form and Laplace transform agree to 1e-25."""
        closed = remainder(n, x, ctx, EvalPath.CLOSED_FORM)
        laplace = remainder(n, x, ctx, EvalPath.LAPLACE)
        assert abs(closed.value - laplace.value) <= mpf("1e-25")

    def test_auto_path_switches_to_laplace(self, ctx):
        """Above CMDEG_REMAINDER_X_STAR the automatic path integrates the kernel."""
        value = remainder(2, 20, ctx)
        assert abs(value.value - remainder_reference(2, 20)) <= mpf("1e-25")

    def test_laplace_needs_positive_index(self, ctx):
        """R_0 has no Laplace representation."""
        with pytest.raises(UnsupportedError):
            remainder_via_laplace(0, 1, ctx)

    def test_non_positive_x(self, ctx):
        """x <= 0 is rejected."""
        with pytest.raises(DomainError):
            remainder(1, 0, ctx)

    def test_evaluate_remainder_dispatch(self, ctx):
        """Specs with m = 0 evaluate R_n, with m > 0 the signed derivative."""
        assert evaluate_remainder(RemainderSpec(1), 2, ctx).contains(remainder(1, 2, ctx))
        derivative = evaluate_remainder(RemainderSpec(1, 2), 2, ctx)
        assert derivative.contains(remainder_deriv(1, 2, 2, ctx))


class TestRemainderDerivatives:
    """Test (-1)^m R_n^(m)(x) against explicit polygamma expressions."""

    def test_second_derivative_of_r0(self, ctx):
        """R_0'' = psi'(x) - 1/x - 1/(2x^2)."""
        x = mpf("1.5")
        expected = mpmath.psi(1, x) - 1 / x - 1 / (2 * x**2)
        assert abs(remainder_deriv(0, 2, x, ctx).value - expected) <= mpf("1e-40")

    def test_first_derivative_of_r0(self, ctx):
        """-R_0' = log x - 1/(2x) - psi(x), here by numerical differentiation."""
        x = mpf("2.5")
        expected = mpmath.log(x) - 1 / (2 * x) - mpmath.psi(0, x)
        value = remainder_deriv(0, 1, x, ctx)
        assert abs(value.value - expected) <= mpf("1e-20")
        assert value.err_bound <= mpf("1e-20")

    def test_first_derivative_of_r1(self, ctx):
        """-R_1' = 1/(12 x^2) + psi(x) - log x + 1/(2x)."""
        x = mpf(2)
        expected = 1 / (12 * x**2) + mpmath.psi(0, x) - mpmath.log(x) + 1 / (2 * x)
        assert abs(remainder_deriv(1, 1, x, ctx).value - expected) <= mpf("1e-40")

    @pytest.mark.parametrize("n,m", [(0, 2), (0, 5), (1, 1), (1, 3), (2, 2), (3, 1)])
    def test_positive(self, ctx, n, m):
        """Signed derivatives of CM remainders are positive."""
        for x in ["0.2", "1", "30"]:
            assert remainder_deriv(n, m, x, ctx).is_certified_positive()

    @pytest.mark.parametrize("n,m", [(0, 3), (2, 1), (2, 3)])
    def test_against_numerical_derivative(self, ctx, n, m):
        """Agrees with mpmath.diff of the 120-digit reference."""
        with mpmath.workdps(120):
            expected = (-1) ** m * mpmath.diff(lambda y: remainder_reference(n, y), mpf(3), m)
        assert abs(remainder_deriv(n, m, 3, ctx).value - expected) <= mpf("1e-40")

    def test_order_zero_rejected(self, ctx):
        """m must be at least 1."""
        with pytest.raises(DomainError):
            remainder_deriv(1, 0, 1, ctx)


class TestRatioBound:
    """Test -x R_n'(x) / R_n(x)."""

    def test_limit_for_r1(self, ctx):
        """ratio_bound(1, 1e-5) is within 1e-2 of 1."""
        assert abs(ratio_bound(1, "1e-5", ctx).value - 1) < mpf("1e-2")

    @pytest.mark.parametrize("n", [2, 3])
    def test_limit_at_zero(self, ctx, n):
        """ratio_bound(n, 1e-3) is within 1e-2 of 2n - 1."""
        assert abs(ratio_bound(n, "1e-3", ctx).value - (2 * n - 1)) < mpf("1e-2")

    @pytest.mark.parametrize("n", [1, 2, 3])
    def test_limit_at_infinity(self, ctx, n):
        """The ratio tends to 2n + 1 for large x."""
        assert abs(ratio_bound(n, 1000, ctx).value - (2 * n + 1)) < mpf("1e-2")

    def test_needs_positive_index(self, ctx):
        """R_0 is excluded."""
        with pytest.raises(DomainError):
            ratio_bound(0, 1, ctx)

    def test_derivative_ratio_for_r0(self, ctx):
        """The ratio of R_0 tends to 1 for large x."""
        value = derivative_ratio(RemainderSpec(0), 1000, ctx)
        assert abs(value.value - 1) < mpf("1e-3")

    def test_derivative_ratio_of_derivative(self, ctx):
        """For F = -R_1' the ratio tends to 4 for large x."""
        value = derivative_ratio(RemainderSpec(1, 1), 1000, ctx)
        assert abs(value.value - 4) < mpf("1e-2")
        assert math.isfinite(float(value))
