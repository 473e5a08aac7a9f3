"""
Tests for the Binet, Laguerre and limiting kernels.
"""

import math

import mpmath
import pytest
from mpmath import mpf

from cmdeg.exceptions import DomainError, UnsupportedError
from cmdeg.kernels import (
    KernelFamily,
    KernelSpec,
    Representation,
    binet_f,
    binet_g,
    binet_g_deriv,
    bose_kernel,
    evaluate_kernel,
    integrated_excess,
    k_bound,
    laguerre_f_excess,
    laguerre_f_prime_gap,
    laguerre_kernel_f,
    laguerre_kernel_f_prime,
    laurent_terms,
    moment_kernel_deriv,
    s_kernel,
    s_kernel_float,
    s_kernel_prime,
    theta,
    theta_prime,
)
from cmdeg.special import bernoulli


def g0_reference(t):
    """g_0(t) = 1/12 - 1/(2t) + 1/t^2 - 1/(t (e^t - 1))."""
    t = mpf(t)
    return mpf(1) / 12 - 1 / (2 * t) + 1 / t**2 - 1 / (t * mpmath.expm1(t))


def bose_reference(p, d, t):
    """(d/dt)^d [t^p / (1 - e^{-t})] by mpmath's numerical differentiation."""
    with mpmath.workdps(120):
        value = mpmath.diff(lambda u: u**p / (1 - mpmath.exp(-u)), mpf(t), d)
    return +value


class TestKernelSpec:
    """Test KernelSpec validation and labels."""

    def test_labels(self):
        """Labels name the family, index and derivative."""
        assert KernelSpec(KernelFamily.BINET_G, 2, 4).label == "g_2^(4)"
        assert KernelSpec(KernelFamily.LAGUERRE_F, 3).label == "F_3"
        assert KernelSpec(KernelFamily.S_KERNEL).label == "s"

    def test_derivative_order_cap(self):
        """g_n derivatives stop at order 2n + 2."""
        with pytest.raises(UnsupportedError):
            KernelSpec(KernelFamily.BINET_G, 1, 5)

    def test_laguerre_index(self):
        """The Laguerre kernel needs m >= 1."""
        with pytest.raises(DomainError):
            KernelSpec(KernelFamily.LAGUERRE_F, 0)

    def test_unsupported_representation(self, ctx):
        """Families reject representations they do not have."""
        spec = KernelSpec(KernelFamily.BINET_F, 1, 0, Representation.LAGUERRE_SUM)
        with pytest.raises(UnsupportedError):
            evaluate_kernel(spec, 1, ctx)

    def test_callable(self, ctx):
        """A spec evaluates itself."""
        spec = KernelSpec(KernelFamily.BINET_G, 0)
        assert spec(mpf("1.5"), ctx).contains(g0_reference("1.5"))


class TestBinetKernels:
    """Test g_n and f_n in all representations."""

    @pytest.mark.parametrize("t", ["0.01", "0.5", "1.5", "3", "25"])
    def test_g0_against_closed_expression(self, ctx, t):
        """g_0 matches 1/12 - 1/(2t) + 1/t^2 - 1/(t (e^t - 1))."""
        with mpmath.workdps(120):
            reference = g0_reference(t)
        value = binet_g(0, t, ctx)
        assert abs(value.value - reference) <= value.err_bound + mpf("1e-45") * abs(reference)

    @pytest.mark.parametrize("n", [0, 1, 2, 3])
    def test_representations_agree(self, ctx, n):
        """Series, exponential sum and coth closed form agree at t = 1.5."""
        series = binet_g(n, "1.5", ctx, Representation.SMALL_T_SERIES)
        exponential = binet_g(n, "1.5", ctx, Representation.EXPONENTIAL_SUM)
        closed = binet_g(n, "1.5", ctx, Representation.CLOSED_FORM)
        assert series.contains(exponential)
        assert series.contains(closed)

    @pytest.mark.parametrize("n", [0, 1, 2, 3])
    def test_derivatives_agree_across_cutoff(self, ctx, n):
        """Every tracked derivative agrees between series and exponential sum."""
        for j in range(2 * n + 3):
            series = binet_g_deriv(n, j, "1.9", ctx, Representation.SMALL_T_SERIES)
            exponential = binet_g_deriv(n, j, "1.9", ctx, Representation.EXPONENTIAL_SUM)
            assert series.contains(exponential), j

    @pytest.mark.parametrize("n", [0, 1, 2, 3])
    def test_small_t_leading_coefficient(self, ctx, n):
        """g_n(t) ~ |B_{2n+4}| / (2n+4)! t^(2n+2) as t -> 0."""
        t = mpf("1e-3")
        coefficient = abs(bernoulli(2 * n + 4)) / math.factorial(2 * n + 4)
        expected = mpf(coefficient.numerator) / coefficient.denominator * t ** (2 * n + 2)
        ratio = binet_g(n, t, ctx).value / expected
        assert abs(ratio - 1) <= mpf("1e-4")

    def test_g0_small_t(self, ctx):
        """g_0(1e-3) * 720 / 1e-6 is 1 to about six digits."""
        value = binet_g(0, "1e-3", ctx).value * 720 / mpf("1e-6")
        assert abs(value - 1) < mpf("1e-5")

    @pytest.mark.parametrize("n", [0, 1, 2])
    def test_f_is_t_times_g(self, ctx, small_grid, n):
        """f_n(t) = t g_n(t) within the combined error bounds on the grid."""
        for t in small_grid:
            f = binet_f(n, t, ctx)
            g = binet_g(n, t, ctx)
            assert f.contains(g * t), t

    def test_closed_form_refused_near_zero(self, ctx):
        """The coth closed form is not used below t = 1."""
        with pytest.raises(UnsupportedError):
            binet_g(2, "0.5", ctx, Representation.CLOSED_FORM)

    def test_series_refused_beyond_radius(self, ctx):
        """The small-t series diverges for t >= 2 pi."""
        with pytest.raises(UnsupportedError):
            binet_g(1, 7, ctx, Representation.SMALL_T_SERIES)

    def test_moment_kernel_contains_g(self, ctx):
        """moment_kernel_deriv(n + 1, 0, 0) is g_n."""
        assert moment_kernel_deriv(2, 0, 0, "2.5", ctx).contains(binet_g(1, "2.5", ctx))

    def test_laurent_terms_of_g0(self):
        """g_0 = t^-2 - t^-1 / 2 + 1/12 - exponentials."""
        terms = laurent_terms(1, 0, 0)
        assert [(float(c), p) for c, p in terms] == [(1.0, -2), (-0.5, -1), (1 / 12, 0)]

    def test_integral_representation_range(self, ctx):
        """The oscillatory integral covers j = 2n and 2n + 1 only."""
        with pytest.raises(UnsupportedError):
            binet_g_deriv(1, 1, 1, ctx, Representation.INTEGRAL)

    def test_non_positive_t(self, ctx):
        """t <= 0 is rejected."""
        with pytest.raises(DomainError):
            binet_g(0, 0, ctx)


class TestLogWeight:
    """Test theta(x) = 2 log(1 - e^{-x})."""

    def test_signs(self, small_grid):
        """theta <= 0 and theta' >= 0."""
        assert all(theta(x) <= 0 for x in small_grid)
        assert all(theta_prime(x) >= 0 for x in small_grid)

    def test_value(self):
        """theta(log 2) = -2 log 2."""
        assert mpmath.almosteq(theta(mpmath.log(2)), -2 * mpmath.log(2), rel_eps=mpf("1e-60"))


class TestBoseKernels:
    """Test (d/dt)^d [t^p / (1 - e^{-t})] against numerical differentiation."""

    @pytest.mark.parametrize("p,d", [(1, 0), (1, 1), (1, 2), (2, 1), (2, 2), (3, 3), (3, 4)])
    @pytest.mark.parametrize("t", ["0.4", "1.3", "4", "9"])
    def test_against_numerical_derivative(self, ctx, p, d, t):
        """Matches mpmath.diff computed at 120 digits."""
        value = bose_kernel(p, d, t, ctx)
        reference = bose_reference(p, d, t)
        slack = value.err_bound + mpf("1e-40") * max(1, abs(reference))
        assert abs(value.value - reference) <= slack

    @pytest.mark.parametrize("p,d", [(2, 1), (2, 2), (4, 3), (4, 5)])
    def test_series_and_laguerre_agree(self, ctx, p, d):
        """Both representations agree inside the series radius."""
        series = bose_kernel(p, d, "3.5", ctx, Representation.SMALL_T_SERIES)
        laguerre = bose_kernel(p, d, "3.5", ctx, Representation.LAGUERRE_SUM)
        assert series.contains(laguerre)

    def test_high_order_series_raises_precision(self, ctx):
        """Heavy cancellation for large m still gives a certified value."""
        value = laguerre_kernel_f(40, "1.5", ctx, Representation.SMALL_T_SERIES)
        laguerre = laguerre_kernel_f(40, "1.5", ctx, Representation.LAGUERRE_SUM)
        assert value.contains(laguerre)
        assert value.err_bound <= mpf("1e-30") * abs(value.value)


class TestLaguerreKernels:
    """Test f_m, f_m' and the derived kernels."""

    def test_f2_closed_form(self, ctx):
        """f_2 = 1/(1 - e^-t) - t e^-t / (1 - e^-t)^2."""
        t = mpf("1.3")
        q = mpmath.exp(-t)
        expected = 1 / (1 - q) - t * q / (1 - q) ** 2
        assert laguerre_kernel_f(2, t, ctx).contains(expected)

    @pytest.mark.parametrize("m", [2, 3, 5, 8])
    def test_values_at_zero(self, ctx, m):
        """f_m(0) = (m-1)!/2 and f_m'(0) = m!/12."""
        assert laguerre_kernel_f(m, 0, ctx).value == mpf(math.factorial(m - 1)) / 2
        assert laguerre_kernel_f_prime(m, 0, ctx).value == mpf(math.factorial(m)) / 12

    @pytest.mark.parametrize("m", [2, 3, 4])
    def test_derivative_limit(self, ctx, m):
        """f_m'(1e-6) is within 1e-8 of m!/12."""
        value = laguerre_kernel_f_prime(m, "1e-6", ctx)
        assert abs(value.value - mpf(math.factorial(m)) / 12) + value.err_bound <= mpf("1e-8")

    @pytest.mark.parametrize("m", [2, 3, 5, 8])
    @pytest.mark.parametrize("t", ["0.1", "1", "3.5", "6"])
    def test_laguerre_sum_matches_integral(self, ctx, m, t):
        """Laguerre sum and s-integral representation agree to 1e-20."""
        laguerre = laguerre_kernel_f(m, t, ctx, Representation.LAGUERRE_SUM)
        integral = laguerre_kernel_f(m, t, ctx, Representation.INTEGRAL)
        assert abs(laguerre.value - integral.value) <= mpf("1e-20")

    @pytest.mark.parametrize("m", [2, 4, 7])
    @pytest.mark.parametrize("t", ["0.5", "2.5", "6"])
    def test_prime_laguerre_sum_matches_integral(self, ctx, m, t):
        """f_m' from the Laguerre sum agrees with its integral representation."""
        laguerre = laguerre_kernel_f_prime(m, t, ctx, Representation.LAGUERRE_SUM)
        integral = laguerre_kernel_f_prime(m, t, ctx, Representation.INTEGRAL)
        assert abs(laguerre.value - integral.value) <= mpf("1e-20")

    @pytest.mark.parametrize("t", ["1e-3", "0.7", "3", "12"])
    def test_excess(self, ctx, t):
        """laguerre_f_excess = f_m - (m-1)!/2."""
        for m in (2, 3, 6):
            excess = laguerre_f_excess(m, t, ctx)
            direct = laguerre_kernel_f(m, t, ctx) - math.factorial(m - 1) / mpf(2)
            assert excess.contains(direct)

    @pytest.mark.parametrize("t", ["1e-3", "0.7", "3", "12"])
    def test_prime_gap(self, ctx, t):
        """laguerre_f_prime_gap = m!/12 - f_m'."""
        for m in (1, 2, 5):
            gap = laguerre_f_prime_gap(m, t, ctx)
            direct = mpf(math.factorial(m)) / 12 - laguerre_kernel_f_prime(m, t, ctx)
            assert gap.contains(direct)

    @pytest.mark.parametrize("t", ["0.5", "4"])
    def test_integrated_excess_for_m2(self, ctx, t):
        """For m = 2 the integrated excess is (t/2) coth(t/2) - 1."""
        t = mpf(t)
        expected = t / 2 * mpmath.coth(t / 2) - 1
        assert integrated_excess(2, t, ctx).contains(expected)

    def test_k_bound_at_six(self, ctx):
        """K(6, 1) is about 0.0107."""
        value = k_bound(6, 1, ctx)
        assert mpf("0.0107") < value.lower
        assert value.upper < mpf("0.0108")

    def test_index_domain(self, ctx):
        """m < 1 is rejected."""
        with pytest.raises(DomainError):
            laguerre_kernel_f(0, 1, ctx)

    def test_f1_has_no_integral_form(self, ctx):
        """The s-integral form needs m >= 2."""
        with pytest.raises(UnsupportedError):
            laguerre_kernel_f(1, 1, ctx, Representation.INTEGRAL)


class TestLimitKernel:
    """Test s(t) and s'(t)."""

    def test_values_at_zero(self, ctx):
        """s(0) = 1/2 and s'(0) = 1/12 exactly."""
        assert s_kernel(0, ctx).value == mpf(1) / 2
        assert s_kernel_prime(0, ctx).value == mpf(1) / 12

    def test_small_t(self, ctx):
        """s(t) = 1/2 + t/12 + O(t^3)."""
        t = mpf("1e-4")
        assert abs(s_kernel(t, ctx).value - (mpf(1) / 2 + t / 12)) < mpf("1e-12")

    @pytest.mark.parametrize("t", [0.5, 3.0, 40.0, 700.0])
    def test_float_scan_matches(self, ctx, t):
        """The float64 evaluation lies within its bound of the precise value."""
        import numpy as np

        values, errors = s_kernel_float(np.array([t]))
        precise = s_kernel(t, ctx)
        slack = mpf(float(errors[0])) + precise.err_bound
        assert abs(mpf(float(values[0])) - precise.value) <= slack

    def test_prime_bounded(self, ctx):
        """|s'(t)| <= 1/12 on a sample of points."""
        for t in ["0.1", "2", "17", "150", "900"]:
            assert abs(s_kernel_prime(t, ctx).value) <= mpf(1) / 12

    def test_scaled_laguerre_kernel_approaches_s(self, ctx):
        """f_m(t/(m-1))/(m-1)! gets closer to s(t) as m grows."""
        t = mpf(2)
        limit = s_kernel(t, ctx).value
        gaps = [
            abs(laguerre_kernel_f(m, t / (m - 1), ctx).value / math.factorial(m - 1) - limit)
            for m in (5, 10, 20, 40)
        ]
        assert gaps == sorted(gaps, reverse=True)
