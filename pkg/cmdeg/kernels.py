"""
Laplace kernels of the Stirling remainders and their relatives.

Every evaluator returns an ``HPReal`` whose error bound covers truncation of
the series or sum used plus rounding. Two families of kernels live here:

* Binet kernels ``g_n`` and ``f_n = t g_n`` together with the generic moment
  kernels ``(d/dt)^alpha [t^m g_{n-1}(t)]``. Small arguments use the Bernoulli
  series, larger ones the exponential sum obtained from ``coth``.
* Bose kernels ``(d/dt)^d [t^p / (1 - e^{-t})]``, which include the Laguerre
  kernels ``f_m`` and their derivatives, plus the limiting kernel ``s``.
"""

from __future__ import annotations

import logging
import math
from collections.abc import Iterable
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from functools import lru_cache

import mpmath
import numpy as np
from mpmath import mp, mpf

from .conf import settings
from .exceptions import DomainError, PrecisionError, UnsupportedError
from .models import HPReal, PrecisionContext, to_mpf
from .special import _laguerre_raw, bernoulli

logger = logging.getLogger(__name__)

MAX_SERIES_TERMS = 600
MAX_SUM_TERMS = 200_000
# Direct sums for s(t) longer than this are logged as slow.
S_DIRECT_WARN = 1_000_000
# Series whose terms exceed their sum by this factor are recomputed in raised precision.
CANCELLATION_LIMIT = 10**5


class KernelFamily(str, Enum):
    BINET_F = "binet-f"
    BINET_G = "binet-g"
    LAGUERRE_F = "laguerre-f"
    S_KERNEL = "s"


class Representation(str, Enum):
    AUTO = "auto"
    SMALL_T_SERIES = "series"
    EXPONENTIAL_SUM = "exp-sum"
    LAGUERRE_SUM = "laguerre-sum"
    INTEGRAL = "integral"
    CLOSED_FORM = "closed-form"


@dataclass(frozen=True)
class KernelSpec:
    """Names one kernel: its family, index, derivative order and representation.

    ``index`` is ``n`` for the Binet families and ``m`` for the Laguerre family;
    it is ignored for ``s``.
    """

    family: KernelFamily
    index: int = 0
    deriv_order: int = 0
    representation: Representation = Representation.AUTO

    def __post_init__(self) -> None:
        if self.deriv_order < 0:
            raise DomainError("deriv_order must be non-negative")
        if self.family in (KernelFamily.BINET_F, KernelFamily.BINET_G) and self.index < 0:
            raise DomainError(f"Binet kernel index must be non-negative, got {self.index}")
        if self.family is KernelFamily.BINET_G and self.deriv_order > 2 * self.index + 2:
            raise UnsupportedError(
                f"g_{self.index} derivatives are tracked up to order {2 * self.index + 2}"
            )
        if self.family is KernelFamily.LAGUERRE_F and self.index < 1:
            raise DomainError(f"Laguerre kernel index must be >= 1, got {self.index}")
        if self.family is KernelFamily.S_KERNEL and self.deriv_order > 1:
            raise UnsupportedError("only s and s' are available")

    @property
    def label(self) -> str:
        name = {
            KernelFamily.BINET_F: f"f_{self.index}",
            KernelFamily.BINET_G: f"g_{self.index}",
            KernelFamily.LAGUERRE_F: f"F_{self.index}",
            KernelFamily.S_KERNEL: "s",
        }[self.family]
        if self.deriv_order:
            name += f"^({self.deriv_order})"
        return name

    def __call__(self, t: object, ctx: PrecisionContext | None = None) -> HPReal:
        return evaluate_kernel(self, t, ctx)


def _sign(k: int) -> int:
    return -1 if k % 2 else 1


def _falling(p: int, alpha: int) -> int:
    """p (p - 1) ... (p - alpha + 1) for any integer p."""
    result = 1
    for i in range(alpha):
        result *= p - i
    return result


@lru_cache(maxsize=None)
def _even_bernoulli_ratio(j: int) -> Fraction:
    """B_{2j} / (2j)!"""
    return bernoulli(2 * j) / math.factorial(2 * j)


@lru_cache(maxsize=None)
def _bose_coefficient(j: int) -> Fraction:
    """Coefficient of t^(j-1) in 1 / (1 - e^{-t})."""
    return _sign(j) * bernoulli(j) / math.factorial(j)


def _as_mpf(value: Fraction) -> mpf:
    return mpf(value.numerator) / value.denominator


def _series_cutoff() -> mpf:
    return mpf(getattr(settings, "CMDEG_SERIES_CUTOFF", 2.0))


def _check_t(t: mpf) -> None:
    if t <= 0:
        raise DomainError(f"kernel argument must be positive, got {t}")


def _check_series_radius(t: mpf) -> None:
    if t >= 2 * mp.pi:
        raise UnsupportedError("the small-t series only converges for t < 2*pi")


def _done(tail: mpf, total: mpf, magnitude: mpf, ctx: PrecisionContext) -> bool:
    return tail <= ctx.series_tol * abs(total) or tail <= ctx.eps * magnitude


# ---------------------------------------------------------------------------
# Moment kernels (d/dt)^alpha [t^m g_{n-1}(t)]
# ---------------------------------------------------------------------------


def _moment_series(n: int, m: int, alpha: int, t: mpf, ctx: PrecisionContext) -> HPReal:
    # t^m g_{n-1}(t) = (-1)^n sum_{j>n} B_2j/(2j)! t^(2j-2+m), |B_2j|/(2j)! <= 4/(2 pi)^2j
    _check_series_radius(t)
    two_pi = 2 * mp.pi
    r2 = (t / two_pi) ** 2
    terms: list[mpf] = []
    magnitude = mpf(0)
    for j in range(n + 1, n + 1 + MAX_SERIES_TERMS):
        power = 2 * j - 2 + m
        coefficient = _falling(power, alpha)
        if coefficient == 0:
            continue
        term = _as_mpf(_even_bernoulli_ratio(j)) * coefficient * t ** (power - alpha)
        terms.append(term)
        magnitude += abs(term)

        next_power = power + 2
        ratio = (
            mpf((next_power + 2) * (next_power + 1))
            / ((next_power + 2 - alpha) * (next_power + 1 - alpha))
            * r2
        )
        if ratio >= 1:
            continue
        bound = 4 * _falling(next_power, alpha) * t ** (next_power - alpha) / two_pi ** (2 * j + 2)
        tail = bound / (1 - ratio)
        total = mpmath.fsum(terms)
        if _done(tail, total, magnitude, ctx):
            return HPReal(_sign(n) * total, tail + 10 * magnitude * ctx.eps)
    raise PrecisionError(
        f"series for t^{m} g_{n - 1} derivative {alpha} at t={mp.nstr(t, 8)} needs too many terms"
    )


def laurent_terms(n: int, m: int, alpha: int) -> list[tuple[Fraction, int]]:
    """Non-exponential part of ``(-1)^(n-1) (d/dt)^alpha [t^m g_{n-1}(t)]``.

    Returns ``(coefficient, power)`` pairs with non-zero coefficients. The rest
    of the kernel is ``-(d/dt)^alpha [t^(m-1) sum_k e^{-kt}]``.
    """
    raw: list[tuple[Fraction, int]] = [(Fraction(1), m - 2), (Fraction(-1, 2), m - 1)]
    raw += [(_even_bernoulli_ratio(k), 2 * k - 2 + m) for k in range(1, n + 1)]
    terms = []
    for coefficient, power in raw:
        derived = coefficient * _falling(power, alpha)
        if derived:
            terms.append((derived, power - alpha))
    return terms


def exponential_weights(m: int, alpha: int) -> list[tuple[int, int, int]]:
    """Leibniz expansion of ``(d/dt)^alpha [t^(m-1) e^{-kt}]``.

    Each ``(c, i, j)`` contributes ``c t^i (-k)^j e^{-kt}``.
    """
    q = m - 1
    weights = []
    for i in range(alpha + 1):
        c = math.comb(alpha, i) * _falling(q, i)
        if c:
            weights.append((c, q - i, alpha - i))
    return weights


def exponential_envelope(m: int, alpha: int, t: mpf, k: int) -> mpf:
    """Upper bound ``M_k(t)`` with ``|k-th exponential term| <= M_k(t) e^{-kt}``."""
    return mpmath.fsum(abs(c) * t**i * mpf(k) ** j for c, i, j in exponential_weights(m, alpha))


def _moment_exponential(n: int, m: int, alpha: int, t: mpf, ctx: PrecisionContext) -> HPReal:
    raised = ctx.raised(alpha + m + 2 * n + 10)
    with raised.workdps():
        terms = [_as_mpf(c) * t**p for c, p in laurent_terms(n, m, alpha)]
        magnitude = mpmath.fsum(abs(x) for x in terms)
        weights = exponential_weights(m, alpha)
        decay = mpmath.exp(-t)
        ek = mpf(1)
        for k in range(1, MAX_SUM_TERMS):
            ek *= decay
            term = -ek * mpmath.fsum(c * t**i * (-k) ** j for c, i, j in weights)
            terms.append(term)
            magnitude += abs(term)
            rho = (mpf(k + 2) / (k + 1)) ** alpha * decay
            if rho >= 1:
                continue
            tail = exponential_envelope(m, alpha, t, k + 1) * ek * decay / (1 - rho)
            total = mpmath.fsum(terms)
            if _done(tail, total, magnitude, ctx):
                return HPReal(_sign(n - 1) * total, tail + 10 * magnitude * raised.eps)
    raise PrecisionError(f"exponential sum for t={mp.nstr(t, 8)} did not converge")


def moment_kernel_deriv(
    n: int,
    m: int,
    alpha: int,
    t: object,
    ctx: PrecisionContext | None = None,
    representation: Representation = Representation.AUTO,
) -> HPReal:
    """Evaluate ``(d/dt)^alpha [t^m g_{n-1}(t)]``.

    This is the Laplace kernel of ``(-1)^(m+alpha) x^alpha`` times the
    ``(m + alpha)``-th derivative of ``R_n``, up to boundary terms, which
    vanish while ``alpha <= m + 2n``. ``n = 0`` gives ``g_{-1} = -h``.

    Raises:
        DomainError: If an index is negative or ``t <= 0``.
        UnsupportedError: For representations other than series or exp-sum.
    """
    if n < 0 or m < 0 or alpha < 0:
        raise DomainError(f"moment kernel indices must be non-negative, got {n}, {m}, {alpha}")
    ctx = ctx or PrecisionContext.from_settings()
    with ctx.workdps():
        t = to_mpf(t)
        _check_t(t)
        if representation is Representation.AUTO:
            representation = (
                Representation.SMALL_T_SERIES
                if t < _series_cutoff()
                else Representation.EXPONENTIAL_SUM
            )
        if representation is Representation.SMALL_T_SERIES:
            return _moment_series(n, m, alpha, t, ctx)
        if representation is Representation.EXPONENTIAL_SUM:
            return _moment_exponential(n, m, alpha, t, ctx)
    raise UnsupportedError(f"moment kernels have no {representation.value} representation")


def _binet_coth(n: int, t: mpf, ctx: PrecisionContext, times_t: bool) -> HPReal:
    # cancels about 2n digits near 0, so it is refused below t = 1
    if t < 1:
        raise UnsupportedError("the coth closed form is not used below t = 1")
    raised = ctx.raised(2 * n + 10)
    with raised.workdps():
        parts = [1 / t**2, -mpmath.coth(t / 2) / (2 * t)]
        parts += [_as_mpf(_even_bernoulli_ratio(k)) * t ** (2 * k - 2) for k in range(1, n + 2)]
        total = mpmath.fsum(parts)
        magnitude = mpmath.fsum(abs(x) for x in parts)
        if times_t:
            total *= t
            magnitude *= t
        return HPReal(_sign(n) * total, 10 * magnitude * raised.eps)


def binet_g(
    n: int,
    t: object,
    ctx: PrecisionContext | None = None,
    representation: Representation = Representation.AUTO,
) -> HPReal:
    """The Binet kernel g_n(t) = f_n(t) / t, positive with g_n ~ |B_{2n+4}| t^(2n+2) / (2n+4)!."""
    if n < 0:
        raise DomainError(f"binet_g requires n >= 0, got {n}")
    ctx = ctx or PrecisionContext.from_settings()
    if representation is Representation.CLOSED_FORM:
        with ctx.workdps():
            t = to_mpf(t)
            _check_t(t)
            return _binet_coth(n, t, ctx, times_t=False)
    return moment_kernel_deriv(n + 1, 0, 0, t, ctx, representation)


def binet_f(
    n: int,
    t: object,
    ctx: PrecisionContext | None = None,
    representation: Representation = Representation.AUTO,
) -> HPReal:
    """The Binet kernel f_n(t), the Laplace kernel of R_{n+1}'s companion form.

    Near 0 it is the Bernoulli series; from ``CMDEG_SERIES_CUTOFF`` on the
    exponential sum is used. ``CLOSED_FORM`` evaluates the ``coth`` formula
    directly in raised precision and is refused for ``t < 1``.
    """
    if n < 0:
        raise DomainError(f"binet_f requires n >= 0, got {n}")
    ctx = ctx or PrecisionContext.from_settings()
    if representation is Representation.CLOSED_FORM:
        with ctx.workdps():
            t = to_mpf(t)
            _check_t(t)
            return _binet_coth(n, t, ctx, times_t=True)
    return moment_kernel_deriv(n + 1, 1, 0, t, ctx, representation)


def binet_g_deriv(
    n: int,
    j: int,
    t: object,
    ctx: PrecisionContext | None = None,
    representation: Representation = Representation.AUTO,
) -> HPReal:
    """The j-th derivative of g_n at t for ``0 <= j <= 2n + 2``.

    ``INTEGRAL`` uses the oscillatory log-moment representation and exists
    for ``j = 2n`` and ``j = 2n + 1`` only.
    """
    if n < 0 or j < 0:
        raise DomainError(f"binet_g_deriv requires n, j >= 0, got {n}, {j}")
    if j > 2 * n + 2:
        raise UnsupportedError(f"g_{n} derivatives are tracked up to order {2 * n + 2}")
    ctx = ctx or PrecisionContext.from_settings()
    if representation is Representation.INTEGRAL:
        from .quadrature import osc_log_moment, osc_sine_moment

        if j == 2 * n:
            return osc_log_moment(n, t, ctx).value
        if j == 2 * n + 1:
            return osc_sine_moment(n, t, ctx).value
        raise UnsupportedError("the integral representation covers j = 2n and j = 2n + 1 only")
    if representation is Representation.CLOSED_FORM:
        if j:
            raise UnsupportedError("the coth closed form is only used for j = 0")
        return binet_g(n, t, ctx, representation)
    return moment_kernel_deriv(n + 1, 0, j, t, ctx, representation)


def theta(x: mpf) -> mpf:
    """2 log(1 - e^{-x}), the weight of the oscillatory log-moments."""
    return 2 * mpmath.log1p(-mpmath.exp(-x))


def theta_prime(x: mpf) -> mpf:
    return 2 / mpmath.expm1(x)


# ---------------------------------------------------------------------------
# Bose kernels (d/dt)^d [t^p / (1 - e^{-t})]
# ---------------------------------------------------------------------------


def _bose_series(
    p: int, d: int, t: mpf, ctx: PrecisionContext, exclude: Iterable[int] = ()
) -> tuple[HPReal, mpf]:
    _check_series_radius(t)
    skip = frozenset(exclude)
    two_pi = 2 * mp.pi
    r2 = (t / two_pi) ** 2
    terms: list[mpf] = []
    magnitude = mpf(0)
    j = 0
    while j < MAX_SERIES_TERMS:
        power = j + p - 1
        coefficient = _bose_coefficient(j) * _falling(power, d)
        if coefficient and j not in skip:
            term = _as_mpf(coefficient) * t ** (power - d)
            terms.append(term)
            magnitude += abs(term)
        j = j + 1 if j < 2 else j + 2
        if not terms or j < 2:
            continue
        first = max(j, d - p + 1)
        first += first % 2
        next_power = first + p - 1
        ratio = (
            mpf((next_power + 2) * (next_power + 1))
            / ((next_power + 2 - d) * (next_power + 1 - d))
            * r2
        )
        if ratio >= 1:
            continue
        bound = 4 * _falling(next_power, d) * t ** (next_power - d) / two_pi**first
        tail = bound / (1 - ratio)
        total = mpmath.fsum(terms)
        if _done(tail, total, magnitude, ctx):
            return HPReal(total, tail + 10 * magnitude * ctx.eps), magnitude
    raise PrecisionError(f"Bose series at t={mp.nstr(t, 8)} needs too many terms")


def _bose_laguerre(p: int, d: int, t: mpf, ctx: PrecisionContext) -> HPReal:
    # k-th term of d^d [t^p e^{-kt}] via Rodrigues' formula; |L_n^(a)(x)| <= C(n+a, n) e^{x/2}
    if d not in (p - 1, p, p + 1) or d < 0:
        raise UnsupportedError(f"no Laguerre sum for order {d} of t^{p}/(1 - e^-t)")
    decay = mpmath.exp(-t)
    q = mpmath.exp(-t / 2)
    scale = mpf(math.factorial(p))
    terms: list[mpf] = []
    magnitude = mpf(0)
    ek = mpf(1)
    qk = mpf(1)
    for k in range(MAX_SUM_TERMS):
        kt = k * t
        if d == p:
            lag, _ = _laguerre_raw(p, kt)
            term = scale * ek * lag
        elif d == p + 1:
            lag, lag_prev = _laguerre_raw(p, kt)
            term = scale * ek * (p * (lag - lag_prev) / t - k * lag)
        else:
            lag, _ = _laguerre_raw(p - 1, kt, alpha=1)
            term = scale / p * t * ek * lag
        terms.append(term)
        magnitude += abs(term)
        ek *= decay
        qk *= q
        if d == p:
            tail = scale * qk / (1 - q)
        elif d == p + 1:
            tail = scale * (
                2 * p / t * qk / (1 - q) + qk * ((k + 1) - k * q) / (1 - q) ** 2
            )
        else:
            tail = scale * t * qk / (1 - q)
        total = mpmath.fsum(terms)
        if k and _done(tail, total, magnitude, ctx):
            rounding = 20 * (p + 2) * scale * ctx.eps / (1 - q)
            return HPReal(total, tail + rounding)
    raise PrecisionError(f"Laguerre sum at t={mp.nstr(t, 8)} did not converge")


def bose_kernel(
    power: int,
    order: int,
    t: object,
    ctx: PrecisionContext | None = None,
    representation: Representation = Representation.AUTO,
    exclude: Iterable[int] = (),
) -> HPReal:
    """Evaluate ``(d/dt)^order [t^power / (1 - e^{-t})]``.

    ``exclude`` drops the listed terms of the small-t series
    ``sum_j (-1)^j B_j / j! t^(j + power - 1)`` before differentiating, and
    the same terms are subtracted exactly on the other representations.
    """
    if power < 0 or order < 0:
        raise DomainError(f"bose_kernel requires power, order >= 0, got {power}, {order}")
    ctx = ctx or PrecisionContext.from_settings()
    with ctx.workdps():
        t = to_mpf(t)
        _check_t(t)
        if representation is Representation.AUTO:
            laguerre_ok = order in (power - 1, power, power + 1)
            if t < _series_cutoff() or not laguerre_ok:
                representation = Representation.SMALL_T_SERIES
            else:
                representation = Representation.LAGUERRE_SUM
        if representation is Representation.SMALL_T_SERIES:
            value, magnitude = _bose_series(power, order, t, ctx, exclude)
            # alternating terms far larger than the sum: redo with the lost digits added
            if magnitude > CANCELLATION_LIMIT * abs(value.value):
                lost = magnitude / max(abs(value.value), ctx.eps * magnitude)
                raised = ctx.raised(math.ceil(float(mpmath.log10(lost))) + 5)
                logger.debug(
                    "Bose series at t=%s recomputed with %d digits",
                    mp.nstr(t, 8),
                    raised.working_digits,
                )
                with raised.workdps():
                    value, _ = _bose_series(power, order, t, raised, exclude)
            return value
        if representation is Representation.LAGUERRE_SUM:
            value = _bose_laguerre(power, order, t, ctx)
            for j in exclude:
                coefficient = _bose_coefficient(j) * _falling(j + power - 1, order)
                if coefficient:
                    term = _as_mpf(coefficient) * t ** (j + power - 1 - order)
                    value = value - HPReal.exact(term)
            return value
    raise UnsupportedError(f"Bose kernels have no {representation.value} representation")


def _check_m(m: int) -> None:
    if m < 1:
        raise DomainError(f"Laguerre kernel index must be >= 1, got {m}")


def _mode_tail(
    m: int, a: mpf, first: int, odd: bool, ctx: PrecisionContext
) -> tuple[mpf, mpf]:
    """Sum over k >= first of Im[(1 - i a/k)^-m] / k (odd) or Re[...] / k^2.

    Expands each mode in powers of a/k and sums over k with Hurwitz zeta.
    Requires ``a / first <= 1/4``.
    """
    r2 = (a / first) ** 2
    terms: list[mpf] = []
    for q in range(MAX_SERIES_TERMS):
        if odd:
            c, c_next = math.comb(m + 2 * q, 2 * q + 1), math.comb(m + 2 * q + 2, 2 * q + 3)
            term = _sign(q) * c * a ** (2 * q + 1) * mpmath.zeta(2 * q + 2, first)
        else:
            c, c_next = math.comb(m + 2 * q - 1, 2 * q), math.comb(m + 2 * q + 1, 2 * q + 2)
            term = _sign(q) * c * a ** (2 * q) * mpmath.zeta(2 * q + 2, first)
        terms.append(term)
        ratio = (mpf(c_next) / c if c else mpf(0)) * r2
        if ratio < mpf(1) / 2:
            tail = abs(term) * ratio / (1 - ratio)
            total = mpmath.fsum(terms)
            if _done(tail, total, abs(total), ctx):
                return total, tail
    raise PrecisionError("Hurwitz tail of the mode sum did not converge")


def _mode_sum(m: int, t: mpf, odd: bool, ctx: PrecisionContext) -> HPReal:
    a = t / (2 * mp.pi)
    direct_terms = max(8, math.ceil(4 * a))
    terms = []
    for k in range(1, direct_terms + 1):
        mode = mpmath.mpc(1, -a / k) ** (-m)
        terms.append(mode.imag / k if odd else mode.real / k**2)
    tail, tail_err = _mode_tail(m, a, direct_terms + 1, odd, ctx)
    total = mpmath.fsum(terms) + tail
    return HPReal(total, tail_err + 10 * direct_terms * ctx.eps * (1 + abs(total)))


def _laguerre_f_integral(m: int, t: mpf, ctx: PrecisionContext, prime: bool) -> HPReal:
    # f_m = (m-1)!/2 + ((m-1)!/pi) sum_k Im[(1 - i t/(2 pi k))^-m] / k
    if m < 2:
        raise UnsupportedError("the s-integral representation needs m >= 2")
    _check_series_radius(t)
    if prime:
        modes = _mode_sum(m + 1, t, odd=False, ctx=ctx)
        return modes * (mpf(math.factorial(m)) / (2 * mp.pi**2))
    modes = _mode_sum(m, t, odd=True, ctx=ctx)
    scale = mpf(math.factorial(m - 1))
    return modes * (scale / mp.pi) + scale / 2


def laguerre_kernel_f(
    m: int,
    t: object,
    ctx: PrecisionContext | None = None,
    representation: Representation = Representation.AUTO,
) -> HPReal:
    """The Laguerre kernel f_m(t) = (d/dt)^(m-1) [t^(m-1) / (1 - e^{-t})].

    ``f_m(0) = (m-1)!/2`` for ``m >= 2``; ``f_1`` blows up at 0.
    """
    _check_m(m)
    ctx = ctx or PrecisionContext.from_settings()
    with ctx.workdps():
        t = to_mpf(t)
        if t == 0 and m >= 2:
            return HPReal.exact(mpf(math.factorial(m - 1)) / 2)
        _check_t(t)
        if representation is Representation.INTEGRAL:
            return _laguerre_f_integral(m, t, ctx, prime=False)
    return bose_kernel(m - 1, m - 1, t, ctx, representation)


def laguerre_kernel_f_prime(
    m: int,
    t: object,
    ctx: PrecisionContext | None = None,
    representation: Representation = Representation.AUTO,
) -> HPReal:
    """Derivative f_m'(t); tends to m!/12 as t -> 0 for m >= 2."""
    _check_m(m)
    ctx = ctx or PrecisionContext.from_settings()
    with ctx.workdps():
        t = to_mpf(t)
        if t == 0 and m >= 2:
            return HPReal.exact(mpf(math.factorial(m)) / 12)
        _check_t(t)
        if representation is Representation.INTEGRAL:
            return _laguerre_f_integral(m, t, ctx, prime=True)
    return bose_kernel(m - 1, m, t, ctx, representation)


def laguerre_f_excess(
    m: int,
    t: object,
    ctx: PrecisionContext | None = None,
    representation: Representation = Representation.AUTO,
) -> HPReal:
    """f_m(t) - (m-1)!/2, computed without cancellation near 0."""
    _check_m(m)
    return bose_kernel(m - 1, m - 1, t, ctx, representation, exclude=(1,))


def laguerre_f_prime_gap(
    m: int,
    t: object,
    ctx: PrecisionContext | None = None,
    representation: Representation = Representation.AUTO,
) -> HPReal:
    """m!/12 - f_m'(t), the kernel certifying the first derivative bracket."""
    _check_m(m)
    return -bose_kernel(m - 1, m, t, ctx, representation, exclude=(2,))


def integrated_excess(
    m: int,
    t: object,
    ctx: PrecisionContext | None = None,
    representation: Representation = Representation.AUTO,
) -> HPReal:
    """(d/dt)^(m-2) [t^(m-1) / (1 - e^{-t})] - (m-1)! t/2 - (m-2)!.

    Equals the integral of ``f_m - (m-1)!/2`` over ``[0, t]``.
    """
    if m < 2:
        raise DomainError(f"integrated_excess requires m >= 2, got {m}")
    return bose_kernel(m - 1, m - 2, t, ctx, representation, exclude=(0, 1))


def k_bound(t: object, m: int, ctx: PrecisionContext | None = None) -> HPReal:
    """K(t, m) = m/12 - 2m q / (t (1 - q)) - 1 / (4 sinh^2(t/4)), q = e^{-t/2}.

    ``(m-1)! K(t, m)`` is a lower bound for ``m!/12 - f_m'(t)``.
    """
    _check_m(m)
    ctx = ctx or PrecisionContext.from_settings()
    with ctx.workdps():
        t = to_mpf(t)
        _check_t(t)
        q = mpmath.exp(-t / 2)
        parts = [mpf(m) / 12, -2 * m * q / (t * (1 - q)), -1 / (4 * mpmath.sinh(t / 4) ** 2)]
        return HPReal(mpmath.fsum(parts), 10 * mpmath.fsum(abs(x) for x in parts) * ctx.eps)


# ---------------------------------------------------------------------------
# The limiting kernel s(t) = 1/2 + (1/pi) sum_k sin(t / (2 pi k)) / k
# ---------------------------------------------------------------------------


def _s_sum(t: mpf, ctx: PrecisionContext, prime: bool) -> HPReal:
    a = t / (2 * mp.pi)
    direct_terms = max(8, math.ceil(4 * abs(a)))
    if direct_terms > S_DIRECT_WARN:
        logger.warning("s kernel at t=%s sums %d terms directly", mp.nstr(t, 8), direct_terms)
    if prime:
        direct = mpmath.fsum(mpmath.cos(a / k) / k**2 for k in range(1, direct_terms + 1))
    else:
        direct = mpmath.fsum(mpmath.sin(a / k) / k for k in range(1, direct_terms + 1))

    first = direct_terms + 1
    tail_terms: list[mpf] = []
    omitted = None
    for p in range(MAX_SERIES_TERMS):
        if prime:
            term = _sign(p) * a ** (2 * p) / math.factorial(2 * p) * mpmath.zeta(2 * p + 2, first)
        else:
            term = (
                _sign(p) * a ** (2 * p + 1) / math.factorial(2 * p + 1)
                * mpmath.zeta(2 * p + 2, first)
            )
        if tail_terms and abs(term) <= ctx.series_tol:
            omitted = abs(term)
            break
        tail_terms.append(term)
    if omitted is None:
        raise PrecisionError("Hurwitz tail of s did not converge")

    total = direct + mpmath.fsum(tail_terms)
    rounding = 10 * direct_terms * ctx.eps
    if prime:
        return HPReal(total / (2 * mp.pi**2), (omitted + rounding) / (2 * mp.pi**2))
    return HPReal(mpf(1) / 2 + total / mp.pi, (omitted + rounding) / mp.pi)


def s_kernel(t: object, ctx: PrecisionContext | None = None) -> HPReal:
    """s(t) = 1/2 + (1/pi) sum_k sin(t / (2 pi k)) / k, the m -> oo limit of f_m.

    Terms up to ``4 |t| / (2 pi)`` are summed directly; the remainder is
    expanded in powers of ``t`` and summed with the Hurwitz zeta function, an
    alternating series whose first omitted term bounds the error.
    """
    ctx = ctx or PrecisionContext.from_settings()
    with ctx.workdps():
        t = to_mpf(t)
        if t == 0:
            return HPReal.exact(mpf(1) / 2)
        return _s_sum(t, ctx, prime=False)


def s_kernel_prime(t: object, ctx: PrecisionContext | None = None) -> HPReal:
    """s'(t) = (1 / (2 pi^2)) sum_k cos(t / (2 pi k)) / k^2, with s'(0) = 1/12."""
    ctx = ctx or PrecisionContext.from_settings()
    with ctx.workdps():
        t = to_mpf(t)
        if t == 0:
            return HPReal.exact(mpf(1) / 12)
        return _s_sum(t, ctx, prime=True)


def s_kernel_float(
    t_values: np.ndarray, chunk: int = 1 << 20
) -> tuple[np.ndarray, np.ndarray]:
    """Vectorised float64 s(t) with a rigorous rounding bound per point.

    Returns ``(values, err_bounds)``. Used for coarse scans far beyond the
    range where the high-precision sum is affordable.
    """
    eps = np.finfo(np.float64).eps
    t_values = np.asarray(t_values, dtype=np.float64)
    values = np.empty_like(t_values)
    errors = np.empty_like(t_values)
    with mp.workdps(30):
        for index, t in enumerate(t_values):
            a = t / (2 * np.pi)
            direct_terms = max(8, math.ceil(4 * abs(a)))
            total = 0.0
            absolute = 0.0
            for start in range(1, direct_terms + 1, chunk):
                k = np.arange(start, min(start + chunk, direct_terms + 1), dtype=np.float64)
                block = np.sin(a / k) / k
                total += float(np.sum(block))
                absolute += float(np.sum(np.abs(block)))
            tail = mpf(0)
            first = direct_terms + 1
            for p in range(40):
                term = (
                    _sign(p) * mpf(a) ** (2 * p + 1) / math.factorial(2 * p + 1)
                    * mpmath.zeta(2 * p + 2, first)
                )
                tail += term
                if abs(term) < 1e-30:
                    break
            values[index] = 0.5 + (total + float(tail)) / np.pi
            # each term carries a few ulps and the sum at most n ulps of the absolute sum
            errors[index] = ((direct_terms + 8) * absolute + 2 * abs(a)) * eps / np.pi + 4 * eps
    return values, errors


_REPRESENTATIONS_BY_FAMILY = {
    KernelFamily.BINET_F: {
        Representation.AUTO,
        Representation.SMALL_T_SERIES,
        Representation.EXPONENTIAL_SUM,
        Representation.CLOSED_FORM,
    },
    KernelFamily.BINET_G: set(Representation) - {Representation.LAGUERRE_SUM},
    KernelFamily.LAGUERRE_F: {
        Representation.AUTO,
        Representation.SMALL_T_SERIES,
        Representation.LAGUERRE_SUM,
        Representation.INTEGRAL,
    },
    KernelFamily.S_KERNEL: {Representation.AUTO},
}


def evaluate_kernel(spec: KernelSpec, t: object, ctx: PrecisionContext | None = None) -> HPReal:
    """Evaluate the kernel named by *spec* at *t*."""
    if spec.representation not in _REPRESENTATIONS_BY_FAMILY[spec.family]:
        raise UnsupportedError(
            f"{spec.family.value} kernels have no {spec.representation.value} representation"
        )
    rep = spec.representation
    if spec.family is KernelFamily.BINET_G:
        return binet_g_deriv(spec.index, spec.deriv_order, t, ctx, rep)
    if spec.family is KernelFamily.BINET_F:
        if spec.deriv_order == 0:
            return binet_f(spec.index, t, ctx, rep)
        if rep is Representation.CLOSED_FORM:
            raise UnsupportedError("the coth closed form is only used without derivatives")
        return moment_kernel_deriv(spec.index + 1, 1, spec.deriv_order, t, ctx, rep)
    if spec.family is KernelFamily.LAGUERRE_F:
        if spec.deriv_order == 0:
            return laguerre_kernel_f(spec.index, t, ctx, rep)
        if spec.deriv_order == 1:
            return laguerre_kernel_f_prime(spec.index, t, ctx, rep)
        return bose_kernel(spec.index - 1, spec.index - 1 + spec.deriv_order, t, ctx, rep)
    if spec.deriv_order == 0:
        return s_kernel(t, ctx)
    return s_kernel_prime(t, ctx)
