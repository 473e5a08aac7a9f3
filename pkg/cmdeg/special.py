"""
Special functions with certified error bounds.

Bernoulli numbers are exact rationals. ``log_gamma`` and ``polygamma`` use an
argument shift followed by the Stirling series, which is enveloping for real
arguments, so the first omitted term bounds the truncation error.
"""

from __future__ import annotations

import logging
import math
import threading
from fractions import Fraction

import mpmath
from mpmath import mp, mpf

from .exceptions import DomainError, PrecisionError
from .models import ExactRational, HPReal, PrecisionContext, to_mpf

logger = logging.getLogger(__name__)

_BERNOULLI: list[Fraction] = [Fraction(1), Fraction(-1, 2)]
_BERNOULLI_LOCK = threading.Lock()

# Stirling terms are never summed beyond this index.
MAX_STIRLING_TERMS = 2000


def bernoulli(k: int) -> ExactRational:
    """Return the exact Bernoulli number B_k (convention B_1 = -1/2).

    Values are memoized. The table only ever grows, under a lock, so
    concurrent readers see either a complete entry or none.

    Args:
        k: Index, ``k >= 0``.

    Returns:
        B_k as a ``Fraction``.

    Raises:
        DomainError: If ``k`` is negative.
    """
    if k < 0:
        raise DomainError(f"Bernoulli index must be non-negative, got {k}")
    if k < len(_BERNOULLI):
        return _BERNOULLI[k]
    with _BERNOULLI_LOCK:
        while len(_BERNOULLI) <= k:
            n = len(_BERNOULLI)
            if n % 2 == 1:
                _BERNOULLI.append(Fraction(0))
                continue
            # sum_{j<n} C(n+1, j) B_j = -(n+1) B_n, odd j >= 3 vanish
            total = Fraction(1) + (n + 1) * _BERNOULLI[1]
            for j in range(2, n, 2):
                total += math.comb(n + 1, j) * _BERNOULLI[j]
            _BERNOULLI.append(-total / (n + 1))
    return _BERNOULLI[k]


def bernoulli_mpf(k: int) -> mpf:
    """B_k rounded to the current mpmath precision."""
    value = bernoulli(k)
    return mpf(value.numerator) / value.denominator


def stirling_coefficient(k: int) -> ExactRational:
    """B_{2k} / (2k (2k - 1)), the k-th coefficient of the Stirling series."""
    if k < 1:
        raise DomainError(f"Stirling coefficient index must be >= 1, got {k}")
    return bernoulli(2 * k) / (2 * k * (2 * k - 1))


def _shift_target(ctx: PrecisionContext, order: int = 0) -> int:
    return math.ceil(2 * ctx.dps / 3) + order


def log_gamma(x: object, ctx: PrecisionContext | None = None) -> HPReal:
    """log Gamma(x) for real x > 0.

    The argument is shifted to ``y >= 2 D / 3`` (D the internal digits), where
    the Stirling series reaches the working tolerance long before its terms
    start to grow.

    Raises:
        DomainError: If ``x <= 0``.
    """
    ctx = ctx or PrecisionContext.from_settings()
    with ctx.workdps():
        x = to_mpf(x)
        if x <= 0:
            raise DomainError(f"log_gamma requires x > 0, got {x}")

        shift = max(0, math.ceil(_shift_target(ctx) - x))
        y = x + shift
        shifted = mpmath.log(mpmath.fprod(x + j for j in range(shift))) if shift else mpf(0)

        tol = ctx.series_tol
        head = (y - mpf(1) / 2) * mpmath.log(y) - y + mpmath.log(2 * mp.pi) / 2
        terms = [head]
        inv_y2 = 1 / (y * y)
        power = 1 / y
        omitted = None
        for k in range(1, MAX_STIRLING_TERMS):
            term = to_mpf(stirling_coefficient(k)) * power
            if abs(term) <= tol * abs(head):
                omitted = abs(term)
                break
            terms.append(term)
            power *= inv_y2
        if omitted is None:
            raise PrecisionError(f"Stirling series for log_gamma({x}) did not reach tolerance")

        value = mpmath.fsum(terms) - shifted
        rounding = (abs(head) + abs(shifted) + 1) * ctx.eps * 10
        return HPReal(value, omitted + rounding)


def polygamma(order: int, x: object, ctx: PrecisionContext | None = None) -> HPReal:
    """The polygamma function psi^(order)(x) for real x > 0.

    ``order = 0`` is the digamma function. Uses the recurrence
    ``psi^(n)(x) = psi^(n)(x + 1) - (-1)^n n! / x^(n+1)`` to reach the
    asymptotic region.

    Raises:
        DomainError: If ``order < 0`` or ``x <= 0``.
    """
    if order < 0:
        raise DomainError(f"polygamma order must be non-negative, got {order}")
    ctx = ctx or PrecisionContext.from_settings()
    with ctx.workdps():
        x = to_mpf(x)
        if x <= 0:
            raise DomainError(f"polygamma requires x > 0, got {x}")

        shift = max(0, math.ceil(_shift_target(ctx, order) - x))
        y = x + shift
        shifted = mpmath.fsum(1 / (x + j) ** (order + 1) for j in range(shift)) if shift else mpf(0)
        shifted *= math.factorial(order)

        if order == 0:
            head = [mpmath.log(y), -1 / (2 * y)]
        else:
            sign = 1 if order % 2 == 1 else -1
            head = [
                sign * math.factorial(order - 1) / y**order,
                sign * mpf(math.factorial(order)) / (2 * y ** (order + 1)),
            ]
        scale = abs(mpmath.fsum(head))

        tol = ctx.series_tol
        terms = list(head)
        omitted = None
        for k in range(1, MAX_STIRLING_TERMS):
            if order == 0:
                term = -bernoulli_mpf(2 * k) / (2 * k * y ** (2 * k))
            else:
                sign = 1 if order % 2 == 1 else -1
                term = (
                    sign
                    * bernoulli_mpf(2 * k)
                    * mpf(math.factorial(2 * k + order - 1))
                    / (math.factorial(2 * k) * y ** (2 * k + order))
                )
            if abs(term) <= tol * scale:
                omitted = abs(term)
                break
            terms.append(term)
        if omitted is None:
            raise PrecisionError(f"asymptotic series for polygamma({order}, {x}) diverged")

        asymptotic = mpmath.fsum(terms)
        value = asymptotic - (-1) ** order * shifted
        rounding = (abs(asymptotic) + abs(shifted)) * ctx.eps * 10
        return HPReal(value, omitted + rounding)


def _laguerre_raw(n: int, t: mpf, alpha: int = 0) -> tuple[mpf, mpf]:
    """Return ``(L_n^(alpha)(t), L_{n-1}^(alpha)(t))`` by upward recurrence.

    ``L_{-1}`` is taken as zero.
    """
    previous, current = mpf(0), mpf(1)
    for k in range(n):
        following = ((2 * k + 1 + alpha - t) * current - (k + alpha) * previous) / (k + 1)
        previous, current = current, following
    return current, previous


def _laguerre_derivative_raw(n: int, t: mpf) -> tuple[mpf, mpf]:
    """Return ``(L_n(t), L_n'(t))`` using the differentiated recurrence."""
    lag_prev, lag = mpf(0), mpf(1)
    der_prev, der = mpf(0), mpf(0)
    for k in range(n):
        lag_next = ((2 * k + 1 - t) * lag - k * lag_prev) / (k + 1)
        der_next = ((2 * k + 1 - t) * der - lag - k * der_prev) / (k + 1)
        lag_prev, lag = lag, lag_next
        der_prev, der = der, der_next
    return lag, der


def laguerre_bound(n: int, t: mpf, alpha: int = 0) -> mpf:
    """Upper bound ``C(n + alpha, n) e^(t/2)`` on ``|L_n^(alpha)(t)|`` for t >= 0."""
    return math.comb(n + alpha, n) * mpmath.exp(t / 2)


def laguerre(
    n: int, t: object, ctx: PrecisionContext | None = None, alpha: int = 0
) -> HPReal:
    """Generalized Laguerre polynomial L_n^(alpha)(t).

    Args:
        n: Degree, ``n >= 0``.
        t: Argument.
        ctx: Precision context.
        alpha: Non-negative integer order; 0 gives the classical polynomial.

    Raises:
        DomainError: If ``n < 0`` or ``alpha < 0``.
    """
    if n < 0 or alpha < 0:
        raise DomainError(f"Laguerre degree and order must be non-negative, got {n}, {alpha}")
    ctx = ctx or PrecisionContext.from_settings()
    with ctx.workdps():
        t = to_mpf(t)
        value, _ = _laguerre_raw(n, t, alpha)
        scale = laguerre_bound(n, abs(t), alpha) if t >= 0 else mpmath.exp(abs(t)) * math.comb(
            n + alpha, n
        )
        return HPReal(value, 4 * (n + 1) * scale * ctx.eps)


def laguerre_derivative(n: int, t: object, ctx: PrecisionContext | None = None) -> HPReal:
    """Derivative L_n'(t) of the classical Laguerre polynomial."""
    if n < 0:
        raise DomainError(f"Laguerre degree must be non-negative, got {n}")
    ctx = ctx or PrecisionContext.from_settings()
    with ctx.workdps():
        t = to_mpf(t)
        _, value = _laguerre_derivative_raw(n, t)
        scale = n * laguerre_bound(n, abs(t), 1)
        return HPReal(value, 4 * (n + 1) * scale * ctx.eps)
