"""
Stirling remainders R_n(x) and their derivatives.

``R_n`` is signed so that it is positive for every ``n >= 0``::

    R_n(x) = (-1)^n [log Gamma(x) - (x - 1/2) log x + x - log(2 pi)/2
                     - sum_{k=1}^n B_2k / (2k (2k - 1)) x^(1 - 2k)]
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from enum import Enum

import mpmath
from mpmath import mp, mpf

from .conf import settings
from .exceptions import DomainError, UnsupportedError
from .kernels import KernelFamily, KernelSpec
from .models import HPReal, PrecisionContext, to_mpf
from .special import log_gamma, polygamma, stirling_coefficient

logger = logging.getLogger(__name__)


class EvalPath(str, Enum):
    AUTO = "auto"
    CLOSED_FORM = "closed-form"
    LAPLACE = "laplace"


@dataclass(frozen=True)
class RemainderSpec:
    """The function ``(-1)^m R_n^(m)``; ``m = 0`` is the remainder itself."""

    n: int
    m: int = 0
    eval_path: EvalPath = EvalPath.AUTO

    def __post_init__(self) -> None:
        if self.n < 0 or self.m < 0:
            raise DomainError(f"remainder indices must be non-negative, got n={self.n}, m={self.m}")
        if self.eval_path is EvalPath.LAPLACE and (self.n < 1 or self.m):
            raise UnsupportedError("the Laplace path covers R_n with n >= 1 only")

    @property
    def label(self) -> str:
        if self.m == 0:
            return f"R_{self.n}"
        sign = "-" if self.m == 1 else f"(-1)^{self.m} "
        return f"{sign}R_{self.n}^({self.m})"


def _sign(k: int) -> int:
    return -1 if k % 2 else 1


def _magnitude_digits(x: mpf, n: int, m: int = 0) -> int:
    # closed forms subtract numbers of size ~ x log x to get R_n(x) ~ x^(1-2(n+1))
    if x <= 1:
        return 10
    return math.ceil((2 * n + m + 1) * float(mpmath.log10(x))) + 10


def _check_x(x: mpf) -> None:
    if x <= 0:
        raise DomainError(f"remainders are defined for x > 0, got {x}")


def _closed_form(n: int, x: mpf, ctx: PrecisionContext) -> HPReal:
    raised = ctx.raised(_magnitude_digits(x, n))
    with raised.workdps():
        lg = log_gamma(x, raised)
        parts = [lg.value, -(x - mpf(1) / 2) * mpmath.log(x), x, -mpmath.log(2 * mp.pi) / 2]
        for k in range(1, n + 1):
            coefficient = stirling_coefficient(k)
            parts.append(
                -mpf(coefficient.numerator) / coefficient.denominator * x ** (1 - 2 * k)
            )
        value = mpmath.fsum(parts)
        rounding = 10 * mpmath.fsum(abs(p) for p in parts) * raised.eps
        return HPReal(_sign(n) * value, lg.err_bound + rounding)


def _use_laplace(n: int, x: mpf) -> bool:
    x_star = mpf(getattr(settings, "CMDEG_REMAINDER_X_STAR", 10.0))
    return n >= 1 and x > x_star


def remainder(
    n: int,
    x: object,
    ctx: PrecisionContext | None = None,
    path: EvalPath = EvalPath.AUTO,
) -> HPReal:
    """The Stirling remainder R_n(x), positive for x > 0.

    ``CLOSED_FORM`` subtracts the truncated Stirling series from ``log_gamma``
    in precision raised by ``(2n + 1) log10 x`` digits. ``LAPLACE`` integrates
    the Binet kernel ``g_{n-1}`` and exists for ``n >= 1``. ``AUTO`` takes the
    Laplace route for ``n >= 1`` and ``x > CMDEG_REMAINDER_X_STAR``.

    Raises:
        DomainError: If ``n < 0`` or ``x <= 0``.
        UnsupportedError: If ``LAPLACE`` is requested for ``n = 0``.
    """
    if n < 0:
        raise DomainError(f"remainder index must be non-negative, got {n}")
    ctx = ctx or PrecisionContext.from_settings()
    with ctx.workdps():
        x = to_mpf(x)
        _check_x(x)
        if path is EvalPath.AUTO:
            path = EvalPath.LAPLACE if _use_laplace(n, x) else EvalPath.CLOSED_FORM
        if path is EvalPath.LAPLACE:
            return remainder_via_laplace(n, x, ctx)
        return _closed_form(n, x, ctx)


def remainder_via_laplace(n: int, x: object, ctx: PrecisionContext | None = None) -> HPReal:
    """R_n(x) as the Laplace transform of g_{n-1}, for n >= 1."""
    if n < 1:
        raise UnsupportedError("R_0 has no Laplace representation with a positive kernel")
    from .quadrature import laplace_integral

    ctx = ctx or PrecisionContext.from_settings()
    kernel = KernelSpec(KernelFamily.BINET_G, index=n - 1)
    return laplace_integral(kernel, x, ctx).value


def _falling(p: int, alpha: int) -> int:
    result = 1
    for i in range(alpha):
        result *= p - i
    return result


def _stirling_part_derivative(m: int, x: mpf) -> list[mpf]:
    # (d/dx)^m [(x - 1/2) log x - x + log(2 pi)/2]
    if m == 1:
        return [mpmath.log(x), -1 / (2 * x)]
    return [
        _sign(m) * mpf(math.factorial(m - 2)) / x ** (m - 1),
        _sign(m) * mpf(math.factorial(m - 1)) / (2 * x**m),
    ]


def _derivative_numeric(x: mpf, ctx: PrecisionContext) -> HPReal:
    # -R_0'(x): the closed form differentiated by central differences at two step sizes
    raised = ctx.raised(ctx.working_digits // 2 + 10)
    with raised.workdps():

        def r0(y: mpf) -> mpf:
            return _closed_form(0, y, PrecisionContext(working_digits=mp.dps)).value

        step = x * mpf(10) ** -(ctx.working_digits // 2)
        fine = mpmath.diff(r0, x, h=step)
        coarse = mpmath.diff(r0, x, h=2 * step)
        return HPReal(-fine, abs(fine - coarse) + abs(fine) * ctx.eps)


def remainder_deriv(n: int, m: int, x: object, ctx: PrecisionContext | None = None) -> HPReal:
    """``(-1)^m R_n^(m)(x)`` for m >= 1, which is positive whenever R_n is CM.

    Built from the polygamma function and the differentiated Stirling
    polynomial. ``n = 0, m = 1`` is differentiated numerically instead.

    Raises:
        DomainError: If ``n < 0``, ``m < 1`` or ``x <= 0``.
    """
    if n < 0 or m < 1:
        raise DomainError(f"remainder_deriv requires n >= 0 and m >= 1, got n={n}, m={m}")
    ctx = ctx or PrecisionContext.from_settings()
    with ctx.workdps():
        x = to_mpf(x)
        _check_x(x)
        if n == 0 and m == 1:
            return _derivative_numeric(x, ctx)

        raised = ctx.raised(_magnitude_digits(x, n, m) + m)
        with raised.workdps():
            psi = polygamma(m - 1, x, raised)
            parts = [psi.value]
            parts += [-p for p in _stirling_part_derivative(m, x)]
            for k in range(1, n + 1):
                coefficient = stirling_coefficient(k)
                derived = _falling(1 - 2 * k, m)
                parts.append(
                    -mpf(coefficient.numerator * derived) / coefficient.denominator
                    * x ** (1 - 2 * k - m)
                )
            value = mpmath.fsum(parts)
            rounding = 10 * mpmath.fsum(abs(p) for p in parts) * raised.eps
            return HPReal(_sign(n + m) * value, psi.err_bound + rounding)


def evaluate_remainder(
    spec: RemainderSpec, x: object, ctx: PrecisionContext | None = None
) -> HPReal:
    """Evaluate the function named by *spec* at *x*."""
    if spec.m == 0:
        return remainder(spec.n, x, ctx, spec.eval_path)
    return remainder_deriv(spec.n, spec.m, x, ctx)


def derivative_ratio(spec: RemainderSpec, x: object, ctx: PrecisionContext | None = None) -> HPReal:
    """``-x F'(x) / F(x)`` for ``F = (-1)^m R_n^(m)``.

    Any CM degree of ``F`` is bounded above by this ratio at every x.
    """
    ctx = ctx or PrecisionContext.from_settings()
    with ctx.workdps():
        x = to_mpf(x)
        _check_x(x)
        if spec.m == 0:
            base = _closed_form(spec.n, x, ctx)
        else:
            base = remainder_deriv(spec.n, spec.m, x, ctx)
        slope = remainder_deriv(spec.n, spec.m + 1, x, ctx)
        return slope * x / base


def ratio_bound(n: int, x: object, ctx: PrecisionContext | None = None) -> HPReal:
    """``-x R_n'(x) / R_n(x)``, an upper bound on the CM degree of R_n.

    Tends to ``2n - 1`` as ``x -> 0`` and to ``2n + 1`` as ``x -> oo``.
    """
    if n < 1:
        raise DomainError(f"ratio_bound requires n >= 1, got {n}")
    return derivative_ratio(RemainderSpec(n), x, ctx)
