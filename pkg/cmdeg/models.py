"""
Core value types: precision contexts and error-carrying reals.
"""

from __future__ import annotations

import math
from collections.abc import Iterator
from contextlib import contextmanager
from dataclasses import dataclass, replace
from fractions import Fraction
from typing import TypeAlias

from mpmath import mp, mpf

from .conf import settings
from .exceptions import DomainError, PrecisionError

ExactRational: TypeAlias = Fraction

# Guard decimal digits carried on top of the requested ones.
GUARD_DIGITS = 15
MIN_DIGITS = 20


def _power_of_ten(exponent: int) -> mpf:
    with mp.workdps(max(abs(exponent), 15) + 10):
        return mpf(10) ** exponent


@dataclass(frozen=True)
class PrecisionContext:
    """Working precision plus the tolerances that go with it.

    Attributes:
        working_digits: Requested decimal digits of every reported value.
        series_tol: Relative tolerance at which series are truncated.
        quad_tol: Successive-level tolerance for quadrature refinement.
    """

    working_digits: int = 50
    series_tol: mpf | None = None
    quad_tol: mpf | None = None

    def __post_init__(self) -> None:
        if self.working_digits < MIN_DIGITS:
            raise PrecisionError(
                f"working_digits must be at least {MIN_DIGITS}, got {self.working_digits}"
            )
        if self.series_tol is None:
            object.__setattr__(self, "series_tol", _power_of_ten(-(self.working_digits + 5)))
        if self.quad_tol is None:
            object.__setattr__(self, "quad_tol", _power_of_ten(-(self.working_digits - 10)))
        ceiling = _power_of_ten(-(self.working_digits - 10))
        if self.series_tol > ceiling or self.quad_tol > ceiling:
            raise PrecisionError(
                "series_tol and quad_tol must not exceed 10^-(working_digits - 10)"
            )

    @classmethod
    def from_settings(cls, digits: int | None = None) -> PrecisionContext:
        """Build a context from ``CMDEG_DIGITS`` unless *digits* is given."""
        if digits is None:
            digits = int(getattr(settings, "CMDEG_DIGITS", 50))
        return cls(working_digits=digits)

    @property
    def dps(self) -> int:
        """Decimal digits used internally, guard digits included."""
        return self.working_digits + GUARD_DIGITS

    @property
    def eps(self) -> mpf:
        """Unit roundoff of the internal precision."""
        return _power_of_ten(-self.dps)

    def raised(self, extra_digits: int) -> PrecisionContext:
        """Return a context with *extra_digits* more and matching tolerances."""
        if extra_digits <= 0:
            return self
        return replace(
            self,
            working_digits=self.working_digits + extra_digits,
            series_tol=None,
            quad_tol=None,
        )

    @contextmanager
    def workdps(self) -> Iterator[None]:
        """Run a block at this context's internal precision."""
        with mp.workdps(self.dps):
            yield


def to_mpf(value: object) -> mpf:
    """Convert ints, floats, strings, fractions and HPReals to ``mpf``."""
    if isinstance(value, HPReal):
        return value.value
    if isinstance(value, Fraction):
        return mpf(value.numerator) / value.denominator
    if isinstance(value, float) and not math.isfinite(value):
        raise DomainError(f"Non-finite argument: {value}")
    return mpf(value)


def _rounding(value: mpf) -> mpf:
    return abs(value) * mpf(2) ** (1 - mp.prec)


@dataclass(frozen=True)
class HPReal:
    """A high-precision value together with a certified absolute error bound.

    The true quantity lies in ``[value - err_bound, value + err_bound]``.
    Arithmetic propagates bounds and adds one rounding unit per operation,
    so a derived bound never undercuts what its inputs imply.
    """

    value: mpf
    err_bound: mpf = mpf(0)

    def __post_init__(self) -> None:
        if self.err_bound < 0:
            raise PrecisionError("err_bound must be non-negative")
        if not mp.isfinite(self.err_bound):
            raise PrecisionError("err_bound must be finite")

    @classmethod
    def exact(cls, value: object) -> HPReal:
        return cls(to_mpf(value), mpf(0))

    @property
    def lower(self) -> mpf:
        return self.value - self.err_bound

    @property
    def upper(self) -> mpf:
        return self.value + self.err_bound

    def is_certified_positive(self) -> bool:
        return self.lower > 0

    def is_certified_negative(self) -> bool:
        return self.upper < 0

    def is_certified_nonnegative(self) -> bool:
        return self.lower >= 0

    def contains(self, other: object) -> bool:
        """True when *other* lies inside this value's error interval."""
        if isinstance(other, HPReal):
            return abs(self.value - other.value) <= self.err_bound + other.err_bound
        return abs(self.value - to_mpf(other)) <= self.err_bound

    def _coerce(self, other: object) -> HPReal:
        if isinstance(other, HPReal):
            return other
        return HPReal.exact(other)

    def __add__(self, other: object) -> HPReal:
        rhs = self._coerce(other)
        value = self.value + rhs.value
        return HPReal(value, self.err_bound + rhs.err_bound + _rounding(value))

    __radd__ = __add__

    def __sub__(self, other: object) -> HPReal:
        rhs = self._coerce(other)
        value = self.value - rhs.value
        return HPReal(value, self.err_bound + rhs.err_bound + _rounding(value))

    def __rsub__(self, other: object) -> HPReal:
        return self._coerce(other) - self

    def __neg__(self) -> HPReal:
        return HPReal(-self.value, self.err_bound)

    def __abs__(self) -> HPReal:
        return HPReal(abs(self.value), self.err_bound)

    def __mul__(self, other: object) -> HPReal:
        rhs = self._coerce(other)
        value = self.value * rhs.value
        err = (
            abs(self.value) * rhs.err_bound
            + abs(rhs.value) * self.err_bound
            + self.err_bound * rhs.err_bound
            + _rounding(value)
        )
        return HPReal(value, err)

    __rmul__ = __mul__

    def __truediv__(self, other: object) -> HPReal:
        rhs = self._coerce(other)
        margin = abs(rhs.value) - rhs.err_bound
        if margin <= 0:
            raise DomainError("Divisor is not certified to be nonzero")
        value = self.value / rhs.value
        err = (self.err_bound + abs(value) * rhs.err_bound) / margin + _rounding(value)
        return HPReal(value, err)

    def __rtruediv__(self, other: object) -> HPReal:
        return self._coerce(other) / self

    def __float__(self) -> float:
        return float(self.value)

    def format(self, digits: int) -> str:
        """Render ``value`` to *digits* significant digits."""
        return mp.nstr(self.value, digits, min_fixed=-4, max_fixed=6)

    def __str__(self) -> str:
        return f"{mp.nstr(self.value, 20)} ± {mp.nstr(self.err_bound, 3)}"
