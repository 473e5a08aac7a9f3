"""
Report objects produced by the lab and their CSV / JSON renderings.

Renderings are deterministic: the same inputs give byte-identical output
apart from ``elapsed_seconds``.
"""

from __future__ import annotations

import csv
import json
from collections.abc import Sequence
from dataclasses import dataclass, field
from enum import Enum
from typing import IO, Any

from mpmath import mp, mpf

from .models import HPReal
from .remainders import RemainderSpec
from .utils import format_bound, format_mpf

CSV_HEADER = ("t", "value", "err_bound")


class CheckStatus(str, Enum):
    PASS = "pass"
    FAIL = "fail"
    INCONCLUSIVE = "inconclusive"


@dataclass(frozen=True)
class CheckResult:
    """Outcome of one named check.

    ``min_value`` is the smallest certified quantity the check looked at
    (a kernel minimum, a negated discrepancy, ...) and ``tolerance`` the
    threshold it was compared against.
    """

    name: str
    status: CheckStatus
    min_value: mpf | None = None
    tolerance: mpf | None = None
    grid: str = ""
    detail: str = ""

    @property
    def passed(self) -> bool:
        return self.status is CheckStatus.PASS

    def as_dict(self, digits: int) -> dict[str, Any]:
        return {
            "name": self.name,
            "grid": self.grid,
            "min_value": None if self.min_value is None else format_mpf(self.min_value, digits),
            "tolerance": None if self.tolerance is None else format_bound(self.tolerance),
            "pass": self.passed,
            "status": self.status.value,
            "detail": self.detail,
        }


def _dump(payload: dict[str, Any]) -> str:
    return json.dumps(payload, indent=2, sort_keys=True) + "\n"


def _witness_dict(witness: tuple[mpf, HPReal] | None, digits: int) -> dict[str, str] | None:
    if witness is None:
        return None
    t, value = witness
    return {
        "t": format_mpf(t, digits),
        "value": format_mpf(value.value, digits),
        "err_bound": format_bound(value.err_bound),
    }


def write_rows(stream: IO[str], rows: Sequence[tuple[mpf, HPReal]], digits: int) -> None:
    """Write ``t,value,err_bound`` rows with LF line endings."""
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for t, value in rows:
        writer.writerow(
            (format_mpf(t, digits), format_mpf(value.value, digits), format_bound(value.err_bound))
        )


@dataclass
class DegreeReport:
    """An empirical bracket ``lo <= deg_CM(target) <= hi``.

    ``lo`` is the highest integer level whose kernel was certified
    non-negative; ``hi`` comes from the first failing level, the derivative
    ratio, or an analytic claim (``hi_source``). ``hi_certified`` is false
    only for analytic claims the desk computation cannot confirm.
    """

    target: RemainderSpec
    lo: int | None
    hi: mpf | None
    hi_source: str = ""
    hi_certified: bool = True
    witness: tuple[mpf, HPReal] | None = None
    min_kernel_value: HPReal | None = None
    checks: list[CheckResult] = field(default_factory=list)
    rows: list[tuple[mpf, HPReal]] = field(default_factory=list)
    grid: str = ""
    conjecture: str | None = None
    conjectured_degree: int | None = None
    elapsed_seconds: float = 0.0

    @property
    def consistent(self) -> bool | None:
        """Whether the conjectured degree lies in the bracket, if one was given."""
        if self.conjectured_degree is None:
            return None
        above = self.lo is None or self.lo <= self.conjectured_degree
        below = self.hi is None or self.conjectured_degree <= self.hi
        return above and below

    def as_dict(self, digits: int) -> dict[str, Any]:
        return {
            "target": self.target.label,
            "n": self.target.n,
            "m": self.target.m,
            "lo": self.lo,
            "hi": None if self.hi is None else format_mpf(self.hi, digits),
            "hi_source": self.hi_source,
            "hi_certified": self.hi_certified,
            "witness": _witness_dict(self.witness, digits),
            "min_kernel_value": None
            if self.min_kernel_value is None
            else format_mpf(self.min_kernel_value.value, digits),
            "grid": self.grid,
            "conjecture": self.conjecture,
            "conjectured_degree": self.conjectured_degree,
            "consistent": self.consistent,
            "checks": [check.as_dict(digits) for check in self.checks],
            "elapsed_seconds": round(self.elapsed_seconds, 3),
        }

    def to_json(self, digits: int = 20) -> str:
        return _dump(self.as_dict(digits))

    def write_csv(self, stream: IO[str], digits: int = 20) -> None:
        write_rows(stream, self.rows, digits)


@dataclass
class VerificationReport:
    """Checks run for one proposition. ``passed`` needs every check to pass."""

    proposition: str
    checks: list[CheckResult] = field(default_factory=list)
    elapsed_seconds: float = 0.0

    @property
    def passed(self) -> bool:
        return bool(self.checks) and all(check.passed for check in self.checks)

    @property
    def failed(self) -> list[CheckResult]:
        return [check for check in self.checks if check.status is CheckStatus.FAIL]

    @property
    def exit_ok(self) -> bool:
        """True when no check failed; inconclusive checks do not count against it."""
        return not self.failed

    def extend(self, other: VerificationReport) -> None:
        self.checks.extend(other.checks)
        self.elapsed_seconds += other.elapsed_seconds

    def as_dict(self, digits: int) -> dict[str, Any]:
        return {
            "target": f"proposition {self.proposition}",
            "checks": [check.as_dict(digits) for check in self.checks],
            "pass": self.passed,
            "lo": None,
            "hi": None,
            "witness": None,
            "elapsed_seconds": round(self.elapsed_seconds, 3),
        }

    def to_json(self, digits: int = 20) -> str:
        return _dump(self.as_dict(digits))

    def write_csv(self, stream: IO[str], digits: int = 20) -> None:
        writer = csv.writer(stream, lineterminator="\n")
        writer.writerow(("name", "status", "min_value", "tolerance"))
        for check in self.checks:
            row = check.as_dict(digits)
            writer.writerow(
                (row["name"], row["status"], row["min_value"] or "", row["tolerance"] or "")
            )


def summarize_grid(grid: Sequence[mpf]) -> str:
    """Short description such as ``log[0.0001, 60] x 2000``."""
    if not grid:
        return ""
    return f"log[{mp.nstr(grid[0], 6)}, {mp.nstr(grid[-1], 6)}] x {len(grid)}"
