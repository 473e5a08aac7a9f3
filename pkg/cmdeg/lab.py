"""
Empirical completely-monotonic-degree lab.

A function ``F(x) = int_0^oo k(t) e^{-xt} dt`` has CM degree at least
``alpha`` when the kernel of ``x^alpha F`` is non-negative. These helpers
scan such kernels on grids, certify their sign beyond the grid with analytic
tail bounds, and combine the results with the derivative-ratio cap
``deg <= -x F'(x) / F(x)`` into brackets.
"""

from __future__ import annotations

import logging
import math
import time
from collections.abc import Callable, Sequence
from dataclasses import dataclass, replace
from typing import Any

import mpmath
import numpy as np
from mpmath import mp, mpf

from .conf import settings
from .exceptions import CmdegError, DomainError, InconclusiveError
from .kernels import (
    exponential_envelope,
    exponential_weights,
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
)
from .models import HPReal, PrecisionContext, to_mpf
from .quadrature import QuadratureResult, finite_integral, laplace_integral, semi_infinite_integral
from .remainders import RemainderSpec, derivative_ratio, remainder_deriv
from .reports import CheckResult, CheckStatus, DegreeReport, VerificationReport, summarize_grid
from .utils import default_grid, log_grid, parallel_map

logger = logging.getLogger(__name__)

# Two-point Szegő-type bounds on the Laguerre sums apply from here on.
SZEGO_T_MIN = 2 * math.log(3)
GOLDEN_ITERATIONS = 40


@dataclass(frozen=True)
class TailCertificate:
    """The kernel has sign ``sign`` for every ``t >= t_from``."""

    t_from: mpf
    sign: int
    margin: mpf
    reason: str


@dataclass(frozen=True)
class SignScan:
    """Kernel values on a grid and what they certify."""

    label: str
    points: tuple[tuple[mpf, HPReal], ...]
    min_value: HPReal | None
    argmin: mpf | None
    witness: tuple[mpf, HPReal] | None
    inconclusive: tuple[mpf, ...]
    tail: TailCertificate | None

    @property
    def status(self) -> CheckStatus:
        if self.witness is not None:
            return CheckStatus.FAIL
        if self.inconclusive or not self.points:
            return CheckStatus.INCONCLUSIVE
        return CheckStatus.PASS

    @property
    def covers_tail(self) -> bool:
        """True when the tail beyond the grid is certified non-negative too."""
        return self.tail is not None and self.tail.sign > 0

    def as_check(self, name: str) -> CheckResult:
        grid = summarize_grid([t for t, _ in self.points])
        detail = []
        if self.witness is not None:
            detail.append(f"negative at t={mp.nstr(self.witness[0], 10)}")
        if self.inconclusive:
            detail.append(f"{len(self.inconclusive)} inconclusive points")
        if self.tail is not None:
            side = "positive" if self.tail.sign > 0 else "negative"
            detail.append(f"{side} beyond t={mp.nstr(self.tail.t_from, 6)} ({self.tail.reason})")
        elif self.points:
            detail.append(f"tail beyond t={mp.nstr(self.points[-1][0], 6)} not certified")
        return CheckResult(
            name=name,
            status=self.status,
            min_value=None if self.min_value is None else self.min_value.value,
            tolerance=mpf(0),
            grid=grid,
            detail="; ".join(detail),
        )

    def level_check(self, name: str) -> CheckResult:
        """Like :meth:`as_check`, but a grid pass without a positive tail is inconclusive."""
        check = self.as_check(name)
        if check.status is CheckStatus.PASS and not self.covers_tail:
            return replace(check, status=CheckStatus.INCONCLUSIVE)
        return check


@dataclass(frozen=True)
class _PointEvaluator:
    """Picklable ``t -> fn(*args, t, ctx)`` for worker processes."""

    fn: Callable[..., HPReal]
    args: tuple[Any, ...]
    ctx: PrecisionContext

    def __call__(self, t: mpf) -> HPReal | None:
        try:
            return self.fn(*self.args, t, self.ctx)
        except CmdegError as exc:
            logger.warning("evaluation failed at t=%s: %s", mp.nstr(t, 8), exc)
            return None


def sign_scan(
    fn: Callable[..., HPReal],
    args: tuple[Any, ...],
    grid: Sequence[mpf],
    ctx: PrecisionContext,
    label: str = "",
    tail: TailCertificate | None = None,
    workers: int | None = None,
) -> SignScan:
    """Evaluate ``fn(*args, t, ctx)`` on *grid* and classify the signs.

    A point certifies negativity when ``value + err < 0``; every point
    that is not certified ``>= 0`` and not certified negative is reported
    as inconclusive.
    """
    values = parallel_map(_PointEvaluator(fn, args, ctx), list(grid), workers)
    points: list[tuple[mpf, HPReal]] = []
    inconclusive: list[mpf] = []
    witness = None
    for t, value in zip(grid, values, strict=True):
        if value is None:
            inconclusive.append(t)
            continue
        points.append((t, value))
        if value.is_certified_negative():
            if witness is None:
                witness = (t, value)
        elif not value.is_certified_nonnegative():
            inconclusive.append(t)
    minimum = min(points, key=lambda p: p[1].value, default=None)
    logger.info("scan %s: %d points, witness=%s", label, len(points), witness is not None)
    return SignScan(
        label=label,
        points=tuple(points),
        min_value=None if minimum is None else minimum[1],
        argmin=None if minimum is None else minimum[0],
        witness=witness,
        inconclusive=tuple(inconclusive),
        tail=tail,
    )


def moment_tail_certificate(
    n: int, m: int, alpha: int, t_from: object, ctx: PrecisionContext | None = None
) -> TailCertificate | None:
    """Sign of ``(d/dt)^alpha [t^m g_{n-1}(t)]`` for all ``t >= t_from``, if provable.

    The kernel is a Laurent polynomial plus exponentially small terms. When
    the leading Laurent term outweighs the others and the exponential part
    at ``t_from``, and every piece decays monotonically from there on, the
    leading term fixes the sign. Returns ``None`` when that argument fails.
    """
    ctx = ctx or PrecisionContext.from_settings()
    with ctx.workdps():
        start = to_mpf(t_from)
        terms = laurent_terms(n, m, alpha)
        if not terms:
            return None
        lead_coefficient, lead_power = max(terms, key=lambda term: term[1])
        weights = exponential_weights(m, alpha)
        if any(i - lead_power >= start for _, i, _ in weights):
            return None
        rho = mpf(2) ** alpha * mpmath.exp(-start)
        if rho >= 1:
            return None

        others = mpmath.fsum(
            abs(mpf(c.numerator) / c.denominator) * start ** (p - lead_power)
            for c, p in terms
            if p != lead_power
        )
        exponential = (
            exponential_envelope(m, alpha, start, 1)
            * mpmath.exp(-start)
            / (1 - rho)
            * start ** (-lead_power)
        )
        lead = mpf(lead_coefficient.numerator) / lead_coefficient.denominator
        margin = abs(lead) - others - exponential
        if margin <= 10 * ctx.eps * abs(lead):
            return None
        sign = (1 if lead > 0 else -1) * (1 if (n - 1) % 2 == 0 else -1)
        return TailCertificate(start, sign, margin, f"leading term t^{lead_power}")


def kernel_sign_scan(
    n: int,
    j: int,
    t_grid: Sequence[mpf] | None = None,
    ctx: PrecisionContext | None = None,
    workers: int | None = None,
) -> SignScan:
    """Scan ``g_n^(j)`` over *t_grid* (the default grid when omitted).

    The minimum is reported together with the first certified negative
    value, and the sign beyond the grid is certified when possible.
    """
    if n < 0 or not 0 <= j <= 2 * n + 2:
        raise DomainError(f"kernel_sign_scan needs n >= 0 and 0 <= j <= 2n + 2, got {n}, {j}")
    ctx = ctx or PrecisionContext.from_settings()
    grid = list(t_grid) if t_grid is not None else default_grid()
    tail = moment_tail_certificate(n + 1, 0, j, grid[-1], ctx)
    return sign_scan(
        moment_kernel_deriv, (n + 1, 0, j), grid, ctx, label=f"g_{n}^({j})", tail=tail,
        workers=workers,
    )


# ---------------------------------------------------------------------------
# Ratio cap
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class RatioInfimum:
    """Smallest value of ``-x F'(x) / F(x)`` found on the search range."""

    value: HPReal
    argmin: mpf
    x_range: tuple[float, float]


def ratio_infimum(
    n: int,
    x_range: tuple[float, float] | None = None,
    ctx: PrecisionContext | None = None,
    m: int = 0,
    points: int | None = None,
) -> RatioInfimum:
    """Minimize the derivative ratio of ``(-1)^m R_n^(m)`` over *x_range*.

    A logarithmic grid locates the minimum, then a golden-section search in
    ``log x`` refines it between the neighbouring grid points. Every value
    found is a valid upper bound on the CM degree, so the smallest one is
    returned together with its error bound.
    """
    ctx = ctx or PrecisionContext.from_settings()
    if x_range is None:
        x_range = (
            float(getattr(settings, "CMDEG_RATIO_X_MIN", 1e-6)),
            float(getattr(settings, "CMDEG_RATIO_X_MAX", 1e3)),
        )
    points = points or int(getattr(settings, "CMDEG_RATIO_GRID_POINTS", 41))
    spec = RemainderSpec(n, m)
    grid = log_grid(x_range[0], x_range[1], points)
    with ctx.workdps():
        values = [derivative_ratio(spec, x, ctx) for x in grid]
        index = min(range(len(values)), key=lambda i: values[i].value)
        best_x, best = grid[index], values[index]

        a = mpmath.log(grid[max(index - 1, 0)])
        b = mpmath.log(grid[min(index + 1, len(grid) - 1)])
        if a < b:
            golden = (mpmath.sqrt(5) - 1) / 2

            def ratio_at(u: mpf) -> HPReal:
                return derivative_ratio(spec, mpmath.exp(u), ctx)

            c, d = b - golden * (b - a), a + golden * (b - a)
            fc, fd = ratio_at(c), ratio_at(d)
            for _ in range(GOLDEN_ITERATIONS):
                if fc.value < fd.value:
                    b, d, fd = d, c, fc
                    c = b - golden * (b - a)
                    fc = ratio_at(c)
                else:
                    a, c, fc = c, d, fd
                    d = a + golden * (b - a)
                    fd = ratio_at(d)
                for u, f in ((c, fc), (d, fd)):
                    if f.value < best.value:
                        best_x, best = mpmath.exp(u), f
        return RatioInfimum(best, best_x, x_range)


# ---------------------------------------------------------------------------
# Degree brackets
# ---------------------------------------------------------------------------


def _scan_level(
    target: RemainderSpec,
    level: int,
    grid: Sequence[mpf],
    ctx: PrecisionContext,
    workers: int | None,
) -> SignScan:
    tail = moment_tail_certificate(target.n, target.m, level, grid[-1], ctx)
    return sign_scan(
        moment_kernel_deriv,
        (target.n, target.m, level),
        grid,
        ctx,
        label=f"{target.label} level {level}",
        tail=tail,
        workers=workers,
    )


def _ratio_check(ratio: RatioInfimum, name: str = "derivative ratio") -> CheckResult:
    return CheckResult(
        name=name,
        status=CheckStatus.PASS,
        min_value=ratio.value.value,
        tolerance=ratio.value.err_bound,
        grid=f"log[{ratio.x_range[0]:g}, {ratio.x_range[1]:g}]",
        detail=f"attained near x={mp.nstr(ratio.argmin, 6)}",
    )


def degree_bracket(
    target: RemainderSpec,
    levels: Sequence[float] | None = None,
    ctx: PrecisionContext | None = None,
    grid: Sequence[mpf] | None = None,
    x_range: tuple[float, float] | None = None,
    conjecture: str | None = None,
    conjectured_degree: int | None = None,
    workers: int | None = None,
) -> DegreeReport:
    """Bracket the CM degree of ``(-1)^m R_n^(m)``.

    Integer levels are tested in increasing order by scanning the kernel of
    ``x^level F``. A level counts towards the lower end only when the grid
    passes and the tail beyond it is certified positive; the scan stops at
    the first level that does not, and a certified failure's witness gives
    an upper end. Levels above ``m + 2n``, where the Laplace
    boundary terms no longer vanish, and non-integer levels are not scanned;
    they are capped only through the derivative ratio.

    Raises:
        DomainError: If *levels* is not strictly increasing and non-negative.
        InconclusiveError: If the scans and the ratio cap contradict each other.
    """
    started = time.perf_counter()
    ctx = ctx or PrecisionContext.from_settings()
    grid = list(grid) if grid is not None else default_grid()
    top = target.m + 2 * target.n
    levels = list(levels) if levels is not None else list(range(top + 1))
    if any(b <= a for a, b in zip(levels, levels[1:], strict=False)) or any(v < 0 for v in levels):
        raise DomainError(f"levels must be strictly increasing and non-negative, got {levels}")

    report = DegreeReport(
        target=target,
        lo=None,
        hi=None,
        grid=summarize_grid(grid),
        conjecture=conjecture,
        conjectured_degree=conjectured_degree,
    )
    failing_level = None
    for level in levels:
        if level != int(level):
            report.checks.append(
                CheckResult(f"level {level}", CheckStatus.INCONCLUSIVE, detail="non-integer level")
            )
            continue
        level = int(level)
        if level > top:
            report.checks.append(
                CheckResult(
                    f"level {level}",
                    CheckStatus.INCONCLUSIVE,
                    detail=f"above {top}, boundary terms do not vanish",
                )
            )
            continue
        scan = _scan_level(target, level, grid, ctx, workers)
        check = scan.level_check(f"level {level}")
        report.checks.append(check)
        if check.status is CheckStatus.FAIL:
            failing_level = level
            report.witness = scan.witness
            break
        if check.status is CheckStatus.INCONCLUSIVE:
            break
        report.lo = level
        report.rows = list(scan.points)
        report.min_kernel_value = scan.min_value

    ratio = ratio_infimum(target.n, x_range, ctx, m=target.m)
    report.checks.append(_ratio_check(ratio))
    ratio_cap = ratio.value.upper
    if failing_level is not None and failing_level <= ratio_cap:
        report.hi, report.hi_source = mpf(failing_level), "level"
    else:
        report.hi, report.hi_source = ratio_cap, "ratio"

    report.elapsed_seconds = time.perf_counter() - started
    if report.lo is not None and report.hi <= report.lo:
        raise InconclusiveError(
            f"ratio cap {mp.nstr(report.hi, 10)} does not exceed certified level {report.lo}",
            report,
        )
    return report


def _laguerre_prime_gap_tail(m: int, t_from: mpf, ctx: PrecisionContext) -> TailCertificate | None:
    # K(t, m) increases in t and (m-1)! K(t, m) <= m!/12 - f_m'(t)
    bound = k_bound(t_from, m, ctx)
    if not bound.is_certified_positive():
        return None
    margin = math.factorial(m - 1) * bound.lower
    return TailCertificate(t_from, 1, margin, "K(t, m) lower bound")


def _excess_tail(
    fn: Callable[..., HPReal], m: int, t_from: mpf, ctx: PrecisionContext
) -> TailCertificate | None:
    # for t >= 2 log 3, f_m >= (m-1)!/2, so both excess kernels are non-decreasing
    if t_from < SZEGO_T_MIN:
        return None
    value = fn(m, t_from, ctx)
    if not value.is_certified_positive():
        return None
    return TailCertificate(t_from, 1, value.lower, "non-decreasing beyond 2 log 3")


def _grid_inequality(
    name: str,
    fn: Callable[[mpf], HPReal],
    grid: Sequence[mpf],
    tolerance: mpf | None = None,
) -> CheckResult:
    """Check ``fn(t) >= -tolerance`` on *grid*; ``fn`` returns the slack."""
    tolerance = mpf(0) if tolerance is None else tolerance
    worst = None
    status = CheckStatus.PASS
    for t in grid:
        try:
            slack = fn(t)
        except CmdegError as exc:
            return CheckResult(
                name, CheckStatus.INCONCLUSIVE, grid=summarize_grid(grid), detail=str(exc)
            )
        if worst is None or slack.value < worst.value:
            worst = slack
        if slack.upper < -tolerance:
            status = CheckStatus.FAIL
        elif slack.lower < -tolerance and status is CheckStatus.PASS:
            status = CheckStatus.INCONCLUSIVE
    return CheckResult(
        name,
        status,
        min_value=None if worst is None else worst.value,
        tolerance=tolerance,
        grid=summarize_grid(grid),
    )


def derivative_degree_bracket(
    n: int,
    m: int,
    ctx: PrecisionContext | None = None,
    grid: Sequence[mpf] | None = None,
    workers: int | None = None,
) -> DegreeReport:
    """Bracket the CM degree of ``(-1)^m R_n^(m)`` for ``n`` in {0, 1}.

    The lower end, ``m - 2`` for ``n = 0`` and ``m`` for ``n = 1``, is
    certified with the Laguerre forms of the kernels and their tail bounds.
    The next level is scanned too. A witness there caps the bracket; a
    certified pass raises the lower end to it. Without a witness the upper
    end (``m - 1`` and ``m + 1``) is recorded as an uncertified analytic
    claim alongside the supporting inequalities.
    """
    if n not in (0, 1):
        raise DomainError(f"derivative_degree_bracket covers n = 0 and n = 1, got {n}")
    if m < (2 if n == 0 else 1):
        raise DomainError(f"derivative_degree_bracket needs m >= {2 if n == 0 else 1}, got {m}")
    started = time.perf_counter()
    ctx = ctx or PrecisionContext.from_settings()
    grid = list(grid) if grid is not None else default_grid()
    target = RemainderSpec(n, m)
    t_end = grid[-1]

    if n == 0:
        lo_level, lo_fn = m - 2, integrated_excess
        lo_tail = _excess_tail(integrated_excess, m, t_end, ctx)
        hi_fn, hi_tail = laguerre_f_excess, _excess_tail(laguerre_f_excess, m, t_end, ctx)
    else:
        lo_level, lo_fn = m, laguerre_f_prime_gap
        lo_tail = _laguerre_prime_gap_tail(m, t_end, ctx)
        hi_fn, hi_tail = None, moment_tail_certificate(1, m, m + 1, t_end, ctx)

    report = DegreeReport(target=target, lo=None, hi=None, grid=summarize_grid(grid))
    lo_label = f"{target.label} level {lo_level}"
    lo_scan = sign_scan(lo_fn, (m,), grid, ctx, lo_label, lo_tail, workers)
    report.checks.append(lo_scan.level_check(f"level {lo_level}"))
    if lo_scan.status is CheckStatus.PASS and lo_scan.covers_tail:
        report.lo = lo_level
        report.rows = list(lo_scan.points)
        report.min_kernel_value = lo_scan.min_value

    hi_level = lo_level + 1
    hi_label = f"{target.label} level {hi_level}"
    if hi_fn is not None:
        hi_scan = sign_scan(hi_fn, (m,), grid, ctx, hi_label, hi_tail, workers)
    else:
        hi_scan = sign_scan(
            moment_kernel_deriv, (n, m, hi_level), grid, ctx, hi_label, hi_tail, workers
        )
    report.checks.append(hi_scan.as_check(f"level {hi_level}"))
    if report.lo == lo_level and hi_scan.status is CheckStatus.PASS and hi_scan.covers_tail:
        report.lo = hi_level
        report.rows = list(hi_scan.points)
        report.min_kernel_value = hi_scan.min_value

    supporting = _supporting_checks(n, m, grid, ctx)
    report.checks.extend(supporting)

    ratio = ratio_infimum(n, None, ctx, m=m)
    report.checks.append(_ratio_check(ratio))
    # without a witness the upper end is the analytic claim: m - 1 for n = 0, m + 1 for n = 1
    if hi_scan.witness is not None:
        report.hi, report.hi_source, report.witness = mpf(hi_level), "level", hi_scan.witness
    elif ratio.value.upper < hi_level:
        report.hi, report.hi_source = ratio.value.upper, "ratio"
    else:
        report.hi, report.hi_source, report.hi_certified = mpf(hi_level), "analytic-claim", False
    report.elapsed_seconds = time.perf_counter() - started
    return report


def _supporting_checks(
    n: int, m: int, grid: Sequence[mpf], ctx: PrecisionContext
) -> list[CheckResult]:
    tail_grid = [t for t in grid if t >= SZEGO_T_MIN]
    factorial = math.factorial(m - 1)
    if n == 0:
        return [
            _grid_inequality(
                f"f_{m} >= (m-1)!/2 for t >= 2 log 3",
                lambda t: laguerre_f_excess(m, t, ctx),
                tail_grid,
            ),
        ]
    k_grid = [t for t in grid if t >= 6]
    return [
        _grid_inequality(f"K(t, {m}) >= 0 for t >= 6", lambda t: k_bound(t, m, ctx), k_grid),
        _grid_inequality(
            f"m!/12 - f_{m}' >= (m-1)! K(t, {m})",
            lambda t: laguerre_f_prime_gap(m, t, ctx) - k_bound(t, m, ctx) * factorial,
            grid,
        ),
    ]


# ---------------------------------------------------------------------------
# The limiting kernel s
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SSearchReport:
    """Result of hunting for negative values of s on ``[t_min, t_max]``."""

    witness: tuple[mpf, HPReal] | None
    minimum: tuple[mpf, HPReal]
    t_range: tuple[float, float]
    points: int

    @property
    def found(self) -> bool:
        return self.witness is not None


def s_negativity_search(
    t_max: float | None = None,
    ctx: PrecisionContext | None = None,
    points: int | None = None,
    t_min: float = 1.0,
) -> SSearchReport:
    """Look for ``t`` with ``s(t) < 0``.

    A float64 pass with rigorous rounding bounds covers a logarithmic grid;
    candidates whose lower bound dips below zero, and the grid minimum, are
    re-evaluated in high precision up to ``CMDEG_S_SEARCH_HP_LIMIT``.
    """
    ctx = ctx or PrecisionContext.from_settings()
    t_max = t_max or float(getattr(settings, "CMDEG_S_SEARCH_T_MAX", 1e8))
    points = points or int(getattr(settings, "CMDEG_S_SEARCH_POINTS", 2000))
    hp_limit = float(getattr(settings, "CMDEG_S_SEARCH_HP_LIMIT", 1e5))
    if not 0 < t_min < t_max:
        raise DomainError(f"search range must satisfy 0 < t_min < t_max, got {t_min}, {t_max}")

    grid = np.geomspace(t_min, t_max, points)
    values, errors = s_kernel_float(grid)
    lower = values - errors
    index_min = int(np.argmin(values))
    candidates = sorted(set(np.flatnonzero(lower < 0).tolist()) | {index_min})
    logger.info("s search: %d candidates out of %d points", len(candidates), points)

    witness = None
    minimum = None
    for index in candidates:
        t = float(grid[index])
        if t <= hp_limit:
            value = s_kernel(t, ctx)
        else:
            value = HPReal(mpf(float(values[index])), mpf(float(errors[index])))
        if index == index_min:
            minimum = (mpf(t), value)
        if witness is None and value.is_certified_negative():
            witness = (mpf(t), value)
    assert minimum is not None
    return SSearchReport(witness, minimum, (t_min, t_max), points)


def scaled_kernel_limit(
    t: object, m_values: Sequence[int], ctx: PrecisionContext | None = None
) -> list[tuple[int, HPReal]]:
    """``|f_m(t / (m-1)) / (m-1)! - s(t)|`` for each m, which shrinks as m grows."""
    ctx = ctx or PrecisionContext.from_settings()
    with ctx.workdps():
        t = to_mpf(t)
        limit = s_kernel(t, ctx)
        rows = []
        for m in m_values:
            if m < 2:
                raise DomainError(f"scaled_kernel_limit needs m >= 2, got {m}")
            scaled = laguerre_kernel_f(m, t / (m - 1), ctx) / math.factorial(m - 1)
            rows.append((m, abs(scaled - limit)))
        return rows


def stray_m80_check(
    m_values: Sequence[int] = (80, 100), ctx: PrecisionContext | None = None
) -> VerificationReport:
    """Evaluate ``f_m'`` at ``t* = sqrt(252 / ((m + 4)(m + 3)))`` and record its sign.

    A negative value means ``f_m`` is not monotone, so ``f_m - (m-1)!/2``
    changes sign near 0 once m is large enough.
    """
    started = time.perf_counter()
    ctx = ctx or PrecisionContext.from_settings()
    report = VerificationReport("stray-m80")
    with ctx.workdps():
        for m in m_values:
            t_star = mpmath.sqrt(mpf(252) / ((m + 4) * (m + 3)))
            try:
                value = laguerre_kernel_f_prime(m, t_star, ctx)
            except CmdegError as exc:
                report.checks.append(
                    CheckResult(f"f_{m}'(t*) < 0", CheckStatus.INCONCLUSIVE, detail=str(exc))
                )
                continue
            if value.is_certified_negative():
                status = CheckStatus.PASS
            elif value.is_certified_nonnegative():
                status = CheckStatus.FAIL
            else:
                status = CheckStatus.INCONCLUSIVE
            report.checks.append(
                CheckResult(
                    f"f_{m}'(t*) < 0",
                    status,
                    min_value=value.value,
                    tolerance=value.err_bound,
                    grid=f"t*={mp.nstr(t_star, 10)}",
                )
            )
    report.elapsed_seconds = time.perf_counter() - started
    return report


# ---------------------------------------------------------------------------
# Integral identities
# ---------------------------------------------------------------------------


def laplace_form_check(
    m: int, x: object, ctx: PrecisionContext | None = None
) -> tuple[HPReal, HPReal]:
    """Both sides of ``int f_m e^{-xt} dt - (m-1)!/(2x) = x^(m-1) (-1)^m R_0^(m)(x)``."""
    if m < 2:
        raise DomainError(f"laplace_form_check needs m >= 2, got {m}")
    ctx = ctx or PrecisionContext.from_settings()
    with ctx.workdps():
        x = to_mpf(x)
        transform = laplace_integral(
            lambda t, c: laguerre_kernel_f(m, t, c), x, ctx
        ).value
        lhs = transform - mpf(math.factorial(m - 1)) / (2 * x)
        rhs = remainder_deriv(0, m, x, ctx) * x ** (m - 1)
        return lhs, rhs


def integrated_excess_identity(
    m: int, t: object, ctx: PrecisionContext | None = None
) -> tuple[HPReal, QuadratureResult]:
    """``integrated_excess(m, t)`` and the quadrature of ``f_m - (m-1)!/2`` over ``[0, t]``."""
    ctx = ctx or PrecisionContext.from_settings()
    with ctx.workdps():
        closed = integrated_excess(m, t, ctx)
        integral = finite_integral(lambda u: laguerre_f_excess(m, u, ctx), 0, t, ctx)
        return closed, integral


def sine_square_sum(b: mpf, ctx: PrecisionContext) -> HPReal:
    """``sum_k sin^2(b / k)`` via direct terms and a Hurwitz zeta tail."""
    direct_terms = max(8, math.ceil(2 * abs(b)))
    direct = mpmath.fsum(mpmath.sin(b / k) ** 2 for k in range(1, direct_terms + 1))
    first = direct_terms + 1
    tail: list[mpf] = []
    omitted = None
    for p in range(1, 400):
        # sin^2 y = sum_p (-1)^(p+1) 2^(2p-1) y^2p / (2p)!
        term = (
            (-1) ** (p + 1) * mpf(2) ** (2 * p - 1) * b ** (2 * p) / math.factorial(2 * p)
            * mpmath.zeta(2 * p, first)
        )
        if tail and abs(term) <= ctx.series_tol * (abs(direct) + 1):
            omitted = abs(term)
            break
        tail.append(term)
    if omitted is None:
        raise CmdegError("sin^2 tail did not converge")
    return HPReal(direct + mpmath.fsum(tail), omitted + 10 * direct_terms * ctx.eps)


def sine_square_identity(
    m: int, t: object, ctx: PrecisionContext | None = None
) -> tuple[QuadratureResult, QuadratureResult]:
    """Both sides of the sin^2 form of the integrated excess.

    Left: ``int_0^t (f_m - (m-1)!/2)``. Right:
    ``4 int_0^oo sum_k sin^2(t u / (4 pi k)) u^(m-2) e^{-u} du``.
    """
    if m < 2:
        raise DomainError(f"sine_square_identity needs m >= 2, got {m}")
    ctx = ctx or PrecisionContext.from_settings()
    with ctx.workdps():
        t = to_mpf(t)
        left = finite_integral(lambda u: laguerre_f_excess(m, u, ctx), 0, t, ctx)

        def integrand(u: mpf) -> HPReal:
            weight = 4 * u ** (m - 2) * mpmath.exp(-u)
            return sine_square_sum(t * u / (4 * mp.pi), ctx) * weight

        right = semi_infinite_integral(integrand, ctx)
        return left, right
