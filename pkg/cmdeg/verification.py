"""
Numerical verification of the four propositions on CM degrees.

Each proposition is a list of named checks. A check that raises a
``CmdegError`` is recorded as inconclusive with the error message, never
dropped.
"""

from __future__ import annotations

import logging
import math
import time
from collections.abc import Callable, Sequence

import mpmath
from mpmath import mp, mpf

from .conf import settings
from .exceptions import CmdegError, DomainError, InconclusiveError
from .kernels import (
    Representation,
    binet_g_deriv,
    k_bound,
    laguerre_f_excess,
    laguerre_f_prime_gap,
    laguerre_kernel_f,
    laguerre_kernel_f_prime,
    s_kernel,
    s_kernel_prime,
    theta,
    theta_prime,
)
from .lab import (
    SZEGO_T_MIN,
    SignScan,
    _grid_inequality,
    degree_bracket,
    derivative_degree_bracket,
    integrated_excess_identity,
    kernel_sign_scan,
    laplace_form_check,
    s_negativity_search,
    scaled_kernel_limit,
    sine_square_identity,
    stray_m80_check,
)
from .models import HPReal, PrecisionContext
from .quadrature import legendre_formula_check, log_moment
from .remainders import EvalPath, RemainderSpec, ratio_bound, remainder, remainder_via_laplace
from .reports import CheckResult, CheckStatus, DegreeReport, VerificationReport, summarize_grid
from .special import laguerre
from .utils import default_grid, log_grid

logger = logging.getLogger(__name__)

PROPOSITIONS = ("1", "2", "3", "4", "stray-m80")

Check = Callable[[], CheckResult]


def compare(name: str, left: HPReal, right: HPReal, tolerance: float | mpf) -> CheckResult:
    """Check ``|left - right| <= tolerance`` allowing for both error bounds."""
    tolerance = mpf(tolerance)
    gap = abs(left.value - right.value)
    slack = left.err_bound + right.err_bound
    if gap + slack <= tolerance:
        status = CheckStatus.PASS
    elif gap - slack > tolerance:
        status = CheckStatus.FAIL
    else:
        status = CheckStatus.INCONCLUSIVE
    return CheckResult(name, status, min_value=gap, tolerance=tolerance)


def _exact_enough(value: mpf, ctx: PrecisionContext) -> HPReal:
    # a handful of correctly rounded elementary operations
    return HPReal(value, 10 * ctx.eps * (1 + abs(value)))


def _guard(name: str, check: Check) -> CheckResult:
    try:
        return check()
    except CmdegError as exc:
        logger.warning("check %r inconclusive: %s", name, exc)
        return CheckResult(name, CheckStatus.INCONCLUSIVE, detail=f"{type(exc).__name__}: {exc}")


def _run(proposition: str, checks: Sequence[tuple[str, Check]]) -> VerificationReport:
    started = time.perf_counter()
    report = VerificationReport(proposition)
    for name, check in checks:
        logger.info("proposition %s: %s", proposition, name)
        result = _guard(name, check)
        report.checks.append(result)
    report.elapsed_seconds = time.perf_counter() - started
    return report


def _scan_check(name: str, scan_fn: Callable[[], SignScan], want_witness: bool = False) -> Check:
    def check() -> CheckResult:
        scan = scan_fn()
        result = scan.as_check(name)
        if not want_witness:
            return result
        status = CheckStatus.PASS if scan.witness is not None else CheckStatus.INCONCLUSIVE
        return CheckResult(
            name, status, result.min_value, result.tolerance, result.grid, result.detail
        )

    return check


def _bracket_result(name: str, report: DegreeReport, ok: bool) -> CheckResult:
    minimum = report.min_kernel_value
    return CheckResult(
        name,
        CheckStatus.PASS if ok else CheckStatus.FAIL,
        min_value=None if minimum is None else minimum.value,
        grid=report.grid,
        detail=f"lo={report.lo}, hi={mp.nstr(report.hi, 8)} ({report.hi_source})",
    )


def _verify_grid(points: int | None) -> list[mpf]:
    """The full default scan grid unless a point count is given."""
    return default_grid(points=points)


def proposition_1(ctx: PrecisionContext, grid: Sequence[mpf]) -> list[tuple[str, Check]]:
    """g_n^(2n) >= 0 while g_n^(2n+1) changes sign; R_n has degree 2(n-1) for n >= 2."""
    checks: list[tuple[str, Check]] = []
    for n in (1, 2, 3):
        checks.append(
            (f"g_{n}^({2 * n}) >= 0", _scan_check(f"g_{n}^({2 * n}) >= 0",
             lambda n=n: kernel_sign_scan(n, 2 * n, grid, ctx)))
        )
        checks.append(
            (f"g_{n}^({2 * n + 1}) negative witness", _scan_check(
                f"g_{n}^({2 * n + 1}) negative witness",
                lambda n=n: kernel_sign_scan(n, 2 * n + 1, grid, ctx),
                want_witness=True,
            ))
        )
    for n, x in ((1, "1e-5"), (2, "1e-3"), (3, "1e-3")):
        checks.append(
            (f"ratio_bound({n}, {x}) ~ {2 * n - 1}",
             lambda n=n, x=x: compare(
                 f"ratio_bound({n}, {x}) ~ {2 * n - 1}",
                 ratio_bound(n, mpf(x), ctx), HPReal.exact(2 * n - 1), "1e-2"))
        )
    for n in (0, 1, 2):
        def moment_check(n: int = n) -> CheckResult:
            result = log_moment(n, ctx)
            assert result.reference is not None
            return compare(f"log moment {n}", result.value, result.reference, "1e-20")

        checks.append((f"log moment {n}", moment_check))
    for t in ("1e-3", "1", "5"):
        def legendre_check(t: str = t) -> CheckResult:
            result = legendre_formula_check(mpf(t), ctx)
            assert result.reference is not None
            return compare(f"sin(xt)/(e^x - 1) at t={t}", result.value, result.reference, "1e-20")

        checks.append((f"sin(xt)/(e^x - 1) at t={t}", legendre_check))
    for n in (1, 2, 3):
        checks.append(
            (f"g_{n}^({2 * n})(1) series vs integral",
             lambda n=n: compare(
                 f"g_{n}^({2 * n})(1) series vs integral",
                 binet_g_deriv(n, 2 * n, 1, ctx, Representation.SMALL_T_SERIES),
                 binet_g_deriv(n, 2 * n, 1, ctx, Representation.INTEGRAL),
                 "1e-20"))
        )

    for n in (1, 2, 3):
        for x in ("0.5", "1", "5", "20"):
            name = f"R_{n}({x}) closed form vs Laplace"
            checks.append((name, lambda n=n, x=x, name=name: compare(
                name,
                remainder(n, mpf(x), ctx, EvalPath.CLOSED_FORM),
                remainder_via_laplace(n, mpf(x), ctx),
                "1e-25",
            )))

    def theta_check() -> CheckResult:
        with ctx.workdps():
            return _grid_inequality(
                "theta <= 0 and theta' >= 0",
                lambda x: _exact_enough(min(-theta(x), theta_prime(x)), ctx),
                grid,
            )

    checks.append(("theta <= 0 and theta' >= 0", theta_check))
    for n in (2, 3, 4):
        def bracket_check(n: int = n) -> CheckResult:
            report = degree_bracket(RemainderSpec(n), ctx=ctx, grid=grid)
            ok = (
                report.lo is not None
                and report.lo >= 2 * (n - 1)
                and report.hi is not None
                and report.hi <= 2 * n - 1 + mpf("1e-2")
            )
            return _bracket_result(f"R_{n} bracket holds {2 * (n - 1)}", report, ok)

        checks.append((f"R_{n} bracket holds {2 * (n - 1)}", bracket_check))
    return checks


def proposition_2(ctx: PrecisionContext, grid: Sequence[mpf]) -> list[tuple[str, Check]]:
    """Laplace form of R_0 derivatives through f_m, and the limit kernel s."""
    checks: list[tuple[str, Check]] = []
    for m in (2, 3):
        for x in (1, 2):
            name = f"Laplace form of R_0^({m}) at x={x}"
            checks.append((name, lambda m=m, x=x, name=name: compare(
                name, *laplace_form_check(m, x, ctx), "1e-20")))
    for t in (1, 5):
        name = f"f_m(t/(m-1))/(m-1)! -> s(t) at t={t}"

        def limit_check(t: int = t, name: str = name) -> CheckResult:
            rows = scaled_kernel_limit(t, (5, 10, 20, 40), ctx)
            gaps = [gap.value for _, gap in rows]
            shrinking = all(b < a for a, b in zip(gaps, gaps[1:], strict=False))
            return CheckResult(
                name,
                CheckStatus.PASS if shrinking else CheckStatus.FAIL,
                min_value=gaps[-1],
                detail=", ".join(f"m={m}: {mp.nstr(gap.value, 4)}" for m, gap in rows),
            )

        checks.append((name, limit_check))
    checks.append(("s(0) = 1/2", lambda: compare(
        "s(0) = 1/2", s_kernel(0, ctx), HPReal.exact(0.5), 0)))

    def search_check() -> CheckResult:
        t_max = float(getattr(settings, "CMDEG_VERIFY_S_T_MAX", 1e3))
        search = s_negativity_search(t_max, ctx)
        t_min, value = search.minimum
        if search.found:
            assert search.witness is not None
            return CheckResult(
                "s negativity search",
                CheckStatus.PASS,
                min_value=search.witness[1].value,
                grid=f"log[1, {t_max:g}] x {search.points}",
                detail=f"s < 0 at t={mp.nstr(search.witness[0], 10)}",
            )
        return CheckResult(
            "s negativity search",
            CheckStatus.INCONCLUSIVE,
            min_value=value.value,
            grid=f"log[1, {t_max:g}] x {search.points}",
            detail=f"not found in scanned range; minimum near t={mp.nstr(t_min, 8)}",
        )

    checks.append(("s negativity search", search_check))
    return checks


def proposition_3(ctx: PrecisionContext, grid: Sequence[mpf]) -> list[tuple[str, Check]]:
    """f_m >= (m-1)!/2 beyond 2 log 3 and (-1)^m R_0^(m) has degree at least m - 2."""
    checks: list[tuple[str, Check]] = []
    tail_grid = [t for t in grid if t >= SZEGO_T_MIN]
    for m in range(2, 11):
        name = f"f_{m} >= (m-1)!/2 for t >= 2 log 3"
        checks.append((name, lambda m=m, name=name: _grid_inequality(
            name, lambda t: laguerre_f_excess(m, t, ctx), tail_grid)))

    def szego_lower(m: int, t: mpf) -> HPReal:
        q = mpmath.exp(-t / 2)
        return laguerre_kernel_f(m, t, ctx) - math.factorial(m - 1) * (1 - q / (1 - q))

    for m in (2, 5, 10):
        name = f"f_{m} >= (m-1)! (1 - q/(1 - q))"
        checks.append((name, lambda m=m, name=name: _grid_inequality(
            name, lambda t: szego_lower(m, t), tail_grid)))
    for m in (3, 4, 5):
        for t in (1, 3, 6):
            name = f"integrated excess identity m={m} t={t}"

            def excess_check(m: int = m, t: int = t, name: str = name) -> CheckResult:
                closed, integral = integrated_excess_identity(m, t, ctx)
                return compare(name, closed, integral.value, "1e-15")

            checks.append((name, excess_check))
            name = f"sin^2 identity m={m} t={t}"

            def square_check(m: int = m, t: int = t, name: str = name) -> CheckResult:
                left, right = sine_square_identity(m, t, ctx)
                return compare(name, left.value, right.value, "1e-12")

            checks.append((name, square_check))
    for m in range(2, 9):
        for t in ("0.5", "2.5", "6"):
            name = f"f_{m}({t}) Laguerre vs s-integral"
            checks.append((name, lambda m=m, t=t, name=name: compare(
                name,
                laguerre_kernel_f(m, mpf(t), ctx, Representation.LAGUERRE_SUM),
                laguerre_kernel_f(m, mpf(t), ctx, Representation.INTEGRAL),
                "1e-20",
            )))
    for m in range(3, 9):
        name = f"(-1)^{m} R_0^({m}) has degree >= {m - 2}"

        def bracket_check(m: int = m, name: str = name) -> CheckResult:
            report = derivative_degree_bracket(0, m, ctx, grid)
            return _bracket_result(name, report, report.lo is not None and report.lo >= m - 2)

        checks.append((name, bracket_check))
    laguerre_grid = log_grid(1e-3, 60, 200)
    for m in range(1, 61):
        name = f"|L_{m}(t)| <= e^(t/2)"
        checks.append((name, lambda m=m, name=name: _grid_inequality(
            name,
            lambda t: HPReal.exact(mpmath.exp(t / 2)) - abs(laguerre(m, t, ctx)),
            laguerre_grid,
        )))
    return checks


def proposition_4(ctx: PrecisionContext, grid: Sequence[mpf]) -> list[tuple[str, Check]]:
    """|s'| <= 1/12, the K(t, m) bound and (-1)^m R_1^(m) has degree at least m."""
    checks: list[tuple[str, Check]] = []
    s_grid = [mpf(0)] + log_grid(1e-3, 1e4, 120)
    checks.append(("|s'| <= 1/12", lambda: _grid_inequality(
        "|s'| <= 1/12", lambda t: HPReal.exact(mpf(1) / 12) - abs(s_kernel_prime(t, ctx)), s_grid)))
    for m in (2, 3, 4):
        name = f"f_{m}'(1e-6) ~ {m}!/12"
        checks.append((name, lambda m=m, name=name: compare(
            name, laguerre_kernel_f_prime(m, mpf("1e-6"), ctx),
            HPReal.exact(mpf(math.factorial(m)) / 12), "1e-8")))
    k_grid = [t for t in grid if t >= 6]
    four_grid = [t for t in grid if t >= 4]
    for m in range(1, 11):
        name = f"K(t, {m}) >= 0 for t >= 6"
        checks.append((name, lambda m=m, name=name: _grid_inequality(
            name, lambda t: k_bound(t, m, ctx), k_grid)))
        name = f"K(t, {m}) >= K(t, 1) for t >= 4"
        checks.append((name, lambda m=m, name=name: _grid_inequality(
            name, lambda t: k_bound(t, m, ctx) - k_bound(t, 1, ctx), four_grid)))

    def k_at_six() -> CheckResult:
        value = k_bound(6, 1, ctx)
        status = CheckStatus.PASS if value.lower > mpf("0.01") else CheckStatus.FAIL
        return CheckResult("K(6, 1) > 0.01", status, min_value=value.value, tolerance=mpf("0.01"))

    checks.append(("K(6, 1) > 0.01", k_at_six))

    def k_monotone() -> CheckResult:
        values = [k_bound(t, 1, ctx) for t in k_grid]
        steps = [b - a for a, b in zip(values, values[1:], strict=False)]
        worst = min(steps, key=lambda s: s.value)
        status = CheckStatus.PASS if all(s.lower >= 0 for s in steps) else CheckStatus.FAIL
        return CheckResult(
            "K(t, 1) non-decreasing for t >= 6", status, min_value=worst.value,
            grid=summarize_grid(k_grid),
        )

    checks.append(("K(t, 1) non-decreasing for t >= 6", k_monotone))
    for m in range(1, 9):
        name = f"{m}!/12 - f_{m}' >= 0"
        checks.append((name, lambda m=m, name=name: _grid_inequality(
            name, lambda t: laguerre_f_prime_gap(m, t, ctx), grid)))
        name = f"{m}!/12 - f_{m}' >= (m-1)! K(t, {m})"
        checks.append((name, lambda m=m, name=name: _grid_inequality(
            name,
            lambda t: laguerre_f_prime_gap(m, t, ctx) - k_bound(t, m, ctx) * math.factorial(m - 1),
            grid,
        )))
    for m in range(2, 9):
        for t in ("0.5", "2.5", "6"):
            name = f"f_{m}'({t}) Laguerre vs s'-integral"
            checks.append((name, lambda m=m, t=t, name=name: compare(
                name,
                laguerre_kernel_f_prime(m, mpf(t), ctx, Representation.LAGUERRE_SUM),
                laguerre_kernel_f_prime(m, mpf(t), ctx, Representation.INTEGRAL),
                "1e-20",
            )))
    for m in range(1, 7):
        name = f"(-1)^{m} R_1^({m}) has degree >= {m}"

        def bracket_check(m: int = m, name: str = name) -> CheckResult:
            report = derivative_degree_bracket(1, m, ctx, grid)
            return _bracket_result(name, report, report.lo is not None and report.lo >= m)

        checks.append((name, bracket_check))
    return checks


_BUILDERS: dict[str, Callable[[PrecisionContext, Sequence[mpf]], list[tuple[str, Check]]]] = {
    "1": proposition_1,
    "2": proposition_2,
    "3": proposition_3,
    "4": proposition_4,
}


def verify_proposition(
    proposition: str | int,
    ctx: PrecisionContext | None = None,
    grid_points: int | None = None,
) -> VerificationReport:
    """Run every check of *proposition* (``1``-``4``, ``stray-m80`` or ``all``).

    Raises:
        DomainError: For an unknown proposition id.
    """
    ctx = ctx or PrecisionContext.from_settings()
    key = str(proposition)
    if key == "all":
        report = VerificationReport("all")
        for name in PROPOSITIONS:
            report.extend(verify_proposition(name, ctx, grid_points))
        return report
    if key == "stray-m80":
        return stray_m80_check(ctx=ctx)
    if key not in _BUILDERS:
        raise DomainError(
            f"unknown proposition {proposition!r}; expected one of {PROPOSITIONS} or 'all'"
        )
    grid = _verify_grid(grid_points)
    return _run(key, _BUILDERS[key](ctx, grid))


# Conjectured CM degrees of (-1)^m R_n^(m), keyed by label: (n, m, degree) rows.
CONJECTURES: dict[str, tuple[tuple[int, int, int], ...]] = {
    "R1": ((0, 0, 0), (1, 0, 1)),
    "R2": ((2, 0, 2), (3, 0, 4)),
    "R3": ((0, 1, 1), (1, 1, 2)),
    "R4": ((2, 1, 3), (3, 1, 5)),
    "R5": ((0, 2, 1), (0, 3, 2), (0, 4, 3), (1, 2, 2), (1, 3, 3)),
    "R6": ((2, 2, 4), (2, 3, 5), (3, 2, 6)),
}


def conjecture_table(
    tag: str,
    ctx: PrecisionContext | None = None,
    grid: Sequence[mpf] | None = None,
    workers: int | None = None,
) -> list[DegreeReport]:
    """Degree brackets for every target of conjecture *tag*.

    Derivatives of ``R_0`` and ``R_1`` go through the Laguerre-kernel
    brackets; the rest through the moment-kernel level scans. A bracket the
    ratio cap contradicts is still reported, from the error's partial report.

    Raises:
        DomainError: For an unknown tag.
    """
    if tag not in CONJECTURES:
        raise DomainError(f"unknown conjecture {tag!r}; expected one of {sorted(CONJECTURES)}")
    ctx = ctx or PrecisionContext.from_settings()
    grid = list(grid) if grid is not None else default_grid()
    reports = []
    for n, m, degree in CONJECTURES[tag]:
        if (n == 0 and m >= 2) or (n == 1 and m >= 1):
            report = derivative_degree_bracket(n, m, ctx, grid, workers)
        else:
            try:
                report = degree_bracket(RemainderSpec(n, m), ctx=ctx, grid=grid, workers=workers)
            except InconclusiveError as exc:
                logger.warning("%s: %s", tag, exc)
                if exc.report is None:
                    raise
                report = exc.report
        report.conjecture, report.conjectured_degree = tag, degree
        reports.append(report)
    return reports
