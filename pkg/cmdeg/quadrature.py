"""
Double-exponential quadrature in arbitrary precision.

``semi_infinite_integral`` uses the exp-sinh map ``x = exp(pi/2 sinh tau)``
and ``finite_integral`` the tanh-sinh map. Both halve the step per level,
reuse every node of the coarser levels, and stop once two successive levels
agree to ``quad_tol``. Oscillatory integrands are split at their sign changes
and the alternating partial sums are accelerated, so the work does not grow
with the frequency.
"""

from __future__ import annotations

import logging
import math
from collections.abc import Callable
from dataclasses import dataclass, field

import mpmath
from mpmath import mp, mpf

from .conf import settings
from .exceptions import DomainError, QuadratureNonConvergence
from .kernels import KernelSpec, evaluate_kernel, theta
from .models import HPReal, PrecisionContext, to_mpf
from .special import bernoulli_mpf

logger = logging.getLogger(__name__)

Integrand = Callable[[mpf], "HPReal | mpf"]
Transform = Callable[[mpf], "tuple[mpf, mpf] | None"]

# Nodes are generated for |tau| up to this value.
TAU_MAX = mpf("6.5")
# Oscillatory integrals are split into pieces no longer than this.
SEGMENT_MAX = 4
MAX_SEGMENTS = 100_000
# Alternating pieces summed before the accelerated estimate is consulted, and
# the count after which only the direct sum is continued.
MIN_ACCELERATED_PIECES = 4
MAX_ACCELERATED_PIECES = 400
# Kernels evaluated by laplace_integral may grow at most like t^GROWTH_DEGREE.
GROWTH_DEGREE = 40


@dataclass(frozen=True)
class QuadratureResult:
    """Value of a quadrature plus the bookkeeping needed to audit it.

    ``history`` lists the estimate after each refinement level and
    ``reference`` carries a closed form when the integral has one.
    """

    value: HPReal
    nodes_used: int
    refinement_levels: int
    converged: bool = True
    history: tuple[mpf, ...] = field(default=(), compare=False)
    reference: HPReal | None = None

    @property
    def discrepancy(self) -> mpf | None:
        """|value - reference| when a reference is known."""
        if self.reference is None:
            return None
        return abs(self.value.value - self.reference.value)


def _evaluate(fn: Integrand, x: mpf) -> tuple[mpf, mpf]:
    result = fn(x)
    if isinstance(result, HPReal):
        return result.value, result.err_bound
    return to_mpf(result), mpf(0)


def _exp_sinh(tau: mpf) -> tuple[mpf, mpf]:
    u = mp.pi / 2 * mpmath.sinh(tau)
    x = mpmath.exp(u)
    return x, x * mp.pi / 2 * mpmath.cosh(tau)


def _tanh_sinh(a: mpf, b: mpf) -> Transform:
    width = b - a

    def transform(tau: mpf) -> tuple[mpf, mpf] | None:
        u = mp.pi / 2 * mpmath.sinh(tau)
        # distances to the nearer endpoint keep full relative precision
        if tau < 0:
            e = mpmath.exp(2 * u)
            x = a + width * e / (1 + e)
        else:
            e = mpmath.exp(-2 * u)
            x = b - width * e / (1 + e)
        if x <= a or x >= b:
            return None
        weight = width / 2 * mp.pi / 2 * mpmath.cosh(tau) / mpmath.cosh(u) ** 2
        return x, weight

    return transform


def _level_taus(level: int, h: mpf, sign: int) -> Callable[[int], mpf]:
    if level == 0:
        return lambda k: sign * k * h
    return lambda k: sign * (2 * k + 1) * h


def _double_exponential(
    fn: Integrand,
    transform: Transform,
    ctx: PrecisionContext,
    max_levels: int | None = None,
    node_cap: int | None = None,
) -> QuadratureResult:
    max_levels = max_levels or int(getattr(settings, "CMDEG_QUAD_MAX_LEVELS", 12))
    node_cap = node_cap or int(getattr(settings, "CMDEG_QUAD_NODE_CAP", 2**15))
    tol = ctx.quad_tol
    node_tol = tol * mpf(10) ** -5

    total = mpf(0)
    err_weighted = mpf(0)
    truncation = mpf(0)
    nodes = 0
    history: list[mpf] = []
    h = mpf(1)
    estimate = mpf(0)
    for level in range(max_levels):
        if level:
            h /= 2
        contributions: list[mpf] = []
        level_nodes = 0
        for sign in (1, -1):
            if level == 0 and sign == -1:
                start = 1
            else:
                start = 0
            tau_of = _level_taus(level, h, sign)
            small = 0
            k = start
            while True:
                tau = tau_of(k)
                k += 1
                if abs(tau) > TAU_MAX:
                    break
                mapped = transform(tau)
                if mapped is None:
                    break
                x, weight = mapped
                value, err = _evaluate(fn, x)
                contribution = value * weight
                contributions.append(contribution)
                err_weighted += err * weight
                level_nodes += 1
                if abs(contribution) <= node_tol and abs(tau) >= 1:
                    small += 1
                    if small >= 2:
                        truncation = max(truncation, abs(contribution))
                        break
                else:
                    small = 0
                if level_nodes > node_cap:
                    raise QuadratureNonConvergence(
                        f"node cap {node_cap} exceeded at level {level}",
                        result=_partial(estimate, nodes, level, history),
                    )
        nodes += level_nodes
        total += mpmath.fsum(contributions)
        previous = estimate
        estimate = h * total
        history.append(estimate)
        if level >= 2 and abs(estimate - previous) <= tol * max(1, abs(estimate)):
            err = (
                abs(estimate - previous)
                + h * err_weighted
                + 4 * truncation
                + 10 * nodes * ctx.eps * max(1, abs(estimate))
            )
            logger.debug("quadrature converged: levels=%d nodes=%d", level + 1, nodes)
            return QuadratureResult(HPReal(estimate, err), nodes, level + 1, True, tuple(history))

    raise QuadratureNonConvergence(
        f"no convergence after {max_levels} levels",
        result=_partial(estimate, nodes, max_levels, history),
    )


def _partial(estimate: mpf, nodes: int, levels: int, history: list[mpf]) -> QuadratureResult:
    spread = abs(history[-1] - history[-2]) if len(history) >= 2 else abs(estimate)
    return QuadratureResult(HPReal(estimate, spread), nodes, levels, False, tuple(history))


def semi_infinite_integral(fn: Integrand, ctx: PrecisionContext | None = None) -> QuadratureResult:
    """Integrate *fn* over ``(0, oo)`` with the exp-sinh rule.

    Raises:
        QuadratureNonConvergence: If the level or node cap is reached first.
    """
    ctx = ctx or PrecisionContext.from_settings()
    with ctx.workdps():
        return _double_exponential(fn, _exp_sinh, ctx)


def finite_integral(
    fn: Integrand, a: object, b: object, ctx: PrecisionContext | None = None
) -> QuadratureResult:
    """Integrate *fn* over ``[a, b]`` with the tanh-sinh rule.

    Endpoints are never evaluated, so integrable endpoint singularities are fine.
    """
    ctx = ctx or PrecisionContext.from_settings()
    with ctx.workdps():
        a, b = to_mpf(a), to_mpf(b)
        if a == b:
            return QuadratureResult(HPReal.exact(0), 0, 0)
        if a > b:
            flipped = finite_integral(fn, b, a, ctx)
            return QuadratureResult(
                -flipped.value, flipped.nodes_used, flipped.refinement_levels,
                flipped.converged, tuple(-v for v in flipped.history),
            )
        return _double_exponential(fn, _tanh_sinh(a, b), ctx)


def oscillatory_integral(
    fn: Integrand,
    frequency: object,
    tail_bound: Callable[[mpf], mpf],
    ctx: PrecisionContext | None = None,
    phase: object = 0,
) -> QuadratureResult:
    """Integrate an oscillating *fn* over ``(0, oo)`` piece by piece.

    *fn* must change sign at ``(k + phase) pi / frequency``. When that
    half-period is at most ``SEGMENT_MAX`` the half line is cut at the sign
    changes. The pieces then alternate and their partial sums are accelerated
    with the Cohen-Villegas-Zagier transform (``mpmath.cohen_alt``). The
    accelerated value is accepted once two successive estimates agree to
    ``quad_tol / 100``, and that change is added to the error bound. Longer
    half-periods use pieces of length ``SEGMENT_MAX``. Either way the direct
    sum stops once ``tail_bound(X)``, a bound on the integral beyond ``X``,
    drops below the same tolerance.
    """
    ctx = ctx or PrecisionContext.from_settings()
    with ctx.workdps():
        frequency = to_mpf(frequency)
        if frequency < 0:
            raise DomainError(f"frequency must be non-negative, got {frequency}")
        tol = ctx.quad_tol / 100
        alternating = frequency > 0 and mp.pi / frequency <= SEGMENT_MAX
        if alternating:
            half_period = mp.pi / frequency
            offset = to_mpf(phase) % 1
            first = 0 if offset else 1

            def piece_end(k: int) -> mpf:
                return (k + first + offset) * half_period

        else:

            def piece_end(k: int) -> mpf:
                return mpf((k + 1) * SEGMENT_MAX)

        accelerator = mpmath.cohen_alt()
        partial: list[mpf] = []
        estimates: list[mpf] = []
        err = mpf(0)
        nodes = 0
        levels = 0
        settled = 0
        start = mpf(0)
        for k in range(MAX_SEGMENTS):
            end = piece_end(k)
            piece = finite_integral(fn, start, end, ctx)
            nodes += piece.nodes_used
            levels = max(levels, piece.refinement_levels)
            err += piece.value.err_bound
            partial.append(piece.value.value + (partial[-1] if partial else 0))
            start = end

            tail = tail_bound(end)
            if tail <= tol:
                logger.debug("oscillatory integral: %d pieces summed directly", k + 1)
                return QuadratureResult(
                    HPReal(partial[-1], err + tail), nodes, levels, history=tuple(estimates)
                )
            if not alternating or not MIN_ACCELERATED_PIECES <= k + 1 <= MAX_ACCELERATED_PIECES:
                continue
            estimate, change = accelerator.update_psum(partial)
            estimates.append(estimate)
            settled = settled + 1 if change <= tol else 0
            if settled == 2:
                logger.debug("oscillatory integral: %d pieces accelerated", k + 1)
                return QuadratureResult(
                    HPReal(estimate, err + 2 * change), nodes, levels, history=tuple(estimates)
                )
        raise QuadratureNonConvergence(
            f"oscillatory integral not settled after {MAX_SEGMENTS} pieces"
        )


def laplace_integral(
    kernel: KernelSpec | Callable[[mpf, PrecisionContext], HPReal],
    x: object,
    ctx: PrecisionContext | None = None,
) -> QuadratureResult:
    """The Laplace transform ``int_0^oo kernel(t) e^{-x t} dt`` for ``x > 0``.

    The kernel must grow at most polynomially; nodes where ``e^{-xt}``
    has already underflowed the working precision are skipped.
    """
    ctx = ctx or PrecisionContext.from_settings()
    with ctx.workdps():
        x = to_mpf(x)
        if x <= 0:
            raise DomainError(f"laplace_integral requires x > 0, got {x}")
        negligible = (ctx.dps + 10) * mpmath.log(10)

        def integrand(t: mpf) -> HPReal:
            exponent = x * t
            if exponent - GROWTH_DEGREE * mpmath.log(max(t, 1)) > negligible:
                return HPReal.exact(0)
            if isinstance(kernel, KernelSpec):
                value = evaluate_kernel(kernel, t, ctx)
            else:
                value = kernel(t, ctx)
            weight = mpmath.exp(-exponent)
            return HPReal(value.value * weight, value.err_bound * weight)

        return _double_exponential(integrand, _exp_sinh, ctx)


def _incomplete_gamma_tail(power: int, start: mpf, factor: int) -> mpf:
    # int_X^oo x^p |theta(x)| dx <= 2 Gamma(p + 1, X) / (1 - e^{-X})
    return factor * mpmath.gammainc(power + 1, start) / (1 - mpmath.exp(-start))


def osc_log_moment(n: int, t: object, ctx: PrecisionContext | None = None) -> QuadratureResult:
    """``g_n^(2n)(t)`` as ``(2 pi)^-(2n+2) int_0^oo x^2n (cos(x t / 2 pi) - 1) theta(x) dx``.

    For short half-periods the cosine moment is integrated with acceleration
    and the plain log moment subtracted. Otherwise the integrand is kept as
    ``-2 x^2n sin^2(x t / 4 pi) theta(x)``, which has no cancellation near ``t = 0``.
    """
    if n < 0:
        raise DomainError(f"osc_log_moment requires n >= 0, got {n}")
    ctx = ctx or PrecisionContext.from_settings()
    with ctx.workdps():
        t = to_mpf(t)
        omega = t / (2 * mp.pi)
        power = 2 * n
        if omega > 0 and mp.pi / omega <= SEGMENT_MAX:
            cosine = oscillatory_integral(
                lambda x: x**power * mpmath.cos(omega * x) * theta(x),
                omega,
                lambda start: _incomplete_gamma_tail(power, start, 2),
                ctx,
                phase=mpf(1) / 2,
            )
            moment = semi_infinite_integral(lambda x: x**power * theta(x), ctx)
            value = cosine.value - moment.value
            nodes = cosine.nodes_used + moment.nodes_used
            levels = max(cosine.refinement_levels, moment.refinement_levels)
        else:
            result = oscillatory_integral(
                lambda x: -2 * x**power * mpmath.sin(omega * x / 2) ** 2 * theta(x),
                omega,
                lambda start: _incomplete_gamma_tail(power, start, 4),
                ctx,
            )
            value, nodes, levels = result.value, result.nodes_used, result.refinement_levels
        scale = (2 * mp.pi) ** -(2 * n + 2)
        return QuadratureResult(value * scale, nodes, levels)


def osc_sine_moment(n: int, t: object, ctx: PrecisionContext | None = None) -> QuadratureResult:
    """``g_n^(2n+1)(t)`` as ``-(2 pi)^-(2n+3) int_0^oo x^(2n+1) sin(x t / 2 pi) theta(x) dx``."""
    if n < 0:
        raise DomainError(f"osc_sine_moment requires n >= 0, got {n}")
    ctx = ctx or PrecisionContext.from_settings()
    with ctx.workdps():
        t = to_mpf(t)
        omega = t / (2 * mp.pi)

        def integrand(x: mpf) -> mpf:
            return x ** (2 * n + 1) * mpmath.sin(omega * x) * theta(x)

        result = oscillatory_integral(
            integrand, omega, lambda start: _incomplete_gamma_tail(2 * n + 1, start, 2), ctx
        )
        scale = -((2 * mp.pi) ** -(2 * n + 3))
        return QuadratureResult(
            result.value * scale, result.nodes_used, result.refinement_levels
        )


def log_moment_closed_form(n: int, ctx: PrecisionContext | None = None) -> HPReal:
    """Exact value of ``int_0^oo x^2n theta(x) dx``, that is ``-2 (2n)! zeta(2n + 2)``."""
    ctx = ctx or PrecisionContext.from_settings()
    with ctx.workdps():
        value = (
            (-1) ** (n + 1)
            * (2 * mp.pi) ** (2 * n + 2)
            * bernoulli_mpf(2 * n + 2)
            / ((2 * n + 2) * (2 * n + 1))
        )
        return HPReal(value, abs(value) * ctx.eps * 10)


def log_moment(n: int, ctx: PrecisionContext | None = None) -> QuadratureResult:
    """``int_0^oo x^2n theta(x) dx`` by quadrature, with its closed form as reference."""
    if n < 0:
        raise DomainError(f"log_moment requires n >= 0, got {n}")
    ctx = ctx or PrecisionContext.from_settings()
    with ctx.workdps():
        result = semi_infinite_integral(lambda x: x ** (2 * n) * theta(x), ctx)
        return QuadratureResult(
            result.value,
            result.nodes_used,
            result.refinement_levels,
            result.converged,
            result.history,
            reference=log_moment_closed_form(n, ctx),
        )


def legendre_formula_check(t: object, ctx: PrecisionContext | None = None) -> QuadratureResult:
    """``int_0^oo sin(x t) / (e^x - 1) dx`` against ``(pi/2) coth(pi t) - 1/(2t)``."""
    ctx = ctx or PrecisionContext.from_settings()
    with ctx.workdps():
        t = to_mpf(t)
        if t <= 0:
            raise DomainError(f"legendre_formula_check requires t > 0, got {t}")
        result = oscillatory_integral(
            lambda x: mpmath.sin(x * t) / mpmath.expm1(x),
            t,
            lambda start: mpmath.exp(-start) / (1 - mpmath.exp(-start)),
            ctx,
        )
        extra = max(0, math.ceil(-2 * math.log10(float(t)))) + 10
        with ctx.raised(extra).workdps():
            reference = mp.pi / 2 * mpmath.coth(mp.pi * t) - 1 / (2 * t)
        return QuadratureResult(
            result.value,
            result.nodes_used,
            result.refinement_levels,
            reference=HPReal(+reference, abs(reference) * ctx.eps * 10),
        )
