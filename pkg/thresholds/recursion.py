"""Concatenation recursion for bad-part norms and the threshold it implies"""
import logging
import math

import numpy as np
from django.conf import settings
from scipy import optimize

from ftnm.exceptions import DomainError, NoConvergenceError

from .models import (
    BASE_RULES,
    CLUSTER_LEMMA,
    LEMMA2_PRODUCT,
    LevelReport,
    RecursionLevel,
    RecursionTrace,
    ThresholdParams,
    check_base_rule,
)

logger = logging.getLogger(__name__)


def _check_A_C(A_C: int) -> None:
    if A_C < 2:
        raise DomainError(f'A_C={A_C} < 2')


def threshold_value(A_C: int) -> float:
    """Critical λ0·t0: 1/(e·A_C·(A_C − 1))"""
    _check_A_C(A_C)
    return 1 / (math.e * A_C * (A_C - 1))


def probabilistic_threshold(A_C: int) -> float:
    """Threshold of the stochastic fault model, 1/C(A_C, 2)"""
    _check_A_C(A_C)
    return 1 / math.comb(A_C, 2)


def recursion_step(x: float, A_C: int) -> float:
    """C(A_C,2)·x²·(1+x)^(A_C−2): bound on R_B one level up"""
    if x < 0:
        raise DomainError(f'Negative norm bound x={x}')
    _check_A_C(A_C)
    return math.comb(A_C, 2) * x**2 * (1 + x) ** (A_C - 2)


def _log_step(log_x: float, A_C: int) -> float:
    return (
        math.log(math.comb(A_C, 2))
        + 2 * log_x
        + (A_C - 2) * math.log1p(math.exp(log_x))
    )


def cluster_base_bound(A_C: int, eta: float) -> float:
    """2·(A_C·η)²: at least two faulty locations in a clustered rectangle"""
    if eta < 0:
        raise DomainError(f'Negative eta={eta}')
    return 2 * (A_C * eta) ** 2


def base_bound(A_C: int, eta: float, base_rule: str = LEMMA2_PRODUCT) -> float:
    """x_1 for the chosen base rule"""
    check_base_rule(base_rule)
    if base_rule == CLUSTER_LEMMA:
        return cluster_base_bound(A_C, eta)
    if eta < 0:
        raise DomainError(f'Negative eta={eta}')
    # each location contributes a fault of norm at most 2η
    return recursion_step(2 * eta, A_C)


def compare_base_rules(A_C: int, eta: float) -> dict[str, float]:
    return {rule: base_bound(A_C, eta, rule) for rule in BASE_RULES}


def _log(x: float) -> float:
    return math.log(x) if x > 0 else -math.inf


def iterate_recursion(
    params: ThresholdParams,
    r_max: int,
    base_rule: str = LEMMA2_PRODUCT,
) -> RecursionTrace:
    """x_1 … x_r_max, stopping early once the bound exceeds one

    Values below FTNM_LOG_SPACE_BELOW are carried as logarithms so the
    doubly exponential decay stays visible past float underflow.
    """
    if r_max < 1:
        raise DomainError(f'r_max={r_max} < 1')
    A_C = params.A_C
    x = base_bound(A_C, params.eta, base_rule)
    log_x = _log(x)
    levels = [RecursionLevel(1, x, log_x)]
    diverged = x > 1
    for r in range(2, r_max + 1):
        if diverged:
            break
        if x >= settings.FTNM_LOG_SPACE_BELOW:
            x = recursion_step(x, A_C)
            log_x = _log(x)
        elif log_x > -math.inf:
            log_x = _log_step(log_x, A_C)
            x = math.exp(log_x)
        levels.append(RecursionLevel(r, x, log_x))
        diverged = x > 1

    last = levels[-1]
    decreasing = len(levels) > 1 and last.log_x < levels[-2].log_x
    converged = not diverged and (
        last.x < settings.FTNM_UNDERFLOW_FLOOR
        or (decreasing and last.x < params.epsilon_target)
    )
    logger.debug(
        'Recursion A_C=%d eta=%g %s: %d levels, x=%g, converged=%s',
        A_C, params.eta, base_rule, len(levels), last.x, converged,
    )
    return RecursionTrace(
        levels=tuple(levels), converged=converged, diverged=diverged
    )


def fixed_point(A_C: int) -> float:
    """Nonzero x with recursion_step(x) = x"""
    _check_A_C(A_C)
    return optimize.bisect(
        lambda x: math.comb(A_C, 2) * x * (1 + x) ** (A_C - 2) - 1,
        0.0,
        1.0,
        xtol=settings.FTNM_BISECTION_XTOL,
    )


def empirical_threshold(
    A_C: int, base_rule: str = LEMMA2_PRODUCT, tol: float = 1e-10
) -> float:
    """Largest η whose recursion does not diverge, by bisection on [0, 1]"""
    if tol <= 0:
        raise DomainError(f'Non-positive tolerance {tol}')
    _check_A_C(A_C)
    check_base_rule(base_rule)

    def diverges(eta: float) -> float:
        trace = iterate_recursion(
            ThresholdParams(A_C=A_C, eta=eta),
            settings.FTNM_MAX_LEVEL,
            base_rule,
        )
        return 1.0 if trace.diverged else -1.0

    return optimize.bisect(diverges, 0.0, 1.0, xtol=tol)


def decay_slope(trace: RecursionTrace, skip: int = 4) -> float:
    """Least-squares slope of log log(1/x_r) against r"""
    rows = [
        (level.r, math.log(-level.log_x))
        for level in trace.levels[skip:]
        if -math.inf < level.log_x < 0
    ]
    if len(rows) < 2:
        raise DomainError('Not enough decaying levels to fit a slope')
    r, y = np.array(rows).T
    slope, _ = np.polyfit(r, y, 1)
    return float(slope)


def global_bad_bound(N: int, r_bad: float) -> float:
    """N·x·(1+x)^(N−1): some rectangle of the whole circuit is bad"""
    if N < 1:
        raise DomainError(f'N={N} < 1')
    if r_bad < 0:
        raise DomainError(f'Negative norm bound {r_bad}')
    return N * r_bad * (1 + r_bad) ** (N - 1)


def _check_eps(eps: float) -> None:
    if not 0 <= eps < 0.5:
        raise DomainError(f'eps={eps} outside [0, 1/2)')


def output_distance_bound(eps: float) -> float:
    """√(2ε) + 16ε"""
    _check_eps(eps)
    return math.sqrt(2 * eps) + 16 * eps


def output_distance_terms(eps: float) -> tuple[float, float]:
    """√(2ε − ε²) and 4ε/(1 − ε)², the two pieces of the distance bound"""
    _check_eps(eps)
    return math.sqrt(2 * eps - eps**2), 4 * eps / (1 - eps) ** 2


def solve_eps_prime(eps: float) -> float:
    """ε′ with √(2ε′) + 16ε′ = ε"""
    upper = math.sqrt(2 * 0.5) + 16 * 0.5
    if not 0 < eps < upper:
        raise DomainError(f'Target {eps} outside (0, {upper})')
    return optimize.bisect(
        lambda e: math.sqrt(2 * e) + 16 * e - eps,
        0.0,
        0.5,
        xtol=settings.FTNM_BISECTION_XTOL,
    )


def required_level(
    params: ThresholdParams, base_rule: str = LEMMA2_PRODUCT
) -> LevelReport:
    """Smallest r whose whole-circuit bad norm is within the target"""
    threshold = threshold_value(params.A_C)
    if params.eta >= threshold:
        raise NoConvergenceError(
            f'eta={params.eta} is not below the threshold {threshold}'
        )
    eps_prime = solve_eps_prime(params.epsilon_target)
    trace = iterate_recursion(params, settings.FTNM_MAX_LEVEL, base_rule)
    for level in trace.levels:
        bad = global_bad_bound(params.N, level.x)
        if bad <= eps_prime:
            return LevelReport(
                r=level.r,
                total_locations=params.N * params.A_C ** level.r,
                eps_prime=eps_prime,
                x_r=level.x,
                global_bad=bad,
            )
    raise NoConvergenceError(
        f'No level up to {settings.FTNM_MAX_LEVEL} reaches eps\'={eps_prime}'
    )
