"""Certified summation of positive series supplied as log-terms.

Partition sums over occupation numbers have exponents that reach 10^5, so every term
is handled as its logarithm and the total is formed with ``logsumexp``.
"""

from __future__ import annotations

import logging
import math
from collections.abc import Callable
from dataclasses import dataclass

import numpy as np
from scipy.special import logsumexp

from cli.core.exceptions import TruncationError
from cli.models.partition import TailPolicy

logger = logging.getLogger(__name__)

# Consecutive negligible, decreasing terms needed before the sum is cut.
STABLE_RUN = 10
_LOG_FLOAT_MAX = math.log(1.7976931348623157e308)


@dataclass(frozen=True)
class SeriesSum:
    log_value: float
    cutoff: int
    tail_bound: float
    log_terms: tuple[float, ...]


def is_negligible(log_term: float, log_running: float, eps_rel: float) -> bool:
    """Whether a term adds less than ``eps_rel/10`` of the running sum."""
    if log_term == -math.inf:
        return True
    if log_running == -math.inf:
        return False
    return log_term - log_running < math.log(eps_rel / 10.0)


def sum_log_terms(
    log_term: Callable[[int, float], float], tail: TailPolicy, *, label: str
) -> SeriesSum:
    """Sum ``exp(log_term(n, log_running))`` for n = 0, 1, ... until the tail is certified.

    ``log_term`` receives the log of the running sum so callers can decide whether a
    term would be retained. Stops after :data:`STABLE_RUN` consecutive terms that are
    strictly decreasing and negligible; the reported bound is the geometric tail
    implied by the last term ratio.
    """
    logs: list[float] = []
    running = -math.inf
    run = 0
    previous = math.inf
    for n in range(tail.n_max_hard + 1):
        current = float(log_term(n, running))
        logs.append(current)
        small = is_negligible(current, running, tail.eps_rel)
        running = float(np.logaddexp(running, current))
        decreasing = current < previous or current == -math.inf
        run = run + 1 if (n >= tail.n_min and small and decreasing) else 0
        previous = current
        if run >= STABLE_RUN:
            break
    else:
        raise TruncationError(
            f"{label}: tail not certified within n_max_hard={tail.n_max_hard}",
            n_reached=tail.n_max_hard,
        )

    log_total = float(logsumexp(np.asarray(logs)))
    log_bound = _log_geometric_tail(logs[-2], logs[-1])
    bound = math.exp(log_bound) if log_bound < _LOG_FLOAT_MAX else math.inf
    if log_bound - log_total > math.log(tail.eps_rel):
        logger.warning("%s: tail bound %.3g exceeds eps_rel of the sum", label, bound)
    logger.debug(
        "%s: cut at n=%d, log Z=%.17g, tail<=%.3g", label, len(logs) - 1, log_total, bound
    )
    return SeriesSum(log_total, len(logs) - 1, bound, tuple(logs))


def _log_geometric_tail(log_prev: float, log_last: float) -> float:
    """log of ``t r/(1-r)`` for last term t and last ratio r."""
    if log_last == -math.inf:
        return -math.inf
    log_ratio = log_last - log_prev
    if log_ratio >= 0:
        return math.inf
    return log_last + log_ratio - math.log(-math.expm1(log_ratio))
