"""Exact evaluation of discrete coherent-state path integrals in dual variables.

After dualizing the symplectic term and integrating out all (ρ, φ)_k, only the
conserved occupation number survives and

    Z^(N) = Σ_m Π_k [1 - Δℋ(m)]  →  Σ_m e^{-βℋ(m)}.

This module evaluates that sum for ℋ from the h-symbol (Laguerre transform) and from
the off-diagonal H-symbol (dual l-variables), evaluates the three textbook actions that
get the ground states wrong, and the Gaussian determinants of the harmonic oscillator.
"""

from __future__ import annotations

import logging
import math
from collections.abc import Mapping, Sequence
from dataclasses import dataclass
from enum import Enum
from math import factorial

import numpy as np

from cli.core.exceptions import CrossCheckError, DomainError, NonPositiveWeightError
from cli.core.ordering import NumberPoly, falling_factorial, normal_to_antinormal, rising_factorial
from cli.core.summation import is_negligible, sum_log_terms
from cli.core.symbols import NumberSymbol, h_symbol_q, laguerre_transform
from cli.models.partition import DiscreteScheme, PartitionResult, SymbolKind, TailPolicy

logger = logging.getLogger(__name__)


class ActionModel(str, Enum):
    """Energy functions entering Σ_n e^{-βg E(n)}: the exact one and actions (I)-(III)."""

    EXACT = "exact"
    I = "I"  # noqa: E741
    II = "II"
    III = "III"


class HarmonicVariant(str, Enum):
    ACTION_I = "actionI"
    CORRECT = "correct"


class WeightForm(str, Enum):
    """Per-slice weight of the H-symbol: ``1 - ΔH`` or the re-exponentiated ``e^{-ΔH}``."""

    LINEAR = "linear"
    EXPONENTIAL = "exponential"


def _as_float(value: int) -> float:
    try:
        return float(value)
    except OverflowError:
        return math.inf


def _slice_log_weight(
    energy: float, scheme: DiscreteScheme, m: int, log_running: float, eps_rel: float
) -> float:
    """log of ``e^{-βE}`` (continuum) or ``(1 - ΔE)^N``.

    A non-positive ``1 - ΔE`` is only tolerated where the continuum term it stands for
    is already negligible; there the term is dropped.
    """
    if scheme.n_slices is None:
        return -scheme.beta * energy
    weight = 1.0 - scheme.delta * energy
    if weight > 0:
        return scheme.n_slices * math.log1p(-scheme.delta * energy)
    if is_negligible(-scheme.beta * energy, log_running, eps_rel):
        logger.debug("dropping negligible term m=%d with slice weight %.3g", m, weight)
        return -math.inf
    raise NonPositiveWeightError(m, weight, scheme.n_slices)


# ---------------------------------------------------------------------------
# Dual evaluation of h- and H-symbols
# ---------------------------------------------------------------------------


def partition_dual_h(
    symbol: NumberSymbol,
    scheme: DiscreteScheme,
    tail: TailPolicy | None = None,
    *,
    coupling: float = 1.0,
) -> PartitionResult:
    """``Σ_m [1 - Δ g ℋ(m)]^N`` (or ``Σ_m e^{-β g ℋ(m)}`` in the continuum)."""
    if scheme.symbol_kind is not SymbolKind.H_DIAGONAL:
        raise DomainError(f"dual-h needs an h_diagonal scheme, got {scheme.symbol_kind.value}")
    tail = tail or TailPolicy()

    def log_term(m: int, log_running: float) -> float:
        return _slice_log_weight(coupling * symbol(m), scheme, m, log_running, tail.eps_rel)

    series = sum_log_terms(log_term, tail, label="dual-h")
    closed = symbol.closed_form
    return PartitionResult(
        log_value=series.log_value,
        method="dual-h",
        cutoff_n=series.cutoff,
        truncation_bound=series.tail_bound,
        scheme=scheme,
        params={"coupling": coupling},
        details={"closed_form": None if closed is None else closed.kind.value},
    )


def _exponential_slice_factor(
    n: int, couplings: Sequence[tuple[int, float]], delta: float
) -> float:
    """``Σ_{l} Π_q (-Δg_q)^{l_q}/l_q! · n!/(n - Σ q l_q)!`` over all dual l-configurations."""
    parts: list[float] = []

    def walk(index: int, used: int, coeff: float) -> None:
        if index == len(couplings):
            parts.append(coeff * _as_float(falling_factorial(n, used)))
            return
        q, g = couplings[index]
        l_max = (n - used) // q
        for l in range(l_max + 1):  # noqa: E741
            walk(index + 1, used + q * l, coeff * (-delta * g) ** l / factorial(l))

    walk(0, 0, 1.0)
    return math.fsum(parts)


def partition_dual_H_offdiag_mixture(
    couplings: Mapping[int, float],
    scheme: DiscreteScheme,
    tail: TailPolicy | None = None,
    *,
    weight_form: WeightForm = WeightForm.LINEAR,
) -> PartitionResult:
    """Dual treatment of the H-symbol of ``Σ_q g_q (b†)^q b^q``.

    Each slice carries dual variables ``l_k^{(q)}``; the phase integrals keep
    ``n = m_k + Σ_q q l_k^{(q)}`` constant and the ρ-integrals turn every weight into
    ``n!/(n - Σ q l)!``. With LINEAR weights at most one ``l^{(q)}`` is unity per slice,
    giving ``1 - Δ Σ_q g_q n!/(n-q)!``.
    """
    if scheme.symbol_kind is not SymbolKind.H_OFFDIAG:
        raise DomainError(f"dual-H needs an H_offdiag scheme, got {scheme.symbol_kind.value}")
    if any(q < 0 for q in couplings):
        raise DomainError("powers q must be non-negative")
    tail = tail or TailPolicy()
    constant = math.fsum(g for q, g in couplings.items() if q == 0)
    ladder = tuple(sorted((q, g) for q, g in couplings.items() if q > 0))

    def energy(n: int) -> float:
        return constant + math.fsum(g * _as_float(falling_factorial(n, q)) for q, g in ladder)

    def log_term(n: int, log_running: float) -> float:
        if scheme.n_slices is None or weight_form is WeightForm.LINEAR:
            return _slice_log_weight(energy(n), scheme, n, log_running, tail.eps_rel)
        factor = math.exp(-scheme.delta * constant) * _exponential_slice_factor(
            n, ladder, scheme.delta
        )
        if factor > 0:
            return scheme.n_slices * math.log(factor)
        if is_negligible(-scheme.beta * energy(n), log_running, tail.eps_rel):
            return -math.inf
        raise NonPositiveWeightError(n, factor, scheme.n_slices)

    series = sum_log_terms(log_term, tail, label="dual-H")
    return PartitionResult(
        log_value=series.log_value,
        method="dual-H",
        cutoff_n=series.cutoff,
        truncation_bound=series.tail_bound,
        scheme=scheme,
        params={"couplings": {str(q): g for q, g in sorted(couplings.items())}},
        details={"weight_form": weight_form.value},
    )


def partition_dual_H_offdiag(
    q: int,
    g: float,
    scheme: DiscreteScheme,
    tail: TailPolicy | None = None,
    *,
    weight_form: WeightForm = WeightForm.LINEAR,
) -> PartitionResult:
    """Single-power case; reproduces ``Σ_n e^{-βg n!/(n-q)!}`` as N → ∞."""
    return partition_dual_H_offdiag_mixture({q: g}, scheme, tail, weight_form=weight_form)


# ---------------------------------------------------------------------------
# Exact and wrong energy functions
# ---------------------------------------------------------------------------


def _laguerre_energy(q: int) -> NumberPoly:
    return NumberPoly(normal_to_antinormal(q).coefficients)


def action_energy(model: ActionModel, q: int, n: int) -> int:
    """Exponent (in units of g) of level n under each construction."""
    if q < 0 or n < 0:
        raise DomainError(f"q and n must be non-negative, got q={q}, n={n}")
    if model is ActionModel.EXACT:
        return falling_factorial(n, q)
    if model is ActionModel.I:
        return rising_factorial(n, q)
    if model is ActionModel.II:
        return n**q
    value = _laguerre_energy(q)(n)
    assert value.denominator == 1
    return int(value)


def exponent_table(model: ActionModel, q: int, n_max: int) -> tuple[int, ...]:
    return tuple(action_energy(model, q, n) for n in range(n_max + 1))


def count_ground_states(model: ActionModel, q: int, n_max: int) -> int:
    """Number of zero exponents among levels 0..n_max."""
    return sum(1 for e in exponent_table(model, q, n_max) if e == 0)


def wrong_action_partition(
    variant: ActionModel, q: int, beta_g: float, tail: TailPolicy | None = None
) -> PartitionResult:
    """``Σ_n e^{-βg E(n)}`` for the textbook actions.

    (I) diagonalized H-symbol: ``(n+q)!/n!``; (II) continuum polar H-symbol: ``n^q``;
    (III) continuum polar h-symbol: ``(-1)^q q! L_q(n)``.
    """
    if variant is ActionModel.EXACT:
        raise DomainError("wrong_action_partition takes variant I, II or III")
    tail = tail or TailPolicy()

    def log_term(n: int, _: float) -> float:
        return -beta_g * _as_float(action_energy(variant, q, n))

    series = sum_log_terms(log_term, tail, label=f"wrong-{variant.value}")
    return PartitionResult(
        log_value=series.log_value,
        method=f"wrong-{variant.value}",
        cutoff_n=series.cutoff,
        truncation_bound=series.tail_bound,
        params={"q": q, "beta_g": beta_g},
    )


@dataclass(frozen=True)
class Figure2Row:
    n: int
    exact: float
    action_i: float
    action_ii: float
    action_iii: float

    def as_tuple(self) -> tuple[int, float, float, float, float]:
        return (self.n, self.exact, self.action_i, self.action_ii, self.action_iii)


def figure2_table(q: int, beta_g: float, n_max: int) -> list[Figure2Row]:
    """arcsinh-squeezed exponents ``βg E(n)`` for the exact model and actions (I)-(III)."""
    if n_max < 0:
        raise DomainError(f"n_max must be non-negative, got {n_max}")

    def squeezed(model: ActionModel, n: int) -> float:
        return float(np.arcsinh(beta_g * _as_float(action_energy(model, q, n))))

    return [
        Figure2Row(
            n,
            squeezed(ActionModel.EXACT, n),
            squeezed(ActionModel.I, n),
            squeezed(ActionModel.II, n),
            squeezed(ActionModel.III, n),
        )
        for n in range(n_max + 1)
    ]


# ---------------------------------------------------------------------------
# Harmonic oscillator: Gaussian determinants
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class HarmonicDeterminant:
    variant: HarmonicVariant
    n_slices: int
    delta_g: float
    det: float

    @property
    def inverse(self) -> float:
        """Value of the Gaussian path integral, ``1/det M``."""
        return math.inf if self.det == 0 else 1.0 / self.det


def _check_harmonic(variant: HarmonicVariant, N: int, delta_g: float) -> None:
    if N < 1:
        raise DomainError(f"N must be >= 1, got {N}")
    if delta_g < 0:
        raise DomainError(f"Δg must be non-negative, got {delta_g}")
    if variant is HarmonicVariant.CORRECT and delta_g >= 1:
        raise DomainError(f"correct action needs Δg < 1, got {delta_g}")


def harmonic_determinant(variant: HarmonicVariant, N: int, delta_g: float) -> HarmonicDeterminant:
    """Closed-form determinant of the periodic two-band matrix M.

    Action (I): ``Π(1+Δg) - Π 1``; correct action: ``Π 1 - Π(1-Δg)``.
    """
    _check_harmonic(variant, N, delta_g)
    if variant is HarmonicVariant.ACTION_I:
        det = math.expm1(N * math.log1p(delta_g))
    else:
        det = -math.expm1(N * math.log1p(-delta_g))
    return HarmonicDeterminant(variant, N, delta_g, det)


def symplectic_matrix(variant: HarmonicVariant, N: int, delta_g: float) -> np.ndarray:
    """``M^{k,k'}`` of the Gaussian action with N-periodic boundary conditions."""
    _check_harmonic(variant, N, delta_g)
    shift = np.roll(np.eye(N), 1, axis=0)
    if variant is HarmonicVariant.ACTION_I:
        return (1.0 + delta_g) * np.eye(N) - shift
    return np.eye(N) - (1.0 - delta_g) * shift


# ---------------------------------------------------------------------------
# N → ∞ convergence
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ConvergenceRow:
    n_slices: int | None
    value: float
    error: float
    ratio: float | None
    exponential_value: float | None = None
    inverse_det: float | None = None


def convergence_scan(
    q: int, beta_g: float, n_list: Sequence[int], tail: TailPolicy | None = None
) -> list[ConvergenceRow]:
    """Finite-N dual-h values against the continuum, one row per N plus the N=∞ row.

    ``ratio`` is ``error(N)/error(2N)`` when 2N is also scanned. For the harmonic case
    (q=1) each row also carries the re-exponentiated dual H value and ``1/det M`` of the
    correct Gaussian action, which must agree.
    """
    if not n_list or any(b <= a for a, b in zip(n_list, n_list[1:], strict=False)):
        raise DomainError("N list must be non-empty and strictly increasing")
    tail = tail or TailPolicy()
    symbol = laguerre_transform(h_symbol_q(q))
    limit = partition_dual_h(symbol, DiscreteScheme.continuum(beta_g, SymbolKind.H_DIAGONAL), tail)

    values: dict[int, float] = {}
    extras: dict[int, tuple[float | None, float | None]] = {}
    for N in n_list:
        scheme = DiscreteScheme(beta_g, SymbolKind.H_DIAGONAL, N)
        values[N] = partition_dual_h(symbol, scheme, tail).value
        extras[N] = (None, None)
        if q == 1:
            exponential = partition_dual_H_offdiag(
                1,
                1.0,
                DiscreteScheme(beta_g, SymbolKind.H_OFFDIAG, N),
                tail,
                weight_form=WeightForm.EXPONENTIAL,
            ).value
            inverse = harmonic_determinant(HarmonicVariant.CORRECT, N, beta_g / N).inverse
            if not math.isclose(exponential, inverse, rel_tol=1e-12):
                raise CrossCheckError(
                    f"dual e^(-ΔH) sum and 1/det M disagree at N={N}",
                    first=exponential,
                    second=inverse,
                )
            extras[N] = (exponential, inverse)

    rows: list[ConvergenceRow] = []
    for N in n_list:
        error = abs(values[N] - limit.value)
        ratio = None
        if 2 * N in values:
            doubled = abs(values[2 * N] - limit.value)
            ratio = error / doubled if doubled > 0 else None
        rows.append(ConvergenceRow(N, values[N], error, ratio, *extras[N]))
    rows.append(ConvergenceRow(None, limit.value, 0.0, None))
    return rows
