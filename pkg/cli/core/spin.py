"""Spin partition functions through two Schwinger bosons.

A spin S lives on the two-mode sector n_1 + n_2 = 2S with ``S_z = ħ(n_1 - n_2)/2`` and
``S_x = ħ(b†_1 b_2 + b†_2 b_1)/2``. The occupation n = n_1 labels ``m = n - S``.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from math import comb

import numpy as np
from scipy.special import logsumexp

from cli.core.config import DEFAULT_HBAR, DEFAULT_P_MAX
from cli.core.exceptions import CrossCheckError, DomainError
from cli.core.oracle import SpinAxis, build_diagonal, spin_matrix
from cli.core.ordering import NumberPoly, number_to_normal
from cli.core.symbols import SymbolPoly, evaluate_laguerre, h_symbol_number_poly
from cli.core.worldline import dyson_partition
from cli.models.hamiltonian import Bond, DenseOperator, FockSpace, HamiltonianSpec
from cli.models.partition import PartitionResult
from cli.models.spin_spec import FzHamiltonian, SpinSpec, XHamiltonian, parse_spin

logger = logging.getLogger(__name__)

AGREEMENT_TOL = 1e-12


def schwinger_sector(S: Fraction | str | float) -> FockSpace:
    """Two-mode sector with ``n_1 + n_2 = 2S`` (dimension 2S+1)."""
    spin = parse_spin(S)
    return FockSpace(2, n_total=int(2 * spin))


def _check_beta(beta: float) -> None:
    if not beta > 0:
        raise DomainError(f"beta must be positive, got {beta}")


def _levels_direct(spec: SpinSpec, f: NumberPoly) -> np.ndarray:
    ms = [spec.S - k for k in range(spec.multiplicity)]
    return np.array([f.evaluate(spec.hbar * float(m)) for m in ms])


def _two_mode_symbol(a: int) -> SymbolPoly:
    """Anti-normal symbol of ``(n_1 - n_2)^a`` as a product of commuting one-mode symbols."""
    total = SymbolPoly(2, {})
    for j in range(a + 1):
        left = h_symbol_number_poly(NumberPoly.monomial(j)).embed(0, 2)
        right = h_symbol_number_poly(NumberPoly.monomial(a - j)).embed(1, 2)
        total = total + (left * right).scale(comb(a, j) * (-1) ** (a - j))
    return total


def _levels_two_boson(spec: SpinSpec, f: NumberPoly) -> np.ndarray:
    """Same spectrum through the Laguerre transform of the Schwinger-boson symbol."""
    symbols = [_two_mode_symbol(a) for a in range(f.degree + 1)]
    two_s = int(2 * spec.S)
    levels = []
    for n1 in range(two_s, -1, -1):
        occupations = (n1, two_s - n1)
        level = math.fsum(
            float(c * evaluate_laguerre(symbols[a], occupations)) * (spec.hbar / 2.0) ** a
            for a, c in enumerate(f.coefficients)
            if c
        )
        levels.append(level)
    return np.array(levels)


def spin_partition_z(spec: SpinSpec, beta: float) -> PartitionResult:
    """``Σ_{m=-S}^{S} e^{-β f(ħm)}``, evaluated directly and through two-mode symbols."""
    _check_beta(beta)
    if not isinstance(spec.hamiltonian, FzHamiltonian):
        raise DomainError("spin_partition_z needs an f(S_z) Hamiltonian")
    f = spec.hamiltonian.f
    direct = float(logsumexp(-beta * _levels_direct(spec, f)))
    via_symbols = float(logsumexp(-beta * _levels_two_boson(spec, f)))
    if abs(direct - via_symbols) > AGREEMENT_TOL * max(1.0, abs(direct)):
        raise CrossCheckError(
            "direct and Schwinger-boson spin sums disagree",
            first=math.exp(direct),
            second=math.exp(via_symbols),
        )
    return PartitionResult(
        log_value=direct,
        method="spin-z",
        cutoff_n=int(2 * spec.S),
        params={"S": str(spec.S), "hbar": spec.hbar, "beta": beta},
        details={"two_boson_log_value": via_symbols},
    )


def schwinger_x_model(omega: float, hbar: float) -> HamiltonianSpec:
    """``ω S_x`` as one hopping bond of strength ħω/2 between the two modes."""
    return HamiltonianSpec(2, bonds=(Bond(0, 1, hbar * omega / 2.0),))


def spin_partition_x(
    S: Fraction | str | float = Fraction(1, 2),
    omega: float = 1.0,
    hbar: float = DEFAULT_HBAR,
    beta: float = 1.0,
    p_max: int = DEFAULT_P_MAX,
) -> PartitionResult:
    """Jump expansion of ``Tr e^{-βωS_x}`` on the Schwinger sector.

    ``details["order2_coefficient"]`` is the isolated second-order term, ``(βħω)²/4``
    for S = 1/2.
    """
    _check_beta(beta)
    spin = parse_spin(S)
    result = dyson_partition(
        schwinger_x_model(omega, hbar), beta, p_max, schwinger_sector(spin)
    )
    orders = list(result.details["orders"])  # type: ignore[call-overload]
    return PartitionResult(
        log_value=result.log_value,
        method="spin-x",
        cutoff_n=result.cutoff_n,
        truncation_bound=result.truncation_bound,
        params={"S": str(spin), "omega": omega, "hbar": hbar, "beta": beta, "p_max": p_max},
        details={**result.details, "order2_coefficient": orders[2] if p_max >= 2 else None},
    )


def schwinger_z_model(spec: SpinSpec) -> HamiltonianSpec:
    """``f(S_z)`` on the Schwinger sector as the on-site polynomial ``f(ħ(n_1 - S))``.

    With ``n_2 = 2S - n_1`` fixed by the sector, the second mode carries no energy.
    """
    if not isinstance(spec.hamiltonian, FzHamiltonian):
        raise DomainError("schwinger_z_model needs an f(S_z) Hamiltonian")
    hbar = Fraction(spec.hbar)
    sz = NumberPoly.from_coefficients([-hbar * spec.S, hbar])
    onsite = NumberPoly((Fraction(0),))
    for c in reversed(spec.hamiltonian.f.coefficients):
        onsite = onsite * sz + NumberPoly((c,))
    return HamiltonianSpec(2, (onsite, NumberPoly((Fraction(0),))))


def spin_worldline_z(spec: SpinSpec, beta: float, p_max: int = DEFAULT_P_MAX) -> PartitionResult:
    """Jump expansion of ``Tr e^{-βf(S_z)}``: only the hop-free paths contribute."""
    _check_beta(beta)
    result = dyson_partition(schwinger_z_model(spec), beta, p_max, schwinger_sector(spec.S))
    orders = list(result.details["orders"])  # type: ignore[call-overload]
    return PartitionResult(
        log_value=result.log_value,
        method="spin-z-worldline",
        cutoff_n=result.cutoff_n,
        truncation_bound=result.truncation_bound,
        params={"S": str(spec.S), "hbar": spec.hbar, "beta": beta, "p_max": p_max},
        details={**result.details, "order2_coefficient": orders[2] if p_max >= 2 else None},
    )


# ---------------------------------------------------------------------------
# Naive Bloch-sphere comparator
# ---------------------------------------------------------------------------


class Verdict(str, Enum):
    AGREE = "AGREE"
    DIFFER = "DIFFER"


@dataclass(frozen=True)
class NaiveComparison:
    S: Fraction
    exact: float
    naive: float
    relative_gap: float

    @property
    def verdict(self) -> Verdict:
        return Verdict.AGREE if self.relative_gap <= AGREEMENT_TOL else Verdict.DIFFER

    def to_dict(self) -> dict[str, object]:
        return {
            "S": str(self.S),
            "exact": self.exact,
            "naive": self.naive,
            "relative_gap": self.relative_gap,
            "verdict": self.verdict.value,
        }


def _normal_symbol_at(power: int, rho: int) -> Fraction:
    """Normal symbol of ``n^power`` (``Σ_r S2(power, r) ρ^r``) at integer ρ."""
    coeffs = number_to_normal(NumberPoly.monomial(power)).coefficients
    return sum((c * rho**r for r, c in enumerate(coeffs)), Fraction(0))


def _naive_level(f: NumberPoly, eta: int, two_s: int, hbar: float) -> float:
    terms = []
    for a, c in enumerate(f.coefficients):
        if not c:
            continue
        exact = sum(
            (
                comb(a, j) * (-1) ** (a - j)
                * _normal_symbol_at(j, eta)
                * _normal_symbol_at(a - j, two_s - eta)
                for j in range(a + 1)
            ),
            Fraction(0),
        )
        terms.append(float(c * exact) * (hbar / 2.0) ** a)
    return math.fsum(terms)


def wg_failure_spin_z(
    S: Fraction | str | float, f: NumberPoly, beta: float, hbar: float = DEFAULT_HBAR
) -> NaiveComparison:
    """Exact ``Σ e^{-βf(ħm)}`` next to the Bloch-sphere action built from H-symbols.

    The comparator forces the normal symbol of ``f(S_z)`` onto each slice and evaluates
    it at integer η = n_1; for S = 1/2 and linear f the two coincide.
    """
    _check_beta(beta)
    spec = SpinSpec(parse_spin(S), FzHamiltonian(f), hbar)
    exact = spin_partition_z(spec, beta)
    two_s = int(2 * spec.S)
    naive_levels = np.array([_naive_level(f, eta, two_s, hbar) for eta in range(two_s + 1)])
    log_naive = float(logsumexp(-beta * naive_levels))
    gap = abs(math.expm1(log_naive - exact.log_value))
    logger.debug("naive comparator S=%s: relative gap %.3g", spec.S, gap)
    return NaiveComparison(spec.S, exact.value, math.exp(log_naive), gap)


def wg_failure_spin_x(
    S: Fraction | str | float, omega: float, beta: float, hbar: float = DEFAULT_HBAR
) -> NaiveComparison:
    """Naive comparator for ``ωS_x``, which a rotation maps onto linear ``f(S_z) = ωS_z``."""
    return wg_failure_spin_z(S, NumberPoly.from_coefficients([0, omega]), beta, hbar)


# ---------------------------------------------------------------------------
# Bloch-sphere parametrization
# ---------------------------------------------------------------------------


def eta_from_theta(S: Fraction | str | float, theta: float | np.ndarray) -> float | np.ndarray:
    """``η = S(1 + cos θ)``."""
    return float(parse_spin(S)) * (1.0 + np.cos(theta))


def theta_from_eta(S: Fraction | str | float, eta: float | np.ndarray) -> float | np.ndarray:
    """Inverse of :func:`eta_from_theta` on θ ∈ [0, π]."""
    spin = float(parse_spin(S))
    if spin == 0:
        raise DomainError("the parametrization needs S > 0")
    values = np.asarray(eta, dtype=float)
    if np.any(values < 0) or np.any(values > 2 * spin):
        raise DomainError(f"η must lie in [0, {2 * spin}]")
    return np.arccos(np.clip(values / spin - 1.0, -1.0, 1.0))


def partition_spin(spec: SpinSpec, beta: float, p_max: int = DEFAULT_P_MAX) -> PartitionResult:
    """Dispatch on the Hamiltonian family of ``spec``."""
    if isinstance(spec.hamiltonian, XHamiltonian):
        return spin_partition_x(spec.S, spec.hamiltonian.omega, spec.hbar, beta, p_max)
    return spin_partition_z(spec, beta)


def fz_operator(spec: SpinSpec) -> DenseOperator:
    """``f(S_z)`` on the (2S+1)-dimensional spin basis."""
    if not isinstance(spec.hamiltonian, FzHamiltonian):
        raise DomainError("fz_operator needs an f(S_z) Hamiltonian")
    f = spec.hamiltonian.f
    sz = np.diag(spin_matrix(spec.S, SpinAxis.Z, spec.hbar).matrix)
    return DenseOperator(np.diag([f.evaluate(float(x)) for x in sz]))


def fz_schwinger_operator(spec: SpinSpec) -> DenseOperator:
    """``f(ħ(n_1 - n_2)/2)`` on the Schwinger sector."""
    if not isinstance(spec.hamiltonian, FzHamiltonian):
        raise DomainError("fz_schwinger_operator needs an f(S_z) Hamiltonian")
    f = spec.hamiltonian.f
    return build_diagonal(
        schwinger_sector(spec.S), lambda s: f.evaluate(spec.hbar * (s[0] - s[1]) / 2.0)
    )


def sx_operator(
    S: Fraction | str | float, omega: float, hbar: float = DEFAULT_HBAR
) -> DenseOperator:
    """``ω S_x`` on the spin basis."""
    return DenseOperator(omega * spin_matrix(S, SpinAxis.X, hbar).matrix)
