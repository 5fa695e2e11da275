"""Symbol calculus for the dual construction.

``SymbolPoly`` holds h- and H-symbols in polar variables ``z_i = √ρ_i e^{iφ_i}``;
``NumberSymbol`` is the image of a diagonal symbol under the Laguerre transform
``ℋ(m) = (1/m!) ∫ e^{-ρ} ρ^m h(ρ) dρ``, which maps ``ρ^r`` to ``(m+r)!/m!``.
"""

from __future__ import annotations

import logging
import math
from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from math import comb, factorial
from types import MappingProxyType

import mpmath
import numpy as np
from scipy.special import gammaln

from cli.core.exceptions import DomainError, UnsupportedSymbolError
from cli.core.ordering import (
    NumberPoly,
    Rational,
    falling_factorial_poly,
    normal_to_antinormal,
    number_to_antinormal,
    rising_factorial,
    rising_factorial_poly,
)

logger = logging.getLogger(__name__)

# Exact rational evaluation of ℋ(m) up to this occupation; log-space above it.
EXACT_LIMIT = 200

# The three log-gammas of γ reach ~1e5 at ρ ~ 1e4 and nearly cancel; double precision
# leaves ~1e-11 of that in the result.
_GAMMA_CTX = mpmath.MPContext()
_GAMMA_CTX.dps = 40

# One entry per mode: (ρ-power, winding).
Monomial = tuple[tuple[Fraction, int], ...]


# ---------------------------------------------------------------------------
# SymbolPoly
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class SymbolPoly:
    """Multi-mode polynomial in ρ_i with integer phase windings e^{i k_i φ_i}."""

    modes: int
    terms: Mapping[Monomial, Fraction]

    def __post_init__(self) -> None:
        if self.modes < 1:
            raise DomainError(f"symbol needs at least one mode, got {self.modes}")
        cleaned: dict[Monomial, Fraction] = {}
        for key, coeff in self.terms.items():
            if len(key) != self.modes:
                raise DomainError(f"monomial {key} does not have {self.modes} modes")
            for power, winding in key:
                if power < 0 or (2 * power).denominator != 1:
                    raise DomainError(f"ρ-power must be a non-negative half-integer, got {power}")
                if power.denominator != 1 and winding == 0:
                    raise DomainError("half-integer ρ-power without a phase winding")
            if coeff:
                cleaned[key] = cleaned.get(key, Fraction(0)) + Fraction(coeff)
        object.__setattr__(
            self, "terms", MappingProxyType({k: v for k, v in cleaned.items() if v})
        )

    @classmethod
    def radial(cls, coeffs: Iterable[Rational], *, modes: int = 1, mode: int = 0) -> SymbolPoly:
        """``Σ_r c_r ρ_mode^r`` with no windings."""
        terms: dict[Monomial, Fraction] = {}
        for r, c in enumerate(coeffs):
            key = tuple(
                (Fraction(r) if i == mode else Fraction(0), 0) for i in range(modes)
            )
            terms[key] = Fraction(c)
        return cls(modes, terms)

    @classmethod
    def constant(cls, value: Rational, *, modes: int = 1) -> SymbolPoly:
        return cls(modes, {tuple((Fraction(0), 0) for _ in range(modes)): Fraction(value)})

    @property
    def is_diagonal(self) -> bool:
        """All windings zero and all powers integer."""
        return all(
            winding == 0 and power.denominator == 1
            for key in self.terms
            for power, winding in key
        )

    def conserves_number(self) -> bool:
        return all(sum(w for _, w in key) == 0 for key in self.terms)

    def radial_coefficients(self) -> tuple[Fraction, ...]:
        """Coefficients of a one-mode diagonal symbol, indexed by ρ-power."""
        if self.modes != 1 or not self.is_diagonal:
            raise UnsupportedSymbolError("radial coefficients need a one-mode diagonal symbol")
        if not self.terms:
            return (Fraction(0),)
        top = max(int(key[0][0]) for key in self.terms)
        out = [Fraction(0)] * (top + 1)
        for key, c in self.terms.items():
            out[int(key[0][0])] += c
        return tuple(out)

    def embed(self, mode: int, modes: int) -> SymbolPoly:
        """Place a one-mode symbol on ``mode`` of a ``modes``-mode system."""
        if self.modes != 1:
            raise DomainError("only one-mode symbols can be embedded")
        if not 0 <= mode < modes:
            raise DomainError(f"mode {mode} out of range for {modes} modes")
        idle = (Fraction(0), 0)
        return SymbolPoly(
            modes,
            {
                tuple(key[0] if i == mode else idle for i in range(modes)): c
                for key, c in self.terms.items()
            },
        )

    def scale(self, factor: Rational) -> SymbolPoly:
        return SymbolPoly(self.modes, {k: c * factor for k, c in self.terms.items()})

    def __add__(self, other: SymbolPoly) -> SymbolPoly:
        self._check_modes(other)
        out = dict(self.terms)
        for k, c in other.terms.items():
            out[k] = out.get(k, Fraction(0)) + c
        return SymbolPoly(self.modes, out)

    def __mul__(self, other: SymbolPoly) -> SymbolPoly:
        self._check_modes(other)
        out: dict[Monomial, Fraction] = {}
        for ka, ca in self.terms.items():
            for kb, cb in other.terms.items():
                key = tuple(
                    (pa + pb, wa + wb) for (pa, wa), (pb, wb) in zip(ka, kb, strict=True)
                )
                out[key] = out.get(key, Fraction(0)) + ca * cb
        return SymbolPoly(self.modes, out)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, SymbolPoly):
            return NotImplemented
        return self.modes == other.modes and dict(self.terms) == dict(other.terms)

    def _check_modes(self, other: SymbolPoly) -> None:
        if self.modes != other.modes:
            raise DomainError(f"mode mismatch: {self.modes} vs {other.modes}")


def h_symbol_q(q: int) -> SymbolPoly:
    """Anti-normal symbol of ``(b†)^q b^q``: ``(-1)^q q! L_q(ρ)``."""
    return SymbolPoly.radial(normal_to_antinormal(q).coefficients)


def h_symbol_number_poly(p: NumberPoly) -> SymbolPoly:
    """Anti-normal symbol of a polynomial in the number operator."""
    return SymbolPoly.radial(number_to_antinormal(p).coefficients)


def H_symbol_diagonal_q(q: int) -> SymbolPoly:
    """Normal symbol of ``(b†)^q b^q`` forced onto one time slice: ``ρ^q``."""
    if q < 0:
        raise DomainError(f"q must be non-negative, got {q}")
    return SymbolPoly.radial([0] * q + [1])


def h_symbol_hopping(i: int, j: int, modes: int) -> SymbolPoly:
    """Anti-normal symbol of ``b†_i b_j``: ``√ρ_i √ρ_j e^{i(φ_j - φ_i)}``."""
    if i == j:
        raise DomainError("hopping needs two distinct modes")
    if not (0 <= i < modes and 0 <= j < modes):
        raise DomainError(f"hopping ({i}, {j}) out of range for {modes} modes")
    half = Fraction(1, 2)
    key = tuple(
        (half, -1) if m == i else (half, 1) if m == j else (Fraction(0), 0) for m in range(modes)
    )
    return SymbolPoly(modes, {key: Fraction(1)})


def laguerre_closed_form(q: int) -> tuple[Fraction, ...]:
    """Coefficients of ``(-1)^q q! L_q(ρ)`` from the Laguerre series."""
    qf = factorial(q)
    return tuple(
        Fraction((-1) ** (q + r) * qf * comb(q, r), factorial(r)) for r in range(q + 1)
    )


# ---------------------------------------------------------------------------
# NumberSymbol
# ---------------------------------------------------------------------------


class ClosedFormKind(str, Enum):
    FALLING_FACTORIAL = "falling_factorial"
    POWER = "power"


@dataclass(frozen=True)
class ClosedForm:
    kind: ClosedFormKind
    q: int
    coefficient: Fraction = Fraction(1)

    def exact(self, m: int) -> Fraction:
        if self.kind is ClosedFormKind.POWER:
            return self.coefficient * m**self.q
        return self.coefficient * falling_factorial_poly(self.q)(m)

    def evaluate(self, m: int) -> float:
        c = float(self.coefficient)
        if self.kind is ClosedFormKind.POWER:
            return c * float(m) ** self.q
        if m < self.q:
            return 0.0
        return c * float(np.exp(gammaln(m + 1) - gammaln(m - self.q + 1)))


@dataclass(frozen=True)
class NumberSymbol:
    """``ℋ(m) = Σ_r c_r (m+r)!/m!`` with an optional telescoped closed form."""

    terms: tuple[tuple[int, Fraction], ...]
    closed_form: ClosedForm | None = field(default=None)

    def __post_init__(self) -> None:
        merged: dict[int, Fraction] = {}
        for r, c in self.terms:
            if r < 0:
                raise DomainError(f"rising-factorial order must be non-negative, got {r}")
            merged[r] = merged.get(r, Fraction(0)) + Fraction(c)
        object.__setattr__(
            self, "terms", tuple((r, merged[r]) for r in sorted(merged) if merged[r])
        )
        if self.closed_form is not None:
            for m in range(51):
                if self.closed_form.exact(m) != self.exact(m):
                    raise DomainError(f"closed form {self.closed_form} disagrees at m={m}")

    def exact(self, m: int) -> Fraction:
        if m < 0:
            raise DomainError(f"occupation must be non-negative, got {m}")
        return sum((c * rising_factorial(m, r) for r, c in self.terms), Fraction(0))

    def __call__(self, m: int) -> float:
        if m < 0:
            raise DomainError(f"occupation must be non-negative, got {m}")
        if m <= EXACT_LIMIT:
            return float(self.exact(m))
        if self.closed_form is not None:
            return self.closed_form.evaluate(m)
        base = gammaln(m + 1)
        return math.fsum(
            float(c) * float(np.exp(gammaln(m + r + 1) - base)) for r, c in self.terms
        )

    def as_number_poly(self) -> NumberPoly:
        """Expand back into an ordinary polynomial in ``m``."""
        total = NumberPoly((Fraction(0),))
        for r, c in self.terms:
            total = total + rising_factorial_poly(r).scale(c)
        return total

    def scale(self, factor: Rational) -> NumberSymbol:
        closed = self.closed_form
        if closed is not None:
            closed = ClosedForm(closed.kind, closed.q, closed.coefficient * factor)
        return NumberSymbol(tuple((r, c * factor) for r, c in self.terms), closed)


def _detect_closed_form(terms: tuple[tuple[int, Fraction], ...]) -> ClosedForm | None:
    poly = NumberSymbol(terms).as_number_poly()
    coeffs = poly.coefficients
    lead = coeffs[-1]
    if not lead:
        return None
    if all(not c for c in coeffs[:-1]):
        return ClosedForm(ClosedFormKind.POWER, poly.degree, lead)
    if poly == falling_factorial_poly(poly.degree).scale(lead):
        return ClosedForm(ClosedFormKind.FALLING_FACTORIAL, poly.degree, lead)
    return None


def laguerre_transform(h: SymbolPoly) -> NumberSymbol:
    """Map a one-mode diagonal symbol onto the occupation number.

    Each ``ρ^r`` becomes ``(m+r)!/m!`` since ``(1/m!) ∫ e^{-ρ} ρ^{m+r} dρ = (m+r)!/m!``.
    """
    if h.modes != 1:
        raise UnsupportedSymbolError(
            f"laguerre_transform takes one-mode symbols, got {h.modes} modes"
        )
    if not h.is_diagonal:
        raise UnsupportedSymbolError(
            "symbol has phase windings or half-integer powers; "
            "those terms only enter through the jump expansion"
        )
    terms = tuple((r, c) for r, c in enumerate(h.radial_coefficients()) if c)
    closed = _detect_closed_form(terms)
    logger.debug("laguerre transform: %d terms, closed form %s", len(terms), closed)
    return NumberSymbol(terms, closed)


def evaluate_laguerre(h: SymbolPoly, occupations: Sequence[int]) -> Fraction:
    """Laguerre transform of a multi-mode diagonal symbol at one occupation tuple."""
    if len(occupations) != h.modes:
        raise DomainError(f"expected {h.modes} occupations, got {len(occupations)}")
    if not h.is_diagonal:
        raise UnsupportedSymbolError("multi-mode Laguerre evaluation needs a diagonal symbol")
    total = Fraction(0)
    for key, c in h.terms.items():
        term = c
        for (power, _), m in zip(key, occupations, strict=True):
            term *= rising_factorial(m, int(power))
        total += term
    return total


def number_symbol_of_npoly(p: NumberPoly) -> NumberSymbol:
    """ℋ symbol of a number-operator polynomial; equals ``p(m)`` for every m >= 0."""
    return laguerre_transform(h_symbol_number_poly(p))


# ---------------------------------------------------------------------------
# γ factor and the hopping symbol
# ---------------------------------------------------------------------------


def gamma_factor(rho: float, rho_prime: float) -> float:
    """``Γ((ρ+ρ')/2 + 3/2) / √(Γ(ρ+1) Γ(ρ'+1))``, always through log-gamma."""
    if rho < 0 or rho_prime < 0 or not (math.isfinite(rho) and math.isfinite(rho_prime)):
        raise DomainError(f"γ needs finite non-negative arguments, got ({rho}, {rho_prime})")
    ctx = _GAMMA_CTX
    r, r_prime = ctx.mpf(float(rho)), ctx.mpf(float(rho_prime))
    log_value = (
        ctx.loggamma((r + r_prime) / 2 + ctx.mpf(3) / 2)
        - ctx.loggamma(r + 1) / 2
        - ctx.loggamma(r_prime + 1) / 2
    )
    return float(ctx.exp(log_value))


@dataclass(frozen=True)
class HoppingSymbol:
    """``ℋ_J(ρ, ρ'; φ) = J Σ_bonds γ(ρ_i, ρ_i') γ(ρ_j, ρ_j') cos(φ_j - φ_i)``."""

    bonds: tuple[tuple[int, int], ...]
    J: float
    modes: int

    def __post_init__(self) -> None:
        for i, j in self.bonds:
            if i == j:
                raise DomainError(f"bond ({i}, {j}) connects a site to itself")
            if not (0 <= i < self.modes and 0 <= j < self.modes):
                raise DomainError(f"bond ({i}, {j}) out of range for {self.modes} sites")

    def __call__(
        self, rho: Sequence[float], rho_prime: Sequence[float], phi: Sequence[float]
    ) -> float:
        if not (len(rho) == len(rho_prime) == len(phi) == self.modes):
            raise DomainError(f"expected {self.modes} components per argument")
        return self.J * math.fsum(
            gamma_factor(rho[i], rho_prime[i])
            * gamma_factor(rho[j], rho_prime[j])
            * math.cos(phi[j] - phi[i])
            for i, j in self.bonds
        )

    def jump_element(
        self, occupations: Sequence[int], bond: tuple[int, int], direction: int = 1
    ) -> float:
        """Matrix element of one quantum hop on ``bond``.

        ``direction=+1`` moves a quantum from ``j`` to ``i`` (``b†_i b_j``), giving
        ``√((n_i+1) n_j)``; ``-1`` moves it back.
        """
        if direction not in (1, -1):
            raise DomainError(f"direction must be ±1, got {direction}")
        i, j = bond if direction == 1 else (bond[1], bond[0])
        if occupations[j] <= 0:
            return 0.0
        return math.sqrt((occupations[i] + 1) * occupations[j])


def hopping_symbol(
    bonds: Iterable[tuple[int, int]], J: float, modes: int | None = None
) -> HoppingSymbol:
    bond_list = tuple((int(i), int(j)) for i, j in bonds)
    if modes is None:
        modes = max((max(b) for b in bond_list), default=0) + 1
    return HoppingSymbol(bond_list, float(J), modes)
