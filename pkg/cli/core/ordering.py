"""Exact combinatorics for reordering bosonic operators.

Covers the three operator families that show up in the dual construction:
normal-ordered monomials ``(b†)^q b^q``, powers of the number operator ``n^q`` and
anti-normal monomials ``b^r (b†)^r``. Every conversion between them is done with
Stirling numbers in exact integer / :class:`~fractions.Fraction` arithmetic.
"""

from __future__ import annotations

import logging
import threading
from collections.abc import Callable, Iterable
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from math import factorial

from cli.core.exceptions import DomainError

logger = logging.getLogger(__name__)

Rational = Fraction | int


def _trim(coeffs: Iterable[Rational]) -> tuple[Fraction, ...]:
    values = [Fraction(c) for c in coeffs]
    while len(values) > 1 and values[-1] == 0:
        values.pop()
    return tuple(values) if values else (Fraction(0),)


# ---------------------------------------------------------------------------
# Stirling numbers
# ---------------------------------------------------------------------------


class _StirlingTable:
    """Triangular memo of one Stirling family; rows are immutable once published."""

    def __init__(self, name: str, next_row: Callable[[tuple[int, ...], int], tuple[int, ...]]):
        self._name = name
        self._rows: list[tuple[int, ...]] = [(1,)]
        self._next_row = next_row
        self._lock = threading.Lock()

    def row(self, n: int) -> tuple[int, ...]:
        rows = self._rows
        if n < len(rows):
            return rows[n]
        with self._lock:
            while len(self._rows) <= n:
                top = len(self._rows) - 1
                self._rows.append(self._next_row(self._rows[top], top))
            logger.debug("grew %s table to row %d", self._name, n)
            return self._rows[n]


def _next_first_kind(prev: tuple[int, ...], n: int) -> tuple[int, ...]:
    # s(n+1, k) = s(n, k-1) - n s(n, k)
    return tuple(
        (prev[k - 1] if k >= 1 else 0) - n * (prev[k] if k <= n else 0) for k in range(n + 2)
    )


def _next_second_kind(prev: tuple[int, ...], n: int) -> tuple[int, ...]:
    # S2(n+1, k) = k S2(n, k) + S2(n, k-1)
    return tuple(
        k * (prev[k] if k <= n else 0) + (prev[k - 1] if k >= 1 else 0) for k in range(n + 2)
    )


_FIRST_KIND = _StirlingTable("stirling-first", _next_first_kind)
_SECOND_KIND = _StirlingTable("stirling-second", _next_second_kind)


def _check_indices(n: int, k: int) -> None:
    if n < 0 or k < 0:
        raise DomainError(f"Stirling indices must be non-negative, got ({n}, {k})")
    if k > n:
        raise DomainError(f"Stirling index k={k} exceeds n={n}")


def stirling_first_signed(n: int, k: int) -> int:
    """Signed Stirling number of the first kind: ``(x)_n = Σ_k s(n, k) x^k``."""
    _check_indices(n, k)
    return _FIRST_KIND.row(n)[k]


def stirling_second(n: int, k: int) -> int:
    """Stirling number of the second kind (partitions of n items into k blocks)."""
    _check_indices(n, k)
    return _SECOND_KIND.row(n)[k]


def falling_factorial(x: int, q: int) -> int:
    """``x (x-1) ... (x-q+1)``; zero for ``0 <= x < q``."""
    if q < 0:
        raise DomainError(f"falling factorial order must be non-negative, got {q}")
    result = 1
    for j in range(q):
        result *= x - j
    return result


def rising_factorial(m: int, r: int) -> int:
    """``(m+r)!/m! = (m+1)(m+2)...(m+r)``."""
    if r < 0:
        raise DomainError(f"rising factorial order must be non-negative, got {r}")
    result = 1
    for j in range(1, r + 1):
        result *= m + j
    return result


# ---------------------------------------------------------------------------
# Polynomials
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class NumberPoly:
    """Polynomial in the number operator; ``coefficients[r]`` multiplies ``n^r``."""

    coefficients: tuple[Fraction, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "coefficients", _trim(self.coefficients))

    @classmethod
    def from_coefficients(cls, coeffs: Iterable[Rational]) -> NumberPoly:
        return cls(tuple(Fraction(c) for c in coeffs))

    @classmethod
    def monomial(cls, power: int, coefficient: Rational = 1) -> NumberPoly:
        if power < 0:
            raise DomainError(f"power must be non-negative, got {power}")
        return cls((Fraction(0),) * power + (Fraction(coefficient),))

    @property
    def degree(self) -> int:
        return len(self.coefficients) - 1

    def __call__(self, x: Rational) -> Fraction:
        acc = Fraction(0)
        for c in reversed(self.coefficients):
            acc = acc * x + c
        return acc

    def evaluate(self, x: float) -> float:
        acc = 0.0
        for c in reversed(self.coefficients):
            acc = acc * x + float(c)
        return acc

    def __add__(self, other: NumberPoly) -> NumberPoly:
        size = max(len(self.coefficients), len(other.coefficients))
        a = self.coefficients + (Fraction(0),) * (size - len(self.coefficients))
        b = other.coefficients + (Fraction(0),) * (size - len(other.coefficients))
        return NumberPoly(tuple(x + y for x, y in zip(a, b, strict=True)))

    def __sub__(self, other: NumberPoly) -> NumberPoly:
        return self + other.scale(-1)

    def __mul__(self, other: NumberPoly) -> NumberPoly:
        out = [Fraction(0)] * (len(self.coefficients) + len(other.coefficients) - 1)
        for i, a in enumerate(self.coefficients):
            for j, b in enumerate(other.coefficients):
                out[i + j] += a * b
        return NumberPoly(tuple(out))

    def scale(self, factor: Rational) -> NumberPoly:
        return NumberPoly(tuple(c * factor for c in self.coefficients))


class Ordering(str, Enum):
    NORMAL = "normal"
    ANTI_NORMAL = "anti_normal"


@dataclass(frozen=True)
class OrderedPoly:
    """Linear combination of ordered monomials.

    ``coefficients[r]`` multiplies ``(b†)^r b^r`` for :attr:`Ordering.NORMAL` and
    ``b^r (b†)^r`` for :attr:`Ordering.ANTI_NORMAL`.
    """

    ordering: Ordering
    coefficients: tuple[Fraction, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "coefficients", _trim(self.coefficients))

    @property
    def degree(self) -> int:
        return len(self.coefficients) - 1

    def to_number_poly(self) -> NumberPoly:
        """Rewrite in terms of the number operator."""
        total = NumberPoly((Fraction(0),))
        expand = (
            falling_factorial_poly if self.ordering is Ordering.NORMAL else rising_factorial_poly
        )
        for r, c in enumerate(self.coefficients):
            if c:
                total = total + expand(r).scale(c)
        return total


def falling_factorial_poly(q: int) -> NumberPoly:
    """``n (n-1) ... (n-q+1)`` expanded with signed Stirling numbers of the first kind."""
    return NumberPoly(tuple(Fraction(stirling_first_signed(q, r)) for r in range(q + 1)))


def rising_factorial_poly(r: int) -> NumberPoly:
    """``(n+1)(n+2)...(n+r)``, the number form of ``b^r (b†)^r``."""
    return NumberPoly(
        tuple(Fraction(abs(stirling_first_signed(r + 1, k + 1))) for k in range(r + 1))
    )


def normal_to_number(q: int) -> NumberPoly:
    """``(b†)^q b^q`` as a polynomial in ``n``."""
    if q < 0:
        raise DomainError(f"q must be non-negative, got {q}")
    return falling_factorial_poly(q)


def number_to_antinormal(p: NumberPoly) -> OrderedPoly:
    """Anti-normal order a polynomial in ``n`` termwise.

    ``n^q = Σ_r (-1)^{q+r} S2(q+1, r+1) b^r (b†)^r``
    """
    out = [Fraction(0)] * (p.degree + 1)
    for q, c in enumerate(p.coefficients):
        if not c:
            continue
        for r in range(q + 1):
            out[r] += c * (-1) ** (q + r) * stirling_second(q + 1, r + 1)
    return OrderedPoly(Ordering.ANTI_NORMAL, tuple(out))


def number_to_normal(p: NumberPoly) -> OrderedPoly:
    """Normal order a polynomial in ``n``: ``n^q = Σ_r S2(q, r) (b†)^r b^r``."""
    out = [Fraction(0)] * (p.degree + 1)
    for q, c in enumerate(p.coefficients):
        if not c:
            continue
        for r in range(q + 1):
            out[r] += c * stirling_second(q, r)
    return OrderedPoly(Ordering.NORMAL, tuple(out))


def normal_to_antinormal(q: int) -> OrderedPoly:
    """Closed-form anti-normal expansion of ``(b†)^q b^q``.

    Coefficient of ``b^r (b†)^r`` is ``(-1)^{r+q} (q!)^2 / ((r!)^2 (q-r)!)``.
    """
    if q < 0:
        raise DomainError(f"q must be non-negative, got {q}")
    qf = factorial(q)
    return OrderedPoly(
        Ordering.ANTI_NORMAL,
        tuple(
            Fraction((-1) ** (r + q) * qf * qf, factorial(r) ** 2 * factorial(q - r))
            for r in range(q + 1)
        ),
    )
