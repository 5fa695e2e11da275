"""Single-spin models reduced to two Schwinger bosons."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from cli.core.exceptions import DomainError
from cli.core.ordering import NumberPoly


def parse_spin(value: str | float | Fraction) -> Fraction:
    """Spin quantum number from ``"3/2"``, ``1.5`` or a Fraction; 2S must be an integer."""
    try:
        spin = Fraction(value)
    except (ValueError, ZeroDivisionError) as exc:
        raise DomainError(f"cannot read spin {value!r}") from exc
    if spin < 0 or (2 * spin).denominator != 1:
        raise DomainError(f"2S must be a non-negative integer, got S={value}")
    return spin


@dataclass(frozen=True)
class FzHamiltonian:
    """``f(S_z)`` with ``f`` a polynomial in the physical value ``ħm``."""

    f: NumberPoly


@dataclass(frozen=True)
class XHamiltonian:
    """``ω S_x``."""

    omega: float


@dataclass(frozen=True)
class SpinSpec:
    S: Fraction
    hamiltonian: FzHamiltonian | XHamiltonian
    hbar: float = 1.0

    def __post_init__(self) -> None:
        object.__setattr__(self, "S", parse_spin(self.S))
        if not self.hbar > 0:
            raise DomainError(f"hbar must be positive, got {self.hbar}")

    @property
    def multiplicity(self) -> int:
        return int(2 * self.S) + 1
