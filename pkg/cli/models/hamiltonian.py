"""Declarative lattice models and the Fock spaces they act on."""

from __future__ import annotations

import itertools
from collections.abc import Sequence
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property

import numpy as np

from cli.core.exceptions import DomainError
from cli.core.ordering import NumberPoly

State = tuple[int, ...]


@dataclass(frozen=True)
class Bond:
    """Hopping term ``coupling · (b†_i b_j + b†_j b_i)``."""

    i: int
    j: int
    coupling: float

    def __post_init__(self) -> None:
        if self.i == self.j:
            raise DomainError(f"bond ({self.i}, {self.j}) connects a site to itself")

    @property
    def sites(self) -> tuple[int, int]:
        return (self.i, self.j)


@dataclass(frozen=True)
class HamiltonianSpec:
    """On-site polynomials in ``n_i`` (scaled by ``onsite_coupling``) plus hopping bonds."""

    sites: int
    onsite: tuple[NumberPoly, ...] = ()
    bonds: tuple[Bond, ...] = ()
    onsite_coupling: float = 1.0

    def __post_init__(self) -> None:
        if self.sites < 1:
            raise DomainError(f"a model needs at least one site, got {self.sites}")
        if not self.onsite:
            zero = NumberPoly((Fraction(0),))
            object.__setattr__(self, "onsite", (zero,) * self.sites)
        if len(self.onsite) != self.sites:
            raise DomainError(
                f"expected {self.sites} on-site polynomials, got {len(self.onsite)}"
            )
        for bond in self.bonds:
            if not (0 <= bond.i < self.sites and 0 <= bond.j < self.sites):
                raise DomainError(f"bond {bond.sites} out of range for {self.sites} sites")

    @classmethod
    def single_site(cls, poly: NumberPoly, coupling: float = 1.0) -> HamiltonianSpec:
        return cls(1, (poly,), (), coupling)

    def diagonal_energy(self, state: Sequence[int]) -> float:
        exact = sum((p(n) for p, n in zip(self.onsite, state, strict=True)), Fraction(0))
        return self.onsite_coupling * float(exact)


@dataclass(frozen=True)
class FockSpace:
    """Occupation basis of ``sites`` modes.

    Either every site is truncated at ``n_cutoff`` or the basis is restricted to the
    sector with ``Σ n_i = n_total`` (or both). Enumeration is lexicographic.
    """

    sites: int
    n_cutoff: int | None = None
    n_total: int | None = None

    def __post_init__(self) -> None:
        if self.sites < 1:
            raise DomainError(f"a Fock space needs at least one site, got {self.sites}")
        if self.n_cutoff is None and self.n_total is None:
            raise DomainError("give a per-site cutoff, a total-number sector, or both")
        for name, value in (("n_cutoff", self.n_cutoff), ("n_total", self.n_total)):
            if value is not None and value < 0:
                raise DomainError(f"{name} must be non-negative, got {value}")

    @property
    def is_sector(self) -> bool:
        return self.n_total is not None

    @cached_property
    def basis(self) -> tuple[State, ...]:
        top = self.n_cutoff if self.n_cutoff is not None else self.n_total
        assert top is not None
        states = itertools.product(range(top + 1), repeat=self.sites)
        if self.n_total is None:
            return tuple(states)
        return tuple(s for s in states if sum(s) == self.n_total)

    @cached_property
    def _index(self) -> dict[State, int]:
        return {state: k for k, state in enumerate(self.basis)}

    @property
    def dim(self) -> int:
        return len(self.basis)

    def index(self, state: State) -> int | None:
        return self._index.get(tuple(state))

    def with_cutoff(self, n_cutoff: int) -> FockSpace:
        return FockSpace(self.sites, n_cutoff, self.n_total)


@dataclass(frozen=True)
class DenseOperator:
    """Dense matrix on a Fock (or spin) basis, with the model it came from if any."""

    matrix: np.ndarray
    space: FockSpace | None = None
    spec: HamiltonianSpec | None = field(default=None, compare=False)

    @property
    def dim(self) -> int:
        return int(self.matrix.shape[0])
