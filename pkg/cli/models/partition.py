"""Evaluation schemes, tail policies and partition-function results."""

from __future__ import annotations

import math
from collections.abc import Mapping
from dataclasses import dataclass, field
from enum import Enum

from cli.core.config import DEFAULT_EPS_REL, DEFAULT_N_MAX_HARD, DEFAULT_N_MIN
from cli.core.exceptions import DomainError

_LOG_FLOAT_MAX = math.log(1.7976931348623157e308)


class SymbolKind(str, Enum):
    H_OFFDIAG = "H_offdiag"
    H_FORCED_DIAGONAL = "H_forced_diagonal"
    H_DIAGONAL = "h_diagonal"


@dataclass(frozen=True)
class DiscreteScheme:
    """Time slicing of Tr e^{-βH}; ``n_slices=None`` is the continuum limit."""

    beta: float
    symbol_kind: SymbolKind
    n_slices: int | None = None

    def __post_init__(self) -> None:
        if not self.beta > 0:
            raise DomainError(f"beta must be positive, got {self.beta}")
        if self.n_slices is not None and self.n_slices < 1:
            raise DomainError(f"N must be >= 1, got {self.n_slices}")

    @classmethod
    def continuum(cls, beta: float, symbol_kind: SymbolKind) -> DiscreteScheme:
        return cls(beta, symbol_kind, None)

    @property
    def is_continuum(self) -> bool:
        return self.n_slices is None

    @property
    def delta(self) -> float:
        """Time step β/N (zero in the continuum)."""
        return 0.0 if self.n_slices is None else self.beta / self.n_slices

    def to_dict(self) -> dict[str, object]:
        return {
            "beta": self.beta,
            "symbol_kind": self.symbol_kind.value,
            "n_slices": "continuum" if self.n_slices is None else self.n_slices,
        }


@dataclass(frozen=True)
class TailPolicy:
    """Controls where an infinite occupation-number sum is cut."""

    eps_rel: float = DEFAULT_EPS_REL
    n_min: int = DEFAULT_N_MIN
    n_max_hard: int = DEFAULT_N_MAX_HARD

    def __post_init__(self) -> None:
        if not 0 < self.eps_rel < 1:
            raise DomainError(f"eps_rel must lie in (0, 1), got {self.eps_rel}")
        if self.n_min < 0 or self.n_min > self.n_max_hard:
            raise DomainError(
                f"need 0 <= n_min <= n_max_hard, got n_min={self.n_min}, "
                f"n_max_hard={self.n_max_hard}"
            )


@dataclass(frozen=True)
class PartitionResult:
    """Value of Z with provenance; the value is stored as its logarithm."""

    log_value: float
    method: str
    cutoff_n: int
    truncation_bound: float = 0.0
    scheme: DiscreteScheme | None = None
    params: Mapping[str, object] = field(default_factory=dict)
    details: Mapping[str, object] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.truncation_bound < 0 or math.isnan(self.truncation_bound):
            raise DomainError(f"truncation bound must be >= 0, got {self.truncation_bound}")

    @property
    def value(self) -> float:
        if self.log_value > _LOG_FLOAT_MAX:
            return math.inf
        return math.exp(self.log_value)

    def to_dict(self) -> dict[str, object]:
        return {
            "value": self.value,
            "log_value": self.log_value,
            "method": self.method,
            "cutoff": self.cutoff_n,
            "truncation_bound": self.truncation_bound,
            "params": dict(self.params),
            "scheme": None if self.scheme is None else self.scheme.to_dict(),
            "details": dict(self.details),
        }
