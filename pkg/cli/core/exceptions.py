class CspiError(Exception):
    """Base exception for all cspi errors."""

    def details(self) -> dict[str, object]:
        """Extra fields for the structured CLI error object."""
        return {}


class DomainError(CspiError, ValueError):
    """Argument outside the domain of the operation."""


class UnsupportedSymbolError(CspiError):
    """Symbol term cannot go through the diagonal Laguerre transform."""


class TruncationError(CspiError):
    """Series tail could not be certified before the hard cutoff."""

    def __init__(self, message: str, *, n_reached: int) -> None:
        super().__init__(message)
        self.n_reached = n_reached

    def details(self) -> dict[str, object]:
        return {"n_reached": self.n_reached}


class NonPositiveWeightError(CspiError):
    """Finite-N slice weight 1 - Δℋ(m) left the positive regime."""

    def __init__(self, m: int, weight: float, n_slices: int | None = None) -> None:
        super().__init__(
            f"non-positive slice weight {weight!r} at m={m}"
            + (f" (N={n_slices})" if n_slices is not None else "")
            + "; time step too large for this truncation level"
        )
        self.m = m
        self.weight = weight
        self.n_slices = n_slices

    def details(self) -> dict[str, object]:
        return {"m": self.m, "weight": self.weight, "n_slices": self.n_slices}


class InvalidPathError(CspiError):
    """Worldline path is not a valid closed, non-negative occupation path."""


class CrossCheckError(CspiError):
    """Two independent evaluations of the same quantity disagree."""

    def __init__(self, message: str, *, first: float, second: float) -> None:
        super().__init__(message)
        self.first = first
        self.second = second

    def details(self) -> dict[str, object]:
        return {"first": self.first, "second": self.second}


class EigensolveError(CspiError):
    """Dense symmetric eigensolve failed or missed its residual contract."""
