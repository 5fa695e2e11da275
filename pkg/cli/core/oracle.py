"""Operator-method reference values.

Direct number-basis sums, dense Hamiltonians on truncated Fock spaces and explicit spin
matrices. Everything else in the package is checked against these.
"""

from __future__ import annotations

import logging
import math
from collections.abc import Callable
from enum import Enum
from fractions import Fraction

import numpy as np
from scipy import linalg
from scipy.special import logsumexp

from cli.core.exceptions import DomainError, EigensolveError
from cli.core.ordering import NumberPoly, OrderedPoly, Ordering, rising_factorial
from cli.core.summation import sum_log_terms
from cli.models.hamiltonian import DenseOperator, FockSpace, HamiltonianSpec, State
from cli.models.partition import PartitionResult, TailPolicy
from cli.models.spin_spec import parse_spin

logger = logging.getLogger(__name__)

HERMITIAN_TOL = 1e-12
RESIDUAL_TOL = 1e-10
_LOG_FLOAT_MAX = math.log(1.7976931348623157e308)


class SpinAxis(str, Enum):
    X = "x"
    Y = "y"
    Z = "z"


def partition_exact_q(q: int, beta_g: float, tail: TailPolicy | None = None) -> PartitionResult:
    """``q + Σ_{n>=0} e^{-βg (n+q)!/n!}``, the trace of ``e^{-βg (b†)^q b^q}``.

    q=0 has a constant spectrum and never passes the tail test.
    """
    if q < 0:
        raise DomainError(f"q must be non-negative, got {q}")
    if not beta_g > 0:
        raise DomainError(f"beta_g must be positive, got {beta_g}")
    tail = tail or TailPolicy()

    def log_term(n: int, _: float) -> float:
        return -beta_g * float(rising_factorial(n, q))

    series = sum_log_terms(log_term, tail, label="oracle")
    log_value = series.log_value if q == 0 else float(np.logaddexp(math.log(q), series.log_value))
    return PartitionResult(
        log_value=log_value,
        method="oracle",
        cutoff_n=series.cutoff,
        truncation_bound=series.tail_bound,
        params={"q": q, "beta_g": beta_g},
        details={"ground_states": q},
    )


# ---------------------------------------------------------------------------
# Dense Hamiltonians
# ---------------------------------------------------------------------------


def build_hamiltonian(spec: HamiltonianSpec, space: FockSpace) -> DenseOperator:
    """Dense matrix of ``Σ_i g p_i(n_i) + Σ_bonds c (b†_i b_j + b†_j b_i)`` on ``space``.

    A hop j → i from ``n`` has element ``c √((n_i+1) n_j)``; states pushed outside a
    per-site cutoff are dropped.
    """
    if spec.sites != space.sites:
        raise DomainError(f"model has {spec.sites} sites but the space has {space.sites}")
    if space.dim == 0:
        raise DomainError("Fock space holds no states; raise the cutoff")

    matrix = np.zeros((space.dim, space.dim))
    for k, state in enumerate(space.basis):
        matrix[k, k] = spec.diagonal_energy(state)
        for bond in spec.bonds:
            for receiver, source in ((bond.i, bond.j), (bond.j, bond.i)):
                if state[source] == 0:
                    continue
                target = list(state)
                target[receiver] += 1
                target[source] -= 1
                t = space.index(tuple(target))
                if t is not None:
                    matrix[t, k] += bond.coupling * math.sqrt(
                        (state[receiver] + 1) * state[source]
                    )
    logger.debug("built %dx%d Hamiltonian on %d sites", space.dim, space.dim, space.sites)
    return DenseOperator(matrix, space, spec)


def build_diagonal(space: FockSpace, energy: Callable[[State], float]) -> DenseOperator:
    """Diagonal operator with ``energy(state)`` on each basis state."""
    if space.dim == 0:
        raise DomainError("Fock space holds no states; raise the cutoff")
    return DenseOperator(np.diag([float(energy(s)) for s in space.basis]), space)


def _eigenvalues(matrix: np.ndarray) -> np.ndarray:
    scale = float(np.max(np.abs(matrix))) if matrix.size else 0.0
    asymmetry = float(np.max(np.abs(matrix - matrix.conj().T))) if matrix.size else 0.0
    if asymmetry > HERMITIAN_TOL * max(scale, 1.0):
        raise DomainError(f"operator is not Hermitian (asymmetry {asymmetry:.3g})")
    try:
        values, vectors = linalg.eigh(matrix)
    except linalg.LinAlgError as exc:
        raise EigensolveError(f"eigensolve failed: {exc}") from exc
    residual = float(np.linalg.norm(matrix @ vectors - vectors * values))
    norm = float(np.linalg.norm(matrix))
    if residual > RESIDUAL_TOL * max(norm, 1.0):
        raise EigensolveError(f"eigen-residual {residual:.3g} exceeds tolerance")
    return np.asarray(values, dtype=float)


def _exp_gap(log_a: float, log_b: float) -> float:
    """|e^a - e^b| without overflowing in the intermediate exponentials."""
    high, low = max(log_a, log_b), min(log_a, log_b)
    gap = -math.expm1(low - high)
    if gap == 0:
        return 0.0
    log_gap = high + math.log(gap)
    return math.exp(log_gap) if log_gap < _LOG_FLOAT_MAX else math.inf


def partition_trace(opr: DenseOperator, beta: float) -> PartitionResult:
    """``Σ_k e^{-βλ_k}`` over the spectrum of ``opr``.

    When the operator was built from a model on a per-site cutoff, it is rebuilt at
    ``cutoff - 2`` and the change in Z is reported as the truncation bound.
    """
    values = _eigenvalues(opr.matrix)
    log_value = float(logsumexp(-beta * values))

    bound = 0.0
    space = opr.space
    if opr.spec is not None and space is not None and space.n_cutoff is not None:
        reduced = space.with_cutoff(space.n_cutoff - 2) if space.n_cutoff >= 2 else None
        if reduced is not None and reduced.dim > 0:
            smaller = build_hamiltonian(opr.spec, reduced)
            log_small = float(logsumexp(-beta * _eigenvalues(smaller.matrix)))
            bound = _exp_gap(log_value, log_small)
            logger.debug("cutoff sensitivity at n_cutoff=%d: %.3g", space.n_cutoff, bound)
    return PartitionResult(
        log_value=log_value,
        method="oracle-trace",
        cutoff_n=opr.dim - 1,
        truncation_bound=bound,
        params={"beta": beta, "dim": opr.dim},
        details={"ground_energy": float(values[0]) if values.size else None},
    )


# ---------------------------------------------------------------------------
# Spin matrices
# ---------------------------------------------------------------------------


def spin_matrix(
    S: Fraction | str | float, axis: SpinAxis | str, hbar: float = 1.0
) -> DenseOperator:
    """``S_axis`` in the S_z eigenbasis ordered ``m = S, S-1, ..., -S``."""
    spin = parse_spin(S)
    axis = SpinAxis(axis)
    ms = [spin - k for k in range(int(2 * spin) + 1)]
    dim = len(ms)
    if axis is SpinAxis.Z:
        return DenseOperator(hbar * np.diag([float(m) for m in ms]))

    raising = np.zeros((dim, dim))
    s_s1 = spin * (spin + 1)
    for k in range(1, dim):
        m = ms[k]
        raising[k - 1, k] = hbar * math.sqrt(float(s_s1 - m * (m + 1)))
    lowering = raising.T
    if axis is SpinAxis.X:
        return DenseOperator((raising + lowering) / 2.0)
    return DenseOperator((raising - lowering) / 2.0j)


# ---------------------------------------------------------------------------
# Exact ladder-operator matrices
# ---------------------------------------------------------------------------


def _apply_word(word: str, n: int) -> tuple[int, int]:
    """Apply a word of ``a`` (b) and ``c`` (b†), rightmost first, to ``|n>``.

    Returns the final occupation and the squared coefficient; a squared coefficient of
    zero means the word annihilates ``|n>``.
    """
    coeff_sq = 1
    for letter in reversed(word):
        if letter == "a":
            coeff_sq *= n
            n -= 1
        else:
            n += 1
            coeff_sq *= n
        if coeff_sq == 0:
            return 0, 0
    return n, coeff_sq


def _word_element(word: str, n: int) -> int:
    final, coeff_sq = _apply_word(word, n)
    if coeff_sq == 0:
        return 0
    if final != n:
        raise DomainError(f"word {word!r} does not conserve particle number")
    root = math.isqrt(coeff_sq)
    assert root * root == coeff_sq
    return root


def ladder_matrix(poly: OrderedPoly | NumberPoly, dim: int) -> np.ndarray:
    """Exact ``dim x dim`` matrix (object array of Fractions) on ``|0>..|dim-1>``.

    Ordered monomials are applied to each basis state on the untruncated space before
    projecting, so anti-normal words see no edge effects.
    """
    if dim < 1:
        raise DomainError(f"dimension must be >= 1, got {dim}")
    out = np.full((dim, dim), Fraction(0), dtype=object)
    for n in range(dim):
        if isinstance(poly, NumberPoly):
            out[n, n] = poly(n)
            continue
        total = Fraction(0)
        for r, c in enumerate(poly.coefficients):
            if not c:
                continue
            word = "c" * r + "a" * r if poly.ordering is Ordering.NORMAL else "a" * r + "c" * r
            total += c * _word_element(word, n)
        out[n, n] = total
    return out
