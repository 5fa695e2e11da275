"""Continuous-time jump expansion of Tr e^{-βH} over discontinuous occupation paths.

H splits into a diagonal part D (on-site polynomials) and hopping V. Expanding in V,

    Z = Σ_p (-1)^p ∫_{0<τ_1<...<τ_p<β} Tr[e^{-(β-τ_p)D} V ... V e^{-τ_1 D}],

and every closed path n(0) → ... → n(p) = n(0) contributes the product of its hop
elements times the simplex integral of the segment energies. The sign lives here;
``Bond.coupling`` is the operator coefficient.
"""

from __future__ import annotations

import logging
import math
from collections.abc import Iterator, Sequence
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy.special import gammainc, gammaln

from cli.core.config import max_workers
from cli.core.exceptions import CrossCheckError, DomainError, TruncationError
from cli.core.symbols import gamma_factor
from cli.models.hamiltonian import FockSpace, HamiltonianSpec, State
from cli.models.partition import PartitionResult
from cli.models.worldline_path import JumpEvent, WorldlinePath

logger = logging.getLogger(__name__)

# Nodes closer than this (relative to max |E|) are treated as coincident.
CLUSTER_TOL = 1e-8
# Below this β·spread the divided difference is taken from its Taylor series.
TAYLOR_SPREAD = 2.0
TAYLOR_TERMS = 60
GAMMA_TOL = 1e-10


# ---------------------------------------------------------------------------
# Simplex integrals
# ---------------------------------------------------------------------------


def _cluster(nodes: Sequence[float]) -> tuple[float, ...]:
    ordered = sorted(float(x) for x in nodes)
    scale = max((abs(x) for x in ordered), default=0.0)
    tol = CLUSTER_TOL * scale
    out: list[float] = []
    group: list[float] = []
    for x in ordered:
        if group and x - group[0] > tol:
            out.extend([math.fsum(group) / len(group)] * len(group))
            group = []
        group.append(x)
    out.extend([math.fsum(group) / len(group)] * len(group))
    return tuple(out)


def _taylor_divided_difference(nodes: tuple[float, ...], beta: float) -> float:
    """Divided difference of e^{-βx} as ``e^{-βc} Σ_j (-β)^{p+j}/(p+j)! h_j(y)``.

    ``y = x - c`` around the midpoint c; ``h_j`` is the complete homogeneous symmetric
    polynomial, built with ``h_j ← h_j + y_i h_{j-1}`` one node at a time.
    """
    p = len(nodes) - 1
    centre = 0.5 * (nodes[0] + nodes[-1])
    h = np.zeros(TAYLOR_TERMS + 1)
    h[0] = 1.0
    for x in nodes:
        y = x - centre
        for j in range(1, TAYLOR_TERMS + 1):
            h[j] += y * h[j - 1]
    terms = []
    for j in range(TAYLOR_TERMS + 1):
        k = p + j
        magnitude = math.exp(k * math.log(beta) - gammaln(k + 1))
        terms.append((-1) ** k * magnitude * h[j])
    return math.exp(-beta * centre) * math.fsum(terms)


def _divided_difference(
    nodes: tuple[float, ...], beta: float, cache: dict[tuple[float, ...], float]
) -> float:
    hit = cache.get(nodes)
    if hit is not None:
        return hit
    if len(nodes) == 1:
        value = math.exp(-beta * nodes[0])
    elif beta * (nodes[-1] - nodes[0]) <= TAYLOR_SPREAD:
        value = _taylor_divided_difference(nodes, beta)
    else:
        value = (
            _divided_difference(nodes[1:], beta, cache)
            - _divided_difference(nodes[:-1], beta, cache)
        ) / (nodes[-1] - nodes[0])
    cache[nodes] = value
    return value


def simplex_integral(
    energies: Sequence[float],
    beta: float,
    cache: dict[tuple[float, ...], float] | None = None,
) -> float:
    """``∫_{0<τ_1<...<τ_p<β} e^{-(β-τ_p)E_p} ... e^{-τ_1 E_0} dτ``.

    Equals ``(-1)^p`` times the divided difference of ``e^{-βx}`` on ``E_0..E_p``;
    repeated nodes give the confluent limit.
    """
    if not energies:
        raise DomainError("simplex integral needs at least one energy")
    if not beta > 0:
        raise DomainError(f"beta must be positive, got {beta}")
    p = len(energies) - 1
    nodes = _cluster(energies)
    dd = _divided_difference(nodes, beta, {} if cache is None else cache)
    return dd if p % 2 == 0 else -dd


# ---------------------------------------------------------------------------
# Path enumeration
# ---------------------------------------------------------------------------


def hopping_couplings(spec: HamiltonianSpec) -> dict[tuple[int, int], float]:
    """Total coupling per unordered site pair; repeated bonds add up as in H."""
    couplings: dict[tuple[int, int], float] = {}
    for bond in spec.bonds:
        pair = (min(bond.sites), max(bond.sites))
        couplings[pair] = couplings.get(pair, 0.0) + bond.coupling
    return couplings


def _moves(spec: HamiltonianSpec) -> tuple[JumpEvent, ...]:
    return tuple(JumpEvent(pair, d) for pair in hopping_couplings(spec) for d in (1, -1))


def _distance(state: State, origin: State) -> int:
    return sum(abs(a - b) for a, b in zip(state, origin, strict=True)) // 2


def enumerate_paths(
    spec: HamiltonianSpec, space: FockSpace, initial_state: State, p_max: int
) -> Iterator[WorldlinePath]:
    """Closed paths from ``initial_state`` with at most ``p_max`` hops, depth first.

    Branches that cannot return within the remaining hops are pruned; states outside
    ``space`` are never entered.
    """
    origin = tuple(initial_state)
    if space.index(origin) is None:
        raise DomainError(f"initial state {origin} is not in the Fock space")
    moves = _moves(spec)
    stack: list[tuple[State, tuple[JumpEvent, ...]]] = [(origin, ())]
    while stack:
        state, events = stack.pop()
        if state == origin:
            yield WorldlinePath(origin, events)
        remaining = p_max - len(events)
        if remaining == 0:
            continue
        for event in reversed(moves):
            if state[event.source] == 0:
                continue
            nxt = event.apply(state)
            if space.index(nxt) is None or _distance(nxt, origin) > remaining - 1:
                continue
            stack.append((nxt, events + (event,)))


@dataclass(frozen=True)
class DysonTerm:
    path: WorldlinePath
    weight: float

    @property
    def order(self) -> int:
        return self.path.order


def dyson_term(
    spec: HamiltonianSpec,
    path: WorldlinePath,
    beta: float,
    cache: dict[tuple[float, ...], float] | None = None,
) -> DysonTerm:
    """``Π(-c √((n_i+1) n_j)) × simplex_integral(E along the path)``."""
    couplings = hopping_couplings(spec)
    amplitude = 1.0
    for state, event in path.jumps():
        pair = (min(event.bond), max(event.bond))
        amplitude *= -couplings.get(pair, 0.0) * math.sqrt(
            (state[event.receiver] + 1) * state[event.source]
        )
    energies = [spec.diagonal_energy(s) for s in path.states()]
    return DysonTerm(path, amplitude * simplex_integral(energies, beta, cache))


# ---------------------------------------------------------------------------
# Dyson partition function
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class _StartContribution:
    orders: tuple[float, ...]
    paths: int


def _contribution(
    spec: HamiltonianSpec, space: FockSpace, start: State, beta: float, p_max: int
) -> _StartContribution:
    cache: dict[tuple[float, ...], float] = {}
    per_order: list[list[float]] = [[] for _ in range(p_max + 1)]
    count = 0
    for path in enumerate_paths(spec, space, start, p_max):
        term = dyson_term(spec, path, beta, cache)
        per_order[term.order].append(term.weight)
        count += 1
    return _StartContribution(tuple(math.fsum(ws) for ws in per_order), count)


def _hopping_norm(spec: HamiltonianSpec, space: FockSpace) -> float:
    """Max absolute row sum of V on ``space``, an upper bound on its spectral norm."""
    couplings = hopping_couplings(spec)
    best = 0.0
    for state in space.basis:
        row = 0.0
        for (i, j), coupling in couplings.items():
            for receiver, source in ((i, j), (j, i)):
                if state[source] == 0:
                    continue
                target = list(state)
                target[receiver] += 1
                target[source] -= 1
                if space.index(tuple(target)) is not None:
                    row += abs(coupling) * math.sqrt((state[receiver] + 1) * state[source])
        best = max(best, row)
    return best


def rigorous_remainder(spec: HamiltonianSpec, space: FockSpace, beta: float, p_max: int) -> float:
    """``dim · e^{-β min(E,0)} · Σ_{p>p_max} (β‖V‖)^p/p!``."""
    x = beta * _hopping_norm(spec, space)
    if x == 0:
        return 0.0
    e_min = min(spec.diagonal_energy(s) for s in space.basis)
    # Σ_{p>=k} x^p/p! = e^x P(k, x)
    tail = math.exp(x) * float(gammainc(p_max + 1, x))
    return space.dim * math.exp(-beta * min(e_min, 0.0)) * tail


def dyson_partition(
    spec: HamiltonianSpec, beta: float, p_max: int, space: FockSpace
) -> PartitionResult:
    """Z summed over every closed jump path with at most ``p_max`` hops.

    ``details`` holds the per-order contributions, the magnitude of the last order as
    the remainder estimate and the path count; ``truncation_bound`` is the factorial
    bound from :func:`rigorous_remainder`.
    """
    if p_max < 0:
        raise DomainError(f"p_max must be non-negative, got {p_max}")
    if not beta > 0:
        raise DomainError(f"beta must be positive, got {beta}")
    if spec.sites != space.sites:
        raise DomainError(f"model has {spec.sites} sites but the space has {space.sites}")
    if space.dim == 0:
        raise DomainError("sector holds no states")

    starts = space.basis
    workers = min(max_workers(), len(starts))
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(
                pool.map(lambda s: _contribution(spec, space, s, beta, p_max), starts)
            )
    else:
        parts = [_contribution(spec, space, s, beta, p_max) for s in starts]

    orders = [math.fsum(part.orders[p] for part in parts) for p in range(p_max + 1)]
    total = math.fsum(orders)
    n_paths = sum(part.paths for part in parts)
    if not total > 0:
        raise TruncationError(
            f"Dyson series through order {p_max} gives Z={total}; raise p_max", n_reached=p_max
        )
    bound = rigorous_remainder(spec, space, beta, p_max)
    logger.debug("dyson: %d paths over %d states, Z=%.17g", n_paths, space.dim, total)
    return PartitionResult(
        log_value=math.log(total),
        method="dyson",
        cutoff_n=p_max,
        truncation_bound=bound,
        params={"beta": beta, "p_max": p_max, "dim": space.dim},
        details={
            "orders": orders,
            "remainder_estimate": abs(orders[-1]),
            "paths": n_paths,
        },
    )


# ---------------------------------------------------------------------------
# Jump weights
# ---------------------------------------------------------------------------


def gamma_weight_check(path: WorldlinePath) -> float:
    """Product over hops of ``γ(n_i, n_i+1) γ(n_j, n_j-1)``.

    Checked against the hop element ``√((n_i+1) n_j)`` it must reduce to.
    """
    product = 1.0
    expected = 1.0
    for state, event in path.jumps():
        n_i, n_j = state[event.receiver], state[event.source]
        product *= gamma_factor(n_i, n_i + 1) * gamma_factor(n_j, n_j - 1)
        expected *= math.sqrt((n_i + 1) * n_j)
    if not math.isclose(product, expected, rel_tol=GAMMA_TOL):
        raise CrossCheckError(
            "γ product differs from the hop element", first=product, second=expected
        )
    return product


def naive_sqrt_weight(path: WorldlinePath, theta0: float = 0.5) -> float:
    """Smooth-path substitute ``Π √(ρ_i ρ_j)`` with ρ read off at the jump.

    At the jump ``ρ_i = n_i + Θ(0)`` and ``ρ_j = n_j - Θ(0)``.
    """
    if not 0.0 <= theta0 <= 1.0:
        raise DomainError(f"Θ(0) must lie in [0, 1], got {theta0}")
    weight = 1.0
    for state, event in path.jumps():
        weight *= math.sqrt(
            max((state[event.receiver] + theta0) * (state[event.source] - theta0), 0.0)
        )
    return weight
