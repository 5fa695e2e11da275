"""Tests for cli/core/worldline.py and cli/models/worldline_path.py."""

from __future__ import annotations

import math

import pytest

from cli.core.exceptions import CrossCheckError, DomainError, InvalidPathError
from cli.core.oracle import build_hamiltonian, partition_trace
from cli.core.ordering import falling_factorial_poly
from cli.core.worldline import (
    dyson_partition,
    dyson_term,
    enumerate_paths,
    gamma_weight_check,
    naive_sqrt_weight,
    rigorous_remainder,
    simplex_integral,
)
from cli.models.hamiltonian import Bond, FockSpace, HamiltonianSpec
from cli.models.worldline_path import JumpEvent, WorldlinePath

HOP_IN = JumpEvent((0, 1), 1)
HOP_OUT = JumpEvent((0, 1), -1)


def _dimer(J: float = 1.0, q: int | None = None, g: float = 1.0) -> HamiltonianSpec:
    if q is None:
        return HamiltonianSpec(2, bonds=(Bond(0, 1, J),))
    onsite = falling_factorial_poly(q)
    return HamiltonianSpec(2, (onsite, onsite), (Bond(0, 1, J),), g)


# ---------------------------------------------------------------------------
# Simplex integrals
# ---------------------------------------------------------------------------


class TestSimplexIntegral:
    def test_single_segment(self):
        assert simplex_integral([2.0], 1.5) == pytest.approx(math.exp(-3.0))

    def test_two_segments(self):
        assert simplex_integral([0.0, 1.0], 1.0) == pytest.approx(1.0 - math.exp(-1.0))

    def test_order_of_nodes_irrelevant(self):
        assert simplex_integral([1.0, 0.0], 1.0) == pytest.approx(1.0 - math.exp(-1.0))

    def test_confluent_nodes(self):
        assert simplex_integral([0.5, 0.5], 2.0) == pytest.approx(2.0 * math.exp(-1.0))
        assert simplex_integral([0.0, 0.0, 0.0], 3.0) == pytest.approx(4.5)

    def test_wide_spread_uses_recursion(self):
        f01 = (math.exp(-5.0) - 1.0) / 5.0
        f12 = (math.exp(-10.0) - math.exp(-5.0)) / 5.0
        expected = (f12 - f01) / 10.0
        assert simplex_integral([0.0, 5.0, 10.0], 1.0) == pytest.approx(expected, rel=1e-12)

    def test_nearly_coincident_nodes_are_stable(self):
        close = simplex_integral([0.0, 1e-6, 2e-6], 1.0)
        assert close == pytest.approx(0.5, rel=1e-5)

    def test_clustered_nodes_match_confluent_limit(self):
        assert simplex_integral([1.0, 1.0 + 1e-12], 1.0) == pytest.approx(math.exp(-1.0))

    def test_taylor_and_recursion_agree_at_switch(self):
        taylor = simplex_integral([0.0, 1.0, 2.0], 1.0)
        recursion = simplex_integral([0.0, 1.0, 2.0 + 1e-7], 1.0)
        assert taylor == pytest.approx(recursion, rel=1e-6)

    def test_positive_for_any_order(self):
        for p in range(1, 12):
            assert simplex_integral([float(k % 3) for k in range(p + 1)], 2.0) > 0

    def test_invalid_input(self):
        with pytest.raises(DomainError):
            simplex_integral([], 1.0)
        with pytest.raises(DomainError):
            simplex_integral([0.0], 0.0)


# ---------------------------------------------------------------------------
# Paths
# ---------------------------------------------------------------------------


class TestWorldlinePath:
    def test_states_and_closure(self):
        path = WorldlinePath((0, 1), (HOP_IN, HOP_OUT))
        assert path.states() == ((0, 1), (1, 0), (0, 1))
        assert path.is_closed
        assert path.order == 2

    def test_negative_occupation_rejected(self):
        with pytest.raises(InvalidPathError):
            WorldlinePath((0, 1), (HOP_OUT,)).states()

    def test_bond_outside_lattice_rejected(self):
        with pytest.raises(InvalidPathError):
            WorldlinePath((1, 1), (JumpEvent((0, 2), 1),)).states()

    def test_bad_direction(self):
        with pytest.raises(DomainError):
            JumpEvent((0, 1), 0)


class TestEnumeratePaths:
    def test_single_particle_dimer(self):
        paths = list(enumerate_paths(_dimer(), FockSpace(2, n_total=1), (0, 1), 4))
        assert sorted(p.order for p in paths) == [0, 2, 4]
        assert all(p.is_closed for p in paths)

    def test_counts_grow_with_sector(self):
        space = FockSpace(2, n_total=2)
        paths = list(enumerate_paths(_dimer(), space, (1, 1), 2))
        # stay, or hop either way and come back
        assert len(paths) == 3

    def test_start_outside_space(self):
        with pytest.raises(DomainError):
            list(enumerate_paths(_dimer(), FockSpace(2, n_total=1), (1, 1), 2))

    def test_cutoff_respected(self):
        space = FockSpace(2, n_cutoff=1)
        for path in enumerate_paths(_dimer(), space, (1, 1), 4):
            assert all(space.index(s) is not None for s in path.states())


# ---------------------------------------------------------------------------
# Dyson partition
# ---------------------------------------------------------------------------


class TestDysonPartition:
    def test_dimer_is_two_cosh(self):
        result = dyson_partition(_dimer(), 1.0, 12, FockSpace(2, n_total=1))
        exact = 2.0 * math.cosh(1.0)
        assert abs(result.value - exact) <= result.truncation_bound
        assert result.value == pytest.approx(exact, rel=1e-9)

    def test_odd_orders_vanish(self):
        result = dyson_partition(_dimer(), 1.0, 12, FockSpace(2, n_total=1))
        orders = result.details["orders"]
        assert all(orders[p] == 0.0 for p in range(1, 13, 2))
        assert orders[2] == pytest.approx(1.0, rel=1e-12)

    def test_second_order_term(self):
        term = dyson_term(_dimer(J=0.5), WorldlinePath((0, 1), (HOP_IN, HOP_OUT)), 2.0)
        # (-J)^2 * beta^2 / 2
        assert term.weight == pytest.approx(0.5)
        assert term.order == 2

    def test_no_hopping(self):
        result = dyson_partition(_dimer(J=0.0, q=2), 1.0, 4, FockSpace(2, n_total=2))
        expected = 2 * math.exp(-2.0) + 1.0
        assert result.value == pytest.approx(expected, rel=1e-14)
        assert result.truncation_bound == 0.0

    @pytest.mark.parametrize("n_tot", [1, 2, 3, 4])
    def test_sectors_match_dense_oracle(self, n_tot):
        spec = _dimer(J=1.0 / n_tot, q=2, g=1.0)
        space = FockSpace(2, n_total=n_tot)
        series = dyson_partition(spec, 1.0, 12, space)
        exact = partition_trace(build_hamiltonian(spec, space), 1.0).value
        assert abs(series.value - exact) <= series.truncation_bound + 1e-12
        assert series.value == pytest.approx(exact, rel=1e-8)

    @pytest.mark.parametrize(
        "bonds",
        [(Bond(0, 1, 0.25), Bond(0, 1, 0.25)), (Bond(0, 1, 0.25), Bond(1, 0, 0.25))],
    )
    def test_repeated_bonds_add_up(self, bonds):
        spec = HamiltonianSpec(2, bonds=bonds)
        space = FockSpace(2, n_total=1)
        series = dyson_partition(spec, 1.0, 12, space)
        exact = partition_trace(build_hamiltonian(spec, space), 1.0).value
        assert exact == pytest.approx(2.0 * math.cosh(0.5), rel=1e-14)
        assert series.value == pytest.approx(exact, rel=1e-10)
        assert abs(series.value - exact) <= series.truncation_bound + 1e-12

    def test_repeated_bonds_enumerate_once(self):
        spec = HamiltonianSpec(2, bonds=(Bond(0, 1, 0.5), Bond(1, 0, 0.5)))
        paths = list(enumerate_paths(spec, FockSpace(2, n_total=1), (0, 1), 4))
        assert sorted(p.order for p in paths) == [0, 2, 4]

    def test_threads_give_identical_orders(self, monkeypatch):
        spec = _dimer(J=0.5, q=2)
        space = FockSpace(2, n_total=3)
        serial = dyson_partition(spec, 1.0, 8, space)
        monkeypatch.setenv("CSPI_THREADS", "4")
        threaded = dyson_partition(spec, 1.0, 8, space)
        assert threaded.details["orders"] == serial.details["orders"]

    def test_remainder_bound_shrinks_with_order(self):
        spec, space = _dimer(), FockSpace(2, n_total=1)
        assert rigorous_remainder(spec, space, 1.0, 12) < rigorous_remainder(spec, space, 1.0, 6)

    def test_invalid_arguments(self):
        space = FockSpace(2, n_total=1)
        with pytest.raises(DomainError):
            dyson_partition(_dimer(), 1.0, -1, space)
        with pytest.raises(DomainError):
            dyson_partition(_dimer(), 0.0, 4, space)
        with pytest.raises(DomainError):
            dyson_partition(_dimer(), 1.0, 4, FockSpace(3, n_total=1))


# ---------------------------------------------------------------------------
# Jump weights
# ---------------------------------------------------------------------------


class TestJumpWeights:
    def test_gamma_product_equals_hop_elements(self):
        path = WorldlinePath((2, 3), (HOP_IN, HOP_IN, HOP_OUT, HOP_OUT))
        expected = math.sqrt(3 * 3) * math.sqrt(4 * 2) * math.sqrt(4 * 2) * math.sqrt(3 * 3)
        assert gamma_weight_check(path) == pytest.approx(expected, rel=1e-10)

    def test_empty_path_weight(self):
        assert gamma_weight_check(WorldlinePath((1, 1))) == 1.0

    def test_naive_weight_underestimates_round_trip(self):
        path = WorldlinePath((0, 1), (HOP_IN, HOP_OUT))
        for theta0 in (0.0, 0.25, 0.5, 0.75, 1.0):
            # θ(1-θ) per hop pair, at most 1/4
            assert naive_sqrt_weight(path, theta0) <= 0.25
        assert gamma_weight_check(path) == pytest.approx(1.0)

    def test_naive_weight_range(self):
        with pytest.raises(DomainError):
            naive_sqrt_weight(WorldlinePath((0, 1), (HOP_IN, HOP_OUT)), 1.5)

    def test_gamma_check_flags_mismatch(self, monkeypatch):
        monkeypatch.setattr("cli.core.worldline.gamma_factor", lambda a, b: 2.0)
        with pytest.raises(CrossCheckError):
            gamma_weight_check(WorldlinePath((0, 1), (HOP_IN, HOP_OUT)))

    def test_open_paths_rejected(self):
        open_path = WorldlinePath((0, 1), (HOP_IN,))
        assert not open_path.is_closed
        with pytest.raises(InvalidPathError):
            gamma_weight_check(open_path)
        with pytest.raises(InvalidPathError):
            naive_sqrt_weight(open_path)
        with pytest.raises(InvalidPathError):
            dyson_term(_dimer(), open_path, 1.0)
