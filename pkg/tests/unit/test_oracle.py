"""Tests for cli/core/oracle.py."""

from __future__ import annotations

import math
from fractions import Fraction

import numpy as np
import pytest

from cli.core.exceptions import DomainError, TruncationError
from cli.core.oracle import (
    SpinAxis,
    build_diagonal,
    build_hamiltonian,
    partition_exact_q,
    partition_trace,
    spin_matrix,
)
from cli.core.ordering import NumberPoly, falling_factorial_poly
from cli.core.spin import schwinger_sector, schwinger_x_model, sx_operator
from cli.models.hamiltonian import Bond, DenseOperator, FockSpace, HamiltonianSpec
from cli.models.partition import TailPolicy

GEOMETRIC = 1.0 / (1.0 - math.exp(-1.0))


class TestPartitionExactQ:
    def test_harmonic(self):
        result = partition_exact_q(1, 1.0)
        assert result.value == pytest.approx(GEOMETRIC, rel=1e-14)
        assert result.method == "oracle"

    def test_ground_states_counted(self):
        result = partition_exact_q(3, 2.0)
        assert result.value == pytest.approx(3 + math.exp(-12.0) + math.exp(-48.0), rel=1e-14)
        assert result.details["ground_states"] == 3

    def test_matches_dense_trace(self):
        spec = HamiltonianSpec.single_site(falling_factorial_poly(2))
        trace = partition_trace(build_hamiltonian(spec, FockSpace(1, n_cutoff=30)), 0.5)
        assert trace.value == pytest.approx(partition_exact_q(2, 0.5).value, rel=1e-12)

    def test_constant_spectrum_never_converges(self):
        with pytest.raises(TruncationError):
            partition_exact_q(0, 1.0, TailPolicy(n_max_hard=200))

    @pytest.mark.parametrize(("q", "beta_g"), [(-1, 1.0), (1, 0.0), (1, -2.0)])
    def test_invalid_arguments(self, q, beta_g):
        with pytest.raises(DomainError):
            partition_exact_q(q, beta_g)


class TestBuildHamiltonian:
    def test_two_site_single_particle(self):
        spec = HamiltonianSpec(2, bonds=(Bond(0, 1, 1.0),))
        space = FockSpace(2, n_total=1)
        assert space.basis == ((0, 1), (1, 0))
        opr = build_hamiltonian(spec, space)
        np.testing.assert_array_equal(opr.matrix, [[0.0, 1.0], [1.0, 0.0]])

    def test_hopping_element_uses_occupations(self):
        spec = HamiltonianSpec(2, bonds=(Bond(0, 1, 0.5),))
        space = FockSpace(2, n_total=3)
        opr = build_hamiltonian(spec, space)
        # (1, 2) -> (2, 1): 0.5 * sqrt(2 * 2)
        assert opr.matrix[space.index((2, 1)), space.index((1, 2))] == pytest.approx(1.0)
        np.testing.assert_allclose(opr.matrix, opr.matrix.T)

    def test_diagonal_from_onsite_polynomials(self):
        onsite = (NumberPoly.monomial(1), NumberPoly.monomial(2))
        spec = HamiltonianSpec(2, onsite, (), onsite_coupling=2.0)
        space = FockSpace(2, n_cutoff=2)
        opr = build_hamiltonian(spec, space)
        assert opr.matrix[space.index((1, 2)), space.index((1, 2))] == pytest.approx(10.0)

    def test_hops_out_of_cutoff_dropped(self):
        spec = HamiltonianSpec(2, bonds=(Bond(0, 1, 1.0),))
        space = FockSpace(2, n_cutoff=1)
        opr = build_hamiltonian(spec, space)
        # (1, 1) -> (2, 0) leaves the space
        assert np.count_nonzero(opr.matrix[:, space.index((1, 1))]) == 0

    def test_site_mismatch(self):
        with pytest.raises(DomainError):
            build_hamiltonian(HamiltonianSpec(3), FockSpace(2, n_cutoff=2))

    def test_empty_space(self):
        with pytest.raises(DomainError):
            build_hamiltonian(HamiltonianSpec(2), FockSpace(2, n_cutoff=0, n_total=3))

    def test_build_diagonal(self):
        space = FockSpace(1, n_cutoff=3)
        opr = build_diagonal(space, lambda s: s[0] ** 2)
        np.testing.assert_array_equal(np.diag(opr.matrix), [0.0, 1.0, 4.0, 9.0])


class TestPartitionTrace:
    def test_two_site_is_two_cosh(self):
        spec = HamiltonianSpec(2, bonds=(Bond(0, 1, 1.0),))
        result = partition_trace(build_hamiltonian(spec, FockSpace(2, n_total=1)), 1.0)
        assert result.value == pytest.approx(2.0 * math.cosh(1.0), rel=1e-14)
        assert result.details["ground_energy"] == pytest.approx(-1.0)
        assert result.truncation_bound == 0.0

    def test_harmonic_cutoff_converged(self):
        spec = HamiltonianSpec.single_site(NumberPoly.monomial(1))
        result = partition_trace(build_hamiltonian(spec, FockSpace(1, n_cutoff=40)), 1.0)
        assert result.value == pytest.approx(GEOMETRIC, rel=1e-14)
        assert result.truncation_bound < 1e-15

    def test_cutoff_sensitivity_reported(self):
        spec = HamiltonianSpec.single_site(NumberPoly.monomial(1))
        result = partition_trace(build_hamiltonian(spec, FockSpace(1, n_cutoff=4)), 1.0)
        assert result.truncation_bound == pytest.approx(math.exp(-3.0) + math.exp(-4.0))

    def test_non_hermitian_rejected(self):
        with pytest.raises(DomainError):
            partition_trace(DenseOperator(np.array([[0.0, 1.0], [0.0, 0.0]])), 1.0)

    def test_large_beta_stays_finite_in_log(self):
        spec = HamiltonianSpec.single_site(NumberPoly.monomial(1), coupling=-1.0)
        result = partition_trace(build_hamiltonian(spec, FockSpace(1, n_cutoff=5)), 1000.0)
        assert result.log_value == pytest.approx(5000.0)


class TestSpinMatrix:
    @pytest.mark.parametrize("S", ["1/2", "1", "3/2", "2", "5/2"])
    def test_commutation_relations(self, S):
        x, y, z = (spin_matrix(S, axis).matrix for axis in SpinAxis)
        np.testing.assert_allclose(x @ y - y @ x, 1j * z, atol=1e-12)
        np.testing.assert_allclose(y @ z - z @ y, 1j * x, atol=1e-12)
        np.testing.assert_allclose(z @ x - x @ z, 1j * y, atol=1e-12)

    @pytest.mark.parametrize("S", ["1/2", "1", "3/2", "2", "5/2"])
    def test_casimir(self, S):
        x, y, z = (spin_matrix(S, axis).matrix for axis in SpinAxis)
        s = float(Fraction(S))
        casimir = x @ x + y @ y + z @ z
        np.testing.assert_allclose(casimir, s * (s + 1) * np.eye(len(z)), atol=1e-12)

    def test_z_ordering_and_hbar(self):
        z = spin_matrix("1", "z", hbar=2.0).matrix
        np.testing.assert_array_equal(np.diag(z), [2.0, 0.0, -2.0])

    def test_half_spin_x_trace(self):
        result = partition_trace(spin_matrix("1/2", SpinAxis.X), 2.0)
        assert result.value == pytest.approx(2.0 * math.cosh(1.0), rel=1e-14)

    @pytest.mark.parametrize("S", ["1/2", "1", "3/2", "2", "7/2", "5"])
    @pytest.mark.parametrize(("omega", "hbar", "beta"), [(1.0, 1.0, 1.0), (0.7, 1.3, 2.5)])
    def test_schwinger_hopping_matches_spin_matrix(self, S, omega, hbar, beta):
        bosons = build_hamiltonian(schwinger_x_model(omega, hbar), schwinger_sector(S))
        via_bosons = partition_trace(bosons, beta)
        via_spin = partition_trace(sx_operator(S, omega, hbar), beta)
        assert bosons.dim == int(2 * Fraction(S)) + 1
        assert via_bosons.value == pytest.approx(via_spin.value, rel=1e-12)

    def test_bad_spin_rejected(self):
        with pytest.raises(DomainError):
            spin_matrix("1/3", "z")
