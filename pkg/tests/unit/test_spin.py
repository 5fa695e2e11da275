"""Tests for cli/core/spin.py."""

from __future__ import annotations

import math
import random
from fractions import Fraction

import numpy as np
import pytest

from cli.core.exceptions import DomainError
from cli.core.oracle import partition_trace
from cli.core.ordering import NumberPoly
from cli.core.spin import (
    Verdict,
    eta_from_theta,
    fz_operator,
    fz_schwinger_operator,
    partition_spin,
    schwinger_sector,
    schwinger_z_model,
    spin_partition_x,
    spin_partition_z,
    spin_worldline_z,
    sx_operator,
    theta_from_eta,
    wg_failure_spin_x,
    wg_failure_spin_z,
)
from cli.models.spin_spec import FzHamiltonian, SpinSpec, XHamiltonian, parse_spin

LINEAR = NumberPoly.from_coefficients([0, 1])
SQUARE = NumberPoly.from_coefficients([0, 0, 1])


def _z_spec(S: str, f: NumberPoly, hbar: float = 1.0) -> SpinSpec:
    return SpinSpec(parse_spin(S), FzHamiltonian(f), hbar)


class TestParseSpin:
    @pytest.mark.parametrize(("raw", "expected"), [("1/2", Fraction(1, 2)), (1.5, Fraction(3, 2))])
    def test_accepted(self, raw, expected):
        assert parse_spin(raw) == expected

    @pytest.mark.parametrize("raw", ["1/3", "-1", "spin"])
    def test_rejected(self, raw):
        with pytest.raises(DomainError):
            parse_spin(raw)


class TestSchwingerSector:
    @pytest.mark.parametrize("S", ["0", "1/2", "1", "3/2", "5"])
    def test_dimension(self, S):
        assert schwinger_sector(S).dim == int(2 * Fraction(S)) + 1


class TestSpinZ:
    def test_half_spin_linear(self):
        result = spin_partition_z(_z_spec("1/2", LINEAR), 2.0)
        assert result.value == pytest.approx(2.0 * math.cosh(1.0), rel=1e-14)
        assert result.method == "spin-z"

    def test_spin_one_square(self):
        result = spin_partition_z(_z_spec("1", SQUARE), 1.0)
        assert result.value == pytest.approx(1.0 + 2.0 * math.exp(-1.0), rel=1e-14)

    def test_hbar_scales_levels(self):
        result = spin_partition_z(_z_spec("1", LINEAR, hbar=0.5), 2.0)
        assert result.value == pytest.approx(1.0 + 2.0 * math.cosh(1.0), rel=1e-14)

    def test_both_routes_reported(self):
        result = spin_partition_z(_z_spec("3/2", SQUARE), 0.7)
        assert result.details["two_boson_log_value"] == pytest.approx(result.log_value, abs=1e-12)

    def test_random_polynomials_match_oracles(self):
        rng = random.Random(20240611)
        for _ in range(10):
            S = Fraction(rng.randint(0, 8), 2)
            degree = rng.randint(0, 3)
            coeffs = [Fraction(rng.randint(-4, 4), rng.randint(1, 4)) for _ in range(degree + 1)]
            spec = _z_spec(str(S), NumberPoly.from_coefficients(coeffs))
            beta = rng.uniform(0.1, 2.0)
            value = spin_partition_z(spec, beta).log_value
            matrix = partition_trace(fz_operator(spec), beta).log_value
            bosons = partition_trace(fz_schwinger_operator(spec), beta).log_value
            assert value == pytest.approx(matrix, rel=1e-13, abs=1e-11)
            assert value == pytest.approx(bosons, rel=1e-13, abs=1e-11)

    def test_needs_fz_hamiltonian(self):
        with pytest.raises(DomainError):
            spin_partition_z(SpinSpec(Fraction(1, 2), XHamiltonian(1.0)), 1.0)

    def test_beta_must_be_positive(self):
        with pytest.raises(DomainError):
            spin_partition_z(_z_spec("1/2", LINEAR), 0.0)


class TestSpinX:
    def test_half_spin_matches_cosh(self):
        result = spin_partition_x("1/2", 1.0, 1.0, 1.0, 12)
        exact = 2.0 * math.cosh(0.5)
        assert abs(result.value - exact) <= result.truncation_bound
        assert result.value == pytest.approx(exact, rel=1e-12)

    @pytest.mark.parametrize(("beta", "omega", "hbar"), [(1.0, 1.0, 1.0), (0.5, 2.0, 1.5)])
    def test_second_order_coefficient(self, beta, omega, hbar):
        result = spin_partition_x("1/2", omega, hbar, beta, 12)
        expected = (beta * hbar * omega) ** 2 / 4.0
        assert result.details["order2_coefficient"] == pytest.approx(expected, rel=1e-12)

    def test_zero_field(self):
        result = spin_partition_x("1/2", 0.0, 1.0, 1.0, 4)
        assert result.value == pytest.approx(2.0, rel=1e-15)

    @pytest.mark.parametrize("S", ["1/2", "1", "3/2"])
    def test_matches_spin_matrix_oracle(self, S):
        series = spin_partition_x(S, 1.0, 1.0, 1.0, 14)
        exact = partition_trace(sx_operator(S, 1.0), 1.0).value
        assert abs(series.value - exact) <= series.truncation_bound + 1e-12

    def test_dispatch(self):
        spec = SpinSpec(Fraction(1, 2), XHamiltonian(1.0))
        assert partition_spin(spec, 1.0).method == "spin-x"
        assert partition_spin(_z_spec("1/2", LINEAR), 1.0).method == "spin-z"


class TestSpinWorldlineZ:
    @pytest.mark.parametrize("S", ["1/2", "1", "5/2"])
    def test_hop_free_paths_give_exact_sum(self, S):
        spec = _z_spec(S, NumberPoly.from_coefficients([Fraction(1, 3), -1, Fraction(1, 2)]))
        worldline = spin_worldline_z(spec, 0.8, 6)
        exact = spin_partition_z(spec, 0.8)
        assert worldline.value == pytest.approx(exact.value, rel=1e-13)
        assert worldline.details["orders"][1:] == [0.0] * 6
        assert worldline.truncation_bound == 0.0

    def test_model_levels_follow_occupation(self):
        spec = _z_spec("1", SQUARE, hbar=0.5)
        model = schwinger_z_model(spec)
        # m = n_1 - S, energy (ħm)^2
        assert [model.diagonal_energy((n, 2 - n)) for n in range(3)] == [0.25, 0.0, 0.25]

    def test_needs_fz_hamiltonian(self):
        with pytest.raises(DomainError):
            schwinger_z_model(SpinSpec(Fraction(1, 2), XHamiltonian(1.0)))


class TestNaiveComparator:
    def test_half_spin_linear_agrees(self):
        comparison = wg_failure_spin_z("1/2", LINEAR, 1.0)
        assert comparison.verdict is Verdict.AGREE
        assert comparison.to_dict()["verdict"] == "AGREE"

    @pytest.mark.parametrize(("S", "f"), [("1", SQUARE), ("1/2", SQUARE), ("3/2", SQUARE)])
    def test_differs_elsewhere(self, S, f):
        comparison = wg_failure_spin_z(S, f, 1.0)
        assert comparison.verdict is Verdict.DIFFER
        assert comparison.relative_gap > 1e-6

    @pytest.mark.parametrize("S", ["1/2", "1", "3/2"])
    def test_transverse_field_agrees(self, S):
        comparison = wg_failure_spin_x(S, 0.7, 1.0)
        exact = partition_trace(sx_operator(S, 0.7), 1.0).value
        assert comparison.verdict is Verdict.AGREE
        assert comparison.exact == pytest.approx(exact, rel=1e-12)

    def test_high_temperature_limit(self):
        # both sums tend to 2S+1
        comparison = wg_failure_spin_z("1", SQUARE, 1e-9)
        assert comparison.exact == pytest.approx(3.0, rel=1e-6)
        assert comparison.naive == pytest.approx(3.0, rel=1e-6)


class TestBlochParametrization:
    def test_poles(self):
        assert eta_from_theta("1", 0.0) == pytest.approx(2.0)
        assert eta_from_theta("1", math.pi) == pytest.approx(0.0, abs=1e-15)

    def test_round_trip(self):
        thetas = np.linspace(0.0, math.pi, 17)
        etas = eta_from_theta("3/2", thetas)
        np.testing.assert_allclose(theta_from_eta("3/2", etas), thetas, atol=1e-7)

    def test_out_of_range(self):
        with pytest.raises(DomainError):
            theta_from_eta("1/2", 1.5)

    def test_spin_zero(self):
        with pytest.raises(DomainError):
            theta_from_eta("0", 0.0)
