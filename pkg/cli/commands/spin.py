"""Spin partition functions with their embedded cross-checks."""

import math
from typing import Any

import click

from cli.commands.common import build_config, common_options, reported_errors
from cli.core.exceptions import CrossCheckError
from cli.core.oracle import partition_trace
from cli.core.output import flatten, render_csv, render_json, write_output
from cli.core.spin import (
    fz_operator,
    fz_schwinger_operator,
    spin_partition_x,
    spin_partition_z,
    spin_worldline_z,
    sx_operator,
    wg_failure_spin_x,
    wg_failure_spin_z,
)
from cli.models.spin_spec import FzHamiltonian, SpinSpec
from cli.schemas import Command, OutputFormat, RunConfig, SpinFamily

ORACLE_TOL = 1e-11


def _x_report(cfg: RunConfig) -> dict[str, Any]:
    exact = partition_trace(sx_operator(cfg.spin(), cfg.omega, cfg.hbar), cfg.beta)
    series = spin_partition_x(cfg.spin(), cfg.omega, cfg.hbar, cfg.beta, cfg.p_max)
    slack = series.truncation_bound + 1e-9 * exact.value
    if abs(series.value - exact.value) > slack:
        raise CrossCheckError(
            f"jump expansion misses the exact value by more than {slack:.3g}",
            first=series.value,
            second=exact.value,
        )
    comparison = wg_failure_spin_x(cfg.spin(), cfg.omega, cfg.beta, cfg.hbar)
    return {
        "family": "x",
        "S": str(cfg.spin()),
        "beta": cfg.beta,
        "hbar": cfg.hbar,
        "omega": cfg.omega,
        "exact": exact.value,
        "worldline": series.value,
        "orders": series.details["orders"],
        "order2_coefficient": series.details["order2_coefficient"],
        "truncation_bound": series.truncation_bound,
        "remainder_estimate": series.details["remainder_estimate"],
        "naive": comparison.naive,
        "relative_gap": comparison.relative_gap,
        "verdict": comparison.verdict.value,
    }


def _z_report(cfg: RunConfig) -> dict[str, Any]:
    spec = SpinSpec(cfg.spin(), FzHamiltonian(cfg.polynomial()), cfg.hbar)
    result = spin_partition_z(spec, cfg.beta)
    matrix = partition_trace(fz_operator(spec), cfg.beta)
    bosons = partition_trace(fz_schwinger_operator(spec), cfg.beta)
    for name, other in (("spin-matrix", matrix), ("Schwinger-sector", bosons)):
        if not math.isclose(result.value, other.value, rel_tol=ORACLE_TOL):
            raise CrossCheckError(
                f"spin sum disagrees with the {name} oracle",
                first=result.value,
                second=other.value,
            )
    worldline = spin_worldline_z(spec, cfg.beta, cfg.p_max)
    if not math.isclose(result.value, worldline.value, rel_tol=ORACLE_TOL):
        raise CrossCheckError(
            "hop-free worldline sum disagrees with the spin sum",
            first=worldline.value,
            second=result.value,
        )
    comparison = wg_failure_spin_z(spec.S, cfg.polynomial(), cfg.beta, cfg.hbar)
    return {
        "family": "z",
        "S": str(spec.S),
        "beta": cfg.beta,
        "hbar": cfg.hbar,
        "f": cfg.f,
        "exact": result.value,
        "oracle": matrix.value,
        "worldline": worldline.value,
        "orders": worldline.details["orders"],
        "order2_coefficient": worldline.details["order2_coefficient"],
        "naive": comparison.naive,
        "relative_gap": comparison.relative_gap,
        "verdict": comparison.verdict.value,
    }


@click.command()
@click.option(
    "--family",
    type=click.Choice([f.value for f in SpinFamily]),
    default=None,
    help="x for ωS_x, z for f(S_z) (default x)",
)
@click.option("--s", "S", default=None, help="Spin quantum number, e.g. 3/2 (default 1/2)")
@click.option("--beta", type=float, default=None, help="Inverse temperature (default 1)")
@click.option("--omega", type=float, default=None, help="Frequency ω of ωS_x (default 1)")
@click.option("--hbar", type=float, default=None, help="Value of ħ (default 1)")
@click.option("--f", default=None, help="Coefficients of f(ħm), constant term first")
@common_options
def spin(**flags: object) -> None:
    """Exact spin Z, its jump expansion per order and the naive comparator verdict."""
    cfg = build_config(Command.SPIN, flags)
    with reported_errors():
        report = _x_report(cfg) if cfg.family is SpinFamily.X else _z_report(cfg)
    if cfg.output_format() is OutputFormat.CSV:
        row = flatten(report)
        text = render_csv([row], list(row))
    else:
        text = render_json(report)
    write_output(text, cfg.output)
