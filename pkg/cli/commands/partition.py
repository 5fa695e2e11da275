"""Evaluate a partition function with any of the supported methods."""

from pathlib import Path

import click

from cli.commands.common import build_config, common_options, reported_errors
from cli.core.console import success
from cli.core.dual_eval import (
    ActionModel,
    WeightForm,
    partition_dual_h,
    partition_dual_H_offdiag,
    partition_dual_H_offdiag_mixture,
    wrong_action_partition,
)
from cli.core.oracle import partition_exact_q
from cli.core.ordering import falling_factorial_poly
from cli.core.output import flatten, render_csv, render_json, write_output
from cli.core.spin import spin_partition_x, spin_partition_z
from cli.core.symbols import h_symbol_q, laguerre_transform
from cli.core.worldline import dyson_partition
from cli.models.hamiltonian import Bond, FockSpace, HamiltonianSpec
from cli.models.partition import DiscreteScheme, PartitionResult, SymbolKind
from cli.models.spin_spec import FzHamiltonian, SpinSpec
from cli.schemas import Command, OutputFormat, PartitionMethod, RunConfig

_WRONG = {
    PartitionMethod.WRONG_I: ActionModel.I,
    PartitionMethod.WRONG_II: ActionModel.II,
    PartitionMethod.WRONG_III: ActionModel.III,
}


def evaluate(cfg: RunConfig) -> PartitionResult:
    """Run the method selected in ``cfg``."""
    tail = cfg.tail_policy()
    method = cfg.method

    if method is PartitionMethod.DUAL_H:
        scheme = DiscreteScheme(cfg.beta_g, SymbolKind.H_DIAGONAL, cfg.n_slices)
        return partition_dual_h(laguerre_transform(h_symbol_q(cfg.q)), scheme, tail)

    if method is PartitionMethod.DUAL_H_OFFDIAG:
        if cfg.couplings:
            scheme = DiscreteScheme(cfg.beta, SymbolKind.H_OFFDIAG, cfg.n_slices)
            return partition_dual_H_offdiag_mixture(
                cfg.couplings, scheme, tail, weight_form=cfg.weight_form
            )
        scheme = DiscreteScheme(cfg.beta_g, SymbolKind.H_OFFDIAG, cfg.n_slices)
        return partition_dual_H_offdiag(cfg.q, 1.0, scheme, tail, weight_form=cfg.weight_form)

    if method in _WRONG:
        return wrong_action_partition(_WRONG[method], cfg.q, cfg.beta_g, tail)

    if method is PartitionMethod.ORACLE:
        return partition_exact_q(cfg.q, cfg.beta_g, tail)

    if method is PartitionMethod.DYSON:
        onsite = falling_factorial_poly(cfg.q)
        spec = HamiltonianSpec(2, (onsite, onsite), (Bond(0, 1, cfg.J),), cfg.onsite_g)
        return dyson_partition(spec, cfg.beta, cfg.p_max, FockSpace(2, n_total=cfg.n_tot))

    if method is PartitionMethod.SPIN_Z:
        spin_spec = SpinSpec(cfg.spin(), FzHamiltonian(cfg.polynomial()), cfg.hbar)
        return spin_partition_z(spin_spec, cfg.beta)

    return spin_partition_x(cfg.spin(), cfg.omega, cfg.hbar, cfg.beta, cfg.p_max)


@click.command()
@click.option(
    "--method",
    type=click.Choice([m.value for m in PartitionMethod]),
    default=None,
    help="Evaluator (default dual-h)",
)
@click.option("--q", type=int, default=None, help="Power q of g (b†)^q b^q")
@click.option("--beta-g", type=float, default=None, help="Product βg")
@click.option("--n-slices", type=int, default=None, help="Time slices N (default: continuum)")
@click.option(
    "--weight-form",
    type=click.Choice([w.value for w in WeightForm]),
    default=None,
    help="Slice weight of the dual-H method",
)
@click.option("--couplings", default=None, help="dual-H mixture, e.g. '1:1,2:0.5' (uses --beta)")
@click.option("--beta", type=float, default=None, help="Inverse temperature")
@click.option("--j", "J", type=float, default=None, help="Hopping coupling J")
@click.option("--n-tot", type=int, default=None, help="Particle-number sector")
@click.option("--onsite-g", type=float, default=None, help="On-site coupling for dyson")
@click.option("--s", "S", default=None, help="Spin quantum number, e.g. 1/2")
@click.option("--omega", type=float, default=None, help="Spin frequency ω")
@click.option("--hbar", type=float, default=None, help="Value of ħ")
@click.option("--f", default=None, help="Coefficients of f(ħm), constant term first")
@common_options
def partition(**flags: object) -> None:
    """Compute Z = Tr e^{-βH} and write it as JSON (or one CSV row)."""
    cfg = build_config(Command.PARTITION, flags)
    with reported_errors():
        result = evaluate(cfg)
    payload = result.to_dict()
    if cfg.output_format() is OutputFormat.CSV:
        row = flatten(payload)
        text = render_csv([row], list(row))
    else:
        text = render_json(payload)
    write_output(text, cfg.output)
    if isinstance(cfg.output, Path):
        success(f"{result.method}: Z = {result.value!r} written to {cfg.output}")
