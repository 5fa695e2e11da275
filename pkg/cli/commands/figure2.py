"""Plot-ready exponent table of the exact model against the three wrong actions."""

import click

from cli.commands.common import build_config, common_options, reported_errors
from cli.core.dual_eval import figure2_table
from cli.core.output import render_csv, render_json, write_output
from cli.schemas import Command, OutputFormat

COLUMNS = ("n", "asinh_exact", "asinh_I", "asinh_II", "asinh_III")


@click.command()
@click.option("--q", type=int, default=None, help="Power q of g (b†)^q b^q (default 1)")
@click.option("--beta-g", type=float, default=None, help="Product βg (default 1)")
@click.option("--n-table", type=int, default=None, help="Last occupation row (default 60)")
@common_options
def figure2(**flags: object) -> None:
    """Emit arcsinh(βg E(n)) for n = 0..n_table, CSV by default."""
    cfg = build_config(Command.FIGURE2, flags)
    with reported_errors():
        table = figure2_table(cfg.q, cfg.beta_g, cfg.n_table)
    rows = [dict(zip(COLUMNS, r.as_tuple(), strict=True)) for r in table]
    if cfg.output_format() is OutputFormat.CSV:
        text = render_csv(rows, COLUMNS)
    else:
        text = render_json({"q": cfg.q, "beta_g": cfg.beta_g, "columns": COLUMNS, "rows": rows})
    write_output(text, cfg.output)
