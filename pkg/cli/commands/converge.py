"""Finite-N convergence of the dual sum towards the continuum."""

import math

import click

from cli.commands.common import build_config, common_options, reported_errors
from cli.core.dual_eval import convergence_scan
from cli.core.output import render_csv, render_json, write_output
from cli.schemas import Command, OutputFormat

COLUMNS = ("N", "Z_N", "abs_error", "ratio", "Z_N_exponential", "inverse_det")


@click.command()
@click.option("--q", type=int, default=None, help="Power q of g (b†)^q b^q (default 1)")
@click.option("--beta-g", type=float, default=None, help="Product βg (default 1)")
@click.option("--n-list", default=None, help="Strictly increasing N values, e.g. 64,128,256")
@common_options
def converge(**flags: object) -> None:
    """Tabulate Z^(N), |Z^(N) - Z^(∞)| and error(N)/error(2N); q=1 adds 1/det M."""
    cfg = build_config(Command.CONVERGE, flags)
    with reported_errors():
        scan = convergence_scan(cfg.q, cfg.beta_g, cfg.n_list, cfg.tail_policy())
    rows = [
        {
            "N": "inf" if row.n_slices is None else row.n_slices,
            "Z_N": row.value,
            "abs_error": row.error,
            "ratio": math.nan if row.ratio is None else row.ratio,
            "Z_N_exponential": math.nan if row.exponential_value is None else row.exponential_value,
            "inverse_det": math.nan if row.inverse_det is None else row.inverse_det,
        }
        for row in scan
    ]
    if cfg.output_format() is OutputFormat.CSV:
        text = render_csv(rows, COLUMNS)
    else:
        text = render_json({"q": cfg.q, "beta_g": cfg.beta_g, "columns": COLUMNS, "rows": rows})
    write_output(text, cfg.output)
