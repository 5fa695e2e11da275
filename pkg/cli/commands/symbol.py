"""Dump ordering and symbol tables."""

from typing import Any

import click

from cli.commands.common import build_config, common_options, reported_errors
from cli.core.ordering import (
    normal_to_antinormal,
    normal_to_number,
    stirling_first_signed,
    stirling_second,
)
from cli.core.output import flatten, render_csv, render_json, write_output
from cli.core.symbols import H_symbol_diagonal_q, h_symbol_q, laguerre_transform
from cli.schemas import Command, OutputFormat


def symbol_table(q: int) -> dict[str, Any]:
    """Number form, anti-normal expansion and symbols of ``(b†)^q b^q``."""
    laguerre = laguerre_transform(h_symbol_q(q))
    closed = laguerre.closed_form
    return {
        "q": q,
        "number_form": list(normal_to_number(q).coefficients),
        "anti_normal": list(normal_to_antinormal(q).coefficients),
        "h_symbol": list(h_symbol_q(q).radial_coefficients()),
        "H_forced_diagonal": list(H_symbol_diagonal_q(q).radial_coefficients()),
        "laguerre_terms": [[r, c] for r, c in laguerre.terms],
        "laguerre_closed_form": None if closed is None else closed.kind.value,
    }


@click.command()
@click.option("--q-max", type=int, default=None, help="Largest q to tabulate (0..12, default 12)")
@common_options
def symbol(**flags: object) -> None:
    """Stirling tables plus per-q ordering and symbol coefficients (exact rationals)."""
    cfg = build_config(Command.SYMBOL, flags)
    with reported_errors():
        tables = [symbol_table(q) for q in range(cfg.q_max + 1)]
        stirling = {
            "stirling_first_signed": [
                [stirling_first_signed(n, k) for k in range(n + 1)] for n in range(cfg.q_max + 1)
            ],
            "stirling_second": [
                [stirling_second(n, k) for k in range(n + 1)] for n in range(cfg.q_max + 1)
            ],
        }
    if cfg.output_format() is OutputFormat.CSV:
        rows = [flatten(t) for t in tables]
        text = render_csv(rows, list(rows[0]))
    else:
        text = render_json({"q_max": cfg.q_max, **stirling, "tables": tables})
    write_output(text, cfg.output)
