"""Options and error handling shared by every subcommand."""

from collections.abc import Callable, Iterator, Mapping
from contextlib import contextmanager
from pathlib import Path
from typing import Any, TypeVar

import click
from pydantic import ValidationError

from cli.core.config import load_config_file
from cli.core.console import error
from cli.core.exceptions import CspiError, DomainError
from cli.core.output import render_json
from cli.schemas import Command, OutputFormat, RunConfig

F = TypeVar("F", bound=Callable[..., Any])


def common_options(func: F) -> F:
    """``--output``, ``--format``, ``--eps-rel``, ``--n-max``, ``--p-max``, ``--config``.

    Defaults are left to :class:`RunConfig` so a config file can fill unset flags.
    """
    options = [
        click.option(
            "--output", "-o", type=click.Path(dir_okay=False, path_type=Path), default=None,
            help="Write here instead of stdout",
        ),
        click.option(
            "--format", "fmt", type=click.Choice([f.value for f in OutputFormat]), default=None,
            help="Output format (default json)",
        ),
        click.option("--eps-rel", type=float, default=None, help="Relative tail tolerance"),
        click.option("--n-max", type=int, default=None, help="Hard cap on the occupation sum"),
        click.option("--p-max", type=int, default=None, help="Highest jump-expansion order"),
        click.option(
            "--config", "config_path", type=click.Path(exists=True, dir_okay=False, path_type=Path),
            default=None, help="Flat YAML file of option values",
        ),
    ]
    for option in reversed(options):
        func = option(func)
    return func


def build_config(command: Command, flags: Mapping[str, Any]) -> RunConfig:
    """Merge flags over the config file over defaults, then validate.

    Invalid input becomes a :class:`click.UsageError` (exit code 2).
    """
    values = dict(flags)
    config_path = values.pop("config_path", None)
    if "fmt" in values:
        values["format"] = values.pop("fmt")
    merged: dict[str, Any] = {}
    if config_path is not None:
        try:
            merged.update(load_config_file(config_path))
        except DomainError as exc:
            raise click.UsageError(str(exc)) from exc
    merged.update({k: v for k, v in values.items() if v is not None})
    merged["command"] = command
    try:
        return RunConfig.model_validate(merged)
    except ValidationError as exc:
        problems = "; ".join(
            f"{'.'.join(str(p) for p in e['loc']) or 'config'}: {e['msg']}" for e in exc.errors()
        )
        raise click.UsageError(f"invalid options: {problems}") from exc


@contextmanager
def reported_errors() -> Iterator[None]:
    """Turn evaluator failures into exit code 1 with a JSON error object on stdout."""
    try:
        yield
    except CspiError as exc:
        payload = {"error": type(exc).__name__, "message": str(exc), "details": exc.details()}
        click.echo(render_json(payload), nl=False)
        error(str(exc))
        raise SystemExit(1) from exc
