import logging

import click
from rich.logging import RichHandler

from cli.core.console import console


@click.group()
@click.version_option(version="0.1.0", prog_name="cspi")
@click.option("--verbose", "-v", is_flag=True, help="Log evaluator progress to stderr")
def cli(verbose: bool) -> None:
    """cspi: exact coherent-state path integrals through dualization."""
    logging.basicConfig(
        level=logging.DEBUG if verbose else logging.WARNING,
        format="%(message)s",
        handlers=[RichHandler(console=console, show_path=False)],
        force=True,
    )


# Register commands
from cli.commands.converge import converge  # noqa: E402
from cli.commands.figure2 import figure2  # noqa: E402
from cli.commands.partition import partition  # noqa: E402
from cli.commands.spin import spin  # noqa: E402
from cli.commands.symbol import symbol  # noqa: E402

cli.add_command(partition)
cli.add_command(figure2)
cli.add_command(converge)
cli.add_command(spin)
cli.add_command(symbol)

if __name__ == "__main__":
    cli()
