"""CLI helper functions for output formatting and common operations."""

from typing import Optional

import typer
from rich.console import Console

from ..core.enums import OutputFormat
from ..runner import RunConfig, RunOutcome, dispatch

console = Console()
err_console = Console(stderr=True)

GRAPH_HELP = "Builtin graph (k3, t5, c4, sc5, p4, e3, bt3, loop) or a graph record file"


def output_format(ctx: Optional[typer.Context]) -> OutputFormat:
    """Format chosen with the global --format option."""
    obj = (ctx.obj if ctx is not None else None) or {}
    return obj.get("format", OutputFormat.RECORD)


def emit(outcome: RunOutcome) -> None:
    """
    Print the report to stdout and the error, if any, to stderr.

    Raises:
        typer.Exit: With the outcome's exit code when it is not 0
    """
    if outcome.output:
        typer.echo(outcome.output, nl=False)
    if outcome.error:
        err_console.print(f"[red]✗ {outcome.error}[/red]")
    if outcome.exit_code:
        raise typer.Exit(outcome.exit_code)


def run(ctx: typer.Context, config: RunConfig) -> None:
    """Dispatch a command in the globally selected format and emit the result."""
    config.output_format = output_format(ctx)
    emit(dispatch(config))
