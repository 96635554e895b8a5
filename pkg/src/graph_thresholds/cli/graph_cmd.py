"""Graph structure commands: hom, rank."""

import typer

from ..runner import RunConfig
from .helpers import GRAPH_HELP, run

app = typer.Typer()


@app.command()
def hom(
    ctx: typer.Context,
    source: str = typer.Option(..., "--source", "-s", help=GRAPH_HELP),
    target: str = typer.Option(..., "--target", "-t", help=GRAPH_HELP),
):
    """
    Search for a morphism source -> target and print the witness.

    Examples:

        # Every graph maps to a loop
        graph-thresholds hom --source c5 --target loop

        # The 5-cycle is not 2-colorable
        graph-thresholds hom --source sc5 --target k2
    """
    run(ctx, RunConfig(command="hom", inputs={"source": source, "target": target}))


@app.command()
def rank(
    ctx: typer.Context,
    graph: str = typer.Option(..., "--graph", "-g", help=GRAPH_HELP),
):
    """
    Longest-path rank of every vertex (CYCLE where a cycle is reachable).

    Example:

        graph-thresholds rank --graph t5
    """
    run(ctx, RunConfig(command="rank", inputs={"graph": graph}))
