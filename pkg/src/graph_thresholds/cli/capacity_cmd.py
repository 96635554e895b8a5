"""Capacity command."""

from typing import Optional

import typer

from ..core.enums import MethodChoice
from ..runner import RunConfig
from .helpers import GRAPH_HELP, run

app = typer.Typer()


@app.command()
def capacity(
    ctx: typer.Context,
    graph: str = typer.Option(..., "--graph", "-g", help=GRAPH_HELP),
    method: MethodChoice = typer.Option(
        MethodChoice.AUTO,
        "--method", "-m",
        help="auto (closed form when available), closed, numeric or enum (lattice oracle, <= 6 vertices)",
    ),
    restarts: Optional[int] = typer.Option(None, "--restarts", help="Random restarts of the numeric ascent"),
    max_iterations: Optional[int] = typer.Option(None, "--max-iterations", help="Iteration cap per restart"),
    tolerance: Optional[float] = typer.Option(None, "--tolerance", help="Stop a restart below this improvement"),
    grid_steps: Optional[int] = typer.Option(None, "--grid", "--grid-steps", help="Lattice resolution K of the enum oracle"),
    seed: Optional[int] = typer.Option(None, "--seed", help="64-bit seed (default: configured constant)"),
):
    """
    Capacity of a directed graph: the maximum of sum over edges of w_a * w_b on the simplex.

    Examples:

        # Closed form for the complete graph K3 (2/3)
        graph-thresholds capacity --graph k3

        # Numeric ascent on a graph file, as text tables
        graph-thresholds --format text capacity --graph my_graph.yaml --method numeric
    """
    run(ctx, RunConfig(
        command="capacity",
        inputs={"graph": graph},
        options={
            "method": method.value,
            "restarts": restarts,
            "max_iterations": max_iterations,
            "tolerance": tolerance,
            "grid_steps": grid_steps,
        },
        seed=seed,
    ))
