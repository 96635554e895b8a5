"""Monte Carlo threshold command: simulate-threshold."""

from pathlib import Path
from typing import Optional

import typer

from ..core.enums import EventKind
from ..runner import RunConfig
from .helpers import run

app = typer.Typer()


@app.command("simulate-threshold")
def simulate_threshold(
    ctx: typer.Context,
    p: int = typer.Option(..., "--p", help="Target path length (edges)"),
    model: Optional[Path] = typer.Option(None, "--model", help="Model record file; edges from word events"),
    events: EventKind = typer.Option(EventKind.ORDER, "--events", help="Word events for --model: order or neq"),
    edge_prob: Optional[float] = typer.Option(None, "--edge-prob", help="Independent edges with this probability"),
    reals: Optional[float] = typer.Option(None, "--reals", help="Uniform reals, edge iff x_i > x_j + EPS"),
    window: Optional[int] = typer.Option(None, "--window", "-n", help="Window size (default 4p)"),
    trials: int = typer.Option(1000, "--trials", "-T", help="Number of samples"),
    workers: Optional[int] = typer.Option(None, "--workers", help="Threads drawing blocks in parallel"),
    seed: Optional[int] = typer.Option(None, "--seed", help="64-bit seed (default: configured constant)"),
    csv: Optional[Path] = typer.Option(None, "--csv", help="Also write per-trial rows to this CSV file"),
):
    """
    Estimate the probability of a path of length >= p and compare it with the capacity bound.

    Examples:

        # Every pair is an edge: a path always exists
        graph-thresholds simulate-threshold --edge-prob 1.0 --p 3 --window 8 --trials 10

        # Independent edges above the threshold 1/4 for p = 2
        graph-thresholds simulate-threshold --edge-prob 0.6 --p 2 --window 8 --trials 100000
    """
    run(ctx, RunConfig(
        command="simulate-threshold",
        inputs={"model": str(model)} if model is not None else {},
        options={
            "p": p,
            "events": events.value if model is not None else None,
            "edge_prob": edge_prob,
            "reals": reals,
            "window": window,
            "trials": trials,
            "workers": workers,
        },
        seed=seed,
        csv_path=csv,
    ))
