"""Extraction commands: ramsey-extract, intersect, lipschitz."""

from pathlib import Path
from typing import Optional

import typer

from ..runner import RunConfig
from .helpers import run

app = typer.Typer()


@app.command("ramsey-extract")
def ramsey_extract(
    ctx: typer.Context,
    fn: Path = typer.Option(..., "--fn", help="Tuple table record (arity, size, values)"),
    metric: Path = typer.Option(..., "--metric", help="Points record (vectors or matrix)"),
    k: Optional[int] = typer.Option(None, "--k", help="Expected arity of the table"),
    eps: float = typer.Option(..., "--eps", help="Oscillation tolerance"),
    size: int = typer.Option(..., "--size", help="Requested size of J"),
):
    """
    Extract J on which the tuple function converges along prefixes.

    Exit code 2 when the requested size cannot be reached; the report then
    carries the largest J found.
    """
    run(ctx, RunConfig(
        command="ramsey-extract",
        inputs={"fn": str(fn), "metric": str(metric)},
        options={"k": k, "eps": eps, "size": size},
    ))


@app.command()
def intersect(
    ctx: typer.Context,
    sets: Path = typer.Option(..., "--sets", help="Indicator rows record (arity, size, rows)"),
    mu: Path = typer.Option(..., "--mu", help="Probability vector record"),
    lam: float = typer.Option(..., "--lambda", help="Lower bound on every row's measure"),
    eps: float = typer.Option(..., "--eps", help="Oscillation tolerance"),
    size: int = typer.Option(..., "--size", help="Requested size of J"),
):
    """
    Extract J whose tuple sets intersect in measure at least lambda - 2 k eps.
    """
    run(ctx, RunConfig(
        command="intersect",
        inputs={"sets": str(sets), "mu": str(mu)},
        options={"lambda": lam, "eps": eps, "size": size},
    ))


@app.command()
def lipschitz(
    ctx: typer.Context,
    fn: Path = typer.Option(..., "--fn", help="Tuple table record"),
    metric: Path = typer.Option(..., "--metric", help="Points record"),
    index_metric: Optional[Path] = typer.Option(None, "--index-metric", help="Index metric record"),
    geometric: Optional[int] = typer.Option(None, "--geometric", help="Use |2^-n - 2^-m| on N points"),
    make_monotone: bool = typer.Option(False, "--make-monotone", help="Reindex the metric to a monotone one first"),
    size: int = typer.Option(..., "--size", help="Requested length of sigma"),
):
    """
    Increasing reindexing that makes the tuple function 1-Lipschitz, with an exhaustive certificate.

    Example:

        graph-thresholds lipschitz --fn table.yaml --metric points.yaml --geometric 12 --size 3
    """
    inputs = {"fn": str(fn), "metric": str(metric)}
    if index_metric is not None:
        inputs["index_metric"] = str(index_metric)
    run(ctx, RunConfig(
        command="lipschitz",
        inputs=inputs,
        options={"geometric": geometric, "make_monotone": make_monotone or None, "size": size},
    ))
