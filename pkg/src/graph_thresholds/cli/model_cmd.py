"""Measure model command: model-probe."""

from pathlib import Path
from typing import Optional

import typer

from ..core.enums import InvarianceKind
from ..runner import RunConfig
from .helpers import run

app = typer.Typer()


@app.command("model-probe")
def model_probe(
    ctx: typer.Context,
    model: Path = typer.Option(..., "--model", help="Model record file (variant bernoulli, mixture or atoms)"),
    event: Optional[str] = typer.Option(
        None,
        "--event", "-e",
        help="Event to measure: 'order:i,j', 'equal:i,j', 'neq:i,j' or 'cylinder:i=a,j=b'",
    ),
    equal: bool = typer.Option(False, "--equal", help="Probability of x_0 = x_1 (exchangeable models)"),
    marginal: Optional[str] = typer.Option(None, "--marginal", help="Increasing indices, e.g. '0,2,5'"),
    invariance: Optional[int] = typer.Option(None, "--invariance", help="Check invariance of r-marginals"),
    invariance_kind: InvarianceKind = typer.Option(
        InvarianceKind.INJECTIVE, "--invariance-kind", help="injective, increasing or shift",
    ),
    samples: Optional[int] = typer.Option(None, "--samples", help="Draw this many words"),
    seed: Optional[int] = typer.Option(None, "--seed", help="64-bit seed for --samples"),
):
    """
    Exact event probabilities, marginals and invariance checks of a measure model.

    Examples:

        graph-thresholds model-probe --model uniform3.yaml --event order:0,1

        graph-thresholds model-probe --model mix.yaml --equal --marginal 0,1
    """
    run(ctx, RunConfig(
        command="model-probe",
        inputs={"model": str(model)},
        options={
            "event": event,
            "equal": equal or None,
            "marginal": marginal,
            "invariance": invariance,
            "invariance_kind": invariance_kind.value if invariance is not None else None,
            "samples": samples,
        },
        seed=seed,
    ))
