"""
CLI interface for graph-thresholds.

Organized following Typer best practices:
https://typer.tiangolo.com/tutorial/one-file-per-command/

Structure:
- capacity_cmd.py: capacity command
- graph_cmd.py: hom, rank commands
- model_cmd.py: model-probe command
- threshold_cmd.py: simulate-threshold command
- ramsey_cmd.py: ramsey-extract, intersect, lipschitz commands
- info.py: config, version commands
- helpers.py: Output format and report emission
"""

import typer

from ..core.enums import OutputFormat
from ..log_setup import setup_json_logging
from . import capacity_cmd
from . import graph_cmd
from . import info
from . import model_cmd
from . import ramsey_cmd
from . import threshold_cmd

# Main application
app = typer.Typer(
    name="graph-thresholds",
    help="Graph capacities, morphism and path thresholds of random subgraphs, and finite Ramsey extractions",
    add_completion=False,
)


@app.callback()
def main_options(
    ctx: typer.Context,
    output_format: OutputFormat = typer.Option(
        OutputFormat.RECORD,
        "--format", "-f",
        help="Report format: record (YAML), text (tables) or csv",
    ),
):
    """Reports are deterministic: the same options and seed give the same bytes."""
    ctx.obj = {"format": output_format}


# All commands live at the top level
app.add_typer(capacity_cmd.app, name="")
app.add_typer(graph_cmd.app, name="")
app.add_typer(model_cmd.app, name="")
app.add_typer(threshold_cmd.app, name="")
app.add_typer(ramsey_cmd.app, name="")
app.add_typer(info.app, name="")


def main():
    """Entry point for the CLI."""
    setup_json_logging()
    app()


if __name__ == "__main__":
    main()
