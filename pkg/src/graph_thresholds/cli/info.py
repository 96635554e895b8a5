"""Info commands: config, version."""

import typer
from rich import print as rprint

from .. import __version__
from ..config import settings

app = typer.Typer()


@app.command()
def config():
    """
    Show current configuration.
    """
    rprint("\n[bold cyan]Current Configuration[/bold cyan]\n")

    # Reproducibility
    rprint("[bold]Seed:[/bold]")
    rprint(f"  Default seed: {settings.default_seed} [dim]({settings.seed_source()})[/dim]")

    # Capacity optimizer
    rprint("\n[bold]Capacity optimizer:[/bold]")
    rprint(f"  Restarts: {settings.restarts}")
    rprint(f"  Max iterations: {settings.max_iterations}")
    rprint(f"  Ascent tolerance: {settings.ascent_tolerance:g}")
    rprint(f"  Lattice steps (enum oracle): {settings.grid_steps}")
    rprint(f"  Enum oracle limit: {settings.support_enum_max_vertices} vertices")

    # Exact searches
    rprint("\n[bold]Desk-scale limits:[/bold]")
    rprint(f"  Exact clique search: {settings.exact_clique_max_vertices} vertices")
    rprint(f"  Chromatic number: {settings.chromatic_max_vertices} vertices")

    # Monte Carlo
    rprint("\n[bold]Monte Carlo:[/bold]")
    rprint(f"  Trial block size: {settings.trial_block_size}")
    rprint(f"  Workers: {settings.workers}")
    rprint(f"  Acceptance margin: {settings.report_sigmas:g} sigma")

    # Output
    rprint("\n[bold]Output:[/bold]")
    rprint(f"  Significant digits: {settings.significant_digits}")
    rprint(f"  Log directory: {settings.log_dir}")
    rprint(f"  Debug Mode: {'Enabled' if settings.debug else 'Disabled'}")

    rprint()


@app.command()
def version():
    """Show version information."""
    rprint("\n[bold cyan]graph-thresholds[/bold cyan]")
    rprint(f"Version: {__version__}\n")
