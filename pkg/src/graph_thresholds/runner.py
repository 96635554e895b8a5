"""Run configuration and dispatch shared by all CLI commands.

Each command handler returns a record kind, a payload and optional CSV rows;
dispatch renders them in the requested format and maps errors to exit codes:
0 on success, 1 for domain, record, convergence and I/O errors, 2 when a
requested finite size cannot be reached.
"""

import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Tuple

import numpy as np
import pandas as pd

from . import __version__
from .capacity import OptimizerConfig, capacity, capacity_closed_form
from .config import settings
from .core import rng
from .core.enums import EventKind, InvarianceKind, MethodChoice, OutputFormat
from .core.errors import ConvergenceError, DomainError, InfeasibleSizeError
from .graph_core import hom_exists, longest_path_length, rank_vector
from .measures import (
    EventSpec,
    check_invariance,
    equal_prob,
    event_prob,
    marginal,
    sample_words,
)
from .ramsey import (
    IndexMetric,
    extract_convergent,
    intersect_extract,
    lipschitz_reindex,
    monotone_metric,
)
from .records import (
    load_graph,
    load_index_metric,
    load_model,
    load_mu,
    load_points,
    load_rows,
    load_tuple_function,
    render_record,
)
from .reporter import ReportRenderer
from .thresholds import IndependentEdges, NeqEvents, OrderEvents, RealsEvents, run_path_experiment, verify_finpath_bound

logger = logging.getLogger(__name__)

Handled = Tuple[str, Dict[str, Any], Optional[List[dict]]]


@dataclass
class RunConfig:
    """One invocation: command, inputs, options, seed and output format."""

    command: str
    inputs: Dict[str, str] = field(default_factory=dict)
    options: Dict[str, Any] = field(default_factory=dict)
    seed: Optional[int] = None
    output_format: OutputFormat = OutputFormat.RECORD
    csv_path: Optional[Path] = None

    @property
    def effective_seed(self) -> int:
        return settings.default_seed if self.seed is None else self.seed

    @property
    def seed_source(self) -> str:
        return "option" if self.seed is not None else settings.seed_source()

    def option(self, name: str, default: Any = None) -> Any:
        value = self.options.get(name)
        return default if value is None else value

    def echo(self) -> Dict[str, Any]:
        """Everything needed to reproduce the report."""
        return {
            "command": self.command,
            "inputs": dict(self.inputs),
            "options": {k: v for k, v in self.options.items() if v is not None},
            "seed": self.effective_seed,
            "seed_source": self.seed_source,
            "version": __version__,
        }


@dataclass
class RunOutcome:
    exit_code: int
    output: str
    error: Optional[str] = None


# Handlers

def _capacity(config: RunConfig) -> Handled:
    graph = load_graph(config.inputs["graph"])
    optimizer = OptimizerConfig.from_settings(
        restarts=config.option("restarts"),
        max_iterations=config.option("max_iterations"),
        tolerance=config.option("tolerance"),
        grid_steps=config.option("grid_steps"),
        seed=config.effective_seed,
    )
    method = MethodChoice(config.option("method", MethodChoice.AUTO.value))
    result = capacity(graph, method, optimizer)
    payload = {"graph": graph.to_dict(), "closed_form": capacity_closed_form(graph), **result.to_dict()}
    rows = [{"vertex": v, "weight": w} for v, w in enumerate(result.maximizer.weights)]
    return "capacity", payload, rows


def _hom(config: RunConfig) -> Handled:
    source = load_graph(config.inputs["source"])
    target = load_graph(config.inputs["target"])
    witness = hom_exists(source, target)
    payload = {
        "source": source.to_dict(),
        "target": target.to_dict(),
        "exists": witness is not None,
        "assignment": list(witness.assignment) if witness is not None else None,
    }
    rows = [{"vertex": v, "image": a} for v, a in enumerate(witness.assignment)] if witness else []
    return "hom", payload, rows


def _rank(config: RunConfig) -> Handled:
    graph = load_graph(config.inputs["graph"])
    ranks = rank_vector(graph)
    length = longest_path_length(graph)
    payload = {"graph": graph.to_dict(), **ranks.to_dict(), "longest_path": getattr(length, "value", length)}
    rows = [{"vertex": v, "rank": r} for v, r in enumerate(ranks.to_dict()["ranks"])]
    return "rank", payload, rows


def _model_probe(config: RunConfig) -> Handled:
    model = load_model(config.inputs["model"])
    payload: Dict[str, Any] = {"model": model.to_dict()}
    rows: List[dict] = []
    if config.option("event"):
        event = EventSpec.parse(config.option("event"))
        payload["event"] = event.describe()
        payload["probability"] = event_prob(model, event)
    if config.option("equal"):
        payload["equal_probability"] = equal_prob(model)
    if config.option("marginal"):
        text = str(config.option("marginal"))
        try:
            indices = tuple(int(i) for i in text.split(","))
        except ValueError:
            raise DomainError(f"cannot parse marginal indices '{text}'")
        table = marginal(model, indices)
        payload["marginal_indices"] = list(indices)
        payload["marginal"] = table.tolist()
        rows = [
            {"cell": ",".join(str(a) for a in cell), "probability": float(table[cell])}
            for cell in np.ndindex(table.shape)
        ]
    if config.option("invariance") is not None:
        kind = InvarianceKind(config.option("invariance_kind", InvarianceKind.INJECTIVE.value))
        payload["invariance"] = {
            "r": config.option("invariance"),
            "kind": kind.value,
            "deviation": check_invariance(model, config.option("invariance"), kind),
        }
    if config.option("samples"):
        words = sample_words(model, config.option("samples"), config.effective_seed)
        payload["samples"] = words.tolist()
        rows = [{"sample": i, "word": "".join(str(s) for s in w)} for i, w in enumerate(words.tolist())]
    if len(payload) == 1:
        raise DomainError("nothing to probe: pass --event, --equal, --marginal, --invariance or --samples")
    return "model-probe", payload, rows or None


def _simulate_threshold(config: RunConfig) -> Handled:
    chosen = [k for k in ("model", "edge_prob", "reals") if config.inputs.get(k) is not None or config.option(k) is not None]
    if len(chosen) != 1:
        raise DomainError("give exactly one of --model, --edge-prob or --reals")
    if "model" in chosen:
        model = load_model(config.inputs["model"])
        kind = EventKind(config.option("events", EventKind.ORDER.value))
        if kind not in (EventKind.ORDER, EventKind.NEQ):
            raise DomainError("--events must be 'order' or 'neq'")
        source = OrderEvents(model) if kind is EventKind.ORDER else NeqEvents(model)
    elif "edge_prob" in chosen:
        source = IndependentEdges(config.option("edge_prob"))
    else:
        source = RealsEvents(config.option("reals"))

    experiment = run_path_experiment(
        source,
        p=config.option("p"),
        window=config.option("window"),
        trials=config.option("trials", 1000),
        seed=config.effective_seed,
        workers=config.option("workers"),
    )
    payload = {
        **experiment.report.to_dict(),
        "bound_verified": verify_finpath_bound(experiment.report),
        "sigmas": settings.report_sigmas,
    }
    rows = experiment.trial_rows()
    if config.csv_path is not None:
        pd.DataFrame(rows).to_csv(config.csv_path, index=False, lineterminator="\n")
        logger.info(f"wrote {len(rows)} trial rows to {config.csv_path}")
    return "threshold", payload, rows


def _ramsey_extract(config: RunConfig) -> Handled:
    f = load_tuple_function(config.inputs["fn"])
    points = load_points(config.inputs["metric"])
    arity = config.option("k")
    if arity is not None and arity != f.arity:
        raise DomainError(f"--k {arity} does not match the table arity {f.arity}")
    result = extract_convergent(f, points, config.option("eps"), config.option("size"))
    return "extraction", result.to_dict(), None


def _intersect(config: RunConfig) -> Handled:
    mu = load_mu(config.inputs["mu"])
    family = load_rows(config.inputs["sets"], mu)
    result = intersect_extract(family, config.option("lambda"), config.option("eps"), config.option("size"))
    return "intersection", {**result.to_dict(), "extraction": result.extraction.to_dict()}, None


def _lipschitz(config: RunConfig) -> Handled:
    f = load_tuple_function(config.inputs["fn"])
    points = load_points(config.inputs["metric"])
    if config.inputs.get("index_metric"):
        delta = load_index_metric(config.inputs["index_metric"])
    elif config.option("geometric"):
        delta = IndexMetric.geometric(config.option("geometric"))
    else:
        raise DomainError("give --index-metric or --geometric N")
    payload: Dict[str, Any] = {}
    if config.option("make_monotone"):
        transformed = monotone_metric(delta)
        delta = transformed.metric
        payload["psi"] = list(transformed.psi)
    result = lipschitz_reindex(f, points, delta, config.option("size"))
    payload.update(result.to_dict())
    return "lipschitz", payload, None


HANDLERS: Dict[str, Callable[[RunConfig], Handled]] = {
    "capacity": _capacity,
    "hom": _hom,
    "rank": _rank,
    "model-probe": _model_probe,
    "simulate-threshold": _simulate_threshold,
    "ramsey-extract": _ramsey_extract,
    "intersect": _intersect,
    "lipschitz": _lipschitz,
}


def _render(config: RunConfig, kind: str, payload: Dict[str, Any], rows: Optional[List[dict]]) -> str:
    if config.output_format is OutputFormat.TEXT:
        return ReportRenderer().render_text(kind, payload, config.echo())
    if config.output_format is OutputFormat.CSV:
        return ReportRenderer().render_csv(kind, payload, rows, config.echo())
    return render_record(kind, payload, config.echo())


def dispatch(config: RunConfig) -> RunOutcome:
    """Run one command and render its report.

    Returns:
        RunOutcome with exit code 0, 1 or 2; errors carry a one-line message
    """
    handler = HANDLERS.get(config.command)
    if handler is None:
        return RunOutcome(1, "", f"unknown command '{config.command}'")
    try:
        rng.check_seed(config.effective_seed)
        kind, payload, rows = handler(config)
    except InfeasibleSizeError as e:
        logger.warning(f"{config.command}: {e}")
        partial = e.partial.to_dict() if e.partial is not None else None
        payload = {"error": str(e), "max_achievable": e.max_achievable, "partial": partial}
        return RunOutcome(e.exit_code, _render(config, "infeasible", payload, None), str(e))
    except ConvergenceError as e:
        logger.error(f"{config.command}: {e}")
        best = e.best.to_dict() if e.best is not None else None
        payload = {"error": str(e), "best": best}
        return RunOutcome(e.exit_code, _render(config, "not_converged", payload, None), str(e))
    except DomainError as e:
        logger.error(f"{config.command}: {e}")
        return RunOutcome(e.exit_code, "", str(e))
    except OSError as e:
        logger.error(f"{config.command}: {e}")
        return RunOutcome(1, "", f"I/O error: {e}")
    return RunOutcome(0, _render(config, kind, payload, rows))
