"""Core types: enums, errors, models and random streams."""

from .enums import (
    CYCLE,
    CapacityMethod,
    EventKind,
    InvarianceKind,
    MethodChoice,
    ModelVariant,
    OutputFormat,
    PathMarker,
)
from .errors import (
    ConvergenceError,
    DomainError,
    GraphThresholdsError,
    InfeasibleSizeError,
    RecordError,
)
from .models import (
    CapacityResult,
    DirectedGraph,
    HomWitness,
    RankVector,
    SimplexDist,
)

__all__ = [
    "CYCLE",
    "CapacityMethod",
    "CapacityResult",
    "ConvergenceError",
    "DirectedGraph",
    "DomainError",
    "EventKind",
    "GraphThresholdsError",
    "HomWitness",
    "InfeasibleSizeError",
    "InvarianceKind",
    "MethodChoice",
    "ModelVariant",
    "OutputFormat",
    "PathMarker",
    "RankVector",
    "RecordError",
    "SimplexDist",
]
