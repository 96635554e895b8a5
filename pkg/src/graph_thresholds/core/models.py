"""Data models for graphs, simplex points and experiment results."""

import math
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np

from .enums import CYCLE, CapacityMethod, PathMarker
from .errors import DomainError

Edge = Tuple[int, int]
RankValue = Union[int, PathMarker]

SIMPLEX_TOLERANCE = 1e-12
# Slack for floating-point triangle inequalities in certificates
CERTIFICATE_TOLERANCE = 1e-9


@dataclass(frozen=True)
class DirectedGraph:
    """Finite directed graph on vertices 0..vertex_count-1. Loops are allowed."""

    vertex_count: int
    edges: FrozenSet[Edge] = frozenset()

    def __post_init__(self):
        if self.vertex_count < 0:
            raise DomainError(f"vertex_count must be nonnegative, got {self.vertex_count}")
        edges = frozenset((int(a), int(b)) for a, b in self.edges)
        for a, b in edges:
            if not (0 <= a < self.vertex_count and 0 <= b < self.vertex_count):
                raise DomainError(
                    f"edge ({a}, {b}) has an endpoint outside 0..{self.vertex_count - 1}"
                )
        object.__setattr__(self, "edges", edges)

    @classmethod
    def from_edges(cls, vertex_count: int, edges: Iterable[Sequence[int]]) -> "DirectedGraph":
        return cls(vertex_count, frozenset((int(a), int(b)) for a, b in edges))

    @classmethod
    def from_adjacency(cls, adjacency: np.ndarray) -> "DirectedGraph":
        """Build from a square boolean matrix (entry [a, b] means edge a -> b)."""
        adjacency = np.asarray(adjacency, dtype=bool)
        rows, cols = np.nonzero(adjacency)
        return cls(adjacency.shape[0], frozenset(zip(rows.tolist(), cols.tolist())))

    @property
    def edge_count(self) -> int:
        return len(self.edges)

    def sorted_edges(self) -> List[Edge]:
        return sorted(self.edges)

    def out_neighbors(self) -> List[List[int]]:
        out: List[List[int]] = [[] for _ in range(self.vertex_count)]
        for a, b in self.sorted_edges():
            out[a].append(b)
        return out

    def in_neighbors(self) -> List[List[int]]:
        inn: List[List[int]] = [[] for _ in range(self.vertex_count)]
        for a, b in self.sorted_edges():
            inn[b].append(a)
        return inn

    def loops(self) -> List[int]:
        return sorted(a for a, b in self.edges if a == b)

    def has_loop(self) -> bool:
        return any(a == b for a, b in self.edges)

    def adjacency(self) -> np.ndarray:
        matrix = np.zeros((self.vertex_count, self.vertex_count), dtype=bool)
        for a, b in self.edges:
            matrix[a, b] = True
        return matrix

    def to_dict(self) -> dict:
        """Convert to dictionary for record serialization."""
        return {
            "vertex_count": self.vertex_count,
            "edges": [list(e) for e in self.sorted_edges()],
        }


@dataclass(frozen=True)
class RankVector:
    """Per-vertex longest-path rank; CYCLE where a cycle is reachable."""

    ranks: Tuple[RankValue, ...]

    def __getitem__(self, vertex: int) -> RankValue:
        return self.ranks[vertex]

    def __len__(self) -> int:
        return len(self.ranks)

    @property
    def is_finite(self) -> bool:
        return all(r is not CYCLE for r in self.ranks)

    def to_dict(self) -> dict:
        return {"ranks": [r.value if r is CYCLE else r for r in self.ranks]}


@dataclass(frozen=True)
class HomWitness:
    """A graph morphism, given as the image of every source vertex."""

    assignment: Tuple[int, ...]

    def to_dict(self) -> dict:
        return {"assignment": list(self.assignment)}


@dataclass(frozen=True)
class SimplexDist:
    """Probability vector over vertices or symbols."""

    weights: Tuple[float, ...]

    def __post_init__(self):
        weights = tuple(float(w) for w in self.weights)
        if not weights:
            raise DomainError("a simplex point needs at least one coordinate")
        if any(w < 0 or math.isnan(w) for w in weights):
            raise DomainError(f"weights must be nonnegative, got {weights}")
        total = math.fsum(weights)
        if abs(total - 1.0) > SIMPLEX_TOLERANCE:
            raise DomainError(f"weights must sum to 1 (got {total!r})")
        object.__setattr__(self, "weights", weights)

    @classmethod
    def uniform(cls, size: int) -> "SimplexDist":
        return cls.uniform_on(size, range(size))

    @classmethod
    def uniform_on(cls, size: int, support: Iterable[int]) -> "SimplexDist":
        support = sorted(set(support))
        if not support:
            raise DomainError("uniform distribution needs a nonempty support")
        weights = [0.0] * size
        for v in support:
            weights[v] = 1.0 / len(support)
        # 1/3 * 3 and friends may miss 1 by an ulp; fold the residue into the first entry
        weights[support[0]] += 1.0 - math.fsum(weights)
        return cls(tuple(weights))

    @classmethod
    def point_mass(cls, size: int, index: int) -> "SimplexDist":
        weights = [0.0] * size
        weights[index] = 1.0
        return cls(tuple(weights))

    @classmethod
    def from_array(cls, values: Sequence[float]) -> "SimplexDist":
        """Clip tiny negatives and renormalize a numerically computed point."""
        array = np.clip(np.asarray(values, dtype=float), 0.0, None)
        total = array.sum()
        if total <= 0:
            raise DomainError("cannot normalize a zero vector onto the simplex")
        array = array / total
        weights = array.tolist()
        weights[int(np.argmax(array))] += 1.0 - math.fsum(weights)
        return cls(tuple(weights))

    @property
    def dimension(self) -> int:
        return len(self.weights)

    def support(self, tolerance: float = 0.0) -> Tuple[int, ...]:
        return tuple(i for i, w in enumerate(self.weights) if w > tolerance)

    def as_array(self) -> np.ndarray:
        return np.asarray(self.weights, dtype=float)

    def to_dict(self) -> dict:
        return {"weights": list(self.weights)}


@dataclass(frozen=True)
class CapacityResult:
    """Capacity value with its maximizer and provenance."""

    value: float
    maximizer: SimplexDist
    method: CapacityMethod
    certificate: Optional[Tuple[int, ...]] = None
    lower_bound: bool = False
    converged_restarts: Optional[int] = None

    def to_dict(self) -> dict:
        return {
            "value": self.value,
            "method": self.method.value,
            "lower_bound": self.lower_bound,
            "maximizer": list(self.maximizer.weights),
            "certificate": list(self.certificate) if self.certificate is not None else None,
            "converged_restarts": self.converged_restarts,
        }


@dataclass(eq=False)
class SubgraphSample:
    """One realization X(x): a set of window pairs (i, j) with i < j."""

    window: int
    edges: np.ndarray  # (window, window) bool, strictly upper-triangular

    def __post_init__(self):
        self.edges = np.asarray(self.edges, dtype=bool)
        if self.edges.shape != (self.window, self.window):
            raise DomainError(f"edge table must be {self.window}x{self.window}")
        if np.any(np.tril(self.edges)):
            raise DomainError("a windowed sample only holds pairs (i, j) with i < j")

    @property
    def edge_count(self) -> int:
        return int(self.edges.sum())

    def edge_list(self) -> List[Edge]:
        rows, cols = np.nonzero(self.edges)
        return list(zip(rows.tolist(), cols.tolist()))

    def to_graph(self) -> DirectedGraph:
        return DirectedGraph.from_adjacency(self.edges)

    def to_dict(self) -> dict:
        return {"window": self.window, "edges": [list(e) for e in self.edge_list()]}


@dataclass
class ThresholdReport:
    """Outcome of a path-threshold Monte Carlo experiment."""

    source: str
    target_length: int
    lambda_p: float
    min_edge_probability: float
    path_probability: float
    bound: float
    stderr: float
    trials: int
    seed: int
    window: int
    exact_edge_probability: Optional[float] = None

    def to_dict(self) -> dict:
        return {
            "source": self.source,
            "target_length": self.target_length,
            "lambda_p": self.lambda_p,
            "min_edge_probability": self.min_edge_probability,
            "exact_edge_probability": self.exact_edge_probability,
            "path_probability": self.path_probability,
            "bound": self.bound,
            "stderr": self.stderr,
            "trials": self.trials,
            "seed": self.seed,
            "window": self.window,
        }


@dataclass
class MorphismReport:
    """Fraction of samples admitting no morphism into a target graph."""

    source: str
    target: DirectedGraph
    capacity: float
    min_edge_probability: float
    no_morphism_probability: float
    bound: float
    stderr: float
    trials: int
    seed: int
    window: int

    def to_dict(self) -> dict:
        return {
            "source": self.source,
            "target": self.target.to_dict(),
            "capacity": self.capacity,
            "min_edge_probability": self.min_edge_probability,
            "no_morphism_probability": self.no_morphism_probability,
            "bound": self.bound,
            "stderr": self.stderr,
            "trials": self.trials,
            "seed": self.seed,
            "window": self.window,
        }


@dataclass
class ChromaticReport:
    """Distribution of the chromatic number over independent-edge samples."""

    edge_probability: float
    colors: int
    window: int
    trials: int
    seed: int
    distribution: Dict[int, int] = field(default_factory=dict)

    @property
    def at_least_fraction(self) -> float:
        """Fraction of samples with chromatic number >= colors."""
        return sum(c for chi, c in self.distribution.items() if chi >= self.colors) / self.trials

    @property
    def above_fraction(self) -> float:
        """Fraction of samples with no morphism into K_colors."""
        return sum(c for chi, c in self.distribution.items() if chi > self.colors) / self.trials

    def to_dict(self) -> dict:
        return {
            "edge_probability": self.edge_probability,
            "colors": self.colors,
            "window": self.window,
            "trials": self.trials,
            "seed": self.seed,
            "distribution": {int(k): int(v) for k, v in sorted(self.distribution.items())},
            "at_least_fraction": self.at_least_fraction,
            "above_fraction": self.above_fraction,
        }


@dataclass(frozen=True)
class DeepPoint:
    """A point lying in many of a family of sets."""

    point: int
    hits: int
    set_count: int
    min_measure: float

    def to_dict(self) -> dict:
        return {
            "point": self.point,
            "hits": self.hits,
            "set_count": self.set_count,
            "min_measure": self.min_measure,
        }


def _prefix_key(prefix: Tuple[int, ...]) -> str:
    return ",".join(str(i) for i in prefix)


@dataclass
class ExtractionResult:
    """Finite index set J with prefix limits and its certified oscillation."""

    J: Tuple[int, ...]
    prefix_limits: Dict[Tuple[int, ...], int]
    oscillation: float
    epsilon: float
    arity: int

    @property
    def size(self) -> int:
        return len(self.J)

    def position(self, index: int) -> int:
        return self.J.index(index)

    def to_dict(self) -> dict:
        return {
            "arity": self.arity,
            "epsilon": self.epsilon,
            "size": self.size,
            "J": list(self.J),
            "oscillation": self.oscillation,
            "prefix_limits": {
                _prefix_key(p): v for p, v in sorted(self.prefix_limits.items(), key=lambda kv: (len(kv[0]), kv[0]))
            },
        }


@dataclass
class IntersectionResult:
    """J from an L1 extraction and the exact measure of the intersection over [J]^k."""

    J: Tuple[int, ...]
    achieved_measure: float
    bound: float
    extraction: ExtractionResult

    @property
    def bound_holds(self) -> bool:
        return self.achieved_measure >= self.bound - SIMPLEX_TOLERANCE

    def to_dict(self) -> dict:
        return {
            "J": list(self.J),
            "achieved_measure": self.achieved_measure,
            "bound": self.bound,
            "bound_holds": self.bound_holds,
            "oscillation": self.extraction.oscillation,
        }


@dataclass
class LipschitzResult:
    """Increasing reindexing with its exhaustive 1-Lipschitz certificate."""

    sigma: Tuple[int, ...]
    pairs_checked: int
    max_excess: float
    extraction: ExtractionResult

    @property
    def passed(self) -> bool:
        return self.max_excess <= CERTIFICATE_TOLERANCE

    def to_dict(self) -> dict:
        return {
            "sigma": list(self.sigma),
            "pairs_checked": self.pairs_checked,
            "max_excess": self.max_excess,
            "passed": self.passed,
        }
