"""Capacity of a finite directed graph.

The capacity of F is the supremum over the vertex simplex of
sum_{(a,b) in E_F} lambda_a * lambda_b. It is the edge-probability threshold
above which a random subgraph of the complete graph on N can no longer be
guaranteed to map into F.
"""

import logging
import math
from dataclasses import dataclass, replace
from functools import lru_cache
from itertools import combinations, islice
from typing import List, Optional, Tuple

import numpy as np

from .config import settings
from .core import rng
from .core.enums import CapacityMethod, MethodChoice
from .core.errors import ConvergenceError, DomainError
from .core.models import CapacityResult, DirectedGraph, SimplexDist
from .graph_core import (
    all_cliques,
    clique_number,
    is_antisymmetric,
    is_clique,
    is_irreflexive,
    is_symmetric,
    max_clique,
    maximal_cliques,
)
from .measures import BernoulliModel

logger = logging.getLogger(__name__)

# Limit of the path threshold 1/2 (1 - 1/p) as p grows
INFINITE_PATH_THRESHOLD = 0.5

# A later restart replaces the incumbent only when it is better by more than this
_IMPROVEMENT_MARGIN = 1e-13
# Weights below this are treated as zero when reading off a clique certificate
_SUPPORT_TOLERANCE = 1e-9
_LATTICE_CHUNK = 200_000


@dataclass(frozen=True)
class OptimizerConfig:
    """Knobs of the numeric and lattice capacity methods."""

    restarts: int = settings.restarts
    max_iterations: int = settings.max_iterations
    tolerance: float = settings.ascent_tolerance
    seed: int = settings.default_seed
    grid_steps: int = settings.grid_steps

    @classmethod
    def from_settings(cls, **overrides) -> "OptimizerConfig":
        """Defaults read from the live settings object, with per-call overrides."""
        base = cls(
            restarts=settings.restarts,
            max_iterations=settings.max_iterations,
            tolerance=settings.ascent_tolerance,
            seed=settings.default_seed,
            grid_steps=settings.grid_steps,
        )
        return replace(base, **{k: v for k, v in overrides.items() if v is not None})


def path_threshold(p: int) -> float:
    """Edge probability 1/2 (1 - 1/p) below which paths of length p can be avoided."""
    if p < 1:
        raise DomainError(f"path length must be at least 1, got {p}")
    return 0.5 * (1.0 - 1.0 / p)


def morphism_bound(edge_probability: float, capacity_value: float) -> float:
    """Lower bound (lambda - c) / (1 - c) on the probability of no morphism into F."""
    if capacity_value >= 1.0:
        raise DomainError("the bound is undefined for capacity 1")
    return max(0.0, (edge_probability - capacity_value) / (1.0 - capacity_value))


def edge_quadratic_form(graph: DirectedGraph, weights: SimplexDist) -> float:
    """Sum of lambda_a * lambda_b over the directed edges (loops give lambda_a^2).

    Raises:
        DomainError: If the dimension of weights differs from vertex_count
    """
    if weights.dimension != graph.vertex_count:
        raise DomainError(
            f"simplex point has {weights.dimension} coordinates, graph has {graph.vertex_count} vertices"
        )
    w = weights.weights
    return math.fsum(w[a] * w[b] for a, b in graph.edges)


def _require_vertices(graph: DirectedGraph) -> None:
    if graph.vertex_count == 0:
        raise DomainError("capacity needs at least one vertex")


def capacity_closed_form(graph: DirectedGraph) -> Optional[float]:
    """1 with a loop, 1 - 1/cl if symmetric, 1/2 (1 - 1/cl) if antisymmetric, else None."""
    if graph.vertex_count == 0:
        return None
    if graph.has_loop():
        return 1.0
    if is_symmetric(graph):
        return 1.0 - 1.0 / clique_number(graph)
    if is_antisymmetric(graph):
        return 0.5 * (1.0 - 1.0 / clique_number(graph))
    return None


def _closed_form_result(graph: DirectedGraph) -> Optional[CapacityResult]:
    value = capacity_closed_form(graph)
    if value is None:
        return None
    n = graph.vertex_count
    if graph.has_loop():
        vertex = graph.loops()[0]
        return CapacityResult(value, SimplexDist.point_mass(n, vertex), CapacityMethod.CLOSED_FORM, (vertex,))
    clique = max_clique(graph)
    return CapacityResult(value, SimplexDist.uniform_on(n, clique), CapacityMethod.CLOSED_FORM, clique)


def _certificate(graph: DirectedGraph, point: SimplexDist) -> Optional[Tuple[int, ...]]:
    """Support of the point when it is (numerically) uniform on a clique."""
    support = point.support(_SUPPORT_TOLERANCE)
    if not support:
        return None
    level = 1.0 / len(support)
    if any(abs(point.weights[v] - level) > _SUPPORT_TOLERANCE for v in support):
        return None
    if len(support) == 1 or is_clique(graph, support):
        return support
    return None


def _pair_matrix(graph: DirectedGraph) -> np.ndarray:
    """Symmetrized edge counts: m_ab = [a->b] + [b->a], so loops weigh 2."""
    adjacency = graph.adjacency().astype(float)
    return adjacency + adjacency.T


def _forms(points: np.ndarray, matrix: np.ndarray) -> np.ndarray:
    return np.einsum("ri,ri->r", points @ matrix, points)


def _seed_points(graph: DirectedGraph, active: np.ndarray, config: OptimizerConfig) -> np.ndarray:
    """Starting points: loop point masses, uniform on maximal cliques, then Dirichlet draws."""
    n = graph.vertex_count
    active_vertices = np.flatnonzero(active).tolist()
    seeds: List[np.ndarray] = []
    for vertex in graph.loops():
        point = np.zeros(n)
        point[vertex] = 1.0
        seeds.append(point)
    for clique in maximal_cliques(graph, active_vertices):
        point = np.zeros(n)
        point[list(clique)] = 1.0 / len(clique)
        seeds.append(point)
    for restart in range(config.restarts):
        generator = rng.stream(config.seed, rng.RESTARTS, restart)
        point = np.zeros(n)
        point[active_vertices] = generator.dirichlet(np.ones(len(active_vertices)))
        seeds.append(point)
    return np.vstack(seeds)


def capacity_numeric(graph: DirectedGraph, config: Optional[OptimizerConfig] = None) -> CapacityResult:
    """Multi-start replicator ascent on the simplex.

    All restarts advance together as rows of one matrix. Each row applies
    lambda_a <- lambda_a (M lambda)_a / (lambda^T M lambda) until its
    improvement drops below the tolerance or the iteration cap is reached.
    The reported value is attained by the returned maximizer, so it is a
    lower bound on the capacity.

    Raises:
        DomainError: If the graph has no vertices
        ConvergenceError: If no restart converged; carries the best point found
    """
    _require_vertices(graph)
    config = config or OptimizerConfig.from_settings()
    n = graph.vertex_count
    matrix = _pair_matrix(graph)
    # Rows of zeros belong to isolated loop-free vertices; their mass goes to the rest
    active = matrix.any(axis=1)
    if not active.any():
        point = SimplexDist.point_mass(n, 0)
        return CapacityResult(0.0, point, CapacityMethod.NUMERIC, (0,), lower_bound=True, converged_restarts=0)

    points = _seed_points(graph, active, config)
    points[:, ~active] = 0.0
    points /= points.sum(axis=1, keepdims=True)
    values = _forms(points, matrix)
    running = np.ones(len(points), dtype=bool)
    converged = np.zeros(len(points), dtype=bool)

    for _ in range(config.max_iterations):
        rows = np.flatnonzero(running)
        if rows.size == 0:
            break
        current = points[rows]
        current_values = values[rows]
        gradient = current @ matrix
        positive = current_values > 0
        updated = current.copy()
        updated[positive] = current[positive] * gradient[positive] / current_values[positive, None]
        updated_values = _forms(updated, matrix)
        points[rows] = updated
        values[rows] = updated_values
        settled = ~positive | (updated_values - current_values < config.tolerance)
        converged[rows[settled]] = True
        running[rows[settled]] = False

    if running.any():
        logger.debug(f"{int(running.sum())} restarts hit the {config.max_iterations}-iteration cap")

    best_row = int(np.flatnonzero(values >= values.max() - _IMPROVEMENT_MARGIN)[0])
    maximizer = SimplexDist.from_array(points[best_row])
    result = CapacityResult(
        value=edge_quadratic_form(graph, maximizer),
        maximizer=maximizer,
        method=CapacityMethod.NUMERIC,
        certificate=_certificate(graph, maximizer),
        lower_bound=True,
        converged_restarts=int(converged.sum()),
    )
    if not converged.any():
        raise ConvergenceError(
            f"no restart converged within {config.max_iterations} iterations", best=result
        )
    logger.info(
        f"numeric capacity {result.value:.12g} on {n} vertices "
        f"({result.converged_restarts}/{len(points)} restarts converged)"
    )
    return result


@lru_cache(maxsize=32)
def _small_lattice(dimension: int, steps: int) -> np.ndarray:
    return np.vstack(list(_lattice_chunks(dimension, steps, chunk=None)))


def _lattice_chunks(dimension: int, steps: int, chunk: Optional[int] = _LATTICE_CHUNK):
    """Points {k / steps} of the simplex, by stars and bars, in chunks."""
    bars = combinations(range(steps + dimension - 1), dimension - 1)
    while True:
        block = list(islice(bars, chunk)) if chunk else list(bars)
        if not block:
            return
        cuts = np.asarray(block, dtype=np.int64).reshape(len(block), dimension - 1)
        edges = np.hstack([
            np.full((len(block), 1), -1, dtype=np.int64),
            cuts,
            np.full((len(block), 1), steps + dimension - 1, dtype=np.int64),
        ])
        yield np.diff(edges, axis=1) - 1
        if not chunk:
            return


def capacity_support_enum(graph: DirectedGraph, grid_steps: Optional[int] = None) -> CapacityResult:
    """Brute-force oracle: the simplex lattice plus the uniform point on every clique.

    Raises:
        DomainError: If the graph has no vertices or more than the oracle limit
    """
    _require_vertices(graph)
    steps = grid_steps or settings.grid_steps
    n = graph.vertex_count
    if n > settings.support_enum_max_vertices:
        raise DomainError(
            f"support enumeration is limited to {settings.support_enum_max_vertices} vertices, got {n}"
        )

    best_value = -1.0
    best_point: Optional[SimplexDist] = None
    certificate: Optional[Tuple[int, ...]] = None
    for clique in all_cliques(graph):
        point = SimplexDist.uniform_on(n, clique)
        value = edge_quadratic_form(graph, point)
        if value > best_value:
            best_value, best_point, certificate = value, point, clique

    adjacency = graph.adjacency().astype(float)
    chunks = [_small_lattice(n, steps)] if n <= 4 else _lattice_chunks(n, steps)
    for counts in chunks:
        lattice = counts / steps
        values = np.einsum("ri,ri->r", lattice @ adjacency, lattice)
        row = int(np.argmax(values))
        if values[row] > best_value + _IMPROVEMENT_MARGIN:
            best_point = SimplexDist.from_array(lattice[row])
            best_value = edge_quadratic_form(graph, best_point)
            certificate = _certificate(graph, best_point)

    return CapacityResult(best_value, best_point, CapacityMethod.SUPPORT_ENUM, certificate)


def capacity(
    graph: DirectedGraph,
    method: MethodChoice = MethodChoice.AUTO,
    config: Optional[OptimizerConfig] = None,
) -> CapacityResult:
    """Capacity by the requested method; AUTO prefers the closed form.

    Raises:
        DomainError: If CLOSED is requested for a graph without a closed form
    """
    _require_vertices(graph)
    config = config or OptimizerConfig.from_settings()
    if method in (MethodChoice.AUTO, MethodChoice.CLOSED):
        result = _closed_form_result(graph)
        if result is not None:
            return result
        if method is MethodChoice.CLOSED:
            raise DomainError("graph is neither looped, symmetric nor antisymmetric: no closed form")
    if method is MethodChoice.ENUM:
        return capacity_support_enum(graph, config.grid_steps)
    return capacity_numeric(graph, config)


def relative_capacity_nn(graph: DirectedGraph) -> float:
    """Threshold for random subgraphs of the complete graph on N to avoid maps into F.

    For a finite target it equals the capacity of F.
    """
    return capacity(graph).value


def kkt_residual(graph: DirectedGraph, weights: SimplexDist) -> float:
    """Max over the support of |sum_{b:(a,b) in E} lambda_b - value(lambda)|.

    Raises:
        DomainError: If the graph is not symmetric and irreflexive
    """
    if not (is_symmetric(graph) and is_irreflexive(graph)):
        raise DomainError("the stationarity check needs a symmetric irreflexive graph")
    value = edge_quadratic_form(graph, weights)
    out_nb = graph.out_neighbors()
    w = weights.weights
    return max(
        (abs(math.fsum(w[b] for b in out_nb[a]) - value) for a in weights.support()),
        default=0.0,
    )


def pair_event_prob(model, graph: DirectedGraph) -> float:
    """Exact probability that (x_0, x_1) is an edge of F under an exchangeable model.

    For a mixture sum_k w_k B_{lambda^(k)} over the vertex alphabet of F this is
    sum_k w_k Q_F(lambda^(k)), never above the capacity of F.
    """
    if not model.exchangeable:
        raise DomainError("pair_event_prob needs a Bernoulli or mixture model")
    if model.alphabet != graph.vertex_count:
        raise DomainError(
            f"model alphabet {model.alphabet} differs from the {graph.vertex_count} vertices of F"
        )
    return math.fsum(
        weight * edge_quadratic_form(graph, component) for weight, component in model.components
    )


def extremal_model(graph: DirectedGraph, window: int, config: Optional[OptimizerConfig] = None):
    """Bernoulli law at a capacity maximizer.

    Its words always map into F (the word itself is the morphism) while every
    window pair is an edge with probability exactly the capacity.
    """
    result = capacity(graph, config=config)
    return BernoulliModel(result.maximizer, window)

