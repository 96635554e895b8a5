"""Random subgraphs of the windowed complete graph and threshold experiments.

A sample is an upper-triangular boolean table over the window [0, n): pair
(i, j) with i < j is an edge of X(x). Edge sources draw such tables in blocks;
the experiments count long paths, missing morphisms or large chromatic
numbers over the blocks and compare the frequencies with the capacity bounds.
"""

import logging
import math
from abc import ABC, abstractmethod
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Dict, List, Mapping, Optional, Sequence, Tuple, Union

import numpy as np

from .capacity import capacity, morphism_bound, pair_event_prob, path_threshold
from .config import settings
from .core import rng
from .core.errors import DomainError
from .core.models import (
    ChromaticReport,
    DirectedGraph,
    MorphismReport,
    SimplexDist,
    SubgraphSample,
    ThresholdReport,
)
from .graph_core import chromatic_number, forward_ranks, hom_exists, tree_depth
from .measures import AtomsModel, EventSpec, MeasureModel, event_prob

logger = logging.getLogger(__name__)

Edge = Tuple[int, int]


def _upper(n: int) -> np.ndarray:
    return np.triu(np.ones((n, n), dtype=bool), 1)


# Subgraphs of one word

def order_subgraph(word: Sequence[int]) -> SubgraphSample:
    """Edge (i, j) iff x_i > x_j. Over p symbols every path has fewer than p edges."""
    x = np.asarray(word)
    return SubgraphSample(len(x), (x[:, None] > x[None, :]) & _upper(len(x)))


def neq_subgraph(word: Sequence[int]) -> SubgraphSample:
    """Edge (i, j) iff x_i != x_j. Over p symbols there is no (p+1)-clique."""
    x = np.asarray(word)
    return SubgraphSample(len(x), (x[:, None] != x[None, :]) & _upper(len(x)))


def morphism_subgraph(word: Sequence[int], graph: DirectedGraph) -> SubgraphSample:
    """Edge (i, j) iff (x_i, x_j) is an edge of F, so the word itself maps X(x) into F."""
    x = np.asarray(word, dtype=np.int64)
    adjacency = graph.adjacency()
    return SubgraphSample(len(x), adjacency[x[:, None], x[None, :]] & _upper(len(x)))


# Edge sources

class EdgeSource(ABC):
    """Draws blocks of windowed samples, shape (count, window, window)."""

    @abstractmethod
    def sample_edges(self, window: int, count: int, generator: np.random.Generator) -> np.ndarray:
        pass

    def edge_probability(self) -> Optional[float]:
        """Exact probability of every window pair, when the source has one."""
        return None

    @abstractmethod
    def describe(self) -> str:
        pass


class IndependentEdges(EdgeSource):
    """Every pair is an edge independently with probability q."""

    def __init__(self, q: float):
        if not 0.0 <= q <= 1.0:
            raise DomainError(f"edge probability must be in [0, 1], got {q}")
        self.q = q

    def sample_edges(self, window, count, generator):
        return (generator.random((count, window, window)) < self.q) & _upper(window)

    def edge_probability(self):
        return self.q

    def describe(self):
        return f"independent(q={self.q:g})"


class WordEvents(EdgeSource):
    """Edges defined by a relation between the symbols x_i and x_j of a sampled word."""

    name = "word"

    def __init__(self, model: MeasureModel):
        self.model = model

    @abstractmethod
    def relation(self, left: np.ndarray, right: np.ndarray) -> np.ndarray:
        pass

    def sample_edges(self, window, count, generator):
        words = self.model.sample_words(count, generator, window)
        return self.relation(words[:, :, None], words[:, None, :]) & _upper(window)

    def describe(self):
        return f"{self.name}({self.model.variant.value}, alphabet={self.model.alphabet})"


class OrderEvents(WordEvents):
    name = "order"

    def relation(self, left, right):
        return left > right

    def edge_probability(self):
        if not self.model.exchangeable or self.model.window < 2:
            return None
        return event_prob(self.model, EventSpec.order(0, 1))


class NeqEvents(WordEvents):
    name = "neq"

    def relation(self, left, right):
        return left != right

    def edge_probability(self):
        if not self.model.exchangeable or self.model.window < 2:
            return None
        return event_prob(self.model, EventSpec.neq(0, 1))


class MorphismEvents(WordEvents):
    """(x_i, x_j) in E_F for a model over the vertices of F."""

    name = "morphism"

    def __init__(self, model: MeasureModel, graph: DirectedGraph):
        if model.alphabet != graph.vertex_count:
            raise DomainError(
                f"model alphabet {model.alphabet} differs from the {graph.vertex_count} vertices of F"
            )
        super().__init__(model)
        self.graph = graph
        self._adjacency = graph.adjacency()

    def relation(self, left, right):
        return self._adjacency[left, right]

    def edge_probability(self):
        if not self.model.exchangeable:
            return None
        return pair_event_prob(self.model, self.graph)


class RealsEvents(EdgeSource):
    """Uniform [0, 1] coordinates; (i, j) is an edge iff x_i > x_j + epsilon.

    Each edge has probability (1 - epsilon)^2 / 2, yet a path with
    1/epsilon or more edges would need the coordinates to drop by more than 1.
    """

    def __init__(self, epsilon: float, grid: Optional[Sequence[float]] = None):
        if not 0.0 < epsilon < 1.0:
            raise DomainError(f"epsilon must be in (0, 1), got {epsilon}")
        self.epsilon = epsilon
        self.grid = tuple(grid) if grid is not None else None

    @property
    def max_path_length(self) -> int:
        """Longest possible path: L edges need L * epsilon < 1."""
        return math.ceil(1.0 / self.epsilon) - 1

    def sample_edges(self, window, count, generator):
        if self.grid is not None and window != len(self.grid):
            raise DomainError(f"grid has {len(self.grid)} points, window is {window}")
        x = generator.random((count, window))
        return (x[:, :, None] > x[:, None, :] + self.epsilon) & _upper(window)

    def edge_probability(self):
        return (1.0 - self.epsilon) ** 2 / 2.0

    def describe(self):
        return f"reals(epsilon={self.epsilon:g})"


def reals_model(epsilon: float, grid: Sequence[float]) -> RealsEvents:
    """Edge events on a finite increasing grid of reals (one coordinate per grid point)."""
    grid = tuple(float(g) for g in grid)
    if any(b <= a for a, b in zip(grid, grid[1:])):
        raise DomainError("grid must be strictly increasing")
    return RealsEvents(epsilon, grid)


# Finitely branching hosts

@dataclass
class FinBConstruction:
    """Measure on atoms n where atom n removes every host edge colored in zone Z_n.

    Every edge survives with probability above 1 - epsilon, but a coloring
    that every long path crosses in all colors leaves no long path in any sample.
    """

    epsilon: float
    host: DirectedGraph
    colors: Dict[Edge, int]
    zones: Tuple[frozenset, ...]
    atoms: SimplexDist

    def atom_model(self) -> AtomsModel:
        return AtomsModel(len(self.zones), 1, [(p, (n,)) for n, p in enumerate(self.atoms.weights)])

    def _host_table(self) -> np.ndarray:
        table = np.zeros((self.host.vertex_count,) * 2, dtype=bool)
        for a, b in self.host.edges:
            table[a, b] = True
        return table

    def subgraph(self, atom: int) -> SubgraphSample:
        """Host edges whose color is outside Z_atom."""
        table = self._host_table()
        for (a, b), color in self.colors.items():
            if color in self.zones[atom]:
                table[a, b] = False
        return SubgraphSample(self.host.vertex_count, table)

    def sample(self, count: int, seed: int) -> Tuple[np.ndarray, np.ndarray]:
        """Draw atoms and their samples; returns (atoms, tables of shape (count, n, n))."""
        generator = rng.stream(seed, rng.SAMPLE)
        drawn = generator.choice(len(self.zones), size=count, p=self.atoms.as_array())
        tables = np.stack([self.subgraph(n).edges for n in range(len(self.zones))])
        return drawn, tables[drawn]

    def inclusion_probability(self, edge: Edge) -> float:
        color = self.colors[edge]
        return 1.0 - math.fsum(p for zone, p in zip(self.zones, self.atoms.weights) if color in zone)

    def inclusion_frequencies(self, count: int, seed: int) -> Dict[Edge, float]:
        """Empirical per-edge inclusion over count drawn atoms, without building the sample tables."""
        if count < 1:
            raise DomainError(f"count must be at least 1, got {count}")
        generator = rng.stream(seed, rng.SAMPLE)
        hits = np.zeros(len(self.zones), dtype=np.int64)
        for start in range(0, count, settings.trial_block_size):
            size = min(settings.trial_block_size, count - start)
            drawn = generator.choice(len(self.zones), size=size, p=self.atoms.as_array())
            hits += np.bincount(drawn, minlength=len(self.zones))
        removed = {
            color: int(sum(hits[n] for n, zone in enumerate(self.zones) if color in zone))
            for color in set(self.colors.values())
        }
        return {edge: 1.0 - removed[color] / count for edge, color in self.colors.items()}


def finb_model(
    epsilon: float,
    host: DirectedGraph,
    colors: Mapping[Edge, int],
    zones: Optional[Sequence[Sequence[int]]] = None,
    atoms: Optional[SimplexDist] = None,
) -> FinBConstruction:
    """Build the zone construction for a forward host (every edge a -> b has a < b).

    With no zones given, N = floor(1/epsilon) + 1 zones Z_n = {c : c mod N = n}
    get the uniform atoms 1/N < epsilon.

    Raises:
        DomainError: For epsilon outside (0, 1), overlapping zones, an atom of
            mass >= epsilon or a coloring that misses a host edge
    """
    if not 0.0 < epsilon < 1.0:
        raise DomainError(f"epsilon must be in (0, 1), got {epsilon}")
    if any(a >= b for a, b in host.edges):
        raise DomainError("the host must be forward: every edge a -> b needs a < b")
    colors = {(int(a), int(b)): int(c) for (a, b), c in colors.items()}
    missing = host.edges - colors.keys()
    if missing:
        raise DomainError(f"edges without a color: {sorted(missing)[:5]}")

    if zones is None:
        count = math.floor(1.0 / epsilon) + 1
        palette = sorted(set(colors.values()))
        zone_sets = tuple(frozenset(c for c in palette if c % count == n) for n in range(count))
    else:
        zone_sets = tuple(frozenset(z) for z in zones)
        seen: set = set()
        for zone in zone_sets:
            if seen & zone:
                raise DomainError(f"zones overlap on colors {sorted(seen & zone)}")
            seen |= zone
    if not zone_sets:
        raise DomainError("at least one zone is needed")

    atoms = atoms or SimplexDist.uniform(len(zone_sets))
    if atoms.dimension != len(zone_sets):
        raise DomainError(f"{atoms.dimension} atoms for {len(zone_sets)} zones")
    heaviest = max(atoms.weights)
    if heaviest >= epsilon:
        raise DomainError(f"every atom must weigh less than epsilon={epsilon}, found {heaviest}")
    return FinBConstruction(epsilon, host, colors, zone_sets, atoms)


def depth_coloring(tree: DirectedGraph) -> Dict[Edge, int]:
    """Color each tree edge by the depth of its upper endpoint."""
    return {(a, b): tree_depth(a) for a, b in tree.edges}


def has_root_to_leaf_path(tables: np.ndarray, depth: int) -> np.ndarray:
    """Per sample of a depth-D heap-numbered tree: does a path from the root reach depth D?"""
    return forward_ranks(tables)[:, 0] >= depth


# Experiments

@dataclass
class PathExperiment:
    """Report plus the per-trial longest paths and the per-pair edge frequencies."""

    report: ThresholdReport
    longest_paths: np.ndarray
    edge_frequencies: np.ndarray

    def trial_rows(self) -> List[dict]:
        p = self.report.target_length
        return [
            {"trial": t, "longest_path": int(length), "has_path_ge_p": bool(length >= p)}
            for t, length in enumerate(self.longest_paths)
        ]


def _as_source(source: Union[EdgeSource, MeasureModel]) -> EdgeSource:
    if isinstance(source, MeasureModel):
        return OrderEvents(source)
    return source


def _check_trials(trials: int, window: int) -> None:
    if trials < 1:
        raise DomainError(f"trials must be at least 1, got {trials}")
    if window < 1:
        raise DomainError(f"window must be at least 1, got {window}")


def _run_blocks(
    source: EdgeSource,
    window: int,
    trials: int,
    seed: int,
    reduce_block: Callable[[np.ndarray], np.ndarray],
    workers: Optional[int] = None,
) -> Tuple[np.ndarray, np.ndarray]:
    """Sample in blocks of settings.trial_block_size, block b from stream (seed, TRIALS, b).

    Returns the concatenated per-trial values of reduce_block and the total edge counts.
    Results do not depend on the number of workers.
    """
    rng.check_seed(seed)
    block_size = settings.trial_block_size
    counts = [min(block_size, trials - start) for start in range(0, trials, block_size)]

    def run(block: int) -> Tuple[np.ndarray, np.ndarray]:
        edges = source.sample_edges(window, counts[block], rng.stream(seed, rng.TRIALS, block))
        return reduce_block(edges), edges.sum(axis=0)

    workers = workers or settings.workers
    if workers > 1 and len(counts) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(run, range(len(counts))))
    else:
        results = [run(block) for block in range(len(counts))]
    values = np.concatenate([r[0] for r in results])
    edge_counts = np.sum([r[1] for r in results], axis=0)
    return values, edge_counts


def _min_edge_frequency(edge_counts: np.ndarray, trials: int) -> float:
    window = edge_counts.shape[0]
    if window < 2:
        return 0.0
    return float((edge_counts[np.triu_indices(window, 1)] / trials).min())


def _stderr(probability: float, trials: int) -> float:
    return math.sqrt(probability * (1.0 - probability) / trials)


def run_path_experiment(
    source: Union[EdgeSource, MeasureModel],
    p: int,
    window: Optional[int] = None,
    trials: int = 1000,
    seed: Optional[int] = None,
    workers: Optional[int] = None,
) -> PathExperiment:
    """Monte Carlo estimate of mu(P), P = {a path with at least p edges}.

    Measure models are turned into order events x_i > x_j. The bound
    (lambda - lambda_p) / (1 - lambda_p) takes lambda as the smallest
    empirical edge frequency over the window, clamped at 0.

    Raises:
        DomainError: If trials < 1, p < 1 or window < p + 1
    """
    source = _as_source(source)
    lambda_p = path_threshold(p)
    window = window or 4 * p
    seed = settings.default_seed if seed is None else seed
    _check_trials(trials, window)
    if window < p + 1:
        raise DomainError(f"a path of length {p} needs a window of at least {p + 1}, got {window}")

    def longest(edges: np.ndarray) -> np.ndarray:
        return forward_ranks(edges).max(axis=1)

    longest_paths, edge_counts = _run_blocks(source, window, trials, seed, longest, workers)
    min_edge = _min_edge_frequency(edge_counts, trials)
    probability = float(np.mean(longest_paths >= p))
    report = ThresholdReport(
        source=source.describe(),
        target_length=p,
        lambda_p=lambda_p,
        min_edge_probability=min_edge,
        path_probability=probability,
        bound=max(0.0, (min_edge - lambda_p) / (1.0 - lambda_p)),
        stderr=_stderr(probability, trials),
        trials=trials,
        seed=seed,
        window=window,
        exact_edge_probability=source.edge_probability(),
    )
    logger.info(
        f"path experiment {report.source}: p={p} window={window} trials={trials} "
        f"mu(P)={probability:.6f} bound={report.bound:.6f}"
    )
    return PathExperiment(report, longest_paths, edge_counts / trials)


def estimate_path_probability(
    source: Union[EdgeSource, MeasureModel],
    p: int,
    window: Optional[int] = None,
    trials: int = 1000,
    seed: Optional[int] = None,
) -> ThresholdReport:
    return run_path_experiment(source, p, window, trials, seed).report


def path_probabilities(longest_paths: np.ndarray, max_length: int) -> np.ndarray:
    """Fraction of samples with a path of at least p edges, for p = 1..max_length."""
    lengths = np.asarray(longest_paths)
    return np.array([float(np.mean(lengths >= p)) for p in range(1, max_length + 1)])


def verify_finpath_bound(report: ThresholdReport, sigmas: Optional[float] = None) -> bool:
    """mu(P) + sigmas * stderr >= bound."""
    sigmas = settings.report_sigmas if sigmas is None else sigmas
    return report.path_probability + sigmas * report.stderr >= report.bound


def estimate_morphism_probability(
    source: Union[EdgeSource, MeasureModel],
    target: DirectedGraph,
    window: int,
    trials: int = 200,
    seed: Optional[int] = None,
) -> MorphismReport:
    """Fraction of samples X(x) with no morphism into F, against (lambda - c(F)) / (1 - c(F)).

    Raises:
        DomainError: If F has no vertices or trials/window are invalid
    """
    source = _as_source(source)
    seed = settings.default_seed if seed is None else seed
    _check_trials(trials, window)
    target_capacity = capacity(target).value
    cache: Dict[bytes, bool] = {}

    def no_morphism(edges: np.ndarray) -> np.ndarray:
        flags = np.empty(len(edges), dtype=bool)
        for t, table in enumerate(edges):
            key = np.packbits(table).tobytes()
            if key not in cache:
                cache[key] = hom_exists(DirectedGraph.from_adjacency(table), target) is None
            flags[t] = cache[key]
        return flags

    flags, edge_counts = _run_blocks(source, window, trials, seed, no_morphism, workers=1)
    min_edge = _min_edge_frequency(edge_counts, trials)
    probability = float(np.mean(flags))
    bound = morphism_bound(min_edge, target_capacity) if target_capacity < 1.0 else 0.0
    logger.info(
        f"morphism experiment {source.describe()}: c(F)={target_capacity:.6f} "
        f"no-morphism={probability:.6f} bound={bound:.6f} ({len(cache)} distinct samples)"
    )
    return MorphismReport(
        source=source.describe(),
        target=target,
        capacity=target_capacity,
        min_edge_probability=min_edge,
        no_morphism_probability=probability,
        bound=bound,
        stderr=_stderr(probability, trials),
        trials=trials,
        seed=seed,
        window=window,
    )


def estimate_chromatic_distribution(
    q: float,
    colors: int,
    window: int,
    trials: int = 200,
    seed: Optional[int] = None,
) -> ChromaticReport:
    """Distribution of the chromatic number of independent-edge samples."""
    if colors < 1:
        raise DomainError(f"colors must be at least 1, got {colors}")
    seed = settings.default_seed if seed is None else seed
    _check_trials(trials, window)

    def chromatic(edges: np.ndarray) -> np.ndarray:
        return np.array([chromatic_number(DirectedGraph.from_adjacency(t)) for t in edges], dtype=np.int64)

    values, _ = _run_blocks(IndependentEdges(q), window, trials, seed, chromatic, workers=1)
    chi, counts = np.unique(values, return_counts=True)
    report = ChromaticReport(q, colors, window, trials, seed, dict(zip(chi.tolist(), counts.tolist())))
    logger.info(f"chromatic experiment q={q:g} window={window}: {report.distribution}")
    return report
