"""Structural queries on finite directed graphs.

Cliques are taken in the undirected sense: a set S is a clique when every
pair of distinct vertices in S is joined in at least one direction. Loops do
not count towards cliques. All searches are exact and aimed at desk-scale
graphs (about 20 vertices for cliques, 12 for the chromatic number).
"""

import logging
from collections import deque
from typing import Iterator, List, Optional, Sequence, Tuple, Union

import numpy as np

from .config import settings
from .core.enums import CYCLE, PathMarker
from .core.errors import DomainError
from .core.models import DirectedGraph, HomWitness, RankVector

logger = logging.getLogger(__name__)


# Constructors

def complete_graph(p: int) -> DirectedGraph:
    """K_p: both directions between every pair of distinct vertices."""
    return DirectedGraph.from_edges(p, ((a, b) for a in range(p) for b in range(p) if a != b))


def transitive_tournament(p: int) -> DirectedGraph:
    """T_p: edges (i, j) for i < j."""
    return DirectedGraph.from_edges(p, ((a, b) for a in range(p) for b in range(a + 1, p)))


def directed_cycle(n: int) -> DirectedGraph:
    return DirectedGraph.from_edges(n, ((i, (i + 1) % n) for i in range(n)))


def symmetric_cycle(n: int) -> DirectedGraph:
    return symmetric_closure(directed_cycle(n))


def symmetric_path(n: int) -> DirectedGraph:
    """Path 0-1-...-(n-1) with both directions on every edge."""
    return symmetric_closure(DirectedGraph.from_edges(n, ((i, i + 1) for i in range(n - 1))))


def edgeless_graph(n: int) -> DirectedGraph:
    return DirectedGraph(n)


def loop_graph() -> DirectedGraph:
    """One vertex carrying a loop; every graph maps to it."""
    return DirectedGraph.from_edges(1, [(0, 0)])


def binary_tree(depth: int) -> DirectedGraph:
    """Complete binary tree with heap numbering, edges parent -> child.

    Root-to-leaf paths have ``depth`` edges and every edge goes from a
    lower to a higher index.
    """
    if depth < 0:
        raise DomainError(f"depth must be nonnegative, got {depth}")
    n = 2 ** (depth + 1) - 1
    return DirectedGraph.from_edges(n, ((v, c) for v in range(n) for c in (2 * v + 1, 2 * v + 2) if c < n))


def tree_depth(vertex: int) -> int:
    """Depth of a vertex in heap numbering."""
    return (vertex + 1).bit_length() - 1


# Set predicates

def symmetric_closure(graph: DirectedGraph) -> DirectedGraph:
    return DirectedGraph(graph.vertex_count, graph.edges | {(b, a) for a, b in graph.edges})


def is_symmetric(graph: DirectedGraph) -> bool:
    return all((b, a) in graph.edges for a, b in graph.edges)


def is_antisymmetric(graph: DirectedGraph) -> bool:
    """(a, b) in E implies (b, a) not in E. A loop (a, a) violates this."""
    return all((b, a) not in graph.edges for a, b in graph.edges)


def is_irreflexive(graph: DirectedGraph) -> bool:
    return not graph.has_loop()


# Cliques

def _undirected_masks(graph: DirectedGraph) -> List[int]:
    masks = [0] * graph.vertex_count
    for a, b in graph.edges:
        if a != b:
            masks[a] |= 1 << b
            masks[b] |= 1 << a
    return masks


def _bits(mask: int) -> Iterator[int]:
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def _color_bound(candidates: int, masks: List[int]) -> int:
    """Colors used by a greedy coloring of the candidates, an upper bound on their clique number."""
    colors = 0
    uncolored = candidates
    while uncolored:
        colors += 1
        available = uncolored
        while available:
            low = available & -available
            uncolored &= ~low
            available &= ~(masks[low.bit_length() - 1] | low)
    return colors


def max_clique(graph: DirectedGraph) -> Tuple[int, ...]:
    """Maximum clique by branch-and-bound; among maximum cliques the lexicographically first.

    A branch is cut when the clique so far plus the candidate count, or plus
    the colors of a greedy coloring of the candidates, cannot beat the best.

    Raises:
        DomainError: If the graph has no vertices
    """
    if graph.vertex_count == 0:
        raise DomainError("clique number of the empty graph is undefined")
    if graph.vertex_count > settings.exact_clique_max_vertices:
        logger.warning(
            f"exact clique search on {graph.vertex_count} vertices exceeds the "
            f"{settings.exact_clique_max_vertices}-vertex desk-scale contract"
        )

    masks = _undirected_masks(graph)
    best: List[int] = []
    clique: List[int] = []

    def expand(candidates: int) -> None:
        nonlocal best
        if not candidates:
            if len(clique) > len(best):
                best = list(clique)
            return
        for v in _bits(candidates):
            if len(clique) + candidates.bit_count() <= len(best):
                return
            if len(clique) + _color_bound(candidates, masks) <= len(best):
                return
            clique.append(v)
            expand(candidates & masks[v])
            clique.pop()
            candidates &= ~(1 << v)

    expand((1 << graph.vertex_count) - 1)
    return tuple(best)


def clique_number(graph: DirectedGraph) -> int:
    """Largest set of vertices pairwise joined in at least one direction."""
    return len(max_clique(graph))


def maximal_cliques(graph: DirectedGraph, vertices: Optional[Sequence[int]] = None) -> List[Tuple[int, ...]]:
    """All maximal cliques (Bron-Kerbosch with pivoting), sorted.

    Args:
        graph: Graph to search
        vertices: Restrict the search to this vertex subset

    Returns:
        Sorted list of sorted vertex tuples
    """
    masks = _undirected_masks(graph)
    pool = (1 << graph.vertex_count) - 1
    if vertices is not None:
        pool = sum(1 << v for v in set(vertices))
    masks = [m & pool for m in masks]
    found: List[Tuple[int, ...]] = []

    def bron_kerbosch(r: List[int], p: int, x: int) -> None:
        if not p and not x:
            found.append(tuple(sorted(r)))
            return
        pivot = max(_bits(p | x), key=lambda u: (masks[u] & p).bit_count())
        for v in _bits(p & ~masks[pivot]):
            bron_kerbosch(r + [v], p & masks[v], x & masks[v])
            p &= ~(1 << v)
            x |= 1 << v

    if pool:
        bron_kerbosch([], pool, 0)
    return sorted(found)


def all_cliques(graph: DirectedGraph) -> List[Tuple[int, ...]]:
    """Every nonempty clique, in order of size then lexicographic."""
    masks = _undirected_masks(graph)
    found: List[Tuple[int, ...]] = []

    def grow(clique: Tuple[int, ...], candidates: int) -> None:
        found.append(clique)
        for v in _bits(candidates):
            grow(clique + (v,), candidates & masks[v] & ~((1 << (v + 1)) - 1))

    for v in range(graph.vertex_count):
        grow((v,), masks[v] & ~((1 << (v + 1)) - 1))
    return sorted(found, key=lambda c: (len(c), c))


def is_clique(graph: DirectedGraph, vertices: Sequence[int]) -> bool:
    masks = _undirected_masks(graph)
    members = list(vertices)
    return all(masks[a] >> b & 1 for i, a in enumerate(members) for b in members[i + 1:])


# Homomorphisms

def is_homomorphism(source: DirectedGraph, target: DirectedGraph, assignment: Sequence[int]) -> bool:
    if len(assignment) != source.vertex_count:
        return False
    if any(not 0 <= a < target.vertex_count for a in assignment):
        return False
    return all((assignment[i], assignment[j]) in target.edges for i, j in source.edges)


def hom_exists(source: DirectedGraph, target: DirectedGraph) -> Optional[HomWitness]:
    """Search for a morphism source -> target.

    Backtracking with forward checking. Source vertices are visited by
    descending degree (ties to the lowest index) and target values are tried
    in ascending order, so the witness is reproducible.

    Returns:
        A HomWitness, or None when no morphism exists
    """
    n, m = source.vertex_count, target.vertex_count
    if n == 0:
        return HomWitness(())
    if m == 0:
        return None

    succ = [0] * m
    pred = [0] * m
    loop_mask = 0
    for a, b in target.edges:
        succ[a] |= 1 << b
        pred[b] |= 1 << a
        if a == b:
            loop_mask |= 1 << a

    out_nb = source.out_neighbors()
    in_nb = source.in_neighbors()
    full = (1 << m) - 1
    domains = [loop_mask if (v, v) in source.edges else full for v in range(n)]
    if any(d == 0 for d in domains):
        return None

    order = sorted(range(n), key=lambda v: (-(len(out_nb[v]) + len(in_nb[v])), v))
    assignment = [-1] * n

    def search(position: int, domains: List[int]) -> bool:
        if position == n:
            return True
        v = order[position]
        for a in _bits(domains[v]):
            trial = list(domains)
            trial[v] = 1 << a
            consistent = True
            for w in out_nb[v]:
                if w != v and assignment[w] < 0:
                    trial[w] &= succ[a]
                    if not trial[w]:
                        consistent = False
                        break
            if consistent:
                for w in in_nb[v]:
                    if w != v and assignment[w] < 0:
                        trial[w] &= pred[a]
                        if not trial[w]:
                            consistent = False
                            break
            if consistent:
                assignment[v] = a
                if search(position + 1, trial):
                    return True
                assignment[v] = -1
        return False

    if not search(0, domains):
        return None
    return HomWitness(tuple(assignment))


def chromatic_number(graph: DirectedGraph) -> int:
    """Smallest p with a morphism into K_p.

    Raises:
        DomainError: If the graph has a loop or no vertices
    """
    if graph.has_loop():
        raise DomainError("chromatic number is undefined for a graph with a loop")
    if graph.vertex_count == 0:
        raise DomainError("chromatic number of the empty graph is undefined")
    if graph.vertex_count > settings.chromatic_max_vertices:
        logger.warning(
            f"chromatic search on {graph.vertex_count} vertices exceeds the "
            f"{settings.chromatic_max_vertices}-vertex desk-scale contract"
        )
    p = 1
    while hom_exists(graph, complete_graph(p)) is None:
        p += 1
    return p


# Ranks and paths

def rank_vector(graph: DirectedGraph) -> RankVector:
    """Longest-path rank of every vertex, CYCLE where a cycle is reachable.

    Sinks are peeled off repeatedly (Kahn's algorithm on reversed edges);
    a vertex is peeled once all its out-neighbors are, and its rank is one
    more than theirs. Whatever is never peeled reaches a cycle.
    """
    n = graph.vertex_count
    out_nb = graph.out_neighbors()
    in_nb = graph.in_neighbors()
    remaining = [len(out_nb[v]) for v in range(n)]
    ranks: List[Union[int, PathMarker]] = [CYCLE] * n

    queue = deque(v for v in range(n) if remaining[v] == 0)
    while queue:
        v = queue.popleft()
        ranks[v] = 1 + max((ranks[w] for w in out_nb[v]), default=-1)
        for u in in_nb[v]:
            remaining[u] -= 1
            if remaining[u] == 0:
                queue.append(u)
    return RankVector(tuple(ranks))


def longest_path_length(graph: DirectedGraph) -> Union[int, PathMarker]:
    """Longest path in edges, or CYCLE when the graph has a cycle."""
    ranks = rank_vector(graph)
    if not ranks.is_finite:
        return CYCLE
    return max(ranks.ranks, default=0)


def forward_ranks(adjacency: np.ndarray) -> np.ndarray:
    """Ranks for a batch of windowed graphs whose edges all go from i to j > i.

    Args:
        adjacency: Boolean array of shape (batch, n, n), zero on and below the diagonal

    Returns:
        Integer array of shape (batch, n); row maxima are the longest paths
    """
    adjacency = np.asarray(adjacency, dtype=bool)
    if adjacency.ndim == 2:
        adjacency = adjacency[None]
    batch, n, _ = adjacency.shape
    ranks = np.zeros((batch, n), dtype=np.int64)
    for i in range(n - 2, -1, -1):
        candidates = np.where(adjacency[:, i, i + 1:], ranks[:, i + 1:] + 1, 0)
        ranks[:, i] = candidates.max(axis=1)
    return ranks


def has_path_of_length(graph: DirectedGraph, p: int) -> bool:
    """A path with at least p edges exists (always true with a cycle)."""
    length = longest_path_length(graph)
    return length is CYCLE or length >= p
