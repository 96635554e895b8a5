"""Finite extraction of index sets on which tuple-indexed data settles down.

Given f on the increasing k-tuples of [0, n) with values in a finite metric
space, extraction returns an increasing J together with a limit point x_q for
every prefix q over J, such that for each t in [J]^k and m < k

    d(f(t), x_{t[:m]}) <= h(position of t[m] in J)

for a nonincreasing schedule h. The recursion keeps, per leading index, a
nested pool of admissible followers and finally picks the longest chain of
leading indices whose own limits agree with one center. Limits are always
values of f, never synthetic points.
"""

import bisect
import logging
import math
from dataclasses import dataclass
from itertools import combinations, takewhile
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from .core.errors import DomainError, InfeasibleSizeError
from .core.models import (
    CERTIFICATE_TOLERANCE,
    SIMPLEX_TOLERANCE,
    ExtractionResult,
    IntersectionResult,
    LipschitzResult,
    SimplexDist,
)

logger = logging.getLogger(__name__)

Prefix = Tuple[int, ...]


# Inputs

def _triangle_violation(d: np.ndarray) -> float:
    """Largest d(i, k) - d(i, j) - d(j, k), one intermediate point j at a time."""
    return max(float((d - d[:, j, None] - d[None, j, :]).max()) for j in range(d.shape[0]))


@dataclass(eq=False)
class MetricPoints:
    """Finite metric space given by its distance matrix."""

    distances: np.ndarray

    def __post_init__(self):
        d = np.asarray(self.distances, dtype=float)
        if d.ndim != 2 or d.shape[0] != d.shape[1] or d.shape[0] == 0:
            raise DomainError("distance table must be a nonempty square matrix")
        if np.any(d < 0) or np.any(np.abs(np.diag(d)) > CERTIFICATE_TOLERANCE):
            raise DomainError("distances must be nonnegative with a zero diagonal")
        if np.any(np.abs(d - d.T) > CERTIFICATE_TOLERANCE):
            raise DomainError("distance table is not symmetric")
        violation = _triangle_violation(d)
        if violation > CERTIFICATE_TOLERANCE:
            raise DomainError(f"triangle inequality fails by {violation:.3g}")
        self.distances = d

    @classmethod
    def from_vectors(cls, vectors: Sequence[Sequence[float]]) -> "MetricPoints":
        """Euclidean distances between row vectors."""
        x = np.asarray(vectors, dtype=float)
        if x.ndim == 1:
            x = x[:, None]
        return cls(np.linalg.norm(x[:, None, :] - x[None, :, :], axis=-1))

    @classmethod
    def from_matrix(cls, matrix: Sequence[Sequence[float]]) -> "MetricPoints":
        return cls(np.asarray(matrix, dtype=float))

    @property
    def size(self) -> int:
        return self.distances.shape[0]


@dataclass(eq=False)
class TupleFunction:
    """f on increasing arity-tuples of [0, size), valued in point indices."""

    arity: int
    size: int
    table: Dict[Prefix, int]

    def __post_init__(self):
        if self.arity < 1:
            raise DomainError(f"arity must be at least 1, got {self.arity}")
        if self.size < 0:
            raise DomainError(f"size must be nonnegative, got {self.size}")
        expected = set(combinations(range(self.size), self.arity))
        if set(self.table) != expected:
            missing = sorted(expected - set(self.table))[:3]
            raise DomainError(f"table must cover every increasing {self.arity}-tuple; missing {missing}")

    @classmethod
    def from_values(cls, arity: int, size: int, values: Sequence[int]) -> "TupleFunction":
        """Values listed in lexicographic order of the tuples."""
        tuples = list(combinations(range(size), arity))
        if len(values) != len(tuples):
            raise DomainError(f"expected {len(tuples)} values for arity {arity} on {size} indices, got {len(values)}")
        return cls(arity, size, {t: int(v) for t, v in zip(tuples, values)})

    @classmethod
    def from_callable(cls, arity: int, size: int, fn: Callable[[Prefix], int]) -> "TupleFunction":
        return cls(arity, size, {t: int(fn(t)) for t in combinations(range(size), arity)})

    def __call__(self, t: Prefix) -> int:
        return self.table[tuple(t)]

    def values(self) -> List[int]:
        return [self.table[t] for t in combinations(range(self.size), self.arity)]


@dataclass(eq=False)
class IndexMetric:
    """Metric on {0, ..., size-1} plus a point at infinity (the last row and column)."""

    table: np.ndarray

    def __post_init__(self):
        d = np.asarray(self.table, dtype=float)
        if d.ndim != 2 or d.shape[0] != d.shape[1] or d.shape[0] < 2:
            raise DomainError("index metric needs a square table with at least one finite point")
        if not np.all(np.isfinite(d)):
            raise DomainError("index metric distances must be finite, the infinity column included")
        off_diagonal = ~np.eye(d.shape[0], dtype=bool)
        if np.any(np.abs(np.diag(d)) > CERTIFICATE_TOLERANCE) or np.any(d[off_diagonal] <= 0):
            raise DomainError("index metric must vanish exactly on the diagonal")
        if np.any(np.abs(d - d.T) > CERTIFICATE_TOLERANCE):
            raise DomainError("index metric is not symmetric")
        violation = _triangle_violation(d)
        if violation > CERTIFICATE_TOLERANCE:
            raise DomainError(f"index metric violates the triangle inequality by {violation:.3g}")
        self.table = d

    @classmethod
    def geometric(cls, size: int, scale: float = 1.0) -> "IndexMetric":
        """delta(n, m) = scale |2^-n - 2^-m|, delta(n, inf) = scale 2^-n. Monotone."""
        values = np.append(np.ldexp(1.0, -np.arange(size)), 0.0)
        return cls(scale * np.abs(values[:, None] - values[None, :]))

    @classmethod
    def harmonic(cls, size: int) -> "IndexMetric":
        """delta(n, m) = |1/(n+1) - 1/(m+1)|, which is not monotone once size > 6."""
        values = np.append(1.0 / (np.arange(size) + 1.0), 0.0)
        return cls(np.abs(values[:, None] - values[None, :]))

    @property
    def size(self) -> int:
        """Number of finite points."""
        return self.table.shape[0] - 1

    @property
    def infinity(self) -> int:
        return self.size

    def epsilon(self, n: int) -> float:
        """Half the distance from n to the nearest point above it, infinity included."""
        return 0.5 * float(self.table[n, n + 1:].min())

    def epsilons(self) -> np.ndarray:
        return np.array([self.epsilon(n) for n in range(self.size)])

    def is_monotone(self, tolerance: float = CERTIFICATE_TOLERANCE) -> bool:
        """delta(x', y') <= delta(x, y) whenever x' > x, y' > y and x != y, over finite points."""
        finite = self.table[: self.size, : self.size]
        if self.size < 2:
            return True
        # above[x, y] = max of delta over x' >= x, y' >= y
        above = np.maximum.accumulate(np.maximum.accumulate(finite[::-1, ::-1], axis=0), axis=1)[::-1, ::-1]
        strictly_above = above[1:, 1:]
        head = finite[:-1, :-1]
        distinct = ~np.eye(self.size - 1, dtype=bool)
        return bool(np.all(strictly_above[distinct] <= head[distinct] + tolerance))

    def to_dict(self) -> dict:
        return {"size": self.size, "table": self.table.tolist(), "monotone": self.is_monotone()}


@dataclass(eq=False)
class IndicatorRows:
    """Indicator of a subset of a finite probability space for every increasing k-tuple."""

    arity: int
    size: int
    rows: np.ndarray
    mu: SimplexDist

    def __post_init__(self):
        self.rows = np.asarray(self.rows, dtype=bool)
        tuples = math.comb(self.size, self.arity)
        if self.rows.ndim != 2 or self.rows.shape != (tuples, self.mu.dimension):
            raise DomainError(
                f"expected {tuples} rows over {self.mu.dimension} points, got shape {self.rows.shape}"
            )
        self.index = {t: i for i, t in enumerate(combinations(range(self.size), self.arity))}

    def measures(self) -> np.ndarray:
        return self.rows.astype(float) @ self.mu.as_array()

    def row(self, t: Prefix) -> np.ndarray:
        return self.rows[self.index[tuple(t)]]


# Nets and extraction

def farthest_point_net(distances: np.ndarray, members: Sequence[int], radius: float) -> List[int]:
    """Greedy net: start at members[0], add the farthest member while it is beyond radius."""
    members = list(members)
    if not members:
        return []
    centers = [members[0]]
    nearest = distances[members[0], members].copy()
    while nearest.max() > radius:
        far = members[int(np.argmax(nearest))]
        centers.append(far)
        nearest = np.minimum(nearest, distances[far, members])
    return centers


class _Extractor:
    """Nested-chain extraction under a nonincreasing position schedule."""

    def __init__(self, f: TupleFunction, points: MetricPoints, schedule: np.ndarray):
        self.f = f
        self.distances = points.distances
        self.schedule = schedule

    def _tolerances(self, base: int, count: int, scale: float) -> np.ndarray:
        positions = np.minimum(np.arange(base, base + count), len(self.schedule) - 1)
        return scale * self.schedule[positions]

    def _candidates(self, values: Sequence[int], radius: float) -> List[int]:
        """Distinct values, net centers with the largest cells first, then the rest by index."""
        distinct = sorted(set(values))
        net = farthest_point_net(self.distances, distinct, radius)
        owner = np.argmin(self.distances[np.ix_(net, list(values))], axis=0)
        cells = np.bincount(owner, minlength=len(net))
        ordered = [net[i] for i in sorted(range(len(net)), key=lambda i: (-cells[i], net[i]))]
        centers = set(net)
        return ordered + [v for v in distinct if v not in centers]

    def _chain(self, items: List[int], values: List[int], base: int, scale: float) -> Tuple[List[int], Optional[int]]:
        """Longest subsequence whose r-th member is within tol(base + r) of one center."""
        if not items:
            return [], None
        tolerances = self._tolerances(base, len(items), scale)
        candidates = self._candidates(values, tolerances[0] / 2)
        distances = self.distances[np.ix_(candidates, values)]
        counts = np.zeros(len(candidates), dtype=np.int64)
        taken = np.zeros((len(candidates), len(items)), dtype=bool)
        for i in range(len(items)):
            ok = distances[:, i] <= tolerances[counts]
            taken[:, i] = ok
            counts += ok
        best = int(np.argmax(counts))
        return [item for item, keep in zip(items, taken[best]) if keep], candidates[best]

    def restrict(self, J: Sequence[int], limits: Dict[Prefix, int], prefix: Prefix = ()) -> Dict[Prefix, int]:
        """Limits whose indices past the fixed prefix lie in J and still have enough followers there."""
        members = set(J)
        kept = {}
        for q, value in limits.items():
            own = q[len(prefix):]
            if not all(i in members for i in own):
                continue
            followers = len(J) - (bisect.bisect_right(J, own[-1]) if own else 0)
            if followers >= self.f.arity - len(q):
                kept[q] = value
        return kept

    def run(self, pool: List[int], prefix: Prefix, base: int, scale: float) -> Tuple[List[int], Dict[Prefix, int]]:
        """Extract from pool with prefix fixed.

        Members are assigned positions base, base + 1, ... which are never
        below their final positions, so a nonincreasing schedule keeps the
        bound valid after outer levels drop members.
        """
        if not pool:
            return [], {}
        if len(prefix) == self.f.arity - 1:
            values = [self.f.table[prefix + (e,)] for e in pool]
            chain, center = self._chain(pool, values, base, scale)
            return chain, ({prefix: center} if chain else {})

        taus: List[int] = []
        limits: Dict[Prefix, int] = {}
        current = pool
        while current:
            head = current[0]
            followers, sub_limits = self.run(current[1:], prefix + (head,), base + len(taus) + 1, scale / 2)
            taus.append(head)
            limits.update(sub_limits)
            current = followers

        defined = list(takewhile(lambda t: prefix + (t,) in limits, taus))
        chain, center = self._chain(defined, [limits[prefix + (t,)] for t in defined], base, scale / 2)
        J = chain + taus[len(defined):]
        kept = {prefix: center} if chain else {}
        chosen = set(chain)
        kept.update({q: v for q, v in limits.items() if q[len(prefix)] in chosen})
        return J, self.restrict(J, kept, prefix)


def _check_values(f: TupleFunction, points: MetricPoints) -> None:
    bad = [v for v in f.table.values() if not 0 <= v < points.size]
    if bad:
        raise DomainError(f"tuple values must index the {points.size} points, found {bad[0]}")


def _extract(f: TupleFunction, points: MetricPoints, schedule: np.ndarray) -> Tuple[List[int], Dict[Prefix, int]]:
    _check_values(f, points)
    extractor = _Extractor(f, points, schedule)
    J, limits = extractor.run(list(range(f.size)), (), 0, 1.0)
    logger.debug(f"extraction on {f.size} indices, arity {f.arity}: |J| = {len(J)}")
    return J, limits


def verify_extraction(f: TupleFunction, points: MetricPoints, result: ExtractionResult) -> float:
    """Smallest eps for which d(f(t), x_{t[:m]}) <= eps / 2^pos(t[m]) holds on [J]^k.

    Raises:
        DomainError: If a prefix limit needed by some tuple is missing
    """
    position = {index: pos for pos, index in enumerate(result.J)}
    worst = 0.0
    for t in combinations(result.J, f.arity):
        value = f.table[t]
        for m in range(f.arity):
            limit = result.prefix_limits.get(t[:m])
            if limit is None:
                raise DomainError(f"missing prefix limit for {t[:m]}")
            worst = max(worst, float(points.distances[value, limit]) * 2.0 ** position[t[m]])
    return worst


def _result(f, points, J, limits, epsilon, restrict) -> ExtractionResult:
    result = ExtractionResult(tuple(J), restrict(list(J), limits), 0.0, epsilon, f.arity)
    result.oscillation = verify_extraction(f, points, result)
    return result


def _finish(
    f: TupleFunction,
    points: MetricPoints,
    schedule: np.ndarray,
    epsilon: float,
    target_size: int,
) -> ExtractionResult:
    J, limits = _extract(f, points, schedule)
    restrict = _Extractor(f, points, schedule).restrict
    if len(J) < target_size:
        partial = _result(f, points, J, limits, epsilon, restrict)
        raise InfeasibleSizeError(
            f"only {len(J)} indices can be extracted from {f.size}, {target_size} requested",
            max_achievable=len(J),
            partial=partial,
        )
    return _result(f, points, J[:target_size], limits, epsilon, restrict)


def _check_target(target_size: int, size: int) -> None:
    if not 0 <= target_size <= size:
        raise DomainError(f"target size must be in 0..{size}, got {target_size}")


def extract_convergent(f: TupleFunction, points: MetricPoints, epsilon: float, target_size: int) -> ExtractionResult:
    """Extract J of target_size indices with d(f(t), x_{t[:m]}) <= epsilon / 2^pos(t[m]).

    Raises:
        DomainError: For epsilon <= 0, a target above the domain size or values outside the points
        InfeasibleSizeError: If fewer indices can be extracted; carries the partial result
    """
    if epsilon <= 0:
        raise DomainError(f"epsilon must be positive, got {epsilon}")
    _check_target(target_size, f.size)
    schedule = np.ldexp(epsilon, -np.arange(f.size * f.arity + 2))
    result = _finish(f, points, schedule, epsilon, target_size)
    logger.info(f"extracted {result.size} of {f.size} indices (arity {f.arity}), oscillation {result.oscillation:.3g}")
    return result


# Index metrics

@dataclass(eq=False)
class MonotoneMetric:
    """delta*(x, y) = delta(psi(x), psi(y)) on the reindexing psi."""

    metric: IndexMetric
    psi: Tuple[int, ...]

    def to_dict(self) -> dict:
        return {"psi": list(self.psi), **self.metric.to_dict()}


def monotone_metric(metric: IndexMetric, min_length: int = 2) -> MonotoneMetric:
    """Reindex delta along a fast enough subsequence to make it monotone.

    rho(x) is the least r > x with delta(x', inf) < eps(x) for every x' >= r,
    made nondecreasing; psi(0) = rho(0) and psi(n+1) = rho(psi(n)). Starting
    at rho(0) rather than 0 also gives delta* <= delta pointwise.

    Raises:
        DomainError: If the chain psi has fewer than min_length points in the table
    """
    n = metric.size
    eps = metric.epsilons()
    to_infinity = metric.table[:n, n]
    tail = np.maximum.accumulate(to_infinity[::-1])[::-1]

    rho: List[int] = []
    for x in range(n):
        below = np.flatnonzero(tail[x + 1:] < eps[x])
        if below.size == 0:
            break
        rho.append(max(x + 1 + int(below[0]), rho[-1] if rho else 0))

    psi: List[int] = []
    if rho:
        psi.append(rho[0])
        while psi[-1] < len(rho):
            psi.append(rho[psi[-1]])
    if len(psi) < min_length:
        stuck = psi[-1] if psi else 0
        raise DomainError(
            f"delta(., inf) does not decay fast enough: rho is undefined at index {stuck} "
            f"({len(psi)} of {min_length} points)"
        )
    index = psi + [n]
    reindexed = IndexMetric(metric.table[np.ix_(index, index)])
    logger.debug(f"monotone reindexing psi = {psi}")
    return MonotoneMetric(reindexed, tuple(psi))


def _lipschitz_certificate(
    f: TupleFunction, points: MetricPoints, metric: IndexMetric, sigma: Sequence[int]
) -> Tuple[int, float]:
    """Exhaustive check of d(f(sigma s), f(sigma t)) <= max_i delta(s_i, t_i) over position tuples."""
    positions = np.asarray(list(combinations(range(len(sigma)), f.arity)), dtype=np.int64)
    if len(positions) < 2:
        return 0, 0.0
    sigma = np.asarray(sigma)
    values = np.array([f.table[tuple(sigma[row].tolist())] for row in positions])
    image = points.distances[np.ix_(values, values)]
    bound = np.max(
        [metric.table[np.ix_(positions[:, i], positions[:, i])] for i in range(f.arity)], axis=0
    )
    pairs = len(positions) * (len(positions) - 1) // 2
    return pairs, float(np.max(image - bound))


def lipschitz_schedule(metric: IndexMetric, length: int) -> np.ndarray:
    """h(pos) = min of eps over positions up to pos, padded with its last value to length."""
    running = np.minimum.accumulate(metric.epsilons())
    extra = max(length - len(running), 1)
    return np.concatenate([running, np.full(extra, running[-1])])


def schedule_excess(f: TupleFunction, points: MetricPoints, result: ExtractionResult, schedule: np.ndarray) -> float:
    """Largest d(f(t), x_{t[:m]}) - schedule[pos(t[m])] over t in [J]^k; <= 0 when the schedule holds.

    Raises:
        DomainError: If a prefix limit needed by some tuple is missing
    """
    position = {index: pos for pos, index in enumerate(result.J)}
    worst = -math.inf
    for t in combinations(result.J, f.arity):
        value = f.table[t]
        for m in range(f.arity):
            limit = result.prefix_limits.get(t[:m])
            if limit is None:
                raise DomainError(f"missing prefix limit for {t[:m]}")
            worst = max(worst, float(points.distances[value, limit] - schedule[position[t[m]]]))
    return 0.0 if worst == -math.inf else worst


def lipschitz_reindex(f: TupleFunction, points: MetricPoints, metric: IndexMetric, target_len: int) -> LipschitzResult:
    """Increasing sigma with f(sigma s) 1-Lipschitz for max_i delta(s_i, t_i).

    This is the convergent extraction run under the schedule h of
    lipschitz_schedule instead of eps / 2^pos. Each level fixes a head,
    extracts its followers from the previous head's followers and takes the
    head's prefix limit at half tolerance; the closing chain over those
    limits keeps the heads along which they converge. A member's tolerance
    is read at a position no earlier than its final one, so every t in
    [sigma]^k has d(f(t), x_{t[:m]}) <= h(pos(t[m])).

    For s, t first differing at m with s_m < t_m, both values lie within
    h(s_m) of x_{s[:m]}, hence d(f(s), f(t)) <= 2 h(s_m) <= 2 eps(s_m)
    <= delta(s_m, t_m). The exhaustive certificate rechecks this.

    Raises:
        DomainError: If delta is not monotone or target_len exceeds either domain
        InfeasibleSizeError: If fewer indices can be extracted; carries the partial result
    """
    if not metric.is_monotone():
        raise DomainError("the index metric is not monotone; apply monotone_metric first")
    if target_len > metric.size:
        raise DomainError(f"target length {target_len} exceeds the {metric.size} points of the index metric")
    _check_target(target_len, f.size)

    schedule = lipschitz_schedule(metric, f.size * f.arity + 2)

    def certify(extraction: ExtractionResult) -> LipschitzResult:
        pairs, excess = _lipschitz_certificate(f, points, metric, extraction.J)
        return LipschitzResult(extraction.J, pairs, excess, extraction)

    try:
        extraction = _finish(f, points, schedule, float(schedule[0]), target_len)
    except InfeasibleSizeError as e:
        raise InfeasibleSizeError(str(e), e.max_achievable, partial=certify(e.partial))
    result = certify(extraction)
    logger.info(
        f"lipschitz reindexing of length {len(result.sigma)}: {result.pairs_checked} pairs, "
        f"max excess {result.max_excess:.3g}"
    )
    return result


# Intersections

def telescoping_sum(arity: int, length: int) -> float:
    """sum over m < arity and t < length of C(t, m) / 2^t; tends to 2 * arity."""
    return math.fsum(math.comb(t, m) / 2.0**t for m in range(arity) for t in range(length))


def intersection_measure(family: IndicatorRows, J: Sequence[int]) -> float:
    """mu of the intersection of the rows over [J]^k (1 when J is too short)."""
    common = np.ones(family.mu.dimension, dtype=bool)
    for t in combinations(sorted(J), family.arity):
        common &= family.row(t)
    return math.fsum(np.asarray(family.mu.weights)[common].tolist())


def best_intersection(family: IndicatorRows, target_size: int) -> Tuple[Tuple[int, ...], float]:
    """Brute-force J of target_size with the largest intersection (first J on ties)."""
    best: Tuple[Tuple[int, ...], float] = ((), -1.0)
    for J in combinations(range(family.size), target_size):
        value = intersection_measure(family, J)
        if value > best[1]:
            best = (J, value)
    return best


def _l1_points(family: IndicatorRows) -> Tuple[MetricPoints, TupleFunction]:
    """Distinct rows as points of L1(mu), and the tuple -> row map."""
    if len(family.rows) == 0:
        return MetricPoints(np.zeros((1, 1))), TupleFunction(family.arity, family.size, {})
    distinct, first, inverse = np.unique(family.rows, axis=0, return_index=True, return_inverse=True)
    # renumber unique rows by first occurrence
    order = np.argsort(first, kind="stable")
    rank = np.empty_like(order)
    rank[order] = np.arange(len(order))
    rows = distinct[order]
    weights = family.mu.as_array()
    distances = (rows[:, None, :] ^ rows[None, :, :]).astype(float) @ weights
    f = TupleFunction.from_values(family.arity, family.size, rank[np.ravel(inverse)].tolist())
    return MetricPoints(distances), f


def intersect_extract(family: IndicatorRows, lam: float, epsilon: float, target_size: int) -> IntersectionResult:
    """J whose k-tuples' sets meet in measure at least lam - 2 k epsilon.

    Raises:
        DomainError: For epsilon <= 0 or a row lighter than lam
        InfeasibleSizeError: If fewer indices can be extracted; carries the partial result
    """
    if epsilon <= 0:
        raise DomainError(f"epsilon must be positive, got {epsilon}")
    measures = family.measures()
    if measures.size and measures.min() < lam - SIMPLEX_TOLERANCE:
        raise DomainError(f"a row has measure {measures.min():.12g} below lambda = {lam}")
    points, f = _l1_points(family)
    bound = lam - 2 * family.arity * epsilon

    def summarize(extraction: ExtractionResult) -> IntersectionResult:
        return IntersectionResult(extraction.J, intersection_measure(family, extraction.J), bound, extraction)

    try:
        extraction = extract_convergent(f, points, epsilon, target_size)
    except InfeasibleSizeError as e:
        raise InfeasibleSizeError(str(e), e.max_achievable, partial=summarize(e.partial))
    result = summarize(extraction)
    logger.info(f"intersection over [J]^{family.arity}, |J| = {len(result.J)}: {result.achieved_measure:.6f}")
    return result
