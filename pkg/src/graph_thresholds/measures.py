"""Finitely described probability laws on words of a fixed window.

Three variants stand in for measures on sequences: a Bernoulli product law
B_lambda, a finite mixture sum_k w_k B_{lambda^(k)} of product laws, and an
explicit list of atoms. The first two are exchangeable and projective, so
they sample words of any length; atoms are tied to their window.
"""

import logging
import math
from abc import ABC, abstractmethod
from dataclasses import dataclass
from fractions import Fraction
from functools import reduce
from itertools import combinations, permutations, product
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from .core import rng
from .core.enums import EventKind, InvarianceKind, ModelVariant
from .core.errors import DomainError
from .core.models import SIMPLEX_TOLERANCE, DeepPoint, SimplexDist

logger = logging.getLogger(__name__)

Number = Union[float, Fraction]

# Alphabets up to this size are summed in exact rational arithmetic
EXACT_ALPHABET_LIMIT = 4
EXPANSION_LIMIT = 100_000


@dataclass(frozen=True)
class EventSpec:
    """An event about a word x: x_i > x_j, x_i = x_j, x_i != x_j, or a cylinder."""

    kind: EventKind
    i: int = 0
    j: int = 0
    cells: Tuple[Tuple[int, int], ...] = ()

    def __post_init__(self):
        if self.kind is EventKind.CYLINDER:
            if any(index < 0 or symbol < 0 for index, symbol in self.cells):
                raise DomainError(f"cylinder cells must be nonnegative, got {self.cells}")
            return
        if self.i < 0 or self.j < 0:
            raise DomainError(f"indices must be nonnegative, got ({self.i}, {self.j})")
        if self.kind is EventKind.ORDER and not self.i < self.j:
            raise DomainError(f"order events need i < j, got ({self.i}, {self.j})")
        if self.i == self.j:
            raise DomainError(f"{self.kind.value} events need two distinct indices")

    @classmethod
    def order(cls, i: int, j: int) -> "EventSpec":
        return cls(EventKind.ORDER, i, j)

    @classmethod
    def equal(cls, i: int, j: int) -> "EventSpec":
        return cls(EventKind.EQUAL, i, j)

    @classmethod
    def neq(cls, i: int, j: int) -> "EventSpec":
        return cls(EventKind.NEQ, i, j)

    @classmethod
    def cylinder(cls, cells: Sequence[Tuple[int, int]]) -> "EventSpec":
        return cls(EventKind.CYLINDER, cells=tuple((int(i), int(a)) for i, a in cells))

    @classmethod
    def parse(cls, text: str) -> "EventSpec":
        """Parse 'order:0,1', 'equal:2,5', 'neq:0,3' or 'cylinder:0=1,4=0'.

        Raises:
            DomainError: On malformed text
        """
        kind_text, _, body = text.strip().partition(":")
        try:
            kind = EventKind(kind_text.strip().lower())
        except ValueError:
            raise DomainError(f"unknown event kind '{kind_text}' (use order, equal, neq, cylinder)")
        try:
            if kind is EventKind.CYLINDER:
                cells = []
                for part in filter(None, (p.strip() for p in body.split(","))):
                    index, _, symbol = part.partition("=")
                    cells.append((int(index), int(symbol)))
                return cls.cylinder(cells)
            i, j = (int(p) for p in body.split(","))
        except ValueError:
            raise DomainError(f"cannot parse event '{text}'")
        return cls(kind, i, j)

    def max_index(self) -> int:
        if self.kind is EventKind.CYLINDER:
            return max((index for index, _ in self.cells), default=-1)
        return max(self.i, self.j)

    def holds(self, word: Sequence[int]) -> bool:
        if self.kind is EventKind.ORDER:
            return word[self.i] > word[self.j]
        if self.kind is EventKind.EQUAL:
            return word[self.i] == word[self.j]
        if self.kind is EventKind.NEQ:
            return word[self.i] != word[self.j]
        return all(word[index] == symbol for index, symbol in self.cells)

    def describe(self) -> str:
        if self.kind is EventKind.CYLINDER:
            return "cylinder:" + ",".join(f"{i}={a}" for i, a in self.cells)
        return f"{self.kind.value}:{self.i},{self.j}"


def _total(terms: List[Number]) -> float:
    if terms and isinstance(terms[0], Fraction):
        return float(sum(terms, Fraction(0)))
    return math.fsum(terms)


class MeasureModel(ABC):
    """A law on words in {0..alphabet-1}^window."""

    variant: ModelVariant

    def __init__(self, alphabet: int, window: int):
        if alphabet < 1:
            raise DomainError(f"alphabet must be positive, got {alphabet}")
        if window < 1:
            raise DomainError(f"window must be positive, got {window}")
        self.alphabet = alphabet
        self.window = window

    @property
    def exchangeable(self) -> bool:
        return self.variant in ModelVariant.exchangeable_variants()

    @property
    def exact(self) -> bool:
        return self.alphabet <= EXACT_ALPHABET_LIMIT

    @abstractmethod
    def marginal_table(self, indices: Sequence[int]) -> np.ndarray:
        """Joint law of (x_i for i in indices) for distinct indices, shape (alphabet,)*r."""

    @abstractmethod
    def sample_words(self, count: int, generator: np.random.Generator, length: Optional[int] = None) -> np.ndarray:
        """Draw ``count`` words, shape (count, length)."""

    @abstractmethod
    def event_probability(self, event: EventSpec) -> float:
        """Exact probability of an event within the window."""

    @abstractmethod
    def to_dict(self) -> dict:
        """Record form, tagged by variant."""


class ProductMixture(MeasureModel):
    """Finite mixture of Bernoulli product laws."""

    variant = ModelVariant.MIXTURE

    def __init__(self, components: Sequence[Tuple[float, SimplexDist]], window: int):
        if not components:
            raise DomainError("a mixture needs at least one component")
        alphabet = components[0][1].dimension
        if any(c.dimension != alphabet for _, c in components):
            raise DomainError("all mixture components must share one alphabet")
        weights = [float(w) for w, _ in components]
        if any(w < 0 for w in weights) or abs(math.fsum(weights) - 1.0) > SIMPLEX_TOLERANCE:
            raise DomainError(f"mixture weights must be a probability vector, got {weights}")
        super().__init__(alphabet, window)
        self.components: Tuple[Tuple[float, SimplexDist], ...] = tuple(
            (w, c) for w, (_, c) in zip(weights, components)
        )

    def _numbers(self) -> List[Tuple[Number, List[Number]]]:
        if self.exact:
            return [(Fraction(w), [Fraction(x) for x in c.weights]) for w, c in self.components]
        return [(w, list(c.weights)) for w, c in self.components]

    def _component_probability(self, lam: List[Number], event: EventSpec) -> Number:
        p = self.alphabet
        if event.kind is EventKind.ORDER:
            return sum((lam[a] * lam[b] for a in range(p) for b in range(a)), lam[0] * 0)
        squares = sum((x * x for x in lam), lam[0] * 0)
        if event.kind is EventKind.EQUAL:
            return squares
        if event.kind is EventKind.NEQ:
            return 1 - squares
        required: Dict[int, int] = {}
        for index, symbol in event.cells:
            if required.setdefault(index, symbol) != symbol:
                return lam[0] * 0
        return reduce(lambda acc, s: acc * lam[s], required.values(), lam[0] * 0 + 1)

    def event_probability(self, event: EventSpec) -> float:
        if event.kind is EventKind.CYLINDER and any(s >= self.alphabet for _, s in event.cells):
            return 0.0
        return _total([w * self._component_probability(lam, event) for w, lam in self._numbers()])

    def equal_probability(self) -> float:
        return self.event_probability(EventSpec.equal(0, 1))

    def marginal_table(self, indices: Sequence[int]) -> np.ndarray:
        r = len(indices)
        if r == 0:
            return np.array(1.0)
        table = np.zeros((self.alphabet,) * r)
        for weight, component in self.components:
            lam = component.as_array()
            table += weight * reduce(np.multiply.outer, [lam] * r)
        return table

    def sample_words(self, count: int, generator: np.random.Generator, length: Optional[int] = None) -> np.ndarray:
        length = self.window if length is None else length
        words = np.empty((count, length), dtype=np.int64)
        if len(self.components) == 1:
            labels = np.zeros(count, dtype=np.int64)
        else:
            labels = generator.choice(len(self.components), size=count, p=[w for w, _ in self.components])
        for k, (_, component) in enumerate(self.components):
            rows = np.flatnonzero(labels == k)
            if rows.size:
                words[rows] = generator.choice(self.alphabet, size=(rows.size, length), p=component.as_array())
        return words

    def to_dict(self) -> dict:
        return {
            "variant": self.variant.value,
            "window": self.window,
            "components": [{"weight": w, "weights": list(c.weights)} for w, c in self.components],
        }


class MixtureModel(ProductMixture):
    """sum_k w_k B_{lambda^(k)}: the finite form of an exchangeable law."""


class BernoulliModel(ProductMixture):
    """Product law B_lambda: i.i.d. symbols with law lambda."""

    variant = ModelVariant.BERNOULLI

    def __init__(self, weights: SimplexDist, window: int):
        super().__init__([(1.0, weights)], window)

    @property
    def weights(self) -> SimplexDist:
        return self.components[0][1]

    def to_dict(self) -> dict:
        return {"variant": self.variant.value, "window": self.window, "weights": list(self.weights.weights)}


class AtomsModel(MeasureModel):
    """Explicit atoms: words of length window with their probabilities."""

    variant = ModelVariant.ATOMS

    def __init__(self, alphabet: int, window: int, atoms: Sequence[Tuple[float, Sequence[int]]]):
        super().__init__(alphabet, window)
        if not atoms:
            raise DomainError("an atoms model needs at least one atom")
        probabilities = [float(p) for p, _ in atoms]
        words = [tuple(int(s) for s in w) for _, w in atoms]
        for word in words:
            if len(word) != window:
                raise DomainError(f"word {word} has length {len(word)}, window is {window}")
            if any(not 0 <= s < alphabet for s in word):
                raise DomainError(f"word {word} uses a symbol outside 0..{alphabet - 1}")
        if any(p < 0 for p in probabilities) or abs(math.fsum(probabilities) - 1.0) > SIMPLEX_TOLERANCE:
            raise DomainError("atom probabilities must be nonnegative and sum to 1")
        self.atoms: Tuple[Tuple[float, Tuple[int, ...]], ...] = tuple(zip(probabilities, words))
        self._words = np.asarray(words, dtype=np.int64).reshape(len(words), window)
        self._probabilities = np.asarray(probabilities)

    @classmethod
    def expand(cls, model: MeasureModel) -> "AtomsModel":
        """Atoms of a model over its whole window (alphabet^window <= 100000 words).

        Raises:
            DomainError: If the expansion is too large
        """
        if model.alphabet ** model.window > EXPANSION_LIMIT:
            raise DomainError(
                f"expanding {model.alphabet}^{model.window} words exceeds the {EXPANSION_LIMIT} limit"
            )
        table = model.marginal_table(range(model.window))
        atoms = [
            (float(table[word]), word)
            for word in product(range(model.alphabet), repeat=model.window)
            if table[word] > 0
        ]
        return cls(model.alphabet, model.window, atoms)

    def _check_length(self, length: int) -> None:
        if length > self.window:
            raise DomainError(f"atoms model has window {self.window}, asked for length {length}")

    def event_probability(self, event: EventSpec) -> float:
        masses = [p for p, word in self.atoms if event.holds(word)]
        if self.exact:
            return _total([Fraction(p) for p in masses]) if masses else 0.0
        return math.fsum(masses)

    def marginal_table(self, indices: Sequence[int]) -> np.ndarray:
        indices = list(indices)
        if not indices:
            return np.array(1.0)
        table = np.zeros((self.alphabet,) * len(indices))
        np.add.at(table, tuple(self._words[:, indices].T), self._probabilities)
        return table

    def sample_words(self, count: int, generator: np.random.Generator, length: Optional[int] = None) -> np.ndarray:
        length = self.window if length is None else length
        self._check_length(length)
        chosen = generator.choice(len(self.atoms), size=count, p=self._probabilities)
        return self._words[chosen, :length]

    def to_dict(self) -> dict:
        return {
            "variant": self.variant.value,
            "alphabet": self.alphabet,
            "window": self.window,
            "atoms": [{"probability": p, "word": list(w)} for p, w in self.atoms],
        }


def _check_event(model: MeasureModel, event: EventSpec) -> None:
    if event.max_index() >= model.window:
        raise DomainError(f"event {event.describe()} indexes past window {model.window}")


def event_prob(model: MeasureModel, event: EventSpec) -> float:
    """Exact probability of an event.

    Raises:
        DomainError: If an index is outside the window
    """
    _check_event(model, event)
    return model.event_probability(event)


def equal_prob(model: MeasureModel) -> float:
    """m({x_0 = x_1}) = sum_k w_k sum_a (lambda_a^(k))^2 for exchangeable models.

    Raises:
        DomainError: For atoms models, whose value is index dependent
    """
    if not isinstance(model, ProductMixture):
        raise DomainError("equal_prob needs an exchangeable model; use event_prob(EQUAL(0,1)) for atoms")
    return model.equal_probability()


def marginal(model: MeasureModel, indices: Sequence[int]) -> np.ndarray:
    """Table of cylinder probabilities at strictly increasing indices.

    Raises:
        DomainError: If indices are not increasing or leave the window
    """
    indices = tuple(int(i) for i in indices)
    if any(b <= a for a, b in zip(indices, indices[1:])):
        raise DomainError(f"marginal indices must be strictly increasing, got {indices}")
    if indices and (indices[0] < 0 or indices[-1] >= model.window):
        raise DomainError(f"marginal indices {indices} leave window {model.window}")
    return model.marginal_table(indices)


def sample(model: MeasureModel, seed: int) -> Tuple[int, ...]:
    """One word drawn from the seed's sampling stream."""
    return tuple(model.sample_words(1, rng.stream(seed, rng.SAMPLE))[0].tolist())


def sample_words(model: MeasureModel, count: int, seed: int) -> np.ndarray:
    return model.sample_words(count, rng.stream(seed, rng.SAMPLE))


def _index_groups(window: int, r: int, kind: InvarianceKind) -> List[List[Tuple[int, ...]]]:
    """Groups of index tuples whose marginals must agree under the given reindexings."""
    if kind is InvarianceKind.INJECTIVE:
        return [list(permutations(range(window), r))]
    if kind is InvarianceKind.INCREASING:
        return [list(combinations(range(window), r))]
    patterns: Dict[Tuple[int, ...], List[Tuple[int, ...]]] = {}
    for indices in combinations(range(window), r):
        pattern = tuple(i - indices[0] for i in indices)
        patterns.setdefault(pattern, []).append(indices)
    return list(patterns.values())


def check_invariance(model: MeasureModel, r: int, kind: InvarianceKind = InvarianceKind.INJECTIVE) -> float:
    """Largest L-infinity gap between r-marginals related by a reindexing.

    Raises:
        DomainError: If r exceeds the window
    """
    if not 0 <= r <= model.window:
        raise DomainError(f"r must be in 0..{model.window}, got {r}")
    if model.exchangeable:
        return 0.0
    deviation = 0.0
    for group in _index_groups(model.window, r, kind):
        if len(group) < 2:
            continue
        tables = np.stack([model.marginal_table(indices) for indices in group])
        deviation = max(deviation, float(np.ptp(tables, axis=0).max()))
    return deviation


def check_exchangeable(model: MeasureModel, r: int) -> float:
    """Deviation from invariance under all injections [r] -> [window]."""
    return check_invariance(model, r, InvarianceKind.INJECTIVE)


def deep_point(sets: Sequence[Sequence[bool]], mu: Sequence[float]) -> DeepPoint:
    """A point of positive mass lying in at least ceil(lambda N) of the N sets.

    lambda is the smallest set measure. Averaging the hit count against mu
    gives at least lambda N, so such a point always exists.

    Raises:
        DomainError: If there are no sets or mu is not a probability vector
    """
    indicators = np.asarray(sets, dtype=bool)
    if indicators.ndim != 2 or indicators.shape[0] == 0:
        raise DomainError("deep_point needs at least one indicator vector")
    measure = SimplexDist(tuple(mu)).as_array()
    if indicators.shape[1] != measure.size:
        raise DomainError(f"indicators have {indicators.shape[1]} points, mu has {measure.size}")

    set_measures = indicators.astype(float) @ measure
    lam = float(set_measures.min())
    hits = indicators.sum(axis=0)
    candidates = np.flatnonzero(measure > 0)
    point = int(candidates[np.argmax(hits[candidates])])
    required = math.ceil(lam * len(indicators) - 1e-9)
    assert hits[point] >= required, "averaging bound violated"
    return DeepPoint(point=point, hits=int(hits[point]), set_count=len(indicators), min_measure=lam)
