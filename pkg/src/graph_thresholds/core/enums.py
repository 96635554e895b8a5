"""Enumerations shared across the graph-thresholds modules."""

from enum import Enum
from typing import List, Optional


class CapacityMethod(str, Enum):
    """How a capacity value was obtained."""

    CLOSED_FORM = "closed_form"    # loop / symmetric / antisymmetric formulas
    SUPPORT_ENUM = "support_enum"  # simplex lattice + clique oracle
    NUMERIC = "numeric"            # multi-start replicator ascent (lower bound)


class MethodChoice(str, Enum):
    """User-facing --method values of the capacity command."""

    AUTO = "auto"
    CLOSED = "closed"
    NUMERIC = "numeric"
    ENUM = "enum"

    def to_method(self) -> Optional[CapacityMethod]:
        """Concrete method, or None for AUTO."""
        return {
            MethodChoice.AUTO: None,
            MethodChoice.CLOSED: CapacityMethod.CLOSED_FORM,
            MethodChoice.NUMERIC: CapacityMethod.NUMERIC,
            MethodChoice.ENUM: CapacityMethod.SUPPORT_ENUM,
        }[self]


class OutputFormat(str, Enum):
    """Report output formats."""

    TEXT = "text"
    CSV = "csv"
    RECORD = "record"


class ModelVariant(str, Enum):
    """Measure model variants."""

    BERNOULLI = "bernoulli"
    MIXTURE = "mixture"
    ATOMS = "atoms"

    @classmethod
    def exchangeable_variants(cls) -> List["ModelVariant"]:
        """Variants whose laws are invariant under injective reindexing."""
        return [cls.BERNOULLI, cls.MIXTURE]


class EventKind(str, Enum):
    """Cylinder events over a word x."""

    ORDER = "order"        # x_i > x_j, i < j
    EQUAL = "equal"        # x_i = x_j
    NEQ = "neq"            # x_i != x_j
    CYLINDER = "cylinder"  # x_i = a for each listed (i, a)


class InvarianceKind(str, Enum):
    """Reindexing groups used by invariance checks."""

    INJECTIVE = "injective"    # all injections [r] -> [window]
    INCREASING = "increasing"  # increasing injections
    SHIFT = "shift"            # translates of one index pattern


class PathMarker(str, Enum):
    """Rank value for vertices that reach a cycle."""

    CYCLE = "CYCLE"


CYCLE = PathMarker.CYCLE
