"""Record files: YAML input records and tagged output records.

Inputs are validated with pydantic and every failure is reported with the
1-based line of the offending node. Outputs are YAML mappings whose first key
is ``record``, with floats rounded to a fixed number of significant digits.
"""

import logging
import re
from pathlib import Path
from typing import Annotated, Any, Dict, List, Literal, Optional, Sequence, Tuple, Union

import numpy as np
import yaml
from pydantic import BaseModel, ConfigDict, Field, TypeAdapter, ValidationError, model_validator

from .config import settings
from .core.errors import DomainError, RecordError
from .core.models import DirectedGraph, SimplexDist
from .graph_core import (
    binary_tree,
    complete_graph,
    directed_cycle,
    edgeless_graph,
    loop_graph,
    symmetric_cycle,
    symmetric_path,
    transitive_tournament,
)
from .measures import AtomsModel, BernoulliModel, MeasureModel, MixtureModel
from .ramsey import IndexMetric, IndicatorRows, MetricPoints, TupleFunction

logger = logging.getLogger(__name__)


class _Record(BaseModel):
    model_config = ConfigDict(extra="forbid")


# Input schemas

class GraphRecord(_Record):
    vertex_count: int = Field(ge=0)
    edges: List[Tuple[int, int]] = []


class BernoulliRecord(_Record):
    variant: Literal["bernoulli"]
    window: int = Field(ge=1)
    weights: List[float] = Field(min_length=1)


class ComponentRecord(_Record):
    weight: float = Field(ge=0)
    weights: List[float] = Field(min_length=1)


class MixtureRecord(_Record):
    variant: Literal["mixture"]
    window: int = Field(ge=1)
    components: List[ComponentRecord] = Field(min_length=1)


class AtomRecord(_Record):
    probability: float = Field(ge=0)
    word: List[int]


class AtomsRecord(_Record):
    variant: Literal["atoms"]
    alphabet: int = Field(ge=1)
    window: int = Field(ge=1)
    atoms: List[AtomRecord] = Field(min_length=1)


ModelRecord = Annotated[Union[BernoulliRecord, MixtureRecord, AtomsRecord], Field(discriminator="variant")]


class TupleTableRecord(_Record):
    arity: int = Field(ge=1)
    size: int = Field(ge=0)
    values: List[int]


class PointsRecord(_Record):
    vectors: Optional[List[List[float]]] = None
    matrix: Optional[List[List[float]]] = None

    @model_validator(mode="after")
    def _one_form(self):
        if (self.vectors is None) == (self.matrix is None):
            raise ValueError("give exactly one of 'vectors' or 'matrix'")
        return self


class RowsRecord(_Record):
    arity: int = Field(ge=1)
    size: int = Field(ge=0)
    rows: List[List[int]]


class MuRecord(_Record):
    mu: List[float] = Field(min_length=1)


class IndexMetricRecord(_Record):
    """Explicit table with infinity as the last point, or a named family."""

    table: Optional[List[List[float]]] = None
    geometric: Optional[int] = Field(default=None, ge=1)
    harmonic: Optional[int] = Field(default=None, ge=1)
    scale: float = Field(default=1.0, gt=0)

    @model_validator(mode="after")
    def _one_form(self):
        given = [x is not None for x in (self.table, self.geometric, self.harmonic)]
        if sum(given) != 1:
            raise ValueError("give exactly one of 'table', 'geometric' or 'harmonic'")
        return self


# Loading

def _line_of(node: yaml.Node, loc: Sequence[Any]) -> int:
    """Line of the deepest node reachable along a pydantic error location."""
    line = node.start_mark.line + 1
    for key in loc:
        match = None
        if isinstance(node, yaml.MappingNode):
            match = next((v for k, v in node.value if k.value == str(key)), None)
        elif isinstance(node, yaml.SequenceNode) and isinstance(key, int) and key < len(node.value):
            match = node.value[key]
        if match is None:
            # union tags and model-level validators add keys absent from the document
            continue
        node = match
        line = node.start_mark.line + 1
    return line


def _read(path: Path) -> Tuple[Any, yaml.Node]:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as e:
        raise RecordError(path, None, f"cannot read file: {e.strerror or e}")
    try:
        node = yaml.compose(text, Loader=yaml.SafeLoader)
        data = yaml.safe_load(text)
    except yaml.MarkedYAMLError as e:
        line = e.problem_mark.line + 1 if e.problem_mark else None
        raise RecordError(path, line, f"invalid YAML: {e.problem}")
    if node is None:
        raise RecordError(path, 1, "empty record file")
    return data, node


def _validate(path: Path, schema: Any) -> Tuple[Any, yaml.Node]:
    data, node = _read(path)
    adapter = schema if isinstance(schema, TypeAdapter) else TypeAdapter(schema)
    try:
        return adapter.validate_python(data), node
    except ValidationError as e:
        first = e.errors()[0]
        where = ".".join(str(part) for part in first["loc"]) or "record"
        raise RecordError(path, _line_of(node, first["loc"]), f"{where}: {first['msg']}")


def _domain(path: Path, node: yaml.Node, build):
    try:
        return build()
    except DomainError as e:
        raise RecordError(path, node.start_mark.line + 1, str(e))


_BUILTIN = re.compile(r"^(k|t|c|sc|p|e|bt)(\d+)$")


def builtin_graph(name: str) -> Optional[DirectedGraph]:
    """Named graphs: k<p>, t<p>, c<n>, sc<n>, p<n>, e<n>, bt<depth> and 'loop'."""
    name = name.strip().lower()
    if name == "loop":
        return loop_graph()
    match = _BUILTIN.match(name)
    if not match:
        return None
    family, size = match.group(1), int(match.group(2))
    builders = {
        "k": complete_graph,
        "t": transitive_tournament,
        "c": directed_cycle,
        "sc": symmetric_cycle,
        "p": symmetric_path,
        "e": edgeless_graph,
        "bt": binary_tree,
    }
    return builders[family](size)


def load_graph(source: Union[str, Path]) -> DirectedGraph:
    """A builtin graph name or a graph record file.

    Raises:
        RecordError: For unreadable or malformed files, duplicate or out-of-range edges
    """
    if isinstance(source, str):
        graph = builtin_graph(source)
        if graph is not None:
            return graph
    path = Path(source)
    record, node = _validate(path, GraphRecord)
    seen = set()
    for index, edge in enumerate(record.edges):
        if edge in seen:
            raise RecordError(path, _line_of(node, ("edges", index)), f"duplicate edge {list(edge)}")
        seen.add(edge)
        if not all(0 <= v < record.vertex_count for v in edge):
            raise RecordError(
                path, _line_of(node, ("edges", index)),
                f"edge {list(edge)} has an endpoint outside 0..{record.vertex_count - 1}",
            )
    return DirectedGraph.from_edges(record.vertex_count, record.edges)


def model_from_record(record: Union[BernoulliRecord, MixtureRecord, AtomsRecord]) -> MeasureModel:
    if isinstance(record, BernoulliRecord):
        return BernoulliModel(SimplexDist(tuple(record.weights)), record.window)
    if isinstance(record, MixtureRecord):
        return MixtureModel([(c.weight, SimplexDist(tuple(c.weights))) for c in record.components], record.window)
    return AtomsModel(record.alphabet, record.window, [(a.probability, a.word) for a in record.atoms])


def load_model(path: Union[str, Path]) -> MeasureModel:
    path = Path(path)
    record, node = _validate(path, TypeAdapter(ModelRecord))
    return _domain(path, node, lambda: model_from_record(record))


def load_tuple_function(path: Union[str, Path]) -> TupleFunction:
    path = Path(path)
    record, node = _validate(path, TupleTableRecord)
    return _domain(path, node, lambda: TupleFunction.from_values(record.arity, record.size, record.values))


def load_points(path: Union[str, Path]) -> MetricPoints:
    path = Path(path)
    record, node = _validate(path, PointsRecord)
    if record.vectors is not None:
        return _domain(path, node, lambda: MetricPoints.from_vectors(record.vectors))
    return _domain(path, node, lambda: MetricPoints.from_matrix(record.matrix))


def load_mu(path: Union[str, Path]) -> SimplexDist:
    path = Path(path)
    record, node = _validate(path, MuRecord)
    return _domain(path, node, lambda: SimplexDist(tuple(record.mu)))


def load_rows(path: Union[str, Path], mu: SimplexDist) -> IndicatorRows:
    path = Path(path)
    record, node = _validate(path, RowsRecord)
    for index, row in enumerate(record.rows):
        if any(v not in (0, 1) for v in row):
            raise RecordError(path, _line_of(node, ("rows", index)), "indicator rows hold only 0 and 1")
    return _domain(
        path, node,
        lambda: IndicatorRows(record.arity, record.size, np.asarray(record.rows, dtype=bool).reshape(len(record.rows), -1), mu),
    )


def load_index_metric(path: Union[str, Path]) -> IndexMetric:
    path = Path(path)
    record, node = _validate(path, IndexMetricRecord)
    if record.geometric is not None:
        return _domain(path, node, lambda: IndexMetric.geometric(record.geometric, record.scale))
    if record.harmonic is not None:
        return _domain(path, node, lambda: IndexMetric.harmonic(record.harmonic))
    return _domain(path, node, lambda: IndexMetric(np.asarray(record.table, dtype=float)))


# Output

def clean_values(value: Any, digits: int) -> Any:
    """Plain YAML-safe values with floats at the given significant digits."""
    if isinstance(value, dict):
        return {str(k): clean_values(v, digits) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [clean_values(v, digits) for v in value]
    if isinstance(value, np.ndarray):
        return clean_values(value.tolist(), digits)
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        return float(f"{float(value):.{digits}g}")
    if isinstance(value, Path):
        return str(value)
    if hasattr(value, "value"):
        return value.value
    return value


def render_record(kind: str, payload: Dict[str, Any], echo: Optional[Dict[str, Any]] = None) -> str:
    """Tagged record: ``record`` first, then the payload, then the config echo."""
    digits = settings.significant_digits
    document: Dict[str, Any] = {"record": kind}
    document.update(payload)
    if echo is not None:
        document["config"] = echo
    return yaml.safe_dump(clean_values(document, digits), sort_keys=False, default_flow_style=None, allow_unicode=True)
