import json
import logging
from pathlib import Path
from typing import Dict, List, Literal, Optional, Tuple, Union

import numpy as np
import yaml
from pydantic import BaseModel, Field, ValidationError, field_validator

from ..exceptions import InstanceFormatError
from ..forest.instance import ForestInstance, build_instance
from ..forest.oracle import QuadraticSpec, TableObjective, ValueOracle

logger = logging.getLogger(__name__)

INSTANCE_SUFFIXES = (".json", ".yaml", ".yml")


def _parse_bound(value) -> float:
    if value is None:
        return np.inf
    if isinstance(value, str):
        if value.strip().lower() in ("inf", "+inf", "infinity", ".inf"):
            return np.inf
        return float(value)
    return float(value)


class TableEntry(BaseModel):
    point: List[int]
    value: float


class ObjectiveDocument(BaseModel):
    """
    quadratic: z^T Q z + c^T z. linear: c^T z. coverage (binary instances):
    total weight of the elements covered by {i : z_i = 1} minus the rewards
    of those i. table: explicit values on integer points.
    """
    type: Literal["quadratic", "linear", "coverage", "table"] = Field(description="Objective family.")
    Q: Optional[List[List[float]]] = None
    c: Optional[List[float]] = None
    sets: Optional[List[List[int]]] = Field(default=None, description="Elements covered by each vertex.")
    weights: Optional[Dict[int, float]] = Field(default=None, description="Element weights (default 1).")
    rewards: Optional[List[float]] = Field(default=None, description="Per-vertex reward subtracted from coverage.")
    entries: Optional[List[TableEntry]] = None


class InstanceDocument(BaseModel):
    name: str = Field(default="", description="Defaults to the file stem.")
    n: int = Field(gt=0, description="Vertex count; vertices are 1..n.")
    arcs: List[Tuple[int, int]] = Field(default_factory=list)
    u: List[float] = Field(description="Upper bounds; null, 'inf' or .inf for +infinity.")
    integer: List[int] = Field(default_factory=list, description="Vertices restricted to integers.")
    objective: Optional[ObjectiveDocument] = None
    a: Optional[List[float]] = Field(default=None, description="Linear objective for linopt.")
    point: Optional[List[float]] = Field(default=None, description="Query point for decompose and separate.")
    w: Optional[float] = Field(default=None, description="Epigraph value paired with point.")

    @field_validator("u", mode="before")
    @classmethod
    def _bounds(cls, value):
        if not isinstance(value, list):
            raise ValueError("u must be a list")
        return [_parse_bound(v) for v in value]

    def build(self) -> ForestInstance:
        return build_instance(self.n, self.arcs, self.u, self.integer)

    def build_oracle(self) -> ValueOracle:
        if self.objective is None:
            raise InstanceFormatError(f"Instance '{self.name}' has no objective")
        return build_oracle(self.objective, self.n, self.name)


def _coverage(objective: ObjectiveDocument, n: int):
    sets = [set(s) for s in (objective.sets or [])]
    if len(sets) != n:
        raise InstanceFormatError(f"Coverage objective needs {n} sets, got {len(sets)}")
    weights = objective.weights or {}
    rewards = np.asarray(objective.rewards or [0.0] * n, dtype=float)

    def evaluate(z: np.ndarray) -> float:
        chosen = [i for i in range(n) if z[i] > 0.5]
        covered = set().union(*(sets[i] for i in chosen)) if chosen else set()
        return float(sum(weights.get(e, 1.0) for e in covered) - rewards[chosen].sum())

    return evaluate


def build_oracle(objective: ObjectiveDocument, n: int, name: str = "oracle") -> ValueOracle:
    if objective.type == "quadratic":
        if objective.Q is None or objective.c is None:
            raise InstanceFormatError("Quadratic objective needs Q and c")
        spec = QuadraticSpec(objective.Q, objective.c)
        if spec.dimension != n:
            raise InstanceFormatError(f"Quadratic objective has dimension {spec.dimension}, instance has {n}")
        oracle = ValueOracle.from_quadratic(spec)
    elif objective.type == "linear":
        c = np.asarray(objective.c or [], dtype=float)
        if c.shape != (n,):
            raise InstanceFormatError(f"Linear objective has {c.shape[0]} entries, instance has {n}")
        oracle = ValueOracle(lambda z: float(c @ z), n)
    elif objective.type == "coverage":
        oracle = ValueOracle(_coverage(objective, n), n)
    else:
        table = TableObjective({tuple(e.point): e.value for e in objective.entries or []})
        oracle = ValueOracle(table, n)
    oracle.name = f"{name}:{objective.type}"
    return oracle


def _read_data(path: Path, what: str):
    if not path.is_file():
        raise InstanceFormatError(f"{what} file not found: {path}")
    try:
        with path.open("r", encoding="utf-8") as f:
            return json.load(f) if path.suffix == ".json" else yaml.safe_load(f)
    except (json.JSONDecodeError, yaml.YAMLError) as e:
        raise InstanceFormatError(f"Could not parse {path}: {e}") from e


def load_document(path: Union[str, Path]) -> InstanceDocument:
    """Parses one instance file; every failure surfaces as InstanceFormatError."""
    path = Path(path)
    data = _read_data(path, "Instance")
    if not isinstance(data, dict):
        raise InstanceFormatError(f"Instance file {path} is not a mapping")
    data.setdefault("name", path.stem)
    try:
        return InstanceDocument.model_validate(data)
    except ValidationError as e:
        raise InstanceFormatError(f"Instance file {path} does not match the schema: {e}") from e


def load_vector(path: Union[str, Path], key: str) -> List[float]:
    """
    Reads a vector from a JSON/YAML file holding either a bare list of numbers
    or a mapping with the list under key (as in an instance document).
    """
    path = Path(path)
    data = _read_data(path, "Vector")
    if isinstance(data, dict):
        if key not in data:
            raise InstanceFormatError(f"Vector file {path} has no '{key}' entry")
        data = data[key]
    if not isinstance(data, list):
        raise InstanceFormatError(f"Vector file {path} does not hold a list of numbers")
    try:
        return [float(v) for v in data]
    except (TypeError, ValueError) as e:
        raise InstanceFormatError(f"Vector file {path} has a non-numeric entry: {e}") from e


class InstanceRepository:
    """Loads instance documents from a single file or a directory of JSON/YAML files."""

    def __init__(self, instance_path: Union[str, Path]):
        self.instance_path = Path(instance_path)
        self.documents: Dict[str, InstanceDocument] = self._load_documents()

    def _load_documents(self) -> Dict[str, InstanceDocument]:
        if self.instance_path.is_file():
            document = load_document(self.instance_path)
            return {document.name: document}
        if not self.instance_path.is_dir():
            logger.error(f"Instance path not found: {self.instance_path}")
            return {}

        documents = {}
        for instance_file in sorted(self.instance_path.iterdir()):
            if instance_file.suffix not in INSTANCE_SUFFIXES:
                continue
            try:
                document = load_document(instance_file)
            except InstanceFormatError as e:
                logger.error(f"Skipping {instance_file}: {e}")
                continue
            documents[document.name] = document

        logger.info(f"Loaded {len(documents)} instances from {self.instance_path}.")
        return documents

    def get_document(self, name: str) -> Optional[InstanceDocument]:
        document = self.documents.get(name)
        if document is None:
            logger.warning(f"Instance '{name}' not found.")
        return document

    def list_instances(self) -> List[str]:
        return list(self.documents.keys())

    def load_instance(self, name: str) -> ForestInstance:
        document = self.get_document(name)
        if document is None:
            raise InstanceFormatError(f"Unknown instance '{name}'")
        return document.build()

    def load_oracle(self, name: str) -> ValueOracle:
        document = self.get_document(name)
        if document is None:
            raise InstanceFormatError(f"Unknown instance '{name}'")
        return document.build_oracle()
