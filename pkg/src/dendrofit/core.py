"""Domain types shared by every module: variable schemas, datasets,
scored edges, and (rooted) forests.

Conventions used throughout the package:

* vertices are 0-based indices into the schema,
* discrete categories are dense 0-based indices fixed by schema label order,
* all information quantities are in nats,
* a missing parent in a rooted forest is encoded as ``None``.

All types here are immutable after construction and safe to share across
workers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterator, Optional, Sequence, Union

import numpy as np

from .errors import (
    ArityMismatch,
    CyclicInput,
    EmptyDataset,
    NonFiniteValue,
    UnknownCategory,
)


@dataclass(frozen=True)
class Discrete:
    """A finite-valued variable with an ordered tuple of category labels.

    The cardinality is the number of labels; categories are encoded as the
    0-based position of their label.
    """

    labels: tuple[str, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "labels", tuple(str(s) for s in self.labels))
        if len(self.labels) < 2:
            raise ValueError(
                f"a discrete variable needs at least 2 categories, got {len(self.labels)}"
            )
        if len(set(self.labels)) != len(self.labels):
            raise ValueError(f"duplicate category labels: {list(self.labels)}")

    @property
    def cardinality(self) -> int:
        return len(self.labels)


@dataclass(frozen=True)
class Gaussian:
    """A real-valued variable modeled as a (univariate) normal."""


VariableKind = Union[Discrete, Gaussian]


@dataclass(frozen=True)
class Variable:
    name: str
    kind: VariableKind

    def __post_init__(self) -> None:
        if not self.name:
            raise ValueError("variable names must be nonempty")


@dataclass(frozen=True)
class VariableSchema:
    """Ordered list of named variables; defines the vertex set 0..N-1."""

    variables: tuple[Variable, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "variables", tuple(self.variables))
        if not self.variables:
            raise ValueError("a schema needs at least one variable")
        names = [v.name for v in self.variables]
        if len(set(names)) != len(names):
            raise ValueError(f"duplicate variable names: {names}")

    @property
    def n_vars(self) -> int:
        return len(self.variables)

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(v.name for v in self.variables)

    def kind(self, i: int) -> VariableKind:
        return self.variables[i].kind

    def name(self, i: int) -> str:
        return self.variables[i].name

    def is_discrete(self, i: int) -> bool:
        return isinstance(self.variables[i].kind, Discrete)

    def cardinality(self, i: int) -> int:
        kind = self.variables[i].kind
        if not isinstance(kind, Discrete):
            raise ValueError(f"variable {self.name(i)!r} is not discrete")
        return kind.cardinality


@dataclass(frozen=True, eq=False)
class Dataset:
    """n rows of mixed values, stored column-wise.

    Discrete columns are int64 category indices, Gaussian columns are
    float64. Columns are read-only after construction.
    """

    schema: VariableSchema
    columns: tuple[np.ndarray, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "columns", tuple(self.columns))
        if len(self.columns) != self.schema.n_vars:
            raise ValueError(
                f"expected {self.schema.n_vars} columns, got {len(self.columns)}"
            )
        lengths = {col.shape[0] for col in self.columns}
        if len(lengths) > 1:
            raise ValueError(f"ragged columns: lengths {sorted(lengths)}")
        if lengths == {0}:
            raise EmptyDataset("a dataset needs at least one row")
        for i, col in enumerate(self.columns):
            name = self.schema.name(i)
            if col.ndim != 1:
                raise ValueError(f"column {name!r} is not 1-D")
            if self.schema.is_discrete(i):
                if col.dtype != np.int64:
                    raise ValueError(f"discrete column {name!r} must be int64")
                card = self.schema.cardinality(i)
                if col.size and (col.min() < 0 or col.max() >= card):
                    raise ValueError(
                        f"column {name!r} has category indices outside [0, {card - 1}]"
                    )
            else:
                if col.dtype != np.float64:
                    raise ValueError(f"gaussian column {name!r} must be float64")
                if not np.isfinite(col).all():
                    raise NonFiniteValue(f"column {name!r} contains non-finite values")
            col.setflags(write=False)

    @property
    def n(self) -> int:
        return self.columns[0].shape[0]

    def column(self, i: int) -> np.ndarray:
        return self.columns[i]

    def iter_rows(self) -> Iterator[list]:
        """Yield rows with discrete cells rendered back to their labels."""
        kinds = self.schema.variables
        for r in range(self.n):
            row = []
            for i, var in enumerate(kinds):
                cell = self.columns[i][r]
                if isinstance(var.kind, Discrete):
                    row.append(var.kind.labels[int(cell)])
                else:
                    row.append(float(cell))
            yield row


def validate_dataset(schema: VariableSchema, raw_rows: Sequence[Sequence]) -> Dataset:
    """Validate raw records against a schema and build a Dataset.

    Discrete cells must be category labels (mapped to indices by schema
    label order); Gaussian cells must be finite reals, or strings that
    parse as such.

    Raises
    ------
    EmptyDataset, ArityMismatch, UnknownCategory, NonFiniteValue
    """
    rows = list(raw_rows)
    if not rows:
        raise EmptyDataset("no data rows")
    n_vars = schema.n_vars
    label_maps = {
        i: {label: k for k, label in enumerate(schema.kind(i).labels)}
        for i in range(n_vars)
        if schema.is_discrete(i)
    }
    def row_error(cls: type, r: int, message: str) -> Exception:
        err = cls(f"row {r}: {message}")
        err.row_index = r  # lets file readers report the source line
        return err

    columns: list[list] = [[] for _ in range(n_vars)]
    for r, row in enumerate(rows):
        cells = list(row)
        if len(cells) != n_vars:
            raise row_error(
                ArityMismatch, r, f"expected {n_vars} cells, got {len(cells)}"
            )
        for i, cell in enumerate(cells):
            if i in label_maps:
                try:
                    columns[i].append(label_maps[i][cell])
                except (KeyError, TypeError):
                    raise row_error(
                        UnknownCategory,
                        r,
                        f"{cell!r} is not a category of {schema.name(i)!r} "
                        f"(labels: {list(schema.kind(i).labels)})",
                    ) from None
            else:
                try:
                    value = float(cell)
                except (TypeError, ValueError):
                    raise row_error(
                        NonFiniteValue,
                        r,
                        f"{cell!r} is not a real value for {schema.name(i)!r}",
                    ) from None
                if not math.isfinite(value):
                    raise row_error(
                        NonFiniteValue,
                        r,
                        f"non-finite value {value!r} for {schema.name(i)!r}",
                    )
                columns[i].append(value)
    arrays = tuple(
        np.asarray(columns[i], dtype=np.int64 if i in label_maps else np.float64)
        for i in range(n_vars)
    )
    return Dataset(schema=schema, columns=arrays)


@dataclass(frozen=True)
class ScoredEdge:
    """A vertex pair with its estimated mutual information (sample-scaled,
    nats), penalty, and net score = mi - penalty."""

    i: int
    j: int
    mi: float
    penalty: float
    score: float

    def __post_init__(self) -> None:
        if not 0 <= self.i < self.j:
            raise ValueError(f"need 0 <= i < j, got ({self.i}, {self.j})")
        if not (self.mi >= 0.0):
            raise ValueError(f"mi must be >= 0, got {self.mi}")
        if not (self.penalty >= 0.0):
            raise ValueError(f"penalty must be >= 0, got {self.penalty}")
        if self.score != self.mi - self.penalty:
            raise ValueError(
                f"score {self.score} != mi - penalty = {self.mi - self.penalty}"
            )

    @classmethod
    def from_mi(cls, i: int, j: int, mi: float, penalty: float = 0.0) -> "ScoredEdge":
        """Build an edge, clamping tiny negative mi rounding noise to 0."""
        if -1e-9 < mi < 0.0:
            mi = 0.0
        return cls(i=i, j=j, mi=mi, penalty=penalty, score=mi - penalty)


class _UnionFind:
    """Minimal union-find for acyclicity validation (see forest module for
    the full Kruskal support structure)."""

    def __init__(self, n: int) -> None:
        self.parent = list(range(n))

    def find(self, x: int) -> int:
        root = x
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[x] != root:
            self.parent[x], x = root, self.parent[x]
        return root

    def union(self, a: int, b: int) -> bool:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        self.parent[rb] = ra
        return True


@dataclass(frozen=True)
class Forest:
    """An acyclic undirected edge set over vertices 0..n_vertices-1."""

    n_vertices: int
    edges: frozenset[tuple[int, int]]

    def __post_init__(self) -> None:
        if self.n_vertices < 1:
            raise ValueError("a forest needs at least one vertex")
        object.__setattr__(self, "edges", frozenset(self.edges))
        uf = _UnionFind(self.n_vertices)
        for i, j in sorted(self.edges):
            if i == j:
                raise CyclicInput(f"self-loop at vertex {i}")
            if not (0 <= i < j < self.n_vertices):
                raise ValueError(f"edge ({i}, {j}) out of range or not normalized")
            if not uf.union(i, j):
                raise CyclicInput(f"edge ({i}, {j}) closes a loop")

    @classmethod
    def from_edges(cls, n_vertices: int, pairs: Sequence[tuple[int, int]]) -> "Forest":
        """Normalize unordered pairs to (min, max) and validate."""
        normalized = frozenset((min(i, j), max(i, j)) for i, j in pairs)
        return cls(n_vertices=n_vertices, edges=normalized)

    @property
    def sorted_edges(self) -> tuple[tuple[int, int], ...]:
        return tuple(sorted(self.edges))

    def neighbors(self, v: int) -> list[int]:
        out = []
        for i, j in self.edges:
            if i == v:
                out.append(j)
            elif j == v:
                out.append(i)
        return sorted(out)


@dataclass(frozen=True)
class RootedForest:
    """A parent map over 0..N-1; ``None`` marks a component root."""

    parents: tuple[Optional[int], ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "parents", tuple(self.parents))
        n = len(self.parents)
        for v, p in enumerate(self.parents):
            if p is None:
                continue
            if not 0 <= p < n:
                raise ValueError(f"parent {p} of vertex {v} out of range")
            # walk to a root; more than n steps means a cycle
            steps = 0
            cur: Optional[int] = v
            while cur is not None:
                cur = self.parents[cur]
                steps += 1
                if steps > n:
                    raise CyclicInput(f"parent map cycles through vertex {v}")

    @property
    def n_vertices(self) -> int:
        return len(self.parents)

    @property
    def roots(self) -> tuple[int, ...]:
        return tuple(v for v, p in enumerate(self.parents) if p is None)

    def undirected(self) -> Forest:
        pairs = [(v, p) for v, p in enumerate(self.parents) if p is not None]
        return Forest.from_edges(len(self.parents), pairs)

    def topological_order(self) -> list[int]:
        """Vertices ordered so every parent precedes its children;
        deterministic (lowest id first among the ready)."""
        n = len(self.parents)
        done = [False] * n
        order: list[int] = []
        while len(order) < n:
            for v in range(n):
                if done[v]:
                    continue
                p = self.parents[v]
                if p is None or done[p]:
                    done[v] = True
                    order.append(v)
        return order


def orient_forest(forest: Forest, schema: VariableSchema) -> RootedForest:
    """Pick one root per component and orient edges away from it.

    When a component contains discrete vertices the lowest-id discrete
    vertex becomes the root, so that mixed edges are oriented with the
    discrete endpoint as the parent wherever possible; otherwise the
    lowest-id vertex is the root. Deterministic given its input.
    """
    if forest.n_vertices != schema.n_vars:
        raise ValueError(
            f"forest has {forest.n_vertices} vertices but schema has {schema.n_vars}"
        )
    n = forest.n_vertices
    adjacency: dict[int, list[int]] = {v: [] for v in range(n)}
    for i, j in forest.sorted_edges:
        adjacency[i].append(j)
        adjacency[j].append(i)

    parents: list[Optional[int]] = [None] * n
    seen = [False] * n
    for start in range(n):
        if seen[start]:
            continue
        # collect the component first so the root can be chosen before orienting
        component = [start]
        seen[start] = True
        head = 0
        while head < len(component):
            v = component[head]
            head += 1
            for w in adjacency[v]:
                if not seen[w]:
                    seen[w] = True
                    component.append(w)
        discrete = [v for v in component if schema.is_discrete(v)]
        root = min(discrete) if discrete else min(component)
        stack = [root]
        visited = {root}
        while stack:
            v = stack.pop()
            for w in sorted(adjacency[v]):
                if w not in visited:
                    visited.add(w)
                    parents[w] = v
                    stack.append(w)
    return RootedForest(parents=tuple(parents))
