"""File formats: JSON schemas, CSV datasets, and DOT graph export.

The schema file is a JSON list of {"name", "kind": "discrete"|"gaussian",
"labels"?}. CSV files carry a header row matching the schema names;
discrete cells hold labels, Gaussian cells decimal reals written with 17
significant digits so a write/read round trip is lossless.
"""

from __future__ import annotations

import csv
import io
import json
from pathlib import Path
from typing import Union

from .core import Dataset, Discrete, Gaussian, Variable, VariableSchema, validate_dataset
from .errors import DataFormatError, DendrofitError, SchemaMismatch

PathLike = Union[str, Path]


def format_gaussian_cell(value: float) -> str:
    return format(float(value), ".17g")


# -- schemas -------------------------------------------------------------------


def schema_to_jsonable(schema: VariableSchema) -> list[dict]:
    out = []
    for var in schema.variables:
        if isinstance(var.kind, Discrete):
            out.append(
                {"name": var.name, "kind": "discrete", "labels": list(var.kind.labels)}
            )
        else:
            out.append({"name": var.name, "kind": "gaussian"})
    return out


def schema_from_jsonable(obj) -> VariableSchema:
    if not isinstance(obj, list):
        raise DataFormatError("schema document must be a JSON list of variables")
    variables = []
    for k, entry in enumerate(obj):
        if not isinstance(entry, dict) or "name" not in entry or "kind" not in entry:
            raise DataFormatError(
                f"schema entry {k} must be an object with 'name' and 'kind'"
            )
        kind = entry["kind"]
        if kind == "discrete":
            labels = entry.get("labels")
            if not isinstance(labels, list) or not labels:
                raise DataFormatError(
                    f"schema entry {k} ({entry['name']!r}): discrete variables "
                    "need a nonempty 'labels' list"
                )
            try:
                variables.append(Variable(entry["name"], Discrete(tuple(labels))))
            except ValueError as err:
                raise DataFormatError(f"schema entry {k}: {err}") from err
        elif kind == "gaussian":
            variables.append(Variable(entry["name"], Gaussian()))
        else:
            raise DataFormatError(
                f"schema entry {k}: unknown kind {kind!r} "
                "(expected 'discrete' or 'gaussian')"
            )
    try:
        return VariableSchema(tuple(variables))
    except ValueError as err:
        raise DataFormatError(str(err)) from err


def read_schema(path: PathLike) -> VariableSchema:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
    except json.JSONDecodeError as err:
        raise DataFormatError(f"{path}: invalid JSON: {err}") from err
    try:
        return schema_from_jsonable(doc)
    except DataFormatError as err:
        raise DataFormatError(f"{path}: {err}") from err


def write_schema(path: PathLike, schema: VariableSchema) -> None:
    Path(path).write_text(
        json.dumps(schema_to_jsonable(schema), indent=2) + "\n", encoding="utf-8"
    )


# -- CSV datasets ---------------------------------------------------------------


def read_csv_dataset(path: PathLike, schema: VariableSchema) -> Dataset:
    """Read a header-bearing CSV against a schema; errors carry file line
    numbers."""
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise DataFormatError(f"{path}: empty file (missing header row)") from None
        if tuple(header) != schema.names:
            raise SchemaMismatch(
                f"{path}: header {header} does not match schema columns "
                f"{list(schema.names)}"
            )
        rows = list(reader)
    try:
        return validate_dataset(schema, rows)
    except DendrofitError as err:
        row = getattr(err, "row_index", None)
        if row is not None:
            raise type(err)(f"{path} line {row + 2}: {err}") from err
        raise type(err)(f"{path}: {err}") from err


def write_csv_dataset(path: PathLike, dataset: Dataset) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(render_csv(dataset))


def render_csv(dataset: Dataset) -> str:
    """CSV text with labels for discrete cells and 17-significant-digit
    decimals for Gaussian cells."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(dataset.schema.names)
    gaussian_cols = {
        i for i in range(dataset.schema.n_vars) if not dataset.schema.is_discrete(i)
    }
    for row in dataset.iter_rows():
        writer.writerow(
            [
                format_gaussian_cell(cell) if i in gaussian_cols else cell
                for i, cell in enumerate(row)
            ]
        )
    return buf.getvalue()


# -- DOT export -------------------------------------------------------------------


def forest_dot(schema: VariableSchema, decisions) -> str:
    """Graphviz text for the accepted edges, labeled with the mutual
    information and net score rounded to 4 decimals."""
    lines = ["graph dendroid {"]
    for i in range(schema.n_vars):
        kind = "discrete" if schema.is_discrete(i) else "gaussian"
        lines.append(f'  "{schema.name(i)}" [comment="{kind}"];')
    accepted = sorted(
        (d.edge for d in decisions if d.accepted), key=lambda e: (e.i, e.j)
    )
    for edge in accepted:
        lines.append(
            f'  "{schema.name(edge.i)}" -- "{schema.name(edge.j)}" '
            f'[label="I={edge.mi:.4f} J={edge.score:.4f}"];'
        )
    lines.append("}")
    return "\n".join(lines) + "\n"
