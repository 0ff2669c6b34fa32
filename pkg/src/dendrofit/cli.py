"""Command-line front end.

Subcommands: ``learn`` (structure + optional model), ``score`` (the full
pairwise I/J table), ``sample`` (synthetic rows from a model JSON), and
``eval`` (likelihood and description length of data under a model).
A hidden ``oracle-forest`` subcommand runs the exhaustive search on a
score table for debugging.

Exit codes: 0 success, 1 runtime/estimation error, 2 usage/IO error.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Sequence

from . import __version__
from .core import ScoredEdge
from .dataio import (
    forest_dot,
    read_csv_dataset,
    read_schema,
    render_csv,
    format_gaussian_cell,
)
from .errors import (
    ArityMismatch,
    DataFormatError,
    DendrofitError,
    EmptyDataset,
    InvalidCount,
    NonFiniteValue,
    SchemaMismatch,
    UnknownCategory,
)
from .estimators import QuadratureSpec
from .forest import build_forest_suzuki, build_tree_chow_liu, kruskal_decisions
from .model import DendroidModel, description_length, fit, log_likelihood, sample
from .oracle import brute_force_best_forest
from .scoring import Criterion, score_all_pairs

FOREST_FORMAT = "dendrofit-forest"
FOREST_VERSION = 1

_USAGE_ERRORS = (
    UnknownCategory,
    NonFiniteValue,
    ArityMismatch,
    EmptyDataset,
    SchemaMismatch,
    InvalidCount,
    DataFormatError,
)


@dataclass(frozen=True)
class RunConfig:
    """Parsed invocation: paths, criterion, quadrature, output options."""

    command: str
    data: Optional[str] = None
    schema: Optional[str] = None
    criterion: str = "ml"
    dn: Optional[float] = None
    quad_order: int = 64
    quad_tol: float = 1e-8
    fmt: Optional[str] = None
    out: Optional[str] = None
    model: Optional[str] = None
    model_out: Optional[str] = None
    seed: int = 0
    count: int = 0
    scores: Optional[str] = None
    spanning: bool = False

    def make_criterion(self) -> Criterion:
        if self.criterion == "custom":
            if self.dn is None:
                raise DataFormatError("--criterion custom requires --dn")
            return Criterion.custom(self.dn)
        if self.dn is not None:
            if self.criterion == "ml":
                raise DataFormatError("--dn cannot be combined with --criterion ml")
            return Criterion.custom(self.dn)  # d_n override
        return Criterion(self.criterion)

    def make_quadrature(self) -> QuadratureSpec:
        try:
            return QuadratureSpec(order=self.quad_order, tolerance=self.quad_tol)
        except ValueError as err:
            raise DataFormatError(str(err)) from err


def _json_text(doc) -> str:
    return json.dumps(doc, indent=2) + "\n"


def _artifact_paths(out: str, fmt: str) -> dict[str, Path]:
    base = out
    for suffix in (".json", ".dot"):
        if out.lower().endswith(suffix):
            base = out[: -len(suffix)]
            break
    paths = {}
    if fmt in ("json", "both"):
        paths["json"] = Path(base + ".json")
    if fmt in ("dot", "both"):
        paths["dot"] = Path(base + ".dot")
    return paths


def _edge_report(schema, decisions) -> list[dict]:
    report = []
    for d in decisions:
        e = d.edge
        report.append(
            {
                "i": e.i,
                "j": e.j,
                "name_i": schema.name(e.i),
                "name_j": schema.name(e.j),
                "mi": e.mi,
                "penalty": e.penalty,
                "score": e.score,
                "accepted": d.accepted,
                "reason": d.reason,
            }
        )
    return report


def _print_report(schema, decisions, stream) -> None:
    rows = [("i", "j", "pair", "I_n", "penalty", "J_n", "decision")]
    for d in decisions:
        e = d.edge
        decision = "accepted" if d.accepted else f"rejected ({d.reason})"
        rows.append(
            (
                str(e.i),
                str(e.j),
                f"({schema.name(e.i)}, {schema.name(e.j)})",
                f"{e.mi:.4f}",
                f"{e.penalty:.4f}",
                f"{e.score:.4f}",
                decision,
            )
        )
    widths = [max(len(r[c]) for r in rows) for c in range(len(rows[0]))]
    for r in rows:
        print("  ".join(cell.ljust(w) for cell, w in zip(r, widths)).rstrip(), file=stream)


def cmd_learn(config: RunConfig) -> int:
    schema = read_schema(config.schema)
    dataset = read_csv_dataset(config.data, schema)
    criterion = config.make_criterion()
    quad = config.make_quadrature()
    dn = criterion.dn(dataset.n)

    edges = score_all_pairs(dataset, criterion, quad)
    penalized = criterion.kind != "ml"
    decisions = kruskal_decisions(edges, penalized=penalized, n_vertices=schema.n_vars)
    if penalized:
        forest = build_forest_suzuki(edges, n_vertices=schema.n_vars)
    else:
        forest = build_tree_chow_liu(edges, n_vertices=schema.n_vars)

    fitted = fit(dataset, forest)
    ll = log_likelihood(fitted, dataset)
    dl = description_length(fitted, dataset, criterion)

    out = sys.stdout
    print(f"n={dataset.n} variables={schema.n_vars} criterion={criterion.kind} dn={dn!r}", file=out)
    _print_report(schema, decisions, out)
    total = sum(d.edge.score for d in decisions if d.accepted)
    print(f"edges_selected={len(forest.edges)} total_score={total!r}", file=out)
    print(f"log_likelihood={ll!r}", file=out)
    print(f"param_count={fitted.param_count}", file=out)
    print(f"description_length={dl!r}", file=out)

    doc = {
        "format": FOREST_FORMAT,
        "version": FOREST_VERSION,
        "criterion": {"kind": criterion.kind, "dn": dn},
        "n": dataset.n,
        "variables": list(schema.names),
        "edges": [list(e) for e in forest.sorted_edges],
        "report": _edge_report(schema, decisions),
        "log_likelihood": ll,
        "param_count": fitted.param_count,
        "description_length": dl,
    }
    fmt = config.fmt or "json"
    if config.out:
        paths = _artifact_paths(config.out, fmt)
        if "json" in paths:
            paths["json"].write_text(_json_text(doc), encoding="utf-8")
        if "dot" in paths:
            paths["dot"].write_text(forest_dot(schema, decisions), encoding="utf-8")
    if config.model_out:
        Path(config.model_out).write_text(
            _json_text(fitted.to_json_dict()), encoding="utf-8"
        )
    return 0


def cmd_score(config: RunConfig) -> int:
    schema = read_schema(config.schema)
    dataset = read_csv_dataset(config.data, schema)
    criterion = config.make_criterion()
    quad = config.make_quadrature()
    edges = score_all_pairs(dataset, criterion, quad)

    fmt = config.fmt or "csv"
    if fmt == "json":
        doc = {
            "criterion": {"kind": criterion.kind, "dn": criterion.dn(dataset.n)},
            "n": dataset.n,
            "variables": list(schema.names),
            "pairs": [
                {
                    "i": e.i,
                    "j": e.j,
                    "name_i": schema.name(e.i),
                    "name_j": schema.name(e.j),
                    "mi": e.mi,
                    "penalty": e.penalty,
                    "score": e.score,
                }
                for e in edges
            ],
        }
        text = _json_text(doc)
    else:
        lines = ["i,j,name_i,name_j,mi,penalty,score"]
        for e in edges:
            lines.append(
                f"{e.i},{e.j},{schema.name(e.i)},{schema.name(e.j)},"
                f"{format_gaussian_cell(e.mi)},{format_gaussian_cell(e.penalty)},"
                f"{format_gaussian_cell(e.score)}"
            )
        text = "\n".join(lines) + "\n"
    if config.out:
        Path(config.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return 0


def _load_model(path: str) -> DendroidModel:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
    except json.JSONDecodeError as err:
        raise DataFormatError(f"{path}: invalid JSON: {err}") from err
    try:
        return DendroidModel.from_json_dict(doc)
    except (ValueError, KeyError, TypeError) as err:
        raise DataFormatError(f"{path}: not a valid model document: {err}") from err


def cmd_sample(config: RunConfig) -> int:
    model = _load_model(config.model)
    drawn = sample(model, config.count, config.seed)
    text = render_csv(drawn)
    if config.out:
        Path(config.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return 0


def cmd_eval(config: RunConfig) -> int:
    model = _load_model(config.model)
    dataset = read_csv_dataset(config.data, model.schema)
    criterion = config.make_criterion()
    ll = log_likelihood(model, dataset)
    dn = criterion.dn(dataset.n)
    dl = description_length(model, dataset, criterion)
    print(f"log_likelihood={ll!r}")
    print(f"param_count={model.param_count}")
    print(f"dn={dn!r}")
    print(f"description_length={dl!r}")
    return 0


def cmd_oracle_forest(config: RunConfig) -> int:
    """Debug helper: exhaustive best forest from a score JSON (the output
    of ``score --format json``)."""
    with open(config.scores, "r", encoding="utf-8") as fh:
        doc = json.load(fh)
    edges = [
        ScoredEdge(p["i"], p["j"], p["mi"], p["penalty"], p["score"])
        for p in doc["pairs"]
    ]
    n = len(doc["variables"])
    forest = brute_force_best_forest(edges, require_spanning_tree=config.spanning, n_vertices=n)
    print(json.dumps({"edges": [list(e) for e in forest.sorted_edges]}))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dendrofit",
        description="Learn, evaluate, and sample forest-structured models "
        "of mixed discrete/Gaussian data.",
    )
    parser.add_argument("--version", action="version", version=f"dendrofit {__version__}")
    sub = parser.add_subparsers(
        dest="command", required=True, metavar="{learn,score,sample,eval}"
    )

    def add_data_flags(p):
        p.add_argument("--data", required=True, help="CSV file with a header row")
        p.add_argument("--schema", required=True, help="JSON schema file")

    def add_criterion_flags(p):
        p.add_argument(
            "--criterion",
            choices=("ml", "mdl", "aic", "custom"),
            default="ml",
            help="scoring criterion (default: ml)",
        )
        p.add_argument(
            "--dn",
            type=float,
            default=None,
            help="penalty scale d_n; required for custom, overrides mdl/aic",
        )

    learn = sub.add_parser("learn", help="learn a forest structure from data")
    add_data_flags(learn)
    add_criterion_flags(learn)
    learn.add_argument("--quad-order", type=int, default=64, help="Gauss-Hermite order")
    learn.add_argument(
        "--quad-tol", type=float, default=1e-8,
        help="relative tolerance for the order-doubling check",
    )
    learn.add_argument(
        "--format", choices=("dot", "json", "both"), default="json", dest="fmt"
    )
    learn.add_argument("--out", help="artifact path (extension added per --format)")
    learn.add_argument("--model-out", help="also write the fitted model JSON here")

    score = sub.add_parser("score", help="emit the pairwise I/J score table")
    add_data_flags(score)
    add_criterion_flags(score)
    score.add_argument("--quad-order", type=int, default=64, help="Gauss-Hermite order")
    score.add_argument(
        "--quad-tol", type=float, default=1e-8,
        help="relative tolerance for the order-doubling check",
    )
    score.add_argument("--format", choices=("csv", "json"), default="csv", dest="fmt")
    score.add_argument("--out", help="write the table here instead of stdout")

    smp = sub.add_parser("sample", help="draw synthetic rows from a model JSON")
    smp.add_argument("--model", required=True, help="model JSON (from learn --model-out)")
    smp.add_argument("--count", type=int, required=True, help="number of rows")
    smp.add_argument("--seed", type=int, default=0, help="RNG seed (PCG64)")
    smp.add_argument("--out", help="write CSV here instead of stdout")

    ev = sub.add_parser("eval", help="evaluate data under a model")
    ev.add_argument("--model", required=True)
    ev.add_argument("--data", required=True)
    add_criterion_flags(ev)

    oracle = sub.add_parser("oracle-forest")  # hidden: not in the metavar list
    oracle.add_argument("--scores", required=True, help="score JSON from `score --format json`")
    oracle.add_argument("--spanning", action="store_true")

    return parser


def _config_from_args(args: argparse.Namespace) -> RunConfig:
    return RunConfig(
        command=args.command,
        data=getattr(args, "data", None),
        schema=getattr(args, "schema", None),
        criterion=getattr(args, "criterion", "ml"),
        dn=getattr(args, "dn", None),
        quad_order=getattr(args, "quad_order", 64),
        quad_tol=getattr(args, "quad_tol", 1e-8),
        fmt=getattr(args, "fmt", None),
        out=getattr(args, "out", None),
        model=getattr(args, "model", None),
        model_out=getattr(args, "model_out", None),
        seed=getattr(args, "seed", 0),
        count=getattr(args, "count", 0),
        scores=getattr(args, "scores", None),
        spanning=getattr(args, "spanning", False),
    )


_HANDLERS = {
    "learn": cmd_learn,
    "score": cmd_score,
    "sample": cmd_sample,
    "eval": cmd_eval,
    "oracle-forest": cmd_oracle_forest,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    config = _config_from_args(args)
    try:
        return _HANDLERS[args.command](config)
    except _USAGE_ERRORS as err:
        print(f"error: {err}", file=sys.stderr)
        return 2
    except FileNotFoundError as err:
        print(f"error: no such file: {err.filename}", file=sys.stderr)
        return 2
    except (OSError, ValueError) as err:
        print(f"error: {err}", file=sys.stderr)
        return 2
    except DendrofitError as err:
        print(f"error: {err}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
