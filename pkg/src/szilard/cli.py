"""``szilard`` command line: run a cycle or a sweep from a JSON scenario file."""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from typing import Any

import jsonschema

from .analysis import Grid, SweepSpec, degenerate_points, sweep
from .config import OPTIMIZE, EngineConfig
from .cycle import CycleReport, run_cycle
from .demon import DemonSpec, MapFamily, default_map
from .errors import DomainError, SzilardError
from .statmech import DEFAULT_TRUNCATION_EPS, Statistics

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_COMPUTE = 3

SWEEP_HEADER = ("l", "t1", "w", "w_over_t1", "q1", "q2", "eta", "first_law_residual")

_number = {"type": "number"}
_grid = {
    "type": "object",
    "additionalProperties": False,
    "required": ["count", "min", "max"],
    "properties": {
        "count": {"type": "integer", "minimum": 1},
        "min": _number,
        "max": _number,
        "spacing": {"enum": ["linear", "log"]},
    },
}

SCENARIO_SCHEMA: dict[str, Any] = {
    "type": "object",
    "additionalProperties": False,
    "required": ["n", "statistics", "t2", "demon"],
    "properties": {
        "n": {"type": "integer", "minimum": 1},
        "statistics": {"enum": ["bose", "fermi"]},
        "t1": {"type": "number", "exclusiveMinimum": 0},
        "t2": {"type": "number", "minimum": 0},
        "insertion_l": _number,
        "demon": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "deltas": {"type": "array", "items": _number},
                "populations": {"type": "array", "items": {"type": "number", "minimum": 0}},
                "map": {
                    "oneOf": [
                        {"const": "default"},
                        {"type": "array", "items": {"type": "array", "items": {"type": "integer"}}},
                    ]
                },
            },
        },
        "expansion": {"oneOf": [{"const": "optimize"}, {"type": "array", "items": _number}]},
        "sweep": {
            "type": "object",
            "additionalProperties": False,
            "required": ["l", "t1"],
            "properties": {"l": _grid, "t1": _grid},
        },
    },
}


class ScenarioError(DomainError):
    pass


def _fmt(x: float) -> str:
    return "%.17g" % (x + 0.0)  # folds -0.0 into 0.0


def truncation_eps_from_env() -> float:
    raw = os.environ.get("SZILARD_TRUNC_EPS")
    if raw is None or raw.strip() == "":
        return DEFAULT_TRUNCATION_EPS
    try:
        eps = float(raw)
    except ValueError:
        raise ScenarioError(f"SZILARD_TRUNC_EPS is not a number: {raw!r}") from None
    if not (0.0 < eps <= 1e-8):
        raise ScenarioError(f"SZILARD_TRUNC_EPS must lie in (0, 1e-8], got {raw!r}")
    return eps


def load_scenario(path: str) -> dict:
    try:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise ScenarioError(f"cannot read scenario {path!r}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise ScenarioError(f"scenario {path!r} is not valid JSON: {exc}") from None
    try:
        jsonschema.validate(doc, SCENARIO_SCHEMA)
    except jsonschema.ValidationError as exc:
        where = "/".join(str(p) for p in exc.absolute_path) or "<root>"
        raise ScenarioError(f"scenario field {where}: {exc.message}") from None
    return doc


def demon_from(doc: dict) -> DemonSpec:
    n = doc["n"]
    block = doc["demon"]
    pops = block.get("populations", [1.0] + [0.0] * n)
    deltas = block.get("deltas", [float(j) for j in range(len(pops))])
    table = block.get("map", "default")
    fam = default_map(n) if table == "default" else MapFamily(tuple(tuple(r) for r in table))
    return DemonSpec(tuple(deltas), tuple(pops), fam)


def config_from(doc: dict, eps: float) -> EngineConfig:
    for key in ("t1", "insertion_l"):
        if key not in doc:
            raise ScenarioError(f"scenario field {key} is required for a single cycle")
    expansion = doc.get("expansion", OPTIMIZE)
    if expansion != OPTIMIZE:
        expansion = tuple(expansion)
    return EngineConfig(doc["n"], Statistics(doc["statistics"]), doc["t1"], doc["t2"],
                        doc["insertion_l"], demon_from(doc), expansion, eps)


def sweep_spec_from(doc: dict, eps: float) -> SweepSpec:
    if "sweep" not in doc:
        raise ScenarioError("scenario has no sweep block")
    sw = doc["sweep"]
    expansion = doc.get("expansion", OPTIMIZE)
    if expansion != OPTIMIZE:
        expansion = tuple(expansion)
    return SweepSpec(
        doc["n"], Statistics(doc["statistics"]), demon_from(doc), doc["t2"],
        Grid(sw["l"]["count"], sw["l"]["min"], sw["l"]["max"], sw["l"].get("spacing", "linear")),
        Grid(sw["t1"]["count"], sw["t1"]["min"], sw["t1"]["max"], sw["t1"].get("spacing", "linear")),
        expansion, eps,
    )


# ---------------------------------------------------------------------------
# output formats


def _clean(x):
    if isinstance(x, float) and not math.isfinite(x):
        return None
    return x


def _floats(values) -> list:
    return [_clean(float(v)) for v in values]


def report_fields(rep: CycleReport) -> dict:
    """Flat, fixed-order mapping of every reported quantity (non-finite values as ``None``)."""
    cfg = rep.config
    out: dict[str, Any] = {
        "n": cfg.n,
        "statistics": cfg.stats.value,
        "t1": cfg.t1,
        "t2": cfg.t2,
        "insertion_l": cfg.l,
        "positions": _floats(rep.positions),
        "probabilities": _floats(rep.probabilities),
    }
    for e in rep.ledger:
        out[f"work_{e.name}"] = _clean(e.work)
        out[f"heat_{e.name}"] = _clean(e.heat)
    out.update({
        "q1": rep.q1,
        "q2": rep.q2,
        "w": rep.w,
        "w_over_t1": rep.w_over_t1,
        "eta": rep.eta,
        "first_law_residual": rep.first_law_residual,
        "q1_closed_form_residual": rep.q1_closed_form_residual,
        "q2_closed_form_residual": rep.q2_closed_form_residual,
        "q1_upper_bound": rep.q1_upper_bound,
        "post_removal_demon": _floats(rep.post_removal_demon),
        "erasure_gaps_after_measurement": _floats(rep.erasure_gaps[0]),
        "erasure_gaps_initial": _floats(rep.erasure_gaps[1]),
        "expansion_identity_residual": rep.expansion_identity_residual,
        "insertion_entropy_residual": rep.insertion_entropy_residual,
        "erasure_energy_residual": rep.erasure_energy_residual,
        "flags": list(rep.flags),
    })
    return out


def report_json(rep: CycleReport) -> str:
    return json.dumps(report_fields(rep), indent=2, allow_nan=False) + "\n"


def report_csv(rep: CycleReport) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(("quantity", "value"))
    for key, val in report_fields(rep).items():
        if isinstance(val, list):
            if key == "flags":
                w.writerow((key, ";".join(val)))
                continue
            for k, v in enumerate(val):
                w.writerow((f"{key}[{k}]", "" if v is None else _fmt(v)))
        elif isinstance(val, float):
            w.writerow((key, _fmt(val)))
        elif val is None:
            w.writerow((key, ""))
        else:
            w.writerow((key, val))
    return buf.getvalue()


def sweep_csv(rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(SWEEP_HEADER)
    for r in rows:
        w.writerow((_fmt(r.l), _fmt(r.t1), _fmt(r.w), _fmt(r.w_over_t1), _fmt(r.q1), _fmt(r.q2),
                    "" if r.eta is None else _fmt(r.eta), _fmt(r.first_law_residual)))
    return buf.getvalue()


# ---------------------------------------------------------------------------
# commands


def _emit(text: str, dest: str | None) -> None:
    if dest:
        with open(dest, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def cmd_cycle(args) -> int:
    doc = load_scenario(args.scenario)
    cfg = config_from(doc, truncation_eps_from_env())
    rep = run_cycle(cfg)
    _emit(report_json(rep) if args.out == "json" else report_csv(rep), args.output)
    return EXIT_OK


def cmd_sweep(args) -> int:
    doc = load_scenario(args.scenario)
    spec = sweep_spec_from(doc, truncation_eps_from_env())
    table = sweep(spec, threads=args.threads)
    _emit(sweep_csv(table.rows), args.output)
    undefined = sum(r.eta is None for r in table.rows)
    print(f"sweep: {len(table.rows)} rows, {undefined} with undefined efficiency", file=sys.stderr)
    return EXIT_OK


def cmd_degenerate_points(args) -> int:
    pts = degenerate_points(args.n, Statistics(args.stats))
    sys.stdout.write("".join(_fmt(x) + "\n" for x in pts))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="szilard", description="Multi-particle quantum Szilard engine calculator.")
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("cycle", help="run one engine cycle and print its ledger")
    c.add_argument("scenario")
    c.add_argument("--out", choices=("json", "csv"), default="json")
    c.add_argument("-o", "--output", help="write to this file instead of stdout")
    c.add_argument("--threads", type=int, default=1, help="accepted for symmetry; a single cycle is serial")
    c.set_defaults(func=cmd_cycle)

    s = sub.add_parser("sweep", help="run the cycle over an (l, T1) grid and print CSV")
    s.add_argument("scenario")
    s.add_argument("--out", choices=("csv",), default="csv")
    s.add_argument("-o", "--output", help="write to this file instead of stdout")
    s.add_argument("--threads", type=int, default=1, help="worker processes (0 = one per CPU)")
    s.set_defaults(func=cmd_sweep)

    d = sub.add_parser("degenerate-points", help="list degenerate insertion positions")
    d.add_argument("--n", type=int, required=True)
    d.add_argument("--stats", choices=("bose", "fermi"), required=True)
    d.set_defaults(func=cmd_degenerate_points)
    return p


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    if getattr(args, "threads", 1) < 0:
        print("error: --threads must be >= 0", file=sys.stderr)
        return EXIT_VALIDATION
    try:
        return args.func(args)
    except DomainError as exc:
        print(f"validation error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except SzilardError as exc:
        print(f"computation failed: {exc}", file=sys.stderr)
        return EXIT_COMPUTE


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
