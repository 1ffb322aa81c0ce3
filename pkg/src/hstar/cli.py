"""Command-line front end.

Exit codes: 0 success, 1 malformed input, 2 a verification failed.
"""

from __future__ import annotations

import argparse
import json
import os
import re
import sys
from fractions import Fraction
from pathlib import Path
from typing import Sequence

from .corank1 import (
    build_step_function,
    circuit_decomposition,
    fill_gap_trace,
    jump_data,
    step_eval,
    step_table,
)
from .ehrhart import coset_hstar, hstar_via_boxes, hstar_via_interpolation, span_quotient
from .errors import HStarError
from .polytope import LatticePolytope, from_json, is_spanning, lattice_points, normalized_volume
from .triangulation import format_fraction, homogenize
from .verifier import analyze, random_polytope, sweep

CORPUS_DIR = Path(__file__).with_name("corpus")

_TERM = re.compile(r"([+-]?)(\d*)\*?e(\d+)")


class InputError(Exception):
    pass


def dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, default=_default)


def _default(o):
    if isinstance(o, Fraction):
        return format_fraction(o)
    raise TypeError(f"cannot serialize {type(o).__name__}")


def parse_point(text: str, dim: int) -> tuple[int, ...]:
    """``"4e0+e1"`` -> ``(4, 1, 0, ...)`` with ``dim`` coordinates."""
    s = re.sub(r"\s+", "", text)
    if not s:
        raise InputError("empty point")
    out = [0] * dim
    pos = 0
    while pos < len(s):
        m = _TERM.match(s, pos)
        if not m or (pos > 0 and not m.group(1)):
            raise InputError(f"cannot parse point {text!r} at offset {pos}")
        sign = -1 if m.group(1) == "-" else 1
        coeff = int(m.group(2)) if m.group(2) else 1
        idx = int(m.group(3))
        if idx >= dim:
            raise InputError(f"e{idx} out of range for dimension {dim}")
        out[idx] += sign * coeff
        pos = m.end()
    return tuple(out)


def parse_seeds(text: str) -> range:
    m = re.fullmatch(r"\s*(\d+)\s*\.\.\s*(\d+)\s*", text)
    if not m:
        raise InputError(f"seed range must look like A..B, got {text!r}")
    a, b = int(m.group(1)), int(m.group(2))
    if b < a:
        raise InputError("empty seed range")
    return range(a, b + 1)


def load_polytope(source: str) -> LatticePolytope:
    text = source if source.lstrip().startswith("{") else None
    if text is None:
        try:
            text = Path(source).read_text()
        except OSError as exc:
            raise InputError(f"cannot read {source}: {exc}") from exc
    try:
        return from_json(json.loads(text))
    except (ValueError, TypeError) as exc:
        raise InputError(f"malformed polytope: {exc}") from exc


# single-polytope reports ---------------------------------------------------------

def hstar_record(P: LatticePolytope, seed: int | None = 0, all_points: bool = False) -> dict:
    boxes = hstar_via_boxes(P, seed, seed, all_points)
    interp = hstar_via_interpolation(P)
    split = coset_hstar(P, seed, seed, all_points)
    return {
        "hstar": list(boxes.coeffs),
        "degree": boxes.degree,
        "interpolation": list(interp.coeffs),
        "routes_agree": boxes == interp,
        "volume": normalized_volume(P),
        "cosets": split.to_json(),
    }


def spanning_record(P: LatticePolytope) -> dict:
    return {"spanning": is_spanning(P), "index": span_quotient(P).index}


def circuit_record(P: LatticePolytope) -> dict:
    return circuit_decomposition(homogenize(P)).to_json()


def stepfn_record(P: LatticePolytope, point: Sequence[int], seed: int | None = 0) -> dict:
    C = circuit_decomposition(homogenize(P))
    f = build_step_function(C, point)
    marks = sorted(set(f.potential_jumps(0, f.t_max)) | {Fraction(0), f.t_max})
    trace = fill_gap_trace(C, point, seed)
    return {
        "point": list(point),
        "function": f.to_json(),
        "table": step_table(f),
        "range": [
            {"t": format_fraction(t), "value": format_fraction(step_eval(f, t)),
             "l": jump_data(f, t).l, "r": jump_data(f, t).r}
            for t in marks
        ],
        "trace": trace.to_json(),
        "heights": sorted(trace.heights()),
    }


# corpus ----------------------------------------------------------------------------

def corpus_record(entry: dict, directory: Path) -> dict:
    P = load_polytope(str(directory / entry["file"]))
    rec = {
        "name": entry["name"],
        "dim": P.ambient_dim,
        "vertices": [list(v) for v in P.vertices],
        "lattice_points": len(lattice_points(P)),
        **spanning_record(P),
        **hstar_record(P),
    }
    report = analyze(P, entry["name"], extended=True)
    rec["checks"] = {c.name: c.passed for c in report.checks}
    rec["notes"] = {c.name: c.note for c in report.checks if c.note}
    if "point" in entry:
        point = parse_point(entry["point"], P.ambient_dim + 1)
        rec["stepfn"] = stepfn_record(P, point)
    return rec


def run_corpus(directory: Path, update: bool, out) -> int:
    manifest = json.loads((directory / "manifest.json").read_text())
    expected_dir = directory / "expected"
    status = 0
    for entry in manifest:
        rec = corpus_record(entry, directory)
        path = expected_dir / f"{entry['name']}.json"
        text = dumps(rec)
        if update:
            expected_dir.mkdir(exist_ok=True)
            path.write_text(text + "\n")
            match = True
        else:
            match = path.exists() and path.read_text().strip() == text
        ok = match and all(rec["checks"].values()) and rec["routes_agree"]
        if not ok:
            status = 2
        out.write(dumps({"name": entry["name"], "match": match, "pass": ok,
                         "hstar": rec["hstar"]}) + "\n")
    return status


# argument handling -----------------------------------------------------------------

def _emit(obj, fmt: str, out) -> None:
    if fmt == "json":
        out.write(dumps(obj) + "\n")
        return
    if isinstance(obj, dict) and "table" in obj:
        out.write(f"{'from':>10} {'to':>10} {'value':>6} {'l':>3} {'r':>3}\n")
        for row in obj["table"]:
            out.write(f"{row['from']:>10} {row['to']:>10} {row['value']:>6} "
                      f"{row['l']:>3} {row['r']:>3}\n")
        for step in obj["trace"]["steps"]:
            out.write(f"trace {step['side']} height={step['height']} y={step['y']}\n")
        return
    for k in sorted(obj):
        out.write(f"{k}: {dumps(obj[k])}\n")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="hstar", description=__doc__.splitlines()[0])
    parser.add_argument("--format", choices=("json", "table"), default="json")
    sub = parser.add_subparsers(dest="command", required=True)

    def polytope_cmd(name: str, help: str) -> argparse.ArgumentParser:
        p = sub.add_parser(name, help=help)
        p.add_argument("polytope", help="polytope JSON file or inline JSON")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--format", choices=("json", "table"), default=argparse.SUPPRESS)
        return p

    p = polytope_cmd("hstar", "h*-vector by box points and by interpolation")
    p.add_argument("--all-points", action="store_true",
                   help="triangulate with all lattice points instead of the vertices")
    polytope_cmd("spanning", "spanning test and index of the span lattice")
    polytope_cmd("cosets", "h*-polynomials per coset of the span lattice")
    polytope_cmd("circuit", "dependence relation and both triangulations of a circuit")
    p = polytope_cmd("stepfn", "step function table and gap trace for a point")
    p.add_argument("--point", required=True, help='point such as "4e0+e1"')

    p = sub.add_parser("verify", help="seeded random sweep")
    p.add_argument("--dim", type=int, action="append", required=True)
    p.add_argument("--seeds", default="0..99")
    p.add_argument("--coord-bound", type=int, default=5)
    p.add_argument("--jobs", type=int, default=None)
    p.add_argument("--extended", action="store_true")
    p.add_argument("--format", choices=("json", "table"), default=argparse.SUPPRESS)

    p = sub.add_parser("random", help="seeded random lattice polytope")
    p.add_argument("--dim", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--coord-bound", type=int, default=5)
    p.add_argument("--n-vertices", type=int, default=None)
    p.add_argument("--format", choices=("json", "table"), default=argparse.SUPPRESS)

    p = sub.add_parser("corpus", help="run the curated examples against stored outputs")
    p.add_argument("--dir", type=Path, default=CORPUS_DIR)
    p.add_argument("--update", action="store_true", help="rewrite the stored outputs")
    return parser


def run(argv: Sequence[str] | None = None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code == 0 else 1
    try:
        return _dispatch(args, out)
    except (InputError, HStarError, ValueError) as exc:
        err.write(f"error: {exc}\n")
        return 1


def _dispatch(args, out) -> int:
    fmt = args.format
    cmd = args.command
    if cmd == "corpus":
        return run_corpus(args.dir, args.update, out)
    if cmd == "random":
        P = random_polytope(args.dim, args.coord_bound, args.n_vertices, args.seed)
        _emit(P.to_json(), fmt, out)
        return 0
    if cmd == "verify":
        jobs = args.jobs or os.cpu_count() or 1
        status = 0
        for report in sweep(args.dim, parse_seeds(args.seeds), args.coord_bound, jobs, args.extended):
            for line in report.json_lines():
                _emit(line, fmt, out)
            if not report.passed:
                status = 2
        return status

    P = load_polytope(args.polytope)
    if cmd == "hstar":
        rec = hstar_record(P, args.seed, args.all_points)
        _emit(rec, fmt, out)
        return 0 if rec["routes_agree"] else 2
    if cmd == "spanning":
        _emit(spanning_record(P), fmt, out)
    elif cmd == "cosets":
        split = coset_hstar(P, args.seed, args.seed)
        _emit({"cosets": split.to_json(), "index": len(split.cosets)}, fmt, out)
    elif cmd == "circuit":
        _emit(circuit_record(P), fmt, out)
    elif cmd == "stepfn":
        point = parse_point(args.point, P.ambient_dim + 1)
        _emit(stepfn_record(P, point, args.seed), fmt, out)
    return 0


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
