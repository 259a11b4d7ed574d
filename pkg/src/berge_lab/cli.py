"""Command line for berge_lab: girth, encode, decode, census, random.

JSON goes to stdout (one object, or one object per line for census grids);
``--format csv`` switches to CSV rows.  Errors are reported on stderr as a
JSON object; input problems exit with status 2, failed computations with 1.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from typing import Optional, Sequence

from . import __version__
from .census import (
    DEFAULT_BUDGET,
    SizeGuardError,
    count_at_most,
    count_girth,
    count_single_forbidden,
    ex_girth,
    verify_reduction_general,
    verify_reduction_single,
)
from .encode import (
    EncodedTuple,
    EncodingError,
    ShadowRecord,
    decode_book,
    decode_shadow,
    encode_book,
    encode_shadow,
)
from .hypercore import HypergraphError, find_berge_cycle, from_json, girth, is_linear, to_json
from .randex import (
    HostError,
    estimate_girth_probability,
    estimate_random_ex,
    exponent_table,
    extraction_experiment,
)

EXIT_INPUT = 2
EXIT_COMPUTE = 1


class InputError(Exception):
    pass


def dumps(obj) -> str:
    return json.dumps(obj, separators=(", ", ": "))


def _read_json(path: str):
    try:
        if path == "-":
            text = sys.stdin.read()
        else:
            with open(path, encoding="utf-8") as fh:
                text = fh.read()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"malformed JSON in {path}: {exc}") from exc


def parse_grid(text: str) -> list[int]:
    """``"3"``, ``"1,2,5"``, ``"2-6"`` or mixtures like ``"1,4-6"``."""
    out: list[int] = []
    for part in str(text).split(","):
        part = part.strip()
        if not part:
            continue
        if "-" in part[1:]:
            lo, hi = part.split("-", 1) if not part.startswith("-") else (part, part)
            lo_i, hi_i = int(lo), int(hi)
            if hi_i < lo_i:
                raise ValueError(f"empty range {part}")
            out.extend(range(lo_i, hi_i + 1))
        else:
            out.append(int(part))
    if not out:
        raise ValueError("empty parameter list")
    return out


def _grid(text: str, name: str) -> list[int]:
    try:
        return parse_grid(text)
    except ValueError as exc:
        raise InputError(f"--{name}: {exc}") from exc


def _write_csv(rows: list[dict], columns: Sequence[str], out) -> None:
    writer = csv.DictWriter(out, fieldnames=list(columns), extrasaction="ignore", lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow(row)


# --------------------------------------------------------------------------
# girth / encode / decode


def cmd_girth(args, out) -> None:
    H = from_json(_read_json(args.input))
    g = girth(H)
    w = find_berge_cycle(H, max(2, H.m)) if g != math.inf else None
    report = {
        "command": "girth",
        "params": {"input": args.input},
        "n": H.n,
        "r": H.r,
        "m": H.m,
        "girth": None if g == math.inf else g,
        "linear": is_linear(H),
        "witness": None if w is None else {
            "length": w.length,
            "vertices": list(w.vertices),
            "hyperedges": [list(e) for e in w.edge_tuples(H)],
        },
    }
    out.write(dumps(report) + "\n")


def cmd_encode(args, out) -> None:
    H = from_json(_read_json(args.input))
    if args.mode == "book":
        if args.l is None:
            raise InputError("--l is required for book mode")
        doc = encode_book(H, args.l).to_json()
    else:
        doc = encode_shadow(H).to_json()
    out.write(dumps(doc) + "\n")


def cmd_decode(args, out) -> None:
    doc = _read_json(args.input)
    if not isinstance(doc, dict):
        raise InputError("encoded input must be a JSON object")
    mode = args.mode or ("shadow" if "layers" in doc else "book")
    if mode == "book":
        H = decode_book(EncodedTuple.from_json(doc))
    else:
        H = decode_shadow(ShadowRecord.from_json(doc))
    out.write(dumps(to_json(H)) + "\n")


# --------------------------------------------------------------------------
# census

CENSUS_COLUMNS = ["n", "m", "r", "l", "count", "nodes", "ms"]
INEQ_COLUMNS = ["n", "m", "r", "l", "lhs", "rhs", "exponent", "holds", "c", "min_c"]
EX_COLUMNS = ["n", "r", "l", "ex"]


def cmd_census(args, out) -> None:
    ns, ms, rs, ls = (_grid(getattr(args, k), k) for k in ("n", "m", "r", "l"))
    mode = args.mode
    rows = []
    for n in ns:
        for r in rs:
            for l in ls:
                if mode == "ex":
                    value, W = ex_girth(n, r, l, args.budget)
                    rows.append({"command": "census", "mode": mode, "n": n, "r": r, "l": l,
                                 "ex": value, "witness": [list(e) for e in W.edges]})
                    continue
                for m in ms:
                    rows.append(_census_row(mode, n, m, r, l, args))
    if args.format == "csv":
        columns = {"ex": EX_COLUMNS, "verify1.2": INEQ_COLUMNS, "verify1.3": INEQ_COLUMNS}.get(mode, CENSUS_COLUMNS)
        _write_csv(rows, columns, out)
    else:
        for row in rows:
            out.write(dumps(row) + "\n")


def _census_row(mode, n, m, r, l, args) -> dict:
    base = {"command": "census", "mode": mode, "n": n, "m": m, "r": r, "l": l, "budget": args.budget}
    if mode in ("girth", "single"):
        fn = count_girth if mode == "girth" else count_single_forbidden
        res = fn(n, m, r, l, args.budget, args.workers)
        base.update(count=res.count, nodes=res.nodes_explored)
        if args.timing:
            base["ms"] = round(res.elapsed * 1000, 3)
        return base
    if mode == "atmost":
        base.update(count=count_at_most(n, m, r, l, args.submode, args.budget, args.workers),
                    submode=args.submode)
        return base
    if mode == "verify1.2":
        rep = verify_reduction_general(n, m, r, l, args.budget, args.workers)
    else:
        rep = verify_reduction_single(n, m, r, l, args.c, args.budget, args.workers)
    d = rep.as_dict()
    d.update(base)
    # exact big integers are emitted as strings to survive JSON consumers
    d["lhs"] = str(rep.lhs)
    d["rhs"] = None if rep.rhs is None else str(rep.rhs)
    if mode == "verify1.2":
        d["conjectured_exponent"] = str(_conjectured_exponent(r, l))
    return d


def _conjectured_exponent(r: int, l: int):
    from fractions import Fraction

    return Fraction(r - 1) + Fraction(r - 2, l - 2)


# --------------------------------------------------------------------------
# random

RANDOM_COLUMNS = ["trial", "seed", "n", "r", "l", "p_or_m", "kept", "deleted", "girth_ok"]


def cmd_random(args, out) -> None:
    exp = args.experiment
    if exp == "exponents":
        if args.l is None or args.r is None:
            raise InputError("--l and --r are required")
        table = exponent_table(args.l, args.r).as_dict()
        doc = {"command": "random", "experiment": exp, "params": {"l": args.l, "r": args.r}, "table": table}
        if args.format == "csv":
            _write_csv([{"key": k, "value": v} for k, v in table.items()], ["key", "value"], out)
        else:
            out.write(dumps(doc) + "\n")
        return

    if args.seed is None:
        raise InputError("--seed is required for randomized experiments")
    for name in ("n", "r", "l"):
        if getattr(args, name) is None:
            raise InputError(f"--{name} is required")
    params = {k: getattr(args, k) for k in ("n", "r", "l", "m", "trials", "seed", "experiment")}
    try:
        ps = [float(x) for x in str(args.p).split(",") if x.strip()] if args.p is not None else []
    except ValueError as exc:
        raise InputError(f"--p: {exc}") from exc
    if exp != "ex" and len(ps) > 1:
        raise InputError("--p takes a single value for this experiment")
    params["p"] = ps if exp == "ex" else (ps[0] if ps else None)
    rows: list[dict] = []
    plot = None

    if exp == "prob":
        if args.m is None:
            raise InputError("--m is required for the prob experiment")
        res, outcomes = estimate_girth_probability(args.n, args.r, args.m, args.l, args.trials, args.seed,
                                                   args.workers, per_trial=True)
        summary = res.as_dict()
        rows = [{"trial": i, "seed": args.seed, "n": args.n, "r": args.r, "l": args.l, "p_or_m": args.m,
                 "kept": args.m, "deleted": 0, "girth_ok": ok} for i, ok in enumerate(outcomes)]
    elif exp == "extract":
        rows, summary = extraction_experiment(args.n, args.r, args.l, args.trials, args.seed, p=params["p"], m=args.m,
                                              t=args.t, extractor=args.extractor, workers=args.workers)
        params.update(t=summary["t"], extractor=args.extractor)
    elif exp == "ex":
        if not ps:
            raise InputError("--p is required for the ex experiment")
        summary = []
        plot = []
        for p in ps:
            stats = estimate_random_ex(args.n, args.r, p, args.l, args.trials, args.seed, args.method,
                                       args.t, args.workers, args.budget)
            summary.append(stats.summary())
            rows.extend(stats.rows)
            if p > 0 and stats.mean > 0:
                plot.append([math.log(p), math.log(stats.mean)])
        params.update(method=args.method)
    else:  # pragma: no cover - argparse restricts choices
        raise InputError(f"unknown experiment {exp}")

    if args.format == "csv":
        _write_csv(rows, RANDOM_COLUMNS, out)
        if args.summary:
            with open(args.summary, "w", encoding="utf-8") as fh:
                fh.write(dumps({"params": params, "summary": summary}) + "\n")
        return
    doc = {"command": "random", "experiment": exp, "params": params, "summary": summary}
    if args.per_trial:
        doc["rows"] = rows
    if args.plot_data and plot is not None:
        doc["plot_data"] = plot
    out.write(dumps(doc) + "\n")


# --------------------------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.exit(EXIT_INPUT, json.dumps({"error": "UsageError", "message": f"{self.prog}: {message}"}) + "\n")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="berge-lab", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("girth", help="girth, linearity and a shortest Berge cycle")
    p.add_argument("input", nargs="?", default="-", help="hypergraph JSON file ('-' for stdin)")
    p.set_defaults(func=cmd_girth)

    p = sub.add_parser("encode", help="book or shadow encoding of a hypergraph")
    p.add_argument("input", nargs="?", default="-")
    p.add_argument("--mode", choices=("book", "shadow"), default="book")
    p.add_argument("--l", type=int)
    p.set_defaults(func=cmd_encode)

    p = sub.add_parser("decode", help="invert an encoding produced by 'encode'")
    p.add_argument("input", nargs="?", default="-")
    p.add_argument("--mode", choices=("book", "shadow"))
    p.set_defaults(func=cmd_decode)

    p = sub.add_parser("census", help="exact counts and inequality checks")
    p.add_argument("--n", required=True)
    p.add_argument("--m", default="0")
    p.add_argument("--r", required=True)
    p.add_argument("--l", required=True)
    p.add_argument("--mode", default="girth",
                   choices=("girth", "single", "atmost", "verify1.2", "verify1.3", "ex"))
    p.add_argument("--submode", choices=("girth", "single"), default="girth",
                   help="which count 'atmost' sums")
    p.add_argument("--c", default=None, help="slack constant for verify1.3 (rational allowed)")
    p.add_argument("--budget", type=int, default=DEFAULT_BUDGET)
    p.add_argument("--workers", type=int, default=None)
    p.add_argument("--timing", action="store_true", help="include wall time (breaks byte-reproducibility)")
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.set_defaults(func=cmd_census)

    p = sub.add_parser("random", help="Monte Carlo experiments on random hypergraphs")
    p.add_argument("--experiment", choices=("prob", "extract", "ex", "exponents"), required=True)
    p.add_argument("--n", type=int)
    p.add_argument("--r", type=int)
    p.add_argument("--l", type=int)
    p.add_argument("--p", default=None, help="edge probability (comma list for 'ex')")
    p.add_argument("--m", type=int, default=None)
    p.add_argument("--trials", type=int, default=1000)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--t", type=int, default=None, help="host size for extractors")
    p.add_argument("--method", choices=("extractor", "exact"), default="extractor")
    p.add_argument("--extractor", choices=("general", "triangle"), default="general")
    p.add_argument("--budget", type=int, default=DEFAULT_BUDGET)
    p.add_argument("--workers", type=int, default=None)
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--per-trial", action="store_true", help="include per-trial rows in JSON output")
    p.add_argument("--plot-data", action="store_true", help="emit (log p, log ex) pairs")
    p.add_argument("--summary", default=None, help="write the JSON summary here in CSV mode")
    p.set_defaults(func=cmd_random)
    return parser


def _fail(code: int, kind: str, message: str) -> int:
    sys.stderr.write(json.dumps({"error": kind, "message": message}) + "\n")
    return code


def main(argv: Optional[Sequence[str]] = None, out=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    buf = io.StringIO()
    try:
        args.func(args, buf)
    except (InputError, HypergraphError) as exc:
        return _fail(EXIT_INPUT, type(exc).__name__, str(exc))
    except (EncodingError, SizeGuardError, HostError, ValueError) as exc:
        return _fail(EXIT_COMPUTE, type(exc).__name__, str(exc))
    (out or sys.stdout).write(buf.getvalue())
    return 0


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
