"""``hecke-bounds`` command line for the density bounds and the eigenform data checks.

Every command builds a run report (command echo, inputs, results, wall-clock,
version, seed). Human output is a small table with 6 significant digits;
``--json`` prints the report instead, or writes it to a path when one is given.
Exit status is 0 only if every validation the command ran passed.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import math
import os
import sys
import time
from pathlib import Path
from typing import Any, Sequence

from . import __version__
from .bounds import (
    CombinationSpec,
    congruence_bound_rc,
    interval_bound,
    product_bound,
    rc_real_bound,
    rc_real_part_bound,
    rc_sector_bound,
    split_bound_cubic,
    split_bound_quadratic,
)
from .empirical import (
    AllPrimes,
    CongruenceClass,
    CubicSplit,
    QuadraticSplit,
    TableFormatError,
    delta_coefficients,
    monte_carlo_bound_check,
    read_table,
    second_form_coefficients,
    sign_density,
    write_table,
)
from .optimizer import (
    SearchConfig,
    evaluate_ladder,
    gln_bound,
    gln_inner_min,
    maximize_ladder,
    positivity_threshold,
)
from .reproduce import ROW_GROUPS, run_rows

PROG = "hecke-bounds"


class UsageError(Exception):
    """Bad flags or inputs; reported on stderr with exit status 2."""


# --------------------------------------------------------------------------
# parsing helpers


def _numbers(text: str, kind=float) -> tuple:
    try:
        return tuple(kind(part) for part in text.split(",") if part.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated {kind.__name__} values, got {text!r}") from None


def _floats(text: str) -> tuple[float, ...]:
    return _numbers(text, float)


def _ints(text: str) -> tuple[int, ...]:
    return _numbers(text, int)


def _complexes(text: str) -> tuple[complex | float, ...]:
    values = _numbers(text.replace(" ", ""), complex)
    return tuple(v.real if v.imag == 0 else v for v in values)


def read_config(path: str | Path) -> dict[str, str]:
    """``key=value`` lines; blank lines and ``#`` comments are skipped."""
    out = {}
    for lineno, raw in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise UsageError(f"{path}:{lineno}: expected key=value, got {raw!r}")
        out[key.strip().replace("-", "_")] = value.strip()
    return out


SEARCH_KEYS = {f.name: f.type for f in dataclasses.fields(SearchConfig) if f.name not in ("seeds", "threads")}


def search_config(args, ladder_length: int | None = None) -> SearchConfig:
    """Config file first, then explicit flags."""
    values: dict[str, Any] = {}
    for key, raw in (args.config_values or {}).items():
        if key not in SEARCH_KEYS:
            raise UsageError(f"unknown config key {key!r}; known keys: {sorted(SEARCH_KEYS)}")
        values[key] = int(raw) if SEARCH_KEYS[key] == "int" else float(raw)
    if getattr(args, "m", None) is not None:
        values["ladder_length"] = args.m
    elif ladder_length is not None:
        values["ladder_length"] = ladder_length
    if getattr(args, "seed", None) is not None:
        values["seed"] = args.seed
    values["threads"] = args.threads
    try:
        return SearchConfig(**values)
    except (TypeError, ValueError) as exc:
        raise UsageError(f"invalid search configuration: {exc}") from None


def resolve_threads(flag: int | None) -> int:
    if flag is not None:
        threads = flag
    else:
        env = os.environ.get("HECKE_THREADS", "1")
        try:
            threads = int(env)
        except ValueError:
            raise UsageError(f"HECKE_THREADS must be an integer, got {env!r}") from None
    if threads < 1:
        raise UsageError(f"thread count must be >= 1, got {threads}")
    return threads


def _spec(args) -> CombinationSpec:
    try:
        return CombinationSpec(
            lambdas=args.lambdas,
            dims=args.dims or (),
            pole_orders=getattr(args, "poles", None) or (),
            twist_inequivalent=getattr(args, "twist_inequivalent", True),
            shift_t=args.t,
        )
    except ValueError as exc:
        raise UsageError(f"invalid combination: {exc}") from None


def _spec_inputs(spec: CombinationSpec) -> dict:
    return {
        "lambdas": [_jsonable(v) for v in spec.lambdas],
        "dims": list(spec.dims),
        "pole_orders": list(spec.pole_orders),
        "twist_inequivalent": spec.twist_inequivalent,
        "t": _jsonable(spec.shift_t),
    }


def _jsonable(value):
    if isinstance(value, complex):
        return value.real if value.imag == 0 else {"re": value.real, "im": value.imag}
    return value


# --------------------------------------------------------------------------
# bound


def cmd_bound(args) -> tuple[dict, list, bool]:
    kind = args.kind
    if kind == "gl2":
        spec = _spec(args)
        if args.ladder and args.search:
            raise UsageError("--ladder and --search are mutually exclusive")
        if args.ladder:
            try:
                result = evaluate_ladder(spec, args.ladder, budget=args.budget)
            except ValueError as exc:
                raise UsageError(f"invalid ladder: {exc}") from None
        elif args.search:
            result = maximize_ladder(spec, search_config(args), budget=args.budget)
        else:
            raise UsageError("gl2 needs --ladder X0,...,Xm or --search [--m K]")
        return _spec_inputs(spec), [{"bound": "gl2", **result.to_dict()}], result.converged
    if kind == "gln":
        spec = _spec(args)
        if spec.real_shift() < 0:
            raise UsageError("gln uses t >= 0 (event sum < -t)")
        if args.x is not None:
            if args.x <= 1:
                raise UsageError(f"--x must exceed 1, got {args.x}")
            y, value = gln_inner_min(spec, args.x, sharp=args.sharp)
            return _spec_inputs(spec), [{"bound": "gln", "value": value, "X": args.x, "y": y}], True
        result = gln_bound(spec, search_config(args, ladder_length=0), sharp=args.sharp)
        row = {"bound": "gln", "value": result.value, "X": result.ladder.base, "y": result.allocation.tail_y,
               "converged": result.converged}
        return _spec_inputs(spec), [row], result.converged
    if kind == "rc":
        spec = _spec(args)
        try:
            if args.part == "real":
                value = rc_real_bound(spec)
            elif args.part == "real-part":
                value = rc_real_part_bound(spec)
            else:
                if args.epsilon is None:
                    raise UsageError("--part sector needs --epsilon")
                value = rc_sector_bound(spec, args.epsilon)
        except ValueError as exc:
            raise UsageError(str(exc)) from None
        inputs = {**_spec_inputs(spec), "part": args.part}
        if args.part == "sector":
            inputs["epsilon"] = args.epsilon
        return inputs, [{"bound": f"rc/{args.part}", "value": value}], True
    try:
        if kind == "congruence":
            inputs = {"n": args.n, "h": args.h, "t": args.t}
            value = congruence_bound_rc(args.n, args.h, args.t)
        elif kind == "split":
            inputs = {"n": args.n, "d": args.d, "t": args.t, "cubic": args.cubic, "magnitude": args.magnitude}
            if args.cubic:
                value = split_bound_cubic(args.n, args.t)
            else:
                value = split_bound_quadratic(args.n, args.d, args.t, magnitude=args.magnitude)
        elif kind == "product":
            inputs = {"lambdas": list(args.lambdas), "nus": list(args.nus), "t": args.t}
            value = product_bound(args.lambdas, args.nus, args.t)
        elif kind == "interval":
            if len(args.lambdas) != 2:
                raise UsageError("interval needs exactly two lambdas")
            l1, l2 = args.lambdas
            if args.threshold:
                root = positivity_threshold("interval-abs", args.lo, args.hi)
                inputs = {"family": "interval-abs", "range": [args.lo, args.hi]}
                return inputs, [{"bound": "interval/threshold", "value": root}], True
            if args.a is None or args.b is None:
                raise UsageError("interval needs --a and --b (or --threshold)")
            inputs = {"lambdas": [l1, l2], "a": args.a, "b": args.b}
            value = interval_bound(l1, l2, args.a, args.b)
        else:  # pragma: no cover - argparse restricts choices
            raise UsageError(f"unknown bound {kind}")
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    return inputs, [{"bound": kind, "value": value}], True


# --------------------------------------------------------------------------
# empirical

GENERATORS = {"delta": delta_coefficients, "weight16": second_form_coefficients}
PREDICATES = {
    "neg": ("lt", 0.0),
    "abs-gt-1": ("abs-gt", 1.0),
    "compare": ("lt", 0.0),
}


def _prime_filter(args):
    chosen = [args.mod is not None, args.split is not None, args.cubic_split]
    if sum(chosen) > 1:
        raise UsageError("choose at most one of --mod/--class, --split, --cubic-split")
    if args.mod is not None:
        if args.residue is None:
            raise UsageError("--mod needs --class")
        try:
            return CongruenceClass(args.mod, args.residue)
        except ValueError as exc:
            raise UsageError(str(exc)) from None
    if args.split is not None:
        return QuadraticSplit(args.split)
    if args.cubic_split:
        return CubicSplit()
    return AllPrimes()


def cmd_empirical(args) -> tuple[dict, list, bool]:
    if args.action == "generate":
        if not 1 <= args.limit <= 1_000_000:
            raise UsageError(f"--limit must lie in [1, 1000000], got {args.limit}")
        table = GENERATORS[args.form](args.limit)
        write_table(table, args.output)
        inputs = {"form": args.form, "limit": args.limit, "output": str(args.output)}
        return inputs, [{"label": table.label, "weight": table.weight, "limit": table.limit}], True
    if args.action == "density":
        tables = [read_table(path) for path in args.table]
        predicate, threshold = PREDICATES[args.predicate]
        if args.predicate == "compare":
            if len(tables) != 2:
                raise UsageError("--predicate compare needs two --table files (f then g)")
            weights = [1.0, -1.0]
        else:
            if len(tables) != 1 and args.weights is None:
                raise UsageError("several tables need --weights")
            weights = list(args.weights) if args.weights else [1.0]
        if args.t is not None:
            threshold = args.t
        try:
            est = sign_density(tables, weights, threshold, _prime_filter(args), args.limit, predicate)
        except ValueError as exc:
            raise UsageError(str(exc)) from None
        inputs = {"tables": [str(p) for p in args.table], "weights": weights, "predicate": args.predicate,
                  "threshold": threshold, "limit": est.limit}
        return inputs, [est.to_dict()], True
    if args.action == "montecarlo":
        spec = _spec(args)
        if args.count < 1:
            raise UsageError(f"--count must be >= 1, got {args.count}")
        try:
            check = monte_carlo_bound_check(spec, args.count, args.seed, args.interval, threads=args.threads)
        except ValueError as exc:
            raise UsageError(str(exc)) from None
        inputs = {**_spec_inputs(spec), "count": args.count, "interval": list(args.interval or []) or None}
        return inputs, [check.to_dict()], check.passed
    raise UsageError(f"unknown action {args.action}")  # pragma: no cover


# --------------------------------------------------------------------------
# reproduce


def cmd_reproduce(args) -> tuple[dict, list, bool]:
    try:
        rows = run_rows(args.only, threads=args.threads)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    results = [row.to_dict() for row in rows]
    return {"only": args.only or list(ROW_GROUPS)}, results, all(row.passed for row in rows)


# --------------------------------------------------------------------------
# output


def _fmt(value) -> str:
    if isinstance(value, bool):
        return "yes" if value else "no"
    if isinstance(value, float):
        return f"{value:.6g}"
    if isinstance(value, list):
        return ",".join(_fmt(v) for v in value)
    if isinstance(value, dict):
        return " ".join(f"{k}={_fmt(v)}" for k, v in value.items())
    return str(value)


def render_human(report: dict) -> str:
    lines = []
    for row in report["results"]:
        if "passed" in row and "name" in row:
            mark = "PASS" if row["passed"] else "FAIL"
            lines.append(f"{mark}  {row['name']:<24} value={_fmt(row['value'])}  target={_fmt(row['target'])}"
                         f"  tol={_fmt(row['tolerance'])}  {row['detail']}")
        else:
            lines.append("  ".join(f"{k}={_fmt(v)}" for k, v in row.items()))
    lines.append(f"ok={_fmt(report['ok'])}  wall_clock={report['wall_clock']:.3g}s  version={report['version']}")
    return "\n".join(lines)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", nargs="?", const="-", default=None, metavar="PATH",
                        help="emit the JSON run report (to PATH, or stdout when no path is given)")
    common.add_argument("--config", type=Path, help="key=value file presetting search parameters")
    common.add_argument("--threads", type=int, default=None, help="worker threads (fallback: HECKE_THREADS)")
    common.add_argument("--seed", type=int, default=None, help="seed for randomized starts and sampling")

    combo = argparse.ArgumentParser(add_help=False)
    combo.add_argument("--lambdas", type=_complexes, required=True, help="comma-separated coefficients")
    combo.add_argument("--dims", type=_ints, default=None, help="GL(n) ranks, default 2 each")
    combo.add_argument("--t", type=float, default=0.0, help="shift t")

    parser = argparse.ArgumentParser(prog=PROG, description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"{PROG} {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    bound = sub.add_parser("bound", help="evaluate or optimize a density bound")
    kinds = bound.add_subparsers(dest="kind", required=True)
    gl2 = kinds.add_parser("gl2", parents=[common, combo], help="GL(2) max-min bound")
    gl2.add_argument("--twist-inequivalent", action=argparse.BooleanOptionalAction, default=True)
    gl2.add_argument("--ladder", type=_floats, help="cutoffs X0,...,Xm (evaluate only)")
    gl2.add_argument("--search", action="store_true", help="search for a ladder")
    gl2.add_argument("--m", type=int, default=None, help="ladder length for --search")
    gl2.add_argument("--budget", type=float, default=None, help="override the allocation budget r")
    gl2.add_argument("--poles", type=_ints, default=None, help=argparse.SUPPRESS)

    gln = kinds.add_parser("gln", parents=[common, combo], help="GL(n) bound over one cutoff X")
    gln.add_argument("--poles", type=_ints, default=None, help="Rankin-Selberg pole orders M_i")
    gln.add_argument("--search", action="store_true", help="maximize over X (default unless --x)")
    gln.add_argument("--x", type=float, default=None, help="evaluate at this cutoff only")
    gln.add_argument("--sharp", action="store_true", help="use M^(1/4) in C")

    rc = kinds.add_parser("rc", parents=[common, combo], help="Ramanujan-case closed forms")
    rc.add_argument("--part", choices=("real", "real-part", "sector"), default="real")
    rc.add_argument("--epsilon", type=float, default=None)

    cong = kinds.add_parser("congruence", parents=[common], help="ray-class bound, Ramanujan case")
    cong.add_argument("--n", type=int, required=True)
    cong.add_argument("--h", type=int, required=True)
    cong.add_argument("--t", type=float, default=0.0)

    split = kinds.add_parser("split", parents=[common], help="places split completely in E")
    split.add_argument("--n", type=int, required=True)
    split.add_argument("--d", type=int, default=3)
    split.add_argument("--t", type=float, default=0.0)
    split.add_argument("--cubic", action="store_true", help="cubic subextension variant")
    split.add_argument("--magnitude", action="store_true", help="|a_v| > 1 variant")

    prod = kinds.add_parser("product", parents=[common], help="quadratic combinations")
    prod.add_argument("--lambdas", type=_floats, default=())
    prod.add_argument("--nus", type=_floats, required=True)
    prod.add_argument("--t", type=float, default=0.0)

    inter = kinds.add_parser("interval", parents=[common], help="interval event for two forms")
    inter.add_argument("--lambdas", type=_floats, default=(1.0, -1.0))
    inter.add_argument("--a", type=float)
    inter.add_argument("--b", type=float)
    inter.add_argument("--threshold", action="store_true", help="locate the sign change of the a=-b family")
    inter.add_argument("--lo", type=float, default=1.0)
    inter.add_argument("--hi", type=float, default=3.0)

    emp = sub.add_parser("empirical", help="exact eigenform data and densities")
    actions = emp.add_subparsers(dest="action", required=True)
    gen = actions.add_parser("generate", parents=[common], help="write a coefficient CSV")
    gen.add_argument("form", choices=sorted(GENERATORS))
    gen.add_argument("--limit", type=int, required=True)
    gen.add_argument("-o", "--output", type=Path, required=True)

    dens = actions.add_parser("density", parents=[common], help="density of a sign or size event")
    dens.add_argument("--table", type=Path, action="append", required=True)
    dens.add_argument("--predicate", choices=sorted(PREDICATES), default="neg")
    dens.add_argument("--weights", type=_floats, default=None)
    dens.add_argument("--mod", type=int, default=None)
    dens.add_argument("--class", dest="residue", type=int, default=None)
    dens.add_argument("--split", type=int, default=None, metavar="D", help="primes split in Q(sqrt(D))")
    dens.add_argument("--cubic-split", action="store_true", help="primes of the form x^2+27y^2")
    dens.add_argument("--t", type=float, default=None, help="override the threshold")
    dens.add_argument("--limit", type=int, default=None)

    mc = actions.add_parser("montecarlo", parents=[common, combo], help="Sato-Tate check of rc bounds")
    mc.add_argument("--count", type=int, default=1_000_000)
    mc.add_argument("--interval", type=_floats, default=None, metavar="A,B")

    rep = sub.add_parser("reproduce", parents=[common], help="recompute every published constant")
    rep.add_argument("--only", action="append", choices=sorted(ROW_GROUPS), help="restrict to a group")
    return parser


HANDLERS = {"bound": cmd_bound, "empirical": cmd_empirical, "reproduce": cmd_reproduce}


def main(argv: Sequence[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    args = parser.parse_args(argv)
    start = time.perf_counter()
    try:
        args.threads = resolve_threads(args.threads)
        args.config_values = read_config(args.config) if args.config else {}
        if args.command == "empirical" and args.action == "montecarlo" and args.seed is None:
            args.seed = 0
        if args.command == "empirical" and args.action == "montecarlo" and args.interval is not None:
            if len(args.interval) != 2:
                raise UsageError("--interval needs exactly two numbers A,B")
        inputs, results, ok = HANDLERS[args.command](args)
    except UsageError as exc:
        print(f"{PROG}: error: {exc}", file=sys.stderr)
        return 2
    except (OSError, TableFormatError, ValueError) as exc:
        print(f"{PROG}: error: {exc}", file=sys.stderr)
        return 1
    seed = args.seed if args.seed is not None else args.config_values.get("seed", 0)
    report = {
        "command": argv,
        "inputs": inputs,
        "results": results,
        "ok": ok,
        "wall_clock": time.perf_counter() - start,
        "version": __version__,
        "seed": int(seed),
    }
    if args.json is None:
        print(render_human(report))
    else:
        text = json.dumps(report, indent=2, default=_jsonable)
        if args.json == "-":
            print(text)
        else:
            Path(args.json).write_text(text + "\n", encoding="utf-8")
            print(render_human(report))
    return 0 if ok and all(_finite(r) for r in results) else 1


def _finite(row: dict) -> bool:
    value = row.get("value")
    return not isinstance(value, float) or math.isfinite(value)


if __name__ == "__main__":
    sys.exit(main())
