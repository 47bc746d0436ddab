"""Command-line front end.

Subcommands: construct (build and save a set), verify (re-run the exact
detector on a saved set), exact (extremal table with a results cache),
bounds (closed-form density sweep as CSV), mcvol (Monte Carlo shell volume).

Set files are canonical JSON: sorted keys, two-space indent, LF newlines, so
a read immediately followed by a write is byte-identical.  Exit codes: 0
success, 1 verification found a witness, 2 bad input (malformed file or
invalid parameters).
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
import time
from typing import Optional

from filelock import FileLock

from . import __version__
from .bounds import corollary_bound, mc_annuli_volume, theorem_bound
from .constructions import (
    AnnuliSpec,
    UnsupportedParameters,
    build_behrend_set,
    build_torus_set,
    rankin_driver,
    single_shell_config,
)
from .exactsolver import DEFAULT_NODE_BUDGET, BudgetExceeded, exact_r
from .progressions import DegenerateParameters, IntSet, find_progressions

SCHEMA_VERSION = 1
SOLVER_VERSION = 1
DEFAULT_CACHE = ".progfree-cache.json"
DEFAULT_SET_FILE = "progfree-set.json"

EXACT_COLUMNS = ["N", "k", "D", "r", "witness", "status"]
BOUNDS_COLUMNS = ["logN", "n", "corollary_density", "theorem_density", "base_density"]


class CliError(Exception):
    """User-facing command error; maps to exit code 2."""


class SetFileError(CliError):
    """Set file is unreadable or violates its invariants."""


def canonical_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def write_text(path: Optional[str], text: str) -> None:
    if path is None:
        sys.stdout.write(text)
    else:
        with open(path, "w", newline="\n") as fh:
            fh.write(text)


def set_file_payload(
    universe: int,
    k: int,
    degree: int,
    elements,
    certified: bool,
    method: str,
    seed: int,
    parameters: dict,
) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "universe": universe,
        "k": k,
        "degree": degree,
        "elements": sorted(int(v) for v in elements),
        "certified": bool(certified),
        "provenance": {"method": method, "seed": seed, "parameters": parameters},
    }


def load_set_file(path: str) -> dict:
    try:
        with open(path) as fh:
            data = json.load(fh)
    except OSError as exc:
        raise SetFileError(f"cannot read set file: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise SetFileError(f"set file is not valid JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise SetFileError("set file must be a JSON object")
    for key in ("schema_version", "universe", "k", "degree", "elements", "certified"):
        if key not in data:
            raise SetFileError(f"set file missing required key {key!r}")
    if data["schema_version"] != SCHEMA_VERSION:
        raise SetFileError(
            f"unsupported schema_version {data['schema_version']!r}"
        )
    universe, k, degree = data["universe"], data["k"], data["degree"]
    elements = data["elements"]
    if not all(isinstance(v, int) and not isinstance(v, bool)
               for v in (universe, k, degree)):
        raise SetFileError("universe, k, degree must be integers")
    if not isinstance(elements, list) or not all(
        isinstance(v, int) and not isinstance(v, bool) for v in elements
    ):
        raise SetFileError("elements must be a list of integers")
    if elements != sorted(set(elements)):
        raise SetFileError("elements must be sorted and distinct")
    if elements and (elements[0] < 1 or elements[-1] > universe):
        raise SetFileError("elements must lie in [1, universe]")
    return data


def _cache_path() -> str:
    return os.environ.get("PROGFREE_CACHE", DEFAULT_CACHE)


def _cache_transaction(mutate):
    """Run mutate(cache_dict) -> result under the advisory file lock."""
    path = _cache_path()
    with FileLock(path + ".lock", timeout=30):
        cache = {}
        if os.path.exists(path):
            try:
                with open(path) as fh:
                    cache = json.load(fh)
            except (OSError, json.JSONDecodeError):
                cache = {}  # unreadable cache is treated as empty, then rewritten
        result, dirty = mutate(cache)
        if dirty:
            with open(path, "w", newline="\n") as fh:
                fh.write(canonical_json(cache))
    return result


def _rows_to_csv(columns: list[str], rows: list[dict]) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=columns, lineterminator="\n")
    writer.writeheader()
    writer.writerows(rows)
    return buf.getvalue()


def _emit_rows(args, columns: list[str], rows: list[dict]) -> None:
    if (args.format or "csv") == "json":
        write_text(args.output, canonical_json(rows))
    else:
        write_text(args.output, _rows_to_csv(columns, rows))


def _parse_int_range(text: str) -> list[int]:
    """'9' -> [9]; '3:12' -> [3..12] inclusive."""
    parts = text.split(":")
    try:
        if len(parts) == 1:
            return [int(parts[0])]
        if len(parts) == 2:
            lo, hi = int(parts[0]), int(parts[1])
            if lo > hi:
                raise ValueError
            return list(range(lo, hi + 1))
    except ValueError:
        pass
    raise CliError(f"bad integer range {text!r}; use N or LO:HI")


def _parse_float_range(text: str) -> list[float]:
    """'10' -> [10.0]; '10:100:10' -> inclusive sweep by step."""
    parts = text.split(":")
    try:
        if len(parts) == 1:
            return [float(parts[0])]
        if len(parts) in (2, 3):
            lo, hi = float(parts[0]), float(parts[1])
            step = float(parts[2]) if len(parts) == 3 else 1.0
            if step <= 0 or lo > hi:
                raise ValueError
            out = []
            v = lo
            while v <= hi + 1e-9:
                out.append(round(v, 12))
                v += step
            return out
    except ValueError:
        pass
    raise CliError(f"bad float range {text!r}; use X or LO:HI[:STEP]")


def _log2_or_inf(numerator: int, denominator: int) -> str:
    if numerator == 0:
        return "-inf"
    return "%.4f" % math.log2(numerator / denominator)


def _fresh_seed(args) -> int:
    if args.seed is not None:
        return args.seed
    return int.from_bytes(os.urandom(8), "big")


def _behrend_schedule(n: int) -> tuple[int, int]:
    """Default digit-set parameters: dim near sqrt(log2 n), largest feasible p."""
    if n < 5:
        raise CliError("digit-set construction needs n >= 5")

    def image_max(p: int, dim: int) -> int:
        return (p - 1) * ((2 * p) ** dim - 1) // (2 * p - 1)

    for dim in range(max(1, int(math.sqrt(math.log2(n)))), 0, -1):
        if image_max(2, dim) > n:
            continue
        p = 2
        while image_max(p + 1, dim) <= n:
            p += 1
        return dim, p
    raise CliError("no feasible digit-set parameters for this n")


def cmd_construct(args) -> int:
    seed = _fresh_seed(args)
    n, k, degree = args.n, args.k, args.deg
    if n < 1:
        raise CliError("--n must be >= 1")
    try:
        if args.method == "behrend":
            if (k, degree) != (3, 1):
                raise CliError(
                    "the digit-set method certifies only k=3, degree=1"
                )
            if args.delta is not None:
                raise CliError("--delta applies to the torus methods only")
            if args.dim is not None and args.p is not None:
                dim, p = args.dim, args.p
            elif args.dim is None and args.p is None:
                dim, p = _behrend_schedule(n)
            else:
                raise CliError("give both --dim and --p, or neither")
            built = build_behrend_set(n, dim, p, args.radius_sq)
            parameters = {
                "dim": dim,
                "p": p,
                "radius_sq": built.config.radius_sq,
            }
        elif args.method == "torus":
            if args.p is not None or args.radius_sq is not None:
                raise CliError("--p/--radius-sq apply to the behrend method only")
            cfg = single_shell_config(
                n, k, degree, seed, dim=args.dim, delta=args.delta
            )
            built = build_torus_set(cfg)
            parameters = {
                "dim": cfg.dim,
                "delta": cfg.annuli.delta,
                "z": cfg.annuli.z,
                "n0": 1,
            }
        else:  # rankin
            if any(v is not None for v in (args.dim, args.delta, args.p, args.radius_sq)):
                raise CliError(
                    "the recursive driver schedules its own parameters; "
                    "use --method torus for overrides"
                )
            built = rankin_driver(n, k, degree, seed)
            parameters = {"levels": list(built.levels)}
    except (UnsupportedParameters, DegenerateParameters, ValueError) as exc:
        raise CliError(str(exc)) from exc

    size = len(built.result)
    out_path = args.output or DEFAULT_SET_FILE
    payload = set_file_payload(
        n, k, degree, built.result.members, built.certified,
        args.method, seed, parameters,
    )
    with open(out_path, "w", newline="\n") as fh:
        fh.write(canonical_json(payload))

    print(f"method={args.method} n={n} k={k} degree={degree} seed={seed}")
    print(
        f"size={size} density={size / n:.6g} log2_density={_log2_or_inf(size, n)} "
        f"removed={len(built.removed)} certified={str(built.certified).lower()}"
    )
    if n >= 2:
        try:
            rep = theorem_bound(n, k, degree)
            line = (f"bound_density={rep.density:.6g}xC "
                    f"(depth={rep.depth}, exponent={rep.exponent:.4f})")
            if rep.r3_density is not None:
                line += f" r3_density={rep.r3_density:.6g}"
            if rep.base_case_density is not None:
                line += f" base_case_density={rep.base_case_density:.6g}"
            print(line)
        except UnsupportedParameters:
            pass
    print(f"wrote {out_path}")
    return 0


def cmd_verify(args) -> int:
    data = load_set_file(args.file)
    universe, k, degree = data["universe"], data["k"], data["degree"]
    try:
        members = IntSet.from_iterable(universe, data["elements"])
        hits = find_progressions(members, k, degree, limit=1)
    except (DegenerateParameters, ValueError) as exc:
        raise CliError(str(exc)) from exc
    if hits:
        ptype, seq = hits[0]
        print(
            f"witness {tuple(seq)} type (n,a,b)=({ptype.degree},{ptype.start},{ptype.diff})"
        )
        return 1
    print(
        f"no {k}-term degree-{degree} progressions among {len(members)} elements"
    )
    return 0


def cmd_exact(args) -> int:
    k, degree = args.k, args.deg
    rows = []
    for n in _parse_int_range(args.n):
        if n < 0:
            raise CliError("N must be >= 0")
        key = f"{n}:{k}:{degree}"

        def lookup(cache, key=key):
            entry = cache.get(key)
            if entry and entry.get("solver_version") == SOLVER_VERSION:
                return entry, False
            return None, False

        entry = _cache_transaction(lookup)
        if entry is not None:
            value, witness, status = entry["value"], entry["witness"], "exact"
        else:
            try:
                rec = exact_r(n, k, degree, node_budget=args.node_budget)
                value, witness, status = rec.value, list(rec.witness), "exact"

                def store(cache, key=key, value=value, witness=witness):
                    cache[key] = {
                        "value": value,
                        "witness": witness,
                        "timestamp": time.strftime(
                            "%Y-%m-%dT%H:%M:%SZ", time.gmtime()
                        ),
                        "solver_version": SOLVER_VERSION,
                    }
                    return None, True

                _cache_transaction(store)
            except BudgetExceeded as exc:
                value, witness, status = (
                    exc.lower_bound, list(exc.witness), "lower_bound"
                )
            except (DegenerateParameters, ValueError) as exc:
                raise CliError(str(exc)) from exc
        rows.append({
            "N": n, "k": k, "D": degree, "r": value,
            "witness": " ".join(map(str, witness)), "status": status,
        })
    _emit_rows(args, EXACT_COLUMNS, rows)
    return 0


def cmd_bounds(args) -> int:
    if (args.n is None) == (args.log2_n is None):
        raise CliError("give exactly one of --n and --log2-n")
    k, degree = args.k, args.deg
    if args.n is not None:
        if any(v < 2 for v in _parse_int_range(args.n)):
            raise CliError("--n values must be >= 2")
        logs = [math.log2(v) for v in _parse_int_range(args.n)]
    else:
        logs = _parse_float_range(args.log2_n)
        if any(v < 1 for v in logs):
            raise CliError("--log2-n values must be >= 1")
    rows = []
    for log_n in logs:
        try:
            cor = corollary_bound(log2_n=log_n, k=k)
            thm = theorem_bound(log2_n=log_n, k=k, degree=degree)
        except (UnsupportedParameters, ValueError) as exc:
            raise CliError(str(exc)) from exc
        rows.append({
            "logN": "%.6g" % log_n,
            "n": thm.depth,
            "corollary_density": "%.12g" % cor.density,
            "theorem_density": "%.12g" % thm.density,
            "base_density": (
                "%.12g" % thm.base_case_density
                if thm.base_case_density is not None else ""
            ),
        })
    _emit_rows(args, BOUNDS_COLUMNS, rows)
    return 0


def _load_annuli_spec(path: str) -> AnnuliSpec:
    try:
        with open(path) as fh:
            data = json.load(fh)
        return AnnuliSpec(
            inner_set=IntSet.from_iterable(data["n0"], data["inner"]),
            n0=data["n0"],
            degree=data["degree"],
            dim=data["dim"],
            delta=data["delta"],
            z=data["z"],
        )
    except (OSError, json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
        raise CliError(f"bad annuli spec file: {exc}") from exc


def cmd_mcvol(args) -> int:
    seed = _fresh_seed(args)
    if args.spec_file is not None:
        spec = _load_annuli_spec(args.spec_file)
    else:
        if args.dim is None or args.delta is None:
            raise CliError("need --spec-file, or --dim and --delta")
        try:
            spec = AnnuliSpec(
                inner_set=IntSet(1, (1,)), n0=1, degree=args.deg,
                dim=args.dim, delta=args.delta, z=args.z,
            )
        except ValueError as exc:
            raise CliError(str(exc)) from exc
    try:
        est = mc_annuli_volume(spec, args.samples, seed)
    except ValueError as exc:
        raise CliError(str(exc)) from exc
    report = {
        "relative_volume": est.relative_volume,
        "std_error": est.std_error,
        "samples": est.samples,
        "dim": spec.dim,
        "degree": spec.degree,
        "n0": spec.n0,
        "inner_size": len(spec.inner_set),
        "delta": spec.delta,
        "z": spec.z,
        "seed": seed,
    }
    if args.format == "csv":
        cols = list(report)
        _emit_rows(args, cols, [report])
    else:
        write_text(args.output, canonical_json(report))
    return 0


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=None,
                        help="RNG seed (default: drawn from system entropy and recorded)")
    common.add_argument("--output", default=None, help="output file (default: stdout)")
    # default None so each command can pick its own (csv for tables, json
    # for mcvol reports); a parser-level set_defaults would leak through the
    # shared parent's action object into every subcommand
    common.add_argument("--format", choices=("csv", "json"), default=None,
                        help="output format (default: csv tables, json for mcvol)")

    parser = argparse.ArgumentParser(
        prog="progfree",
        description="Construct, verify, and bound progression-free subsets of [1..N].",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("construct", parents=[common],
                       help="build a progression-free set and save it")
    p.add_argument("--method", choices=("behrend", "torus", "rankin"), required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--k", type=int, default=3)
    p.add_argument("--deg", type=int, default=1)
    p.add_argument("--dim", type=int, default=None, help="override torus/digit dimension")
    p.add_argument("--delta", type=float, default=None, help="override shell half-width")
    p.add_argument("--p", type=int, default=None, help="digit base parameter")
    p.add_argument("--radius-sq", type=int, default=None, help="digit sphere override")
    p.set_defaults(func=cmd_construct)

    p = sub.add_parser("verify", parents=[common],
                       help="re-run the exact detector on a saved set")
    p.add_argument("file")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("exact", parents=[common],
                       help="exact extremal sizes over a range of N")
    p.add_argument("--n", required=True, help="N or LO:HI")
    p.add_argument("--k", type=int, default=3)
    p.add_argument("--deg", type=int, default=1)
    p.add_argument("--node-budget", type=int, default=DEFAULT_NODE_BUDGET)
    p.set_defaults(func=cmd_exact)

    p = sub.add_parser("bounds", parents=[common],
                       help="closed-form density bounds as CSV")
    p.add_argument("--n", default=None, help="N or LO:HI")
    p.add_argument("--log2-n", default=None, help="log2(N) or LO:HI[:STEP]")
    p.add_argument("--k", type=int, default=3)
    p.add_argument("--deg", type=int, default=1)
    p.set_defaults(func=cmd_bounds)

    p = sub.add_parser("mcvol", parents=[common],
                       help="Monte Carlo shell-volume estimate")
    p.add_argument("--spec-file", default=None, help="JSON annuli description")
    p.add_argument("--dim", type=int, default=None)
    p.add_argument("--deg", type=int, default=1)
    p.add_argument("--delta", type=float, default=None)
    p.add_argument("--z", type=float, default=0.0)
    p.add_argument("--samples", type=int, default=10 ** 5)
    p.set_defaults(func=cmd_mcvol)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
