"""Command-line driver: every pipeline with JSON in, JSON out.

Certificates and tables are written as JSON. Wall-clock fields live under a
top-level "timing" key so two runs with the same flags can be diffed.
Exit status: 0 success, 1 a certificate failed verification, 2 bad input.
"""

import argparse
import csv
import io
import json
import sys
import time

import numpy as np

from .errors import BoundGenError
from .finite import (
    TriplePartition,
    five_factor_decompose,
    ladder_build,
    ladder_express,
    random_in_corner,
    random_partition,
    symmetry_factorize,
)
from .matrix_core import DEFAULT_TOL, as_matrix, matrix_from_json, random_unitary
from .projections import CornerContext, Projection
from .sinf import (
    cond_c_express_perm,
    five_factor_decompose_perm,
    involution_certificate,
    mod3_partition,
)
from .tailperm import TailPermutation, random_tail_permutation
from .words import certificate_from_json, verify

USAGE_FORMATS = """\
JSON formats
  matrix       {"dim": d, "data": [[re, im], ...]}   (row-major, d*d entries)
  permutation  {"m": m, "sigma": [...], "offsets": [...], "T": T, "table": [[x, y], ...]}
  certificate  {"kind", "model", "input", "letters": [{"tag", "payload", "support"}],
                "claimed_bound", "paper_bound", "measured_length", "residual", ...}
  --in for factor/symmetry/ladder takes a matrix; for sinf-* a permutation;
  for verify a certificate. Omit --in to draw a random input from --seed.
"""

SUITES = ("five_factor", "symmetry", "ladder", "sinf_factor", "involution", "condc")


class ConfigError(Exception):
    pass


def parse_range(text):
    """'3..12' -> [3, ..., 12]; '4' -> [4]; '3,5,7' -> [3, 5, 7]."""
    try:
        if ".." in text:
            lo, hi = text.split("..")
            out = list(range(int(lo), int(hi) + 1))
        else:
            out = [int(x) for x in text.split(",")]
    except ValueError as exc:
        raise ConfigError(f"bad range {text!r}") from exc
    if not out:
        raise ConfigError(f"empty range {text!r}")
    return out


def build_parser():
    parser = argparse.ArgumentParser(
        prog="boundgen",
        description="Bounded-length factorizations with verifiable certificates.",
        epilog=USAGE_FORMATS,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--seed", type=int, default=0, help="single seed for all randomness")
        p.add_argument("--tol", type=float, default=None, help="residual tolerance (default 1e-8)")
        p.add_argument("--in", dest="inp", default=None, help="input JSON file")
        p.add_argument("--out", default=None, help="output file (default stdout)")
        return p

    common(sub.add_parser("factor", help="five-factor decomposition of a unitary")).add_argument(
        "--dim", type=int, default=3)
    common(sub.add_parser("symmetry", help="trace-zero symmetry factorization")).add_argument(
        "--dim", type=int, default=2)
    p = common(sub.add_parser("ladder", help="build a trace ladder and express a unitary"))
    p.add_argument("--dim", type=int, default=3)
    p.add_argument("--levels", type=int, default=1)
    common(sub.add_parser("sinf-factor", help="five factors of a tail permutation"))
    common(sub.add_parser("sinf-involution", help="four conjugates of the base involution"))
    common(sub.add_parser("sinf-condc", help="word over G(P) and one generator"))
    common(sub.add_parser("verify", help="verify a certificate file"))
    p = common(sub.add_parser("bench", help="batch runs with a summary table"))
    p.add_argument("--suite", choices=SUITES, default="five_factor")
    p.add_argument("--dims", default="3..12")
    p.add_argument("--levels", default="1..3")
    p.add_argument("--per-dim", type=int, default=20)
    p.add_argument("--sample", type=int, default=100, help="cases for the permutation suites")
    p.add_argument("--format", choices=("json", "csv"), default="json")
    return parser


def tolerance(args):
    if args.tol is None:
        return DEFAULT_TOL
    try:
        return DEFAULT_TOL.replace(tol_residual=args.tol, tol_meet=args.tol)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def read_json(path):
    try:
        with open(path) as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from exc


def input_matrix(args, dim):
    if args.inp:
        u = as_matrix(matrix_from_json(read_json(args.inp)))
        return u
    return random_unitary(dim, args.seed)


def input_perm(args):
    if args.inp:
        return TailPermutation.from_json(read_json(args.inp))
    return random_tail_permutation(np.random.default_rng(args.seed))


def validate(args):
    cmd = args.command
    if getattr(args, "dim", None) is not None and not isinstance(args.dim, str):
        if args.dim < 1:
            raise ConfigError("--dim must be positive")
        if cmd == "factor" and args.dim < 3:
            raise ConfigError("factor needs --dim >= 3 (three nonzero parts)")
        if cmd == "symmetry" and args.dim % 2:
            raise ConfigError("symmetry needs an even --dim")
    if cmd == "ladder" and args.levels < 1:
        raise ConfigError("--levels must be >= 1")
    if cmd == "verify" and not args.inp:
        raise ConfigError("verify needs --in")
    if cmd == "bench":
        if args.per_dim < 1 or args.sample < 1:
            raise ConfigError("--per-dim and --sample must be positive")
        args.dim_list = parse_range(args.dims)
        args.level_list = parse_range(args.levels)
        if args.suite in ("five_factor",) and min(args.dim_list) < 3:
            raise ConfigError("five_factor needs dims >= 3")
        if args.suite == "symmetry" and any(d % 2 or d < 2 for d in args.dim_list):
            raise ConfigError("symmetry needs even dims")


# single runs ----------------------------------------------------------------


def run_factor(args, tol):
    d = args.dim
    if args.inp:
        u = input_matrix(args, d)
        d = u.shape[0]
        if d < 3:
            raise ConfigError("five-factor input needs dimension >= 3")
        k = max(1, d // 3)
        t = TriplePartition.coordinate(d, k, d - 2 * k)
    else:
        rng = np.random.default_rng(args.seed)
        t = random_partition(d, rng)
        u = random_in_corner(t.corner, rng)
    return five_factor_decompose(u, t, tol)


def run_symmetry(args, tol):
    u = input_matrix(args, args.dim)
    return symmetry_factorize(u, CornerContext(Projection.identity(u.shape[0])), tol)


def run_ladder(args, tol):
    u = input_matrix(args, args.dim)
    return ladder_express(u, ladder_build(u.shape[0], args.levels, tol=tol), tol)


def run_sinf_factor(args, tol):
    return five_factor_decompose_perm(input_perm(args), *mod3_partition())


def run_sinf_involution(args, tol):
    return involution_certificate(input_perm(args))


def run_sinf_condc(args, tol):
    return cond_c_express_perm(input_perm(args))


RUNNERS = {
    "factor": run_factor,
    "symmetry": run_symmetry,
    "ladder": run_ladder,
    "sinf-factor": run_sinf_factor,
    "sinf-involution": run_sinf_involution,
    "sinf-condc": run_sinf_condc,
}


# bench ------------------------------------------------------------------------


def _bench_cases(args):
    """(label, thunk) pairs in case-index order."""
    rng = np.random.default_rng(args.seed)
    suite = args.suite
    cases = []
    if suite in ("five_factor", "symmetry"):
        for d in args.dim_list:
            for _ in range(args.per_dim):
                seed = int(rng.integers(2**63))
                if suite == "five_factor":
                    def thunk(d=d, seed=seed):
                        r = np.random.default_rng(seed)
                        t = random_partition(d, r)
                        return five_factor_decompose(random_in_corner(t.corner, r), t)
                else:
                    def thunk(d=d, seed=seed):
                        return symmetry_factorize(random_unitary(d, seed),
                                                  CornerContext(Projection.identity(d)))
                cases.append((d, thunk))
    elif suite == "ladder":
        for n in args.level_list:
            d = 3**n
            ladder = ladder_build(d, n)
            for _ in range(args.per_dim):
                seed = int(rng.integers(2**63))
                cases.append((d, lambda d=d, seed=seed, ladder=ladder: ladder_express(random_unitary(d, seed), ladder)))
    else:
        make = {
            "sinf_factor": lambda u: five_factor_decompose_perm(u, *mod3_partition()),
            "involution": involution_certificate,
            "condc": cond_c_express_perm,
        }[suite]
        for _ in range(args.sample):
            seed = int(rng.integers(2**63))
            cases.append(("perm", lambda seed=seed: make(random_tail_permutation(np.random.default_rng(seed)))))
    return cases


def run_bench(args, tol):
    rows = {}
    timing = {}
    for label, thunk in _bench_cases(args):
        row = rows.setdefault(label, {
            "case": label, "cases": 0, "ok": 0, "errors": 0, "max_length": 0,
            "claimed_bound": None, "paper_bound": None, "max_residual": 0.0,
        })
        row["cases"] += 1
        t0 = time.perf_counter()
        try:
            cert = thunk()
        except BoundGenError as exc:
            row["errors"] += 1
            row.setdefault("error_kinds", {}).setdefault(type(exc).__name__, 0)
            row["error_kinds"][type(exc).__name__] += 1
            timing[str(label)] = timing.get(str(label), 0.0) + time.perf_counter() - t0
            continue
        report = verify(cert, tol)
        timing[str(label)] = timing.get(str(label), 0.0) + time.perf_counter() - t0
        row["ok"] += int(report.ok)
        row["max_length"] = max(row["max_length"], cert.measured_length)
        row["claimed_bound"] = cert.claimed_bound
        row["paper_bound"] = cert.paper_bound
        if report.residual is not None:
            row["max_residual"] = max(row["max_residual"], float(report.residual))
    table = list(rows.values())
    for row in table:
        row["success_rate"] = row["ok"] / row["cases"]
    return {"suite": args.suite, "seed": args.seed, "rows": table, "timing": timing}


def to_csv(result):
    buf = io.StringIO()
    cols = ["case", "cases", "ok", "errors", "success_rate", "max_length",
            "claimed_bound", "paper_bound", "max_residual", "seconds"]
    writer = csv.DictWriter(buf, fieldnames=cols, extrasaction="ignore")
    writer.writeheader()
    for row in result["rows"]:
        writer.writerow({**row, "seconds": round(result["timing"].get(str(row["case"]), 0.0), 4)})
    return buf.getvalue()


# entry point --------------------------------------------------------------------


def emit(text, path):
    if path:
        with open(path, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def fail(kind, message, code):
    sys.stderr.write(json.dumps({"error": kind, "message": message}) + "\n")
    return code


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if exc.code == 0 else 2
    try:
        validate(args)
        tol = tolerance(args)
        if args.command == "verify":
            cert = certificate_from_json(read_json(args.inp), tol)
            report = verify(cert, tol)
            emit(json.dumps(report.to_json(), indent=2) + "\n", args.out)
            return 0 if report.ok else 1
        if args.command == "bench":
            result = run_bench(args, tol)
            text = to_csv(result) if args.format == "csv" else json.dumps(result, indent=2) + "\n"
            emit(text, args.out)
            return 0 if all(r["success_rate"] == 1.0 for r in result["rows"]) else 1
        t0 = time.perf_counter()
        cert = RUNNERS[args.command](args, tol)
        elapsed = time.perf_counter() - t0
        report = verify(cert, tol)
        obj = cert.to_json()
        obj["verified"] = report.ok
        obj["timing"] = {"seconds": elapsed}
        emit(json.dumps(obj) + "\n", args.out)
        return 0 if report.ok else 1
    except ConfigError as exc:
        return fail("ConfigError", str(exc), 2)
    except BoundGenError as exc:
        return fail(type(exc).__name__, str(exc), 2)


if __name__ == "__main__":
    sys.exit(main())
