"""Batch command-line front end.

Subcommands:

* ``params`` - derive and validate the constants for a ring, write them to a
  table file, print a summary with the Barrett reducer verdict;
* ``gen``    - produce seeded, reproducible test-vector files;
* ``mul``    - multiply every vector record with the reference code
  (``naive`` schoolbook or ``ntt`` transform path);
* ``sim``    - drive the cycle-accurate multiplier model over the vectors
  and dump products plus the cycle report as JSON;
* ``check``  - run schoolbook, transform, and simulator over every record
  and fail unless all three agree everywhere.

Vector files are newline-delimited JSON, one record per line, with all
coefficients as decimal strings so nothing downstream can lose precision.
Every command is deterministic: the only randomness is ``gen``'s
``--seed``, which feeds Python's ``random.Random`` (Mersenne Twister); with
equal flags the output files are byte-identical across runs.

Exit codes: 0 success, 1 check found a disagreement, 2 bad input
(ring, file, or record), 3 internal pipeline assertion.  The environment
variable ``NTTMUL_TRACE_DIR`` names a default directory for ``sim`` traces
when ``--trace`` is not given.
"""

from __future__ import annotations

import argparse
import json
import os
import random
import sys

from .modarith import validate_barrett_constants
from .params import build_params, emit_tables, load_tables, ring_problem
from .pipesim import PipelineAssertionError, PipelineConfig, run_stream
from .polymul import Polynomial, naive_negacyclic_mul, negacyclic_mul_ntt

EXIT_OK = 0
EXIT_MISMATCH = 1
EXIT_INPUT = 2
EXIT_ASSERT = 3


class _InputError(Exception):
    pass


def _load_params(path):
    try:
        return load_tables(path)
    except FileNotFoundError:
        raise _InputError(f"parameter file not found: {path}")
    except (ValueError, KeyError, json.JSONDecodeError) as e:
        raise _InputError(f"{path}: {e}")


def _coeffs_from_json(value, n, M, where):
    if not isinstance(value, list) or len(value) != n:
        raise _InputError(f"{where}: expected an array of {n} coefficients")
    out = []
    for x in value:
        if isinstance(x, str) and x.isdigit():
            v = int(x)
        elif isinstance(x, int) and not isinstance(x, bool):
            v = x
        else:
            raise _InputError(f"{where}: coefficient {x!r} is not a "
                              "decimal integer")
        if not 0 <= v < M:
            raise _InputError(f"{where}: coefficient {v} outside [0, {M})")
        out.append(v)
    return tuple(out)


def _load_records(path, params):
    n, M = params.n, params.M
    records = []
    try:
        fh = open(path)
    except FileNotFoundError:
        raise _InputError(f"vector file not found: {path}")
    with fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            where = f"{path}:{lineno}"
            try:
                rec = json.loads(line)
            except json.JSONDecodeError as e:
                raise _InputError(f"{where}: invalid JSON ({e})")
            if not isinstance(rec, dict) or "a" not in rec or "b" not in rec:
                raise _InputError(f"{where}: record must carry fields a and b")
            entry = {
                "a": _coeffs_from_json(rec["a"], n, M, where + " field a"),
                "b": _coeffs_from_json(rec["b"], n, M, where + " field b"),
                "raw": rec,
            }
            if "c_expected" in rec:
                entry["c_expected"] = _coeffs_from_json(
                    rec["c_expected"], n, M, where + " field c_expected")
            records.append(entry)
    return records


def _dump_json_line(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":")) + "\n"


def _str_coeffs(values):
    return [str(v) for v in values]


# ---------------------------------------------------------------------------
# subcommands

def cmd_params(args) -> int:
    problem = ring_problem(args.modulus, args.n)
    if problem is not None:
        raise _InputError(problem)
    p = build_params(args.modulus, args.n)
    emit_tables(p, args.out)
    ctx = p.ctx
    print(f"modulus M = {p.M}, transform size N = {p.n} "
          f"({p.num_stages} stages)")
    print(f"barrett: k = {ctx.barrett_k}, u = {ctx.barrett_u}")
    print(f"roots: omega = {p.omega}, phi = {p.phi}")
    verdict = validate_barrett_constants(p.M, ctx.barrett_k, ctx.barrett_u,
                                         samples=args.barrett_samples)
    if verdict.valid:
        print(f"barrett check: ok over {verdict.tested} inputs "
              f"(boundary family + samples)")
    else:
        print(f"barrett check: FAILS, first counterexample "
              f"{verdict.first_counterexample}")
    print(f"wrote {args.out}")
    return EXIT_OK if verdict.valid else EXIT_INPUT


def cmd_gen(args) -> int:
    p = _load_params(args.params)
    if args.count < 0:
        raise _InputError("--count must be >= 0")
    rng = random.Random(args.seed)
    n, M = p.n, p.M
    with open(args.out, "w") as fh:
        for _ in range(args.count):
            a = [rng.randrange(M) for _ in range(n)]
            b = [rng.randrange(M) for _ in range(n)]
            fh.write(_dump_json_line({"a": _str_coeffs(a),
                                      "b": _str_coeffs(b),
                                      "seed": args.seed}))
    print(f"wrote {args.count} records to {args.out}")
    return EXIT_OK


def cmd_mul(args) -> int:
    p = _load_params(args.params)
    records = _load_records(args.vectors, p)
    mul = naive_negacyclic_mul if args.method == "naive" else negacyclic_mul_ntt
    with open(args.out, "w") as fh:
        for rec in records:
            a = Polynomial(rec["a"], p.M)
            b = Polynomial(rec["b"], p.M)
            c = mul(a, b, p)
            out = dict(rec["raw"])
            out["c"] = _str_coeffs(c.coeffs)
            fh.write(_dump_json_line(out))
    print(f"multiplied {len(records)} records ({args.method}) into {args.out}")
    return EXIT_OK


def _trace_destination(args) -> str | None:
    if getattr(args, "trace", None):
        return args.trace
    env_dir = os.environ.get("NTTMUL_TRACE_DIR")
    if env_dir:
        return os.path.join(env_dir, "sim_trace.csv")
    return None


def cmd_sim(args) -> int:
    p = _load_params(args.params)
    records = _load_records(args.vectors, p)
    config = PipelineConfig(n=p.n, params=p, mode=args.mode,
                            butterfly_latency=args.butterfly_latency)
    pairs = [(Polynomial(r["a"], p.M), Polynomial(r["b"], p.M))
             for r in records]
    trace_path = _trace_destination(args)
    try:
        products, report = run_stream(pairs, config, trace_path=trace_path)
    except PipelineAssertionError as e:
        print(f"internal assertion: {e}", file=sys.stderr)
        if trace_path is not None:
            print(f"cycle trace (up to the failure): {trace_path}",
                  file=sys.stderr)
        return EXIT_ASSERT
    doc = {
        "report": report.to_dict(),
        "products": [_str_coeffs(poly.coeffs) for poly in products],
    }
    with open(args.report, "w") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
        fh.write("\n")
    print(f"simulated {len(pairs)} multiplications at n={p.n} "
          f"({config.mode} mode, butterfly latency {config.butterfly_latency})")
    if report.first_mul_latency is not None:
        print(f"first product after {report.first_mul_latency} cycles "
              f"(predicted {report.predicted_first_mul})")
    if report.steady_cycles_per_mul is not None:
        print(f"steady state: {report.steady_cycles_per_mul} cycles "
              f"per multiplication")
    if trace_path is not None:
        print(f"cycle trace: {trace_path}")
    print(f"wrote {args.report}")
    return EXIT_OK


def cmd_check(args) -> int:
    p = _load_params(args.params)
    records = _load_records(args.vectors, p)
    pairs = [(Polynomial(r["a"], p.M), Polynomial(r["b"], p.M))
             for r in records]
    config = PipelineConfig(n=p.n, params=p, mode="schedule")
    sim_products, _ = run_stream(pairs, config)
    for i, rec in enumerate(records):
        a, b = pairs[i]
        want = naive_negacyclic_mul(a, b, p).coeffs
        got_ntt = negacyclic_mul_ntt(a, b, p).coeffs
        if got_ntt != want:
            print(f"record {i}: transform result disagrees with the "
                  f"schoolbook oracle", file=sys.stderr)
            return EXIT_MISMATCH
        if sim_products[i].coeffs != want:
            print(f"record {i}: simulator output disagrees with the "
                  f"schoolbook oracle", file=sys.stderr)
            return EXIT_MISMATCH
        if "c_expected" in rec and rec["c_expected"] != want:
            print(f"record {i}: stored c_expected disagrees with the "
                  f"schoolbook oracle", file=sys.stderr)
            return EXIT_MISMATCH
    print(f"checked {len(records)} records at n={p.n}, M={p.M}: "
          f"schoolbook, transform, and simulator all agree")
    return EXIT_OK


# ---------------------------------------------------------------------------

def _build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="nttmul",
        description="negacyclic polynomial multiplication: parameter "
                    "derivation, reference multiplication, and the "
                    "cycle-accurate pipeline model")
    sub = ap.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("params", help="derive constants and write a table file")
    sp.add_argument("--modulus", type=int, required=True)
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--out", required=True)
    sp.add_argument("--barrett-samples", type=int, default=100_000,
                    help="random inputs for the reducer check, on top of the "
                         "structured boundary family")
    sp.set_defaults(func=cmd_params)

    sp = sub.add_parser("gen", help="generate seeded test vectors")
    sp.add_argument("--params", required=True)
    sp.add_argument("--count", type=int, required=True)
    sp.add_argument("--seed", type=int, required=True)
    sp.add_argument("--out", required=True)
    sp.set_defaults(func=cmd_gen)

    sp = sub.add_parser("mul", help="multiply vector records with reference code")
    sp.add_argument("--params", required=True)
    sp.add_argument("--vectors", required=True)
    sp.add_argument("--method", choices=("naive", "ntt"), default="ntt")
    sp.add_argument("--out", required=True)
    sp.set_defaults(func=cmd_mul)

    sp = sub.add_parser("sim", help="run the cycle-accurate multiplier model")
    sp.add_argument("--params", required=True)
    sp.add_argument("--vectors", required=True)
    sp.add_argument("--mode", choices=("schedule", "structural"),
                    default="schedule")
    sp.add_argument("--butterfly-latency", type=int, default=None)
    sp.add_argument("--report", required=True)
    sp.add_argument("--trace", default=None,
                    help="CSV cycle-trace path (default: sim_trace.csv under "
                         "$NTTMUL_TRACE_DIR when that is set)")
    sp.set_defaults(func=cmd_sim)

    sp = sub.add_parser("check", help="cross-check oracle, transform, simulator")
    sp.add_argument("--params", required=True)
    sp.add_argument("--vectors", required=True)
    sp.set_defaults(func=cmd_check)

    return ap


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return args.func(args)
    except _InputError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT
    except ValueError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT
    except PipelineAssertionError as e:
        print(f"internal assertion: {e}", file=sys.stderr)
        return EXIT_ASSERT


if __name__ == "__main__":
    sys.exit(main())
