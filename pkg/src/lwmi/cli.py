"""Command-line front end.

Every subcommand reads one problem JSON file and writes exactly one JSON
object to stdout.  Exit codes: 0 success, 1 input error (message on
stderr only), 2 capacity or backend error (JSON error object on stdout),
3 a checked identity failed.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
import time
from dataclasses import replace

from .errors import BackendUnavailableError, CapacityError, InputError
from .measures import factorize, validate_pdf
from .oracle import GridSpec, grid_oracle
from .results import number_to_json
from .wmi import Problem, check_identities, compute_wmi

log = logging.getLogger("lwmi")

EXIT_OK, EXIT_INPUT, EXIT_CAPACITY, EXIT_IDENTITY = 0, 1, 2, 3


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="lwmi", description="Weighted model integration.")
    sub = parser.add_subparsers(dest="command", required=True)
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("problem", help="problem JSON file, or - for stdin")
    common.add_argument("--method", choices=("exact", "mc", "auto", "oracle"), default=None,
                        help="backend (default: the problem's, else auto)")
    common.add_argument("--mc-samples", type=int, default=None, metavar="N")
    common.add_argument("--seed", type=int, default=None, metavar="S")
    common.add_argument("--grid-resolution", type=int, default=None, metavar="R")
    common.add_argument("--threads", type=int, default=None,
                        help="Monte Carlo workers (WMI_THREADS overrides)")
    common.add_argument("--breakdown", action="store_true",
                        help="include per-assignment contributions")
    common.add_argument("--timing", action="store_true",
                        help="add elapsed_ms to the output (makes stdout non-reproducible)")
    common.add_argument("-v", "--verbose", action="store_true", help="log to stderr")
    for name, text in [
        ("compute", "weighted model integral of the formula"),
        ("validate-pdf", "check that the weight integrates to 1"),
        ("factorize", "split a joint density into marginal and conditionals"),
        ("check-identities", "run the applicable measure-theoretic identities"),
        ("oracle", "midpoint grid Riemann sum"),
    ]:
        sub.add_parser(name, parents=[common], help=text)
    return parser


def load_problem(args) -> Problem:
    if args.problem == "-":
        text = sys.stdin.read()
    else:
        try:
            with open(args.problem, encoding="utf-8") as fh:
                text = fh.read()
        except OSError as exc:
            raise InputError(f"cannot read {args.problem}: {exc.strerror}") from exc
    p = Problem.from_json(text)
    changes = {}
    if args.method in ("exact", "mc", "auto"):
        changes["backend"] = args.method
    if args.mc_samples is not None:
        changes["mc_samples"] = args.mc_samples
    if args.seed is not None:
        changes["seed"] = args.seed
    if args.grid_resolution is not None:
        changes["oracle_resolution"] = args.grid_resolution
    threads = os.environ.get("WMI_THREADS") or args.threads
    if threads is not None:
        changes["threads"] = max(1, int(threads))
    return replace(p, **changes) if changes else p


def _dispatch(args, p: Problem) -> tuple[dict, int]:
    if args.command == "oracle" or (args.command == "compute" and args.method == "oracle"):
        r = grid_oracle(p, GridSpec(p.oracle_resolution))
        out = r.to_json(breakdown=args.breakdown)
        out["resolution"] = p.oracle_resolution
        return out, EXIT_OK
    if args.command == "compute":
        return compute_wmi(p).to_json(breakdown=args.breakdown), EXIT_OK
    opts = dict(backend=p.backend, mc_samples=p.mc_samples, seed=p.seed, threads=p.threads)
    if args.command == "validate-pdf":
        report = validate_pdf(p.weight, p.universe, **opts)
        out = {"value": number_to_json(report.mass), **report.to_json()}
        del out["mass"]
        return out, EXIT_OK
    if args.command == "factorize":
        report = validate_pdf(p.weight, p.universe, **opts)
        marginal, family = factorize(p.weight, p.universe, report=report, **opts)
        out = {"value": number_to_json(report.mass), "method": report.method,
               "marginal": marginal.to_json(), "conditionals": family.to_json()}
        return out, EXIT_OK
    checks = check_identities(p)
    ok = all(c.passed for c in checks)
    return {"checks": [c.to_json() for c in checks], "pass": ok}, EXIT_OK if ok else EXIT_IDENTITY


def run(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        stream=sys.stderr, format="%(levelname)s %(name)s: %(message)s")
    start = time.perf_counter()
    try:
        p = load_problem(args)
        out, code = _dispatch(args, p)
    except (CapacityError, BackendUnavailableError) as exc:
        kind = "capacity" if isinstance(exc, CapacityError) else "backend"
        print(json.dumps({"error": {"kind": kind, "message": str(exc)}}))
        print(f"lwmi: {exc}", file=sys.stderr)
        return EXIT_CAPACITY
    except InputError as exc:
        print(f"lwmi: input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    elapsed_ms = (time.perf_counter() - start) * 1000
    if args.timing:
        out["elapsed_ms"] = round(elapsed_ms, 3)
    else:
        log.info("elapsed %.3f ms", elapsed_ms)
    print(json.dumps(out))
    return code


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
