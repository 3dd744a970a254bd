"""Batch command line: load instances, run experiments, emit reports.

Exit codes are a stable contract: 0 success, 1 usage or domain error,
2 undecided (budget or step limit exhausted), 3 refutation or counterexample.
All randomness flows from the --seed flag.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys
from typing import Optional

from . import __version__
from .errors import ProxiterError
from .instances import (
    ALIASES,
    CYCLIC,
    PAIRS,
    SYSTEMS,
    certify_cyclic,
    cyclic3_reduce,
    cyclic3_solve,
    list_instances,
    load_instance_json,
    pair_cd_generator,
    pair_uc_generator,
)
from .iteration import make_infimum_sequence, run_paired, uniqueness_scan, write_trace_csv
from .spaces import format_point, parse_point
from .systems import verify_contraction
from .validators import cd_falsify, check_l1_bound, check_l2_bound, uc_falsify

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_UNDECIDED = 2
EXIT_REFUTED = 3


def _emit(payload: dict, out: Optional[str]) -> None:
    text = json.dumps(payload, indent=2, sort_keys=True)
    if out:
        with open(out, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)


def _report(command: str, args: argparse.Namespace, **payload) -> dict:
    config = {k: v for k, v in vars(args).items() if k not in ("func",)}
    return {
        "command": command,
        "version": __version__,
        "seed": getattr(args, "seed", None),
        "config": config,
        **payload,
    }


def _resolve(name: str):
    """Return (kind, entry) for a registry name or a JSON instance path."""
    name = ALIASES.get(name, name)
    if name in SYSTEMS:
        return "system", SYSTEMS[name]
    if name in CYCLIC:
        return "cyclic", CYCLIC[name]
    if name in PAIRS:
        return "pair", PAIRS[name]
    if name.endswith(".json"):
        return "system", load_instance_json(name)
    raise ProxiterError(f"unknown instance {name!r}; try the list command")


def cmd_list(args: argparse.Namespace) -> int:
    rows = list_instances()
    if args.format == "json" or args.out:
        _emit(_report("list", args, instances=[
            {"name": n, "kind": k, "description": d} for n, k, d in rows
        ]), args.out)
    else:
        for n, k, d in rows:
            print(f"{n:22s} {k:8s} {d}")
    return EXIT_OK


def cmd_run(args: argparse.Namespace) -> int:
    kind, entry = _resolve(args.instance)
    if kind == "pair":
        raise ProxiterError("pair instances support the scan command only")

    if kind == "cyclic":
        ct = entry.build()
        result = cyclic3_solve(
            ct, max_steps=args.steps, tol=args.tol, seed=args.seed
        )
        if args.format == "csv":
            system = cyclic3_reduce(ct, seed=args.seed)
            quads = system.p.draw(__import__("random").Random(args.seed), 1)
            paired, _ = run_paired(system, quads[0], args.steps, args.tol)
            _write_csv(paired, args.out)
            return EXIT_OK if result is not None else EXIT_UNDECIDED
        if result is None:
            _emit(_report("run", args, outcome="undecided"), args.out)
            return EXIT_UNDECIDED
        _emit(_report("run", args, outcome="converged", result=result.to_dict()), args.out)
        return EXIT_OK

    system = entry.build()
    x0 = parse_point(args.x0) if args.x0 is not None else entry.default_x0
    y0 = parse_point(args.y0) if args.y0 is not None else entry.default_y0
    q0 = entry.quadruple(system, x0, y0)
    paired, report = run_paired(system, q0, args.steps, args.tol)
    if args.format == "csv":
        _write_csv(paired, args.out)
    else:
        _emit(_report("run", args, report=report.to_dict()), args.out)
    if report.stop_reason == "tolerance-met":
        return EXIT_OK
    return EXIT_UNDECIDED


def _write_csv(paired, out: Optional[str]) -> None:
    if out:
        with open(out, "w") as fh:
            write_trace_csv(paired, fh)
    else:
        write_trace_csv(paired, sys.stdout)


def cmd_verify(args: argparse.Namespace) -> int:
    kind, entry = _resolve(args.instance)
    if kind == "pair":
        raise ProxiterError("pair instances support the scan command only")

    if kind == "cyclic":
        ct = entry.build()
        worst, arg = certify_cyclic(ct, samples=args.samples, seed=args.seed)
        payload = {"summed_residual_min": worst}
        if worst < -1e-10:
            payload["witness"] = [format_point(p) for p in arg]
            _emit(_report("verify", args, verdict="refuted", **payload), args.out)
            return EXIT_REFUTED
        system = cyclic3_reduce(ct, samples=args.samples, seed=args.seed)
        cert = verify_contraction(system, args.samples, args.seed, depth=args.depth)
        payload["reduction"] = cert.to_dict()
        verdict = "certified-on-samples" if cert.certified else "refuted"
        _emit(_report("verify", args, verdict=verdict, **payload), args.out)
        return EXIT_OK if cert.certified else EXIT_REFUTED

    system = entry.build()
    if args.lam is not None:
        system = dataclasses.replace(system, lam=args.lam)
    cert = verify_contraction(system, args.samples, args.seed, depth=args.depth)
    payload = {"certification": cert.to_dict()}
    bounds_ok = None
    if cert.certified:
        q0 = entry.quadruple(system, entry.default_x0, entry.default_y0)
        paired, _ = run_paired(system, q0, 300, 1e-9)
        l1 = check_l1_bound(paired, system) if paired.steps >= 2 else True
        l2 = check_l2_bound(paired, system)
        bounds_ok = bool(l1 and l2.ok)
        payload["bounds"] = {
            "l1_ok": bool(l1),
            "l2_ok": l2.ok,
            "l2_m": l2.m,
            "l2_first_violation": l2.first_violation,
        }
    verdict = "certified-on-samples" if (cert.certified and bounds_ok) else "refuted"
    _emit(_report("verify", args, verdict=verdict, **payload), args.out)
    return EXIT_OK if verdict == "certified-on-samples" else EXIT_REFUTED


def _parse_grid(text: str) -> list[float]:
    try:
        lo_s, hi_s, step_s = text.split(":")
        lo, hi, step = float(lo_s), float(hi_s), float(step_s)
    except ValueError as exc:
        raise ProxiterError(f"bad grid spec {text!r}, want lo:hi:step") from exc
    if step <= 0:
        raise ProxiterError("grid step must be positive")
    out = []
    k = 0
    while True:
        v = lo + k * step
        if v > hi + 1e-12:
            break
        out.append(v)
        k += 1
    return out


def cmd_scan(args: argparse.Namespace) -> int:
    kind, entry = _resolve(args.instance)

    if args.kind == "uniqueness":
        if kind != "system":
            raise ProxiterError("uniqueness scans need a system instance")
        system = entry.build()
        if system.pair.space.dim != 1:
            raise ProxiterError("uniqueness scans are wired for one-dimensional regions")
        if not args.grid:
            raise ProxiterError("uniqueness scans need --grid lo:hi:step")
        q0 = entry.quadruple(system, entry.default_x0, entry.default_y0)
        _, report = run_paired(system, q0, 500, args.tol)
        if report.limit is None:
            _emit(_report("scan", args, outcome="undecided"), args.out)
            return EXIT_UNDECIDED
        alpha = report.limit
        witness = entry.witness(system)
        candidates = []
        skipped = 0
        for g in _parse_grid(args.grid):
            beta = (g,)
            if not system.pair.a.contains(beta):
                skipped += 1
                continue
            try:
                seq = make_infimum_sequence(
                    system, beta, witness, lambda n, b=beta: b, 12, f_tol=1e-9
                )
            except ProxiterError:
                skipped += 1
                continue
            candidates.append((beta, seq))
        violations = uniqueness_scan(system, alpha, candidates, args.tol)
        payload = {
            "alpha": format_point(alpha),
            "candidates": len(candidates),
            "skipped": skipped,
            "violations": [
                {"beta": format_point(v.beta), "tail_residual": v.tail_residual}
                for v in violations
            ],
        }
        _emit(_report("scan", args, outcome="done", **payload), args.out)
        return EXIT_REFUTED if violations else EXIT_OK

    if kind != "pair":
        raise ProxiterError(f"{args.kind} scans need a pair instance")
    pair = entry.build()
    if args.kind == "cd":
        gen = pair_cd_generator(entry.name, args.seed)
        found = cd_falsify(pair, gen, args.budget, args.tol)
    elif args.kind == "uc":
        gen = pair_uc_generator(entry.name, args.seed)
        found = uc_falsify(pair, gen, args.budget, args.tol)
    else:
        raise ProxiterError(f"unknown scan kind {args.kind!r}")
    if found is None:
        _emit(_report("scan", args, outcome="no-counterexample"), args.out)
        return EXIT_OK
    _emit(
        _report("scan", args, outcome="counterexample", witness=found.to_dict()),
        args.out,
    )
    return EXIT_REFUTED


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="proxiter",
        description="Run, certify and falsify externally-driven contraction systems.",
    )
    parser.add_argument("--version", action="version", version=f"proxiter {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--seed", type=int, default=0, help="seed for all randomness")
        p.add_argument("--out", default=None, help="write the report to this path")
        p.add_argument("--format", choices=("csv", "json"), default="json")

    p_list = sub.add_parser("list", help="list built-in instances")
    common(p_list)
    p_list.set_defaults(func=cmd_list, format="table")

    p_run = sub.add_parser("run", help="run the paired iteration")
    p_run.add_argument("--instance", required=True)
    p_run.add_argument("--x0", default=None, help="first-side start, comma-separated")
    p_run.add_argument("--y0", default=None, help="second-side start, comma-separated")
    p_run.add_argument("--steps", type=int, default=500)
    p_run.add_argument("--tol", type=float, default=1e-9)
    common(p_run)
    p_run.set_defaults(func=cmd_run)

    p_verify = sub.add_parser("verify", help="certify the contraction conditions")
    p_verify.add_argument("--instance", required=True)
    p_verify.add_argument("--samples", type=int, default=10000)
    p_verify.add_argument("--depth", type=int, default=8)
    p_verify.add_argument("--lambda", dest="lam", type=float, default=None,
                          help="override the declared constant")
    common(p_verify)
    p_verify.set_defaults(func=cmd_verify)

    p_scan = sub.add_parser("scan", help="uniqueness scan or property falsification")
    p_scan.add_argument("--kind", choices=("uniqueness", "cd", "uc"), required=True)
    p_scan.add_argument("--instance", required=True)
    p_scan.add_argument("--grid", default=None, help="candidate grid lo:hi:step")
    p_scan.add_argument("--budget", type=int, default=1000)
    p_scan.add_argument("--tol", type=float, default=1e-6)
    common(p_scan)
    p_scan.set_defaults(func=cmd_scan)

    return parser


def main(argv: Optional[list[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ProxiterError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
