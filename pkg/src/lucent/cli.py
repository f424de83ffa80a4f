"""Command-line surface.

Subcommands: ``analyze``, ``exhaust``, ``lucency``, ``prove``, ``verify``.
Exit codes: 0 success (or lucency proved), 1 property violated or witness
found, 2 usage or input error, 3 indeterminate because a cap was hit.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .config import AnalysisConfig
from .cp import cp_exhaustion
from .dot import exhaustion_to_dot, net_to_dot
from .dsl import parse_net
from .errors import (
    CapExceededError,
    DslError,
    ExhaustionError,
    IndeterminateError,
    LucentError,
    PreconditionError,
    UnknownNodeError,
)
from .net import Marking, Net
from .reachability import (
    bound,
    explore,
    is_live,
    is_safe,
    lucency_bruteforce,
    regeneration_clusters,
)
from .structure import is_strongly_connected
from .verifier import prove_lucency, verify_tsystem_lucency

EXIT_OK = 0
EXIT_VIOLATION = 1
EXIT_USAGE = 2
EXIT_INDETERMINATE = 3


def _load(path: str) -> tuple[Net, Marking]:
    text = Path(path).read_text(encoding="utf-8")
    return parse_net(text, source=Path(path).stem)


def _emit(data: dict, cfg: AnalysisConfig, out) -> None:
    if cfg.fmt == "json":
        print(json.dumps(data, indent=2), file=out)
    else:
        _print_text(data, out)


def _print_text(data: dict, out, prefix: str = "") -> None:
    for key, value in data.items():
        if isinstance(value, dict):
            print(f"{prefix}{key}:", file=out)
            _print_text(value, out, prefix + "  ")
        elif isinstance(value, list) and value and isinstance(value[0], dict):
            print(f"{prefix}{key}:", file=out)
            for item in value:
                _print_text(item, out, prefix + "  - ")
        else:
            print(f"{prefix}{key}: {value}", file=out)


def cmd_analyze(args, cfg: AnalysisConfig, out) -> int:
    net, m0 = _load(args.file)
    if cfg.fmt == "dot":
        print(net_to_dot(net, m0), end="", file=out)
        return EXIT_OK
    report = net.validate()
    data: dict = {
        "net": net.name,
        "places": len(net.places),
        "transitions": len(net.transitions),
        "valid": report.ok,
        "issues": list(report.issues),
        "weakly_connected": report.weakly_connected,
    }
    if not report.ok:
        _emit(data, cfg, out)
        return EXIT_USAGE
    data["free_choice"] = net.is_free_choice()
    data["t_net"] = net.is_t_net()
    data["p_net"] = net.is_p_net()
    data["strongly_connected"] = is_strongly_connected(net)
    data["clusters"] = [[x.name for x in sorted(cl.nodes)] for cl in net.clusters()]
    rg = explore(net, m0, cfg.state_cap)
    data["states"] = len(rg.states)
    data["complete"] = rg.complete
    if not rg.complete:
        data["verdict"] = "indeterminate: state cap hit"
        _emit(data, cfg, out)
        return EXIT_INDETERMINATE
    data["live"] = is_live(rg)
    data["bound"] = bound(rg)
    data["safe"] = is_safe(rg)
    regen = regeneration_clusters(rg)
    data["regeneration_clusters"] = [[x.name for x in sorted(cl.nodes)] for cl in regen]
    data["perpetual"] = bool(regen)
    _emit(data, cfg, out)
    return EXIT_OK


def cmd_exhaust(args, cfg: AnalysisConfig, out) -> int:
    net, _m0 = _load(args.file)
    cl = net.cluster_of(args.cluster)
    exh = cp_exhaustion(net, cl, cfg.enum_cap, cfg.allow_place_free_cp)
    if args.dot:
        Path(args.dot).write_text(exhaustion_to_dot(exh), encoding="utf-8")
    if cfg.fmt == "dot":
        print(exhaustion_to_dot(exh), end="", file=out)
        return EXIT_OK
    data = exh.to_dict()
    data["cluster"] = [x.name for x in sorted(cl.nodes)]
    _emit(data, cfg, out)
    return EXIT_OK


def cmd_lucency(args, cfg: AnalysisConfig, out) -> int:
    net, m0 = _load(args.file)
    rg = explore(net, m0, cfg.state_cap)
    report = lucency_bruteforce(rg)
    data = report.to_dict(rg)
    data["states"] = len(rg.states)
    _emit(data, cfg, out)
    if report.verdict == "indeterminate":
        return EXIT_INDETERMINATE
    return EXIT_OK if report.verdict == "lucent" else EXIT_VIOLATION


def cmd_prove(args, cfg: AnalysisConfig, out) -> int:
    net, m0 = _load(args.file)
    cl = net.cluster_of(args.cluster)
    cert = prove_lucency(net, m0, cl, cfg.state_cap, cfg.enum_cap, cfg.allow_place_free_cp)
    if args.cert:
        Path(args.cert).write_text(cert.to_json(), encoding="utf-8")
    _emit(cert.to_dict(), cfg, out)
    return EXIT_OK if cert.proved else EXIT_VIOLATION


def cmd_verify(args, cfg: AnalysisConfig, out) -> int:
    net, m0 = _load(args.file)
    rg = explore(net, m0, cfg.state_cap)
    data: dict = {"net": net.name, "states": len(rg.states), "complete": rg.complete}
    if not rg.complete:
        data["verdict"] = "indeterminate: state cap hit"
        _emit(data, cfg, out)
        return EXIT_INDETERMINATE
    brute = lucency_bruteforce(rg)
    data["lucency"] = brute.verdict
    regen = regeneration_clusters(rg)
    data["regeneration_clusters"] = [[x.name for x in sorted(cl.nodes)] for cl in regen]
    suites = []
    violations = brute.verdict != "lucent"
    if not regen:
        suites.append({"cluster": None, "status": "skipped (not perpetual)"})
    for cl in regen:
        cert = prove_lucency(net, m0, cl, cfg.state_cap, cfg.enum_cap, cfg.allow_place_free_cp)
        suites.append(
            {
                "cluster": [x.name for x in sorted(cl.nodes)],
                "verdict": cert.verdict,
                "checks": {c.id: c.status for c in cert.checks},
            }
        )
        if not cert.proved:
            violations = True
    if net.is_t_net() and regen:
        for cl in regen:
            try:
                records = verify_tsystem_lucency(net, m0, cl, cfg.state_cap, cfg.enum_cap)
                suites.append(
                    {
                        "cluster": [x.name for x in sorted(cl.nodes)],
                        "t_system_checks": {c.id: c.status for c in records},
                    }
                )
                if any(not c.passed for c in records):
                    violations = True
            except PreconditionError as err:
                suites.append({"cluster": [x.name for x in sorted(cl.nodes)], "skipped": str(err)})
    data["suites"] = suites
    if brute.witnesses:
        data["witness_markings"] = [
            [rg.states[i].as_dict(), rg.states[j].as_dict()] for i, j in brute.witnesses[:5]
        ]
    _emit(data, cfg, out)
    return EXIT_VIOLATION if violations else EXIT_OK


def _add_shared_flags(parser: argparse.ArgumentParser, suppress: bool) -> None:
    # the same flags exist on the main parser and every subcommand, so they
    # work in either position; the subcommand copies must not clobber values
    # already parsed, hence the suppressed defaults
    blank = argparse.SUPPRESS
    parser.add_argument(
        "--cap", type=int,
        default=blank if suppress else None,
        help="state-space cap (default 1000000)",
    )
    parser.add_argument(
        "--enum-cap", type=int,
        default=blank if suppress else None,
        help="enumeration cap (default 100000)",
    )
    parser.add_argument(
        "--format", choices=("text", "json", "dot"),
        default=blank if suppress else "text",
    )
    parser.add_argument(
        "--allow-place-free-cp", action="store_true",
        default=blank if suppress else False,
        help="let single bare transitions qualify as CP-subnets",
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="lucent",
        description="Free-choice Petri net analysis: structure, reachability, "
        "exhaustions, shutdown sequences, and lucency certificates.",
    )
    _add_shared_flags(parser, suppress=False)
    sub = parser.add_subparsers(dest="command", required=True)

    def subcommand(name, help_text, func):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("file")
        _add_shared_flags(p, suppress=True)
        p.set_defaults(func=func)
        return p

    subcommand("analyze", "structural and behavioural report", cmd_analyze)

    p = subcommand("exhaust", "compute a cluster-adapted CP-exhaustion", cmd_exhaust)
    p.add_argument("--cluster", required=True, help="any node of the wanted cluster")
    p.add_argument("--dot", help="write a layered DOT drawing to this file")

    subcommand("lucency", "brute-force lucency verdict with witnesses", cmd_lucency)

    p = subcommand("prove", "full lucency proof replay with certificate", cmd_prove)
    p.add_argument("--cluster", required=True, help="any node of the regeneration cluster")
    p.add_argument("--cert", help="write the certificate JSON to this file")

    subcommand("verify", "run every applicable check suite (regression mode)", cmd_verify)
    return parser


def main(argv: list[str] | None = None, out=None) -> int:
    out = out if out is not None else sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else EXIT_OK
    cfg_kwargs = {"fmt": args.format, "allow_place_free_cp": args.allow_place_free_cp}
    if args.cap is not None:
        cfg_kwargs["state_cap"] = args.cap
    if args.enum_cap is not None:
        cfg_kwargs["enum_cap"] = args.enum_cap
    try:
        cfg = AnalysisConfig(**cfg_kwargs)
    except ValueError as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_USAGE
    if args.command in ("prove", "lucency", "verify") and cfg.fmt == "dot":
        print(f"error: --format dot is not available for {args.command}", file=sys.stderr)
        return EXIT_USAGE
    try:
        return args.func(args, cfg, out)
    except FileNotFoundError as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_USAGE
    except (DslError, UnknownNodeError) as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_USAGE
    except (IndeterminateError,) as err:
        print(f"indeterminate: {err}", file=sys.stderr)
        return EXIT_INDETERMINATE
    except CapExceededError as err:
        print(f"indeterminate: {err}", file=sys.stderr)
        return EXIT_INDETERMINATE
    except ExhaustionError as err:
        print(f"violation: {err}", file=sys.stderr)
        return EXIT_VIOLATION
    except LucentError as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
