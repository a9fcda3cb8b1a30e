"""Command-line front door.

Exit codes: 0 clean, 1 validation errors, 2 parse or I/O errors,
3 runtime errors.
"""

from __future__ import annotations

import argparse
import sys

from . import PROFILE_VERSION, __version__
from .diagnostics import Diagnostic
from .engine import RunLimits, UspRuntimeError, run
from .ontology import export_dot, export_json, extract_ontology
from .parser import parse_file
from .printer import print_model
from .validator import ValidatedModel, validate

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_PARSE_OR_IO = 2
EXIT_RUNTIME = 3


def _print_diags(diags: list[Diagnostic]) -> None:
    for d in diags:
        print(d.render())


def _load_validated(path: str) -> tuple[ValidatedModel | None, int]:
    """Parse and validate `path`, printing diagnostics on the way."""
    try:
        result = parse_file(path)
    except OSError as e:
        print(f"error: cannot read {path}: {e.strerror or e}", file=sys.stderr)
        return None, EXIT_PARSE_OR_IO
    if not result.ok:
        _print_diags(result.diagnostics)
        return None, EXIT_PARSE_OR_IO
    vr = validate(result.model)
    _print_diags(vr.diagnostics)
    if not vr.ok:
        return None, EXIT_VALIDATION
    return vr.validated, EXIT_OK


def _write_out(text: str, out: str | None) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)


def _parse_set(pairs: list[str]) -> dict:
    overrides = {}
    for pair in pairs:
        if "=" not in pair:
            raise ValueError(f"--set expects slot=value, got '{pair}'")
        name, _, raw = pair.partition("=")
        overrides[name.strip()] = _parse_literal(raw.strip())
    return overrides


def _parse_literal(raw: str):
    if raw == "true":
        return True
    if raw == "false":
        return False
    if raw == "null":
        return None
    try:
        return int(raw)
    except ValueError:
        pass
    try:
        return float(raw)
    except ValueError:
        pass
    return raw


def cmd_check(args: argparse.Namespace) -> int:
    _, code = _load_validated(args.file)
    return code


def cmd_format(args: argparse.Namespace) -> int:
    try:
        result = parse_file(args.file)
    except OSError as e:
        print(f"error: cannot read {args.file}: {e.strerror or e}", file=sys.stderr)
        return EXIT_PARSE_OR_IO
    if not result.ok:
        _print_diags(result.diagnostics)
        return EXIT_PARSE_OR_IO
    _write_out(print_model(result.model), args.out)
    return EXIT_OK


def cmd_ontology(args: argparse.Namespace) -> int:
    vm, code = _load_validated(args.file)
    if vm is None:
        return code
    onto = extract_ontology(vm)
    if args.format == "json":
        _write_out(export_json(onto) + "\n", args.out)
    else:
        _write_out(export_dot(onto), args.out)
    return EXIT_OK


def cmd_diagram(args: argparse.Namespace) -> int:
    vm, code = _load_validated(args.file)
    if vm is None:
        return code
    from .ontology import emit_plantuml

    _write_out(emit_plantuml(vm), args.out)
    return EXIT_OK


def _effective_config(args: argparse.Namespace, overrides: dict) -> str:
    set_part = ",".join(f"{k}={v}" for k, v in sorted(overrides.items()))
    probes = ",".join(args.probe)
    return (
        f"config: file={args.file} root={args.root} ticks={args.ticks} "
        f"seed={args.seed} probes=[{probes}] set=[{set_part}]"
    )


def cmd_run(args: argparse.Namespace) -> int:
    vm, code = _load_validated(args.file)
    if vm is None:
        return code
    try:
        overrides = _parse_set(args.set)
    except ValueError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_PARSE_OR_IO
    print(_effective_config(args, overrides))
    limits = RunLimits(
        max_call_depth=args.max_depth,
        max_messages_per_tick=args.max_messages,
    )
    try:
        result = run(
            vm, args.root, args.seed, args.ticks,
            probes=tuple(args.probe),
            overrides=overrides,
            limits=limits,
            trace_path=args.trace,
        )
    except UspRuntimeError as e:
        print(str(e), file=sys.stderr)
        return EXIT_RUNTIME
    except ValueError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_PARSE_OR_IO
    stats = result.stats
    print(f"trace_hash: {result.trace.hash_hex}")
    print(f"messages: {stats.total_messages}")
    for name, agg in sorted(stats.probe_aggregates().items()):
        print(f"probe {name}: mean={agg['mean']:.6f} max={agg['max']:.0f}")
    if args.stats:
        with open(args.stats, "w", encoding="utf-8") as fh:
            fh.write(stats.to_json(trace_hash=result.trace.hash_hex))
    return EXIT_OK


def cmd_report(args: argparse.Namespace) -> int:
    vm, code = _load_validated(args.file)
    if vm is None:
        return code
    try:
        overrides = _parse_set(args.set)
    except ValueError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_PARSE_OR_IO
    print(_effective_config(args, overrides))
    from .report import write_report

    try:
        result = run(
            vm, args.root, args.seed, args.ticks,
            probes=tuple(args.probe),
            overrides=overrides,
        )
    except UspRuntimeError as e:
        print(str(e), file=sys.stderr)
        return EXIT_RUNTIME
    except ValueError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_PARSE_OR_IO
    paths = write_report(result, args.out_dir)
    for p in paths:
        print(f"wrote {p}")
    return EXIT_OK


def build_arg_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="usp",
        description="UML SP toolchain: check models, export ontologies, "
        "run simulations.",
    )
    ap.add_argument(
        "--version",
        action="version",
        version=f"uspkit {__version__} ({PROFILE_VERSION})",
    )
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check", help="parse and validate a model")
    p.add_argument("file")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("format", help="print the canonical form of a model")
    p.add_argument("file")
    p.add_argument("--out")
    p.set_defaults(func=cmd_format)

    p = sub.add_parser("ontology", help="export the semantic net")
    p.add_argument("file")
    p.add_argument("--format", choices=("json", "dot"), default="json")
    p.add_argument("--out")
    p.set_defaults(func=cmd_ontology)

    p = sub.add_parser("diagram", help="emit a PlantUML class diagram")
    p.add_argument("file")
    p.add_argument("--out")
    p.set_defaults(func=cmd_diagram)

    def add_run_args(p: argparse.ArgumentParser) -> None:
        p.add_argument("file")
        p.add_argument("--root", required=True, help="concrete root class")
        p.add_argument("--ticks", type=int, required=True)
        p.add_argument("--seed", type=int, default=0)
        p.add_argument(
            "--probe", action="append", default=[],
            help="slot path from the root instance, or queue_length",
        )
        p.add_argument(
            "--set", action="append", default=[], metavar="SLOT=VALUE",
            help="override a boundary slot after init",
        )
        p.add_argument("--max-depth", type=int, default=64)
        p.add_argument("--max-messages", type=int, default=1_000_000)

    p = sub.add_parser("run", help="run a simulation")
    add_run_args(p)
    p.add_argument("--trace", help="write the JSON Lines trace here")
    p.add_argument("--stats", help="write run statistics JSON here")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser(
        "report", help="run and render probe series to CSV and figures"
    )
    add_run_args(p)
    p.add_argument("--out-dir", required=True)
    p.set_defaults(func=cmd_report)

    return ap


def main(argv: list[str] | None = None) -> int:
    ap = build_arg_parser()
    args = ap.parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
