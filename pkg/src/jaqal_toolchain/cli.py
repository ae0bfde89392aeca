"""Command-line entry point: check, fmt, expand, and run.

Exit codes: 0 success, 1 program diagnostics, 2 usage or file errors,
3 internal errors. Nothing is written to an --out path unless the
command succeeds.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from .diagnostics import JaqalError
from .gates import builtin_library, load_gatedefs
from .pipeline import check_source, expand_source, format_source, run_source
from .simulator import DEFAULT_MAX_QUBITS


def _positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError("must be at least 1")
    return value


def build_parser() -> argparse.ArgumentParser:
    shared = argparse.ArgumentParser(add_help=False)
    shared.add_argument("file", help="Jaqal source file")
    shared.add_argument(
        "--seed", type=int, default=0, help="measurement sampling seed"
    )
    shared.add_argument(
        "--out", default=None, help="write output to this path instead of stdout"
    )
    shared.add_argument(
        "--gatedefs",
        default=None,
        help="gate-definition JSON file (falls back to $JAQAL_GATEDEFS)",
    )
    shared.add_argument(
        "--max-qubits",
        type=_positive_int,
        default=DEFAULT_MAX_QUBITS,
        help="largest register the simulator will accept",
    )
    shared.add_argument(
        "--align",
        choices=("start", "end"),
        default="start",
        help="parallel blocks start together or finish together",
    )
    shared.add_argument(
        "--format",
        choices=("text", "json"),
        default="text",
        help="output rendering for expand and run",
    )
    shared.add_argument(
        "--sxx-literal",
        action="store_true",
        help="use the alternative Sxx normalization exp(-i(pi/2) XX)",
    )
    shared.add_argument(
        "--quantize-angles",
        action="store_true",
        help="round angles to a 40-bit grid over [0, 2*pi)",
    )

    parser = argparse.ArgumentParser(
        prog="jaqal",
        description="Validate, format, flatten, and simulate Jaqal programs.",
    )
    commands = parser.add_subparsers(dest="command", required=True)
    commands.add_parser(
        "check", parents=[shared], help="validate a program and report diagnostics"
    )
    commands.add_parser(
        "fmt", parents=[shared], help="reprint a program in canonical layout"
    )
    commands.add_parser(
        "expand", parents=[shared], help="print the flattened gate schedule"
    )
    commands.add_parser(
        "run", parents=[shared], help="simulate a program and print its output"
    )
    return parser


def _print_diagnostics(diagnostics, filename: str) -> None:
    for diagnostic in diagnostics:
        print(diagnostic.render(filename), file=sys.stderr)


def _write_bytes(out, data: bytes) -> None:
    if out:
        Path(out).write_bytes(data)
    else:
        sys.stdout.buffer.write(data)
        sys.stdout.buffer.flush()


def _load_library(args):
    path = args.gatedefs or os.environ.get("JAQAL_GATEDEFS")
    if path:
        return load_gatedefs(
            path,
            sxx_literal=args.sxx_literal,
            quantize_angles=args.quantize_angles,
        )
    return builtin_library(
        sxx_literal=args.sxx_literal, quantize_angles=args.quantize_angles
    )


def _run_payload(result, outcome) -> bytes:
    payload = {
        "register_size": outcome.schedule.register_size,
        "seed": result.seed,
        "prng": result.prng,
        "records": [list(record) for record in result.records],
        "output": result.rendered.decode("ascii"),
    }
    return (json.dumps(payload) + "\n").encode("utf-8")


def _dispatch(args) -> int:
    source = Path(args.file).read_bytes()
    filename = args.file
    if args.command == "fmt":
        text, diagnostics = format_source(source)
        _print_diagnostics(diagnostics, filename)
        if text is None:
            return 1
        _write_bytes(args.out, text.encode("utf-8"))
        return 0
    library = _load_library(args)
    options = {
        "library": library,
        "align": args.align,
        "max_qubits": args.max_qubits,
    }
    if args.command == "check":
        outcome = check_source(source, **options)
        _print_diagnostics(outcome.diagnostics, filename)
        return 0 if outcome.ok else 1
    if args.command == "expand":
        rendered, outcome = expand_source(source, fmt=args.format, **options)
        _print_diagnostics(outcome.diagnostics, filename)
        if rendered is None:
            return 1
        _write_bytes(args.out, rendered)
        return 0
    result, outcome = run_source(source, seed=args.seed, **options)
    _print_diagnostics(outcome.diagnostics, filename)
    if result is None:
        return 1
    if args.format == "json":
        _write_bytes(args.out, _run_payload(result, outcome))
        return 0
    _write_bytes(args.out, result.rendered)
    if args.out:
        metadata = {
            "seed": result.seed,
            "prng": result.prng,
            "records": len(result.records),
        }
        Path(str(args.out) + ".meta.json").write_text(
            json.dumps(metadata) + "\n", encoding="utf-8"
        )
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        code = exc.code
        return code if isinstance(code, int) else 2
    try:
        return _dispatch(args)
    except JaqalError as exc:
        print(exc.diagnostic.render(args.file), file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"jaqal: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # pragma: no cover - internal failure guard
        print(f"jaqal: internal error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
