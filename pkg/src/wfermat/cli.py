"""Command-line interface: JSON documents in, JSON/CSV documents out."""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import replace

from .documents import COMMAND_KINDS, emit_sweep, parse_document, run_document, serialize
from .errors import DocumentError, NumericalError, ValidationError

_COMMAND_HELP = {
    "solve": "locate the weighted minimum-sum point for 3 to 5 vertices",
    "inverse": "recover weights with the residual fixed by uniqueness",
    "mixed-inverse": "recover weights for a prescribed residual weight",
    "plasticity-hexa": "five-vertex weight family pinned to a prescribed point",
    "plasticity-quad": "coplanar four-vertex weight family pinned to a point",
    "angles": "polar offsets, root pairs, and ray reconstruction",
    "verify": "solve, run the grid oracle, and report consistency checks",
}


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="wfermat",
        description="Weighted Fermat-Torricelli solvers over JSON problem documents.",
    )
    sub = parser.add_subparsers(dest="command", required=True, metavar="command")
    for name in COMMAND_KINDS:
        p = sub.add_parser(name, help=_COMMAND_HELP[name])
        p.add_argument("--input", default=None, help="problem document path (default: stdin)")
        p.add_argument("--output", default=None, help="result path (default: stdout)")
        p.add_argument("--tol", type=float, default=1e-10, help="solver tolerance (default 1e-10)")
        p.add_argument("--seed", type=int, default=0, help="oracle scatter seed (default 0)")
        p.add_argument(
            "--sweep",
            type=int,
            default=None,
            metavar="N",
            help="emit N CSV rows across the feasible free-weight interval",
        )
        p.add_argument(
            "--oracle",
            action="store_true",
            help="attach the brute-force oracle gap to the result",
        )
        p.add_argument(
            "--degrees",
            action="store_true",
            help="treat document angles as degrees (outputs converted back)",
        )
    return parser


def _read_input(path) -> str:
    if path is None:
        return sys.stdin.read()
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise DocumentError(f"cannot read input: {exc}") from exc


def _write_output(path, text: str) -> None:
    if path is None:
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)


def _emit_error(exc: Exception) -> None:
    body = {"type": type(exc).__name__, "message": str(exc)}
    field = getattr(exc, "field", None)
    if field:
        body["field"] = field
    sys.stderr.write(json.dumps({"error": body}, sort_keys=True) + "\n")


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        doc = parse_document(_read_input(args.input))
        if args.degrees and not doc.degrees:
            doc = replace(doc, degrees=True)
        if args.sweep is not None:
            if args.sweep < 1:
                raise DocumentError("--sweep needs at least 1 sample")
            _write_output(args.output, emit_sweep(doc, args.sweep, tol=args.tol))
            return 0
        result = run_document(
            args.command, doc, tol=args.tol, seed=args.seed, oracle=args.oracle
        )
        _write_output(args.output, serialize(result))
        if args.command == "verify" and not result["output"]["all_checks_passed"]:
            return 3
        return 0
    except ValidationError as exc:
        _emit_error(exc)
        return 2
    except NumericalError as exc:
        _emit_error(exc)
        return 3


if __name__ == "__main__":
    raise SystemExit(main())
