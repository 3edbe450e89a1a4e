"""Command line front end: ``webrank <subcommand> [--order N] [--json]``."""

from __future__ import annotations

import argparse
import sys

from .errors import (
    DegenerateTriple,
    DegreeOverflow,
    DegenerateWeb,
    GeneralPositionError,
    NotFlatError,
    OrderExceedsReliable,
    ParseError,
    WebError,
)
from .parser import InputDocument, load_document
from .report import render_text, run, run_reconstruct

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_POSITION = 2
EXIT_NOT_FLAT = 3
EXIT_PARSE = 4
EXIT_ORDER = 5


def _common():
    # SUPPRESS keeps a subcommand's unset flag from clobbering the top-level one.
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--order", type=int, default=argparse.SUPPRESS, help="truncation order of all jets")
    p.add_argument("--json", action="store_true", default=argparse.SUPPRESS, help="emit a JSON report")
    return p


def build_parser():
    common = _common()
    parser = argparse.ArgumentParser(
        prog="webrank",
        description="Connection, curvature and rank-one analysis of (n+1)-webs of curves.",
        parents=[common],
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, text in (
        ("analyze", "any web description"),
        ("quv", "a 4-web in dimension 3 built from a (Q, u, v) triple"),
        ("reconstruct", "recover a normalized (Q, u, v) from a flat 4-web in dimension 3"),
        ("blaschke", "planar 3-web; compares the curvature with the classical formula"),
    ):
        s = sub.add_parser(name, help=text, parents=[common])
        s.add_argument("file", help="input document")
    s = sub.add_parser("wp", help="the seven-parameter family of flat 4-webs", parents=[common])
    s.add_argument("--params", required=True, help="a,b,c,aa,bb,cc,e as integers or p/q rationals")
    return parser


def _document(args):
    if args.command == "wp":
        values = [v.strip() for v in args.params.split(",")]
        return InputDocument("wp", 3, None, (), values)
    doc = load_document(args.file)
    if args.command == "quv" and doc.kind not in ("quv", "wp"):
        raise ParseError(f"quv expects a quv or wp document, got kind {doc.kind}")
    if args.command == "blaschke" and doc.dimension != 2:
        raise ParseError("blaschke expects a planar (dimension 2) document")
    return doc


def execute(args):
    """Run the parsed command; returns the report (raises module errors)."""
    doc = _document(args)
    order = getattr(args, "order", None)
    if args.command == "reconstruct":
        return run_reconstruct(doc, order)
    return run(doc, order, command=args.command)


def main(argv=None, out=None, err=None):
    out = out or sys.stdout
    err = err or sys.stderr
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        report = execute(args)
    except ParseError as exc:
        print(f"error: {exc}", file=err)
        return EXIT_PARSE
    except (GeneralPositionError, DegenerateTriple, DegenerateWeb) as exc:
        print(f"error: {exc}", file=err)
        return EXIT_POSITION
    except NotFlatError as exc:
        print(f"error: {exc}", file=err)
        return EXIT_NOT_FLAT
    except (OrderExceedsReliable, DegreeOverflow) as exc:
        print(f"error: {exc}", file=err)
        return EXIT_ORDER
    except WebError as exc:
        print(f"error: {exc}", file=err)
        return EXIT_ERROR
    except (ValueError, OSError) as exc:
        # bad parameter values or unreadable input files
        print(f"error: {exc}", file=err)
        return EXIT_PARSE
    print(report.to_json() if getattr(args, "json", False) else render_text(report), file=out)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
