"""Command-line driver.

Subcommands::

    xtt check FILE...                 type-check definitions (exit 0/1/2/3)
    xtt norm FILE TARGET              print a normal form (name or expression)
    xtt canonicity [--count N ...]    generate + normalize a boolean corpus
    xtt parse-only FILE...            syntax check only

Diagnostics go to stderr in human form, or to stdout as JSON lines with
``--json`` (one object per line, ``{"v":1, code, span, message, ...}``).
Exit codes: 0 success, 1 type error or non-canonical result, 2 parse
error, 3 I/O error.  ``XTT_SPLIT_DEPTH`` provides the default for
``--split-depth``.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from .conversion import ConvConfig
from .diagnostics import Diagnostic, Span, XttError
from .semantics import readback_tm, force
from .surface import parse, parse_term, print_term
from .testkit import GenConfig, gen_closed_bool, run_canonicity, save_corpus
from .typecheck import Checker

_EXIT_OK = 0
_EXIT_TYPE = 1
_EXIT_PARSE = 2
_EXIT_IO = 3


def _emit(diag: Diagnostic, as_json: bool) -> None:
    if as_json:
        sys.stdout.write(json.dumps(diag.to_json()) + "\n")
    else:
        sys.stderr.write(diag.human() + "\n")


def _read(path: str, as_json: bool):
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as e:
        _emit(Diagnostic(Span(path, 1, 1, 1, 1), "E-IO", str(e)), as_json)
        return None


def _cfg(args) -> ConvConfig:
    depth = args.split_depth
    if depth is None:
        depth = int(os.environ.get("XTT_SPLIT_DEPTH", "2"))
    return ConvConfig(split_depth=depth,
                      full_regularity=args.full_regularity)


def cmd_check(args) -> int:
    status = _EXIT_OK
    for path in args.paths:
        src = _read(path, args.json)
        if src is None:
            return _EXIT_IO
        checker = Checker(_cfg(args))
        try:
            defs = parse(src, path)
        except XttError as e:
            _emit(e.diagnostic, args.json)
            return _EXIT_PARSE
        try:
            checker.check_program(defs)
        except XttError as e:
            _emit(e.diagnostic, args.json)
            status = _EXIT_TYPE
    return status


def cmd_parse_only(args) -> int:
    for path in args.paths:
        src = _read(path, args.json)
        if src is None:
            return _EXIT_IO
        try:
            parse(src, path)
        except XttError as e:
            _emit(e.diagnostic, args.json)
            return _EXIT_PARSE
    return _EXIT_OK


def cmd_norm(args) -> int:
    src = _read(args.path, args.json)
    if src is None:
        return _EXIT_IO
    trace = [] if args.trace else None
    checker = Checker(_cfg(args), trace=trace)
    try:
        defs = parse(src, args.path)
    except XttError as e:
        _emit(e.diagnostic, args.json)
        return _EXIT_PARSE
    try:
        checker.check_program(defs)
        sc = checker.empty_scope()
        if args.target in checker.defs:
            d = checker.defs[args.target]
            core, ty_v = d.body_term, d.ty_value
        else:
            expr = parse_term(args.target, "<target>")
            core, ty_v = checker.infer(expr, sc)
    except XttError as e:
        _emit(e.diagnostic, args.json)
        return _EXIT_TYPE
    if trace is not None:
        trace.clear()  # keep only rules fired by the normalization itself
    nf = checker.normalize_value(core, ty_v, sc)
    if trace is not None:
        for rule in trace:
            sys.stderr.write(f"-- trace: {rule}\n")
    sys.stdout.write(print_term(nf, annotated=args.annotated) + "\n")
    return _EXIT_OK


def cmd_canonicity(args) -> int:
    cfg = GenConfig(seed=args.seed, max_depth=args.depth, count=args.count)
    corpus = gen_closed_bool(cfg)
    if args.corpus_dir:
        save_corpus(args.corpus_dir, corpus, cfg)
    report = run_canonicity(corpus, budget=args.budget)
    if args.json:
        sys.stdout.write(json.dumps(report.to_json()) + "\n")
    else:
        sys.stdout.write(report.to_text() + "\n")
    return _EXIT_OK if report.ok else _EXIT_TYPE


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(prog="xtt", description=__doc__)
    ap.add_argument("--json", action="store_true",
                    help="machine-readable diagnostics on stdout")
    ap.add_argument("--split-depth", type=int, default=None,
                    help="max boundary-separation case splits (default: "
                         "XTT_SPLIT_DEPTH or 2)")
    ap.add_argument("--full-regularity", action="store_true",
                    help="decide line constancy by conversion instead of "
                         "the occurrence check")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check", help="type-check .xtt files")
    p.add_argument("paths", nargs="+")
    p.set_defaults(fn=cmd_check)

    p = sub.add_parser("parse-only", help="parse .xtt files, no checking")
    p.add_argument("paths", nargs="+")
    p.set_defaults(fn=cmd_parse_only)

    p = sub.add_parser("norm", help="normalize a definition or expression")
    p.add_argument("path")
    p.add_argument("target", help="a defined name, or an expression to "
                                  "elaborate in the file's scope")
    p.add_argument("--trace", action="store_true",
                   help="print each Kan rule as it fires")
    p.add_argument("--annotated", action="store_true",
                   help="print with full elimination annotations")
    p.set_defaults(fn=cmd_norm)

    p = sub.add_parser("canonicity", help="run the closed-boolean suite")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--count", type=int, default=100)
    p.add_argument("--depth", type=int, default=4)
    p.add_argument("--budget", type=float, default=None,
                   help="wall-clock budget in seconds")
    p.add_argument("--corpus-dir", default=None,
                   help="write the generated corpus and manifest here")
    p.set_defaults(fn=cmd_canonicity)

    args = ap.parse_args(argv)
    return args.fn(args)


if __name__ == "__main__":
    sys.exit(main())
