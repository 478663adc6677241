"""Command-line entry point.

Exit codes:
  0  success
  1  ``check`` found warnings only (``--allow-warnings`` turns this into 0)
  2  translation or check errors, and command-line usage errors
  3  ``verify-stable`` detected drift
  4  file could not be read or written
"""

from __future__ import annotations

import argparse
import os
import sys
import tempfile
from dataclasses import replace
from pathlib import Path
from typing import List, Optional

from .check import check_text, compare_numbering
from .config import HASH, LEDGER, ConfigError, TranslateConfig, load_config
from .diagnostics import Diagnostic, Owx2ProtoError
from .emit import EmitConfig, emit_options_file
from .pipeline import generate, parse_previous

EXIT_OK = 0
EXIT_WARNINGS = 1
EXIT_ERRORS = 2
EXIT_UNSTABLE = 3
EXIT_IO = 4


class _IOFailure(Exception):
    pass


def _read(path, binary=False):
    try:
        if binary:
            return Path(path).read_bytes()
        return Path(path).read_text(encoding="utf-8")
    except (OSError, UnicodeDecodeError) as exc:
        raise _IOFailure(f"cannot read {path}: {exc}") from None


def write_atomic(path, text: str) -> None:
    """Replace ``path`` in one step so a failed run never truncates it."""
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
        try:
            with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
                fh.write(text)
            os.replace(tmp, path)
        except BaseException:
            os.unlink(tmp)
            raise
    except OSError as exc:
        raise _IOFailure(f"cannot write {path}: {exc}") from None


def _print_diagnostics(diags: List[Diagnostic], source: str, stream) -> None:
    for d in diags:
        print(f"{source}:{d}", file=stream)


def _config(args) -> TranslateConfig:
    try:
        config = load_config(args.config) if args.config else TranslateConfig()
    except OSError as exc:
        raise _IOFailure(f"cannot read {args.config}: {exc}") from None
    changes = {}
    if args.strategy:
        changes["strategy"] = args.strategy
    if args.package:
        changes["package"] = args.package
    if args.group_gap is not None:
        changes["group_gap"] = args.group_gap
    return replace(config, **changes) if changes else config


def _emit_config(args) -> EmitConfig:
    return EmitConfig(indent=args.indent, header=not args.no_header)


def cmd_generate(args, out, err) -> int:
    config = _config(args)
    if args.previous and config.strategy != LEDGER:
        print("error: --previous only applies to --strategy ledger", file=err)
        return EXIT_ERRORS
    previous = None
    if args.previous:
        if not Path(args.previous).exists():
            raise _IOFailure(f"previous file {args.previous} does not exist")
        previous = _read(args.previous)
    result = generate(_read(args.input, binary=True), config, previous, _emit_config(args))
    _print_diagnostics(result.diagnostics, args.input, err)
    write_atomic(args.output, result.text)
    if not args.no_options:
        target = args.options_out or Path(args.output).parent / config.options_import
        write_atomic(target, emit_options_file())
    print(f"wrote {args.output}: {result.class_count} classes, {result.message_count} messages, "
          f"{result.field_count} fields, {result.collisions} collisions", file=out)
    return EXIT_OK


def cmd_check(args, out, err) -> int:
    worst = EXIT_OK
    for path in args.files:
        _, diags = check_text(_read(path))
        _print_diagnostics(diags, path, out)
        errors = sum(d.is_error for d in diags)
        warnings = len(diags) - errors
        print(f"{path}: {errors} errors, {warnings} warnings", file=out)
        if errors:
            worst = max(worst, EXIT_ERRORS)
        elif warnings and not args.allow_warnings:
            worst = max(worst, EXIT_WARNINGS)
    return worst


def cmd_verify_stable(args, out, err) -> int:
    config = _config(args)
    previous_text = _read(args.previous)
    previous_ast = parse_previous(previous_text)
    result = generate(_read(args.input, binary=True), config,
                      previous_text if config.strategy == LEDGER else None, _emit_config(args))
    _print_diagnostics(result.diagnostics, args.input, err)
    report = compare_numbering(previous_ast, result.ast)
    failed = False
    print(f"{len(report.renumbered)} renumbered fields", file=out)
    for msg, name, old, new in report.renumbered:
        print(f"  {msg}.{name}: {old} -> {new}", file=out)
    print(f"{len(report.reused)} reused numbers", file=out)
    for msg, name, n in report.reused:
        print(f"  {msg}: {n} (was {name})", file=out)
    print(f"{len(report.unreserved)} removed fields not reserved", file=out)
    for msg, name, n in report.unreserved:
        print(f"  {msg}.{name}: {n}", file=out)
    if not report.stable or (config.strategy == LEDGER and report.unreserved):
        failed = True
    if args.expected:
        if _read(args.expected) != result.text:
            print(f"output differs from {args.expected}", file=out)
            failed = True
        else:
            print(f"output matches {args.expected}", file=out)
    return EXIT_UNSTABLE if failed else EXIT_OK


def cmd_emit_options(args, out, err) -> int:
    write_atomic(args.output, emit_options_file())
    print(f"wrote {args.output}", file=out)
    return EXIT_OK


def _translation_flags(p):
    p.add_argument("input", help="ontology in OWL/XML (.owx)")
    p.add_argument("--strategy", choices=(HASH, LEDGER), help="field numbering strategy (default: hash)")
    p.add_argument("--config", help="YAML translation config")
    p.add_argument("--package", help="proto package (overrides the config)")
    p.add_argument("--group-gap", type=int, help="unused numbers between class groups (ledger)")
    p.add_argument("--indent", type=int, choices=(2, 4), default=2)
    p.add_argument("--no-header", action="store_true", help="omit the generated-file comment")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="owx2proto", description="OWL/XML to proto3 translator")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="translate an ontology into a .proto file")
    _translation_flags(p)
    p.add_argument("-o", "--output", required=True)
    p.add_argument("--previous", help="previously generated .proto (ledger strategy)")
    p.add_argument("--options-out", help="where to write the options file "
                                         "(default: next to the output at the import path)")
    p.add_argument("--no-options", action="store_true", help="do not write the options file")
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("check", help="validate generated .proto files")
    p.add_argument("files", nargs="+")
    p.add_argument("--allow-warnings", action="store_true", help="exit 0 when there are only warnings")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("verify-stable", help="fail if regeneration would renumber fields")
    _translation_flags(p)
    p.add_argument("--previous", required=True, help="the generated file to compare against")
    p.add_argument("--expected", help="committed output that must match byte for byte")
    p.set_defaults(func=cmd_verify_stable)

    p = sub.add_parser("emit-options", help="write the OWL options definition file")
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=cmd_emit_options)
    return parser


def run(argv: Optional[List[str]] = None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    args = build_parser().parse_args(argv)
    try:
        return args.func(args, out, err)
    except _IOFailure as exc:
        print(f"error: {exc}", file=err)
        return EXIT_IO
    except ConfigError as exc:
        print(f"error: config: {exc}", file=err)
        return EXIT_ERRORS
    except Owx2ProtoError as exc:
        source = getattr(args, "input", None) or "<input>"
        _print_diagnostics(exc.diagnostics, source, err)
        return EXIT_ERRORS


def main(argv: Optional[List[str]] = None) -> None:
    sys.exit(run(argv))
