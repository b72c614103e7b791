"""Command line interface.

    sparql2xq translate --query Q.ru --mapping M.json [--output OUT.xq]
    sparql2xq execute   --query Q.ru --mapping M.json --xml DOC.xml [--output OUT.xml]
        (rewrites DOC.xml in place unless --output is given)
    sparql2xq check     --query Q.ru --mapping M.json --xml DOC.xml
    sparql2xq check     --seed N

Exit codes: 0 success / PASS, 1 usage or I/O error, 2 parse, mapping,
translation or execution error, 3 oracle FAIL.
"""

from __future__ import annotations

import argparse
import os
import sys
import tempfile

from .errors import Sparql2XQError
from .generate import random_cases
from .mapping import load_mappings
from .oracle import Status, check_equivalence
from .parser import parse_update, to_sparql
from .translator import translate
from .xmlstore import execute, parse_xml, serialize_xml
from .xquery import serialize

EXIT_OK, EXIT_USAGE, EXIT_ERROR, EXIT_FAIL = 0, 1, 2, 3
RANDOM_CASES = 1000


class UsageError(Exception):
    pass


class _ArgumentParser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    parser = _ArgumentParser(prog="sparql2xq",
                             description="Translate SPARQL updates into XQuery Update programs.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_ArgumentParser)

    p = sub.add_parser("translate", help="print the XQuery program for an update")
    p.add_argument("--query", required=True)
    p.add_argument("--mapping", required=True)
    p.add_argument("--xml")
    p.add_argument("--output")

    p = sub.add_parser("execute", help="translate and apply an update to an XML file")
    p.add_argument("--query", required=True)
    p.add_argument("--mapping", required=True)
    p.add_argument("--xml", required=True)
    p.add_argument("--output")

    p = sub.add_parser("check", help="compare the translation against SPARQL semantics")
    p.add_argument("--query")
    p.add_argument("--mapping")
    p.add_argument("--xml")
    p.add_argument("--output")
    p.add_argument("--seed", type=int)
    return parser


def _read(path) -> str:
    with open(path, encoding="utf-8") as f:
        return f.read()


def _emit(text: str, output) -> None:
    if output:
        with open(output, "w", encoding="utf-8", newline="\n") as f:
            f.write(text)
    else:
        sys.stdout.write(text)


def _replace_file(path, text: str) -> None:
    """Write ``text`` to ``path`` atomically so a failure never leaves a partial file."""
    fd, tmp = tempfile.mkstemp(dir=os.path.dirname(os.path.abspath(path)), suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as f:
            f.write(text)
        os.replace(tmp, path)
    except BaseException:
        os.unlink(tmp)
        raise


def _load(args):
    return parse_update(_read(args.query)).operation, load_mappings(_read(args.mapping))


def _translate(args) -> int:
    op, ms = _load(args)
    text = serialize(translate(op, ms))
    _emit(text + "\n" if text else "", args.output)
    return EXIT_OK


def _execute(args) -> int:
    op, ms = _load(args)
    program = translate(op, ms)
    doc = parse_xml(_read(args.xml))
    updated = execute(program, doc, ms.collection_iri)
    _replace_file(args.output or args.xml, serialize_xml(updated) + "\n")
    return EXIT_OK


def _check_random(seed: int, output) -> int:
    for i, case in enumerate(random_cases(seed, RANDOM_CASES)):
        verdict = check_equivalence(case.op, case.mapping, case.document)
        if not verdict.passed:
            report = verdict.report().replace(verdict.status.value, Status.FAIL.value, 1)
            details = [f"# case {i} of seed {seed}", "# update:"]
            details += ["#   " + line for line in to_sparql(case.op).splitlines()]
            details += ["# document:", "#   " + serialize_xml(case.document)]
            _emit(report + "\n".join(details) + "\n", output)
            return EXIT_FAIL
    _emit(f"PASS\n# {RANDOM_CASES} random cases, seed {seed}\n", output)
    return EXIT_OK


def _check(args) -> int:
    if args.seed is not None:
        if args.query or args.mapping or args.xml:
            raise UsageError("--seed cannot be combined with --query/--mapping/--xml")
        return _check_random(args.seed, args.output)
    missing = [f"--{name}" for name in ("query", "mapping", "xml") if not getattr(args, name)]
    if missing:
        raise UsageError("check needs --seed or all of --query, --mapping, --xml "
                         f"(missing {', '.join(missing)})")
    op, ms = _load(args)
    verdict = check_equivalence(op, ms, parse_xml(_read(args.xml)))
    if verdict.status is Status.ERROR:
        raise verdict.cause
    _emit(verdict.report(), args.output)
    return EXIT_OK if verdict.passed else EXIT_FAIL


COMMANDS = {"translate": _translate, "execute": _execute, "check": _check}


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        return COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"sparql2xq: usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"sparql2xq: I/O error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except Sparql2XQError as exc:
        print(f"sparql2xq: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
