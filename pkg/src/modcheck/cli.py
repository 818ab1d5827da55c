"""Command-line front end.

Exit codes: 0 success, 1 checking or analysis failure, 2 parse error,
3 usage error, 4 fuel exhausted.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import kit
from .analysis import check_with_trimmed, compare, deps
from .checker import elaborate, infer
from .errors import FuelExhausted, ModError, ParseError
from .rewrite import DEFAULT_FUEL, Fuel, snf
from .syntax import parse_file, parse_term, print_term
from .term import Context

EXIT_OK, EXIT_FAIL, EXIT_PARSE, EXIT_USAGE, EXIT_FUEL = 0, 1, 2, 3, 4


class UsageError(Exception):
    pass


class _ArgumentParser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _positive(text: str) -> int:
    try:
        n = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}")
    if n < 1:
        raise argparse.ArgumentTypeError("fuel must be at least 1")
    return n


def build_parser() -> argparse.ArgumentParser:
    common = _ArgumentParser(add_help=False)
    common.add_argument("--fuel", type=_positive, default=DEFAULT_FUEL, help="reduction step budget")
    common.add_argument("--trace", action="store_true", help="print every reduction step to stderr")

    parser = _ArgumentParser(prog="modcheck", description="Proof checker for the lambda-Pi calculus modulo rewriting.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_ArgumentParser)

    p = sub.add_parser("check", parents=[common], help="elaborate theory files")
    p.add_argument("paths", nargs="+")

    p = sub.add_parser("eval", parents=[common], help="normalise a term, or the file's #EVAL commands")
    p.add_argument("path")
    p.add_argument("--term")

    p = sub.add_parser("deps", parents=[common], help="constants and rules a name or term depends on")
    p.add_argument("path")
    p.add_argument("name", nargs="?")
    p.add_argument("--term")
    p.add_argument("--transitive", action="store_true")

    p = sub.add_parser("compare", parents=[common], help="relate two theories")
    p.add_argument("paths", nargs=2)

    sub.add_parser("bundle-list", parents=[common], help="list the bundled theories")
    sub.add_parser("bundle-check", parents=[common], help="check every bundled theory")
    return parser


def _read(path: str) -> str:
    p = Path(path)
    if p.is_file():
        try:
            return p.read_text(encoding="utf-8")
        except (OSError, UnicodeDecodeError) as e:
            raise UsageError(f"cannot read {path}: {e}")
    try:
        return kit.get(path).text()
    except KeyError:
        raise UsageError(f"no such file: {path}")


def _trace(k: int, label: str, term) -> None:
    print(f"STEP {k}: {label} : {print_term(term)}", file=sys.stderr)


class _Run:
    def __init__(self, args):
        self.args = args
        self.trace = _trace if args.trace else None

    def fuel(self) -> Fuel:
        return Fuel(self.args.fuel, self.trace)

    def load(self, path: str):
        return elaborate(parse_file(_read(path), path), fuel=self.args.fuel, trace=self.trace)

    def check(self) -> int:
        for path in self.args.paths:
            text = _read(path)
            f = parse_file(text, path)
            elaborate(f, fuel=self.args.fuel, trace=self.trace)
            print(f"OK {path} ({len(f)} entries)")
        return EXIT_OK

    def eval(self) -> int:
        sig = self.load(self.args.path)
        if self.args.term is None:
            for out in sig.outputs:
                if out.kind == "eval":
                    print(print_term(out.result))
            return EXIT_OK
        t = parse_term(self.args.term)
        fuel = self.fuel()
        infer(sig, Context(), t, fuel)
        print(print_term(snf(sig, t, fuel)))
        return EXIT_OK

    def deps(self) -> int:
        a = self.args
        if (a.name is None) == (a.term is None):
            raise UsageError("deps takes either a name or --term")
        sig = self.load(a.path)
        root = a.name if a.name is not None else parse_term(a.term)
        sys.stdout.write(deps(sig, root, a.transitive, a.fuel).render())
        return EXIT_OK

    def compare(self) -> int:
        left, right = (self.load(p) for p in self.args.paths)
        sys.stdout.write(compare(left, right, self.args.fuel).render())
        return EXIT_OK

    def bundle_list(self) -> int:
        for t in kit.bundle():
            print(f"{t.name}\t{t.description}")
        return EXIT_OK

    def bundle_check(self) -> int:
        status = EXIT_OK
        for t in kit.bundle():
            f = t.parse()
            sig = elaborate(f, fuel=self.args.fuel, trace=self.trace)
            evals = tuple(print_term(o.result) for o in sig.outputs if o.kind == "eval")
            checks = sum(o.kind == "check" for o in sig.outputs)
            if evals != t.expected_evals or checks != t.expected_checks:
                print(f"FAIL {t.name}: unexpected command results {evals}", file=sys.stderr)
                status = EXIT_FAIL
                continue
            for name in sig.entries:
                check_with_trimmed(sig, name, self.args.fuel)
            print(f"OK {t.name} ({len(f)} entries)")
        return status


def main(argv=None) -> int:
    sys.setrecursionlimit(max(sys.getrecursionlimit(), 20000))
    try:
        args = build_parser().parse_args(argv)
        run = _Run(args)
        return getattr(run, args.command.replace("-", "_"))()
    except UsageError as e:
        print(f"usage error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except ParseError as e:
        print(e, file=sys.stderr)
        return EXIT_PARSE
    except FuelExhausted as e:
        print(e, file=sys.stderr)
        return EXIT_FUEL
    except ModError as e:
        print(e, file=sys.stderr)
        return EXIT_FAIL
    except RecursionError:
        print("<input>:0:0: ResourceError: term nesting too deep", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
