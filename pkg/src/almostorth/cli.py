"""Command-line front end.

Exit codes: 0 success, 1 usage / I/O / parse error, 2 numerical chain violation
(``bounds``) or failed checks (``check``).
"""

from __future__ import annotations

import argparse
import re
import sys
from pathlib import Path

from . import __version__
from .bounds import full_report
from .config import Tolerances
from .fileio import FamilyFileError, dumps_family, dumps_report, read_family, report_to_flat, write_family, write_report
from .lab import KINDS, SUITES, SuiteConfig, gap_experiment, orthogonal_family, random_family, run_suite, scalar_family, summarize

EXIT_OK, EXIT_USAGE, EXIT_CHAIN = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def parse_range(text: str) -> tuple[int, int]:
    """``"3"`` or ``"1:8"`` -> inclusive integer range."""
    m = re.fullmatch(r"(\d+)(?::(\d+))?", text.strip())
    if not m:
        raise argparse.ArgumentTypeError(f"expected N or LO:HI, got {text!r}")
    lo = int(m.group(1))
    hi = int(m.group(2)) if m.group(2) else lo
    if lo < 1 or hi < lo:
        raise argparse.ArgumentTypeError(f"invalid range {text!r}")
    return lo, hi


def parse_n_values(text: str) -> list[int]:
    """``"4"``, ``"1,2,5"``, ``"2:10"``, ``"2:10:2"`` (additive) or ``"8:256:x2"`` (multiplicative)."""
    out: list[int] = []
    for part in text.split(","):
        part = part.strip()
        m = re.fullmatch(r"(\d+)(?::(\d+)(?::(x?)(\d+))?)?", part)
        if not m:
            raise argparse.ArgumentTypeError(f"bad n specification {part!r}")
        lo = int(m.group(1))
        hi = int(m.group(2)) if m.group(2) else lo
        mult = m.group(3) == "x"
        step = int(m.group(4)) if m.group(4) else 1
        if lo < 1 or hi < lo or step < 1 or (mult and step < 2):
            raise argparse.ArgumentTypeError(f"bad n specification {part!r}")
        n = lo
        while n <= hi:
            out.append(n)
            n = n * step if mult else n + step
    return out


def _positive_int(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
    if v < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {v}")
    return v


def _u64(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer seed, got {text!r}") from None
    if not 0 <= v < 2**64:
        raise argparse.ArgumentTypeError("seed must fit in an unsigned 64-bit integer")
    return v


def _tolerance(text: str) -> float:
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a number, got {text!r}") from None
    if not v >= 0 or v == float("inf"):
        raise argparse.ArgumentTypeError(f"tolerance must be finite and nonnegative, got {text!r}")
    return v


def _override(text: str) -> tuple[str, float]:
    name, sep, value = text.partition("=")
    if not sep or not name.strip():
        raise argparse.ArgumentTypeError(f"expected CHECK=TOL, got {text!r}")
    return name.strip(), _tolerance(value)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="almostorth", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    p.add_argument("--seed", type=_u64, default=0, help="seed for every random draw (default 0)")
    p.add_argument("--tol", type=_tolerance, default=None, help="override every comparison tolerance")
    p.add_argument("--quiet", action="store_true", help="suppress summaries on stdout")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def subparser(name, help):
        sp = sub.add_parser(name, help=help)
        # global flags are also accepted after the subcommand
        sp.add_argument("--seed", type=_u64, default=argparse.SUPPRESS, help=argparse.SUPPRESS)
        sp.add_argument("--tol", type=_tolerance, default=argparse.SUPPRESS, help=argparse.SUPPRESS)
        sp.add_argument("--quiet", action="store_true", default=argparse.SUPPRESS, help=argparse.SUPPRESS)
        return sp

    b = subparser("bounds", "full bound report for a family file")
    b.add_argument("input", help="family file (JSON)")
    b.add_argument("-o", "--output", help="report path (default: stdout)")
    b.add_argument("--format", choices=("json", "csv"), default="json")
    b.add_argument("--plot", help="also render the bound chain to this image file")

    c = subparser("check", "randomized lemma verification suites")
    c.add_argument("--suite", choices=SUITES, default="all")
    c.add_argument("--trials", type=_positive_int, default=100)
    c.add_argument("--dims", type=parse_range, default=(1, 8), help="LO:HI member dimension")
    c.add_argument("--counts", type=parse_range, default=(1, 12), help="LO:HI family size")
    c.add_argument("--kind", choices=KINDS, default="general")
    c.add_argument("--eps", type=float, default=0.05, help="near_orthogonal perturbation scale")
    c.add_argument("--tol-override", type=_override, action="append", default=[], metavar="CHECK=TOL")
    c.add_argument("--witness-dir", help="directory for failing-trial family files")

    g = subparser("gap", "row-sum bound vs spectral bound for the scalar family")
    g.add_argument("--n", type=parse_n_values, required=True, help="e.g. 4, 1,2,5, 2:64:2 or 8:256:x2")
    g.add_argument("--dim", type=_positive_int, default=1)
    g.add_argument("-o", "--output", help="CSV path (default: stdout)")
    g.add_argument("--plot", help="also render the gap figure to this image file")

    d = subparser("demo", "write a generated family to a family file")
    d.add_argument("family", choices=("scalar", "orthogonal", "random", "near_orthogonal"))
    d.add_argument("--n", type=_positive_int, default=4)
    d.add_argument("--dim", type=_positive_int, default=2, help="member dimension (block size for orthogonal kinds)")
    d.add_argument("--norms", help="comma-separated member norms for the orthogonal family (sets n)")
    d.add_argument("--kind", choices=("general", "psd"), default="general", help="entry law for 'random'")
    d.add_argument("--eps", type=float, default=0.05)
    d.add_argument("-o", "--output", required=True)
    return p


def _tolerances(args) -> Tolerances:
    tol = Tolerances()
    return tol if args.tol is None else tol.with_check_tol(args.tol)


def _emit(text: str, path: str | None) -> None:
    if path is None:
        sys.stdout.write(text)
    else:
        Path(path).write_text(text, encoding="utf-8", newline="\n")


def cmd_bounds(args) -> int:
    tol = _tolerances(args)
    try:
        fam = read_family(args.input)
    except FamilyFileError as e:
        print(f"{args.input}: {e}", file=sys.stderr)
        return EXIT_USAGE
    rep = full_report(fam, tol)
    flat = report_to_flat(rep, label=fam.label, seed=args.seed, tol=tol)
    if args.output:
        write_report(flat, args.output, args.format)
    else:
        sys.stdout.write(dumps_report(flat, args.format))
    if args.plot:
        from .plotting import plot_chain

        plot_chain(flat, args.plot)
    if not rep.chain_ok:
        bad = ", ".join(s.check_name for s in rep.steps if not s.passed)
        print(f"chain violated: {bad}", file=sys.stderr)
        return EXIT_CHAIN
    return EXIT_OK


def _witness_name(check: str, trial: int) -> str:
    return re.sub(r"[^A-Za-z0-9_.-]+", "_", check) + f"_trial{trial:05d}.json"


def cmd_check(args) -> int:
    tol = _tolerances(args)
    overrides = dict(args.tol_override)
    if args.eps < 0:
        raise UsageError("--eps must be nonnegative")
    config = SuiteConfig(
        dims=args.dims, counts=args.counts, seed=args.seed, kind=args.kind,
        eps=args.eps, tol=tol, overrides=overrides,
    )
    results = run_suite(args.suite, args.trials, config)
    summary = summarize(results)
    lines = [f"suite={args.suite} kind={args.kind} trials={args.trials} seed={args.seed}"]
    width = max(len(k) for k in summary)
    for name, (ok, total) in summary.items():
        lines.append(f"{name:<{width}}  {ok}/{total}  {'pass' if ok == total else 'FAIL'}")
    failures = [r for r in results if not r.passed]
    lines.append(f"total {len(results) - len(failures)}/{len(results)} passed")
    if failures and args.witness_dir:
        out = Path(args.witness_dir)
        out.mkdir(parents=True, exist_ok=True)
        for r in failures:
            (out / _witness_name(r.check_name, r.trial)).write_text(
                dumps_family(r.witness), encoding="utf-8", newline="\n"
            )
        lines.append(f"wrote {len(failures)} witness file(s) to {out}")
    if not args.quiet:
        sys.stdout.write("\n".join(lines) + "\n")
    return EXIT_OK if not failures else EXIT_CHAIN


def cmd_gap(args) -> int:
    rows = gap_experiment(args.n, "scalar", args.dim, tol=_tolerances(args))
    text = "n,lhs_sq,improved,cotlar_stein,ratio\n" + "".join(
        f"{r.n},{r.lhs_sq!r},{r.improved!r},{r.cotlar_stein!r},{r.ratio_cs_over_improved!r}\n" for r in rows
    )
    _emit(text, args.output)
    if args.plot:
        from .plotting import plot_gap

        plot_gap(rows, args.plot)
    return EXIT_OK


def cmd_demo(args) -> int:
    if args.family == "scalar":
        fam = scalar_family(args.n, args.dim)
    elif args.family == "orthogonal":
        if args.norms:
            try:
                norms = [float(v) for v in args.norms.split(",")]
            except ValueError:
                raise UsageError(f"--norms must be comma-separated numbers, got {args.norms!r}") from None
        else:
            norms = [1.0] * args.n
        if any(v < 0 for v in norms):
            raise UsageError("--norms must be nonnegative")
        fam = orthogonal_family(len(norms), args.dim, norms)
    elif args.family == "random":
        fam = random_family(args.n, args.dim, args.seed, args.kind)
    else:
        if args.eps < 0:
            raise UsageError("--eps must be nonnegative")
        fam = random_family(args.n, args.dim, args.seed, "near_orthogonal", args.eps)
    write_family(fam, args.output)
    return EXIT_OK


COMMANDS = {"bounds": cmd_bounds, "check": cmd_check, "gap": cmd_gap, "demo": cmd_demo}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:  # --help, --version and usage errors
        return e.code if isinstance(e.code, int) else EXIT_USAGE
    try:
        return COMMANDS[args.command](args)
    except UsageError as e:
        parser.print_usage(sys.stderr)
        print(f"almostorth: error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as e:
        print(f"almostorth: {e}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
