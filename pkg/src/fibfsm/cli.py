"""Command-line entry point: ``fibfsm <subcommand> ...``.

Exit codes: 0 success, 1 failed self-check or certificate violation,
2 usage error.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
from fractions import Fraction
from pathlib import Path

from . import __version__
from .jacobi import CutoffSchedule, fsm_convergence, stability_sweep
from .subshift import NotAFibonacciFactor, enumerate_subwords, hull_sample, parse_left, parse_right
from .transfer import (
    SCHEMA_VERSION,
    CertificateViolation,
    InsufficientWord,
    certify_one_sided,
    certify_two_sided,
)
from .words import finite_fibonacci, fibonacci_number, v_at, window

MAX_WORD_SPAN = 10**7


class SelfCheckFailed(Exception):
    pass


def _meta(args: argparse.Namespace) -> dict:
    config = {k: v for k, v in sorted(vars(args).items()) if k not in ("func", "out")}
    blob = json.dumps(config, sort_keys=True, default=str)
    return {
        "tool": "fibfsm",
        "version": __version__,
        "config": config,
        "config_hash": hashlib.sha256(blob.encode()).hexdigest(),
        "seed": getattr(args, "seed", 0),
    }


def _emit(args: argparse.Namespace, text: str) -> None:
    if not text.endswith("\n"):
        text += "\n"
    if args.out:
        path = Path(args.out)
        path.write_text(text)
        if getattr(args, "format", None) == "csv":
            meta_path = path.with_name(path.name + ".meta.json")
            meta_path.write_text(json.dumps(_meta(args), indent=2, default=str) + "\n")
    else:
        sys.stdout.write(text)


def _with_meta(args: argparse.Namespace, payload: dict) -> str:
    return json.dumps({"schema_version": SCHEMA_VERSION, "meta": _meta(args), **payload}, indent=2, default=str)


# -- subcommands ----------------------------------------------------------------


def cmd_word(args: argparse.Namespace) -> None:
    if args.check_symmetry:
        bad = [n for n in range(-args.radius, args.radius + 1) if n not in (-1, 0) and v_at(n) != v_at(-1 - n)]
        ok = not bad and v_at(-1) == 1 and v_at(0) == 0
        if args.format == "json":
            _emit(args, _with_meta(args, {"radius": args.radius, "ok": ok, "violations": bad[:20]}))
        else:
            _emit(args, "OK" if ok else f"FAIL at {bad[:20]}")
        if not ok:
            raise SelfCheckFailed("symmetry check failed")
        return
    lo, hi = args.start, args.stop
    if lo is None or hi is None:
        raise argparse.ArgumentTypeError("word needs --from and --to (or --check-symmetry)")
    if lo > hi or hi - lo > MAX_WORD_SPAN:
        raise argparse.ArgumentTypeError(f"need from <= to and to - from <= {MAX_WORD_SPAN}")
    w = window(lo, hi)
    checks = {"no_00_or_111": "00" not in w.letters and "111" not in w.letters}
    if lo >= 1:
        k = 1
        while fibonacci_number(k) < hi:
            k += 1
        checks["matches_finite_word"] = finite_fibonacci(k)[lo - 1 : hi] == w.letters
    mirrored = [n for n in range(max(lo, -1 - hi), min(hi, -1 - lo) + 1) if n not in (-1, 0)]
    checks["mirror_symmetric"] = all(w[n] == w[-1 - n] for n in mirrored)
    if args.format == "json":
        _emit(args, _with_meta(args, {"start": lo, "stop": hi, "letters": w.letters, "checks": checks}))
    elif args.format == "csv":
        _emit(args, "n,v_n\n" + "".join(f"{lo + i},{c}\n" for i, c in enumerate(w.letters)))
    else:
        _emit(args, w.letters)
    if not all(checks.values()):
        raise SelfCheckFailed(f"word self-check failed: {checks}")


def cmd_subwords(args: argparse.Namespace) -> None:
    if args.max < 1:
        raise argparse.ArgumentTypeError("--max must be >= 1")
    sets = [enumerate_subwords(n) for n in range(1, args.max + 1)]
    ok = all(len(s) == s.length + 1 for s in sets)
    if args.format == "json":
        _emit(args, _with_meta(args, {"complexity": [len(s) for s in sets], "sets": [s.to_dict() for s in sets]}))
    elif args.format == "csv":
        _emit(args, "length,count,words\n" + "".join(f"{s.length},{len(s)},{' '.join(sorted(s.words))}\n" for s in sets))
    else:
        _emit(args, "\n".join(f"{s.length} {len(s)}" for s in sets))
    if not ok:
        raise SelfCheckFailed("subword complexity differs from n + 1")


def cmd_partition(args: argparse.Namespace) -> None:
    w = hull_sample(args.shift, args.width).letters
    parse = (parse_right if args.direction == "right" else parse_left)(w)
    if parse.text() != w:
        raise SelfCheckFailed("parse does not reassemble the input")
    _emit(args, _with_meta(args, {"shift": args.shift, "width": args.width, "word": w, "parse": parse.to_dict()}))


def cmd_certify(args: argparse.Namespace) -> None:
    bound = Fraction(args.bound)
    if args.mode == "one_sided":
        blocks = parse_right(hull_sample(args.shift, args.width).letters).blocks
        prefixes = {"eps": [""], "1": ["1"], "both": ["", "1"]}[args.prefix]
        certs = [certify_one_sided(blocks, p, bound) for p in prefixes]
    else:
        win = window(args.shift - args.width, args.shift + args.width)
        certs = [certify_two_sided(win, Fraction(args.alpha), Fraction(args.beta), bound)]
    _emit(args, _with_meta(args, {"certificates": [c.to_dict() for c in certs]}))


def cmd_stability(args: argparse.Namespace) -> None:
    schedule = CutoffSchedule.parse(args.schedule, args.seed)
    report = stability_sweep(schedule, args.count, args.p, doubling=not args.no_doubling)
    if args.format == "csv":
        _emit(args, report.to_csv())
    elif args.format == "json":
        _emit(args, _with_meta(args, report.to_dict()))
    else:
        _emit(
            args,
            f"schedule={args.schedule} p={args.p} count={args.count} max_norm={report.max_norm!r} "
            f"last_new_max={report.last_new_max} n0={report.n0} doubled_max={report.doubled_max!r} "
            f"supported={report.supported}",
        )


def _window_arg(text: str) -> tuple[int, int]:
    try:
        a, b = (int(x) for x in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"window must be 'a,b', got {text!r}") from None
    return a, b


def cmd_fsm(args: argparse.Namespace) -> None:
    schedule = CutoffSchedule.parse(args.schedule, args.seed)
    table = fsm_convergence(schedule, args.rhs, args.window, args.count)
    if args.format == "csv":
        _emit(args, table.to_csv())
    elif args.format == "json":
        _emit(args, _with_meta(args, table.to_dict()))
    else:
        d = table.distances()
        _emit(args, f"converged={table.converged} monotone_tail={table.monotone_tail} d_last={d[-2]!r}")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="fibfsm", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, formats=("text", "json", "csv"), default="text"):
        p.add_argument("--format", choices=formats, default=default)
        p.add_argument("--out", help="write to this file instead of stdout")
        p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("word", help="window of the two-sided Fibonacci word")
    p.add_argument("--from", dest="start", type=int)
    p.add_argument("--to", dest="stop", type=int)
    p.add_argument("--check-symmetry", action="store_true")
    p.add_argument("--radius", type=int, default=10_000)
    common(p)
    p.set_defaults(func=cmd_word)

    p = sub.add_parser("subwords", help="subword sets and complexity")
    p.add_argument("--max", type=int, required=True)
    common(p)
    p.set_defaults(func=cmd_subwords)

    p = sub.add_parser("partition", help="block partition of a hull sample")
    p.add_argument("--shift", type=int, default=0)
    p.add_argument("--width", type=int, default=20, help="half width of the sample")
    p.add_argument("--direction", choices=("right", "left"), default="right")
    common(p, ("json",), "json")
    p.set_defaults(func=cmd_partition)

    p = sub.add_parser("certify", help="exact growth certificate")
    p.add_argument("--mode", choices=("one_sided", "two_sided"), default="one_sided")
    p.add_argument("--shift", type=int, default=0)
    p.add_argument("--width", type=int, default=3000)
    p.add_argument("--prefix", choices=("eps", "1", "both"), default="both")
    p.add_argument("--alpha", default="1")
    p.add_argument("--beta", default="1")
    p.add_argument("--bound", default="1000000")
    common(p, ("json",), "json")
    p.set_defaults(func=cmd_certify)

    p = sub.add_parser("stability", help="inverse-norm sweep over a cutoff schedule")
    p.add_argument("--schedule", default="symmetric")
    p.add_argument("--count", type=int, default=200)
    p.add_argument("--p", choices=("1", "2", "inf"), default="2")
    p.add_argument("--no-doubling", action="store_true")
    common(p, default="csv")
    p.set_defaults(func=cmd_stability)

    p = sub.add_parser("fsm", help="pointwise convergence of truncated solutions")
    p.add_argument("--schedule", default="fibonacci")
    p.add_argument("--rhs", default="e0")
    p.add_argument("--window", type=_window_arg, default=(-10, 10))
    p.add_argument("--count", type=int, default=15)
    common(p, default="csv")
    p.set_defaults(func=cmd_fsm)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # --help, --version, argparse usage errors
        return int(exc.code or 0)
    try:
        args.func(args)
    except (argparse.ArgumentTypeError, ValueError) as exc:
        if isinstance(exc, (InsufficientWord, NotAFibonacciFactor)):
            print(f"error: {exc}", file=sys.stderr)
            return 1
        parser.print_usage(sys.stderr)
        print(f"{parser.prog}: error: {exc}", file=sys.stderr)
        return 2
    except (SelfCheckFailed, CertificateViolation, AssertionError, ArithmeticError) as exc:
        print(f"check failed: {exc}", file=sys.stderr)
        return 1
    return 0
