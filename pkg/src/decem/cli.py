"""Command-line front end.

Exit codes: 0 success, 1 usage error, 2 data error (unreadable or invalid
model/policy), 3 numeric or resource failure.
"""
from __future__ import annotations

import argparse
import logging
import sys
from dataclasses import replace
from pathlib import Path

from . import __version__
from .builtins import BUILTINS, builtin_text
from .errors import ModelError, NumericError, ParseError, ResourceError
from .formats import parse_document, parse_policy, serialize_policy, write_trace_csv
from .model import validate_model
from .solver import ALGORITHMS, SolverConfig, evaluate, run

log = logging.getLogger("decem")

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_NUMERIC = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _memory(text):
    try:
        sizes = [int(t) for t in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer or a comma list, got {text!r}") from None
    if min(sizes) < 1:
        raise argparse.ArgumentTypeError("memory sizes must be >= 1")
    return sizes[0] if len(sizes) == 1 else sizes


def _positive(text):
    v = float(text)
    if not v > 0:
        raise argparse.ArgumentTypeError("must be positive")
    return v


def _add_model_args(p):
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--model", type=Path, help="problem file (.dpomdp)")
    src.add_argument("--builtin", choices=BUILTINS, help="bundled problem")
    p.add_argument("--gamma", type=float, help="override the discount in the model file")


def _add_solver_args(p):
    p.add_argument("--epsilon", type=_positive, default=0.1, help="E-step accuracy (em, mbem)")
    p.add_argument("--memory", type=_memory, default=2, help="controller size per agent, e.g. 2 or 2,3")
    p.add_argument("--iters", type=int, default=100, help="outer iterations")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--init", choices=("random", "uniform"), default="random")
    p.add_argument("--tol", type=float, default=0.0,
                   help="stop early once both the return and the policy change less than this")
    p.add_argument("--exact-j", action="store_true", help="report J from an exact solve")
    p.add_argument("--no-timing", action="store_true", help="write 0 for elapsed_ms (byte-stable output)")


def build_parser():
    parser = _Parser(prog="decem", description="Finite-state controller planning for DEC-POMDPs.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="count", default=0)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("solve", help="optimize a controller")
    _add_model_args(p)
    p.add_argument("--algo", choices=ALGORITHMS, default="mbem")
    _add_solver_args(p)
    p.add_argument("--trace", type=Path, help="trace CSV path (default: standard output)")
    p.add_argument("--policy-out", type=Path, help="write the final controller here")

    p = sub.add_parser("validate", help="check a problem file")
    _add_model_args(p)

    p = sub.add_parser("eval", help="exact expected return of a controller")
    _add_model_args(p)
    p.add_argument("--policy", type=Path, required=True)

    p = sub.add_parser("bench", help="run em, bem and mbem on one problem")
    _add_model_args(p)
    _add_solver_args(p)
    p.add_argument("--out-dir", type=Path, default=Path("."), help="one <algo>.csv per algorithm")
    return parser


def _load(args):
    if args.builtin:
        text, source = builtin_text(args.builtin), f"builtin:{args.builtin}"
    else:
        try:
            text = args.model.read_text(encoding="utf-8")
        except (OSError, UnicodeDecodeError) as exc:
            raise ModelError(f"cannot read {args.model}: {exc}") from exc
        source = str(args.model)
    if args.gamma is not None and not 0.0 < args.gamma < 1.0:
        raise UsageError(f"--gamma must lie in (0, 1), got {args.gamma}")
    return parse_document(text, source=source, gamma=args.gamma).model


def _config(args, algo):
    if args.iters < 1:
        raise UsageError("--iters must be >= 1")
    return SolverConfig(
        algorithm=algo,
        epsilon=args.epsilon,
        max_iters=args.iters,
        j_tol=args.tol,
        policy_tol=args.tol,
        memory=args.memory,
        seed=args.seed,
        init=args.init,
        exact_j=args.exact_j,
    )


def _trace_text(traces, no_timing):
    if no_timing:
        traces = [replace(t, elapsed_ms=0.0) for t in traces]
    return write_trace_csv(traces)


def _write(path, text):
    try:
        Path(path).write_text(text, encoding="utf-8")
    except OSError as exc:
        raise ModelError(f"cannot write {path}: {exc}") from exc


def cmd_solve(args):
    model = _load(args)
    policy, traces = run(model, _config(args, args.algo))
    text = _trace_text(traces, args.no_timing)
    if args.trace:
        _write(args.trace, text)
    else:
        sys.stdout.write(text)
    if args.policy_out:
        _write(args.policy_out, serialize_policy(policy))
    log.info("%s: %d iterations, final J = %r", args.algo, len(traces), traces[-1].J)
    return EXIT_OK


def cmd_validate(args):
    model = _load(args)
    problems = validate_model(model)
    if problems:
        for p in problems:
            print(p, file=sys.stderr)
        return EXIT_DATA
    print("OK")
    return EXIT_OK


def cmd_eval(args):
    model = _load(args)
    try:
        text = args.policy.read_text(encoding="utf-8")
    except (OSError, UnicodeDecodeError) as exc:
        raise ModelError(f"cannot read {args.policy}: {exc}") from exc
    policy = parse_policy(text, source=str(args.policy))
    print(repr(evaluate(model, policy)))
    return EXIT_OK


def cmd_bench(args):
    model = _load(args)
    try:
        args.out_dir.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise ModelError(f"cannot create {args.out_dir}: {exc}") from exc
    for algo in ALGORITHMS:
        _, traces = run(model, _config(args, algo))
        path = args.out_dir / f"{algo}.csv"
        _write(path, _trace_text(traces, args.no_timing))
        inner = [t.inner_iters for t in traces]
        log.info("%s: final J = %r, inner iterations at k=0: %d, wall %.1f ms",
                 algo, traces[-1].J, inner[0], traces[-1].elapsed_ms)
        print(path)
    return EXIT_OK


COMMANDS = {"solve": cmd_solve, "validate": cmd_validate, "eval": cmd_eval, "bench": cmd_bench}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(
        level=logging.WARNING - 10 * min(args.verbose, 2),
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )
    try:
        return COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"decem: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ParseError, ModelError) as exc:
        print(f"decem: {exc}", file=sys.stderr)
        return EXIT_DATA
    except (NumericError, ResourceError, MemoryError) as exc:
        print(f"decem: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
