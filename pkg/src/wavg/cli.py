"""Command-line interface.

Commands: eval-word, solve, check-memoryless, find-witness, monotone,
verify-paper.  Exit codes: 0 success / no witness, 1 witness found (or
failed verification), 2 input error, 3 budget exceeded.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
import time
from pathlib import Path

from . import games, payoff, sequences, solver, verify
from .errors import BudgetExceededError, InputError, UnsupportedSequenceError
from .words import format_lasso, parse_lasso

EXIT_OK = 0
EXIT_WITNESS = 1
EXIT_INPUT = 2
EXIT_BUDGET = 3

_BUILTIN_GADGETS = {
    "two-branch": lambda args: games.two_branch_gadget(),
    "loops": lambda args: games.loops_gadget(
        [sequences.parse_rational(t) for t in args.split(",")]),
    "escape": lambda args: games.escape_gadget(sequences.parse_rational(args)),
    "detour": lambda args: games.detour_gadget(
        *[sequences.parse_rational(t) for t in args.split(",")]),
    "spike": lambda args: games.cycle_choice_gadget(int(args)),
}


def _load_game(spec: str) -> games.GameGraph:
    if spec.startswith("builtin:"):
        rest = spec[len("builtin:"):]
        name, _, args = rest.partition(":")
        if name not in _BUILTIN_GADGETS:
            raise InputError(
                f"unknown builtin game {name!r}; available: "
                + ", ".join(sorted(_BUILTIN_GADGETS)))
        return _BUILTIN_GADGETS[name](args)
    path = Path(spec)
    if not path.exists():
        raise InputError(f"game file not found: {spec}")
    return games.parse_game(path.read_text(encoding="utf-8"))


def _instance_hash(*parts: str) -> str:
    digest = hashlib.sha256("\x1f".join(parts).encode("utf-8"))
    return digest.hexdigest()[:16]


def _emit(doc: dict, args) -> None:
    if args.format == "structured":
        if args.timing:
            doc["elapsed_seconds"] = round(time.monotonic() - args._t0, 6)
        print(json.dumps(doc, indent=2, sort_keys=False))


def _mode(args) -> str:
    return payoff.LIMSUP if args.limsup else args.mode


def _fr(x) -> str:
    return str(x)


def _word(xs) -> str:
    return "(" + ",".join(str(x) for x in xs) + ")"


def _generalization_notes(seq) -> list[str]:
    """Caveats attached to structured reports for adopted extensions."""
    if (isinstance(seq, sequences.CoeffSeq) and seq.period == 1
            and seq.ratio > 1 and seq.ratio.denominator != 1):
        return ["rotation-average evaluation extends the integer-growth "
                "case to all rational ratios > 1; cross-checked against "
                "the truncation oracle"]
    return []


def cmd_eval_word(args) -> int:
    seq = sequences.parse_sequence(args.seq)
    word = parse_lasso(args.word)
    mode = _mode(args)
    if isinstance(seq, sequences.RawCoeffTable) or args.horizon is not None:
        horizon = args.horizon
        if horizon is None:
            horizon = len(seq.values)
        value = payoff.eval_approx(seq, word, horizon, mode)
    else:
        try:
            value = payoff.eval_exact(seq, word, mode)
        except UnsupportedSequenceError as exc:
            raise InputError(f"{exc}; pass --horizon to evaluate approximately")
    if args.format == "structured":
        doc = {
            "command": "eval-word",
            "sequence": args.seq,
            "word": format_lasso(word),
            "mode": mode,
            "seed": args.seed,
        }
        if value.exact is not None:
            doc["exact"] = _fr(value.exact)
        else:
            doc["bracket"] = [_fr(value.bracket[0]), _fr(value.bracket[1])]
            doc["horizon"] = value.horizon_used
        notes = _generalization_notes(seq)
        if notes:
            doc["notes"] = notes
        _emit(doc, args)
    else:
        print(str(value))
    return EXIT_OK


def cmd_solve(args) -> int:
    g = _load_game(args.game)
    seq = sequences.parse_sequence(args.seq)
    mode = _mode(args)
    report = solver.solve_enumerative(g, seq, mode=mode, budget=args.budget)
    if args.format == "structured":
        doc = {
            "command": "solve",
            "instance": _instance_hash(games.serialize_game(g), args.seq, mode),
            "sequence": args.seq,
            "mode": mode,
            "maximin": _fr(report.maximin.exact),
            "minimax": _fr(report.minimax.exact),
            "saddle": report.saddle,
            "p1_optimal": report.p1_optimal.describe(),
            "p2_optimal": report.p2_optimal.describe(),
            "bounds": {"budget": args.budget},
            "seed": args.seed,
        }
        _emit(doc, args)
    else:
        print(f"maximin  = {report.maximin.exact}")
        print(f"minimax  = {report.minimax.exact}")
        print(f"saddle   = {report.saddle}")
        print(f"p1 optimal: {report.p1_optimal.describe()}")
        print(f"p2 optimal: {report.p2_optimal.describe()}")
    return EXIT_OK


def cmd_check_memoryless(args) -> int:
    g = _load_game(args.game)
    seq = sequences.parse_sequence(args.seq)
    mode = _mode(args)
    verdict = solver.check_memoryless(g, seq, mem_bound=args.mem_bound,
                                      mode=mode, budget=args.budget)
    witness = verdict.witness
    if args.format == "structured":
        doc = {
            "command": "check-memoryless",
            "instance": _instance_hash(games.serialize_game(g), args.seq, mode),
            "sequence": args.seq,
            "mode": mode,
            "verdict": verdict.kind.value,
            "bounds": {"mem_bound": verdict.mem_bound,
                       "budget": verdict.budget},
            "seed": args.seed,
        }
        if witness is not None:
            doc["witness"] = {
                "description": witness.description,
                "deviating_payoff": _fr(witness.deviating_payoff),
                "memoryless_payoff": _fr(witness.memoryless_payoff),
            }
        notes = _generalization_notes(seq)
        if notes:
            doc["notes"] = notes
        _emit(doc, args)
    else:
        print(f"verdict = {verdict.kind.value}")
        if witness is not None:
            print(f"deviation: {witness.description}")
            print(f"deviating payoff  = {witness.deviating_payoff}")
            print(f"memoryless payoff = {witness.memoryless_payoff}")
    if verdict.kind is solver.VerdictKind.WITNESS_FOUND:
        return EXIT_WITNESS
    return EXIT_OK


def cmd_find_witness(args) -> int:
    seq = sequences.parse_sequence(args.seq)
    mode = _mode(args)
    report = solver.find_witness_sequence_failure(
        seq, mem_bound=args.mem_bound, budget=args.budget, mode=mode)
    if args.format == "structured":
        doc = {
            "command": "find-witness",
            "sequence": args.seq,
            "mode": mode,
            "found": report.found,
            "tried": report.tried,
            "bounds": {"mem_bound": args.mem_bound, "budget": args.budget},
            "seed": args.seed,
        }
        if report.verdict is not None and report.verdict.witness is not None:
            doc["game"] = games.serialize_game(report.game)
            doc["witness"] = {
                "description": report.verdict.witness.description,
                "deviating_payoff": _fr(report.verdict.witness.deviating_payoff),
                "memoryless_payoff": _fr(report.verdict.witness.memoryless_payoff),
            }
        if report.monotonicity is not None:
            w = report.monotonicity
            doc["monotonicity_witness"] = {
                "x": [_fr(a) for a in w.x],
                "y": [_fr(a) for a in w.y],
                "u": format_lasso(w.u),
                "v": format_lasso(w.v),
                "values": [_fr(w.phi_xu), _fr(w.phi_xv),
                           _fr(w.phi_yu), _fr(w.phi_yv)],
            }
        _emit(doc, args)
    else:
        print(f"found = {report.found}")
        for line in report.tried:
            print(f"  tried {line}")
        if report.verdict is not None and report.verdict.witness is not None:
            print(f"witness game:\n{games.serialize_game(report.game)}", end="")
            print(f"deviation: {report.verdict.witness.description}")
            print(f"deviating payoff  = {report.verdict.witness.deviating_payoff}")
            print(f"memoryless payoff = {report.verdict.witness.memoryless_payoff}")
        if report.monotonicity is not None:
            w = report.monotonicity
            print(f"monotonicity witness: x={_word(w.x)} y={_word(w.y)} "
                  f"u={format_lasso(w.u)} v={format_lasso(w.v)}")
            print(f"values: {w.phi_xu} <= {w.phi_xv} but {w.phi_yu} > {w.phi_yv}")
    return EXIT_WITNESS if report.found else EXIT_OK


def cmd_monotone(args) -> int:
    seq = sequences.parse_sequence(args.seq)
    mode = _mode(args)
    alphabet = [sequences.parse_rational(t) for t in args.alphabet.split(",")]
    witness = solver.monotone_falsify(
        seq, alphabet, args.max_prefix, args.max_cycle, mode=mode,
        budget=args.budget, nonempty_only=args.nonempty)
    if args.format == "structured":
        doc = {
            "command": "monotone",
            "sequence": args.seq,
            "mode": mode,
            "alphabet": [_fr(a) for a in alphabet],
            "max_prefix": args.max_prefix,
            "max_cycle": args.max_cycle,
            "witness_found": witness is not None,
            "seed": args.seed,
        }
        if witness is not None:
            doc["witness"] = {
                "x": [_fr(a) for a in witness.x],
                "y": [_fr(a) for a in witness.y],
                "u": format_lasso(witness.u),
                "v": format_lasso(witness.v),
                "values": [_fr(witness.phi_xu), _fr(witness.phi_xv),
                           _fr(witness.phi_yu), _fr(witness.phi_yv)],
            }
        _emit(doc, args)
    else:
        if witness is None:
            print("no monotonicity violation in the searched space")
        else:
            print(f"witness: x={_word(witness.x)} y={_word(witness.y)} "
                  f"u={format_lasso(witness.u)} v={format_lasso(witness.v)}")
            print(f"phi(xu)={witness.phi_xu} <= phi(xv)={witness.phi_xv} "
                  f"but phi(yu)={witness.phi_yu} > phi(yv)={witness.phi_yv}")
    return EXIT_WITNESS if witness is not None else EXIT_OK


def cmd_verify_paper(args) -> int:
    report = verify.verify_paper()
    if args.format == "structured":
        doc = {
            "command": "verify-paper",
            "overall": report.overall,
            "checks": [
                {"name": c.name, "expected": c.expected, "actual": c.actual,
                 "pass": c.passed}
                for c in report.checks
            ],
            "seed": args.seed,
        }
        _emit(doc, args)
    else:
        width = max(len(c.name) for c in report.checks)
        for c in report.checks:
            status = "pass" if c.passed else "FAIL"
            line = f"{status}  {c.name.ljust(width)}  expected {c.expected}"
            if not c.passed:
                line += f"  got {c.actual}"
            print(line)
        print(f"overall: {'pass' if report.overall else 'FAIL'} "
              f"({sum(c.passed for c in report.checks)}/{len(report.checks)})")
    return EXIT_OK if report.overall else EXIT_WITNESS


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="wavg",
        description="Weighted-average payoff games workbench")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--mode", choices=[payoff.LIMINF, payoff.LIMSUP],
                        default=payoff.LIMINF,
                        help="evaluator mode (default liminf)")
    common.add_argument("--limsup", action="store_true",
                        help="shorthand for --mode limsup")
    common.add_argument("--format", choices=["text", "structured"],
                        default="text", help="output format")
    common.add_argument("--seed", type=int, default=None,
                        help="seed recorded in reports")
    common.add_argument("--timing", action="store_true",
                        help="include elapsed time in structured output")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("eval-word", parents=[common],
                       help="evaluate a payoff on a lasso word")
    p.add_argument("--seq", required=True, help="sequence spec")
    p.add_argument("--word", required=True,
                   help="lasso spec, e.g. prefix=1;cycle=0 or cycle=1,2,0,4")
    p.add_argument("--horizon", type=int, default=None,
                   help="bracket via truncation at this horizon")
    p.set_defaults(func=cmd_eval_word)

    p = sub.add_parser("solve", parents=[common],
                       help="solve a game over memoryless strategies")
    p.add_argument("--game", required=True,
                   help="game file path or builtin:<name>[:<args>]")
    p.add_argument("--seq", required=True)
    p.add_argument("--budget", type=int, default=500_000)
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("check-memoryless", parents=[common],
                       help="look for finite-memory deviations")
    p.add_argument("--game", required=True)
    p.add_argument("--seq", required=True)
    p.add_argument("--mem-bound", type=int, default=2)
    p.add_argument("--budget", type=int, default=2_000_000)
    p.set_defaults(func=cmd_check_memoryless)

    p = sub.add_parser("find-witness", parents=[common],
                       help="search gadget families for a memoryless failure")
    p.add_argument("--seq", required=True)
    p.add_argument("--mem-bound", type=int, default=2)
    p.add_argument("--budget", type=int, default=64)
    p.set_defaults(func=cmd_find_witness)

    p = sub.add_parser("monotone", parents=[common],
                       help="search for a monotonicity violation")
    p.add_argument("--seq", required=True)
    p.add_argument("--alphabet", default="0,1",
                   help="comma-separated rationals (default 0,1)")
    p.add_argument("--max-prefix", type=int, default=2)
    p.add_argument("--max-cycle", type=int, default=2)
    p.add_argument("--budget", type=int, default=10_000_000)
    p.add_argument("--nonempty", action="store_true",
                   help="require nonempty prefixes in witnesses")
    p.set_defaults(func=cmd_monotone)

    p = sub.add_parser("verify-paper", parents=[common],
                       help="run the built-in verification suite")
    p.set_defaults(func=cmd_verify_paper)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    args._t0 = time.monotonic()
    try:
        return args.func(args)
    except BudgetExceededError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except (InputError, UnsupportedSequenceError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
