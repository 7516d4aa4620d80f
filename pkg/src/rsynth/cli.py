"""Command-line driver: solve, gen, validate.

Exit codes for ``solve``: 0 = solution exists, 1 = none exists,
2 = input error, 3 = internal disagreement between procedures.
"""
from __future__ import annotations

import argparse
import json
import logging
import os
import sys
import time

from .fileformat import (
    ParseError,
    _parse_full,
    arena_to_dot,
    game_to_dot,
    strict_findings,
    witness_dumps,
    witness_from_json,
)
from .game import GameError, validate_game
from .gen import GEN_CLASSES, generate_instance_text
from .oracle import OracleTooLarge, brute_force_ncrsp
from .reductions import build_parity_arena
from .solvers import solve_finite_duration, zielonka_solve
from .synthesis import (
    EveStrategy,
    SolverDisagreement,
    check_solution,
    derive_sigma0,
    simplify_witness,
)

log = logging.getLogger("rsynth")

EXIT_YES = 0
EXIT_NO = 1
EXIT_INPUT = 2
EXIT_DISAGREE = 3


def _setup_logging() -> None:
    level = os.environ.get("RSYNTH_LOG", "warning").upper()
    logging.basicConfig(level=getattr(logging, level, logging.WARNING))


def _result_document(answer: bool, witness_doc, stats: dict) -> str:
    doc = {
        "answer": "YES" if answer else "NO",
        "witness": witness_doc,
        "stats": stats,
    }
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def cmd_solve(args: argparse.Namespace) -> int:
    t0 = time.perf_counter()
    try:
        g, objs = _parse_full(open(args.instance, encoding="utf-8").read())[:2]
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except ParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT

    defects = validate_game(g)
    if defects:
        for d in defects:
            print(f"error: {d}", file=sys.stderr)
        return EXIT_INPUT

    try:
        arena = build_parity_arena(g, objs)
    except GameError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT

    if args.dot_game:
        with open(args.dot_game, "w", encoding="utf-8") as fh:
            fh.write(game_to_dot(g))
    if args.dot_arena:
        with open(args.dot_arena, "w", encoding="utf-8") as fh:
            fh.write(arena_to_dot(arena))

    win = None
    answers: dict[str, bool] = {}
    if args.solver in ("parity", "both"):
        win = zielonka_solve(arena)
        answers["parity"] = arena.initial in win.eve_nodes
    if args.solver in ("finite", "both"):
        answers["finite"] = solve_finite_duration(arena)
    if len(answers) == 2 and answers["parity"] != answers["finite"]:
        print(
            f"internal disagreement: parity={answers['parity']} finite={answers['finite']}",
            file=sys.stderr,
        )
        return EXIT_DISAGREE
    answer = next(iter(answers.values()))

    oracle_note = None
    if args.oracle:
        try:
            oracle_answer = brute_force_ncrsp(g, objs)
        except OracleTooLarge as exc:
            print(f"error: oracle refused: {exc}", file=sys.stderr)
            return EXIT_INPUT
        if oracle_answer != answer:
            print(
                f"internal disagreement: solver={answer} oracle={oracle_answer}",
                file=sys.stderr,
            )
            return EXIT_DISAGREE
        oracle_note = "agree"
        log.info("oracle agreement: %s", oracle_answer)

    witness = None
    witness_doc = None
    if answer:
        if win is None:
            win = zielonka_solve(arena)
        witness = derive_sigma0(EveStrategy.from_win_region(arena, win))
        if not args.no_simplify:
            witness = simplify_witness(g, objs, witness)
        report = check_solution(g, objs, witness)
        if not report.is_valid:
            print("internal disagreement: witness failed certification", file=sys.stderr)
            return EXIT_DISAGREE
        witness_doc = json.loads(witness_dumps(witness))
        if args.emit_strategy:
            with open(args.emit_strategy, "w", encoding="utf-8") as fh:
                fh.write(witness_dumps(witness))
    elif args.emit_strategy:
        log.warning("no witness to emit on a NO instance")

    stats = {
        "game_states": len(g.states),
        "agents": g.n_agents,
        "objective_class": objs.class_tag,
        "arena_nodes": len(arena),
        "arena_edges": arena.n_edges,
        "round_key_bound": arena.fd_round_bound,
        "solver": args.solver,
        "oracle": oracle_note,
        "witness_nodes": len(witness.output) if witness is not None else 0,
        "wall_time_s": round(time.perf_counter() - t0, 6),
    }
    out = _result_document(answer, witness_doc, stats)
    if args.json:
        with open(args.json, "w", encoding="utf-8") as fh:
            fh.write(out)
    sys.stdout.write(out)
    return EXIT_YES if answer else EXIT_NO


def cmd_gen(args: argparse.Namespace) -> int:
    try:
        text = generate_instance_text(
            states=args.states,
            agents=args.agents,
            actions=args.actions,
            cls=getattr(args, "cls"),
            seed=args.seed,
            density=args.density,
        )
    except GameError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    if args.output and args.output != "-":
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


def cmd_validate(args: argparse.Namespace) -> int:
    try:
        text = open(args.instance, encoding="utf-8").read()
        g, objs, explicit = _parse_full(text)
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except ParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    defects = [str(d) for d in validate_game(g)]
    if args.strict:
        defects += strict_findings(g, explicit)
    if defects:
        for d in defects:
            print(d)
        return EXIT_INPUT
    print("ok")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rsynth",
        description="Decide whether Agent 0 can force its objective in every "
        "rational outcome of a concurrent game, and extract a witness strategy.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_solve = sub.add_parser("solve", help="decide an instance file")
    p_solve.add_argument("instance")
    p_solve.add_argument(
        "--solver",
        choices=("finite", "parity", "both"),
        default="parity",
        help="decision procedure; 'both' runs and compares the two",
    )
    p_solve.add_argument(
        "--oracle",
        action="store_true",
        help="also run the independent brute-force decider and compare",
    )
    p_solve.add_argument("--emit-strategy", metavar="PATH")
    p_solve.add_argument("--dot-arena", metavar="PATH")
    p_solve.add_argument("--dot-game", metavar="PATH")
    p_solve.add_argument("--json", metavar="PATH")
    p_solve.add_argument(
        "--no-simplify",
        action="store_true",
        help="emit the arena-memory witness without trying state-based ones",
    )
    p_solve.set_defaults(func=cmd_solve)

    p_gen = sub.add_parser("gen", help="generate a random instance")
    p_gen.add_argument("--states", type=int, required=True)
    p_gen.add_argument("--agents", type=int, required=True)
    p_gen.add_argument("--actions", type=int, required=True)
    p_gen.add_argument("--class", dest="cls", choices=GEN_CLASSES, required=True)
    p_gen.add_argument("--seed", type=int, required=True)
    p_gen.add_argument("--density", type=float, default=0.4)
    p_gen.add_argument("-o", "--output", metavar="PATH", default="-")
    p_gen.set_defaults(func=cmd_gen)

    p_val = sub.add_parser("validate", help="check an instance file")
    p_val.add_argument("instance")
    p_val.add_argument("--strict", action="store_true")
    p_val.set_defaults(func=cmd_validate)

    return parser


def main(argv: list[str] | None = None) -> int:
    _setup_logging()
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except SolverDisagreement as exc:
        print(f"internal disagreement: {exc}", file=sys.stderr)
        return EXIT_DISAGREE
    except (GameError, ParseError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
