import json
import re
import subprocess
import sys
from pathlib import Path

import pytest

from rsynth.cli import main
from rsynth.fileformat import (
    ParseError,
    parse_instance_text,
    format_instance,
    witness_from_json,
)
from rsynth.gen import generate_instance_text
from rsynth.synthesis import check_solution

REPO = Path(__file__).resolve().parent.parent
FIG1 = REPO / "instances" / "figure1.game"


def run_cli(args, capsys):
    code = main([str(a) for a in args])
    out, err = capsys.readouterr()
    return code, out, err


def test_solve_figure1_yes(capsys):
    code, out, _ = run_cli(["solve", FIG1], capsys)
    assert code == 0
    doc = json.loads(out)
    assert doc["answer"] == "YES"
    assert doc["witness"] is not None
    assert doc["stats"]["objective_class"] == "reach"


def test_solve_unreachable_no(tmp_path, capsys):
    text = generate_instance_text(2, 1, 2, "reach", seed=5)
    # single agent, target never entered: make the target unreachable
    path = tmp_path / "unreal.game"
    path.write_text(
        "agents 1\nactions 0 x y\nstates u0 u1\ninitial u0\n"
        "objective reach\ntarget 0 u1\n"
        "trans u0 (*) u0\ntrans u1 (*) u1\n"
    )
    code, out, _ = run_cli(["solve", path], capsys)
    assert code == 1
    assert json.loads(out)["answer"] == "NO"
    assert json.loads(out)["witness"] is None


def test_solve_reports_input_errors(tmp_path, capsys):
    path = tmp_path / "broken.game"
    path.write_text("agents 1\nactions 0 x\nstates u0\ninitial u0\nobjective reach\n")
    code, _, err = run_cli(["solve", path], capsys)
    assert code == 2
    assert "objective" in err or "error" in err


def test_solve_both_and_oracle_agree_on_figure1(capsys):
    code, out, _ = run_cli(["solve", FIG1, "--solver", "both", "--oracle"], capsys)
    assert code == 0
    assert json.loads(out)["stats"]["oracle"] == "agree"


def test_witness_round_trip(tmp_path, capsys):
    target = tmp_path / "witness.json"
    code, _, _ = run_cli(["solve", FIG1, "--emit-strategy", target], capsys)
    assert code == 0
    doc = json.loads(target.read_text())
    g, objs = parse_instance_text(FIG1.read_text())
    sigma0 = witness_from_json(doc, g)
    assert check_solution(g, objs, sigma0).is_valid


def test_emitted_strategy_plays_r_at_s0_and_s1(tmp_path, capsys):
    target = tmp_path / "witness.json"
    run_cli(["solve", FIG1, "--emit-strategy", target], capsys)
    doc = json.loads(target.read_text())
    for node in doc["nodes"]:
        if node["state"] in ("s0", "s1"):
            assert node["action"] == "r"


def test_result_document_deterministic(capsys):
    code1, out1, _ = run_cli(["solve", FIG1], capsys)
    code2, out2, _ = run_cli(["solve", FIG1], capsys)
    doc1, doc2 = json.loads(out1), json.loads(out2)
    doc1["stats"].pop("wall_time_s")
    doc2["stats"].pop("wall_time_s")
    assert doc1 == doc2


def test_gen_deterministic_bytes(capsys):
    a = generate_instance_text(3, 2, 2, "reach", seed=1)
    b = generate_instance_text(3, 2, 2, "reach", seed=1)
    assert a == b
    c = generate_instance_text(3, 2, 2, "reach", seed=2)
    assert a != c


def test_gen_cli_writes_parseable_instances(tmp_path, capsys):
    out_path = tmp_path / "inst.game"
    code, _, _ = run_cli(
        [
            "gen",
            "--states",
            3,
            "--agents",
            2,
            "--actions",
            2,
            "--class",
            "buchi",
            "--seed",
            9,
            "-o",
            out_path,
        ],
        capsys,
    )
    assert code == 0
    g, objs = parse_instance_text(out_path.read_text())
    assert objs.class_tag == "buchi"
    code, out, _ = run_cli(["validate", out_path], capsys)
    assert code == 0 and out.strip() == "ok"


def test_gen_rejects_infeasible_shape(capsys):
    code, _, err = run_cli(
        ["gen", "--states", 0, "--agents", 1, "--actions", 1, "--class", "reach", "--seed", 1],
        capsys,
    )
    assert code == 2


def test_validate_figure1(capsys):
    code, out, _ = run_cli(["validate", FIG1], capsys)
    assert code == 0
    assert out.strip() == "ok"


def test_validate_reports_totality_defect(tmp_path, capsys):
    path = tmp_path / "partial.game"
    path.write_text(
        "agents 1\nactions 0 x y\nstates u0\ninitial u0\n"
        "objective reach\ntarget 0\n"
        "trans u0 (x) u0\n"
    )
    code, _, err = run_cli(["validate", path], capsys)
    assert code == 2
    assert "totality" in err


def test_validate_strict_flags_unused_actions(tmp_path, capsys):
    path = tmp_path / "loose.game"
    path.write_text(
        "agents 1\nactions 0 x y\nstates u0 u1\ninitial u0\n"
        "objective reach\ntarget 0\n"
        "trans u0 (*) u0\ntrans u1 (*) u1\n"
    )
    code, out, _ = run_cli(["validate", path], capsys)
    assert code == 0
    code, out, _ = run_cli(["validate", path, "--strict"], capsys)
    assert code == 2
    assert "unused-action" in out and "unreachable-state" in out


def test_determinism_conflict_detected(tmp_path):
    text = (
        "agents 1\nactions 0 x y\nstates u0 u1\ninitial u0\n"
        "objective reach\ntarget 0 u1\n"
        "trans u0 (*) u0\ntrans u0 (x) u1\ntrans u1 (*) u1\n"
    )
    with pytest.raises(ParseError) as exc:
        parse_instance_text(text)
    assert exc.value.code == "determinism"


def test_wildcard_overlap_with_same_target_is_fine():
    text = (
        "agents 1\nactions 0 x y\nstates u0\ninitial u0\n"
        "objective reach\ntarget 0\n"
        "trans u0 (*) u0\ntrans u0 (x) u0\n"
    )
    g, _ = parse_instance_text(text)
    assert g.table[("u0", ("x",))] == "u0"


def test_muller_formula_parsing_in_instance():
    text = (
        "agents 1\nactions 0 x\nstates u0 u1\ninitial u0\n"
        "objective muller\nmuller 0 u1 & !u0\n"
        "trans u0 (*) u1\ntrans u1 (*) u1\n"
    )
    g, objs = parse_instance_text(text)
    assert objs.class_tag == "muller"
    assert objs[0].formula.holds(frozenset({"u1"}))
    assert not objs[0].formula.holds(frozenset({"u0", "u1"}))


def test_format_parse_round_trip(fig1, fig1_reach):
    text = format_instance(fig1, fig1_reach)
    g, objs = parse_instance_text(text)
    assert g.states == fig1.states
    assert g.table == dict(fig1.table)
    assert objs == fig1_reach


DOT_EDGE = re.compile(r'^\s*("?[^"]*"?|\w+) -> ')


def test_dot_outputs_are_wellformed(tmp_path, capsys):
    game_dot = tmp_path / "game.dot"
    arena_dot = tmp_path / "arena.dot"
    code, _, _ = run_cli(
        ["solve", FIG1, "--dot-game", game_dot, "--dot-arena", arena_dot], capsys
    )
    assert code == 0
    for path in (game_dot, arena_dot):
        text = path.read_text()
        assert text.startswith("digraph ")
        assert text.rstrip().endswith("}")
        assert text.count("{") == text.count("}")
        assert any(DOT_EDGE.match(line) for line in text.splitlines())
        # quoted labels stay balanced
        for line in text.splitlines():
            assert line.count('"') % 2 == 0


def test_cli_as_subprocess():
    proc = subprocess.run(
        [sys.executable, "-m", "rsynth.cli", "solve", str(FIG1)],
        capture_output=True,
        text=True,
        cwd=REPO,
    )
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["answer"] == "YES"
