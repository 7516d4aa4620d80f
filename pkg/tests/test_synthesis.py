import random

import pytest

from rsynth.arena import LAYER_A, LAYER_C
from rsynth.game import GameError, History, ObjectiveProfile, Reach
from rsynth.gen import generate_instance
from rsynth.reductions import EVE, build_parity_arena
from rsynth.solvers import zielonka_solve
from rsynth.synthesis import (
    EveStrategy,
    Sigma0,
    check_solution,
    derive_sigma0,
    deviator,
    lift_history,
    memoryless_candidates,
    ncrsp_solve,
    project_history,
    root,
    simplify_witness,
)

from conftest import make_game, objective_profile

PAPER_MOVES = {"s0": "r", "s1": "r", "s2": "l", "T01": "l", "T2": "l"}
PRESCRIPTIONS = {1: "a", 2: "b"}  # winning deviation actions per agent


@pytest.fixture(scope="module")
def fig1_arena(fig1, fig1_reach):
    return build_parity_arena(fig1, fig1_reach)


@pytest.fixture(scope="module")
def hand_sigma_e(fig1, fig1_reach, fig1_arena):
    """Paper-style Eve strategy: steer r, r, l; prescribe a/b for claimed
    agents; claim agent 1's deviation exactly at s1 rounds."""
    arena = fig1_arena
    choice = {}
    for v in range(len(arena)):
        if arena.owner[v] != EVE:
            continue
        base = arena.nodes[v].base
        if base.layer == LAYER_A:
            move = [PAPER_MOVES[base.s]]
            for i in fig1.env_agents:
                move.append(PRESCRIPTIONS[i] if i in base.w else None)
            choice[v] = arena.step(v, tuple(move))
        elif base.layer == LAYER_C:
            move = []
            for i in fig1.env_agents:
                if i in base.w or i in base.d:
                    move.append(None)
                elif i == 1 and base.s == "s1":
                    move.append("a")
                else:
                    move.append(None)
            choice[v] = arena.step(v, tuple(move))
    return EveStrategy(arena, choice, frozenset(range(len(arena))))


def test_lift_base_case(hand_sigma_e, fig1):
    h = History(("s0",), ())
    tilde = lift_history(hand_sigma_e, h)
    assert tilde.ids == (hand_sigma_e.arena.initial,)
    node = hand_sigma_e.arena.nodes[tilde.ids[0]]
    assert node.base.s == "s0" and node.base.layer == LAYER_A


def test_lift_reaches_state_of_history(hand_sigma_e, fig1):
    h = History(("s0", "s1", "s2"), (("r", "b", "b"), ("r", "b", "b")))
    h.validate(fig1)
    tilde = lift_history(hand_sigma_e, h)
    last = hand_sigma_e.arena.nodes[tilde.ids[-1]]
    assert last.base.layer == LAYER_A and last.base.s == "s2"


def test_lift_projection_matches_history_states(hand_sigma_e, fig1):
    h = History(
        ("s0", "s1", "s2", "s0"),
        (("r", "b", "b"), ("r", "b", "b"), ("l", "b", "a")),
    )
    h.validate(fig1)
    tilde = lift_history(hand_sigma_e, h)
    arena = hand_sigma_e.arena
    a_states = [
        arena.nodes[v].base.s
        for v in tilde.ids
        if arena.nodes[v].base.layer == LAYER_A
    ]
    assert tuple(a_states) == h.states
    assert project_history(arena, tilde) == h


def test_lift_rejects_incompatible_history(hand_sigma_e, fig1):
    h = History(("s0", "s2"), (("l", "b", "b"),))  # strategy plays r at s0
    h.validate(fig1)
    with pytest.raises(GameError):
        lift_history(hand_sigma_e, h)


def test_project_base_case(hand_sigma_e):
    from rsynth.synthesis import ArenaHistory

    arena = hand_sigma_e.arena
    assert project_history(arena, ArenaHistory((arena.initial,), ())) == History(
        ("s0",), ()
    )


def test_derived_strategy_follows_paper_solution(hand_sigma_e, fig1):
    sigma0 = derive_sigma0(hand_sigma_e)
    assert sigma0.action_after(History(("s0",), ())) == "r"
    h2 = History(("s0", "s1", "s2"), (("r", "b", "b"), ("r", "b", "b")))
    assert sigma0.action_after(h2) == "l"
    h3 = h2.extend(("l", "b", "a"), "s0")
    assert sigma0.action_after(h3) == "r"


@pytest.mark.parametrize("seed", range(25))
def test_lift_project_roundtrip_random_histories(seed, fig1, fig1_reach, fig1_arena):
    win = zielonka_solve(fig1_arena)
    assert fig1_arena.initial in win.eve_nodes
    sigma_e = EveStrategy.from_win_region(fig1_arena, win)
    sigma0 = derive_sigma0(sigma_e)
    rng = random.Random(seed)
    h = History((fig1.initial,), ())
    m = sigma0.initial
    for _ in range(rng.randint(0, 12)):
        env = rng.choice(list(fig1.env_profiles()))
        prof = (sigma0.output[m],) + env
        h = h.extend(prof, fig1.table[(h.last_state, prof)])
        m = sigma0.delta[(m, env)]
    tilde = lift_history(sigma_e, h)
    assert project_history(fig1_arena, tilde) == h
    a_states = [
        fig1_arena.nodes[v].base.s
        for v in tilde.ids
        if fig1_arena.nodes[v].base.layer == LAYER_A
    ]
    assert tuple(a_states) == h.states


def memoryless(g, mapping):
    return Sigma0.memoryless(g, mapping)


@pytest.fixture(scope="module")
def paper_sigma0(fig1):
    return memoryless(fig1, PAPER_MOVES)


def test_deviator_finds_the_forced_win(fig1, fig1_reach, paper_sigma0):
    h = History(("s0", "s1"), (("r", "b", "b"),))
    assert deviator(fig1, fig1_reach, paper_sigma0, h, 1) == "a"


def test_deviator_needs_a_round(fig1, fig1_reach, paper_sigma0):
    assert deviator(fig1, fig1_reach, paper_sigma0, History(("s0",), ()), 1) is None


def test_deviator_rejects_agent_zero(fig1, fig1_reach, paper_sigma0):
    with pytest.raises(GameError):
        deviator(fig1, fig1_reach, paper_sigma0, History(("s0",), ()), 0)


def test_deviator_no_deviation_for_agent_two_at_start(fig1, fig1_reach, paper_sigma0):
    # swapping agent 2's opening action still lands in s1, from where the
    # coalition (agent 1) can rush to T01 and strand it
    h = History(("s0", "s1"), (("r", "b", "b"),))
    assert deviator(fig1, fig1_reach, paper_sigma0, h, 2) is None


def test_deviator_agent_two_wins_later(fig1, fig1_reach, paper_sigma0):
    # once at s2 with the strategy playing l, agent 2 forces its target
    h = History(("s0", "s1", "s2"), (("r", "b", "b"), ("r", "b", "b")))
    assert deviator(fig1, fig1_reach, paper_sigma0, h, 2) is not None


def test_root_is_shortest_prefix(fig1, fig1_reach, paper_sigma0):
    h = History(
        ("s0", "s1", "s2"), (("r", "b", "b"), ("r", "b", "b"))
    )
    r1 = root(fig1, fig1_reach, paper_sigma0, h, 1)
    assert r1 == History(("s0", "s1"), (("r", "b", "b"),))
    r2 = root(fig1, fig1_reach, paper_sigma0, h, 2)
    assert r2 == h  # agent 2's first deviation point is the full history


def test_root_none_when_never_deviating(fig1, paper_sigma0):
    # no agent can force the unreachable target set
    objs = ObjectiveProfile(
        (
            Reach(frozenset({"T01"})),
            Reach(frozenset()),
            Reach(frozenset()),
        )
    )
    h = History(("s0", "s1"), (("r", "b", "b"),))
    assert root(fig1, objs, paper_sigma0, h, 1) is None


def test_check_solution_accepts_paper_strategy(fig1, fig1_reach, paper_sigma0):
    assert check_solution(fig1, fig1_reach, paper_sigma0).is_valid


def test_check_solution_rejects_left_opening(fig1, fig1_reach):
    bad = memoryless(fig1, {"s0": "l", "s1": "r", "s2": "r", "T01": "l", "T2": "l"})
    report = check_solution(fig1, fig1_reach, bad)
    assert not report.is_valid
    cx = report.counterexample
    assert cx is not None
    states = [s for s, _ in cx.lasso.prefix] + [s for s, _ in cx.lasso.loop]
    assert states == ["s0", "s2"]
    assert cx.payoffs[0] == 0


def test_check_solution_trivial_objective_always_valid(fig1):
    objs = ObjectiveProfile(
        (
            Reach(frozenset(fig1.states)),
            Reach(frozenset({"T01"})),
            Reach(frozenset({"T2"})),
        )
    )
    for mapping in (
        PAPER_MOVES,
        {"s0": "l", "s1": "l", "s2": "r", "T01": "l", "T2": "l"},
    ):
        assert check_solution(fig1, objs, memoryless(fig1, mapping)).is_valid


def test_ncrsp_solve_fig1(fig1, fig1_reach):
    answer, witness = ncrsp_solve(fig1, fig1_reach)
    assert answer is True
    assert witness is not None
    assert check_solution(fig1, fig1_reach, witness).is_valid


def test_ncrsp_witness_simplifies_to_paper_strategy(fig1, fig1_reach):
    _, witness = ncrsp_solve(fig1, fig1_reach)
    simple = simplify_witness(fig1, fig1_reach, witness)
    # state-based witness found, playing r at s0 and s1
    assert set(simple.output) == set(fig1.states)
    assert simple.output["s0"] == "r" and simple.output["s1"] == "r"
    assert check_solution(fig1, fig1_reach, simple).is_valid


def test_unreachable_target_single_agent_is_no():
    g = make_game(
        ["u0", "u1"],
        "u0",
        [("x", "y")],
        [("u0", ("*",), "u0"), ("u1", ("*",), "u1")],
    )
    objs = ObjectiveProfile((Reach(frozenset({"u1"})),))
    answer, witness = ncrsp_solve(g, objs)
    assert answer is False and witness is None


def test_solver_both_mode_agrees(fig1, fig1_reach):
    answer, _ = ncrsp_solve(fig1, fig1_reach, solver="both")
    assert answer is True


def test_parity_profile_is_encoded_transparently(fig1):
    from rsynth.game import Parity

    pri = {s: (0 if s == "T01" else 1) for s in fig1.states}
    objs = ObjectiveProfile((Parity(pri), Parity(pri), Parity(pri)))
    answer, witness = ncrsp_solve(fig1, objs)
    assert answer in (True, False)
    if answer:
        assert witness is not None


@pytest.mark.parametrize("cls", ["reach", "safe", "buchi", "cobuchi"])
@pytest.mark.parametrize("seed", range(6))
def test_yes_answers_carry_valid_witnesses(cls, seed):
    g, objs = generate_instance(3, 2 + seed % 2, 2, cls, 4321 + seed)
    answer, witness = ncrsp_solve(g, objs)
    if answer:
        assert check_solution(g, objs, witness).is_valid


@pytest.mark.parametrize("cls", ["reach", "buchi"])
@pytest.mark.parametrize("seed", range(4))
def test_no_answers_admit_no_memoryless_solution(cls, seed):
    g, objs = generate_instance(3, 2, 2, cls, 8765 + seed)
    answer, _ = ncrsp_solve(g, objs)
    if not answer:
        for cand in memoryless_candidates(g):
            assert not check_solution(g, objs, cand).is_valid


@pytest.mark.parametrize("seed", range(5))
def test_muller_encoding_agrees_with_buchi_pipeline(seed):
    g, objs = generate_instance(3, 2, 2, "buchi", 999 + seed)
    direct, _ = ncrsp_solve(g, objs, want_witness=False)
    encoded, _ = ncrsp_solve(g, objs.as_muller(g.states), want_witness=False)
    assert direct == encoded


def test_sigma0_replay_checks_compatibility(fig1, paper_sigma0):
    with pytest.raises(GameError):
        paper_sigma0.memory_after(History(("s0", "s2"), (("l", "a", "a"),)))


def test_memoryless_candidates_are_exhaustive(fig1):
    cands = list(memoryless_candidates(fig1))
    assert len(cands) == 2 ** len(fig1.states)
    outputs = {tuple(c.output[s] for s in fig1.states) for c in cands}
    assert len(outputs) == len(cands)
