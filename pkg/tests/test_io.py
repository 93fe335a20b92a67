import random

import pytest

from stableplan.errors import DanglingNodeRef, LengthMismatch, ParseError
from stableplan.fixtures import NAMES, fixture_text
from stableplan.generators import Cnf, RandomSizes, gen_random, random_cnf, reduce_3sat
from stableplan.incomplete import lift_open_plan
from stableplan.io import (
    SystemDefects,
    format_dimacs,
    parse_cplan,
    parse_dimacs,
    parse_plan,
    parse_system,
    serialize_cplan,
    serialize_instance,
    serialize_plan,
    serialize_system,
)
from stableplan.model import JointOpenPlan, validate_system

SYS_A = fixture_text("sys_a.sys")


def test_fixtures_parse_and_validate():
    for name in NAMES:
        inst = parse_system(fixture_text(f"{name}.sys"))
        assert validate_system(inst.system) == []
        assert inst.inits


def test_conflicting_trans_names_both_lines():
    lines = SYS_A.splitlines()
    idx = next(i for i, l in enumerate(lines) if l.startswith("trans u0 v0 e go good"))
    text = "\n".join(lines + ["trans u0 v0 e go good -> u0 v0 e"])
    with pytest.raises(ParseError) as err:
        parse_system(text)
    assert f"lines {idx + 1} and {len(lines) + 1}" in str(err.value)


def test_duplicate_identical_trans_is_harmless():
    line = next(l for l in SYS_A.splitlines() if l.startswith("trans"))
    inst = parse_system(SYS_A + line + "\n")
    assert inst.system.n_configs == 4


def test_missing_row_is_model_defect():
    text = "\n".join(l for l in SYS_A.splitlines() if not l.startswith("trans u0 v0 e go good"))
    with pytest.raises(SystemDefects) as err:
        parse_system(text)
    assert err.value.defects[0].kind == "MissingTransition"


def test_parse_errors_carry_line_numbers():
    with pytest.raises(ParseError) as err:
        parse_system("agent1 states: u0\nbogus line\n")
    assert err.value.line == 2
    with pytest.raises(ParseError):
        parse_system("agent1 states: u$\n")
    with pytest.raises(ParseError):
        parse_system("agent1 states: u0\n")


def test_undeclared_goal_state():
    with pytest.raises(SystemDefects):
        parse_system(SYS_A + "goal u7 * *\n")


def test_verdict_line_ignored():
    assert parse_system("verdict: GENERATED\n" + SYS_A).system == parse_system(SYS_A).system


def test_reduction_round_trip():
    rng = random.Random(3)
    for _ in range(10):
        cnf = random_cnf(rng, rng.randint(1, 5), rng.randint(1, 6))
        system, c0, goal = reduce_3sat(cnf)
        inst = parse_system(serialize_system(system, [c0], goal))
        assert inst.system == system
        assert inst.inits == (c0,) and inst.goal == goal


def test_random_round_trip():
    for seed in range(20):
        system, c0, goal = gen_random(seed, RandomSizes(3, 2, 2, 2, 3, goals=2,
                                                        with_null=seed % 2 == 0))
        text = serialize_system(system, [c0], goal)
        inst = parse_system(text)
        assert serialize_instance(inst) == text


def test_plan_round_trip_and_mismatch():
    plan = JointOpenPlan(["a", "pos_1"], ["d", "null"])
    assert parse_plan(serialize_plan(plan)) == plan
    with pytest.raises(LengthMismatch):
        parse_plan("agent1: go go\nagent2: good\n")
    with pytest.raises(ParseError):
        parse_plan("agent1: go\n")


def test_cplan_round_trip_and_dangling():
    inst = parse_system(SYS_A)
    chain = lift_open_plan(inst.system, ["go", "go"], 1)
    text = serialize_cplan(chain)
    assert serialize_cplan(parse_cplan(text)) == text
    with pytest.raises(DanglingNodeRef):
        parse_cplan("root n0\nnode n0: action go; on u1 -> n7\n")


def test_dimacs():
    cnf = parse_dimacs("c comment\np cnf 3 2\n1 -2 0\n3\n0\n")
    assert cnf == Cnf(3, [(1, -2, -2), (3, 3, 3)])
    assert parse_dimacs(format_dimacs(cnf)) == cnf
    for bad in ("1 2 0\n", "p cnf 2 1\n1 3 0\n", "p cnf 2 2\n1 0\n", "p cnf 2 1\n1 2\n",
                "p cnf 4 1\n1 2 3 4 0\n"):
        with pytest.raises(ParseError):
            parse_dimacs(bad)
