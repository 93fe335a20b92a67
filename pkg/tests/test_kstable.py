import random

import pytest

from stableplan.errors import WindowExplosion
from stableplan.kstable import (
    WindowNode,
    build_window_graph,
    exhaustive_kstable_search,
    sjpa,
    verify_kstable,
    window_deviation_check,
    windows_at,
)
from stableplan.model import Configuration, JointOpenPlan
from stableplan.stability import verify_stable

from helpers import random_instances

C = Configuration


def test_window_check_sys_b_vs_sys_a(fx):
    b, _ = fx("sys_b")
    a, _ = fx("sys_a")
    w = (("go", "good"),)
    assert window_deviation_check(b.system, b.c0, w, 2)
    assert not window_deviation_check(a.system, a.c0, w, 2)


def test_window_check_singleton_availability(fx):
    inst, _ = fx("sys_c")
    assert window_deviation_check(inst.system, inst.c0, (("go", "good"),), 2)


def test_windows_respect_availability(fx):
    inst, _ = fx("sys_a")
    ws = list(windows_at(inst.system, inst.c0, 2))
    assert (("go", "bad"), ("go", "good")) in ws
    assert all(len(w) == 2 for w in ws)
    assert sorted(ws) == sorted([(("go", "good"), ("go", "good")),
                                 (("go", "bad"), ("go", "good")),
                                 (("go", "bad"), ("go", "bad"))])


def test_graph_edges_sys_b_and_sys_a(fx):
    b, _ = fx("sys_b")
    g = build_window_graph(b.system, b.c0, b.goal, 0)
    src = WindowNode(0, b.c0, (("go", "good"),))
    assert src in g.base
    a, _ = fx("sys_a")
    g = build_window_graph(a.system, a.c0, a.goal, 0)
    src = WindowNode(0, a.c0, (("go", "good"),))
    assert not g.passes[src]
    assert not g.edges.get(src)


def test_overlap_vacuous_at_k0(fx):
    inst, _ = fx("sys_d")
    g = build_window_graph(inst.system, inst.c0, inst.goal, 0)
    for node, targets in g.edges.items():
        for t in targets:
            assert t.time == node.time + 1
            assert len(node.window) == 1


def test_sjpa_fixture_examples(fx):
    b, _ = fx("sys_b")
    res = sjpa(b.system, b.c0, b.goal, 0)
    assert res.found and res.plan == JointOpenPlan(["go"], ["good"])
    a, _ = fx("sys_a")
    assert sjpa(a.system, a.c0, a.goal, 0).status == "NOT_FOUND"
    d, _ = fx("sys_d")
    assert sjpa(d.system, d.c0, d.goal, 0).status == "NOT_FOUND"
    res = sjpa(d.system, d.c0, d.goal, 1)
    assert res.found and res.plan == JointOpenPlan(["go", "go"], ["good", "good"])


def test_verify_kstable_fixtures(fx):
    b, pb = fx("sys_b")
    assert verify_kstable(b.system, b.c0, b.goal, pb, 0).stable
    d, pd = fx("sys_d")
    v = verify_kstable(d.system, d.c0, d.goal, pd, 0)
    assert (v.stable, v.reason, v.direction) == (False, "late-detection", 2)
    assert verify_kstable(d.system, d.c0, d.goal, pd, 1).stable
    c, pc = fx("sys_c")
    for k in range(4):
        assert verify_kstable(c.system, c.c0, c.goal, pc, k).stable


def test_window_explosion(fx):
    inst, _ = fx("sys_a")
    with pytest.raises(WindowExplosion):
        build_window_graph(inst.system, inst.c0, inst.goal, 3, max_windows=1)


def test_goal_at_start():
    from stableplan.model import GoalSet
    from stableplan.fixtures import load_fixture
    inst = load_fixture("sys_a")
    res = sjpa(inst.system, inst.c0, GoalSet([("u0", "*", "*")]), 0)
    assert res.found and len(res.plan) == 1


def test_sjpa_sound_small_sweep():
    rng = random.Random(11)
    for system, c0, goal, _ in random_instances(40, seed=12, max_states=3, max_env=2):
        k = rng.randint(0, 1)
        res = sjpa(system, c0, goal, k)
        if res.found:
            assert verify_kstable(system, c0, goal, res.plan, k).stable
            assert verify_stable(system, c0, goal, res.plan).stable


def test_exhaustive_agrees_on_fixtures(fx):
    for name in ("sys_a", "sys_b", "sys_c", "sys_d"):
        inst, _ = fx(name)
        for k in (0, 1):
            ref = exhaustive_kstable_search(inst.system, inst.c0, inst.goal, k, horizon=4)
            res = sjpa(inst.system, inst.c0, inst.goal, k, horizon=4)
            assert res.found == (ref is not None), (name, k)
