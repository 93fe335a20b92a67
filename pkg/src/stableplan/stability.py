"""Deviation detection for open joint plans under complete information.

The detector ``j`` notices a deviation the first time its own state differs
from the state it would have in the honest run.  A plan is unstable in the
direction of deviator ``i`` when some run, with ``j`` following its plan and
``i`` playing any available actions, keeps ``j``'s state nominal for all
``t`` steps and never visits the goal.

Marking works on time-stamped configurations.  ``Good[k]`` holds the
configurations reachable at time ``k`` that agree with the detector's nominal
state and from which some deviator action leads into ``Good[k+1]``; since
marking is stratified by time, one backward sweep reaches the fixpoint that
repeated marking rounds would produce.  The goal-avoiding path check is a
second backward sweep restricted to ``Good``.
"""

from __future__ import annotations

from .errors import BudgetExceeded, NotEfficient
from .model import (
    AGENTS,
    Configuration,
    GoalSet,
    JointOpenPlan,
    SystemModel,
    check_efficient,
    is_goal,
    other,
    replay,
    step,
    step_agent,
)
from .verdicts import Counterexample, StabilityVerdict

DEFAULT_ORACLE_BUDGET = 10**7


def _honest(system, c0, goal, plan):
    verdict = check_efficient(system, c0, goal, plan)
    if not verdict.efficient:
        raise NotEfficient(verdict.reason)
    return verdict.trajectory


def _layers(system, plan, c0, deviator, nominal):
    """Forward-reachable configurations per time step, with successor lists.

    Only configurations whose detector component is nominal are expanded;
    anything else is already detected and can never be marked good.
    """
    j = other(deviator)
    t = len(plan)
    det_actions = plan.of(j)
    layers = [{c0}]
    succ = []
    for k in range(t):
        nxt = set()
        edges = {}
        for c in layers[k]:
            if c.state_of(j) != nominal[k]:
                continue
            out = []
            for b in system.avail(deviator, c.state_of(deviator)):
                c2 = step_agent(system, c, j, det_actions[k], b)
                out.append((b, c2))
                nxt.add(c2)
            edges[c] = out
        layers.append(nxt)
        succ.append(edges)
    return layers, succ


def _mark(system, goal, plan, c0, deviator):
    traj = _honest(system, c0, goal, plan)
    j = other(deviator)
    nominal = traj.observations(j)
    t = len(plan)
    layers, succ = _layers(system, plan, c0, deviator, nominal)
    good = [set() for _ in range(t + 1)]
    good[t] = {c for c in layers[t] if c.state_of(j) == nominal[t]}
    for k in range(t - 1, -1, -1):
        for c, out in succ[k].items():
            if any(c2 in good[k + 1] for _, c2 in out):
                good[k].add(c)
    return good, succ, traj


def mark_good(system: SystemModel, goal: GoalSet, plan: JointOpenPlan,
              c0: Configuration, deviator: int) -> list:
    """Good[0..t] as frozensets of configurations (reachable ones only)."""
    good, _, _ = _mark(system, goal, plan, c0, deviator)
    return [frozenset(g) for g in good]


def verify_detection(system: SystemModel, c0: Configuration, goal: GoalSet,
                     plan: JointOpenPlan, deviator: int) -> StabilityVerdict:
    good, succ, _ = _mark(system, goal, plan, c0, deviator)
    t = len(plan)
    # No "action differs from the plan" constraint is needed below: a
    # goal-avoiding path made only of prescribed actions would be the honest
    # run, which visits the goal because the plan is efficient.
    bad = [set() for _ in range(t + 1)]
    bad[t] = {c for c in good[t] if not is_goal(goal, c)}
    for k in range(t - 1, -1, -1):
        for c in good[k]:
            if is_goal(goal, c):
                continue
            if any(c2 in bad[k + 1] for _, c2 in succ[k][c]):
                bad[k].add(c)
    if c0 not in bad[0]:
        return StabilityVerdict(True)

    j = other(deviator)
    actions = []
    c = c0
    for k in range(t):
        b, c = next((b, c2) for b, c2 in succ[k][c] if c2 in bad[k + 1])
        mine = plan.of(j)[k]
        actions.append((mine, b) if j == 1 else (b, mine))
    traj = replay(system, c0, actions, goal)
    cex = Counterexample(deviator, c0, tuple(actions), traj, witness=c0,
                         deviation_time=_first_difference(actions, plan))
    return StabilityVerdict(False, deviator, "undetected-deviation", cex)


def _first_difference(actions, plan):
    for u, (a, p) in enumerate(zip(actions, plan)):
        if tuple(a) != tuple(p):
            return u
    return None


def verify_stable(system: SystemModel, c0: Configuration, goal: GoalSet,
                  plan: JointOpenPlan) -> StabilityVerdict:
    eff = check_efficient(system, c0, goal, plan)
    if not eff.efficient:
        return StabilityVerdict(False, None, f"not-efficient:{eff.reason}")
    for deviator in AGENTS:
        verdict = verify_detection(system, c0, goal, plan, deviator)
        if not verdict.stable:
            return verdict
    return StabilityVerdict(True)


def brute_force_verify(system: SystemModel, c0: Configuration, goal: GoalSet,
                       plan: JointOpenPlan, deviator: int,
                       budget: int = DEFAULT_ORACLE_BUDGET) -> StabilityVerdict:
    """Exhaustive depth-first search over the deviator's action sequences.

    Independent of the marking code: it simulates each sequence directly and
    reports the first one that keeps the detector's state nominal throughout
    and never touches the goal.
    """
    j = other(deviator)
    t = len(plan)
    honest = [c0]
    for a1, a2 in plan:
        honest.append(step(system, honest[-1], a1, a2))
    nominal = [c.state_of(j) for c in honest]
    mine = plan.of(j)

    nodes = 0
    # stack entries: (time, configuration, actions so far)
    stack = [(0, c0, ())]
    while stack:
        k, c, played = stack.pop()
        nodes += 1
        if nodes > budget:
            raise BudgetExceeded(budget)
        if c.state_of(j) != nominal[k] or is_goal(goal, c):
            continue
        if k == t:
            actions = [(mine[u], b) if j == 1 else (b, mine[u]) for u, b in enumerate(played)]
            traj = replay(system, c0, actions, goal)
            cex = Counterexample(deviator, c0, tuple(actions), traj, witness=c0,
                                 deviation_time=_first_difference(actions, plan))
            return StabilityVerdict(False, deviator, "undetected-deviation", cex, checked=nodes)
        options = system.avail(deviator, c.state_of(deviator))
        for b in reversed(options):
            if j == 1:
                c2 = step(system, c, mine[k], b)
            else:
                c2 = step(system, c, b, mine[k])
            stack.append((k + 1, c2, played + (b,)))
    return StabilityVerdict(True, checked=nodes)


def counterexample_is_valid(system: SystemModel, goal: GoalSet, plan: JointOpenPlan,
                            cex: Counterexample) -> bool:
    """Replay check: detector stays nominal, deviator only, goal never visited."""
    j = other(cex.deviator)
    try:
        traj = replay(system, cex.start, cex.actions, goal)
        honest = replay(system, cex.start, plan, goal)
    except Exception:
        return False
    if len(cex.actions) != len(plan) or traj.configs != cex.trajectory.configs:
        return False
    if any(a[j - 1] != p[j - 1] for a, p in zip(cex.actions, plan)):
        return False
    if traj.observations(j) != honest.observations(j):
        return False
    return traj.goal_visited is None
