"""Exact stable-plan synthesis by iterative deepening over joint plans.

Each search node carries the honest configuration, whether the goal has been
visited, and, per deviator, the set of configurations reachable by runs that
are still undetected and have avoided the goal.  A prefix is a stable plan
exactly when the goal was visited and both sets are empty, so candidates are
checked incrementally instead of re-verifying every sequence from scratch.
"""

from __future__ import annotations

import time
from collections import deque
from dataclasses import dataclass
from typing import Optional

from .model import Configuration, GoalSet, JointOpenPlan, SystemModel, is_goal, step
from .stability import verify_stable
from .verdicts import BUDGET_EXCEEDED, FOUND, NOT_FOUND, SynthResult


@dataclass(frozen=True)
class SynthBudget:
    max_len: Optional[int] = None  # defaults to |C|
    node_budget: int = 10**7
    time_budget: Optional[float] = None
    # Skip (depth, search state) pairs already refuted in the current
    # iteration.  Verdict-preserving: the state fixes every completion's fate.
    memo: bool = False

    def __post_init__(self):
        if self.max_len is not None and self.max_len < 1:
            raise ValueError("max_len must be at least 1")


def goal_distances(system: SystemModel, goal: GoalSet) -> dict:
    """Fewest joint steps from each configuration to the goal (absent = never)."""
    preds = {}
    dist = {}
    for key, image in system.transition.items():
        preds.setdefault(image, []).append(key)
    queue = deque()
    for c in system.configurations():
        if is_goal(goal, c):
            dist[c] = 0
            queue.append(c)
    while queue:
        c = queue.popleft()
        for s1, s2, b, _, _ in preds.get(c, ()):
            p = Configuration(s1, s2, b)
            if p not in dist:
                dist[p] = dist[c] + 1
                queue.append(p)
    return dist


class _Out(Exception):
    pass


def _advance(system, goal, undetected, detector_action, detector, nominal_state):
    deviator = 3 - detector
    out = set()
    for c in undetected:
        for b in system.avail(deviator, c.state_of(deviator)):
            c2 = step(system, c, detector_action, b) if detector == 1 else step(
                system, c, b, detector_action)
            if c2.state_of(detector) == nominal_state and not is_goal(goal, c2):
                out.add(c2)
    return frozenset(out)


def sjpp_solve(system: SystemModel, c0: Configuration, goal: GoalSet,
               budget: SynthBudget = SynthBudget()) -> SynthResult:
    max_len = system.n_configs if budget.max_len is None else min(budget.max_len,
                                                                  system.n_configs)
    dist = goal_distances(system, goal)
    far = max_len + 1
    start = time.monotonic()
    nodes = 0
    visited0 = is_goal(goal, c0)
    u0 = frozenset() if visited0 else frozenset([c0])

    for length in range(1, max_len + 1):
        refuted = set()

        def search(depth, h, visited, und1, und2):
            nonlocal nodes
            nodes += 1
            if nodes > budget.node_budget:
                raise _Out()
            if budget.time_budget is not None and nodes % 1024 == 0 and \
                    time.monotonic() - start > budget.time_budget:
                raise _Out()
            if depth == length:
                return [] if visited and not und1 and not und2 else None
            if not visited and dist.get(h, far) > length - depth:
                return None
            key = (depth, h, visited, und1, und2)
            if budget.memo and key in refuted:
                return None
            for a1, a2 in system.joint_actions(h):
                h2 = step(system, h, a1, a2)
                n1 = _advance(system, goal, und1, a2, 2, h2.s2)  # agent 1 deviates
                n2 = _advance(system, goal, und2, a1, 1, h2.s1)  # agent 2 deviates
                rest = search(depth + 1, h2, visited or is_goal(goal, h2), n1, n2)
                if rest is not None:
                    return [(a1, a2)] + rest
            if budget.memo:
                refuted.add(key)
            return None

        try:
            joint = search(0, c0, visited0, u0, u0)
        except _Out:
            return SynthResult(BUDGET_EXCEEDED, nodes=nodes, stats={"length": length})
        if joint is not None:
            plan = JointOpenPlan.from_joint(joint)
            assert verify_stable(system, c0, goal, plan).stable, "synthesized plan failed verification"
            return SynthResult(FOUND, plan, nodes=nodes, stats={"length": length})
    return SynthResult(NOT_FOUND, nodes=nodes, stats={"length": max_len})

