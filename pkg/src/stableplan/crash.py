"""Stability against crash failures.

A crashed agent plays ``null`` from its crash time onwards.  The run lasts
until the healthy agent's plan ends (and the crasher has either crashed or
halted), so crashing after the crasher's own plan end changes nothing.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import NotEfficient
from .incomplete import Execution, honest_runs, verify_ii_efficiency
from .model import AGENTS, Configuration, GoalSet, SystemModel, Trajectory, first_goal_index, \
    is_goal, other
from .verdicts import Counterexample, StabilityVerdict


@dataclass(frozen=True)
class CrashScenario:
    crasher: int
    time: int

    def __post_init__(self):
        if self.crasher not in AGENTS or self.time < 0:
            raise ValueError(f"invalid crash scenario {self}")


def crash_run(system: SystemModel, c0: Configuration, plan1, plan2,
              scenario: CrashScenario, goal: GoalSet = None) -> Trajectory:
    run = Execution(system, c0, plan1, plan2, crash=(scenario.crasher, scenario.time))
    configs, actions = [c0], []
    while not run.finished:
        joint, nxt = run.peek()
        run.commit(nxt)
        configs.append(nxt)
        actions.append(joint)
    return Trajectory(tuple(configs), tuple(actions), first_goal_index(goal, configs))


def verify_crash_stability(system: SystemModel, c0s, goal: GoalSet, plan1, plan2
                           ) -> StabilityVerdict:
    """Check every (crasher, crash time, initial configuration) scenario.

    A crash run is undetected while the healthy agent's observations still
    match at least one padded honest run that starts from the same detector
    state; it is a counterexample if it ends undetected without visiting
    the goal.
    """
    eff = verify_ii_efficiency(system, c0s, goal, plan1, plan2)
    if not eff.efficient:
        raise NotEfficient(f"{eff.reason} from {eff.initial}")
    runs = honest_runs(system, c0s, plan1, plan2, goal)
    horizon = len(next(iter(runs.values())))
    checked = 0
    for crasher in AGENTS:
        j = other(crasher)
        for m in range(horizon):
            for actual in runs:
                checked += 1
                witnesses = {w: h.observations(j) for w, h in runs.items()
                             if w.state_of(j) == actual.state_of(j)}
                run = Execution(system, actual, plan1, plan2, crash=(crasher, m))
                configs, actions = [actual], []
                reached = is_goal(goal, actual)
                while witnesses and not run.finished:
                    joint, nxt = run.peek()
                    u = len(actions) + 1
                    witnesses = {w: o for w, o in witnesses.items()
                                 if u < len(o) and o[u] == nxt.state_of(j)}
                    configs.append(nxt)
                    actions.append(joint)
                    reached = reached or is_goal(goal, nxt)
                    if not witnesses:
                        break
                    run.commit(nxt)
                if witnesses and not reached:
                    traj = Trajectory(tuple(configs), tuple(actions), None)
                    cex = Counterexample(crasher, actual, tuple(actions), traj,
                                         witness=next(iter(witnesses)), crash_time=m)
                    return StabilityVerdict(False, crasher, "undetected-crash", cex,
                                            checked=checked)
    return StabilityVerdict(True, checked=checked)
