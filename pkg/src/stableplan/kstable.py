"""k-stable plans: detection within k+1 steps of a deviation.

Synthesis searches a layered graph whose nodes are ``(time, configuration,
window)`` where a window is the next ``k+1`` joint actions.  Consecutive
nodes must agree on their overlapping actions, and every node on a chain
must pass the first-step deviation check for both agents.  The extracted
plan is the first action of each chain node followed by the rest of the last
node's window as a detection tail.

Near the horizon a window is cut to the steps that remain (``horizon - time``)
so that the graph search and :func:`verify_kstable`, which clamps detection
deadlines to the plan end, decide the same question.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple, Optional

from .errors import WindowExplosion
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
)
from .verdicts import FOUND, NOT_FOUND, Counterexample, StabilityVerdict, SynthResult

DEFAULT_MAX_WINDOWS = 10**5


def _run(system, c, window):
    configs = [c]
    for a1, a2 in window:
        configs.append(step(system, configs[-1], a1, a2))
    return configs


def _escaping_deviation(system, start, window, deviator):
    """First deviator sequence over ``window`` that escapes detection.

    A sequence counts when its step-1 configuration differs from the nominal
    one and the detector's state equals its nominal state at every step of
    the window.  Returns the deviator's actions, or ``None``.
    """
    j = other(deviator)
    nominal = _run(system, start, window)
    nominal_j = [c.state_of(j) for c in nominal]
    length = len(window)

    def extend(k, c, played):
        if k == length:
            return played
        mine = window[k][j - 1]
        for b in system.avail(deviator, c.state_of(deviator)):
            c2 = step(system, c, mine, b) if j == 1 else step(system, c, b, mine)
            if k == 0 and c2 == nominal[1]:
                continue
            if c2.state_of(j) != nominal_j[k + 1]:
                continue
            found = extend(k + 1, c2, played + (b,))
            if found is not None:
                return found
        return None

    return extend(0, start, ())


def window_deviation_check(system: SystemModel, config: Configuration, window,
                           deviator: int) -> bool:
    """True iff every first-step deviation by ``deviator`` is detected in the window."""
    return _escaping_deviation(system, config, tuple(window), deviator) is None


def windows_at(system: SystemModel, c: Configuration, length: int):
    """All joint action sequences of ``length`` available along their own run."""
    if length == 0:
        yield ()
        return
    for a1, a2 in system.joint_actions(c):
        nxt = step(system, c, a1, a2)
        for rest in windows_at(system, nxt, length - 1):
            yield ((a1, a2),) + rest


class WindowNode(NamedTuple):
    time: int
    config: Configuration
    window: tuple


@dataclass
class WindowGraph:
    k: int
    horizon: int
    layers: list  # layers[t] = list of WindowNode at time t
    edges: dict  # WindowNode -> list of WindowNode
    passes: dict  # WindowNode -> bool (both deviators detected)
    base: set = field(default_factory=set)  # first action reaches the goal

    @property
    def nodes(self):
        return [n for layer in self.layers for n in layer]


def _window_count_bound(system, k):
    per_step = max((len(system.avail1[s1]) * len(system.avail2[s2])
                    for s1 in system.states1 for s2 in system.states2), default=1)
    return per_step ** (k + 1)


def build_window_graph(system: SystemModel, c0: Configuration, goal: GoalSet, k: int,
                       horizon: Optional[int] = None,
                       max_windows: int = DEFAULT_MAX_WINDOWS) -> WindowGraph:
    if k < 0:
        raise ValueError("k must be non-negative")
    horizon = system.n_configs if horizon is None else min(horizon, system.n_configs)
    bound = _window_count_bound(system, k)
    if bound > max_windows:
        raise WindowExplosion(bound, max_windows)

    window_cache = {}
    check_cache = {}

    def windows(c, length):
        key = (c, length)
        if key not in window_cache:
            window_cache[key] = tuple(windows_at(system, c, length))
        return window_cache[key]

    def passes(c, w):
        key = (c, w)
        if key not in check_cache:
            check_cache[key] = all(window_deviation_check(system, c, w, i) for i in AGENTS)
        return check_cache[key]

    layers = [[WindowNode(0, c0, w) for w in windows(c0, min(k + 1, horizon))]]
    edges, ok, base = {}, {}, set()
    for t in range(horizon):
        nxt = {}
        for node in layers[t]:
            ok[node] = passes(node.config, node.window)
            edges[node] = []
            if not ok[node]:
                continue
            c2 = step(system, node.config, *node.window[0])
            if is_goal(goal, c2):
                base.add(node)
            if t + 1 >= horizon:
                continue
            length = min(k + 1, horizon - t - 1)
            shared = node.window[1:]
            for w2 in windows(c2, length):
                if w2[:len(shared)] == shared:
                    target = WindowNode(t + 1, c2, w2)
                    nxt.setdefault(target, None)
                    edges[node].append(target)
        if t + 1 < horizon:
            layers.append(list(nxt))
    return WindowGraph(k, horizon, layers, edges, ok, base)


def sjpa(system: SystemModel, c0: Configuration, goal: GoalSet, k: int,
         horizon: Optional[int] = None, max_windows: int = DEFAULT_MAX_WINDOWS) -> SynthResult:
    """Find a k-stable plan by backward goodness propagation over the window graph."""
    if is_goal(goal, c0):
        # Every deviation happens after the goal was seen; any single step will do.
        a = next(system.joint_actions(c0))
        return SynthResult(FOUND, JointOpenPlan.from_joint([a]))

    graph = build_window_graph(system, c0, goal, k, horizon, max_windows)
    dist = {}  # good node -> chain nodes still needed after it
    for layer in reversed(graph.layers):
        for node in layer:
            if not graph.passes[node]:
                continue
            if node in graph.base:
                dist[node] = 0
                continue
            best = min((dist[n2] for n2 in graph.edges[node] if n2 in dist), default=None)
            if best is not None:
                dist[node] = best + 1
    n_nodes = sum(len(layer) for layer in graph.layers)
    starts = [n for n in graph.layers[0] if n in dist]
    if not starts:
        return SynthResult(NOT_FOUND, nodes=n_nodes)

    node = min(starts, key=lambda n: dist[n])
    joint = []
    while dist[node] > 0:
        joint.append(node.window[0])
        node = min((n2 for n2 in graph.edges[node] if n2 in dist), key=lambda n: dist[n])
    joint.extend(node.window)
    return SynthResult(FOUND, JointOpenPlan.from_joint(joint), nodes=n_nodes)


def verify_kstable(system: SystemModel, c0: Configuration, goal: GoalSet,
                   plan: JointOpenPlan, k: int) -> StabilityVerdict:
    eff = check_efficient(system, c0, goal, plan)
    if not eff.efficient:
        return StabilityVerdict(False, None, f"not-efficient:{eff.reason}")
    traj = eff.trajectory
    t = len(plan)
    joint = tuple(plan)
    checked = 0
    # deviations starting once the goal has been visited are exempt
    for deviator in AGENTS:
        for m in range(traj.goal_visited):
            window = joint[m:min(m + k + 1, t)]
            checked += 1
            escape = _escaping_deviation(system, traj.configs[m], window, deviator)
            if escape is None:
                continue
            j = other(deviator)
            actions = list(joint[:m])
            for (a1, a2), b in zip(window, escape):
                mine = (a1, a2)[j - 1]
                actions.append((mine, b) if j == 1 else (b, mine))
            run = replay(system, c0, actions, goal)
            cex = Counterexample(deviator, c0, tuple(actions), run, witness=c0, deviation_time=m)
            return StabilityVerdict(False, deviator, "late-detection", cex, checked=checked)
    return StabilityVerdict(True, checked=checked)


def exhaustive_kstable_search(system: SystemModel, c0: Configuration, goal: GoalSet, k: int,
                              horizon: Optional[int] = None) -> Optional[JointOpenPlan]:
    """Shortest-first enumeration of every joint plan up to ``horizon``.

    Reference oracle for :func:`sjpa`; exponential in the horizon.
    """
    horizon = system.n_configs if horizon is None else min(horizon, system.n_configs)
    for length in range(1, horizon + 1):
        for joint in windows_at(system, c0, length):
            plan = JointOpenPlan.from_joint(joint)
            if verify_kstable(system, c0, goal, plan, k).stable:
                return plan
    return None

