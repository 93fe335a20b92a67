"""Conditional plans over a set of possible initial configurations.

A conditional plan is a rooted DAG per agent.  Action nodes name the action
to play and branch on the agent's own state after the step; halt leaves end
the agent's plan.  A halted agent plays ``null`` while the other continues.

Detection under incomplete information: the detector flags a deviation as
soon as its observation history is inconsistent with the honest run from
every possible initial configuration.  Consistency only shrinks over time,
so a run escapes detection iff a single witness run matches it throughout.
Honest runs are padded with joint ``null`` steps to a common horizon (the
longest honest run), which is the length every compared run is judged over.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Optional

from .errors import (
    DanglingNodeRef,
    MalformedEncoding,
    MissingBranch,
    NotEfficient,
    NullRequired,
    ObservationOutOfRange,
    UnavailableAction,
)
from .model import (
    NULL,
    Configuration,
    EfficiencyVerdict,
    GoalSet,
    JointOpenPlan,
    SystemModel,
    Trajectory,
    first_goal_index,
    is_goal,
    other,
    replay,
    step,
)
from .verdicts import Counterexample, StabilityVerdict


@dataclass(frozen=True)
class CNode:
    action: Optional[str]  # None marks a halt leaf
    branches: tuple = ()  # ((observed state, child id), ...)

    @property
    def halt(self) -> bool:
        return self.action is None


HALT = CNode(None)


@dataclass(frozen=True)
class ConditionalPlan:
    root: str
    nodes: Mapping[str, CNode]

    __hash__ = None

    def __post_init__(self):
        if self.root not in self.nodes:
            raise DanglingNodeRef(self.root, "root")
        for nid, node in self.nodes.items():
            for _, child in node.branches:
                if child not in self.nodes:
                    raise DanglingNodeRef(child, nid)
        self._check_acyclic()

    def _check_acyclic(self):
        state = {}
        for start in self.nodes:
            if start in state:
                continue
            stack = [(start, iter(self.nodes[start].branches))]
            state[start] = 1
            while stack:
                nid, it = stack[-1]
                nxt = next(it, None)
                if nxt is None:
                    state[nid] = 2
                    stack.pop()
                    continue
                child = nxt[1]
                if state.get(child) == 1:
                    raise MalformedEncoding(f"cycle through node {child!r}")
                if child not in state:
                    state[child] = 1
                    stack.append((child, iter(self.nodes[child].branches)))

    def child(self, nid: str, observed: str) -> str:
        for state, target in self.nodes[nid].branches:
            if state == observed:
                return target
        raise MissingBranch(observed, nid)


def lift_open_plan(system: SystemModel, seq, agent: int) -> ConditionalPlan:
    """A chain that ignores observations: every own state leads to the next node."""
    seq = tuple(seq)
    nodes = {f"n{len(seq)}": HALT}
    for u in range(len(seq) - 1, -1, -1):
        target = f"n{u + 1}"
        nodes[f"n{u}"] = CNode(seq[u], tuple((s, target) for s in system.states(agent)))
    return ConditionalPlan("n0", nodes)


def lift_joint(system: SystemModel, plan: JointOpenPlan):
    return lift_open_plan(system, plan.seq1, 1), lift_open_plan(system, plan.seq2, 2)


class Execution:
    """Synchronous execution of two conditional plans, one step at a time.

    ``crash`` = (agent, time) makes that agent play ``null`` from ``time`` on
    and count as finished for the purpose of ending the run.
    """

    def __init__(self, system, c0, plan1, plan2, crash=None):
        self.system = system
        self.plans = (plan1, plan2)
        self.config = c0
        self.at = [plan1.root, plan2.root]
        self.time = 0
        self.crash = crash

    def _halted(self, agent):
        return self.plans[agent - 1].nodes[self.at[agent - 1]].halt

    def _crashed(self, agent):
        return self.crash is not None and self.crash[0] == agent and self.time >= self.crash[1]

    def done(self, agent):
        return self._halted(agent) or self._crashed(agent)

    @property
    def finished(self):
        return self.done(1) and self.done(2)

    def action(self, agent):
        state = self.config.state_of(agent)
        if self._halted(agent) or self._crashed(agent):
            if not self.system.is_available(agent, state, NULL):
                raise NullRequired(agent, state, self.time)
            return NULL
        act = self.plans[agent - 1].nodes[self.at[agent - 1]].action
        if not self.system.is_available(agent, state, act):
            raise UnavailableAction(agent, state, act, self.time)
        return act

    def peek(self):
        """Joint action and successor configuration of the next step."""
        a1, a2 = self.action(1), self.action(2)
        return (a1, a2), step(self.system, self.config, a1, a2)

    def commit(self, nxt: Configuration):
        for agent in (1, 2):
            if not self.done(agent):
                plan = self.plans[agent - 1]
                self.at[agent - 1] = plan.child(self.at[agent - 1], nxt.state_of(agent))
        self.config = nxt
        self.time += 1


def execute_conditional(system: SystemModel, c0: Configuration, plan1: ConditionalPlan,
                        plan2: ConditionalPlan, goal: Optional[GoalSet] = None,
                        pad_to: Optional[int] = None) -> Trajectory:
    run = Execution(system, c0, plan1, plan2)
    configs, actions = [c0], []
    while not run.finished:
        joint, nxt = run.peek()
        run.commit(nxt)
        configs.append(nxt)
        actions.append(joint)
    while pad_to is not None and len(actions) < pad_to:
        c = configs[-1]
        for agent in (1, 2):
            if not system.is_available(agent, c.state_of(agent), NULL):
                raise NullRequired(agent, c.state_of(agent), len(actions))
        configs.append(step(system, c, NULL, NULL))
        actions.append((NULL, NULL))
    return Trajectory(tuple(configs), tuple(actions), first_goal_index(goal, configs))


def _distinct(c0s):
    seen = []
    for c in c0s:
        c = Configuration(*c)
        if c not in seen:
            seen.append(c)
    if not seen:
        raise ValueError("the set of initial configurations is empty")
    return seen


def verify_ii_efficiency(system: SystemModel, c0s, goal: GoalSet, plan1: ConditionalPlan,
                         plan2: ConditionalPlan) -> EfficiencyVerdict:
    bound = system.n_configs
    for c0 in _distinct(c0s):
        traj = execute_conditional(system, c0, plan1, plan2, goal)
        if len(traj) > bound:
            return EfficiencyVerdict(False, "too-long", traj, c0)
        if traj.goal_visited is None:
            return EfficiencyVerdict(False, "goal-missed", traj, c0)
    return EfficiencyVerdict(True)


def honest_runs(system, c0s, plan1, plan2, goal=None) -> dict:
    """Honest run per initial configuration, all padded to the longest one."""
    c0s = _distinct(c0s)
    raw = {c: execute_conditional(system, c, plan1, plan2, goal) for c in c0s}
    horizon = max(len(t) for t in raw.values())
    return {c: (t if len(t) == horizon else
                execute_conditional(system, c, plan1, plan2, goal, pad_to=horizon))
            for c, t in raw.items()}


def verify_ii_stability(system: SystemModel, c0s, goal: GoalSet, plan1: ConditionalPlan,
                        plan2: ConditionalPlan, deviator: int) -> StabilityVerdict:
    eff = verify_ii_efficiency(system, c0s, goal, plan1, plan2)
    if not eff.efficient:
        raise NotEfficient(f"{eff.reason} from {eff.initial}")
    j = other(deviator)
    runs = honest_runs(system, c0s, plan1, plan2, goal)
    pairs = 0
    for actual in runs:
        for witness, h in runs.items():
            if witness.state_of(j) != actual.state_of(j):
                continue
            pairs += 1
            obs = h.observations(j)
            det_actions = [a[j - 1] for a in h.actions]
            layer = {} if is_goal(goal, actual) else {actual: None}
            back = [layer]
            for u, mine in enumerate(det_actions):
                nxt = {}
                for c in layer:
                    for b in system.avail(deviator, c.state_of(deviator)):
                        c2 = step(system, c, mine, b) if j == 1 else step(system, c, b, mine)
                        if c2.state_of(j) == obs[u + 1] and not is_goal(goal, c2) \
                                and c2 not in nxt:
                            nxt[c2] = (c, (mine, b) if j == 1 else (b, mine))
                layer = nxt
                back.append(layer)
                if not layer:
                    break
            if layer:
                c = next(iter(layer))
                actions = []
                for u in range(len(det_actions), 0, -1):
                    prev, joint = back[u][c]
                    actions.append(joint)
                    c = prev
                actions.reverse()
                traj = replay(system, actual, actions, goal)
                cex = Counterexample(deviator, actual, tuple(actions), traj, witness=witness)
                return StabilityVerdict(False, deviator, "undetected-deviation", cex,
                                        checked=pairs)
    return StabilityVerdict(True, checked=pairs)


def verify_ii_stable(system, c0s, goal, plan1, plan2) -> StabilityVerdict:
    """Both directions; inefficiency becomes an unstable verdict."""
    eff = verify_ii_efficiency(system, c0s, goal, plan1, plan2)
    if not eff.efficient:
        return StabilityVerdict(False, None, f"not-efficient:{eff.reason}")
    for deviator in (1, 2):
        v = verify_ii_stability(system, c0s, goal, plan1, plan2, deviator)
        if not v.stable:
            return v
    return StabilityVerdict(True)


class DetectionMonitor:
    """Online consistency filter over the detector's observed states."""

    DETECTED = "DETECTED"

    def __init__(self, system, c0s, plan1, plan2, detector: int):
        self.detector = detector
        self.states = set(system.states(detector))
        self.runs = {c: t.observations(detector)
                     for c, t in honest_runs(system, c0s, plan1, plan2).items()}
        self.horizon = len(next(iter(self.runs.values()))) - 1
        self.consistent = set(self.runs)
        self.time = -1
        self.detected_at: Optional[int] = None

    def feed(self, observed: str) -> Optional[str]:
        """Consume the next observation; returns ``DETECTED`` once, on the step it happens."""
        if observed not in self.states:
            raise ObservationOutOfRange(f"{observed!r} is not a state of agent {self.detector}")
        if self.time + 1 > self.horizon:
            raise ObservationOutOfRange(f"observation beyond horizon {self.horizon}")
        self.time += 1
        if self.detected_at is not None:
            return None
        self.consistent = {c for c in self.consistent if self.runs[c][self.time] == observed}
        if not self.consistent:
            self.detected_at = self.time
            return self.DETECTED
        return None

    def feed_all(self, observations) -> Optional[int]:
        for o in observations:
            self.feed(o)
        return self.detected_at


def detection_monitor(system, c0s, plan1, plan2, detector: int) -> DetectionMonitor:
    return DetectionMonitor(system, c0s, plan1, plan2, detector)


# -- canonical encoding ----------------------------------------------------------

def _canonical(plan: ConditionalPlan):
    """Hash-consed nodes in post-order: list of (action, branches) and root index."""
    ids: dict = {}
    order: list = []
    memo: dict = {}

    def visit(nid):
        if nid in memo:
            return memo[nid]
        node = plan.nodes[nid]
        # children numbered in observed-state order so the listing is canonical
        branches = tuple((s, visit(child)) for s, child in sorted(node.branches))
        key = (node.action, branches)
        if key not in ids:
            ids[key] = len(order)
            order.append(key)
        memo[nid] = ids[key]
        return memo[nid]

    root = visit(plan.root)
    return order, root


def encode_cplan(plan: ConditionalPlan) -> str:
    order, root = _canonical(plan)
    lines = [f"root n{root}"]
    for idx, (action, branches) in enumerate(order):
        if action is None:
            lines.append(f"node n{idx}: halt")
        else:
            parts = [f"action {action}"] + [f"on {s} -> n{c}" for s, c in branches]
            lines.append(f"node n{idx}: " + "; ".join(parts))
    return "\n".join(lines) + "\n"


def decode_cplan(text: str) -> ConditionalPlan:
    root = None
    nodes = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("root "):
            root = line.split()[1]
            continue
        if not line.startswith("node ") or ":" not in line:
            raise MalformedEncoding(f"line {lineno}: cannot parse {raw!r}")
        head, body = line[5:].split(":", 1)
        nid = head.strip()
        if nid in nodes:
            raise MalformedEncoding(f"line {lineno}: node {nid!r} defined twice")
        parts = [p.strip() for p in body.split(";") if p.strip()]
        if parts == ["halt"]:
            nodes[nid] = HALT
            continue
        if not parts or not parts[0].startswith("action "):
            raise MalformedEncoding(f"line {lineno}: node {nid!r} needs 'action' or 'halt'")
        action = parts[0].split()[1]
        branches = []
        for p in parts[1:]:
            tokens = p.split()
            if len(tokens) != 4 or tokens[0] != "on" or tokens[2] != "->":
                raise MalformedEncoding(f"line {lineno}: bad branch {p!r}")
            branches.append((tokens[1], tokens[3]))
        if not branches:
            raise MissingBranch("*", nid)
        nodes[nid] = CNode(action, tuple(branches))
    if root is None:
        raise MalformedEncoding("missing 'root' line")
    return ConditionalPlan(root, nodes)


def cplan_size(plan: ConditionalPlan) -> int:
    """Number of distinct nodes after sharing equal sub-DAGs."""
    return len(_canonical(plan)[0])
