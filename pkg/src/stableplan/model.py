"""Two-agent transition systems, joint plans and deterministic execution."""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Mapping, NamedTuple, Optional

from .errors import EmptyPlan, LengthMismatch, UnavailableAction, UndefinedTransition

NULL = "null"
WILDCARD = "*"
AGENTS = (1, 2)


def other(agent: int) -> int:
    return 3 - agent


class Configuration(NamedTuple):
    s1: str
    s2: str
    b: str

    def state_of(self, agent: int) -> str:
        return self.s1 if agent == 1 else self.s2

    def __str__(self):
        return f"({self.s1} {self.s2} {self.b})"


# (s1, s2, b, a1, a2)
TransitionKey = tuple


class Defect(NamedTuple):
    """One violated model invariant; ``key`` names the offending entry."""

    kind: str
    key: tuple

    def __str__(self):
        return f"{self.kind}{self.key}"


@dataclass(frozen=True, eq=True)
class SystemModel:
    """The tuple of agent states, environment states, actions and transitions.

    Transitions are stored as the ordered list of rows they were declared
    with, so a model can carry (and report) defects such as duplicate keys.
    Use :meth:`build` to construct one from plain collections.
    """

    states1: tuple
    states2: tuple
    env_states: tuple
    actions1: tuple
    actions2: tuple
    avail1: Mapping[str, tuple]
    avail2: Mapping[str, tuple]
    rows: tuple  # ((s1, s2, b, a1, a2), Configuration) pairs

    __hash__ = None

    @classmethod
    def build(cls, states1, states2, env_states, actions1, actions2, avail1, avail2,
              transitions) -> "SystemModel":
        if isinstance(transitions, Mapping):
            transitions = transitions.items()
        rows = tuple((tuple(k), Configuration(*v)) for k, v in transitions)
        return cls(
            tuple(states1), tuple(states2), tuple(env_states),
            tuple(actions1), tuple(actions2),
            {s: tuple(a) for s, a in avail1.items()},
            {s: tuple(a) for s, a in avail2.items()},
            rows,
        )

    # -- derived views -----------------------------------------------------

    @cached_property
    def _table(self) -> dict:
        table: dict = {}
        for key, image in self.rows:
            table.setdefault(key, set()).add(image)
        return table

    @cached_property
    def transition(self) -> dict:
        """Key -> image for every key that has exactly one image."""
        return {k: next(iter(v)) for k, v in self._table.items() if len(v) == 1}

    @cached_property
    def _avail_sets(self):
        return ({s: frozenset(a) for s, a in self.avail1.items()},
                {s: frozenset(a) for s, a in self.avail2.items()})

    def states(self, agent: int) -> tuple:
        return self.states1 if agent == 1 else self.states2

    def actions(self, agent: int) -> tuple:
        return self.actions1 if agent == 1 else self.actions2

    def avail(self, agent: int, state: str) -> tuple:
        return (self.avail1 if agent == 1 else self.avail2).get(state, ())

    def is_available(self, agent: int, state: str, action: str) -> bool:
        return action in self._avail_sets[agent - 1].get(state, ())

    @property
    def n_configs(self) -> int:
        return len(self.states1) * len(self.states2) * len(self.env_states)

    def configurations(self):
        for s1 in self.states1:
            for s2 in self.states2:
                for b in self.env_states:
                    yield Configuration(s1, s2, b)

    def joint_actions(self, c: Configuration):
        """Available joint actions at ``c`` in declared order."""
        for a1 in self.avail1.get(c.s1, ()):
            for a2 in self.avail2.get(c.s2, ()):
                yield a1, a2


def step(system: SystemModel, c: Configuration, a1: str, a2: str) -> Configuration:
    if not system.is_available(1, c.s1, a1):
        raise UnavailableAction(1, c.s1, a1)
    if not system.is_available(2, c.s2, a2):
        raise UnavailableAction(2, c.s2, a2)
    key = (c.s1, c.s2, c.b, a1, a2)
    try:
        return system.transition[key]
    except KeyError:
        if key in system._table:
            raise UndefinedTransition(key, "nondeterministic transition") from None
        raise UndefinedTransition(key) from None


def step_agent(system: SystemModel, c: Configuration, agent: int, mine: str,
               theirs: str) -> Configuration:
    """``step`` with the joint action given from ``agent``'s point of view."""
    return step(system, c, mine, theirs) if agent == 1 else step(system, c, theirs, mine)


@dataclass(frozen=True)
class GoalSet:
    """Configuration patterns; a component equal to ``*`` matches anything."""

    patterns: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "patterns", tuple(tuple(p) for p in self.patterns))

    def __contains__(self, c) -> bool:
        return is_goal(self, c)

    def __len__(self):
        return len(self.patterns)

    def with_pattern(self, pattern) -> "GoalSet":
        return GoalSet(self.patterns + (tuple(pattern),))


def is_goal(goal: GoalSet, c: Configuration) -> bool:
    for pattern in goal.patterns:
        if all(p == WILDCARD or p == x for p, x in zip(pattern, c)):
            return True
    return False


@dataclass(frozen=True)
class JointOpenPlan:
    seq1: tuple
    seq2: tuple

    def __post_init__(self):
        object.__setattr__(self, "seq1", tuple(self.seq1))
        object.__setattr__(self, "seq2", tuple(self.seq2))
        if len(self.seq1) != len(self.seq2):
            raise LengthMismatch(len(self.seq1), len(self.seq2))

    @classmethod
    def from_joint(cls, joint: Iterable[tuple]) -> "JointOpenPlan":
        joint = list(joint)
        return cls([a for a, _ in joint], [b for _, b in joint])

    def __len__(self):
        return len(self.seq1)

    def __iter__(self):
        return iter(zip(self.seq1, self.seq2))

    def joint(self, u: int) -> tuple:
        return self.seq1[u], self.seq2[u]

    def of(self, agent: int) -> tuple:
        return self.seq1 if agent == 1 else self.seq2


@dataclass(frozen=True)
class Trajectory:
    configs: tuple
    actions: tuple = ()
    goal_visited: Optional[int] = None

    def __len__(self):
        return len(self.actions)

    def observations(self, agent: int) -> tuple:
        return tuple(c.state_of(agent) for c in self.configs)


def first_goal_index(goal: Optional[GoalSet], configs) -> Optional[int]:
    if goal is None:
        return None
    for u, c in enumerate(configs):
        if is_goal(goal, c):
            return u
    return None


def replay(system: SystemModel, c0: Configuration, actions, goal: Optional[GoalSet] = None
           ) -> Trajectory:
    """Simulate an explicit list of joint actions from ``c0``."""
    configs = [c0]
    actions = tuple(tuple(a) for a in actions)
    for u, (a1, a2) in enumerate(actions):
        try:
            configs.append(step(system, configs[-1], a1, a2))
        except UnavailableAction as exc:
            raise UnavailableAction(exc.agent, exc.state, exc.action, u) from None
    return Trajectory(tuple(configs), actions, first_goal_index(goal, configs))


def execute_open(system: SystemModel, c0: Configuration, plan: JointOpenPlan,
                 goal: Optional[GoalSet] = None) -> Trajectory:
    if len(plan) == 0:
        raise EmptyPlan()
    return replay(system, c0, plan, goal)


@dataclass(frozen=True)
class EfficiencyVerdict:
    efficient: bool
    reason: Optional[str] = None  # "goal-missed" | "too-long"
    trajectory: Optional[Trajectory] = None
    initial: Optional[Configuration] = None  # failing initial configuration, if any

    @property
    def token(self) -> str:
        return "EFFICIENT" if self.efficient else "INEFFICIENT"

    def __bool__(self):
        return self.efficient


def check_efficient(system: SystemModel, c0: Configuration, goal: GoalSet,
                    plan: JointOpenPlan) -> EfficiencyVerdict:
    if len(plan) > system.n_configs:
        return EfficiencyVerdict(False, "too-long")
    traj = execute_open(system, c0, plan, goal)
    if traj.goal_visited is None:
        return EfficiencyVerdict(False, "goal-missed", traj)
    return EfficiencyVerdict(True, None, traj)


def validate_system(system: SystemModel) -> list:
    """Every violated model invariant, as data; empty iff the model is sound."""
    defects = []
    declared = (set(system.states1), set(system.states2))
    actions = (set(system.actions1), set(system.actions2))
    envs = set(system.env_states)

    for agent, avail in ((1, system.avail1), (2, system.avail2)):
        for state in system.states(agent):
            if state not in avail:
                defects.append(Defect("MissingAvailability", (agent, state)))
            elif not avail[state]:
                defects.append(Defect("EmptyAvailability", (agent, state)))
        for state, acts in avail.items():
            if state not in declared[agent - 1]:
                defects.append(Defect("UndeclaredState", (agent, state)))
            for a in acts:
                if a not in actions[agent - 1]:
                    defects.append(Defect("UndeclaredAction", (agent, a)))

    for key, images in system._table.items():
        s1, s2, b, a1, a2 = key
        if len(images) > 1:
            defects.append(Defect("NondeterministicTransition", key))
        if (s1 not in declared[0] or s2 not in declared[1] or b not in envs
                or not system.is_available(1, s1, a1) or not system.is_available(2, s2, a2)):
            defects.append(Defect("JunkTransition", key))
        for image in images:
            if (image.s1 not in declared[0] or image.s2 not in declared[1]
                    or image.b not in envs):
                defects.append(Defect("UndeclaredImage", key))

    for c in system.configurations():
        for a1, a2 in system.joint_actions(c):
            key = (c.s1, c.s2, c.b, a1, a2)
            if key not in system._table:
                defects.append(Defect("MissingTransition", key))
    return defects
