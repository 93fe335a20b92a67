"""Instance generators: the 3-SAT reduction, grids and seeded random systems."""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from typing import Optional

from .errors import OutOfRange, PartialAssignment, TooManyVars
from .model import NULL, WILDCARD, Configuration, GoalSet, JointOpenPlan, SystemModel, step


@dataclass(frozen=True)
class Cnf:
    """3-CNF formula; literals are signed 1-based variable indices."""

    n: int
    clauses: tuple

    def __post_init__(self):
        clauses = tuple(tuple(cl) for cl in self.clauses)
        object.__setattr__(self, "clauses", clauses)
        if not clauses:
            raise ValueError("formula needs at least one clause")
        for cl in clauses:
            if len(cl) != 3:
                raise ValueError(f"clause {cl} does not have exactly 3 literals")
            for lit in cl:
                if lit == 0 or abs(lit) > self.n:
                    raise ValueError(f"literal {lit} out of range for {self.n} variables")

    @classmethod
    def padded(cls, n, clauses) -> "Cnf":
        """Accept clauses of 1..3 literals, padding by repeating the last one."""
        out = []
        for cl in clauses:
            cl = list(cl)
            if not 1 <= len(cl) <= 3:
                raise ValueError(f"clause {cl} must have 1 to 3 literals")
            out.append(tuple(cl + [cl[-1]] * (3 - len(cl))))
        return cls(n, tuple(out))

    @property
    def m(self) -> int:
        return len(self.clauses)

    def satisfied_by(self, assignment) -> bool:
        return all(any(assignment[abs(l)] == (l > 0) for l in cl) for cl in self.clauses)


def _lit_action(lit: int) -> str:
    return f"pos_{lit}" if lit > 0 else f"neg_{-lit}"


def reduce_3sat(cnf: Cnf):
    """System, initial configuration and goal encoding ``cnf``.

    Agent 1 walks s0 -> s1 -> ... -> s_{n+1} choosing one literal per
    variable, then observes.  Agent 2 either does its job (``d``) or jumps to
    the clause state r_j; from there any literal of clause j chosen by agent 1
    sends it to ``o``, which agent 1's final ``observe`` can tell apart.
    """
    n, m = cnf.n, cnf.m
    s = [f"s{i}" for i in range(n + 2)]
    states1 = s + ["p", "q"]
    r = [f"r{j}" for j in range(1, m + 1)]
    states2 = ["r0", "rg"] + r + ["o"]
    env = "e"
    actions1 = ["a"] + [x for i in range(1, n + 1) for x in (f"pos_{i}", f"neg_{i}")] + \
        ["observe", NULL]
    actions2 = ["d"] + [f"d_{j}" for j in range(1, m + 1)] + [NULL]

    avail1 = {s[0]: ["a"], s[n + 1]: ["observe"], "p": [NULL], "q": [NULL]}
    for i in range(1, n + 1):
        avail1[s[i]] = [f"pos_{i}", f"neg_{i}"]
    avail2 = {st: [NULL] for st in states2}
    avail2["r0"] = ["d"] + [f"d_{j}" for j in range(1, m + 1)]
    clause_actions = [{_lit_action(l) for l in cl} for cl in cnf.clauses]

    def next1(s1, s2, a1):
        if a1 == "a":
            return s[1]
        if a1 == "observe":
            return "q" if s2 == "o" else "p"
        if a1 == NULL:
            return s1
        i = int(a1.split("_")[1])
        return s[i + 1]

    def next2(s2, a1, a2):
        if a2 == "d":
            return "rg"
        if a2.startswith("d_"):
            return f"r{a2[2:]}"
        if s2.startswith("r") and s2 not in ("r0", "rg"):
            j = int(s2[1:])
            if a1 in clause_actions[j - 1]:
                return "o"
        return s2

    rows = []
    for s1 in states1:
        for s2 in states2:
            for a1 in avail1[s1]:
                for a2 in avail2[s2]:
                    rows.append(((s1, s2, env, a1, a2),
                                 (next1(s1, s2, a1), next2(s2, a1, a2), env)))
    system = SystemModel.build(states1, states2, [env], actions1, actions2, avail1, avail2,
                               rows)
    return system, Configuration("s0", "r0", env), GoalSet([("s1", "rg", env)])


def assignment_to_plan(cnf: Cnf, assignment) -> JointOpenPlan:
    missing = [i for i in range(1, cnf.n + 1) if i not in assignment]
    if missing:
        raise PartialAssignment(f"no value for variables {missing}")
    lits = [f"pos_{i}" if assignment[i] else f"neg_{i}" for i in range(1, cnf.n + 1)]
    return JointOpenPlan(["a"] + lits + ["observe"], ["d"] + [NULL] * (cnf.n + 1))


MAX_BRUTE_VARS = 24


def sat_brute(cnf: Cnf) -> Optional[dict]:
    """First satisfying assignment in counting order (False before True), or None."""
    if cnf.n > MAX_BRUTE_VARS:
        raise TooManyVars(f"{cnf.n} variables exceeds the limit of {MAX_BRUTE_VARS}")
    for values in itertools.product((False, True), repeat=cnf.n):
        assignment = dict(enumerate(values, start=1))
        if cnf.satisfied_by(assignment):
            return assignment
    return None


def random_cnf(rng: random.Random, n: int, m: int, max_width: int = 3) -> Cnf:
    clauses = []
    for _ in range(m):
        width = rng.randint(1, max_width)
        clauses.append([rng.randint(1, n) * rng.choice((1, -1)) for _ in range(width)])
    return Cnf.padded(n, clauses)


# -- grids ---------------------------------------------------------------------

MOVES = {"up": (-1, 0), "down": (1, 0), "left": (0, -1), "right": (0, 1), "stay": (0, 0)}


def _cell(r, c):
    return f"r{r}c{c}"


def gen_grid(rows: int, cols: int, start1, start2, goal1, goal2):
    """Two robots on a ``rows`` x ``cols`` grid; moves are clipped at the border."""
    if rows < 1 or cols < 1:
        raise OutOfRange("grid needs at least one row and one column")
    for pos in (start1, start2, goal1, goal2):
        if not (0 <= pos[0] < rows and 0 <= pos[1] < cols):
            raise OutOfRange(f"position {tuple(pos)} outside {rows}x{cols} grid")
    cells = [(r, c) for r in range(rows) for c in range(cols)]
    names = [_cell(*p) for p in cells]
    moves = list(MOVES)

    def move(p, a):
        dr, dc = MOVES[a]
        return min(max(p[0] + dr, 0), rows - 1), min(max(p[1] + dc, 0), cols - 1)

    trans = []
    for p1 in cells:
        for p2 in cells:
            for a1 in moves:
                for a2 in moves:
                    trans.append(((_cell(*p1), _cell(*p2), "e", a1, a2),
                                  (_cell(*move(p1, a1)), _cell(*move(p2, a2)), "e")))
    avail = {name: moves for name in names}
    system = SystemModel.build(names, names, ["e"], moves, moves, avail, avail, trans)
    c0 = Configuration(_cell(*start1), _cell(*start2), "e")
    return system, c0, GoalSet([(_cell(*goal1), _cell(*goal2), WILDCARD)])


# -- random systems --------------------------------------------------------------

@dataclass(frozen=True)
class RandomSizes:
    n1: int = 3
    n2: int = 3
    nb: int = 1
    na1: int = 2
    na2: int = 2
    goals: int = 1
    wildcard_prob: float = 0.3
    with_null: bool = False
    coupling: float = 1.0  # chance an agent's next state depends on the other's action

    def __post_init__(self):
        if min(self.n1, self.n2, self.nb, self.na1, self.na2) < 1 or self.goals < 0:
            raise ValueError("sizes must be positive")
        if not 0.0 <= self.coupling <= 1.0:
            raise ValueError("coupling must lie in [0, 1]")


def gen_random(seed: int, sizes: RandomSizes = RandomSizes()):
    """Seeded random total system, initial configuration and goal patterns."""
    rng = random.Random(seed)
    states1 = [f"u{i}" for i in range(sizes.n1)]
    states2 = [f"v{i}" for i in range(sizes.n2)]
    env = [f"e{i}" for i in range(sizes.nb)]
    actions1 = [f"a{i}" for i in range(sizes.na1)]
    actions2 = [f"b{i}" for i in range(sizes.na2)]

    def pick_avail(actions):
        k = rng.randint(1, len(actions))
        chosen = set(rng.sample(actions, k))
        return [a for a in actions if a in chosen]

    avail1 = {s: pick_avail(actions1) for s in states1}
    avail2 = {s: pick_avail(actions2) for s in states2}
    if sizes.with_null:
        actions1 = actions1 + [NULL]
        actions2 = actions2 + [NULL]
        for s in states1:
            avail1[s].append(NULL)
        for s in states2:
            avail2[s].append(NULL)

    rows = []
    for s1 in states1:
        for s2 in states2:
            for b in env:
                if sizes.coupling < 1.0:
                    # per-agent image used whenever the other agent's action is ignored
                    own1 = {a1: rng.choice(states1) for a1 in avail1[s1]}
                    own2 = {a2: rng.choice(states2) for a2 in avail2[s2]}
                for a1 in avail1[s1]:
                    for a2 in avail2[s2]:
                        image = (rng.choice(states1), rng.choice(states2), rng.choice(env))
                        if sizes.coupling < 1.0:
                            image = (image[0] if rng.random() < sizes.coupling else own1[a1],
                                     image[1] if rng.random() < sizes.coupling else own2[a2],
                                     image[2])
                        rows.append(((s1, s2, b, a1, a2), image))
    system = SystemModel.build(states1, states2, env, actions1, actions2, avail1, avail2, rows)
    c0 = Configuration(rng.choice(states1), rng.choice(states2), rng.choice(env))

    def component(options):
        return WILDCARD if rng.random() < sizes.wildcard_prob else rng.choice(options)

    goal = GoalSet([(component(states1), component(states2), component(env))
                    for _ in range(sizes.goals)])
    return system, c0, goal


def random_walk_plan(system: SystemModel, c0: Configuration, length: int,
                     rng: random.Random) -> JointOpenPlan:
    joint = []
    c = c0
    for _ in range(length):
        a = rng.choice(list(system.joint_actions(c)))
        joint.append(a)
        c = step(system, c, *a)
    return JointOpenPlan.from_joint(joint)


def random_plan_instance(seed: int, sizes: RandomSizes, max_len: int = 6):
    """Random system plus an efficient plan: the goal gains a pattern the walk hits.

    The added pattern matches one configuration on the walk, with each
    component independently widened to a wildcard, so both stable and
    unstable plans come out in useful proportions.
    """
    system, c0, goal = gen_random(seed, sizes)
    rng = random.Random(seed * 7919 + 1)
    length = rng.randint(1, max(1, min(max_len, system.n_configs)))
    plan = random_walk_plan(system, c0, length, rng)
    configs = [c0]
    for a in plan:
        configs.append(step(system, configs[-1], *a))
    hit = configs[rng.randint(1, length)]
    pattern = tuple(WILDCARD if rng.random() < sizes.wildcard_prob else x for x in hit)
    return system, c0, goal.with_pattern(pattern), plan
