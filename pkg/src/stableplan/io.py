"""Text formats: systems, open plans, conditional plans and DIMACS CNF.

System files are line oriented, ``#`` starts a comment::

    agent1 states: u0 u1
    agent2 states: v0 v1
    env states: e
    agent1 actions: go
    agent2 actions: good bad
    avail1 u0: go
    avail2 v0: good bad
    trans u0 v0 e go good -> u1 v1 e
    init u0 v0 e
    goal u1 v1 *

A leading ``verdict: ...`` line (the first line of every CLI report) is
ignored, so generator output can be piped straight into another command.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from .errors import LengthMismatch, ModelError, ParseError
from .generators import Cnf
from .incomplete import decode_cplan, encode_cplan
from .model import WILDCARD, Configuration, Defect, GoalSet, JointOpenPlan, SystemModel, validate_system

IDENT = re.compile(r"[A-Za-z0-9_]+$")


@dataclass(frozen=True)
class Instance:
    system: SystemModel
    inits: tuple = ()
    goal: GoalSet = field(default_factory=GoalSet)

    __hash__ = None

    @property
    def c0(self) -> Configuration:
        if not self.inits:
            raise ModelError("system file declares no 'init' configuration")
        return self.inits[0]


class SystemDefects(ModelError):
    def __init__(self, defects):
        self.defects = defects
        shown = ", ".join(str(d) for d in defects[:10])
        more = "" if len(defects) <= 10 else f" (+{len(defects) - 10} more)"
        super().__init__(f"model has {len(defects)} defect(s): {shown}{more}")


_HEADERS = {
    "agent1 states": "states1",
    "agent2 states": "states2",
    "env states": "env",
    "agent1 actions": "actions1",
    "agent2 actions": "actions2",
}


def _idents(text, lineno, allow_wildcard=False):
    tokens = text.replace(",", " ").split()
    for tok in tokens:
        if not (IDENT.match(tok) or (allow_wildcard and tok == WILDCARD)):
            raise ParseError(f"invalid identifier {tok!r}", lineno)
    return tokens


def parse_system(text: str, validate: bool = True) -> Instance:
    decl = {}
    avail = {1: {}, 2: {}}
    rows = []
    seen = {}  # key -> (image, line)
    inits, goals = [], []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line or line.startswith("verdict:"):
            continue
        head, sep, rest = line.partition(":")
        if sep and head.strip() in _HEADERS:
            name = _HEADERS[head.strip()]
            if name in decl:
                raise ParseError(f"duplicate declaration '{head.strip()}'", lineno)
            decl[name] = _idents(rest, lineno)
            continue
        word = line.split()[0]
        if word in ("avail1", "avail2") and sep:
            parts = head.split()
            if len(parts) != 2:
                raise ParseError("expected 'availN <state>: <actions>'", lineno)
            agent = int(word[-1])
            state = _idents(parts[1], lineno)[0]
            if state in avail[agent]:
                raise ParseError(f"duplicate availability for {state!r}", lineno)
            avail[agent][state] = _idents(rest, lineno)
        elif word == "trans":
            lhs, arrow, rhs = line[len("trans"):].partition("->")
            key = tuple(_idents(lhs, lineno))
            image = tuple(_idents(rhs, lineno))
            if not arrow or len(key) != 5 or len(image) != 3:
                raise ParseError("expected 'trans s1 s2 b a1 a2 -> s1' s2' b''", lineno)
            if key in seen:
                prev_image, prev_line = seen[key]
                if prev_image != image:
                    raise ParseError(
                        f"conflicting transitions for {' '.join(key)} "
                        f"(lines {prev_line} and {lineno})", lineno)
                continue
            seen[key] = (image, lineno)
            rows.append((key, image))
        elif word == "init":
            parts = _idents(line[4:], lineno)
            if len(parts) != 3:
                raise ParseError("expected 'init s1 s2 b'", lineno)
            inits.append(Configuration(*parts))
        elif word == "goal":
            parts = _idents(line[4:], lineno, allow_wildcard=True)
            if len(parts) != 3:
                raise ParseError("expected 'goal s1 s2 b' (components may be '*')", lineno)
            goals.append(tuple(parts))
        else:
            raise ParseError(f"unrecognised line {raw.strip()!r}", lineno)

    missing = [h for h, n in _HEADERS.items() if n not in decl]
    if missing:
        raise ParseError(f"missing declaration(s): {', '.join(missing)}")
    system = SystemModel.build(decl["states1"], decl["states2"], decl["env"],
                               decl["actions1"], decl["actions2"], avail[1], avail[2], rows)
    inst = Instance(system, tuple(inits), GoalSet(goals))
    if validate:
        defects = validate_system(system)
        for c in inits:
            if (c.s1 not in system.states1 or c.s2 not in system.states2
                    or c.b not in system.env_states):
                defects.append(Defect("UndeclaredInit", tuple(c)))
        for g in goals:
            for comp, states in zip(g, (system.states1, system.states2, system.env_states)):
                if comp != WILDCARD and comp not in states:
                    defects.append(Defect("UndeclaredGoal", g))
                    break
        if defects:
            raise SystemDefects(defects)
    return inst


def serialize_system(system: SystemModel, inits=(), goal: GoalSet = GoalSet()) -> str:
    out = [
        "agent1 states: " + " ".join(system.states1),
        "agent2 states: " + " ".join(system.states2),
        "env states: " + " ".join(system.env_states),
        "agent1 actions: " + " ".join(system.actions1),
        "agent2 actions: " + " ".join(system.actions2),
    ]
    for n, avail in ((1, system.avail1), (2, system.avail2)):
        for state, acts in avail.items():
            out.append(f"avail{n} {state}: " + " ".join(acts))
    for key, image in system.rows:
        out.append("trans " + " ".join(key) + " -> " + " ".join(image))
    for c in inits:
        out.append("init " + " ".join(c))
    for p in goal.patterns:
        out.append("goal " + " ".join(p))
    return "\n".join(out) + "\n"


def serialize_instance(inst: Instance) -> str:
    return serialize_system(inst.system, inst.inits, inst.goal)


def parse_plan(text: str) -> JointOpenPlan:
    seqs = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line or line.startswith("verdict:"):
            continue
        head, sep, rest = line.partition(":")
        if not sep or head.strip() not in ("agent1", "agent2"):
            raise ParseError(f"expected 'agent1: ...' or 'agent2: ...', got {raw.strip()!r}",
                             lineno)
        agent = head.strip()
        if agent in seqs:
            raise ParseError(f"duplicate plan for {agent}", lineno)
        seqs[agent] = _idents(rest, lineno)
    if set(seqs) != {"agent1", "agent2"}:
        raise ParseError("plan needs both 'agent1:' and 'agent2:' lines")
    if len(seqs["agent1"]) != len(seqs["agent2"]):
        raise LengthMismatch(len(seqs["agent1"]), len(seqs["agent2"]))
    return JointOpenPlan(seqs["agent1"], seqs["agent2"])


def serialize_plan(plan: JointOpenPlan) -> str:
    return f"agent1: {' '.join(plan.seq1)}\nagent2: {' '.join(plan.seq2)}\n"


parse_cplan = decode_cplan
serialize_cplan = encode_cplan


def parse_dimacs(text: str) -> Cnf:
    """DIMACS CNF; clauses shorter than three literals are padded by repetition."""
    n = m = None
    clauses, current = [], []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("c") or line.startswith("%"):
            continue
        if line.startswith("p"):
            parts = line.split()
            if len(parts) != 4 or parts[1] != "cnf":
                raise ParseError("expected 'p cnf <vars> <clauses>'", lineno)
            n, m = int(parts[2]), int(parts[3])
            continue
        if n is None:
            raise ParseError("clause before 'p cnf' header", lineno)
        for tok in line.split():
            try:
                lit = int(tok)
            except ValueError:
                raise ParseError(f"bad literal {tok!r}", lineno) from None
            if lit == 0:
                if not current:
                    raise ParseError("empty clause", lineno)
                if len(current) > 3:
                    raise ParseError(f"clause {current} has more than 3 literals", lineno)
                clauses.append(current)
                current = []
            else:
                if abs(lit) > n:
                    raise ParseError(f"literal {lit} exceeds {n} variables", lineno)
                current.append(lit)
    if current:
        raise ParseError("last clause is not terminated by 0")
    if n is None:
        raise ParseError("missing 'p cnf' header")
    if m is not None and m != len(clauses):
        raise ParseError(f"header announces {m} clauses, found {len(clauses)}")
    return Cnf.padded(n, clauses)


def format_dimacs(cnf: Cnf) -> str:
    lines = [f"p cnf {cnf.n} {cnf.m}"]
    lines += [" ".join(str(l) for l in cl) + " 0" for cl in cnf.clauses]
    return "\n".join(lines) + "\n"
