"""Command-line front end.

The first line printed by every subcommand is ``verdict: <TOKEN>``.  Exit
codes: 0 stable/found/efficient, 1 unstable/not found, 2 usage, parse or
model error, 3 budget exceeded, 4 oracle disagreement.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from pathlib import Path

from . import __version__
from .crash import verify_crash_stability
from .errors import (
    BudgetExceeded,
    NotEfficient,
    ObservationOutOfRange,
    ParseError,
    PlanError,
    StablePlanError,
    UnavailableAction,
    WindowExplosion,
)
from .generators import RandomSizes, gen_grid, gen_random, reduce_3sat
from .incomplete import (
    decode_cplan,
    detection_monitor,
    lift_joint,
    verify_ii_efficiency,
    verify_ii_stable,
)
from .io import SystemDefects, parse_dimacs, parse_plan, parse_system, serialize_plan, \
    serialize_system
from .kstable import sjpa, verify_kstable
from .model import AGENTS, JointOpenPlan, check_efficient, replay
from .stability import brute_force_verify, counterexample_is_valid, verify_detection, \
    verify_stable
from .synth import SynthBudget, sjpp_solve
from .verdicts import BUDGET_EXCEEDED

EXIT_OK, EXIT_NEGATIVE, EXIT_ERROR, EXIT_BUDGET, EXIT_ORACLE = 0, 1, 2, 3, 4

POSITIVE = {"STABLE", "FOUND", "EFFICIENT", "VALID", "GENERATED", "CONSISTENT", "SIMULATED"}
NEGATIVE = {"UNSTABLE", "NOT_FOUND", "INEFFICIENT", "DETECTED"}


class UsageError(Exception):
    pass


class Report:
    """Verdict token, optional payload and human-readable body lines."""

    def __init__(self, token, payload=None, lines=(), exit_code=None):
        self.token = token
        self.payload = payload or {}
        self.lines = list(lines)
        if exit_code is None:
            exit_code = EXIT_OK if token in POSITIVE else (
                EXIT_NEGATIVE if token in NEGATIVE else EXIT_ERROR)
        self.exit_code = exit_code


# -- input helpers -------------------------------------------------------------

def _read(path):
    if path == "-":
        return sys.stdin.read()
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None


def _instance(args):
    if not args.system:
        raise UsageError("--system is required")
    return parse_system(_read(args.system))


def _open_plan(args) -> JointOpenPlan:
    if not args.plan:
        raise UsageError("--plan is required")
    return parse_plan(_read(args.plan))


def _cplans(args, system):
    if args.cplan1 or args.cplan2:
        if not (args.cplan1 and args.cplan2):
            raise UsageError("--cplan1 and --cplan2 must be given together")
        return decode_cplan(_read(args.cplan1)), decode_cplan(_read(args.cplan2))
    if args.plan:
        return lift_joint(system, _open_plan(args))
    raise UsageError("give --cplan1/--cplan2 or an open --plan")


def _init(inst):
    return inst.c0


def _cell(text):
    try:
        r, c = (int(x) for x in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected 'row,col', got {text!r}") from None
    return r, c


# -- rendering -------------------------------------------------------------------

def _fmt_config(c):
    return "(" + ",".join(c) + ")"


def _cex_lines(cex):
    out = [f"deviator: agent {cex.deviator}", f"start: {_fmt_config(cex.start)}"]
    if cex.witness is not None and cex.witness != cex.start:
        out.append(f"witness: {_fmt_config(cex.witness)}")
    if cex.deviation_time is not None:
        out.append(f"deviation time: {cex.deviation_time}")
    if cex.crash_time is not None:
        out.append(f"crash time: {cex.crash_time}")
    configs = cex.trajectory.configs
    for u, (a1, a2) in enumerate(cex.actions):
        out.append(f"  {u}: {_fmt_config(configs[u])} --{a1}/{a2}--> {_fmt_config(configs[u + 1])}")
    return out


def _stability_report(v, extra=None):
    lines = []
    if v.reason:
        lines.append(f"reason: {v.reason}")
    if v.direction is not None:
        lines.append(f"failing direction: agent {v.direction} deviates")
    if v.counterexample is not None:
        lines += _cex_lines(v.counterexample)
    payload = {"stability": v.to_dict(),
               "counterexample": None if v.counterexample is None else v.counterexample.to_dict()}
    payload.update(extra or {})
    return Report(v.token, payload, lines)


def _synth_report(res, k=None):
    payload = {"status": res.status, "nodes": res.nodes, "stats": res.stats,
               "plan": None if res.plan is None else
               {"agent1": list(res.plan.seq1), "agent2": list(res.plan.seq2)}}
    if k is not None:
        payload["k"] = k
    lines = [f"nodes: {res.nodes}"]
    if res.plan is not None:
        lines += serialize_plan(res.plan).splitlines()
    code = EXIT_BUDGET if res.status == BUDGET_EXCEEDED else None
    return Report(res.token, payload, lines, exit_code=code)


# -- subcommands -------------------------------------------------------------------

def cmd_validate(args):
    inst = _instance(args)
    s = inst.system
    lines = [f"configurations: {s.n_configs}", f"initial configurations: {len(inst.inits)}",
             f"goal patterns: {len(inst.goal)}"]
    if args.plan:
        eff = check_efficient(s, _init(inst), inst.goal, _open_plan(args))
        lines.append(f"plan: {eff.token.lower()}" + (f" ({eff.reason})" if eff.reason else ""))
        return Report(eff.token, {"efficient": eff.efficient, "reason": eff.reason}, lines)
    return Report("VALID", {"configurations": s.n_configs}, lines)


def _oracle_check(system, c0, goal, plan):
    """Marking verifier vs depth-first oracle; returns (agree, details)."""
    details = {}
    agree = True
    for d in AGENTS:
        fast = verify_detection(system, c0, goal, plan, d)
        slow = brute_force_verify(system, c0, goal, plan, d)
        ok = fast.stable == slow.stable
        for v in (fast, slow):
            if v.counterexample is not None and not counterexample_is_valid(
                    system, goal, plan, v.counterexample):
                ok = False
        details[str(d)] = {"marking": fast.to_dict(), "oracle": slow.to_dict(), "agree": ok}
        agree = agree and ok
    return agree, details


def cmd_verify(args):
    inst = _instance(args)
    plan = _open_plan(args)
    c0 = _init(inst)
    v = verify_stable(inst.system, c0, inst.goal, plan)
    if not args.oracle:
        return _stability_report(v)
    eff = check_efficient(inst.system, c0, inst.goal, plan)
    if not eff.efficient:
        return _stability_report(v, {"oracle": "skipped (plan not efficient)"})
    agree, details = _oracle_check(inst.system, c0, inst.goal, plan)
    rep = _stability_report(v, {"oracle": details})
    if not agree:
        lines = ["oracle disagreement"]
        for d, info in details.items():
            if info["agree"]:
                continue
            for name in ("marking", "oracle"):
                lines.append(f"agent {d} deviates, {name}: "
                             f"{'stable' if info[name]['stable'] else 'unstable'}")
                if info[name]["counterexample"] is not None:
                    lines.append(json.dumps(info[name]["counterexample"]))
        return Report("ORACLE_DISAGREEMENT", rep.payload, lines + rep.lines, EXIT_ORACLE)
    rep.lines.append("oracle: agrees")
    return rep


def cmd_verify_k(args):
    inst = _instance(args)
    v = verify_kstable(inst.system, _init(inst), inst.goal, _open_plan(args), args.k)
    return _stability_report(v, {"k": args.k})


def cmd_synth_k(args):
    inst = _instance(args)
    c0 = _init(inst)
    res = sjpa(inst.system, c0, inst.goal, args.k, horizon=args.horizon,
               max_windows=args.max_windows)
    rep = _synth_report(res, k=args.k)
    if args.oracle and res.found:
        ok = verify_kstable(inst.system, c0, inst.goal, res.plan, args.k).stable and \
            verify_stable(inst.system, c0, inst.goal, res.plan).stable
        if not ok:
            return Report("ORACLE_DISAGREEMENT", rep.payload,
                          ["synthesized plan fails re-verification"] + rep.lines, EXIT_ORACLE)
    return rep


def cmd_synth_exact(args):
    inst = _instance(args)
    c0 = _init(inst)
    budget = SynthBudget(max_len=args.max_len, node_budget=args.node_budget,
                         time_budget=args.time_budget, memo=args.memo)
    res = sjpp_solve(inst.system, c0, inst.goal, budget)
    rep = _synth_report(res)
    if args.oracle and res.found:
        agree, details = _oracle_check(inst.system, c0, inst.goal, res.plan)
        rep.payload["oracle"] = details
        if not agree or not all(details[d]["oracle"]["stable"] for d in details):
            return Report("ORACLE_DISAGREEMENT", rep.payload,
                          ["synthesized plan rejected by the oracle"] + rep.lines, EXIT_ORACLE)
    return rep


def cmd_verify_ii(args):
    inst = _instance(args)
    p1, p2 = _cplans(args, inst.system)
    v = verify_ii_stable(inst.system, inst.inits or [_init(inst)], inst.goal, p1, p2)
    return _stability_report(v)


def cmd_verify_crash(args):
    inst = _instance(args)
    p1, p2 = _cplans(args, inst.system)
    c0s = inst.inits or [_init(inst)]
    eff = verify_ii_efficiency(inst.system, c0s, inst.goal, p1, p2)
    if not eff.efficient:
        return Report("INEFFICIENT", {"reason": eff.reason,
                                      "initial": list(eff.initial)},
                      [f"reason: {eff.reason}", f"failing initial: {_fmt_config(eff.initial)}"])
    v = verify_crash_stability(inst.system, c0s, inst.goal, p1, p2)
    rep = _stability_report(v)
    rep.lines.append(f"scenarios checked: {v.checked}")
    return rep


def _generated(system, inits, goal, meta):
    text = serialize_system(system, inits, goal)
    return Report("GENERATED", {"system": text, **meta}, text.rstrip("\n").splitlines())


def cmd_gen_3sat(args):
    cnf = parse_dimacs(_read(args.cnf))
    system, c0, goal = reduce_3sat(cnf)
    return _generated(system, [c0], goal, {"variables": cnf.n, "clauses": cnf.m})


def cmd_gen_grid(args):
    system, c0, goal = gen_grid(args.rows, args.cols, args.start1, args.start2,
                                args.goal1, args.goal2)
    return _generated(system, [c0], goal, {})


def cmd_gen_random(args):
    sizes = RandomSizes(args.n1, args.n2, args.nb, args.na1, args.na2, args.goals,
                        args.wildcard_prob, args.with_null)
    system, c0, goal = gen_random(args.seed, sizes)
    return _generated(system, [c0], goal, {"seed": args.seed})


def _parse_deviations(text):
    out = {}
    for item in filter(None, (p.strip() for p in text.split(","))):
        try:
            who, rest = item.split("@", 1)
            when, action = rest.split(":", 1)
            agent, t = int(who), int(when)
        except ValueError:
            raise UsageError(f"bad deviation {item!r}, expected '<agent>@<t>:<action>'") from None
        if agent not in AGENTS or t < 0:
            raise UsageError(f"bad deviation {item!r}")
        out[(agent, t)] = action
    return out


def cmd_simulate(args):
    inst = _instance(args)
    plan = _open_plan(args)
    c0 = _init(inst)
    devs = _parse_deviations(args.deviate or "")
    for agent, t in devs:
        if t >= len(plan):
            raise UsageError(f"deviation time {t} is beyond the plan length {len(plan)}")
    joint = [tuple(devs.get((agent, u), a[agent - 1]) for agent in AGENTS)
             for u, a in enumerate(plan)]
    honest = replay(inst.system, c0, plan, inst.goal)
    run = replay(inst.system, c0, joint, inst.goal)
    detected = {}
    for agent in AGENTS:
        first = next((u for u, (x, y) in enumerate(zip(run.observations(agent),
                                                        honest.observations(agent))) if x != y),
                     None)
        detected[str(agent)] = first
    lines = [f"  {u}: {_fmt_config(run.configs[u])} --{a1}/{a2}--> "
             f"{_fmt_config(run.configs[u + 1])}" for u, (a1, a2) in enumerate(joint)]
    lines.append(f"goal visited at: {run.goal_visited}")
    for agent in AGENTS:
        lines.append(f"agent {agent} notices a discrepancy at: {detected[str(agent)]}")
    payload = {"configs": [list(c) for c in run.configs], "actions": [list(a) for a in joint],
               "goal_visited": run.goal_visited, "detected_by": detected}
    return Report("SIMULATED", payload, lines)


def cmd_monitor(args):
    inst = _instance(args)
    p1, p2 = _cplans(args, inst.system)
    mon = detection_monitor(inst.system, inst.inits or [_init(inst)], p1, p2, args.detector)
    obs = args.observations.replace(",", " ").split()
    at = mon.feed_all(obs)
    consistent = sorted(_fmt_config(c) for c in mon.consistent)
    lines = [f"observations: {len(obs)}",
             f"detected at: {at}" if at is not None else
             "consistent with: " + " ".join(consistent)]
    return Report("DETECTED" if at is not None else "CONSISTENT",
                  {"detected_at": at, "consistent": consistent}, lines)


def cmd_report(args):
    from .report import format_table, make_report

    results = make_report(args.out, quick=args.quick)
    lines = []
    payload = {}
    for name, (rows, table, figure) in results.items():
        lines += [f"[{name}]", format_table(rows), f"table: {table}", f"figure: {figure}"]
        payload[name] = {"rows": rows, "table": str(table), "figure": str(figure)}
    return Report("GENERATED", payload, lines)


# -- parser ----------------------------------------------------------------------

class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--system", help="system file, or '-' for standard input")
    common.add_argument("--plan", help="open joint plan file")
    common.add_argument("--cplan1", help="conditional plan of agent 1")
    common.add_argument("--cplan2", help="conditional plan of agent 2")
    common.add_argument("--json", action="store_true", help="append a JSON verdict document")
    common.add_argument("--oracle", action="store_true",
                        help="cross-check with the brute-force verifier")

    p = _Parser(prog="stableplan", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def add(name, fn, help_):
        sp = sub.add_parser(name, parents=[common], help=help_)
        sp.set_defaults(func=fn)
        return sp

    add("validate", cmd_validate, "check a system file (and optionally plan efficiency)")
    add("verify", cmd_verify, "decide stability of an open joint plan")
    sp = add("verify-k", cmd_verify_k, "decide k-stability of an open joint plan")
    sp.add_argument("--k", type=int, required=True)
    sp = add("synth-k", cmd_synth_k, "synthesize a k-stable plan via the window graph")
    sp.add_argument("--k", type=int, required=True)
    sp.add_argument("--horizon", type=int)
    sp.add_argument("--max-windows", type=int, default=10**5)
    sp = add("synth-exact", cmd_synth_exact, "exhaustive stable-plan synthesis")
    sp.add_argument("--max-len", type=int)
    sp.add_argument("--node-budget", type=int, default=10**7)
    sp.add_argument("--time-budget", type=float)
    sp.add_argument("--memo", action="store_true", help="memoize refuted search states")
    add("verify-ii", cmd_verify_ii, "stability of conditional plans over all init lines")
    add("verify-crash", cmd_verify_crash, "stability against crash failures")
    sp = add("gen-3sat", cmd_gen_3sat, "system encoding a DIMACS 3-CNF formula")
    sp.add_argument("--cnf", required=True)
    sp = add("gen-grid", cmd_gen_grid, "two robots on a grid")
    sp.add_argument("--rows", type=int, required=True)
    sp.add_argument("--cols", type=int, required=True)
    sp.add_argument("--start1", type=_cell, default=(0, 0))
    sp.add_argument("--start2", type=_cell, default=(0, 0))
    sp.add_argument("--goal1", type=_cell, required=True)
    sp.add_argument("--goal2", type=_cell, required=True)
    sp = add("gen-random", cmd_gen_random, "seeded random system")
    sp.add_argument("--seed", type=int, required=True)
    for flag, default in (("--n1", 3), ("--n2", 3), ("--nb", 1), ("--na1", 2), ("--na2", 2),
                          ("--goals", 1)):
        sp.add_argument(flag, type=int, default=default)
    sp.add_argument("--wildcard-prob", type=float, default=0.3)
    sp.add_argument("--with-null", action="store_true")
    sp = add("simulate", cmd_simulate, "replay a plan with injected deviations")
    sp.add_argument("--deviate", default="", help="'<agent>@<t>:<action>,...'")
    sp = add("monitor", cmd_monitor, "feed observations to an online detection monitor")
    sp.add_argument("--detector", type=int, choices=AGENTS, required=True)
    sp.add_argument("--observations", required=True,
                    help="detector states from time 0, space or comma separated")
    sp = add("report", cmd_report, "scaling sweeps: tab-separated tables and PNG figures")
    sp.add_argument("--out", required=True, help="output directory")
    sp.add_argument("--quick", action="store_true", help="smaller sweeps")
    return p


def _error_report(token, exc, code):
    return Report(token, {"error": str(exc), "kind": type(exc).__name__}, [f"error: {exc}"], code)


def run(argv=None):
    """Parse ``argv`` and execute; returns (report, json flag, elapsed seconds)."""
    t0 = time.perf_counter()
    want_json = False
    try:
        args = build_parser().parse_args(argv)
        want_json = args.json
        report = args.func(args)
    except UsageError as exc:
        report = _error_report("USAGE_ERROR", exc, EXIT_ERROR)
    except SystemDefects as exc:
        report = _error_report("MODEL_ERROR", exc, EXIT_ERROR)
        report.payload["defects"] = [str(d) for d in exc.defects]
    except (BudgetExceeded, WindowExplosion) as exc:
        report = _error_report("BUDGET_EXCEEDED", exc, EXIT_BUDGET)
    except NotEfficient as exc:
        report = _error_report("INEFFICIENT", exc, EXIT_NEGATIVE)
    except (PlanError, UnavailableAction, ObservationOutOfRange) as exc:
        report = _error_report("PLAN_ERROR", exc, EXIT_ERROR)
    except ParseError as exc:
        report = _error_report("PARSE_ERROR", exc, EXIT_ERROR)
    except StablePlanError as exc:
        report = _error_report("MODEL_ERROR", exc, EXIT_ERROR)
    except ValueError as exc:
        report = _error_report("USAGE_ERROR", exc, EXIT_ERROR)
    return report, want_json, time.perf_counter() - t0


def cli_main(argv=None, out=None) -> int:
    out = sys.stdout if out is None else out
    report, want_json, elapsed = run(argv)
    print(f"verdict: {report.token}", file=out)
    if want_json:
        doc = {"format": 1, "command": list(sys.argv[1:] if argv is None else argv),
               "verdict": report.token, "exit_code": report.exit_code,
               "counterexample": report.payload.get("counterexample"),
               "timing": {"seconds": round(elapsed, 6)}, "details": report.payload}
        print(json.dumps(doc, indent=2, default=str), file=out)
    else:
        for line in report.lines:
            print(line, file=out)
    return report.exit_code


def main():
    try:
        code = cli_main()
        sys.stdout.flush()
    except BrokenPipeError:
        # reader went away (e.g. piped into head); silence the flush at exit
        os.dup2(os.open(os.devnull, os.O_WRONLY), sys.stdout.fileno())
        code = EXIT_OK
    sys.exit(code)


if __name__ == "__main__":
    main()
