"""Scaling sweeps written as tab-delimited tables plus PNG figures."""

from __future__ import annotations

import csv
import random
import statistics
import time
from pathlib import Path

from .generators import Cnf, RandomSizes, gen_random, random_walk_plan, reduce_3sat
from .model import check_efficient
from .stability import verify_detection
from .synth import SynthBudget, sjpp_solve

# successive doublings of |C|: agent 1, agent 2 and the environment take turns
DOUBLING_SIZES = [(2, 2, 4), (4, 2, 4), (4, 4, 4), (8, 4, 4), (8, 8, 4), (8, 8, 8)]


def _timed(fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def detection_scaling(sizes=DOUBLING_SIZES, instances=15, plan_len=6, repeat=3, seed=0):
    """Median ``verify_detection`` wall time per |C|, plan length held fixed."""
    rows = []
    for n1, n2, nb in sizes:
        times = []
        for i in range(instances):
            rng = random.Random(seed * 100003 + i)
            inst_seed = rng.randrange(2**31)
            system, c0, _ = gen_random(inst_seed, RandomSizes(n1, n2, nb, 3, 3, goals=0))
            plan = random_walk_plan(system, c0, plan_len, rng)
            goal = _final_goal(system, c0, plan)
            assert check_efficient(system, c0, goal, plan).efficient
            times.append(_timed(lambda: [verify_detection(system, c0, goal, plan, d)
                                         for d in (1, 2)], repeat))
        rows.append({"configs": n1 * n2 * nb, "s1": n1, "s2": n2, "env": nb,
                     "median_seconds": statistics.median(times)})
    return rows


def _final_goal(system, c0, plan):
    from .model import GoalSet, execute_open

    end = execute_open(system, c0, plan).configs[-1]
    return GoalSet([tuple(end)])


def unsat_family(n: int) -> Cnf:
    """(x1) and (not x1) over ``n`` variables: unsatisfiable for every n."""
    return Cnf.padded(n, [[1], [-1]])


def synth_growth(ns=range(3, 9)):
    """Exhaustive synthesis effort on the unsatisfiable reduction family."""
    rows = []
    for n in ns:
        system, c0, goal = reduce_3sat(unsat_family(n))
        t0 = time.perf_counter()
        result = sjpp_solve(system, c0, goal, SynthBudget())
        rows.append({"n": n, "configs": system.n_configs, "status": result.status,
                     "nodes": result.nodes, "seconds": time.perf_counter() - t0})
    return rows


def write_table(rows, path, delimiter="\t"):
    path = Path(path)
    with path.open("w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=list(rows[0]), delimiter=delimiter)
        writer.writeheader()
        writer.writerows(rows)
    return path


def format_table(rows, delimiter="\t") -> str:
    lines = [delimiter.join(rows[0])]
    for r in rows:
        lines.append(delimiter.join(f"{v:.6g}" if isinstance(v, float) else str(v)
                                    for v in r.values()))
    return "\n".join(lines)


def plot_detection_scaling(rows, path):
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots(figsize=(5, 3.5))
    xs = [r["configs"] for r in rows]
    ys = [r["median_seconds"] * 1e3 for r in rows]
    ax.loglog(xs, ys, "o-", base=2)
    ax.set_xlabel("|C| (configurations)")
    ax.set_ylabel("median verify time (ms)")
    ax.set_title("Detection check vs system size")
    ax.grid(True, which="both", alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return Path(path)


def plot_synth_growth(rows, path):
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots(figsize=(5, 3.5))
    ns = [r["n"] for r in rows]
    ax.semilogy(ns, [r["nodes"] for r in rows], "s-", label="search nodes")
    ax.set_xlabel("variables n")
    ax.set_ylabel("nodes expanded")
    ax2 = ax.twinx()
    ax2.semilogy(ns, [r["seconds"] for r in rows], "o--", color="tab:red", label="seconds")
    ax2.set_ylabel("seconds")
    ax.set_title("Exact synthesis on unsatisfiable formulas")
    fig.legend(loc="upper left", bbox_to_anchor=(0.15, 0.85))
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return Path(path)


def make_report(out_dir, quick=False):
    """Run both sweeps; returns {name: (rows, table path, figure path)}."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    det = detection_scaling(instances=5 if quick else 15, repeat=1 if quick else 3)
    syn = synth_growth(range(3, 6) if quick else range(3, 9))
    return {
        "detection_scaling": (det, write_table(det, out / "detection_scaling.tsv"),
                              plot_detection_scaling(det, out / "detection_scaling.png")),
        "synth_growth": (syn, write_table(syn, out / "synth_growth.tsv"),
                         plot_synth_growth(syn, out / "synth_growth.png")),
    }
