"""Seeded random instance streams shared by the test modules."""

import random

from stableplan.generators import RandomSizes, random_plan_instance


def random_sizes(rng, with_null=False, max_states=5, max_env=3, max_actions=3):
    return RandomSizes(
        n1=rng.randint(1, max_states), n2=rng.randint(1, max_states), nb=rng.randint(1, max_env),
        na1=rng.randint(1, max_actions), na2=rng.randint(1, max_actions),
        goals=rng.randint(0, 2), wildcard_prob=rng.choice((0.0, 0.3)), with_null=with_null,
        coupling=rng.choice((1.0, 0.3, 0.0)),
    )


def random_instances(count, seed, with_null=False, max_len=6, **kw):
    """Seeded stream of (system, c0, goal, efficient plan)."""
    rng = random.Random(seed)
    for i in range(count):
        sizes = random_sizes(rng, with_null=with_null, **kw)
        yield random_plan_instance(seed * 100003 + i, sizes, max_len=max_len)


def random_cplan(rng, states, actions, n_nodes, share=0.5):
    """Random acyclic conditional plan; later nodes only point to earlier ones."""
    from stableplan.incomplete import HALT, CNode, ConditionalPlan

    nodes = {"h": HALT}
    ids = ["h"]
    for i in range(n_nodes):
        observed = rng.sample(list(states), rng.randint(1, len(states)))
        pool = ids if rng.random() < share else ids[-1:]
        branches = tuple((s, rng.choice(pool)) for s in observed)
        nid = f"m{i}"
        nodes[nid] = CNode(rng.choice(list(actions)), branches)
        ids.append(nid)
    return ConditionalPlan(ids[-1], nodes)


# criterion number -> (passed, one-line detail); filled by test_acceptance
ACCEPTANCE = {}


def record(number, ok, detail):
    ACCEPTANCE[number] = (bool(ok), detail)
    print(f"criterion {number}: {'PASS' if ok else 'FAIL'}  {detail}")
    return ok
