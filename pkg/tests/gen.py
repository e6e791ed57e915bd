"""Random formulas and transition systems for property and acceptance tests."""

from __future__ import annotations

import random

from unpred.formula import TRUE, And, Atom, Eventually, NegAtom, Next, Or, Until
from unpred.system import TransitionSystem


def random_formula(rng: random.Random, ap, depth: int):
    if depth == 0 or rng.random() < 0.2:
        r = rng.random()
        if r < 0.1:
            return TRUE
        name = rng.choice(ap)
        return Atom(name) if r < 0.6 else NegAtom(name)
    op = rng.choice(["and", "or", "next", "until", "eventually"])
    if op == "next":
        return Next(random_formula(rng, ap, depth - 1))
    if op == "eventually":
        return Eventually(random_formula(rng, ap, depth - 1))
    lhs = random_formula(rng, ap, depth - 1)
    rhs = random_formula(rng, ap, depth - 1)
    return {"and": And, "or": Or, "until": Until}[op](lhs, rhs)


TASKS = [
    "F p1",
    "F(p1 & F p2)",
    "F p1 & F p2",
    "!p2 U p1",
    "F(p1 & X p2)",
    "F p1 | F p2",
    "(!p1 U p2) & F p1",
    "F(p1 & X F p2)",
]


def random_system(rng: random.Random, n_states=None, n_inputs=None, n_obs=None,
                  ap=("p1", "p2")) -> TransitionSystem:
    """Live system whose equally observed states share their active inputs."""
    n = n_states or rng.randint(2, 6)
    m = n_inputs or rng.randint(1, 2)
    states = [str(i) for i in range(n)]
    inputs = [f"u{j}" for j in range(m)]
    k_obs = n_obs or rng.randint(1, n)
    obs = {x: f"o{rng.randrange(k_obs)}" for x in states}
    obs[states[0]] = "o0"
    active = {}
    for o in sorted(set(obs.values())):
        chosen = [u for u in inputs if rng.random() < 0.7]
        active[o] = chosen or [rng.choice(inputs)]
    trans = set()
    for x in states:
        for u in active[obs[x]]:
            for y in rng.sample(states, rng.randint(1, min(2, n))):
                trans.add((x, u, y))
    labels = {x: frozenset(a for a in ap if rng.random() < 0.3) for x in states}
    return TransitionSystem(tuple(states), states[0], tuple(inputs), frozenset(trans),
                            tuple(ap), labels, obs)
