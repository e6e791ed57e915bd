import itertools
import json
import random

import pytest

from unpred.automata import compile_formula, modify
from unpred.formula import holds_on, is_minimal_good_prefix, parse
from unpred.pipeline import example_path, prepare
from unpred.product import AlphabetMismatch, build_product, lift_path, project_path
from unpred.system import model_from_dict, validate

from gen import TASKS, random_system


def rooted_paths(ts, n):
    """All rooted state sequences with exactly ``n`` states."""
    paths = [(ts.initial,)]
    for _ in range(n - 1):
        paths = [p + (y,) for p in paths for y in sorted({y for ys in ts.succ[p[-1]].values() for y in ys})]
    return paths


def trace(ts, path):
    return [ts.label(x) for x in path]


def test_robot_product(prod):
    assert prod.states == tuple(f"x{i}" for i in range(1, 8))
    assert prod.xf == {"x6"}
    assert prod.xf_or_sink == {"x6", "x7"}
    a = prod.dfa
    assert {x: (s, a.short_name(q)) for x, (s, q) in prod.pairs.items()} == {
        "x1": ("1", "s1"), "x2": ("2", "s2"), "x3": ("3", "s2"), "x4": ("4", "s2"),
        "x5": ("5", "s2"), "x6": ("6", "s3"), "x7": ("6", "s_F")}
    assert prod.ts.succ["x4"] == {"c1": ("x5", "x6"), "c2": ("x3",)}
    assert prod.obs("x7") == "6"
    assert validate(prod.ts).ok


def test_empty_labels_give_isomorphic_product():
    d = json.loads(example_path("robot6").read_text())
    d["labels"] = {}
    ts = model_from_dict(d)
    _, a, prod = prepare(ts, "F p1")
    assert len(prod.states) == len(ts.states)
    assert {q for _, q in prod.pairs.values()} == {a.initial}
    assert not prod.xf and not prod.xf_or_sink
    rename = {x: s for x, (s, _) in prod.pairs.items()}
    assert {(rename[x], u, rename[y]) for x, u, y in prod.ts.transitions} == ts.transitions


def test_first_completion_path(prod, robot):
    path = ("x1", "x2", "x3", "x6")
    assert path[-1] in prod.xf
    assert project_path(prod, path) == ("1", "2", "3", "6")
    assert is_minimal_good_prefix(trace(robot, project_path(prod, path)), parse("F(p1 & F p2)"))


def test_project_and_lift(prod):
    assert project_path(prod, ("x1", "x2")) == ("1", "2")
    assert project_path(prod, ()) == ()
    assert lift_path(prod, ()) == ()
    for p in rooted_paths(prod.ts, 6):
        assert lift_path(prod, project_path(prod, p)) == p


def test_alphabet_mismatch(robot):
    a = modify(compile_formula(parse("F q"), ["q"]))
    with pytest.raises(AlphabetMismatch):
        build_product(robot, a)


def check_bijection_and_semantics(ts, task, max_len):
    f, _, prod = prepare(ts, task)
    for n in range(1, max_len + 1):
        sys_paths = rooted_paths(ts, n)
        prod_paths = rooted_paths(prod.ts, n)
        assert len(sys_paths) == len(prod_paths)
        assert sorted(project_path(prod, p) for p in prod_paths) == sorted(sys_paths)
        for p in prod_paths:
            w = trace(ts, project_path(prod, p))
            assert (p[-1] in prod.xf) == is_minimal_good_prefix(w, f)
            assert (p[-1] in prod.xf_or_sink) == holds_on(w, f)


def test_robot_bijection_and_semantics(robot):
    check_bijection_and_semantics(robot, "F(p1 & F p2)", 8)


def test_random_bijection_and_semantics():
    rng = random.Random(8)
    for _ in range(25):
        ts = random_system(rng, n_states=rng.randint(2, 4))
        check_bijection_and_semantics(ts, rng.choice(TASKS), 6)


def test_product_inherits_assumptions():
    rng = random.Random(9)
    for _ in range(40):
        ts = random_system(rng)
        _, _, prod = prepare(ts, rng.choice(TASKS))
        assert validate(prod.ts).ok
        assert prod.xf <= prod.xf_or_sink
