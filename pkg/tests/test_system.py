import dataclasses
import json
import random

import pytest

from unpred.pipeline import example_path
from unpred.system import (ModelError, TransitionSystem, UnknownState, active_inputs,
                           add_stop, is_path, load_model, model_from_dict, model_to_dict,
                           nx, observe, validate)

from gen import random_system


def robot_dict():
    return json.loads(example_path("robot6").read_text())


def test_robot_model_valid(robot):
    report = validate(robot)
    assert report.ok
    assert report.messages() == []
    assert robot.observations == {x: x for x in robot.states}


def test_isolated_sink_breaks_liveness():
    d = robot_dict()
    d["states"].append("7")
    ts = model_from_dict(d)
    report = validate(ts)
    assert report.not_live == ["7"]
    assert "state 7 has no outgoing transition" in report.messages()


def test_shared_observation_needs_shared_inputs():
    d = robot_dict()
    d["observations"] = {x: x for x in d["states"]}
    d["observations"]["5"] = "3"
    ts = model_from_dict(d)
    # U(3) = {c1} but U(5) = {c1, c2}
    assert active_inputs(ts, "3") == {"c1"}
    assert active_inputs(ts, "5") == {"c1", "c2"}
    report = validate(ts)
    assert not report.ok
    assert [(x, y) for x, y, *_ in report.non_uniform] == [("3", "5")]


def test_nx_examples(robot):
    assert nx(robot, {"2"}, "c1") == {"4", "5"}
    assert nx(robot, set(), "c1") == set()
    assert nx(robot, {"2", "4"}, "c1") == {"4", "5", "6"}


def test_active_inputs(robot):
    assert active_inputs(robot, "2") == {"c1", "c2"}
    assert active_inputs(robot, "4") == {"c1", "c2"}
    with pytest.raises(UnknownState):
        active_inputs(robot, "9")


def test_active_inputs_empty_before_validation():
    d = robot_dict()
    d["states"].append("7")
    assert active_inputs(model_from_dict(d), "7") == set()


def test_nx_union_and_monotone():
    rng = random.Random(3)
    for _ in range(50):
        ts = random_system(rng)
        for u in ts.inputs:
            for _ in range(5):
                q1 = {x for x in ts.states if rng.random() < 0.5}
                q2 = {x for x in ts.states if rng.random() < 0.5}
                assert nx(ts, q1 | q2, u) == nx(ts, q1, u) | nx(ts, q2, u)
                assert nx(ts, q1 & q2, u) <= nx(ts, q1, u)


def test_valid_models_extend_every_rooted_path():
    rng = random.Random(4)
    for _ in range(30):
        ts = random_system(rng)
        assert validate(ts).ok
        paths = [(ts.initial,)]
        for _ in range(4):
            nxt = []
            for p in paths:
                succ = [y for ys in ts.succ[p[-1]].values() for y in ys]
                assert succ
                nxt.extend(p + (y,) for y in succ)
            paths = nxt
        assert all(is_path(ts, p) for p in paths)


def test_observe(robot):
    assert observe(robot, ["1", "2", "3"]) == ("1", "2", "3")
    assert observe(robot, ["4"]) == ("4",)
    const = dataclasses.replace(robot, observations={x: "o" for x in robot.states})
    assert observe(const, ["1", "2", "4"]) == ("o", "o", "o")


def test_is_path(robot):
    assert is_path(robot, ["1", "2", "4", "6"])
    assert not is_path(robot, ["1", "3"])
    assert not is_path(robot, ["2", "3"])
    assert is_path(robot, ["2", "3"], rooted=False)


def test_unknown_fields_rejected():
    d = robot_dict()
    d["colour"] = "red"
    with pytest.raises(ModelError, match="unknown model fields"):
        model_from_dict(d)


@pytest.mark.parametrize("edit", [
    lambda d: d.update(initial="9"),
    lambda d: d["transitions"].append({"from": "1", "input": "c3", "to": "2"}),
    lambda d: d["transitions"].append({"from": "1", "input": "c1", "to": "8"}),
    lambda d: d["labels"].update({"3": ["p9"]}),
    lambda d: d.update(observations={"1": "a"}),
    lambda d: d.pop("states"),
    lambda d: d["transitions"].append({"from": "1"}),
])
def test_malformed_models(edit):
    d = robot_dict()
    edit(d)
    with pytest.raises(ModelError):
        model_from_dict(d)


def test_json_round_trip(tmp_path, robot):
    path = tmp_path / "m.json"
    path.write_text(json.dumps(model_to_dict(robot)))
    again = load_model(path)
    assert again.transitions == robot.transitions
    assert again.labels == robot.labels
    assert again.observations == robot.observations
    assert again.initial == robot.initial


def test_add_stop(robot):
    ts = add_stop(robot, ["6"])
    assert ts.succ["6"] == {"c1": ("6",), "stop": ("stop",)}
    assert ts.succ["stop"] == {"stop": ("stop",)}
    assert "stop" in ts.inputs
    assert validate(ts).ok
    with pytest.raises(ModelError):
        add_stop(ts, ["6"])
    with pytest.raises(UnknownState):
        add_stop(robot, ["9"])


def test_add_stop_keeps_uniformity():
    ts = model_from_dict({
        "states": ["a", "b"], "initial": "a", "inputs": ["u"],
        "transitions": [{"from": "a", "input": "u", "to": "b"},
                        {"from": "b", "input": "u", "to": "a"}],
        "observations": {"a": "o", "b": "o"},
    })
    s = add_stop(ts, ["a"])
    assert "stop" in s.succ["b"]
    assert validate(s).ok


def test_constructor_sorts_successors():
    ts = TransitionSystem(("a", "b", "c"), "a", ("u",),
                          frozenset({("a", "u", "c"), ("a", "u", "b")}), (), {}, {x: x for x in "abc"})
    assert ts.succ["a"]["u"] == ("b", "c")
