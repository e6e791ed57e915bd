"""Nondeterministic labeled transition systems with an observation map."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from .formula import IDENT_RE

__all__ = [
    "TransitionSystem", "ValidationReport", "ModelError", "UnknownState",
    "nx", "active_inputs", "observe", "validate", "load_model", "model_from_dict",
    "model_to_dict", "add_stop", "is_path",
]


class ModelError(ValueError):
    pass


class UnknownState(KeyError):
    pass


@dataclass(frozen=True, eq=False)
class TransitionSystem:
    """``G = (X, x0, U, ->, AP, L)`` plus the observation map ``H``.

    All identifiers are strings. ``succ[x][u]`` is the sorted
    tuple of ``u``-successors of ``x``; it is derived from ``transitions``.
    """

    states: tuple
    initial: str
    inputs: tuple
    transitions: frozenset
    ap: tuple
    labels: Mapping[str, frozenset]
    observations: Mapping[str, str]
    succ: dict = field(init=False, repr=False)

    def __post_init__(self):
        state_set = set(self.states)
        if len(state_set) != len(self.states):
            raise ModelError("duplicate state identifiers")
        if self.initial not in state_set:
            raise ModelError(f"initial state {self.initial!r} is not a declared state")
        for x, u, y in self.transitions:
            if x not in state_set or y not in state_set:
                raise ModelError(f"transition ({x}, {u}, {y}) uses an undeclared state")
            if u not in self.inputs:
                raise ModelError(f"transition ({x}, {u}, {y}) uses an undeclared input")
        for a in self.ap:
            if not IDENT_RE.match(a):
                raise ModelError(f"atomic proposition {a!r} is not an identifier")
        for x in self.states:
            if not set(self.labels.get(x, ())) <= set(self.ap):
                raise ModelError(f"label of {x!r} uses undeclared propositions")
            if x not in self.observations:
                raise ModelError(f"state {x!r} has no observation")
        pos = {x: i for i, x in enumerate(self.states)}
        succ: dict = {x: {} for x in self.states}
        for x, u, y in self.transitions:
            succ[x].setdefault(u, set()).add(y)
        object.__setattr__(self, "succ", {
            x: {u: tuple(sorted(ys, key=pos.__getitem__)) for u, ys in sorted(d.items())}
            for x, d in succ.items()})
        object.__setattr__(self, "_pos", pos)

    def index(self, x: str) -> int:
        return self._pos[x]

    def label(self, x: str) -> frozenset:
        return frozenset(self.labels.get(x, ()))

    def obs(self, x: str) -> str:
        return self.observations[x]

    @property
    def observation_set(self) -> tuple:
        return tuple(sorted(set(self.observations.values())))

    def sort_states(self, xs: Iterable[str]) -> tuple:
        return tuple(sorted(xs, key=self._pos.__getitem__))


@dataclass
class ValidationReport:
    not_live: list = field(default_factory=list)
    non_uniform: list = field(default_factory=list)

    def __bool__(self):
        # truthy when something is wrong, like a non-empty list of problems
        return bool(self.not_live or self.non_uniform)

    @property
    def ok(self) -> bool:
        return not self

    def messages(self) -> list:
        out = [f"state {x} has no outgoing transition" for x in self.not_live]
        out += [f"states {x} and {y} share observation {o!r} but have active inputs "
                f"{sorted(ux)} vs {sorted(uy)}" for x, y, o, ux, uy in self.non_uniform]
        return out


def nx(ts: TransitionSystem, q: Iterable[str], u: str) -> frozenset:
    """States reachable from some state of ``q`` by one ``u``-transition."""
    out = set()
    for x in q:
        out.update(ts.succ[x].get(u, ()))
    return frozenset(out)


def active_inputs(ts: TransitionSystem, x: str) -> frozenset:
    if x not in ts.succ:
        raise UnknownState(x)
    return frozenset(ts.succ[x])


def observe(ts: TransitionSystem, path: Sequence[str]) -> tuple:
    return tuple(ts.observations[x] for x in path)


def is_path(ts: TransitionSystem, path: Sequence[str], rooted: bool = True) -> bool:
    if not path:
        return not rooted
    if rooted and path[0] != ts.initial:
        return False
    return all(any(b in ys for ys in ts.succ[a].values()) for a, b in zip(path, path[1:]))


def validate(ts: TransitionSystem) -> ValidationReport:
    """Check liveness and that equally observed states share active inputs."""
    report = ValidationReport()
    report.not_live = [x for x in ts.states if not ts.succ[x]]
    first: dict = {}
    for x in ts.states:
        o = ts.obs(x)
        if o not in first:
            first[o] = x
            continue
        y = first[o]
        if active_inputs(ts, x) != active_inputs(ts, y):
            report.non_uniform.append((y, x, o, active_inputs(ts, y), active_inputs(ts, x)))
    return report


# ---------------------------------------------------------------------------
# JSON model files

_MODEL_KEYS = {"states", "initial", "inputs", "transitions", "ap", "labels", "observations"}


def model_from_dict(data: Mapping) -> TransitionSystem:
    if not isinstance(data, Mapping):
        raise ModelError("model must be a JSON object")
    unknown = set(data) - _MODEL_KEYS
    if unknown:
        raise ModelError(f"unknown model fields: {sorted(unknown)}")
    missing = {"states", "initial", "inputs", "transitions"} - set(data)
    if missing:
        raise ModelError(f"missing model fields: {sorted(missing)}")
    states = tuple(str(x) for x in data["states"])
    try:
        transitions = frozenset((str(t["from"]), str(t["input"]), str(t["to"]))
                                for t in data["transitions"])
    except (KeyError, TypeError) as exc:
        raise ModelError(f"malformed transition entry: {exc}") from None
    labels = {str(x): frozenset(map(str, v)) for x, v in data.get("labels", {}).items()}
    for x in labels:
        if x not in states:
            raise ModelError(f"label given for undeclared state {x!r}")
    obs = data.get("observations")
    if obs is None:
        observations = {x: x for x in states}
    else:
        observations = {str(x): str(o) for x, o in obs.items()}
        for x in observations:
            if x not in states:
                raise ModelError(f"observation given for undeclared state {x!r}")
    return TransitionSystem(
        states=states,
        initial=str(data["initial"]),
        inputs=tuple(str(u) for u in data["inputs"]),
        transitions=transitions,
        ap=tuple(str(a) for a in data.get("ap", ())),
        labels={x: labels.get(x, frozenset()) for x in states},
        observations=observations,
    )


def model_to_dict(ts: TransitionSystem) -> dict:
    return {
        "states": list(ts.states),
        "initial": ts.initial,
        "inputs": list(ts.inputs),
        "transitions": [{"from": x, "input": u, "to": y}
                        for x in ts.states for u, ys in ts.succ[x].items() for y in ys],
        "ap": list(ts.ap),
        "labels": {x: sorted(ts.label(x)) for x in ts.states if ts.label(x)},
        "observations": dict(ts.observations),
    }


def load_model(path) -> TransitionSystem:
    with open(Path(path), encoding="utf-8") as fh:
        data = json.load(fh)
    return model_from_dict(data)


def add_stop(ts: TransitionSystem, at: Iterable[str], stop_state: str = "stop",
             stop_input: str = "stop", stop_obs: str | None = None) -> TransitionSystem:
    """Append an absorbing ``stop_state`` reachable by ``stop_input`` from ``at``.

    Every state observed like one of ``at`` also gets the stop move so that the
    active-input uniformity assumption keeps holding.
    """
    if stop_state in ts.states:
        raise ModelError(f"state {stop_state!r} already exists")
    at = set(at)
    unknown = at - set(ts.states)
    if unknown:
        raise UnknownState(sorted(unknown)[0])
    at_obs = {ts.obs(x) for x in at}
    sources = [x for x in ts.states if ts.obs(x) in at_obs]
    trans = set(ts.transitions) | {(x, stop_input, stop_state) for x in sources}
    trans.add((stop_state, stop_input, stop_state))
    inputs = ts.inputs if stop_input in ts.inputs else ts.inputs + (stop_input,)
    labels = dict(ts.labels)
    labels[stop_state] = frozenset()
    observations = dict(ts.observations)
    observations[stop_state] = stop_obs if stop_obs is not None else stop_state
    return TransitionSystem(ts.states + (stop_state,), ts.initial, inputs, frozenset(trans),
                            ts.ap, labels, observations)
