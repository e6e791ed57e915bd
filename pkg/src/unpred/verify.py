"""Brute-force checks of the closed loop formed by a system and a finite-memory controller.

Nothing here uses the belief/prediction machinery; the checks work directly on
the graph of ``(product state, controller memory)`` configurations so they can
judge synthesized controllers independently.
"""

from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass, field
from typing import Hashable, Mapping, Sequence

from .product import ProductSystem

__all__ = [
    "MealyController", "ClosedLoop", "Verdict", "UndefinedControl",
    "InfeasibleObservation", "build_closed_loop", "check_live", "check_task",
    "state_estimate", "check_unpredictable", "check_unpredictable_def1",
    "reach", "rooted_paths", "verify_controller", "observer_estimates",
    "search_estimate_controllers", "mealy_from_json", "mealy_to_json",
]


class UndefinedControl(Exception):
    def __init__(self, witness: tuple, reason: str = ""):
        self.witness = witness
        super().__init__(f"controller undefined after observations {list(witness)}"
                         + (f": {reason}" if reason else ""))


class InfeasibleObservation(KeyError):
    pass


@dataclass(frozen=True)
class MealyController:
    """Finite-memory policy: ``update[(m, o)]`` gives the memory after seeing ``o``
    and ``output[m]`` the input to apply with memory ``m``."""

    initial: Hashable
    update: Mapping
    output: Mapping

    @classmethod
    def positional(cls, table: Mapping[str, str]) -> "MealyController":
        """Policy that only looks at the latest observation."""
        init = ("init",)
        update = {(m, o): o for o in table for m in itertools.chain([init], table)}
        return cls(init, update, dict(table))


def mealy_from_json(data: Mapping) -> MealyController:
    """Accepts ``{"positional": {obs: input}}`` or an explicit machine
    ``{"initial": m, "output": {m: u}, "update": [{"from", "obs", "to"}]}``."""
    if not isinstance(data, Mapping):
        raise ValueError("policy must be a JSON object")
    if "positional" in data:
        if set(data) != {"positional"}:
            raise ValueError("positional policy takes no other fields")
        return MealyController.positional({str(o): str(u) for o, u in data["positional"].items()})
    if set(data) != {"initial", "output", "update"}:
        raise ValueError("policy needs exactly the fields initial, output, update")
    update = {}
    for e in data["update"]:
        update[(str(e["from"]), str(e["obs"]))] = str(e["to"])
    return MealyController(str(data["initial"]), update,
                           {str(m): str(u) for m, u in data["output"].items()})


def mealy_to_json(c: MealyController) -> dict:
    return {
        "initial": str(c.initial),
        "output": {str(m): u for m, u in sorted(c.output.items(), key=lambda kv: str(kv[0]))},
        "update": [{"from": str(m), "obs": o, "to": str(t)}
                   for (m, o), t in sorted(c.update.items(), key=lambda kv: (str(kv[0][0]), kv[0][1]))],
    }


@dataclass(eq=False)
class ClosedLoop:
    """Reachable configurations ``(x, m)`` with ``m`` the memory after observing ``x``."""

    prod: ProductSystem
    initial: tuple
    configs: list
    edges: dict  # config -> list[(input, config)]
    parent: dict = field(repr=False, default_factory=dict)

    def obs(self, c) -> str:
        return self.prod.obs(c[0])

    def history(self, c) -> tuple:
        """Shortest observation sequence leading to ``c``."""
        out = []
        while c is not None:
            out.append(self.obs(c))
            c = self.parent.get(c)
        return tuple(reversed(out))


@dataclass(frozen=True)
class Verdict:
    ok: bool
    witness: tuple | None = None

    def __bool__(self):
        return self.ok


def build_closed_loop(prod: ProductSystem, c: MealyController) -> ClosedLoop:
    ts = prod.ts

    def step_memory(m, o, hist):
        try:
            return c.update[(m, o)]
        except KeyError:
            raise UndefinedControl(hist, f"no memory update for observation {o!r}") from None

    x0 = prod.initial
    start = (x0, step_memory(c.initial, ts.obs(x0), (ts.obs(x0),)))
    parent = {start: None}
    edges: dict = {}
    order = [start]
    queue = deque([start])
    while queue:
        cfg = queue.popleft()
        x, m = cfg
        hist = None
        if m not in c.output:
            raise UndefinedControl(_hist(parent, cfg, prod), "no output for memory")
        u = c.output[m]
        out = []
        for y in ts.succ[x].get(u, ()):
            o = ts.obs(y)
            try:
                m2 = c.update[(m, o)]
            except KeyError:
                hist = _hist(parent, cfg, prod) + (o,)
                raise UndefinedControl(hist, f"no memory update for observation {o!r}") from None
            nxt = (y, m2)
            out.append((u, nxt))
            if nxt not in parent:
                parent[nxt] = cfg
                order.append(nxt)
                queue.append(nxt)
        edges[cfg] = out
    return ClosedLoop(prod, start, order, edges, parent)


def _hist(parent, cfg, prod) -> tuple:
    out = []
    while cfg is not None:
        out.append(prod.obs(cfg[0]))
        cfg = parent[cfg]
    return tuple(reversed(out))


def check_live(cl: ClosedLoop) -> bool:
    return all(cl.edges[c] for c in cl.configs)


def check_task(cl: ClosedLoop) -> bool:
    """No reachable cycle avoids the completed states.

    Then every infinite run completes within ``len(cl.configs)`` steps.
    """
    done = cl.prod.xf_or_sink
    pending = [c for c in cl.configs if c[0] not in done]
    indeg = {c: 0 for c in pending}
    for c in pending:
        for _, d in cl.edges[c]:
            if d in indeg:
                indeg[d] += 1
    queue = deque(c for c, n in indeg.items() if n == 0)
    removed = 0
    while queue:
        c = queue.popleft()
        removed += 1
        for _, d in cl.edges[c]:
            if d in indeg:
                indeg[d] -= 1
                if indeg[d] == 0:
                    queue.append(d)
    return removed == len(pending)


def _succ_by_obs(cl: ClosedLoop, configs, o):
    return {d for c in configs for _, d in cl.edges[c] if cl.obs(d) == o}


def state_estimate(cl: ClosedLoop, obs: Sequence[str]) -> frozenset:
    """Product states ending some closed-loop path observed as ``obs``."""
    if not obs or cl.obs(cl.initial) != obs[0]:
        raise InfeasibleObservation(tuple(obs))
    cur = {cl.initial}
    for o in obs[1:]:
        cur = _succ_by_obs(cl, cur, o)
        if not cur:
            raise InfeasibleObservation(tuple(obs))
    return frozenset(c[0] for c in cur)


def reach(cl: ClosedLoop, config, i: int) -> frozenset:
    """Configurations reachable from ``config`` in exactly ``i`` steps."""
    cur = {config}
    for _ in range(i):
        cur = {d for c in cur for _, d in cl.edges[c]}
    return frozenset(cur)


def rooted_paths(cl: ClosedLoop, max_len: int):
    """Every rooted closed-loop path with at most ``max_len`` states, as configs."""
    stack = [(cl.initial,)]
    while stack:
        p = stack.pop()
        yield p
        if len(p) < max_len:
            for _, d in reversed(cl.edges[p[-1]]):
                stack.append(p + (d,))


def _observer(cl: ClosedLoop):
    """Breadth-first observer states with their shortest observation sequence."""
    start = frozenset([cl.initial])
    seen = {start: (cl.obs(cl.initial),)}
    queue = deque([start])
    while queue:
        s = queue.popleft()
        yield s, seen[s]
        obs = sorted({cl.obs(d) for c in s for _, d in cl.edges[c]})
        for o in obs:
            t = frozenset(_succ_by_obs(cl, s, o))
            if t not in seen:
                seen[t] = seen[s] + (o,)
                queue.append(t)


def _avoid_sets(cl: ClosedLoop, horizon: int) -> list:
    """``avoid[i]``: configs with an ``i``-step continuation ending outside X_F."""
    xf = cl.prod.xf
    cur = frozenset(c for c in cl.configs if c[0] not in xf)
    out = [cur]
    for _ in range(horizon):
        cur = frozenset(c for c in cl.configs if any(d in cur for _, d in cl.edges[c]))
        out.append(cur)
    return out


def check_unpredictable(cl: ClosedLoop, k: int) -> Verdict:
    """Every observer state keeps some run that is not first-completing ``k`` steps later.

    On failure the witness is the shortest observation sequence after which
    the intruder is certain of completion in exactly ``k`` steps.
    """
    avoid = _avoid_sets(cl, k)[k]
    for s, hist in _observer(cl):
        if not s & avoid:
            return Verdict(False, hist)
    return Verdict(True)


def check_unpredictable_def1(cl: ClosedLoop, k: int, m_max: int) -> bool:
    """Bounded form quantifying over every horizon ``m`` in ``[k, m_max]``."""
    if m_max < k:
        raise ValueError("m_max must be at least k")
    avoid = _avoid_sets(cl, m_max)
    for s, _ in _observer(cl):
        for m in range(k, m_max + 1):
            if not s & avoid[m]:
                return False
    return True


def verify_controller(prod: ProductSystem, c: MealyController, k: int) -> dict:
    """Report ``{live, task, unpredictable, witnesses}``."""
    try:
        cl = build_closed_loop(prod, c)
    except UndefinedControl as exc:
        return {"live": False, "task": False, "unpredictable": False,
                "witnesses": {"undefined_control": list(exc.witness)}}
    live = check_live(cl)
    task = check_task(cl)
    unpred = check_unpredictable(cl, k)
    witnesses = {}
    if not live:
        dead = next(c for c in cl.configs if not cl.edges[c])
        witnesses["dead_end"] = list(cl.history(dead))
    if not unpred:
        witnesses["prediction"] = list(unpred.witness)
    return {"live": live, "task": task, "unpredictable": unpred.ok, "witnesses": witnesses}


# ---------------------------------------------------------------------------
# exhaustive search over estimate-based controllers

def observer_estimates(prod: ProductSystem, m, u: str) -> dict:
    """``{o: estimate}`` after applying ``u`` from estimate ``m``."""
    ts = prod.ts
    out: dict = {}
    for x in m:
        for y in ts.succ[x].get(u, ()):
            out.setdefault(ts.obs(y), set()).add(y)
    return {o: frozenset(ys) for o, ys in sorted(out.items())}


def search_estimate_controllers(prod: ProductSystem, k: int, cap: int = 10**6):
    """Try every controller whose memory is the current state estimate.

    Returns ``("found", controller)``, ``("none", None)`` when all candidates
    fail, or ``("inconclusive", None)`` once ``cap`` candidates were tried.
    """
    ts = prod.ts
    x0 = prod.initial
    init = frozenset([x0])
    count = 0

    def choices(m):
        return sorted(ts.succ[min(m, key=ts.index)])

    def search(assign: dict, pending: list):
        nonlocal count
        while pending and pending[0] in assign:
            pending = pending[1:]
        if not pending:
            count += 1
            if count > cap:
                raise _Cap
            return _try(assign)
        m = pending[0]
        for u in choices(m):
            assign[m] = u
            nxt = [e for e in observer_estimates(prod, m, u).values() if e not in assign]
            found = search(assign, pending[1:] + nxt)
            if found is not None:
                return found
            del assign[m]
        return None

    def _try(assign: dict):
        update = {("init", ts.obs(x0)): init}
        for m, u in assign.items():
            for o, e in observer_estimates(prod, m, u).items():
                update[(m, o)] = e
        c = MealyController("init", update, dict(assign))
        rep = verify_controller(prod, c, k)
        if rep["live"] and rep["task"] and rep["unpredictable"]:
            return c
        return None

    try:
        found = search({}, [init])
    except _Cap:
        return "inconclusive", None
    return ("found", found) if found is not None else ("none", None)


class _Cap(Exception):
    pass
