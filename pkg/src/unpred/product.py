"""Product of a transition system with a modified task automaton."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .automata import ModifiedDfa, encode_label
from .system import TransitionSystem

__all__ = ["ProductSystem", "AlphabetMismatch", "build_product", "project_path", "lift_path"]


class AlphabetMismatch(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class ProductSystem:
    """Reachable product ``G x A``.

    ``ts`` is an ordinary :class:`TransitionSystem` over states ``x1, x2, ...``
    numbered in breadth-first order; ``pairs`` maps each to its
    ``(system state, automaton state)``. ``xf`` holds the first-completion
    states and ``xf_or_sink`` additionally those where the task was completed
    earlier.
    """

    ts: TransitionSystem
    system: TransitionSystem
    dfa: ModifiedDfa
    pairs: dict
    xf: frozenset
    xf_or_sink: frozenset

    @property
    def states(self) -> tuple:
        return self.ts.states

    @property
    def initial(self) -> str:
        return self.ts.initial

    def obs(self, x: str) -> str:
        return self.ts.obs(x)

    def describe(self, x: str) -> str:
        s, q = self.pairs[x]
        return f"{x}=({s},{self.dfa.short_name(q)})"


def build_product(ts: TransitionSystem, a: ModifiedDfa) -> ProductSystem:
    if set(ts.ap) != set(a.ap):
        raise AlphabetMismatch(f"system propositions {sorted(ts.ap)} differ from "
                               f"automaton alphabet {sorted(a.ap)}")
    code = {x: encode_label(a.ap, ts.label(x)) for x in ts.states}

    def xi(q, x):
        return int(a.delta[q, code[x]])

    start = (ts.initial, xi(a.initial, ts.initial))
    names = {start: "x1"}
    order = [start]
    edges = []
    i = 0
    while i < len(order):
        x, q = order[i]
        succ = []
        for u, ys in ts.succ[x].items():
            for y in ys:
                p = (y, xi(q, y))
                succ.append(p)
                edges.append(((x, q), u, p))
        for p in sorted(set(succ), key=lambda p: (ts.index(p[0]), p[1])):
            if p not in names:
                names[p] = f"x{len(order) + 1}"
                order.append(p)
        i += 1
    pairs = {names[p]: p for p in order}
    pts = TransitionSystem(
        states=tuple(names[p] for p in order),
        initial="x1",
        inputs=ts.inputs,
        transitions=frozenset((names[p], u, names[r]) for p, u, r in edges),
        ap=ts.ap,
        labels={names[p]: ts.label(p[0]) for p in order},
        observations={names[p]: ts.obs(p[0]) for p in order},
    )
    xf = frozenset(n for n, (_, q) in pairs.items() if q in a.f_states)
    done = frozenset(n for n, (_, q) in pairs.items()
                     if q in a.f_states or q == a.sink_accept)
    return ProductSystem(pts, ts, a, pairs, xf, done)


def project_path(prod: ProductSystem, path: Sequence[str]) -> tuple:
    return tuple(prod.pairs[x][0] for x in path)


def lift_path(prod: ProductSystem, path: Sequence[str]) -> tuple:
    """Inverse of :func:`project_path` for rooted system paths."""
    if not path:
        return ()
    a = prod.dfa
    index = {p: n for n, p in prod.pairs.items()}
    q = a.step(a.initial, prod.system.label(path[0]))
    out = [index[(path[0], q)]]
    for x in path[1:]:
        q = a.step(q, prod.system.label(x))
        out.append(index[(x, q)])
    return tuple(out)
