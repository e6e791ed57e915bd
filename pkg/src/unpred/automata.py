"""DFA compilation for co-safe LTL and the completion-instant modification.

States of a compiled DFA are residual formulas obtained by progression, kept
in a canonical disjunctive normal form over "temporal atoms": literals and the
temporal subformulas of the input, plus a marker requiring one more letter. Only finitely many such DNFs exist, so exploration terminates.

Labels are encoded as integers: bit ``i`` is set when ``ap[i]`` holds.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from itertools import product as iproduct
from typing import AbstractSet, Iterable, Sequence

import numpy as np

from .formula import (And, Atom, Formula, NegAtom, Next, Or, TrueF, Until,
                      atoms, pretty)

__all__ = [
    "Dfa", "ModifiedDfa", "AlphabetTooLarge", "LabelOutsideAlphabet",
    "encode_label", "decode_label", "all_labels", "compile_formula", "modify",
    "accepts", "minimize", "intersect", "MAX_AP",
]

MAX_AP = 16


class AlphabetTooLarge(ValueError):
    pass


class LabelOutsideAlphabet(ValueError):
    pass


def encode_label(ap: Sequence[str], label: AbstractSet[str] | int) -> int:
    if isinstance(label, (int, np.integer)):
        if not 0 <= label < (1 << len(ap)):
            raise LabelOutsideAlphabet(f"label code {label} outside 2^{len(ap)}")
        return int(label)
    code = 0
    for name in label:
        try:
            code |= 1 << ap.index(name)
        except ValueError:
            raise LabelOutsideAlphabet(f"{name!r} is not in the alphabet {list(ap)}") from None
    return code


def decode_label(ap: Sequence[str], code: int) -> frozenset:
    return frozenset(a for i, a in enumerate(ap) if code >> i & 1)


def all_labels(ap: Sequence[str]) -> list:
    return [decode_label(ap, c) for c in range(1 << len(ap))]


@dataclass(frozen=True, eq=False)
class Dfa:
    """Complete DFA over ``2^ap``; ``delta[s, label_code]`` is the successor."""

    ap: tuple
    initial: int
    delta: np.ndarray
    accepting: frozenset
    names: tuple = ()

    @property
    def n_states(self) -> int:
        return self.delta.shape[0]

    @property
    def states(self) -> range:
        return range(self.n_states)

    def step(self, s: int, label) -> int:
        return int(self.delta[s, encode_label(self.ap, label)])

    def run(self, word) -> int:
        s = self.initial
        for label in word:
            s = self.step(s, label)
        return s

    def name(self, s: int) -> str:
        return self.names[s] if self.names else self.short_name(s)

    def short_name(self, s: int) -> str:
        return f"s{s + 1}"


@dataclass(frozen=True, eq=False)
class ModifiedDfa(Dfa):
    """DFA whose original accepting states ``f_states`` lead to ``sink_accept``.

    A run sits in ``f_states`` exactly at the instant of first acceptance and in
    ``sink_accept`` afterwards. ``sink_bad`` collects undefined moves.
    """

    f_states: frozenset = field(default_factory=frozenset)
    sink_accept: int = -1
    sink_bad: int = -1

    def short_name(self, s: int) -> str:
        if s == self.sink_accept:
            return "s_F"
        if s == self.sink_bad:
            return "s_B"
        return f"s{s + 1}"


def accepts(a: Dfa, word) -> bool:
    return a.run(word) in a.accepting


# ---------------------------------------------------------------------------
# progression

@dataclass(frozen=True)
class _NonEmpty:
    """Residual obligation: at least one more letter must follow."""

    def __str__(self):
        return "X true"


_NE = _NonEmpty()
_TRUE_DNF = frozenset([frozenset()])
_FALSE_DNF = frozenset()


def _absorb(clauses) -> frozenset:
    clauses = set(clauses)
    return frozenset(c for c in clauses if not any(d < c for d in clauses))


def _dnf_or(a, b):
    return _absorb(a | b)


def _dnf_and(a, b):
    return _absorb(x | y for x in a for y in b)


def _dnf(f) -> frozenset:
    if isinstance(f, TrueF):
        return _TRUE_DNF
    if isinstance(f, And):
        return _dnf_and(_dnf(f.lhs), _dnf(f.rhs))
    if isinstance(f, Or):
        return _dnf_or(_dnf(f.lhs), _dnf(f.rhs))
    return frozenset([frozenset([f])])


def _prog_atom(t, label: frozenset) -> frozenset:
    if isinstance(t, Atom):
        return _TRUE_DNF if t.name in label else _FALSE_DNF
    if isinstance(t, NegAtom):
        return _FALSE_DNF if t.name in label else _TRUE_DNF
    if isinstance(t, _NonEmpty):
        return _TRUE_DNF
    if isinstance(t, Next):
        sub = _dnf(t.sub)
        # the strong next still needs a letter when its operand accepts the empty word
        return _dnf_and(sub, frozenset([frozenset([_NE])])) if frozenset() in sub else sub
    if isinstance(t, Until):
        again = _dnf_and(_prog(_dnf(t.lhs), label), frozenset([frozenset([t])]))
        return _dnf_or(_prog(_dnf(t.rhs), label), again)
    raise TypeError(f"unexpected temporal atom {t!r}")


def _prog(dnf: frozenset, label: frozenset) -> frozenset:
    out = _FALSE_DNF
    for clause in dnf:
        acc = _TRUE_DNF
        for t in clause:
            acc = _dnf_and(acc, _prog_atom(t, label))
            if not acc:
                break
        out = _dnf_or(out, acc)
    return out


def _dnf_str(dnf) -> str:
    if dnf == _TRUE_DNF:
        return "true"
    if not dnf:
        return "false"
    parts = []
    for clause in sorted(dnf, key=lambda c: sorted(map(repr, c))):
        lits = sorted(pretty(t) if not isinstance(t, _NonEmpty) else str(t) for t in clause)
        parts.append(" & ".join(f"({x})" for x in lits))
    return " | ".join(parts)


def compile_formula(f: Formula, ap_universe: Iterable[str], max_ap: int = MAX_AP,
                    minimal: bool = True) -> Dfa:
    """Build a complete DFA accepting exactly the words on which ``f`` holds.

    With ``minimal`` the result is minimized; the state names keep the residual
    formula of a representative for DOT output.
    """
    ap = tuple(sorted(set(ap_universe)))
    if len(ap) > max_ap:
        raise AlphabetTooLarge(f"{len(ap)} atomic propositions exceed the bound {max_ap}")
    missing = atoms(f) - set(ap)
    if missing:
        raise LabelOutsideAlphabet(f"formula uses atoms outside the universe: {sorted(missing)}")
    labels = all_labels(ap)
    start = _dnf(f)
    index = {start: 0}
    order = [start]
    rows = []
    queue = deque([start])
    while queue:
        cur = queue.popleft()
        row = []
        for lab in labels:
            nxt = _prog(cur, lab)
            if nxt not in index:
                index[nxt] = len(order)
                order.append(nxt)
                queue.append(nxt)
            row.append(index[nxt])
        rows.append(row)
    delta = np.array(rows, dtype=np.int64).reshape(len(order), len(labels))
    accepting = frozenset(i for i, d in enumerate(order) if frozenset() in d)
    dfa = Dfa(ap, 0, delta, accepting, tuple(_dnf_str(d) for d in order))
    return minimize(dfa) if minimal else dfa


# ---------------------------------------------------------------------------
# modification, minimization, intersection

def modify(a: Dfa) -> ModifiedDfa:
    """Split acceptance into the first-acceptance instant and afterwards.

    Original accepting states keep their role (``f_states``) but all of their
    moves go to a fresh self-looping accepting sink. A fresh rejecting sink
    receives every undefined move (entries ``< 0`` in ``a.delta``).
    """
    n, m = a.delta.shape
    s_f, s_b = n, n + 1
    delta = np.empty((n + 2, m), dtype=np.int64)
    delta[:n] = a.delta
    delta[:n][a.delta < 0] = s_b
    for s in a.accepting:
        delta[s, :] = s_f
    delta[s_f, :] = s_f
    delta[s_b, :] = s_b
    names = tuple(a.name(s) for s in a.states) + ("s_F", "s_B")
    return ModifiedDfa(a.ap, a.initial, delta, frozenset(a.accepting) | {s_f}, names,
                       f_states=frozenset(a.accepting), sink_accept=s_f, sink_bad=s_b)


def _reachable(a: Dfa) -> list:
    seen = {a.initial}
    order = [a.initial]
    i = 0
    while i < len(order):
        for t in a.delta[order[i]]:
            t = int(t)
            if t not in seen:
                seen.add(t)
                order.append(t)
        i += 1
    return order


def minimize(a: Dfa) -> Dfa:
    """Moore partition refinement on the reachable part of ``a``."""
    reach = _reachable(a)
    old_to_new = {s: i for i, s in enumerate(reach)}
    delta = np.array([[old_to_new[int(t)] for t in a.delta[s]] for s in reach], dtype=np.int64)
    acc = np.array([s in a.accepting for s in reach], dtype=np.int64)
    block = acc.copy()
    while True:
        sig = np.concatenate([block[:, None], block[delta]], axis=1)
        _, new_block = np.unique(sig, axis=0, return_inverse=True)
        new_block = new_block.reshape(-1)
        if len(np.unique(new_block)) == len(np.unique(block)):
            break
        block = new_block
    # renumber blocks in BFS order from the initial state for stable output
    rep = {}
    for s in range(len(reach)):
        rep.setdefault(int(block[s]), s)
    order = [int(block[0])]
    seen = {order[0]}
    i = 0
    while i < len(order):
        s = rep[order[i]]
        for t in delta[s]:
            b = int(block[t])
            if b not in seen:
                seen.add(b)
                order.append(b)
        i += 1
    num = {b: i for i, b in enumerate(order)}
    new_delta = np.array([[num[int(block[t])] for t in delta[rep[b]]] for b in order],
                         dtype=np.int64).reshape(len(order), a.delta.shape[1])
    accepting = frozenset(num[int(block[s])] for s in range(len(reach)) if acc[s])
    names = tuple(a.name(reach[rep[b]]) for b in order) if a.names else ()
    return Dfa(a.ap, 0, new_delta, accepting, names)


def intersect(a: Dfa, b: Dfa) -> Dfa:
    """Synchronous product accepting ``L(a) & L(b)``; both over the same ``ap``."""
    if a.ap != b.ap:
        raise LabelOutsideAlphabet("intersection needs identical alphabets")
    m = a.delta.shape[1]
    start = (a.initial, b.initial)
    index = {start: 0}
    order = [start]
    rows = []
    i = 0
    while i < len(order):
        p, q = order[i]
        row = []
        for c in range(m):
            t = (int(a.delta[p, c]), int(b.delta[q, c]))
            if t not in index:
                index[t] = len(order)
                order.append(t)
            row.append(index[t])
        rows.append(row)
        i += 1
    accepting = frozenset(k for k, (p, q) in enumerate(order) if p in a.accepting and q in b.accepting)
    return Dfa(a.ap, 0, np.array(rows, dtype=np.int64).reshape(len(order), m), accepting)


def words(ap: Sequence[str], max_len: int):
    """All words over ``2^ap`` of length ``0..max_len`` as tuples of label sets."""
    labels = all_labels(ap)
    for n in range(max_len + 1):
        yield from iproduct(labels, repeat=n)
