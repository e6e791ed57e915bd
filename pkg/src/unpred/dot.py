"""Graphviz DOT text for the automata and belief structures of the pipeline.

Output is deterministic: nodes and edges are emitted in a fixed order so
re-exporting the same object gives identical bytes.
"""

from __future__ import annotations

from .automata import Dfa, ModifiedDfa, decode_label
from .product import ProductSystem
from .synthesis import Aes, DetBts, belief_key, bits

__all__ = ["dfa_to_dot", "product_to_dot", "bts_to_dot"]


def _q(s: str) -> str:
    return '"' + str(s).replace("\\", "\\\\").replace('"', '\\"') + '"'


def _label_text(ap, code) -> str:
    lab = decode_label(ap, code)
    return "{" + ",".join(sorted(lab)) + "}"


def dfa_to_dot(a: Dfa, name: str = "dfa") -> str:
    lines = [f"digraph {name} {{", "  rankdir=LR;", '  __start [shape=point, label=""];']
    mod = isinstance(a, ModifiedDfa)
    for s in a.states:
        attrs = [f"label={_q(a.short_name(s))}", f"tooltip={_q(a.name(s))}"]
        if mod and s == a.sink_accept:
            attrs.append("shape=doublecircle")
        elif mod and s == a.sink_bad:
            attrs += ["shape=circle", "style=dashed"]
        elif s in a.accepting:
            attrs.append("shape=doublecircle" if not mod else "shape=circle, peripheries=2")
        else:
            attrs.append("shape=circle")
        lines.append(f"  n{s} [{', '.join(attrs)}];")
    lines.append(f"  __start -> n{a.initial};")
    for s in a.states:
        grouped: dict = {}
        for c, t in enumerate(a.delta[s]):
            grouped.setdefault(int(t), []).append(_label_text(a.ap, c))
        for t in sorted(grouped):
            lines.append(f"  n{s} -> n{t} [label={_q(' '.join(grouped[t]))}];")
    lines.append("}")
    return "\n".join(lines) + "\n"


def product_to_dot(prod: ProductSystem, name: str = "product") -> str:
    ts = prod.ts
    lines = [f"digraph {name} {{", "  rankdir=LR;", '  __start [shape=point, label=""];']
    for x in ts.states:
        attrs = [f"label={_q(x)}", f"tooltip={_q(prod.describe(x))}", "shape=box"]
        if x in prod.xf:
            attrs.append("peripheries=2")
        if x in prod.xf_or_sink:
            attrs.append('style=filled, fillcolor="lightgrey"')
        lines.append(f"  {_q(x)} [{', '.join(attrs)}];")
    lines.append(f"  __start -> {_q(ts.initial)};")
    for x in ts.states:
        for u, ys in ts.succ[x].items():
            for y in ys:
                lines.append(f"  {_q(x)} -> {_q(y)} [label={_q(u)}];")
    lines.append("}")
    return "\n".join(lines) + "\n"


def _belief_text(prod, k, q) -> str:
    return "\\n".join(f"{prod.states[x]}:{''.join(map(str, bits(h, k)))}" for x, h in q.belief)


def bts_to_dot(t: Aes | DetBts, name: str = "bts", ghost_pruned: bool = False) -> str:
    """Y-states as circles, Z-states as boxes.

    With ``ghost_pruned`` (AES only) explored but pruned states are drawn grey
    and dashed, without edges.
    """
    prod, k = t.prod, t.k
    if isinstance(t, DetBts):
        ys = sorted(t.y_states, key=lambda q: belief_key(q.belief, k))
        zs = sorted(t.z_states, key=lambda q: belief_key(q.belief, k))
        inits = [t.y0]
        yz = [(y, u, z) for y in ys for u, z in [t.yz[y]]]
    else:
        ys = sorted(t.y_states, key=lambda q: (belief_key(q.belief, k), q.obs))
        zs = sorted(t.z_states, key=lambda q: belief_key(q.belief, k))
        inits = sorted(t.y0, key=lambda q: belief_key(q.belief, k))
        yz = [(y, u, z) for y in ys for u in sorted(t.yz[y])
              for z in sorted(t.yz[y][u], key=lambda q: belief_key(q.belief, k))]
    yid = {y: f"Y{i}" for i, y in enumerate(ys)}
    zid = {z: f"Z{i}" for i, z in enumerate(zs)}
    lines = [f"digraph {name} {{", "  rankdir=LR;"]
    for i, y in enumerate(inits):
        lines.append(f'  __start{i} [shape=point, label=""];')
    for y in ys:
        lines.append(f"  {yid[y]} [shape=circle, label={_q(_belief_text(prod, k, y))}];")
    for z in zs:
        lines.append(f"  {zid[z]} [shape=box, label={_q(_belief_text(prod, k, z))}];")
    if ghost_pruned and isinstance(t, Aes):
        gy = sorted(t.explored_y - t.y_states, key=lambda q: (belief_key(q.belief, k), q.obs))
        gz = sorted(t.explored_z - t.z_states, key=lambda q: belief_key(q.belief, k))
        for i, y in enumerate(gy):
            lines.append(f"  GY{i} [shape=circle, style=dashed, color=grey, fontcolor=grey, "
                         f"label={_q(_belief_text(prod, k, y))}];")
        for i, z in enumerate(gz):
            lines.append(f"  GZ{i} [shape=box, style=dashed, color=grey, fontcolor=grey, "
                         f"label={_q(_belief_text(prod, k, z))}];")
    for i, y in enumerate(inits):
        lines.append(f"  __start{i} -> {yid[y]};")
    for y, u, z in yz:
        lines.append(f"  {yid[y]} -> {zid[z]} [label={_q(u)}];")
    for z in zs:
        for o, y in sorted(t.zy[z].items()):
            lines.append(f"  {zid[z]} -> {yid[y]} [label={_q(o)}];")
    lines.append("}")
    return "\n".join(lines) + "\n"
