"""Prediction-based belief games and unpredictable controller extraction.

A prediction for horizon ``K`` is an int bitmask ``h``; bit ``i`` set means the
run is certain to be in a first-completion state exactly ``i`` steps from now.
Beliefs are tuples of ``(product state index, prediction)`` sorted by state
index, so equal beliefs compare and hash equal.

Y-states are beliefs right after an observation, Z-states beliefs right after
a control choice. Z-states are identified by their belief only; the input that
produced them lives on the Y->Z edge.
"""

from __future__ import annotations

import itertools
import logging
import math
import random
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, NamedTuple, Sequence

from .product import ProductSystem
from .verify import MealyController

log = logging.getLogger(__name__)

__all__ = [
    "YState", "ZState", "Aes", "DetBts", "Controller", "NoSolution",
    "LengthMismatch", "InfeasibleObservation", "HorizonTooLarge", "AesTooLarge", "bits",
    "from_bits", "one_step_consistent", "is_secure", "candidate_predictions",
    "yz_successors", "zy_successor", "initial_y_states", "build_aes", "attractor",
    "extract", "decode", "synthesize", "SynthesisResult", "belief_key", "MAX_K",
]

MAX_K = 62


class NoSolution(Exception):
    """No initial belief of the AES can force the task to complete."""


class LengthMismatch(ValueError):
    pass


class HorizonTooLarge(ValueError):
    pass


class AesTooLarge(RuntimeError):
    """Exploration exceeded the caller's node budget."""


class InfeasibleObservation(KeyError):
    pass


def _check_k(k: int) -> None:
    if k < 0:
        raise ValueError("the horizon K must be non-negative")
    if k > MAX_K:
        raise HorizonTooLarge(f"K={k} does not fit a {MAX_K + 2}-bit prediction word")


def bits(h: int, k: int) -> tuple:
    """``(h[0], ..., h[k])``."""
    return tuple(h >> i & 1 for i in range(k + 1))


def from_bits(seq: Sequence[int]) -> int:
    return sum(1 << i for i, b in enumerate(seq) if b)


def one_step_consistent(h, hs, k: int | None = None) -> bool:
    """The relation between a prediction and its successors' predictions.

    ``h`` and the members of ``hs`` are either bit sequences of length ``K+1``
    or int bitmasks together with an explicit ``k``. Bit 0 of ``h`` is not
    constrained.
    """
    hs = list(hs)
    if k is None:
        k = len(h) - 1
        if any(len(g) != k + 1 for g in hs):
            raise LengthMismatch("prediction vectors differ in length")
        h = from_bits(h)
        hs = [from_bits(g) for g in hs]
    if not hs:
        raise ValueError("the successor prediction set must be nonempty")
    for i in range(1, k + 1):
        if h >> i & 1:
            if not all(g >> (i - 1) & 1 for g in hs):
                return False
        elif all(g >> (i - 1) & 1 for g in hs):
            return False
    return True


def is_secure(belief, k: int) -> bool:
    """A belief is insecure when every member predicts completion at ``k``."""
    return not all(h >> k & 1 for _, h in belief)


def belief_key(belief, k: int) -> tuple:
    """Canonical order: by state index, then prediction bits lexicographically."""
    return tuple((x, bits(h, k)) for x, h in belief)


class YState(NamedTuple):
    belief: tuple
    obs: str


class ZState(NamedTuple):
    belief: tuple


# ---------------------------------------------------------------------------
# product views

class _Index:
    """Integer view of a product used by the enumeration routines."""

    def __init__(self, prod: ProductSystem):
        ts = prod.ts
        self.prod = prod
        self.names = ts.states
        self.pos = {x: i for i, x in enumerate(ts.states)}
        self.succ = [{u: tuple(self.pos[y] for y in ys) for u, ys in ts.succ[x].items()}
                     for x in ts.states]
        self.obs = [ts.obs(x) for x in ts.states]
        self.secret = [x in prod.xf for x in ts.states]
        self.done = [x in prod.xf_or_sink for x in ts.states]


_INDEX_CACHE: dict = {}


def _index(prod: ProductSystem) -> _Index:
    idx = _INDEX_CACHE.get(id(prod))
    if idx is None or idx.prod is not prod:
        idx = _Index(prod)
        _INDEX_CACHE[id(prod)] = idx
    return idx


def candidate_predictions(prod: ProductSystem, x, k: int) -> list:
    """The ``2^k`` currently consistent predictions for product state ``x``."""
    _check_k(k)
    idx = _index(prod)
    i = idx.pos[x] if isinstance(x, str) else x
    base = 1 if idx.secret[i] else 0
    return [base | (rest << 1) for rest in range(1 << k)]


# ---------------------------------------------------------------------------
# transitions

def _column_options(targets, constraints, forced=None):
    """Admissible values of one bit column over ``targets``.

    ``constraints`` holds ``(bit, succ)`` pairs: ``bit=1`` needs every target in
    ``succ`` to be 1, ``bit=0`` needs some target in ``succ`` to be 0.
    """
    n = len(targets)
    pos = {t: i for i, t in enumerate(targets)}
    must = 0
    some_zero = []
    for b, succ in constraints:
        mask = 0
        for t in succ:
            mask |= 1 << pos[t]
        if b:
            must |= mask
        else:
            some_zero.append(mask)
    if forced is not None:
        cands = [forced]
    else:
        free = [i for i in range(n) if not must >> i & 1]
        cands = []
        for r in range(1 << len(free)):
            v = must
            for j, i in enumerate(free):
                if r >> j & 1:
                    v |= 1 << i
            cands.append(v)
    out = []
    for v in cands:
        if v & must != must:
            continue
        if all(~v & m for m in some_zero):
            out.append(v)
    return out


def yz_successors(y: YState, u: str, prod: ProductSystem, k: int,
                  limit: int | None = None) -> set:
    """All Z-states reachable from ``y`` under ``u``.

    The successor state set is fixed by ``u``; predictions are every currently
    consistent, one-step consistent assignment. The relation decomposes by bit
    column (bit ``j`` of the successors only interacts with bit ``j+1`` of the
    predecessors), so columns are solved separately and combined.
    """
    _check_k(k)
    idx = _index(prod)
    per_member = [(h, idx.succ[x].get(u, ())) for x, h in y.belief]
    targets = sorted({t for _, ts in per_member for t in ts})
    if not targets:
        return set()
    if any(not ts for _, ts in per_member):
        # some member has no u-move, so it has no successor predictions to agree with
        return set()
    columns = []
    forced0 = sum(1 << i for i, t in enumerate(targets) if idx.secret[t])
    for j in range(k + 1):
        if j < k:
            cons = [(h >> (j + 1) & 1, ts) for h, ts in per_member]
        else:
            cons = []
        opts = _column_options(targets, cons, forced0 if j == 0 else None)
        if not opts:
            return set()
        columns.append(opts)
    if limit is not None and math.prod(map(len, columns)) > limit:
        raise AesTooLarge(f"more than {limit} prediction assignments")
    out = set()
    for combo in itertools.product(*columns):
        belief = tuple((t, sum((combo[j] >> i & 1) << j for j in range(k + 1)))
                       for i, t in enumerate(targets))
        out.add(ZState(belief))
    return out


def zy_successor(z: ZState, o: str, prod: ProductSystem) -> YState | None:
    idx = _index(prod)
    belief = tuple(e for e in z.belief if idx.obs[e[0]] == o)
    return YState(belief, o) if belief else None


def initial_y_states(prod: ProductSystem, k: int) -> set:
    idx = _index(prod)
    x0 = idx.pos[prod.initial]
    return {YState(((x0, h),), idx.obs[x0])
            for h in candidate_predictions(prod, x0, k) if not h >> k & 1}


def _active(prod: ProductSystem, y: YState) -> tuple:
    idx = _index(prod)
    return tuple(sorted(idx.succ[y.belief[0][0]]))


# ---------------------------------------------------------------------------
# all enforcement structure

@dataclass(eq=False)
class Aes:
    """The largest complete BTS.

    ``yz[y][u]`` is a frozenset of Z-states, ``zy[z][o]`` a Y-state. The raw
    exploration (before completeness pruning) is kept in ``explored_y`` and
    ``explored_z`` for inspection and DOT ghosting.
    """

    prod: ProductSystem
    k: int
    y_states: frozenset
    z_states: frozenset
    yz: dict
    zy: dict
    y0: frozenset
    explored_y: frozenset = frozenset()
    explored_z: frozenset = frozenset()

    def __bool__(self):
        return bool(self.y0)

    def state_names(self, q) -> tuple:
        return tuple(self.prod.states[x] for x, _ in q.belief)

    def describe(self, q) -> str:
        kind = "Y" if isinstance(q, YState) else "Z"
        inner = ", ".join(f"{self.prod.states[x]}:{''.join(map(str, bits(h, self.k)))}"
                          for x, h in q.belief)
        return f"{kind}{{{inner}}}"


def _explore(prod: ProductSystem, k: int, max_nodes: int | None = None):
    y0 = initial_y_states(prod, k)
    yz: dict = {}
    zy: dict = {}
    queue = deque(sorted(y0, key=lambda y: belief_key(y.belief, k)))
    seen = set(y0)
    while queue:
        y = queue.popleft()
        yz[y] = {}
        for u in _active(prod, y):
            zs = frozenset(z for z in yz_successors(y, u, prod, k, max_nodes)
                           if is_secure(z.belief, k))
            yz[y][u] = zs
            for z in zs:
                if z in zy:
                    continue
                zy[z] = {}
                for o in sorted({_index(prod).obs[x] for x, _ in z.belief}):
                    y2 = zy_successor(z, o, prod)
                    if not is_secure(y2.belief, k):
                        zy[z][o] = None
                        continue
                    zy[z][o] = y2
                    if y2 not in seen:
                        seen.add(y2)
                        queue.append(y2)
        if max_nodes is not None and len(seen) + len(zy) > max_nodes:
            raise AesTooLarge(f"more than {max_nodes} BTS states")
    return y0, yz, zy


def _prune(yz, zy, rng: random.Random | None = None):
    """Greatest complete sub-structure: drop incomplete states until stable."""
    alive_y = set(yz)
    alive_z = set(zy)
    z_preds: dict = {}
    y_preds: dict = {}
    for y, d in yz.items():
        for zs in d.values():
            for z in zs:
                y_preds.setdefault(z, set()).add(y)
    for z, d in zy.items():
        for y in d.values():
            if y is not None:
                z_preds.setdefault(y, set()).add(z)

    def y_complete(y):
        return any(zs & alive_z for zs in yz[y].values())

    def z_complete(z):
        return all(y is not None and y in alive_y for y in zy[z].values())

    work = [("y", y) for y in yz] + [("z", z) for z in zy]
    if rng is not None:
        rng.shuffle(work)
    while work:
        if rng is not None:
            i = rng.randrange(len(work))
            work[i], work[-1] = work[-1], work[i]
        kind, q = work.pop()
        if kind == "y":
            if q in alive_y and not y_complete(q):
                alive_y.discard(q)
                work.extend(("z", z) for z in z_preds.get(q, ()) if z in alive_z)
        else:
            if q in alive_z and not z_complete(q):
                alive_z.discard(q)
                work.extend(("y", y) for y in y_preds.get(q, ()) if y in alive_y)
    return alive_y, alive_z


def build_aes(prod: ProductSystem, k: int, rng: random.Random | None = None,
              max_nodes: int | None = None) -> Aes:
    """Explore every input/prediction/observation choice, then prune to completeness.

    ``rng`` only shuffles the pruning order; the result does not depend on it.
    The exploration is exponential in the belief size; ``max_nodes`` bounds it
    and raises :class:`AesTooLarge` when exceeded.
    """
    _check_k(k)
    y0, yz_raw, zy_raw = _explore(prod, k, max_nodes)
    alive_y, alive_z = _prune(yz_raw, zy_raw, rng)
    init = frozenset(y for y in y0 if y in alive_y)
    # keep what the surviving initial states reach
    ys, zs = set(init), set()
    queue = deque(init)
    yz: dict = {}
    zy: dict = {}
    while queue:
        y = queue.popleft()
        yz[y] = {}
        for u, succ in yz_raw[y].items():
            keep = frozenset(z for z in succ if z in alive_z)
            if not keep:
                continue
            yz[y][u] = keep
            for z in keep:
                if z in zs:
                    continue
                zs.add(z)
                zy[z] = dict(zy_raw[z])
                for y2 in zy[z].values():
                    if y2 not in ys:
                        ys.add(y2)
                        queue.append(y2)
    log.debug("AES: explored %d Y / %d Z, kept %d Y / %d Z",
              len(yz_raw), len(zy_raw), len(ys), len(zs))
    return Aes(prod, k, frozenset(ys), frozenset(zs), yz, zy, init,
               frozenset(yz_raw), frozenset(zy_raw))


def attractor(aes: Aes) -> dict:
    """Distance of every AES state to beliefs inside the completed states.

    Y-states pick an input (some successor closer), Z-states face every
    observation (all successors closer). Unreachable targets get ``math.inf``.
    """
    idx = _index(aes.prod)
    dist: dict = {}
    for q in itertools.chain(aes.y_states, aes.z_states):
        if all(idx.done[x] for x, _ in q.belief):
            dist[q] = 0
    level = 0
    while True:
        new = {}
        for y in aes.y_states:
            if y in dist:
                continue
            if any(z in dist for zs in aes.yz[y].values() for z in zs):
                new[y] = level + 1
        for z in aes.z_states:
            if z in dist:
                continue
            if all(y in dist for y in aes.zy[z].values()):
                new[z] = level + 1
        if not new:
            break
        dist.update(new)
        level += 1
    for q in itertools.chain(aes.y_states, aes.z_states):
        dist.setdefault(q, math.inf)
    return dist


# ---------------------------------------------------------------------------
# deterministic BTS and controller

@dataclass(eq=False)
class DetBts:
    """A BTS with a single initial Y-state and exactly one Z-successor per Y-state."""

    prod: ProductSystem
    k: int
    y0: YState
    yz: dict  # YState -> (input, ZState)
    zy: dict  # ZState -> {obs: YState}

    @property
    def y_states(self) -> frozenset:
        return frozenset(self.yz)

    @property
    def z_states(self) -> frozenset:
        return frozenset(self.zy)

    def input_at(self, y: YState) -> str:
        return self.yz[y][0]


def extract(aes: Aes, dist: dict) -> DetBts:
    """Pick one input and prediction per Y-state, walking down ``dist``.

    Ties go to the smallest ``(dist(z), canonical belief, input)``. Once a
    Y-state is at distance 0 any edge to a finite-distance Z-state is kept so
    the closed loop stays live.
    """
    k = aes.k
    starts = sorted((y for y in aes.y0 if dist.get(y, math.inf) < math.inf),
                    key=lambda y: belief_key(y.belief, k))
    if not starts:
        raise NoSolution("no initial belief can force task completion")
    y0 = starts[0]
    yz: dict = {}
    zy: dict = {}
    queue = deque([y0])
    seen = {y0}
    while queue:
        y = queue.popleft()
        d = dist[y]
        best = None
        for u, zs in aes.yz[y].items():
            for z in zs:
                dz = dist[z]
                if dz == math.inf or not (dz < d or d == 0):
                    continue
                key = (dz, belief_key(z.belief, k), u)
                if best is None or key < best[0]:
                    best = (key, u, z)
        assert best is not None, "finite distance without a closer successor"
        _, u, z = best
        yz[y] = (u, z)
        if z not in zy:
            zy[z] = dict(aes.zy[z])
            for y2 in sorted(zy[z].values(), key=lambda q: belief_key(q.belief, k)):
                if y2 not in seen:
                    seen.add(y2)
                    queue.append(y2)
    return DetBts(aes.prod, k, y0, yz, zy)


class Controller:
    """Observation-fed controller decoded from a deterministic BTS.

    ``controller(obs_seq)`` returns the input at the Y-state reached by
    following ``obs_seq`` through the BTS.
    """

    def __init__(self, det: DetBts):
        self.det = det

    def y_state(self, obs_seq: Sequence[str]) -> YState:
        det = self.det
        if not obs_seq or obs_seq[0] != det.y0.obs:
            raise InfeasibleObservation(tuple(obs_seq))
        y = det.y0
        for o in obs_seq[1:]:
            _, z = det.yz[y]
            try:
                y = det.zy[z][o]
            except KeyError:
                raise InfeasibleObservation(tuple(obs_seq)) from None
        return y

    def __call__(self, obs_seq: Sequence[str]) -> str:
        return self.det.input_at(self.y_state(obs_seq))

    def to_mealy(self) -> MealyController:
        """Memory = Y-state ids, plus ``"init"`` before the first observation."""
        ids = self.node_ids()[0]
        det = self.det
        update = {("init", det.y0.obs): ids[det.y0]}
        output = {}
        for y, (u, z) in det.yz.items():
            output[ids[y]] = u
            for o, y2 in det.zy[z].items():
                update[(ids[y], o)] = ids[y2]
        return MealyController("init", update, output)

    def node_ids(self):
        """Stable ``y0, y1, ...`` / ``z0, ...`` names in breadth-first order."""
        det = self.det
        yid = {det.y0: "y0"}
        zid = {}
        queue = deque([det.y0])
        while queue:
            y = queue.popleft()
            _, z = det.yz[y]
            if z not in zid:
                zid[z] = f"z{len(zid)}"
            for o in sorted(det.zy[z]):
                y2 = det.zy[z][o]
                if y2 not in yid:
                    yid[y2] = f"y{len(yid)}"
                    queue.append(y2)
        return yid, zid

    def to_json(self) -> dict:
        det = self.det
        names = det.prod.states
        yid, zid = self.node_ids()

        def enc(belief):
            return [{"state": names[x], "pred": list(bits(h, det.k))} for x, h in belief]

        return {
            "format": "unpred-controller",
            "k": det.k,
            "initial": "y0",
            "y_nodes": {yid[y]: {"belief": enc(y.belief), "obs": y.obs,
                                 "input": det.yz[y][0], "next": zid[det.yz[y][1]]}
                        for y in yid},
            "z_nodes": {zid[z]: {"belief": enc(z.belief),
                                 "next": {o: yid[y] for o, y in sorted(det.zy[z].items())}}
                        for z in zid},
        }

    @classmethod
    def from_json(cls, data: dict, prod: ProductSystem) -> "Controller":
        if data.get("format") != "unpred-controller":
            raise ValueError("not a controller file")
        k = int(data["k"])
        pos = {x: i for i, x in enumerate(prod.states)}

        def dec(items):
            return tuple(sorted((pos[e["state"]], from_bits(e["pred"])) for e in items))

        ys = {n: YState(dec(v["belief"]), v["obs"]) for n, v in data["y_nodes"].items()}
        zs = {n: ZState(dec(v["belief"])) for n, v in data["z_nodes"].items()}
        yz = {ys[n]: (v["input"], zs[v["next"]]) for n, v in data["y_nodes"].items()}
        zy = {zs[n]: {o: ys[t] for o, t in v["next"].items()} for n, v in data["z_nodes"].items()}
        return cls(DetBts(prod, k, ys[data["initial"]], yz, zy))


def decode(det: DetBts) -> Controller:
    return Controller(det)


@dataclass
class SynthesisResult:
    aes: Aes
    dist: dict
    det: DetBts | None = None
    controller: Controller | None = None

    @property
    def ok(self) -> bool:
        return self.controller is not None


def synthesize(prod: ProductSystem, k: int, max_nodes: int | None = None) -> SynthesisResult:
    """Build the AES and decode a controller from its reachability game.

    A result without controller means no controller can guarantee completion
    while staying ``k``-step unpredictable.
    """
    aes = build_aes(prod, k, max_nodes=max_nodes)
    dist = attractor(aes)
    try:
        det = extract(aes, dist)
    except NoSolution:
        return SynthesisResult(aes, dist)
    return SynthesisResult(aes, dist, det, decode(det))
