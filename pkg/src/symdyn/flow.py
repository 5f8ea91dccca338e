"""Integer flows on super-tile grid graphs.

A super-tile flow graph has the N x N grid vertices ``v = y*N + x`` linked to
their four neighbours by arcs of capacity ``rho`` in both directions, a
source ``s = N*N`` with arcs of capacity in ``[1, rho]`` to some vertices and
a sink ``p = N*N + 1`` receiving one unit arc per listed sink vertex.  Flows
are exact integers; the maximum flow is computed with shortest augmenting
paths (Edmonds-Karp) in a numba kernel.
"""

from __future__ import annotations

import json
import random
from collections import Counter
from dataclasses import dataclass, field

import numpy as np

from ._jit import njit

# Side ids as seen from a vertex: the neighbour lies to the West, North, East or South.
W, N_, E, S = 0, 1, 2, 3
SIDE_NAMES = ("W", "N", "E", "S")
_DELTA = {W: (-1, 0), N_: (0, 1), E: (1, 0), S: (0, -1)}


class InvalidGraph(ValueError):
    pass


@dataclass(frozen=True)
class SuperTileFlowGraph:
    n: int
    rho: int
    sources: dict  # (x, y) -> capacity
    sinks: tuple  # multiset of (x, y)
    seed: int | None = field(default=None, compare=False)

    @property
    def F(self) -> int:
        return sum(self.sources.values())

    @property
    def s(self) -> int:
        return self.n * self.n

    @property
    def p(self) -> int:
        return self.n * self.n + 1

    def vid(self, x: int, y: int) -> int:
        return y * self.n + x

    def xy(self, v: int) -> tuple[int, int]:
        return v % self.n, v // self.n

    def arcs(self) -> dict[tuple[int, int], int]:
        """All arcs with capacities (parallel sink arcs merged)."""
        out: dict[tuple[int, int], int] = {}
        n = self.n
        for y in range(n):
            for x in range(n):
                for dx, dy in _DELTA.values():
                    if 0 <= x + dx < n and 0 <= y + dy < n:
                        out[(self.vid(x, y), self.vid(x + dx, y + dy))] = self.rho
        for (x, y), c in self.sources.items():
            out[(self.s, self.vid(x, y))] = c
        for (x, y), c in Counter(self.sinks).items():
            out[(self.vid(x, y), self.p)] = c
        return out

    def capacity_matrix(self) -> np.ndarray:
        m = np.zeros((self.n * self.n + 2,) * 2, dtype=np.int64)
        for (u, v), c in self.arcs().items():
            m[u, v] = c
        return m

    def to_json(self) -> str:
        return json.dumps(
            {
                "n": self.n,
                "rho": self.rho,
                "sources": [[x, y, c] for (x, y), c in sorted(self.sources.items())],
                "sinks": [list(v) for v in self.sinks],
                "seed": self.seed,
            }
        )

    @classmethod
    def from_json(cls, text: str) -> "SuperTileFlowGraph":
        d = json.loads(text)
        return cls(
            d["n"],
            d["rho"],
            {(x, y): c for x, y, c in d["sources"]},
            tuple(tuple(v) for v in d["sinks"]),
            d.get("seed"),
        )

    def to_dot(self, flow: "Flow | None" = None) -> str:
        names = {self.s: "s", self.p: "p"}
        lines = ["digraph G {"]
        for (u, v), c in sorted(self.arcs().items()):
            a = names.get(u, "v%d_%d" % self.xy(u))
            b = names.get(v, "v%d_%d" % self.xy(v))
            label = f"{flow.values.get((u, v), 0)}/{c}" if flow else str(c)
            lines.append(f'  {a} -> {b} [label="{label}"];')
        lines.append("}")
        return "\n".join(lines)


@dataclass(frozen=True)
class Validation:
    ok: bool
    violations: tuple[str, ...] = ()

    def __bool__(self) -> bool:
        return self.ok


def _square_max(grid: np.ndarray, c: int) -> tuple[int, tuple[int, int]]:
    """Largest sum over c x c sub-squares (via 2D prefix sums) and its corner."""
    pre = np.zeros((grid.shape[0] + 1, grid.shape[1] + 1), dtype=np.int64)
    pre[1:, 1:] = grid.cumsum(0).cumsum(1)
    sums = pre[c:, c:] - pre[:-c, c:] - pre[c:, :-c] + pre[:-c, :-c]
    idx = np.unravel_index(int(np.argmax(sums)), sums.shape)
    return int(sums[idx]), (int(idx[1]), int(idx[0]))


def validate(g: SuperTileFlowGraph) -> Validation:
    """Check the defining conditions; violations are reported, not raised."""
    bad = []
    if g.n < 1 or g.rho < 1:
        bad.append("grid side and capacity must be positive")
        return Validation(False, tuple(bad))
    inside = lambda v: 0 <= v[0] < g.n and 0 <= v[1] < g.n  # noqa: E731
    for v, c in g.sources.items():
        if not inside(v):
            bad.append(f"source arc to {v} outside the grid")
        if not 1 <= c <= g.rho:
            bad.append(f"source capacity {c} at {v} not in [1, {g.rho}]")
    for v in g.sinks:
        if not inside(v):
            bad.append(f"sink arc from {v} outside the grid")
    if len(g.sinks) != g.F:
        bad.append(f"{len(g.sinks)} sink arcs but source capacity F = {g.F}")
    if bad:
        return Validation(False, tuple(bad))
    src = np.zeros((g.n, g.n), dtype=np.int64)
    snk = np.zeros((g.n, g.n), dtype=np.int64)
    for (x, y), c in g.sources.items():
        src[y, x] += c
    for x, y in g.sinks:
        snk[y, x] += 1
    for c in range(1, g.n + 1):
        for name, grid in (("source", src), ("sink", snk)):
            m, corner = _square_max(grid, c)
            if m > g.rho * c:
                bad.append(f"{name} total {m} in the {c}x{c} square at {corner} exceeds {g.rho * c}")
    return Validation(not bad, tuple(bad))


@dataclass(frozen=True)
class Flow:
    values: dict  # (u, v) -> positive integer

    def value(self, g: SuperTileFlowGraph) -> int:
        return sum(f for (u, _), f in self.values.items() if u == g.s)

    def check(self, g: SuperTileFlowGraph) -> bool:
        arcs = g.arcs()
        if any(a not in arcs or not 0 <= f <= arcs[a] for a, f in self.values.items()):
            return False
        bal = Counter()
        for (u, v), f in self.values.items():
            bal[u] -= f
            bal[v] += f
        return all(bal[v] == 0 for v in range(g.n * g.n))


@njit
def _edmonds_karp(cap, s, t):
    n = cap.shape[0]
    flow = np.zeros((n, n), dtype=np.int64)
    parent = np.empty(n, dtype=np.int64)
    queue = np.empty(n, dtype=np.int64)
    total = 0
    while True:
        for i in range(n):
            parent[i] = -1
        parent[s] = s
        head = 0
        tail = 0
        queue[tail] = s
        tail += 1
        while head < tail and parent[t] == -1:
            u = queue[head]
            head += 1
            for v in range(n):
                if parent[v] == -1 and cap[u, v] - flow[u, v] > 0:
                    parent[v] = u
                    queue[tail] = v
                    tail += 1
        if parent[t] == -1:
            return total, flow
        inc = np.int64(1) << 60
        v = t
        while v != s:
            u = parent[v]
            r = cap[u, v] - flow[u, v]
            if r < inc:
                inc = r
            v = u
        v = t
        while v != s:
            u = parent[v]
            flow[u, v] += inc
            flow[v, u] -= inc
            v = u
        total += inc


def max_flow(g: SuperTileFlowGraph) -> Flow:
    """Maximum s-p flow; for a valid graph its value is exactly F."""
    v = validate(g)
    if not v:
        raise InvalidGraph("; ".join(v.violations))
    total, net = _edmonds_karp(g.capacity_matrix(), g.s, g.p)
    us, vs = np.nonzero(net > 0)
    return Flow({(int(a), int(b)): int(net[a, b]) for a, b in zip(us, vs)})


def cut_value(g: SuperTileFlowGraph, source_side: set[int]) -> int:
    """Capacity of arcs leaving ``source_side`` (which must contain s and not p)."""
    return sum(c for (u, v), c in g.arcs().items() if u in source_side and v not in source_side)


@dataclass(frozen=True)
class CutReport:
    value: int
    source_cut: int
    sink_cut: int
    exhaustive_min: int | None
    minimal_sets: tuple = ()


def _all_cut_values(g: SuperTileFlowGraph) -> np.ndarray:
    """Cut value for each subset of grid vertices joined to the source side (bit mask order)."""
    nv = g.n * g.n
    cap = g.capacity_matrix()
    masks = np.arange(1 << nv, dtype=np.int64)
    member = ((masks[:, None] >> np.arange(nv)) & 1).astype(bool)  # subset x vertex
    side = np.zeros((len(masks), nv + 2), dtype=bool)
    side[:, :nv] = member
    side[:, g.s] = True
    a = side.astype(np.int64)
    # arcs from the source side to the complement
    return np.einsum("ku,uv,kv->k", a, cap, 1 - a)


def min_cut_check(g: SuperTileFlowGraph, exhaustive_limit: int = 3) -> CutReport:
    """F, the two canonical cuts, and (for N <= limit) the exhaustive minimum."""
    v = validate(g)
    if not v:
        raise InvalidGraph("; ".join(v.violations))
    everything = set(range(g.n * g.n)) | {g.s}
    src_cut = cut_value(g, {g.s})
    snk_cut = cut_value(g, everything)
    ex = None
    minimal = ()
    if g.n <= exhaustive_limit:
        vals = _all_cut_values(g)
        ex = int(vals.min())
        minimal = tuple(int(m) for m in np.nonzero(vals == ex)[0])
    return CutReport(g.F, src_cut, snk_cut, ex, minimal)


@dataclass(frozen=True)
class Decomposition:
    paths: tuple  # tuples of vertices from s to p
    cycles: tuple  # tuples of vertices, first vertex not repeated

    def reconstruct(self) -> Counter:
        out = Counter()
        for walk in self.paths:
            for a in zip(walk, walk[1:]):
                out[a] += 1
        for cyc in self.cycles:
            for a in zip(cyc, cyc[1:] + cyc[:1]):
                out[a] += 1
        return out


def decompose(g: SuperTileFlowGraph, f: Flow) -> Decomposition:
    """Peel elementary s-p paths, then elementary cycles, off an integer flow."""
    if not f.check(g):
        raise InvalidGraph("not a valid flow on this graph")
    rem = Counter({a: c for a, c in f.values.items() if c > 0})
    out_arcs: dict[int, list[int]] = {}
    for u, v in sorted(rem):
        out_arcs.setdefault(u, []).append(v)

    def next_of(u):
        for v in out_arcs.get(u, ()):
            if rem[(u, v)] > 0:
                return v
        return None

    def take(walk, closed):
        pairs = list(zip(walk, walk[1:] + (walk[:1] if closed else [])))
        for a in pairs:
            rem[a] -= 1

    paths, cycles = [], []
    while next_of(g.s) is not None:
        walk = [g.s]
        pos = {g.s: 0}
        while walk[-1] != g.p:
            v = next_of(walk[-1])
            if v in pos:  # a cycle inside the walk: peel it and continue
                cyc = walk[pos[v]:]
                take(cyc, True)
                cycles.append(tuple(cyc))
                for w in cyc[1:]:
                    del pos[w]
                walk = walk[: pos[v] + 1]
                continue
            pos[v] = len(walk)
            walk.append(v)
        take(walk, False)
        paths.append(tuple(walk))
    for start in sorted({u for (u, _), c in rem.items() if c > 0}):
        while next_of(start) is not None:
            walk = [start]
            pos = {start: 0}
            while True:
                v = next_of(walk[-1])
                if v in pos:
                    cyc = walk[pos[v]:]
                    take(cyc, True)
                    cycles.append(tuple(cyc))
                    break
                pos[v] = len(walk)
                walk.append(v)
    return Decomposition(tuple(paths), tuple(cycles))


def add_cycle(f: Flow, cycle: list[int]) -> Flow:
    vals = dict(f.values)
    for a in zip(cycle, cycle[1:] + cycle[:1]):
        vals[a] = vals.get(a, 0) + 1
    return Flow(vals)


# --------------------------------------------------------------------------
# Random instances
# --------------------------------------------------------------------------


def random_valid_graph(n: int, rho: int, seed: int, max_tries: int = 10_000, density: float = 0.5) -> SuperTileFlowGraph:
    """Rejection-sample a valid graph; the seed is stored on the result."""
    rng = random.Random(seed)
    cells = [(x, y) for y in range(n) for x in range(n)]
    for _ in range(max_tries):
        sources = {}
        for v in cells:
            if rng.random() < density:
                sources[v] = rng.randint(1, rho)
        if not sources:
            continue
        F = sum(sources.values())
        sinks = tuple(rng.choice(cells) for _ in range(F))
        g = SuperTileFlowGraph(n, rho, sources, sinks, seed)
        if validate(g):
            return g
        density *= 0.97
    raise RuntimeError("rejection sampling did not find a valid graph")


# --------------------------------------------------------------------------
# Routing of black points (arrow tables)
# --------------------------------------------------------------------------


def side_between(a: tuple[int, int], b: tuple[int, int]) -> int:
    """Side of ``a`` through which one reaches the neighbour ``b``."""
    d = (b[0] - a[0], b[1] - a[1])
    for side, delta in _DELTA.items():
        if delta == d:
            return side
    raise ValueError(f"{a} and {b} are not neighbours")


def arrow_id(entering: int | None, leaving: int | None) -> int:
    """Arrow kind 1..20: 1-4 outgoing only, 5-16 transit, 17-20 incoming only.

    A degenerate commodity (produced where it is consumed) has neither side
    and is encoded as the first incoming-only arrow, 17.
    """
    if entering is None and leaving is None:
        return 17
    if entering is None:
        return 1 + leaving
    if leaving is None:
        return 17 + entering
    if entering == leaving:
        raise ValueError("an arrow cannot leave through the side it entered")
    others = [s for s in range(4) if s != entering]
    return 5 + entering * 3 + others.index(leaving)


def arrow_sides(aid: int) -> tuple[int | None, int | None]:
    if 1 <= aid <= 4:
        return None, aid - 1
    if 5 <= aid <= 16:
        entering, idx = divmod(aid - 5, 3)
        return entering, [s for s in range(4) if s != entering][idx]
    if 17 <= aid <= 20:
        return aid - 17, None
    raise ValueError(aid)


@dataclass(frozen=True)
class Routing:
    paths: tuple  # per commodity: tuple of (x, y) grid positions
    tables: dict  # (x, y) -> list of (commodity, arrow id)
    parasites: tuple = ()


def route_points(n: int, rho: int, production: dict, slots: list) -> Routing:
    """Assign every produced unit an elementary grid path to a consumption slot."""
    g = SuperTileFlowGraph(n, rho, dict(production), tuple(tuple(v) for v in slots))
    v = validate(g)
    if not v:
        raise InvalidGraph("infeasible: " + "; ".join(v.violations))
    dec = decompose(g, max_flow(g))
    paths = []
    tables: dict = {}
    for k, walk in enumerate(dec.paths):
        cells = [g.xy(u) for u in walk[1:-1]]
        paths.append(tuple(cells))
        for i, c in enumerate(cells):
            entering = side_between(c, cells[i - 1]) if i > 0 else None
            leaving = side_between(c, cells[i + 1]) if i + 1 < len(cells) else None
            tables.setdefault(c, []).append((k, arrow_id(entering, leaving)))
    parasites = tuple(tuple(g.xy(u) for u in cyc) for cyc in dec.cycles)
    return Routing(tuple(paths), tables, parasites)


def exhaustive_cut_subsets(n: int):
    """All subsets of grid vertices, as sets, in bit-mask order (small n only)."""
    nv = n * n
    for m in range(1 << nv):
        yield {v for v in range(nv) if m >> v & 1}


def connected_components(vertices: set[int], n: int) -> list[set[int]]:
    seen: set[int] = set()
    comps = []
    for v in sorted(vertices):
        if v in seen:
            continue
        comp = {v}
        stack = [v]
        seen.add(v)
        while stack:
            u = stack.pop()
            x, y = u % n, u // n
            for dx, dy in _DELTA.values():
                if 0 <= x + dx < n and 0 <= y + dy < n:
                    w = (y + dy) * n + x + dx
                    if w in vertices and w not in seen:
                        seen.add(w)
                        comp.add(w)
                        stack.append(w)
        comps.append(comp)
    return comps


def bounding_is_whole_grid(comp: set[int], n: int) -> bool:
    xs = [v % n for v in comp]
    ys = [v // n for v in comp]
    return min(xs) == 0 and min(ys) == 0 and max(xs) == n - 1 and max(ys) == n - 1

