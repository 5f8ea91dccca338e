"""A tileset that simulates another tileset with zoom N.

Every tile of the simulating set knows its coordinates modulo N (they are
written in its edge labels), so a tiling splits uniquely into N x N
super-tiles.  Inside a super-tile, each position has a fixed role:

* cable cells carry one bit between two designated edges; ``4q`` cables
  bring the bits of the four side colors (the super-colors) to the bottom
  row of the computation zone;
* the computation zone (``N - q`` wide, rows ``2q .. N - q - 1``) holds three
  space-time diagrams stacked vertically:

  - collector I (``4q`` rows): its second head sweeps the ``4q`` arrived
    bits, and whenever it stands on a used bit the first head writes that
    bit right after the program, the bit travelling along a horizontal bus;
  - checker U (``hU`` rows): a one-head machine reads the ``4q'`` collected
    bits and walks a trie of the simulated tiles' codes; only accepting
    runs can be tiled;
  - A (the rest): the identity automaton, copying the tape upwards;

* the first ``k`` cells of the zone's bottom row are program literals that
  exist in a single copy each; everything else is a construction block.

Head positions of I and U are functions of (x, time), so the tiles only
carry tape symbols, bus bits and the checker's state.  Edge labels are
``("v", x, y, payload)`` for vertical edges (coordinates of the tile to the
east) and ``("h", x, y, payload)`` for horizontal edges (tile to the north).
Super-tile border edges carry a bit: the side color bit for the ``q``
carrier positions of each side and 0 elsewhere.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Hashable, Sequence

import numpy as np

from .wang import Boundary, WangTileSet, count_tilings, first_tiling

ALPH = (0, 1, "a", "b")  # tape symbols: bits, and the program's two letters
_DIRS = {"N": (0, 1), "E": (1, 0), "S": (0, -1), "W": (-1, 0)}
FAMILIES = ("left", "bottom", "right", "top")


class SizingError(ValueError):
    """The geometry cannot host the construction; the message names the budget."""


# --------------------------------------------------------------------------
# Geometry
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class SimGeometry:
    N: int
    q: int
    qp: int = 1  # payload bits per side color
    k: int = 0  # program length
    hU: int | None = None  # checker rows; defaults to q

    def __post_init__(self):
        if self.hU is None:
            object.__setattr__(self, "hU", self.q)

    @classmethod
    def default(cls, N: int, qp: int = 1, k: int = 0) -> "SimGeometry":
        if N % 16:
            raise SizingError(f"N = {N} must be divisible by 16 for the default geometry")
        return cls(N, N // 16, qp, k)

    # zone boxes as (x0, y0, width, height)
    @property
    def zone(self) -> tuple[int, int, int, int]:
        return (0, 2 * self.q, self.N - self.q, self.N - 3 * self.q)

    @property
    def bottom_zone(self):
        return (0, 2 * self.q, self.N - self.q, 4 * self.q)

    @property
    def central_zone(self):
        return (0, 6 * self.q, self.N - self.q, self.hU)

    @property
    def top_zone(self):
        y0 = 6 * self.q + self.hU
        return (0, y0, self.N - self.q, self.N - self.q - y0)

    @property
    def memory_width(self) -> int:
        return self.N - 6 * self.q

    @property
    def data(self) -> int:
        return 4 * self.qp

    def problems(self) -> list[str]:
        """Violated budgets (empty when the construction fits)."""
        N, q = self.N, self.q
        out = []
        if q < 1 or self.qp < 1:
            out.append("q and q' must be positive")
            return out
        if self.qp > q:
            out.append(f"payload q' = {self.qp} exceeds the super-color width q = {q}")
        if self.k + self.data > q:
            out.append(f"program ({self.k}) plus collected bits ({self.data}) exceed the q = {q} cells the checker may use")
        if N - q < 5 * q:
            out.append(f"zone width N - q = {N - q} cannot hold the program field and 4q arrival cells ({5 * q})")
        if self.hU < self.data + 1:
            out.append(f"checker rows hU = {self.hU} below the {self.data + 1} steps the checker needs")
        if self.top_zone[3] < 1:
            out.append(f"no room left for the top zone: 6q + hU = {6 * q + self.hU} >= N - q = {N - q}")
        return out

    def check(self) -> None:
        bad = self.problems()
        if bad:
            raise SizingError("; ".join(bad))

    def in_default_regime(self) -> bool:
        return self.N % 16 == 0 and self.q == self.N // 16 and self.hU == self.q

    # used (payload) positions on the zone's bottom row, by family
    def used_positions(self) -> list[tuple[int, str, int]]:
        """(x, family, bit index) for the 4q' payload arrivals, sorted by x."""
        q, p = self.q, self.qp
        out = [(2 * q - 1 - j, "left", j) for j in range(p)]
        out += [(2 * q + i, "bottom", i) for i in range(p)]
        out += [(3 * q + j, "right", j) for j in range(p)]
        out += [(5 * q - 1 - i, "top", i) for i in range(p)]
        return sorted(out)

    def is_used(self, x: int) -> bool:
        q, p = self.q, self.qp
        return 2 * q - p <= x < 2 * q + p or 3 * q <= x < 3 * q + p or 5 * q - p <= x < 5 * q

    def used_before(self, x: int) -> int:
        """Number of used positions strictly left of x (closed form)."""
        q, p = self.q, self.qp
        clip = lambda a, b: max(0, min(x, b) - a)  # noqa: E731
        return clip(2 * q - p, 2 * q + p) + clip(3 * q, 3 * q + p) + clip(5 * q - p, 5 * q)


def smallest_geometry(codes_count: int = 1, qp: int = 1) -> SimGeometry:
    """Smallest override geometry for a simulated set with this many codes.

    The program literals (k cells) and the collected bits (4q') must fit in
    the q cells the checker uses, so q >= k + 4q'.  For a one-tile set this
    gives q = 8 and N = 62; smaller zooms such as 32 or 48 cannot host the
    construction, which is why tile counts are measured at N = 64, 80, 96.
    """
    k = 4 * qp * codes_count
    q = k + 4 * qp
    hU = 4 * qp + 1
    N = max(6 * q, 6 * q + hU + 1 + q)
    return SimGeometry(N, q, qp, k, hU)


# --------------------------------------------------------------------------
# Cable routes
# --------------------------------------------------------------------------


def route_waypoints(g: SimGeometry, family: str, i: int) -> list[tuple[int, int]]:
    """Polyline from just outside the border to just inside the zone."""
    N, q = g.N, g.q
    if family == "top":
        return [(q + i, N), (q + i, N - q + i), (N - q + i, N - q + i), (N - q + i, 2 * q - 1 - i), (5 * q - 1 - i, 2 * q - 1 - i), (5 * q - 1 - i, 2 * q)]
    if family == "right":
        return [(N, i), (3 * q + i, i), (3 * q + i, 2 * q)]
    if family == "bottom":
        return [(q + i, -1), (q + i, q - 1 - i), (2 * q + i, q - 1 - i), (2 * q + i, 2 * q)]
    if family == "left":
        return [(-1, i), (q - 1 - i, i), (q - 1 - i, q + i), (2 * q - 1 - i, q + i), (2 * q - 1 - i, 2 * q)]
    raise ValueError(family)


def _direction(p, r) -> str:
    dx = (r[0] > p[0]) - (r[0] < p[0])
    dy = (r[1] > p[1]) - (r[1] < p[1])
    for name, d in _DIRS.items():
        if d == (dx, dy):
            return name
    raise ValueError("degenerate segment")


def route_cells(g: SimGeometry, family: str, i: int) -> list[tuple[tuple[int, int], frozenset]]:
    """Cells of one cable in order, each with its two designated edges (by tracing)."""
    pts = route_waypoints(g, family, i)
    cells = []
    for a, b in zip(pts, pts[1:]):
        d = _DIRS[_direction(a, b)]
        c = a
        while c != b:
            c = (c[0] + d[0], c[1] + d[1])
            cells.append(c)
    cells = cells[:-1]  # the last point lies inside the zone
    seq = [pts[0]] + cells + [pts[-1]]
    out = []
    for j in range(1, len(seq) - 1):
        out.append((seq[j], frozenset((_direction(seq[j], seq[j - 1]), _direction(seq[j], seq[j + 1])))))
    return out


@dataclass(frozen=True)
class CellRole:
    kind: str  # carrier | cable | literal | input | I | U | A | block
    family: str | None = None
    index: int | None = None
    edges: frozenset = frozenset()
    time: int | None = None


def _on_route(g: SimGeometry, family: str, x: int, y: int):
    """Closed form: (index, designated edges, is carrier) if (x, y) lies on a cable of ``family``.

    Every segment keeps one coordinate equal to ``c0 + slope * i``, so the
    cable index is solved from that coordinate; no route is traced.
    """
    w0 = route_waypoints(g, family, 0)
    w1 = route_waypoints(g, family, 1)
    for s in range(len(w0) - 1):
        axis = 0 if w0[s][0] == w0[s + 1][0] else 1  # 0: vertical segment (x fixed)
        c0, slope = w0[s][axis], w1[s][axis] - w0[s][axis]
        i, r = divmod((x, y)[axis] - c0, slope)
        if r or not 0 <= i < g.q:
            continue
        pts = route_waypoints(g, family, i)
        a, b = pts[s], pts[s + 1]
        other = 1 - axis
        lo, hi = sorted((a[other], b[other]))
        c = (x, y)
        if not lo <= c[other] <= hi or c == a or (c == b and s + 1 == len(pts) - 1):
            continue
        prev = _direction(c, a)
        nxt = _direction(c, pts[s + 2]) if c == b else _direction(c, b)
        step = _DIRS[_direction(a, b)]
        return i, frozenset((prev, nxt)), s == 0 and c == (a[0] + step[0], a[1] + step[1])
    return None


def classify_cell(x: int, y: int, g: SimGeometry) -> CellRole:
    """Role of position (x, y); a pure function of the coordinates and the geometry."""
    if not (0 <= x < g.N and 0 <= y < g.N):
        raise ValueError(f"({x}, {y}) outside the {g.N} x {g.N} super-tile")
    for fam in FAMILIES:
        hit = _on_route(g, fam, x, y)
        if hit is not None:
            i, edges, first = hit
            return CellRole("carrier" if first else "cable", fam, i, edges)
    zx, zy, zw, zh = g.zone
    if x < zw and zy <= y < zy + zh:
        if y == zy:
            if x < g.k:
                return CellRole("literal", index=x)
            return CellRole("input", time=0)
        if y < 6 * g.q:
            return CellRole("I", time=y - zy)
        if y < 6 * g.q + g.hU:
            return CellRole("U", time=y - 6 * g.q)
        return CellRole("A", time=y - 6 * g.q - g.hU)
    return CellRole("block")


def role_map(g: SimGeometry) -> dict:
    return {(x, y): classify_cell(x, y, g) for y in range(g.N) for x in range(g.N)}


# --------------------------------------------------------------------------
# The simulated tileset and its codes
# --------------------------------------------------------------------------


def color_bits(rho: WangTileSet) -> int:
    return max(1, math.ceil(math.log2(max(len(rho.colors), 1))))


def color_code(c: int, qp: int) -> tuple:
    return tuple((c >> j) & 1 for j in range(qp))


def side_bits(rho: WangTileSet, t, qp: int) -> dict:
    """Payload bits of each side for a tile of rho: family -> tuple indexed by bit index."""
    return {"top": color_code(t.north, qp), "right": color_code(t.east, qp), "bottom": color_code(t.south, qp), "left": color_code(t.west, qp)}


def collected_code(g: SimGeometry, bits: dict) -> tuple:
    """The 4q' bits as the collector writes them (order of the arrival columns)."""
    return tuple(bits[fam][i] for _, fam, i in g.used_positions())


def program_of(codes: Sequence[tuple]) -> tuple:
    """Program literal: the accepted codes, letters ``a``/``b`` for 0/1."""
    return tuple("ab"[b] for c in sorted(codes) for b in c)


def one_tile_rho() -> WangTileSet:
    return WangTileSet(("c",), ((0, 0, 0, 0),))


def two_tile_rho() -> WangTileSet:
    """Two tiles; horizontal neighbours alternate, vertical colors are constant."""
    return WangTileSet(("0", "1"), ((0, 0, 0, 1), (0, 1, 0, 0)))


# --------------------------------------------------------------------------
# Tile generation and the membership predicate
# --------------------------------------------------------------------------


@dataclass
class Simulation:
    geom: SimGeometry
    rho: WangTileSet
    codes: frozenset
    program: tuple
    prefixes: tuple  # prefixes[length] = set of code prefixes of that length
    tileset: WangTileSet | None = None

    @property
    def N(self) -> int:
        return self.geom.N


def _prepare(rho: WangTileSet, N: int | None, q: int | None, qp: int | None, hU: int | None) -> Simulation:
    qp = qp or color_bits(rho)
    if qp < color_bits(rho):
        raise SizingError(f"q' = {qp} bits cannot name the {len(rho.colors)} colors of the simulated set")
    probe = SimGeometry(16, 1, qp)
    codes_probe = {collected_code(probe, side_bits(rho, t, qp)) for t in rho.tiles}
    k = 4 * qp * len(codes_probe)
    if N is None:
        g0 = smallest_geometry(len(codes_probe), qp)
        N, q, hU = g0.N, g0.q, g0.hU
    if q is None:
        g = SimGeometry.default(N, qp, k)
    else:
        g = SimGeometry(N, q, qp, k, hU)
    g.check()
    codes = frozenset(collected_code(g, side_bits(rho, t, qp)) for t in rho.tiles)
    prefixes = tuple(frozenset(c[:n] for c in codes) for n in range(g.data + 1))
    return Simulation(g, rho, codes, program_of(codes), prefixes)


def _border_sides(g: SimGeometry, x: int, y: int) -> set:
    out = set()
    if x == 0:
        out.add("W")
    if x == g.N - 1:
        out.add("E")
    if y == 0:
        out.add("S")
    if y == g.N - 1:
        out.add("N")
    return out


def _raw_payloads(sim: Simulation, x: int, y: int, role: CellRole):
    """Generator of (pn, pe, ps, pw) before border edges are set to 0."""
    g = sim.geom
    if role.kind in ("carrier", "cable"):
        bits = (0,) if role.index >= g.qp else (0, 1)
        for b in bits:
            p = {s: (b if s in role.edges else None) for s in "NESW"}
            yield (p["N"], p["E"], p["S"], p["W"])
        return
    if role.kind == "block":
        yield (None, None, None, None)
        return
    if role.kind == "literal":
        yield (sim.program[role.index], None, None, None)
        return
    if role.kind in ("input", "I"):
        t = role.time
        x2 = g.q + t
        used = g.is_used(x2)
        x1 = g.k + g.used_before(x2)
        if role.kind == "input":
            if g.q <= x < 5 * g.q:
                options = [(b, b) for b in (0, 1)]  # (south payload, content)
            else:
                options = [(None, 0)]
        else:
            options = [(s, s) for s in ALPH]
        for ps, s in options:
            if used and x == x2:
                if s in (0, 1):
                    yield (s, None, ps, s)
            elif used and x1 < x < x2:
                for b in (0, 1):
                    yield (s, b, ps, b)
            elif used and x == x1:
                for b in (0, 1):
                    yield (b, b, ps, None)
            else:
                yield (s, None, ps, None)
        return
    if role.kind == "U":
        u = role.time
        D = g.data
        last = u == g.hU - 1
        xh = g.k + min(u, D)
        if u < D and x == xh:
            for st in sorted(sim.prefixes[u]):
                for s in (0, 1):
                    nst = st + (s,)
                    if nst in sim.prefixes[u + 1]:
                        yield (s, nst, s if u == 0 else (s, st), None)
        elif u < D and x == xh + 1:
            for st in sorted(sim.prefixes[u + 1]):
                for s in ALPH:
                    yield ((s, st), None, s, st)
        elif u >= D and x == xh:
            for st in sorted(sim.codes):
                for s in ALPH:
                    yield (s if last else (s, st), None, (s, st), None)
        else:
            for s in ALPH:
                yield (s, None, s, None)
        return
    if role.kind == "A":
        last = role.time == g.top_zone[3] - 1
        for s in ALPH:
            yield (None if last else s, None, s, None)
        return
    raise ValueError(role)


def _labels(g: SimGeometry, x: int, y: int, pay) -> tuple:
    N = g.N
    pn, pe, ps, pw = pay
    border = _border_sides(g, x, y)
    fix = lambda side, p: 0 if side in border and p is None else p  # noqa: E731
    return (
        ("h", x, (y + 1) % N, fix("N", pn)),
        ("v", (x + 1) % N, y, fix("E", pe)),
        ("h", x, y, fix("S", ps)),
        ("v", x, y, fix("W", pw)),
    )


def tiles_at(sim: Simulation, x: int, y: int) -> list[tuple]:
    """All label quadruples (north, east, south, west) allowed at position (x, y)."""
    role = classify_cell(x, y, sim.geom)
    return [_labels(sim.geom, x, y, p) for p in _raw_payloads(sim, x, y, role)]


def membership(sim: Simulation, n: Hashable, e: Hashable, s: Hashable, w: Hashable) -> bool:
    """Is this quadruple a tile?  Decided from the labels alone, without the tile list.

    The coordinates are read from the west label; the role is computed in
    closed form; the payload rules of that role are then checked directly.
    """
    g, N = sim.geom, sim.geom.N
    try:
        (tn, xn, yn, pn), (te, xe, ye, pe), (ts, xs, ys, ps), (tw, x, y, pw) = n, e, s, w
    except (TypeError, ValueError):
        return False
    if (tn, te, ts, tw) != ("h", "v", "h", "v") or not (0 <= x < N and 0 <= y < N):
        return False
    if (xs, ys) != (x, y) or (xe, ye) != ((x + 1) % N, y) or (xn, yn) != (x, (y + 1) % N):
        return False
    role = classify_cell(x, y, g)
    pay = {"N": pn, "E": pe, "S": ps, "W": pw}
    designated = role.edges if role.kind in ("carrier", "cable") else frozenset()
    for side in _border_sides(g, x, y):
        if side not in designated:
            if pay[side] != 0:
                return False
            pay[side] = None
    pn, pe, ps, pw = pay["N"], pay["E"], pay["S"], pay["W"]
    k = role.kind
    if k in ("carrier", "cable"):
        a, b = sorted(role.edges)
        others = [pay[sd] for sd in "NESW" if sd not in role.edges]
        if any(o is not None for o in others) or pay[a] != pay[b] or pay[a] not in (0, 1):
            return False
        return not (role.index >= g.qp and pay[a] != 0)
    if k == "block":
        return pn is None and pe is None and ps is None and pw is None
    if k == "literal":
        return pn == sim.program[role.index] and pe is None and ps is None and pw is None
    if k in ("input", "I"):
        t = role.time
        if k == "input":
            if g.q <= x < 5 * g.q:
                if ps not in (0, 1):
                    return False
                s = ps
            else:
                if ps is not None:
                    return False
                s = 0
        else:
            if ps not in ALPH:
                return False
            s = ps
        x2 = g.q + t
        x1 = g.k + g.used_before(x2)
        if g.is_used(x2) and x1 <= x <= x2:
            if x == x2:
                return s in (0, 1) and pw == s and pe is None and pn == s
            if x == x1:
                return pe in (0, 1) and pw is None and pn == pe
            return pe in (0, 1) and pw == pe and pn == s
        return pe is None and pw is None and pn == s
    if k == "U":
        u, D = role.time, g.data
        last = u == g.hU - 1
        xh = g.k + min(u, D)
        if u < D and x == xh:
            if u == 0:
                st, s = (), ps
            else:
                if not isinstance(ps, tuple) or len(ps) != 2:
                    return False
                s, st = ps
            return s in (0, 1) and st in sim.prefixes[u] and pe == st + (s,) and pe in sim.prefixes[u + 1] and pn == s and pw is None
        if u < D and x == xh + 1:
            return pw in sim.prefixes[u + 1] and ps in ALPH and pn == (ps, pw) and pe is None
        if u >= D and x == xh:
            if not isinstance(ps, tuple) or len(ps) != 2:
                return False
            s, st = ps
            return st in sim.codes and s in ALPH and pn == (s if last else ps) and pe is None and pw is None
        return ps in ALPH and pn == ps and pe is None and pw is None
    if k == "A":
        last = role.time == g.top_zone[3] - 1
        return ps in ALPH and pn == (None if last else ps) and pe is None and pw is None
    return False


def simulate_tileset(rho: WangTileSet, N: int | None = None, q: int | None = None, qp: int | None = None, hU: int | None = None) -> Simulation:
    """Build the simulating tileset.  Without ``N`` the smallest override geometry is used.

    With ``N`` alone the default geometry (q = N/16, checker height q) is
    used; ``q``/``hU`` override it.  Raises :class:`SizingError` naming the
    violated budget when the geometry is too small.
    """
    sim = _prepare(rho, N, q, qp, hU)
    quads = []
    g = sim.geom
    for y in range(g.N):
        for x in range(g.N):
            quads.extend(tiles_at(sim, x, y))
    sim.tileset = WangTileSet.from_labels(quads, predicate=lambda n, e, s, w: membership(sim, n, e, s, w))
    return sim


# --------------------------------------------------------------------------
# Reference super-tiles and verification
# --------------------------------------------------------------------------


def assemble(sim: Simulation, tile: int) -> np.ndarray:
    """Reference super-tile for tile ``tile`` of rho: an N x N object array of label quads."""
    g = sim.geom
    N, q = g.N, g.q
    t = sim.rho.tiles[tile]
    bits = side_bits(sim.rho, t, g.qp)
    val = lambda fam, i: bits[fam][i] if i < g.qp else 0  # noqa: E731
    pay: dict = {}
    for fam in FAMILIES:
        for i in range(q):
            b = val(fam, i)
            for c, edges in route_cells(g, fam, i):
                pay[c] = tuple(b if sd in edges else None for sd in "NESW")
    # collector
    tape = [0] * (N - q)
    for x in range(g.k):
        tape[x] = sim.program[x]
    arrivals = {}
    for fam in FAMILIES:
        for i in range(q):
            last = route_cells(g, fam, i)[-1][0]
            arrivals[last[0]] = val(fam, i)
            tape[last[0]] = val(fam, i)
    y0 = 2 * q
    for x in range(g.k):
        pay[(x, y0)] = (sim.program[x], None, None, None)
    for tt in range(4 * q):
        y = y0 + tt
        x2 = q + tt
        x1 = g.k + g.used_before(x2)
        new = list(tape)
        for x in range(g.k if tt == 0 else 0, N - q):
            s = tape[x]
            ps = (arrivals[x] if x in arrivals else None) if tt == 0 else s
            if g.is_used(x2) and x1 <= x <= x2:
                b = tape[x2]
                if x == x2:
                    pay[(x, y)] = (s, None, ps, s)
                elif x == x1:
                    pay[(x, y)] = (b, b, ps, None)
                    new[x] = b
                else:
                    pay[(x, y)] = (s, b, ps, b)
            else:
                pay[(x, y)] = (s, None, ps, None)
        tape = new
    # checker
    D = g.data
    st: tuple = ()
    for u in range(g.hU):
        y = 6 * q + u
        last = u == g.hU - 1
        xh = g.k + min(u, D)
        for x in range(N - q):
            s = tape[x]
            if u < D and x == xh:
                ps = s if u == 0 else (s, st)
                pay[(x, y)] = (s, st + (s,), ps, None)
            elif u < D and x == xh + 1:
                pay[(x, y)] = ((s, st + (tape[xh],)), None, s, st + (tape[xh],))
            elif u >= D and x == xh:
                pay[(x, y)] = (s if last else (s, st), None, (s, st), None)
            else:
                pay[(x, y)] = (s, None, s, None)
        if u < D:
            st = st + (tape[xh],)
    if st not in sim.codes:
        raise ValueError("the checker rejects this tile")
    # identity automaton
    ya, h = g.top_zone[1], g.top_zone[3]
    for a in range(h):
        for x in range(N - q):
            s = tape[x]
            pay[(x, ya + a)] = (None if a == h - 1 else s, None, s, None)
    grid = np.empty((N, N), dtype=object)
    for y in range(N):
        for x in range(N):
            grid[y, x] = _labels(g, x, y, pay.get((x, y), (None, None, None, None)))
    return grid


def grid_indices(sim: Simulation, grid: np.ndarray) -> np.ndarray:
    index = {}
    for i, t in enumerate(sim.tileset.tiles):
        index[sim.tileset.labels(t)] = i
    out = np.full(grid.shape, -1, dtype=np.int64)
    for (y, x), quad in np.ndenumerate(grid):
        out[y, x] = index.get(tuple(quad), -1)
    return out


def border_of(sim: Simulation, grid: np.ndarray) -> Boundary:
    """Outer edge colors of a super-tile as a search boundary."""
    cid = {c: i for i, c in enumerate(sim.tileset.colors)}
    N = sim.N
    return Boundary(
        west={y: cid[grid[y, 0][3]] for y in range(N)},
        east={y: cid[grid[y, N - 1][1]] for y in range(N)},
        south={x: cid[grid[0, x][2]] for x in range(N)},
        north={x: cid[grid[N - 1, x][0]] for x in range(N)},
    )


def border_for_colors(sim: Simulation, colors: tuple[int, int, int, int]) -> Boundary | None:
    """Search boundary of the super-tile whose side colors encode (north, east, south, west).

    None when some border label does not occur in the tileset (no filling exists).
    """
    g = sim.geom
    N, q = g.N, g.q
    nbits = {"top": color_code(colors[0], g.qp), "right": color_code(colors[1], g.qp), "bottom": color_code(colors[2], g.qp), "left": color_code(colors[3], g.qp)}
    bit = lambda fam, i: nbits[fam][i] if i < g.qp else 0  # noqa: E731
    cid = {c: i for i, c in enumerate(sim.tileset.colors)}
    look = lambda label: cid.get(label, -1)  # noqa: E731
    b = Boundary(
        west={y: look(("v", 0, y, bit("left", y) if y < q else 0)) for y in range(N)},
        east={y: look(("v", 0, y, bit("right", y) if y < q else 0)) for y in range(N)},
        south={x: look(("h", x, 0, bit("bottom", x - q) if q <= x < 2 * q else 0)) for x in range(N)},
        north={x: look(("h", x, 0, bit("top", x - q) if q <= x < 2 * q else 0)) for x in range(N)},
    )
    if any(v < 0 for side in (b.west, b.east, b.south, b.north) for v in side.values()):
        return None
    return b


def count_bordered(sim: Simulation, boundary: Boundary, node_limit: int = 50_000_000) -> int:
    return count_tilings(sim.tileset, sim.N, sim.N, boundary, cell_limit=max(100_000, sim.N**2), node_limit=node_limit)


def certify(sim: Simulation, tile: int) -> tuple[int, bool]:
    """Exhaustive bordered search: number of fillings and whether the first equals the reference."""
    ref = assemble(sim, tile)
    b = border_of(sim, ref)
    n = count_bordered(sim, b)
    first = first_tiling(sim.tileset, sim.N, sim.N, b, cell_limit=max(100_000, sim.N**2), node_limit=50_000_000)
    same = first is not None and np.array_equal(first, grid_indices(sim, ref))
    return n, same


def super_colors(sim: Simulation, grid: np.ndarray) -> dict:
    """The four N-bit side strings of a super-tile."""
    N = sim.N
    return {
        "left": tuple(grid[y, 0][3][3] for y in range(N)),
        "right": tuple(grid[y, N - 1][1][3] for y in range(N)),
        "bottom": tuple(grid[0, x][2][3] for x in range(N)),
        "top": tuple(grid[N - 1, x][0][3] for x in range(N)),
    }


def phi(sim: Simulation, grid: np.ndarray) -> int | None:
    """The simulated tile a super-tile stands for (None if its colors match no tile)."""
    g = sim.geom
    sc = super_colors(sim, grid)
    dec = lambda bits: sum(b << j for j, b in enumerate(bits[: g.qp]))  # noqa: E731
    colors = (dec(sc["top"][g.q : 2 * g.q]), dec(sc["right"]), dec(sc["bottom"][g.q : 2 * g.q]), dec(sc["left"]))
    for i, t in enumerate(sim.rho.tiles):
        if tuple(t) == colors:
            return i
    return None


def verify_supertile(sim: Simulation, grid) -> tuple[bool, str]:
    """Membership of an N x N array of label quads in the super-tile family.

    Checks every quad with the membership predicate (coordinates, cable
    bits, diagram rules, program literals), the positions written in the
    labels, and that adjacent edges agree.
    """
    N = sim.N
    grid = np.asarray(grid, dtype=object) if not isinstance(grid, np.ndarray) else grid
    if grid.shape != (N, N):
        return False, f"shape {grid.shape} is not {N} x {N}"
    for y in range(N):
        for x in range(N):
            quad = tuple(grid[y, x])
            if quad[3][1:3] != (x, y):
                return False, f"cell ({x}, {y}) claims coordinates {quad[3][1:3]}"
            if not membership(sim, *quad):
                return False, f"cell ({x}, {y}) is not a tile ({classify_cell(x, y, sim.geom).kind})"
            if x + 1 < N and grid[y, x + 1][3] != quad[1]:
                return False, f"east edge of ({x}, {y}) disagrees with its neighbour"
            if y + 1 < N and grid[y + 1, x][2] != quad[0]:
                return False, f"north edge of ({x}, {y}) disagrees with its neighbour"
    return True, "ok"


def cable_end_to_end(sim: Simulation, grid: np.ndarray) -> bool:
    """The border bit of every cable equals the bit arriving on the zone's bottom row."""
    g = sim.geom
    for fam in FAMILIES:
        for i in range(g.q):
            cells = route_cells(g, fam, i)
            sx, sy = cells[0][0]
            start = grid[sy, sx][_BORDER_SLOT[fam]][3]
            ax, ay = cells[-1][0]
            if start != grid[ay + 1, ax][2][3]:
                return False
    return True


_BORDER_SLOT = {"top": 0, "right": 1, "bottom": 2, "left": 3}


def flip_cable_bit(grid: np.ndarray, x: int, y: int) -> np.ndarray:
    """Copy with the bit on both designated edges of a cable cell flipped."""
    out = grid.copy()
    quad = list(out[y, x])
    for j, lab in enumerate(quad):
        if lab[3] in (0, 1) and not _is_border(out.shape[0], x, y, j):
            quad[j] = lab[:3] + (1 - lab[3],)
    out[y, x] = tuple(quad)
    return out


def _is_border(N: int, x: int, y: int, j: int) -> bool:
    return (j == 0 and y == N - 1) or (j == 1 and x == N - 1) or (j == 2 and y == 0) or (j == 3 and x == 0)


def tile_count_fit(counts: dict) -> float:
    """Smallest a with count <= a * N^2 over the measured sizes."""
    return max(c / (n * n) for n, c in counts.items())


# --------------------------------------------------------------------------
# Variable zoom
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class ZoomLevel:
    k: int
    N: int
    q: int
    program: int
    rank: str
    coord_width: int
    payload: int


def zoom_N(k: int, base_log: int = 7) -> int:
    """N_k = 2^(base_log + k): computable from k with O(log N_k) bit operations."""
    return 1 << (base_log + k)


def variable_zoom_schedule(k: int, program_len: int = 8, base_log: int = 7) -> ZoomLevel:
    """Input layout of a level-k super-tile: program, binary k, and payload widths."""
    N = zoom_N(k, base_log)
    width = (N - 1).bit_length()
    return ZoomLevel(k, N, N // 16, program_len, format(k, "b"), width, 2 * width)


_PAIR = {0: (0, 0), 1: (0, 1), "|": (1, 0)}
_UNPAIR = {v: k for k, v in _PAIR.items()}


def encode_fields(fields: Sequence[Sequence[int]]) -> tuple:
    """Bit fields as a bit string where every field ends with a delimiter pair."""
    out = []
    for f in fields:
        for b in f:
            out.extend(_PAIR[int(b)])
        out.extend(_PAIR["|"])
    return tuple(out)


def decode_fields(bits: Sequence[int]) -> list[tuple]:
    if len(bits) % 2:
        raise ValueError("odd length")
    fields, cur = [], []
    for i in range(0, len(bits), 2):
        sym = _UNPAIR.get((bits[i], bits[i + 1]))
        if sym is None:
            raise ValueError(f"invalid pair at {i}")
        if sym == "|":
            fields.append(tuple(cur))
            cur = []
        else:
            cur.append(sym)
    if cur:
        raise ValueError("unterminated field")
    return fields


def level_input(level: ZoomLevel, program: Sequence[int], payloads: Sequence[Sequence[int]]) -> tuple:
    rank = [int(c) for c in level.rank]
    return encode_fields([list(program), rank] + [list(p) for p in payloads])


# --------------------------------------------------------------------------
# Rendering
# --------------------------------------------------------------------------

_ROLE_COLORS = {
    "carrier": "#444444",
    "cable": "#7fa7d9",
    "literal": "#d62728",
    "input": "#ff9896",
    "I": "#ffe08a",
    "U": "#98df8a",
    "A": "#c5b0d5",
    "block": "#ffffff",
}


def render_roles_svg(g: SimGeometry, cell: int = 6) -> str:
    N = g.N
    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{N * cell}" height="{N * cell}">']
    for y in range(N):
        for x in range(N):
            r = classify_cell(x, y, g)
            out.append(f'<rect x="{x * cell}" y="{(N - 1 - y) * cell}" width="{cell}" height="{cell}" fill="{_ROLE_COLORS[r.kind]}"/>')
    out.append("</svg>")
    return "\n".join(out)


def roles_text(g: SimGeometry) -> str:
    glyph = {"carrier": "#", "cable": "+", "literal": "P", "input": "i", "I": "1", "U": "u", "A": "a", "block": "."}
    return "\n".join("".join(glyph[classify_cell(x, y, g).kind] for x in range(g.N)) for y in range(g.N - 1, -1, -1))
