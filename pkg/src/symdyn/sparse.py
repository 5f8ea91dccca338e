"""Sparse (density-epsilon) configurations and their hierarchical certificates.

A configuration over {white, black} has density epsilon when every n x n
square holds at most n^epsilon black cells.  A finite configuration is
certified by a hierarchy of super-tiles: at level k the plane is cut into
N_k x N_k squares and each square carries eight fields

    1  program code (opaque)
    2  level k
    3  coordinates inside the mother square (level k+1)
    4  one data bit of the mother plus a role mark
    5  own black points, coordinates in [0, N_k - 1]^2
    6  flow entries (mother coordinates of a point, arrow id 1..20)
    7  residual bit chain used to spell a point into the mother's field 5
    8  black points of the responsibility zone (self, left, top, top-left)

Fields 5-8 are carried once per side; neighbours read the copy on the side
they share.  ``synthesize_fields`` fills everything for a concrete finite
configuration (routing points to the mother with integer flows) and
``verify_all`` re-checks the local properties:

    C  the four side copies agree and respect the size bounds
    D  every own point leaves once, transit is coherent, arrivals land on
       allowed cells of the mother's data segment
    E  bit chains shrink by one along the segment, the data bit is the
       chain head, and the segment spells the mother's field 5
    F  field 8 is the union of the neighbouring fields 5 (the top-left
       quadrant is checked by the left neighbour)
    G  no forbidden pattern of the current rank sits in the zone

The mother's data segment is the run of children in row-major order from
the bottom-left child; a point occupies ``l = 2 * bits`` consecutive cells.
"""

from __future__ import annotations

import json
import math
import random
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Callable, Iterable, Sequence

from .core import IndexedGenerator, Pattern
from .flow import E, N_, S, W, arrow_sides, route_points
from .ncavm import LIST_SEARCH_C

Point = tuple[int, int]
PROGRAM = "density-verifier"
START_MARK = "F5.W.start"
INNER_MARK = "F5.W.inner"


def _opp(side: int) -> int:
    return (side + 2) % 4


_STEP = {W: (-1, 0), N_: (0, 1), E: (1, 0), S: (0, -1)}


# --------------------------------------------------------------------------
# Density parameters
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class DensitySpec:
    """Epsilon as non-increasing rational upper bounds plus the level schedule.

    ``schedule`` lists N_0, N_1, ... (each dividing the next); ``ranks`` are
    the rank numbers k used for the forbidden-pattern lists of each level
    (defaults to the schedule itself).  ``C`` is the growth constant of the
    asymptotic schedule N_k = 2^(C^k) used by :func:`parameter_check`.
    """

    bounds: tuple = (Fraction(1, 2),)
    index: int = -1
    schedule: tuple = (2, 16, 256)
    ranks: tuple | None = None
    C: int = 128

    def __post_init__(self):
        b = tuple(Fraction(x) for x in self.bounds)
        object.__setattr__(self, "bounds", b)
        if not b:
            raise ValueError("need at least one rational bound")
        if any(b[i + 1] > b[i] for i in range(len(b) - 1)):
            raise ValueError("rational bounds must be non-increasing")
        if any(not 0 <= x < 1 for x in b):
            raise ValueError("epsilon must lie in [0, 1)")
        s = self.schedule
        if any(s[i + 1] % s[i] or s[i + 1] <= s[i] for i in range(len(s) - 1)):
            raise ValueError("each schedule entry must be a proper multiple of the previous one")
        if self.ranks is not None and len(self.ranks) != len(s):
            raise ValueError("one rank per level")

    @property
    def eps(self) -> Fraction:
        return self.bounds[self.index]

    def N(self, k: int) -> int:
        return self.schedule[k]

    def n(self, k: int) -> int:
        """Children per side of a level-k super-tile."""
        return self.schedule[k] // self.schedule[k - 1]

    def rank(self, k: int) -> int:
        return (self.ranks or self.schedule)[k]

    def max_points(self, n: int) -> int:
        return max_points(n, self.eps)

    def bits(self, k: int) -> int:
        """Bits per coordinate inside a level-k square."""
        return max(1, (self.schedule[k] - 1).bit_length())

    def segment_length(self, k: int) -> int:
        """Cells of the level-k mother's data segment (level k-1 children)."""
        return self.max_points(self.N(k)) * 2 * self.bits(k)

    def to_json(self) -> dict:
        return {
            "bounds": [str(b) for b in self.bounds],
            "index": self.index,
            "schedule": list(self.schedule),
            "ranks": list(self.ranks) if self.ranks else None,
            "C": self.C,
        }

    @classmethod
    def from_json(cls, d: dict) -> "DensitySpec":
        return cls(tuple(Fraction(b) for b in d["bounds"]), d["index"], tuple(d["schedule"]), tuple(d["ranks"]) if d.get("ranks") else None, d["C"])


def max_points(n: int, eps: Fraction) -> int:
    """Largest m with m <= n^eps, computed exactly (m^q <= n^p for eps = p/q)."""
    p, q = eps.numerator, eps.denominator
    bound = n**p
    m = int(round(n ** float(eps)))
    while m > 0 and m**q > bound:
        m -= 1
    while (m + 1) ** q <= bound:
        m += 1
    return m


def is_forbidden_density(blacks: int | Pattern | Iterable[Point], n: int, spec: DensitySpec) -> bool:
    """True iff an n x n square with these black cells holds more than n^eps of them."""
    if isinstance(blacks, Pattern):
        count = blacks.count(1)
    elif isinstance(blacks, int):
        count = blacks
    else:
        count = len(set(blacks))
    return count > spec.max_points(n)


def density_admissible(points: Iterable[Point], eps: Fraction) -> tuple[bool, tuple | None]:
    """Exact check over all squares of the plane; returns a witness square on failure.

    A densest square of side n can be slid until its left edge and bottom
    edge touch points, so it suffices to anchor corners at point coordinates.
    """
    pts = sorted(set(points))
    xs = sorted({x for x, _ in pts})
    ys = sorted({y for _, y in pts})
    for x0 in xs:
        for y0 in ys:
            d = sorted(max(x - x0, y - y0) for x, y in pts if x >= x0 and y >= y0)
            for j, dj in enumerate(d, start=1):
                if j > max_points(dj + 1, eps):
                    return False, (x0, y0, dj + 1, j)
    return True, None


# --------------------------------------------------------------------------
# Forbidden patterns of the subshift and their rank
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class SparsePattern:
    width: int
    height: int
    blacks: frozenset

    @classmethod
    def of(cls, p: Pattern) -> "SparsePattern":
        q = p.normalize()
        return cls(q.width, q.height, frozenset(pos for pos, a in q.items() if a == 1))

    def to_pattern(self) -> Pattern:
        return Pattern({(x, y): int((x, y) in self.blacks) for x in range(self.width) for y in range(self.height)})

    @property
    def side(self) -> int:
        return max(self.width, self.height)


def _pair_pattern(dx: int, dy: int) -> Pattern:
    x0, x1 = (0, dx) if dx >= 0 else (-dx, 0)
    blacks = {(x0, 0), (x1, dy)}
    return Pattern({(x, y): int((x, y) in blacks) for x in range(abs(dx) + 1) for y in range(dy + 1)})


_PAIR_OFFSETS = [(3, 0), (0, 3), (3, 3), (-3, 3), (4, 0), (0, 4), (4, 4), (-4, 4), (5, 0), (0, 5), (5, 5), (-5, 5)]


def pair_enumerator() -> IndexedGenerator:
    """Default subshift: two blacks at certain offsets (each pair is density-admissible)."""
    return IndexedGenerator(lambda i: _pair_pattern(*_PAIR_OFFSETS[i]) if i < len(_PAIR_OFFSETS) else None, "sparse-pairs")


def ell(k: int) -> int:
    """Rank budget: floor(log2 k), and 0 for k <= 1."""
    return k.bit_length() - 1 if k >= 1 else 0


def forbidden_rank(k: int, enumerator: IndexedGenerator) -> list[SparsePattern]:
    """Patterns produced in the first ell(k) steps with at most ell(k) blacks and side at most ell(k).

    All-white patterns are skipped: a nonempty subshift of a density shift
    with epsilon < 1 has none among its forbidden patterns.
    """
    l = ell(k)
    out = []
    for p in enumerator.take(l):
        sp = SparsePattern.of(p)
        if sp.blacks and len(sp.blacks) <= l and sp.side <= l:
            out.append(sp)
    return out


@dataclass(frozen=True)
class Placement:
    pattern: int  # index in the rank list
    origin: Point  # where the pattern's (0, 0) lands
    anchor: Point  # the listed point that was matched
    anchor_in_pattern: Point


def find_forbidden(points: Iterable[Point], patterns: Sequence[SparsePattern], zone: int | None = None) -> Placement | None:
    """First placement of a pattern covering a listed point where every cell agrees.

    For each point p and each black p' of a pattern M the placement sends p'
    onto p.  It is rejected as soon as one cell (i, j) disagrees: a listed
    point where M is white, or M black where no point is listed.  With
    ``zone`` set only placements inside [0, zone)^2 are considered.
    """
    pts = set(points)
    for pi, m in enumerate(patterns):
        for p in sorted(pts):
            for a in sorted(m.blacks):
                ox, oy = p[0] - a[0], p[1] - a[1]
                if zone is not None and not (0 <= ox and 0 <= oy and ox + m.width <= zone and oy + m.height <= zone):
                    continue
                inside = {(x - ox, y - oy) for x, y in pts if ox <= x < ox + m.width and oy <= y < oy + m.height}
                if inside == m.blacks:
                    return Placement(pi, (ox, oy), p, a)
    return None


@dataclass(frozen=True)
class ResponsibilityResult:
    ok: bool
    witness: Placement | None = None

    def __bool__(self):
        return self.ok


def check_responsibility(points: Iterable[Point], k: int, enumerator: IndexedGenerator, N: int | None = None) -> ResponsibilityResult:
    """Field-8 check: no rank-k forbidden pattern inside the zone [0, 2N)^2."""
    w = find_forbidden(points, forbidden_rank(k, enumerator), None if N is None else 2 * N)
    return ResponsibilityResult(w is None, w)


# --------------------------------------------------------------------------
# Configurations
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class SparseConfig:
    points: tuple  # sorted distinct (x, y)
    size: tuple  # (width, height) of the window

    def __post_init__(self):
        pts = tuple(sorted(set(map(tuple, self.points))))
        object.__setattr__(self, "points", pts)
        w, h = self.size
        if any(not (0 <= x < w and 0 <= y < h) for x, y in pts):
            raise ValueError("points must lie in the window")

    def to_json(self) -> str:
        return json.dumps({"size": list(self.size), "points": [list(p) for p in self.points]})

    @classmethod
    def from_json(cls, text: str) -> "SparseConfig":
        d = json.loads(text)
        return cls(tuple(tuple(p) for p in d["points"]), tuple(d["size"]))

    def with_points(self, extra: Iterable[Point]) -> "SparseConfig":
        return SparseConfig(self.points + tuple(extra), self.size)


def random_config(
    seed: int,
    spec: DensitySpec,
    size: int | None = None,
    count: int | None = None,
    enumerator: IndexedGenerator | None = None,
    keep: Iterable[Point] = (),
    tries: int = 400,
) -> SparseConfig:
    """Greedy seeded configuration: density-admissible and free of the enumerated patterns.

    Points in ``keep`` are placed first and never dropped (they may form a
    forbidden pattern on purpose).  ``count`` defaults to 0.3 * size^eps.
    """
    size = size or spec.schedule[-1]
    rng = random.Random(seed)
    if count is None:
        count = max(1, math.ceil(0.3 * spec.max_points(size)))
    pats = forbidden_rank(spec.rank(len(spec.schedule) - 1), enumerator) if enumerator else []
    pts = list(dict.fromkeys(keep))
    base = len(pts)
    for _ in range(tries):
        if len(pts) - base >= count:
            break
        p = (rng.randrange(size), rng.randrange(size))
        if p in pts:
            continue
        cand = pts + [p]
        if not density_admissible(cand, spec.eps)[0]:
            continue
        if pats and _forbidden_near(cand, p, pats):
            continue
        pts = cand
    return SparseConfig(tuple(pts), (size, size))


def _forbidden_near(pts, p, pats) -> bool:
    for m in pats:
        for a in m.blacks:
            ox, oy = p[0] - a[0], p[1] - a[1]
            inside = {(x - ox, y - oy) for x, y in pts if ox <= x < ox + m.width and oy <= y < oy + m.height}
            if inside == m.blacks:
                return True
    return False


# --------------------------------------------------------------------------
# Super-tile fields
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class SuperTileFields:
    level: int  # field 2
    coords: Point  # field 3, position among the mother's children
    side_bits: tuple = (None, None)  # field 4: (data bit or None, role mark or None)
    own: tuple = ()  # field 5
    flow: tuple = ()  # field 6: (x, y, arrow)
    chain: tuple = ()  # field 7
    zone: tuple = ()  # field 8
    program: str = PROGRAM  # field 1

    def carried(self) -> tuple:
        """Fields 5-8 as carried on each side."""
        return (self.own, self.flow, self.chain, self.zone)

    def is_blank(self) -> bool:
        return not (self.own or self.flow or self.chain or self.zone) and self.side_bits[0] is None

    def to_json(self) -> dict:
        return {
            "1": self.program,
            "2": self.level,
            "3": list(self.coords),
            "4": list(self.side_bits),
            "5": [list(p) for p in self.own],
            "6": [list(e) for e in self.flow],
            "7": list(self.chain),
            "8": [list(p) for p in self.zone],
        }

    @classmethod
    def from_json(cls, d: dict) -> "SuperTileFields":
        t = lambda xs: tuple(tuple(v) for v in xs)  # noqa: E731
        return cls(d["2"], tuple(d["3"]), tuple(d["4"]), t(d["5"]), t(d["6"]), tuple(d["7"]), t(d["8"]), d["1"])


@dataclass
class LevelAssembly:
    """All non-blank level-k super-tiles of a region, keyed by global tile index.

    Tile (X, Y) covers the cells [X*N, (X+1)*N) x [Y*N, (Y+1)*N) of the
    shifted plane (window coordinates plus the grid offset).  ``copies``
    holds what each side carries; missing tiles are blank.  ``region`` is
    the set of mother indices (or, at the top level, tile indices) covered.
    """

    level: int
    N: int
    n: int | None  # children per mother side, None at the top level
    tiles: dict = field(default_factory=dict)
    copies: dict = field(default_factory=dict)
    region: frozenset = frozenset()
    segment: int = 0  # length of the mother's data segment

    def in_region(self, X: int, Y: int) -> bool:
        if self.n is None:
            return (X, Y) in self.region
        return (X // self.n, Y // self.n) in self.region

    def role(self, X: int, Y: int) -> str | None:
        if self.n is None:
            return None
        j = (Y % self.n) * self.n + X % self.n
        if j == 0:
            return START_MARK
        return INNER_MARK if j < self.segment else None

    def get(self, X: int, Y: int) -> SuperTileFields:
        t = self.tiles.get((X, Y))
        if t is not None:
            return t
        n = self.n or 1
        return SuperTileFields(self.level, (X % n, Y % n), (None, self.role(X, Y)))

    def seen(self, X: int, Y: int, side: int) -> tuple:
        """Fields 5-8 of tile (X, Y) as carried on ``side``."""
        c = self.copies.get((X, Y))
        if c is not None:
            return c[side]
        return self.get(X, Y).carried()

    def put(self, t: SuperTileFields, X: int, Y: int) -> None:
        self.tiles[(X, Y)] = t
        self.copies[(X, Y)] = (t.carried(),) * 4

    def segment_index(self, X: int, Y: int) -> int:
        return (Y % self.n) * self.n + X % self.n

    def segment_cell(self, mother: Point, j: int) -> Point:
        return (mother[0] * self.n + j % self.n, mother[1] * self.n + j // self.n)

    def mother_of(self, X: int, Y: int) -> Point:
        return (X // self.n, Y // self.n)

    def to_json(self) -> dict:
        return {
            "level": self.level,
            "N": self.N,
            "n": self.n,
            "segment": self.segment,
            "region": sorted(list(r) for r in self.region),
            "tiles": [[X, Y, t.to_json(), self.copies[(X, Y)]] for (X, Y), t in sorted(self.tiles.items())],
        }


@dataclass
class Hierarchy:
    spec: DensitySpec
    config: SparseConfig
    offset: Point
    levels: list  # LevelAssembly per level, 0..top

    @property
    def top(self) -> int:
        return len(self.levels) - 1

    def to_json(self) -> str:
        return json.dumps(
            {
                "spec": self.spec.to_json(),
                "config": json.loads(self.config.to_json()),
                "offset": list(self.offset),
                "levels": [a.to_json() for a in self.levels],
            }
        )

    @classmethod
    def from_json(cls, text: str) -> "Hierarchy":
        d = json.loads(text)
        levels = []
        for a in d["levels"]:
            asm = LevelAssembly(a["level"], a["N"], a["n"], region=frozenset(tuple(r) for r in a["region"]), segment=a["segment"])
            for X, Y, t, copies in a["tiles"]:
                asm.tiles[(X, Y)] = SuperTileFields.from_json(t)
                asm.copies[(X, Y)] = tuple(_copy_from_json(c) for c in copies)
            levels.append(asm)
        return cls(DensitySpec.from_json(d["spec"]), SparseConfig.from_json(json.dumps(d["config"])), tuple(d["offset"]), levels)


def _copy_from_json(c) -> tuple:
    own, flow, chain, zone = c
    t = lambda xs: tuple(tuple(v) for v in xs)  # noqa: E731
    return (t(own), t(flow), tuple(chain), t(zone))


def to_bits(p: Point, b: int) -> tuple:
    """Fixed-width binary of x then y, most significant bit first."""
    return tuple((p[0] >> (b - 1 - i)) & 1 for i in range(b)) + tuple((p[1] >> (b - 1 - i)) & 1 for i in range(b))


def from_bits(bits: Sequence[int]) -> Point:
    b = len(bits) // 2
    x = int("".join(map(str, bits[:b])), 2)
    y = int("".join(map(str, bits[b:])), 2)
    return (x, y)


# --------------------------------------------------------------------------
# Synthesis
# --------------------------------------------------------------------------


class ConstructionError(RuntimeError):
    pass


def synthesize_fields(config: SparseConfig, spec: DensitySpec, levels: int = 2, offset: Point = (0, 0)) -> Hierarchy:
    """Fill fields 1-8 for every non-blank super-tile of levels 0..levels.

    ``offset`` shifts the window inside the super-tile grid.  The
    configuration must be density-admissible; the mother of each level
    receives its points through integer flows on the grid of its children.
    """
    if levels + 1 > len(spec.schedule):
        raise ValueError("schedule too short for the requested levels")
    ok, witness = density_admissible(config.points, spec.eps)
    if not ok:
        raise ConstructionError(f"configuration is not density-admissible: square {witness}")
    ox, oy = offset
    pts = [(x + ox, y + oy) for x, y in config.points]
    w, h = config.size
    Ntop = spec.N(levels)
    top_region = frozenset(
        (X, Y) for X in range(ox // Ntop, (ox + w - 1) // Ntop + 1) for Y in range(oy // Ntop, (oy + h - 1) // Ntop + 1)
    )
    # regions from the top down: the children of the mothers above
    regions = [frozenset()] * (levels + 1)
    regions[levels] = top_region
    asms: list = [None] * (levels + 1)
    for k in range(levels, -1, -1):
        if k == levels:
            asms[k] = LevelAssembly(k, spec.N(k), None, region=top_region)
        else:
            asms[k] = LevelAssembly(k, spec.N(k), spec.n(k + 1), region=regions[k + 1], segment=spec.segment_length(k + 1))
        if k > 0:
            nn = spec.n(k)
            regions[k - 1] = frozenset((X * nn + i, Y * nn + j) for X, Y in regions[k] for i in range(nn) for j in range(nn))

    # own points (field 5) at every level, ordered later by routing
    own: list[dict] = []
    for k in range(levels + 1):
        Nk = spec.N(k)
        d: dict = {}
        for x, y in sorted(pts):
            d.setdefault((x // Nk, y // Nk), []).append((x % Nk, y % Nk))
        own.append(d)

    # per-level routing, bottom up; the mother's field 5 is the slot order
    order: list[dict] = [dict() for _ in range(levels + 1)]
    order[0] = {t: tuple(sorted(v)) for t, v in own[0].items()}
    flows: list[dict] = [dict() for _ in range(levels + 1)]
    chains: list[dict] = [dict() for _ in range(levels + 1)]
    for k in range(levels):
        asm = asms[k]
        n, Nk = asm.n, asm.N
        b = spec.bits(k + 1)
        l = 2 * b
        mothers: dict = {}
        for (X, Y), plist in order[k].items():
            mothers.setdefault((X // n, Y // n), []).append((X, Y))
        mother_lists: dict = {}
        for m, kids in sorted(mothers.items()):
            production = {}
            queue: dict = {}
            for X, Y in sorted(kids):
                c = (X % n, Y % n)
                production[c] = len(order[k][(X, Y)])
                queue[c] = [(c[0] * Nk + px, c[1] * Nk + py) for px, py in order[k][(X, Y)]]
            F = sum(production.values())
            if F * l > asm.segment:
                raise ConstructionError(f"mother {m} at level {k + 1} holds {F} points, more than its segment allows")
            slots = [(j % n, j // n) for j in range(0, F * l, l)]
            try:
                routing = route_points(n, Nk, production, slots)
            except ValueError as e:  # routing infeasible: must not happen for admissible configs
                raise ConstructionError(str(e)) from e
            listed: list = [None] * F
            for path in routing.paths:
                point = queue[path[0]].pop(0)
                listed[slots.index(path[-1])] = point
                for c, a in _arrows(path):
                    tile = (m[0] * n + c[0], m[1] * n + c[1])
                    flows[k].setdefault(tile, []).append((point[0], point[1], a))
            for s, point in enumerate(listed):
                bits = to_bits(point, b)
                for i in range(l):
                    j = s * l + i
                    tile = asm.segment_cell(m, j)
                    chains[k][tile] = bits[i:]
            mother_lists[m] = tuple(listed)
        order[k + 1] = mother_lists

    # write fields
    for k in range(levels + 1):
        asm = asms[k]
        Nk = asm.N
        names = set(order[k]) | set(flows[k]) | set(chains[k])
        # tiles whose zone sees points: self, right neighbour, below, below-right
        for X, Y in order[k]:
            names |= {(X, Y), (X + 1, Y), (X, Y - 1), (X + 1, Y - 1)}
        for X, Y in sorted(names):
            if not asm.in_region(X, Y):
                continue
            zone = []
            for (dx, dy), (zx, zy) in (((-1, 0), (0, 0)), ((0, 0), (Nk, 0)), ((0, 1), (Nk, Nk)), ((-1, 1), (0, Nk))):
                for px, py in order[k].get((X + dx, Y + dy), ()):
                    zone.append((px + zx, py + zy))
            chain = chains[k].get((X, Y), ())
            n = asm.n or 1
            t = SuperTileFields(
                k,
                (X % n, Y % n),
                (chain[0] if chain else None, asm.role(X, Y)),
                tuple(order[k].get((X, Y), ())),
                tuple(sorted(flows[k].get((X, Y), ()))),
                tuple(chain),
                tuple(sorted(zone)),
            )
            if not t.is_blank():
                asm.put(t, X, Y)
    return Hierarchy(spec, config, tuple(offset), asms)


def _arrows(path: Sequence[Point]) -> list:
    from .flow import arrow_id, side_between

    out = []
    for i, c in enumerate(path):
        entering = side_between(c, path[i - 1]) if i > 0 else None
        leaving = side_between(c, path[i + 1]) if i + 1 < len(path) else None
        out.append((c, arrow_id(entering, leaving)))
    return out


# --------------------------------------------------------------------------
# Verification
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class Witness:
    prop: str
    level: int
    tile: Point
    detail: str


@dataclass
class VerifyReport:
    level: int
    checked: int = 0
    failures: list = field(default_factory=list)
    skipped: tuple = ()

    @property
    def ok(self) -> bool:
        return not self.failures

    def by_prop(self) -> dict:
        out = {p: [] for p in "CDEFG"}
        for w in self.failures:
            out[w.prop[0]].append(w)
        return out

    def passed(self, prop: str) -> bool:
        return not any(w.prop.startswith(prop) for w in self.failures)

    def summary(self) -> dict:
        return {p: ("n/a" if p in self.skipped else ("pass" if not ws else f"FAIL x{len(ws)}")) for p, ws in self.by_prop().items()}


def _relevant(asm: LevelAssembly) -> list:
    out = set()
    for X, Y in asm.tiles:
        for dx in (-1, 0, 1):
            for dy in (-1, 0, 1):
                out.add((X + dx, Y + dy))
        if asm.n is not None and asm.role(X, Y) is not None:
            j = asm.segment_index(X, Y)
            if j + 1 < asm.segment:
                out.add(asm.segment_cell(asm.mother_of(X, Y), j + 1))
    return sorted(t for t in out if asm.in_region(*t))


def _sister(asm: LevelAssembly, X: int, Y: int, side: int) -> Point | None:
    dx, dy = _STEP[side]
    Z = (X + dx, Y + dy)
    if asm.mother_of(X, Y) != asm.mother_of(*Z):
        return None
    return Z


def verify_all(h: Hierarchy, k: int, enumerator: IndexedGenerator) -> VerifyReport:
    """Check properties C-G for every relevant level-k tile; D and E need a mother level."""
    asm = h.levels[k]
    spec = h.spec
    rep = VerifyReport(k, skipped=() if k < h.top else ("D", "E"))
    fail = lambda prop, tile, msg: rep.failures.append(Witness(prop, k, tile, msg))  # noqa: E731
    Nk = asm.N
    cap5 = spec.max_points(Nk)
    cap8 = spec.max_points(2 * Nk)
    patterns = forbidden_rank(spec.rank(k), enumerator)
    has_mother = k < h.top
    if has_mother:
        mother_asm = h.levels[k + 1]
        b = spec.bits(k + 1)
        l = 2 * b
    tiles = _relevant(asm)
    rep.checked = len(tiles)
    for X, Y in tiles:
        t = asm.get(X, Y)
        # C: side copies and size bounds
        copies = [asm.seen(X, Y, s) for s in range(4)]
        for s in range(1, 4):
            if copies[s] != copies[0]:
                fail("C", (X, Y), f"copy on side {s} differs from side 0")
        if copies[0] != t.carried():
            fail("C", (X, Y), "side copies differ from the computation-zone fields")
        if len(t.own) > cap5:
            fail("C", (X, Y), f"field 5 holds {len(t.own)} > {cap5} points")
        if len(t.zone) > cap8:
            fail("C", (X, Y), f"field 8 holds {len(t.zone)} > {cap8} points")
        if t.level != k or t.program != PROGRAM:
            fail("C", (X, Y), "wrong level or program field")

        if has_mother:
            _check_d(asm, X, Y, t, fail)
            _check_e(asm, mother_asm, X, Y, t, l, fail)

        # F: zone quadrants
        zone = set(t.zone)
        quads = {
            "left": ({p for p in zone if p[0] < Nk and p[1] < Nk}, asm.seen(X - 1, Y, E)[0], (0, 0)),
            "self": ({p for p in zone if p[0] >= Nk and p[1] < Nk}, t.own, (Nk, 0)),
            "top": ({p for p in zone if p[0] >= Nk and p[1] >= Nk}, asm.seen(X, Y + 1, S)[0], (Nk, Nk)),
        }
        for name, (got, src, (zx, zy)) in quads.items():
            want = {(px + zx, py + zy) for px, py in src}
            if got != want:
                fail("F", (X, Y), f"{name} quadrant of field 8 is {sorted(got)} but the neighbour lists {sorted(want)}")
        if any(not (0 <= px < 2 * Nk and 0 <= py < 2 * Nk) for px, py in zone):
            fail("F", (X, Y), "field 8 point outside the zone")
        # diagonal quadrant, checked by the left neighbour V on its right and top sides
        right8 = set(asm.seen(X, Y, W)[3])
        got = {p for p in right8 if p[0] < Nk and Nk <= p[1] < 2 * Nk}
        want = {(px, py + Nk) for px, py in asm.seen(X - 1, Y + 1, S)[0]}
        if got != want:
            fail("F", (X - 1, Y), f"top-left quadrant of the right neighbour's field 8 is {sorted(got)}, top neighbour lists {sorted(want)}")

        # G: no rank-k forbidden pattern in the zone
        wp = find_forbidden(t.zone, patterns, 2 * Nk)
        if wp is not None:
            ax = (X - 1) * Nk + wp.origin[0] - h.offset[0]
            ay = Y * Nk + wp.origin[1] - h.offset[1]
            fail("G", (X, Y), f"pattern {wp.pattern} at window position ({ax}, {ay})")
    return rep


def g_witness_position(w: Witness) -> tuple[int, Point]:
    """Pattern index and window position parsed from a G witness."""
    head, _, tail = w.detail.partition(" at window position ")
    x, y = tail.strip("()").split(", ")
    return int(head.split()[1]), (int(x), int(y))


def _check_d(asm: LevelAssembly, X: int, Y: int, t: SuperTileFields, fail) -> None:
    Nk = asm.N
    cx, cy = t.coords
    own = [(cx * Nk + px, cy * Nk + py) for px, py in t.own]
    entries: dict = {}
    for x, y, a in t.flow:
        if (x, y) in entries:
            fail("D2", (X, Y), f"point {(x, y)} listed twice in field 6")
        entries[(x, y)] = a
    nb = {}
    for s in range(4):
        Z = _sister(asm, X, Y, s)
        if Z is None:
            nb[s] = {}
            continue
        nb[s] = {(x, y): a for x, y, a in asm.seen(*Z, _opp(s))[1]}
    for p in own:
        if p not in entries:
            fail("D1", (X, Y), f"own point {p} missing from field 6")
            continue
    for p, a in entries.items():
        try:
            ent, lv = arrow_sides(a)
        except ValueError:
            fail("D2", (X, Y), f"arrow id {a} out of range for {p}")
            continue
        initial = p in own
        holders = {s for s in range(4) if p in nb[s]}
        if initial and ent is not None:
            if a == 17 and not holders:  # produced and consumed here
                _check_arrival(asm, X, Y, t, p, fail)
                continue
            fail("D1", (X, Y), f"own point {p} enters through side {ent}")
            continue
        if not initial and ent is None:
            fail("D2", (X, Y), f"point {p} leaves without entering and is not an own point")
            continue
        sides = {s for s in (ent, lv) if s is not None}
        if holders != sides:
            fail("D2", (X, Y), f"point {p}: neighbours holding it {sorted(holders)}, arrow {a} names {sorted(sides)}")
            continue
        for s in sides:
            e2, l2 = arrow_sides(nb[s][p]) if 1 <= nb[s][p] <= 20 else (None, None)
            if s == lv and e2 != _opp(s):
                fail("D2", (X, Y), f"point {p} leaves through {s} but the neighbour's arrow {nb[s][p]} does not enter there")
            if s == ent and l2 != _opp(s):
                fail("D2", (X, Y), f"point {p} enters through {s} but the neighbour's arrow {nb[s][p]} does not leave there")
        if lv is None:
            _check_arrival(asm, X, Y, t, p, fail)


def _check_arrival(asm: LevelAssembly, X: int, Y: int, t: SuperTileFields, p: Point, fail) -> None:
    role = t.side_bits[1]
    if role not in (START_MARK, INNER_MARK) or asm.role(X, Y) != role:
        fail("D3", (X, Y), f"point {p} arrives outside the mother's data segment")
        return
    j = asm.segment_index(X, Y)
    if j > 0:
        prev = asm.segment_cell(asm.mother_of(X, Y), j - 1)
        if len(asm.seen(*prev, E)[2]) != 1:
            fail("D3", (X, Y), f"point {p} arrives but the previous segment cell's chain is not of length 1")


def _check_e(asm: LevelAssembly, mother_asm: LevelAssembly, X: int, Y: int, t: SuperTileFields, l: int, fail) -> None:
    chain = t.chain
    if any(bit not in (0, 1) for bit in chain):
        fail("E", (X, Y), "field 7 is not a bit string")
        return
    if len(chain) > l:
        fail("E", (X, Y), f"field 7 longer than {l}")
    head = chain[0] if chain else None
    if t.side_bits[0] != head:
        fail("E", (X, Y), f"data bit {t.side_bits[0]} differs from the chain head {head}")
    if t.side_bits[1] != asm.role(X, Y):
        fail("E", (X, Y), "role mark does not match the position")
    arrivals = [(x, y) for x, y, a in t.flow if arrow_sides(a)[1] is None and 1 <= a <= 20]
    if asm.role(X, Y) is None:
        if chain:
            fail("E", (X, Y), "bit chain outside the mother's data segment")
        return
    j = asm.segment_index(X, Y)
    m = asm.mother_of(X, Y)
    prev_chain = asm.seen(*asm.segment_cell(m, j - 1), E)[2] if j > 0 else ()
    if arrivals:
        if len(arrivals) > 1:
            fail("E", (X, Y), "two points arrive at one tile")
        if chain != to_bits(arrivals[0], l // 2):
            fail("E", (X, Y), f"final tile of {arrivals[0]} does not spell it in field 7")
    elif chain != tuple(prev_chain[1:]):
        fail("E", (X, Y), "field 7 is not the previous chain minus its first bit")
    if j == 0:
        # the segment start also checks that the segment spells the mother's field 5
        bits = []
        for i in range(asm.segment):
            b = asm.get(*asm.segment_cell(m, i)).side_bits[0]
            if b is None:
                break
            bits.append(b)
        if len(bits) % l:
            fail("E", (X, Y), "data segment ends inside a point")
        spelled = [from_bits(bits[i : i + l]) for i in range(0, len(bits) - len(bits) % l, l)]
        mf5 = mother_asm.seen(*m, W)[0]
        if sorted(spelled) != sorted(mf5):
            fail("E", (X, Y), f"data segment spells {spelled} but the mother's field 5 is {list(mf5)}")


def verify_hierarchy(h: Hierarchy, enumerator: IndexedGenerator) -> list[VerifyReport]:
    return [verify_all(h, k, enumerator) for k in range(h.top + 1)]


# --------------------------------------------------------------------------
# Information flow and covering properties
# --------------------------------------------------------------------------


def info_flow_sets(h: Hierarchy, k: int) -> dict:
    """Per level-(k+1) mother: (children's points in mother coordinates, mother's field 5)."""
    asm, up = h.levels[k], h.levels[k + 1]
    out: dict = {}
    for (X, Y), t in asm.tiles.items():
        m = asm.mother_of(X, Y)
        kids, _ = out.setdefault(m, (set(), set()))
        cx, cy = t.coords
        kids.update((cx * asm.N + px, cy * asm.N + py) for px, py in t.own)
    for m in list(out) + list(up.tiles):
        kids, _ = out.get(m, (set(), set()))
        out[m] = (kids, set(up.get(*m).own))
    return out


def block_union(h: Hierarchy, k: int, X: int, Y: int) -> set:
    """Points of the 2x2 block with bottom-left tile (X, Y), in block coordinates."""
    asm = h.levels[k]
    N = asm.N
    out = set()
    for dx in (0, 1):
        for dy in (0, 1):
            for px, py in asm.get(X + dx, Y + dy).own:
                out.add((dx * N + px, dy * N + py))
    return out


def covering_block(N: int, x: int, y: int, L: int) -> Point:
    """Bottom-left tile of a 2x2 block covering the L x L window at (x, y); needs L <= N."""
    if L > N:
        raise ValueError("windows larger than a super-tile need not be covered")
    return (x // N, y // N)


# --------------------------------------------------------------------------
# Injected faults
# --------------------------------------------------------------------------


def flip_arrow(h: Hierarchy, k: int, tile: Point | None = None) -> tuple[Hierarchy, Point]:
    """Copy of ``h`` with one arrow of one tile replaced by a different arrow."""
    h2 = copy_hierarchy(h)
    asm = h2.levels[k]
    if tile is None:
        tile = next(t for t in sorted(asm.tiles) if asm.tiles[t].flow)
    t = asm.tiles[tile]
    x, y, a = t.flow[0]
    new = (a % 20) + 1
    asm.put(replace(t, flow=((x, y, new),) + t.flow[1:]), *tile)
    return h2, tile


def copy_hierarchy(h: Hierarchy) -> Hierarchy:
    levels = []
    for a in h.levels:
        b = LevelAssembly(a.level, a.N, a.n, dict(a.tiles), dict(a.copies), a.region, a.segment)
        levels.append(b)
    return Hierarchy(h.spec, h.config, h.offset, levels)


def inject_loop(h: Hierarchy, k: int, cells: Sequence[Point], point: Point, initial: bool = False) -> Hierarchy:
    """Add a closed chain of transit arrows for ``point`` through ``cells`` (a cycle of sisters).

    With ``initial`` the first cell's arrow becomes outgoing-only, which
    breaks the loop: there is an initial tile but no final one.
    """
    from .flow import arrow_id, side_between

    h2 = copy_hierarchy(h)
    asm = h2.levels[k]
    m = len(cells)
    for i, c in enumerate(cells):
        prev, nxt = cells[i - 1], cells[(i + 1) % m]
        a = arrow_id(None if (initial and i == 0) else side_between(c, prev), side_between(c, nxt))
        t = asm.get(*c)
        asm.put(replace(t, flow=tuple(sorted(t.flow + ((point[0], point[1], a),)))), *c)
    return h2


@dataclass(frozen=True)
class ParasiteReport:
    d_passes: bool
    field5_unchanged: bool
    failures: tuple

    @property
    def ok(self) -> bool:
        return self.d_passes and self.field5_unchanged


def parasite_tolerance_check(h: Hierarchy, k: int, cells: Sequence[Point], point: Point, enumerator: IndexedGenerator, initial: bool = False) -> ParasiteReport:
    """Inject a loop and report whether D still passes and no field 5 moved."""
    h2 = inject_loop(h, k, cells, point, initial)
    rep = verify_all(h2, k, enumerator)
    d_ok = rep.passed("D")
    same = all(
        {p: t.own for p, t in a.tiles.items() if t.own} == {p: t.own for p, t in b.tiles.items() if t.own}
        for a, b in zip(h.levels, h2.levels)
    )
    return ParasiteReport(d_ok, same, tuple(w for w in rep.failures if w.prop.startswith("D")))


def free_square(h: Hierarchy, k: int, avoid: Iterable[Point] = ()) -> list[Point]:
    """Four sister tiles forming a 2x2 square, for loop injection (counter-clockwise)."""
    asm = h.levels[k]
    avoid = set(avoid)
    for X, Y in sorted(asm.tiles) + sorted((m[0] * asm.n, m[1] * asm.n) for m in asm.region):
        cells = [(X, Y), (X + 1, Y), (X + 1, Y + 1), (X, Y + 1)]
        if len({asm.mother_of(*c) for c in cells}) == 1 and asm.in_region(X, Y) and not avoid & set(cells):
            return cells
    raise ValueError("no 2x2 square of sisters available")


def unused_point(h: Hierarchy, k: int) -> Point:
    """Mother coordinates not used by any flow entry of level k."""
    used = {(x, y) for t in h.levels[k].tiles.values() for x, y, _ in t.flow}
    N = h.spec.N(k + 1)
    for y in range(N):
        for x in range(N):
            if (x, y) not in used:
                return (x, y)
    raise ValueError("every coordinate is used")


# --------------------------------------------------------------------------
# Parameters
# --------------------------------------------------------------------------

# Nominal constants of this implementation: a cable entry costs at most
# CABLE_CONST bits per unit of log N_{k+1}; the search kernels run in
# LIST_SEARCH_C steps per list element.
CABLE_CONST = 8


@dataclass(frozen=True)
class ParameterReport:
    ok: bool
    first_failure: int | None
    rows: tuple  # (level, lhs/rhs margins in log2 for the three inequalities)


def parameter_check(
    spec: DensitySpec,
    levels: Sequence[int] = (1, 2),
    c1: float = CABLE_CONST,
    c2: float = LIST_SEARCH_C,
    P1: Callable[[float], float] = lambda x: x**2,
    P2: Callable[[float], float] = lambda x: x**3,
) -> ParameterReport:
    """Capacity inequalities for N_k = 2^(C^k), compared in log2 to avoid huge numbers.

    cable width:  n_k / 16 >= c1 * N_k^eps * log N_{k+1}
    central zone: n_k / 16 >= P1(log N_{k+1})
    top zone:     n_k / 4  >= c2 * N_k^eps * P2(log N_{k+1})
    """
    C = spec.C
    eps = float(spec.eps)
    rows = []
    first = None
    for k in levels:
        logN = C**k
        logN_prev = C ** (k - 1) if k >= 1 else 0
        logN_next = C ** (k + 1)
        log_n = logN - logN_prev
        m1 = (log_n - 4) - (math.log2(c1) + eps * logN + math.log2(logN_next))
        m2 = (log_n - 4) - math.log2(P1(logN_next))
        m3 = (log_n - 2) - (math.log2(c2) + eps * logN + math.log2(P2(logN_next)))
        rows.append((k, m1, m2, m3))
        if first is None and min(m1, m2, m3) < 0:
            first = k
    return ParameterReport(first is None, first, tuple(rows))


def render_arrows_svg(h: Hierarchy, k: int, mother: Point, cell: int = 24) -> str:
    """SVG of one mother's children: segment cells shaded, flow arrows drawn per point."""
    asm = h.levels[k]
    n = asm.n
    size = n * cell
    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}">']
    palette = ["#d62728", "#2ca02c", "#1f77b4", "#9467bd", "#ff7f0e", "#8c564b"]
    colors: dict = {}
    for j in range(n * n):
        X, Y = asm.segment_cell(mother, j)
        sx, sy = (X % n) * cell, (n - 1 - Y % n) * cell
        t = asm.get(X, Y)
        fill = "#eeeeee" if t.side_bits[1] else "white"
        if t.chain:
            fill = "#ffe9a8"
        out.append(f'<rect x="{sx}" y="{sy}" width="{cell}" height="{cell}" fill="{fill}" stroke="#999"/>')
        if t.own:
            out.append(f'<circle cx="{sx + cell / 2}" cy="{sy + cell / 2}" r="{cell / 6}" fill="black"/>')
        for x, y, a in t.flow:
            col = colors.setdefault((x, y), palette[len(colors) % len(palette)])
            ent, lv = arrow_sides(a)
            cx, cy = sx + cell / 2, sy + cell / 2
            for s in (ent, lv):
                if s is None:
                    continue
                dx, dy = _STEP[s]
                out.append(f'<line x1="{cx}" y1="{cy}" x2="{cx + dx * cell / 2}" y2="{cy - dy * cell / 2}" stroke="{col}" stroke-width="2"/>')
    out.append("</svg>")
    return "\n".join(out)
