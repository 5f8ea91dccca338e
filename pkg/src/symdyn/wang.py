"""Wang tilesets, rectangle tiling search and the SFT <-> Wang compilation."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Callable, Hashable, Iterator, Mapping, NamedTuple, Sequence

import numpy as np

from ._jit import njit
from .core import (
    Alphabet,
    Pattern,
    ShiftSpec,
    enumerate_locally_admissible,
    rectangle,
)

DEFAULT_CELL_LIMIT = 100_000


class WangTile(NamedTuple):
    north: int
    east: int
    south: int
    west: int


@dataclass(frozen=True)
class WangTileSet:
    """Tiles are quadruples of indices into ``colors``.

    ``colors`` holds arbitrary hashable labels (bit strings, tuples, ...).
    ``predicate`` optionally decides membership of a label quadruple
    ``(north, east, south, west)`` without consulting the tile list.
    """

    colors: tuple[Hashable, ...]
    tiles: tuple[WangTile, ...]
    predicate: Callable[[Hashable, Hashable, Hashable, Hashable], bool] | None = field(default=None, compare=False)

    def __post_init__(self):
        seen = set()
        uniq = []
        for t in self.tiles:
            t = WangTile(*t)
            if any(not 0 <= c < len(self.colors) for c in t):
                raise ValueError(f"tile {t} uses a color outside the alphabet")
            if t not in seen:
                seen.add(t)
                uniq.append(t)
        object.__setattr__(self, "tiles", tuple(uniq))
        object.__setattr__(self, "colors", tuple(self.colors))

    def __len__(self):
        return len(self.tiles)

    @classmethod
    def from_labels(cls, quads, predicate=None) -> "WangTileSet":
        """Build from ``(north, east, south, west)`` label quadruples."""
        quads = list(quads)
        index: dict = {}
        for q in quads:
            for c in q:
                index.setdefault(c, len(index))
        tiles = tuple(WangTile(*(index[c] for c in q)) for q in quads)
        return cls(tuple(index), tiles, predicate)

    def labels(self, t: WangTile) -> tuple:
        return tuple(self.colors[c] for c in t)

    def predicate_agrees(self) -> bool:
        """The predicate accepts every listed tile."""
        if self.predicate is None:
            return True
        return all(self.predicate(*self.labels(t)) for t in self.tiles)

    def arrays(self) -> np.ndarray:
        """Tiles as an ``(n, 4)`` integer array in N, E, S, W column order."""
        return np.array(self.tiles, dtype=np.int64).reshape(-1, 4)

    # json -----------------------------------------------------------------
    def to_json(self) -> dict:
        return {"colors": [_jsonable(c) for c in self.colors], "tiles": [list(t) for t in self.tiles]}

    @classmethod
    def from_json(cls, data: Mapping) -> "WangTileSet":
        colors = tuple(_hashable(c) for c in data["colors"])
        return cls(colors, tuple(WangTile(*t) for t in data["tiles"]))


def _jsonable(c):
    if isinstance(c, Pattern):
        return {"pattern": c.to_json()}
    if isinstance(c, tuple):
        return [_jsonable(v) for v in c]
    return c


def _hashable(c):
    if isinstance(c, dict) and "pattern" in c:
        return Pattern.from_json(c["pattern"])
    if isinstance(c, list):
        return tuple(_hashable(v) for v in c)
    return c


def dump_tileset(ts: WangTileSet) -> str:
    return json.dumps(ts.to_json(), sort_keys=True)


# --------------------------------------------------------------------------
# SFT -> Wang
# --------------------------------------------------------------------------


class EmptyShift(Exception):
    """No c x c pattern survives: the shift is empty."""


def sft_to_wang(spec: ShiftSpec) -> tuple[WangTileSet, dict[int, int]]:
    """Compile a finite-type shift into Wang tiles.

    Colors are the locally admissible ``c x c`` patterns, ``c`` the largest
    side of a forbidden pattern.  Each locally admissible ``(c+1) x (c+1)``
    square gives the tile whose west and south colors are its bottom-left
    ``c x c`` block, north its top-left block and east its bottom-right block.
    The returned map sends a tile index to the letter in its bottom-left cell.
    """
    if not spec.is_explicit:
        raise ValueError("sft_to_wang needs an explicit finite forbidden list")
    sizes = [max(f.width, f.height) for f in spec.forbidden]
    if spec.rule is not None:
        sizes.append(max(spec.rule.width, spec.rule.height))
    c = max(sizes, default=1)
    colors = enumerate_locally_admissible(spec, c, c)
    if not colors:
        raise EmptyShift(f"no admissible {c}x{c} pattern")
    color_id = {p: i for i, p in enumerate(colors)}
    block = rectangle(c, c)

    def sub(q: Pattern, dx: int, dy: int) -> int:
        return color_id[Pattern({(x, y): q[(x + dx, y + dy)] for x, y in block})]

    quads = {}
    for q in enumerate_locally_admissible(spec, c + 1, c + 1):
        bl = sub(q, 0, 0)
        t = WangTile(north=sub(q, 0, 1), east=sub(q, 1, 0), south=bl, west=bl)
        quads.setdefault(t, q[(0, 0)])
    tiles = tuple(quads)
    ts = WangTileSet(tuple(colors), tiles)
    letter = {i: quads[t] for i, t in enumerate(ts.tiles)}
    return ts, letter


# --------------------------------------------------------------------------
# Wang -> SFT
# --------------------------------------------------------------------------


def wang_to_sft(ts: WangTileSet) -> ShiftSpec:
    """Letters are tile indices; forbidden are the mismatched adjacent pairs."""
    alpha = Alphabet(tuple(f"t{i}" for i in range(len(ts))))
    forb = []
    for a, ta in enumerate(ts.tiles):
        for b, tb in enumerate(ts.tiles):
            if ta.east != tb.west:
                forb.append(Pattern({(0, 0): a, (1, 0): b}))
            if ta.north != tb.south:
                forb.append(Pattern({(0, 0): a, (0, 1): b}))
    return ShiftSpec(alpha, tuple(forb), name="wang")


# --------------------------------------------------------------------------
# Tiling search
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class Boundary:
    """Fixed outer edge colors of a ``w x h`` rectangle (color ids; missing = free).

    ``west[y]`` / ``east[y]`` constrain the west edge of column 0 and the east
    edge of column ``w-1`` in row ``y``; ``south[x]`` / ``north[x]`` likewise.
    """

    west: Mapping[int, int] = field(default_factory=dict)
    east: Mapping[int, int] = field(default_factory=dict)
    south: Mapping[int, int] = field(default_factory=dict)
    north: Mapping[int, int] = field(default_factory=dict)

    def arrays(self, w: int, h: int):
        out = []
        for side, n in ((self.west, h), (self.east, h), (self.south, w), (self.north, w)):
            a = np.full(n, -1, dtype=np.int64)
            for k, v in side.items():
                a[k] = v
            out.append(a)
        return out


class _Index:
    """Sorted-key candidate tables for the depth-first search."""

    def __init__(self, ts: WangTileSet):
        arr = ts.arrays()
        self.arr = arr
        nc = max(len(ts.colors), 1)
        self.nc = nc
        key_ws = arr[:, 3] * nc + arr[:, 2]
        self.ord_ws = np.argsort(key_ws, kind="stable").astype(np.int64)
        self.key_ws = key_ws[self.ord_ws]
        self.ord_s = np.argsort(arr[:, 2], kind="stable").astype(np.int64)
        self.key_s = arr[self.ord_s, 2]
        self.ord_w = np.argsort(arr[:, 3], kind="stable").astype(np.int64)
        self.key_w = arr[self.ord_w, 3]

    def kernel_args(self):
        return (self.arr, self.nc, self.ord_ws, self.key_ws, self.ord_s, self.key_s, self.ord_w, self.key_w)


@njit
def _cell_range(x, y, grid, arr, nc, bW, bS, ord_ws, key_ws, ord_s, key_s, ord_w, key_w, n_tiles):
    if x > 0:
        wc = arr[grid[y, x - 1], 1]
    else:
        wc = bW[y]
    if y > 0:
        sc = arr[grid[y - 1, x], 0]
    else:
        sc = bS[x]
    # mode: 0 = (W, S) table, 1 = S table, 2 = W table, 3 = all tiles
    if wc >= 0 and sc >= 0:
        k = wc * nc + sc
        return 0, np.searchsorted(key_ws, k, "left"), np.searchsorted(key_ws, k, "right")
    if sc >= 0:
        return 1, np.searchsorted(key_s, sc, "left"), np.searchsorted(key_s, sc, "right")
    if wc >= 0:
        return 2, np.searchsorted(key_w, wc, "left"), np.searchsorted(key_w, wc, "right")
    return 3, 0, n_tiles


@njit
def _tile_dfs(arr, nc, ord_ws, key_ws, ord_s, key_s, ord_w, key_w, w, h, bW, bE, bS, bN, mask, stop_after, node_limit):
    """Row-major depth-first tiling search; returns (count, first tiling, nodes, complete).

    ``mask`` is either ``(1, 1, 1)`` (no restriction) or ``(h, w, n_tiles)``
    booleans allowing tile ``t`` at cell ``(x, y)`` iff ``mask[y, x, t]``.
    """
    use_mask = mask.shape[0] == h and mask.shape[1] == w and mask.shape[2] == arr.shape[0]
    n_tiles = arr.shape[0]
    ncell = w * h
    grid = np.full((h, w), -1, dtype=np.int64)
    first = np.full((h, w), -1, dtype=np.int64)
    mode = np.zeros(ncell, dtype=np.int64)
    pos = np.zeros(ncell, dtype=np.int64)
    end = np.zeros(ncell, dtype=np.int64)
    count = 0
    nodes = 0
    if ncell == 0:
        return 1, first, 0, True
    k = 0
    m, lo, hi = _cell_range(0, 0, grid, arr, nc, bW, bS, ord_ws, key_ws, ord_s, key_s, ord_w, key_w, n_tiles)
    mode[0] = m
    pos[0] = lo
    end[0] = hi
    while k >= 0:
        x = k % w
        y = k // w
        placed = False
        while pos[k] < end[k]:
            p = pos[k]
            pos[k] += 1
            if mode[k] == 0:
                t = ord_ws[p]
            elif mode[k] == 1:
                t = ord_s[p]
            elif mode[k] == 2:
                t = ord_w[p]
            else:
                t = p
            nodes += 1
            if nodes > node_limit:
                return count, first, nodes, False
            if use_mask and not mask[y, x, t]:
                continue
            if x > 0 and arr[t, 3] != arr[grid[y, x - 1], 1]:
                continue
            if y > 0 and arr[t, 2] != arr[grid[y - 1, x], 0]:
                continue
            if x == 0 and bW[y] >= 0 and arr[t, 3] != bW[y]:
                continue
            if y == 0 and bS[x] >= 0 and arr[t, 2] != bS[x]:
                continue
            if x == w - 1 and bE[y] >= 0 and arr[t, 1] != bE[y]:
                continue
            if y == h - 1 and bN[x] >= 0 and arr[t, 0] != bN[x]:
                continue
            grid[y, x] = t
            placed = True
            break
        if not placed:
            grid[y, x] = -1
            k -= 1
            continue
        if k == ncell - 1:
            if count == 0:
                first[:, :] = grid
            count += 1
            if stop_after > 0 and count >= stop_after:
                return count, first, nodes, True
            continue
        k += 1
        x = k % w
        y = k // w
        m, lo, hi = _cell_range(x, y, grid, arr, nc, bW, bS, ord_ws, key_ws, ord_s, key_s, ord_w, key_w, n_tiles)
        mode[k] = m
        pos[k] = lo
        end[k] = hi
    return count, first, nodes, True


class SearchLimit(Exception):
    """The rectangle or node budget of a tiling search was exceeded."""


_NO_MASK = np.ones((1, 1, 1), dtype=np.bool_)


def _prepare(ts, w, h, boundary, cell_limit, mask):
    if w * h > cell_limit:
        raise SearchLimit(f"{w}x{h} exceeds the cell limit {cell_limit}")
    b = boundary or Boundary()
    bW, bE, bS, bN = b.arrays(w, h)
    m = _NO_MASK if mask is None else np.ascontiguousarray(mask, dtype=np.bool_)
    return _Index(ts), bW, bE, bS, bN, m


def count_tilings(ts: WangTileSet, w: int, h: int, boundary: Boundary | None = None,
                  cell_limit: int = DEFAULT_CELL_LIMIT, node_limit: int = 10**9, mask=None) -> int:
    idx, bW, bE, bS, bN, m = _prepare(ts, w, h, boundary, cell_limit, mask)
    if len(ts) == 0:
        return 0
    count, _, _, complete = _tile_dfs(*idx.kernel_args(), w, h, bW, bE, bS, bN, m, 0, node_limit)
    if not complete:
        raise SearchLimit("node limit exceeded")
    return int(count)


def first_tiling(ts: WangTileSet, w: int, h: int, boundary: Boundary | None = None,
                 cell_limit: int = DEFAULT_CELL_LIMIT, node_limit: int = 10**9, mask=None) -> np.ndarray | None:
    """Lexicographically first tiling (tile indices, ``arr[y, x]``), or None.

    ``mask[y, x, t]`` (optional) restricts which tiles may sit at each cell.
    """
    idx, bW, bE, bS, bN, m = _prepare(ts, w, h, boundary, cell_limit, mask)
    if len(ts) == 0:
        return None
    count, first, _, complete = _tile_dfs(*idx.kernel_args(), w, h, bW, bE, bS, bN, m, 1, node_limit)
    if not complete:
        raise SearchLimit("node limit exceeded")
    return first if count else None


def iter_tilings(ts: WangTileSet, w: int, h: int, boundary: Boundary | None = None,
                 cell_limit: int = DEFAULT_CELL_LIMIT) -> Iterator[np.ndarray]:
    """All tilings in lexicographic (row-major, tile index) order."""
    if w * h > cell_limit:
        raise SearchLimit(f"{w}x{h} exceeds the cell limit {cell_limit}")
    b = boundary or Boundary()
    tiles = ts.tiles
    grid = np.full((h, w), -1, dtype=np.int64)

    def fits(t, x, y):
        if x > 0 and t.west != tiles[grid[y, x - 1]].east:
            return False
        if x == 0 and y in b.west and t.west != b.west[y]:
            return False
        if y > 0 and t.south != tiles[grid[y - 1, x]].north:
            return False
        if y == 0 and x in b.south and t.south != b.south[x]:
            return False
        if x == w - 1 and y in b.east and t.east != b.east[y]:
            return False
        if y == h - 1 and x in b.north and t.north != b.north[x]:
            return False
        return True

    def rec(k):
        if k == w * h:
            yield grid.copy()
            return
        x, y = k % w, k // w
        for i, t in enumerate(tiles):
            if fits(t, x, y):
                grid[y, x] = i
                yield from rec(k + 1)
        grid[y, x] = -1

    yield from rec(0)


def tile_rectangle(ts: WangTileSet, w: int, h: int, boundary: Boundary | None = None, mode: str = "count",
                   cell_limit: int = DEFAULT_CELL_LIMIT):
    """Dispatch on ``mode``: ``first`` (array or None), ``count`` (int) or ``enumerate`` (iterator)."""
    if mode == "first":
        return first_tiling(ts, w, h, boundary, cell_limit)
    if mode == "count":
        return count_tilings(ts, w, h, boundary, cell_limit)
    if mode == "enumerate":
        return iter_tilings(ts, w, h, boundary, cell_limit)
    raise ValueError(f"unknown mode {mode!r}")


def tiling_is_valid(ts: WangTileSet, grid: np.ndarray) -> bool:
    h, w = grid.shape
    for y in range(h):
        for x in range(w):
            t = ts.tiles[grid[y, x]]
            if x + 1 < w and t.east != ts.tiles[grid[y, x + 1]].west:
                return False
            if y + 1 < h and t.north != ts.tiles[grid[y + 1, x]].south:
                return False
    return True


def project(grid: np.ndarray, letter: Mapping[int, int]) -> Pattern:
    """Letter pattern of a tiling under a tile -> letter map."""
    h, w = grid.shape
    return Pattern({(x, y): letter[int(grid[y, x])] for y in range(h) for x in range(w)})


# --------------------------------------------------------------------------
# Rendering
# --------------------------------------------------------------------------

_PALETTE = ["#e6194b", "#3cb44b", "#ffe119", "#4363d8", "#f58231", "#911eb4", "#46f0f0",
            "#f032e6", "#bcf60c", "#fabebe", "#008080", "#e6beff", "#9a6324", "#fffac8"]


def arc_consistent(ts: WangTileSet, mask: np.ndarray) -> np.ndarray:
    """Shrink a ``(h, w, n_tiles)`` placement mask until every allowed tile has a matching neighbour allowed on each inner side."""
    arr = ts.arrays()
    horiz = (arr[:, 1][:, None] == arr[:, 3][None, :]).astype(np.int64)  # a west of b
    vert = (arr[:, 0][:, None] == arr[:, 2][None, :]).astype(np.int64)  # a south of b
    m = np.array(mask, dtype=bool)
    while True:
        mi = m.astype(np.int64)
        keep = m.copy()
        keep[:, :-1] &= (mi[:, 1:] @ horiz.T) > 0
        keep[:, 1:] &= (mi[:, :-1] @ horiz) > 0
        keep[:-1] &= (mi[1:] @ vert.T) > 0
        keep[1:] &= (mi[:-1] @ vert) > 0
        if (keep == m).all():
            return m
        m = keep


def projected_patterns(ts: WangTileSet, letter: Mapping[int, int], n: int, candidates) -> list[Pattern]:
    """Those ``n x n`` candidate letter patterns that are the projection of some tiling."""
    letters = np.array([letter[i] for i in range(len(ts))])
    out = []
    for p in candidates:
        want = np.array([[p[(x, y)] for x in range(n)] for y in range(n)])
        mask = arc_consistent(ts, letters[None, None, :] == want[:, :, None])
        if not mask.any(axis=2).all():
            continue
        if first_tiling(ts, n, n, mask=mask) is not None:
            out.append(p)
    return out


def render_svg(ts: WangTileSet, grid: np.ndarray, cell: int = 24) -> str:
    """One triangle per edge, colored by color id, rows drawn with y upward."""
    h, w = grid.shape
    parts = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{w * cell}" height="{h * cell}">']
    for y in range(h):
        for x in range(w):
            t = ts.tiles[grid[y, x]]
            x0, y0 = x * cell, (h - 1 - y) * cell
            cx, cy = x0 + cell / 2, y0 + cell / 2
            corners = {
                "north": ((x0, y0), (x0 + cell, y0)),
                "east": ((x0 + cell, y0), (x0 + cell, y0 + cell)),
                "south": ((x0 + cell, y0 + cell), (x0, y0 + cell)),
                "west": ((x0, y0 + cell), (x0, y0)),
            }
            for side, (a, b) in corners.items():
                col = _PALETTE[getattr(t, side) % len(_PALETTE)]
                parts.append(
                    f'<polygon points="{a[0]},{a[1]} {b[0]},{b[1]} {cx},{cy}" fill="{col}" stroke="black" stroke-width="0.5"/>'
                )
    parts.append("</svg>")
    return "\n".join(parts)


def checkerboard_tiles() -> WangTileSet:
    """Two tiles that must alternate both horizontally and vertically."""
    return WangTileSet.from_labels([("a", "b", "c", "d"), ("c", "d", "a", "b")])


__all__ = [
    "WangTile",
    "WangTileSet",
    "Boundary",
    "EmptyShift",
    "SearchLimit",
    "sft_to_wang",
    "wang_to_sft",
    "tile_rectangle",
    "count_tilings",
    "first_tiling",
    "iter_tilings",
    "tiling_is_valid",
    "project",
    "projected_patterns",
    "arc_consistent",
    "render_svg",
    "checkerboard_tiles",
]
