"""Alphabets, finite patterns, forbidden-pattern shifts and bounded admissibility.

Conventions used throughout the package:

* positions are ``(x, y)`` integer pairs, ``x`` grows to the right and ``y``
  grows upward;
* dense arrays are indexed ``arr[y, x]``;
* letter ids of the standard alphabets are ``white = 0``, ``black = 1`` and
  ``red = 2``.
"""

from __future__ import annotations

import enum
import itertools
import json
from dataclasses import dataclass
from typing import Callable, Iterable, Iterator, Mapping, Sequence

import numpy as np

Pos = tuple[int, int]


class Verdict(enum.Enum):
    """Third outcome of bounded searches that hit their node limit."""

    INCONCLUSIVE = "inconclusive"

    def __bool__(self):  # pragma: no cover - guard against silent misuse
        raise TypeError("an inconclusive verdict has no truth value")


INCONCLUSIVE = Verdict.INCONCLUSIVE

DEFAULT_NODE_LIMIT = 2_000_000


# --------------------------------------------------------------------------
# Alphabet
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class Alphabet:
    names: tuple[str, ...]

    def __post_init__(self):
        if not self.names:
            raise ValueError("an alphabet needs at least one letter")
        if len(set(self.names)) != len(self.names):
            raise ValueError("letter names must be unique")
        object.__setattr__(self, "names", tuple(self.names))

    def __len__(self):
        return len(self.names)

    def __iter__(self):
        return iter(range(len(self.names)))

    def id(self, name: str) -> int:
        return self.names.index(name)

    def name(self, letter: int) -> str:
        return self.names[letter]

    @classmethod
    def of_size(cls, k: int) -> "Alphabet":
        return cls(tuple(str(i) for i in range(k)))


WHITE, BLACK, RED = 0, 1, 2
BW = Alphabet(("white", "black"))
BWR = Alphabet(("white", "black", "red"))

GLYPHS = {0: ".", 1: "#", 2: "r"}


# --------------------------------------------------------------------------
# Pattern
# --------------------------------------------------------------------------


class Pattern:
    """Immutable finite partial map from grid positions to letter ids."""

    __slots__ = ("_cells", "_hash")

    def __init__(self, cells: Mapping[Pos, int] | Iterable[tuple[Pos, int]] = ()):
        items = cells.items() if isinstance(cells, Mapping) else cells
        self._cells = {(int(x), int(y)): int(v) for (x, y), v in items}
        self._hash = None

    # basic protocol -------------------------------------------------------
    def __getitem__(self, pos: Pos) -> int:
        return self._cells[pos]

    def get(self, pos: Pos, default=None):
        return self._cells.get(pos, default)

    def __contains__(self, pos) -> bool:
        return pos in self._cells

    def __len__(self):
        return len(self._cells)

    def __iter__(self):
        return iter(sorted(self._cells, key=lambda p: (p[1], p[0])))

    def items(self):
        return ((p, self._cells[p]) for p in self)

    @property
    def support(self) -> frozenset[Pos]:
        return frozenset(self._cells)

    def __eq__(self, other):
        return isinstance(other, Pattern) and self._cells == other._cells

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(frozenset(self._cells.items()))
        return self._hash

    def __repr__(self):
        if not self._cells:
            return "Pattern({})"
        (x0, y0), (x1, y1) = self.bbox()
        if len(self._cells) == (x1 - x0 + 1) * (y1 - y0 + 1) and max(self._cells.values()) < 3:
            rows = [
                "".join(GLYPHS[self._cells[(x, y)]] for x in range(x0, x1 + 1))
                for y in range(y1, y0 - 1, -1)
            ]
            return f"Pattern@{(x0, y0)}[{'/'.join(rows)}]"
        return f"Pattern({dict(self.items())})"

    # geometry -------------------------------------------------------------
    def bbox(self) -> tuple[Pos, Pos]:
        if not self._cells:
            raise ValueError("empty pattern has no bounding box")
        xs = [p[0] for p in self._cells]
        ys = [p[1] for p in self._cells]
        return (min(xs), min(ys)), (max(xs), max(ys))

    @property
    def width(self) -> int:
        (x0, _), (x1, _) = self.bbox()
        return x1 - x0 + 1

    @property
    def height(self) -> int:
        (_, y0), (_, y1) = self.bbox()
        return y1 - y0 + 1

    def is_rectangular(self) -> bool:
        return bool(self._cells) and len(self._cells) == self.width * self.height

    def translate(self, dx: int, dy: int) -> "Pattern":
        return Pattern({(x + dx, y + dy): v for (x, y), v in self._cells.items()})

    def normalize(self) -> "Pattern":
        if not self._cells:
            return self
        (x0, y0), _ = self.bbox()
        return self.translate(-x0, -y0)

    def restrict(self, positions: Iterable[Pos]) -> "Pattern":
        return Pattern({p: self._cells[p] for p in positions if p in self._cells})

    def union(self, other: "Pattern") -> "Pattern":
        for p, v in other._cells.items():
            if self._cells.get(p, v) != v:
                raise ValueError(f"patterns disagree at {p}")
        merged = dict(self._cells)
        merged.update(other._cells)
        return Pattern(merged)

    def with_cells(self, updates: Mapping[Pos, int]) -> "Pattern":
        merged = dict(self._cells)
        merged.update(updates)
        return Pattern(merged)

    def count(self, letter: int) -> int:
        return sum(1 for v in self._cells.values() if v == letter)

    # dense conversion -----------------------------------------------------
    @classmethod
    def from_array(cls, arr, origin: Pos = (0, 0)) -> "Pattern":
        a = np.asarray(arr)
        if a.ndim == 1:
            a = a[None, :]
        ox, oy = origin
        return cls({(ox + x, oy + y): int(a[y, x]) for y in range(a.shape[0]) for x in range(a.shape[1]) if a[y, x] >= 0})

    @classmethod
    def word(cls, letters: Sequence[int], origin: Pos = (0, 0)) -> "Pattern":
        ox, oy = origin
        return cls({(ox + i, oy): int(v) for i, v in enumerate(letters)})

    @classmethod
    def from_rows(cls, rows: Sequence[str], legend: Mapping[str, int] | None = None) -> "Pattern":
        """Build from text rows listed top row first (``.``=0, ``#``=1, ``r``=2)."""
        legend = legend or {".": 0, "#": 1, "r": 2}
        h = len(rows)
        return cls({(x, h - 1 - i): legend[ch] for i, row in enumerate(rows) for x, ch in enumerate(row) if ch in legend})

    def to_array(self, fill: int = -1) -> np.ndarray:
        (x0, y0), (x1, y1) = self.bbox()
        out = np.full((y1 - y0 + 1, x1 - x0 + 1), fill, dtype=np.int64)
        for (x, y), v in self._cells.items():
            out[y - y0, x - x0] = v
        return out

    # serialisation --------------------------------------------------------
    def to_json(self, alphabet: Alphabet | None = None) -> list:
        if alphabet is None:
            return [[x, y, v] for (x, y), v in self.items()]
        return [[x, y, alphabet.name(v)] for (x, y), v in self.items()]

    @classmethod
    def from_json(cls, data: Sequence, alphabet: Alphabet | None = None) -> "Pattern":
        cells = {}
        for x, y, v in data:
            cells[(x, y)] = alphabet.id(v) if (alphabet is not None and isinstance(v, str)) else int(v)
        return cls(cells)


def rectangle(width: int, height: int, origin: Pos = (0, 0)) -> list[Pos]:
    ox, oy = origin
    return [(ox + x, oy + y) for y in range(height) for x in range(width)]


def all_patterns(alphabet_size: int, width: int, height: int) -> Iterator[Pattern]:
    """Every rectangular pattern of the given shape, in row-major lexicographic order."""
    cells = rectangle(width, height)
    for letters in itertools.product(range(alphabet_size), repeat=len(cells)):
        yield Pattern(zip(cells, letters))


@dataclass(frozen=True)
class Window:
    """Rectangular pattern anchored at ``origin``."""

    origin: Pos
    width: int
    height: int
    contents: Pattern

    def __post_init__(self):
        if self.width <= 0 or self.height <= 0:
            raise ValueError("window sides must be positive")
        if self.contents.support != frozenset(rectangle(self.width, self.height, self.origin)):
            raise ValueError("window contents must fill the rectangle exactly")

    @classmethod
    def of(cls, p: Pattern) -> "Window":
        (x0, y0), _ = p.bbox()
        return cls((x0, y0), p.width, p.height, p)


# --------------------------------------------------------------------------
# Occurrence
# --------------------------------------------------------------------------


def occurs(host: Pattern, query: Pattern) -> bool:
    """True iff some translate of ``query`` lies inside ``host`` with equal letters."""
    if len(query) == 0:
        return True
    if len(query) > len(host):
        return False
    q = list(query.items())
    (ax, ay), a = q[0]
    for (hx, hy), hv in host.items():
        if hv != a:
            continue
        dx, dy = hx - ax, hy - ay
        if all(host.get((x + dx, y + dy)) == v for (x, y), v in q[1:]):
            return True
    return False


# --------------------------------------------------------------------------
# Shift specifications
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class IndexedGenerator:
    """Deterministic indexed enumeration of forbidden patterns.

    ``produce(i)`` returns the i-th forbidden pattern or ``None`` when the
    enumeration is exhausted before index ``i``.
    """

    produce: Callable[[int], Pattern | None]
    name: str = "generator"

    def take(self, budget: int) -> list[Pattern]:
        out = []
        for i in range(budget):
            p = self.produce(i)
            if p is None:
                break
            out.append(p)
        return out


@dataclass(frozen=True)
class WindowRule:
    """Forbidden set given implicitly: every ``width x height`` window rejected by ``allowed``.

    ``allowed`` receives the window letters as a tuple in row-major order,
    bottom row first.
    """

    width: int
    height: int
    allowed: Callable[[tuple[int, ...]], bool]
    name: str = "rule"


def _dedup_translation(patterns: Iterable[Pattern]) -> tuple[Pattern, ...]:
    seen = set()
    out = []
    for p in patterns:
        n = p.normalize()
        if n not in seen:
            seen.add(n)
            out.append(n)
    return tuple(out)


@dataclass(frozen=True)
class ShiftSpec:
    alphabet: Alphabet
    forbidden: tuple[Pattern, ...] | IndexedGenerator = ()
    rule: WindowRule | None = None
    dim: int = 2
    name: str = ""

    def __post_init__(self):
        if not isinstance(self.forbidden, IndexedGenerator):
            object.__setattr__(self, "forbidden", _dedup_translation(self.forbidden))
        if self.dim not in (1, 2):
            raise ValueError("dim must be 1 or 2")

    @property
    def is_explicit(self) -> bool:
        return not isinstance(self.forbidden, IndexedGenerator)

    def forbidden_list(self, budget: int | None = None) -> list[Pattern]:
        if self.is_explicit:
            return list(self.forbidden)
        if budget is None:
            raise ValueError("a generator-backed shift needs a generator budget")
        return _dedup_translation(self.forbidden.take(budget))

    def to_json(self) -> dict:
        if not self.is_explicit:
            raise ValueError("only explicit forbidden lists serialise")
        return {
            "alphabet": list(self.alphabet.names),
            "dim": self.dim,
            "name": self.name,
            "forbidden": [p.to_json(self.alphabet) for p in self.forbidden],
        }

    @classmethod
    def from_json(cls, data: Mapping) -> "ShiftSpec":
        alpha = Alphabet(tuple(data["alphabet"]))
        forb = tuple(Pattern.from_json(p, alpha) for p in data.get("forbidden", []))
        return cls(alpha, forb, dim=int(data.get("dim", 2)), name=data.get("name", ""))


def dump_spec(spec: ShiftSpec) -> str:
    return json.dumps(spec.to_json(), sort_keys=True)


# standard examples ---------------------------------------------------------


def full_shift(k: int = 2, dim: int = 2) -> ShiftSpec:
    return ShiftSpec(Alphabet.of_size(k) if k != 2 else BW, (), dim=dim, name=f"full{k}")


def s1_shift(dim: int = 1) -> ShiftSpec:
    """Binary shift forbidding two horizontally adjacent black cells."""
    return ShiftSpec(BW, (Pattern.word([BLACK, BLACK]),), dim=dim, name="S1")


def _s2_gap(i: int) -> Pattern:
    return Pattern.word([BLACK] + [WHITE] * (2 * i + 1) + [BLACK])


def s2_shift(dim: int = 1) -> ShiftSpec:
    """Binary shift forbidding two black cells separated by an odd run of white."""
    return ShiftSpec(BW, IndexedGenerator(_s2_gap, "odd-gap"), dim=dim, name="S2")


def rectangle_shift() -> ShiftSpec:
    """Black rectangles on white background, never touching even diagonally.

    Forbidden: a diagonal pair of black cells inside a 2x2 square while one of
    the two other cells is white (four three-cell patterns).
    """
    pats = []
    for diag in (((0, 0), (1, 1)), ((1, 0), (0, 1))):
        others = [p for p in rectangle(2, 2) if p not in diag]
        for w in others:
            pats.append(Pattern({diag[0]: BLACK, diag[1]: BLACK, w: WHITE}))
    return ShiftSpec(BW, tuple(pats), name="rectangles")


# --------------------------------------------------------------------------
# Local admissibility
# --------------------------------------------------------------------------


def _rule_windows_ok(p: Pattern, rule: WindowRule) -> bool:
    if not len(p):
        return True
    (x0, y0), (x1, y1) = p.bbox()
    for by in range(y0, y1 - rule.height + 2):
        for bx in range(x0, x1 - rule.width + 2):
            cells = []
            for dy in range(rule.height):
                for dx in range(rule.width):
                    v = p.get((bx + dx, by + dy))
                    if v is None:
                        break
                    cells.append(v)
                else:
                    continue
                break
            else:
                if not rule.allowed(tuple(cells)):
                    return False
    return True


def locally_admissible(p: Pattern, spec: ShiftSpec, generator_budget: int = 64) -> bool:
    """True iff no (enumerated) forbidden pattern occurs in ``p``."""
    if spec.rule is not None and not _rule_windows_ok(p, spec.rule):
        return False
    for f in spec.forbidden_list(generator_budget):
        if occurs(p, f):
            return False
    return True


# --------------------------------------------------------------------------
# Bounded extension search
# --------------------------------------------------------------------------


class _Checker:
    """Incremental forbidden-pattern checks for row-major filling of a rectangle.

    Every forbidden pattern is tested exactly when its last cell (in ``(y, x)``
    order) is assigned.
    """

    def __init__(self, spec: ShiftSpec, width: int, height: int, budget: int):
        self.w, self.h = width, height
        # tests are grouped by the letter their last cell must carry
        self.tests: dict[int, list] = {}
        for f in spec.forbidden_list(budget):
            if f.width > width or f.height > height:
                continue
            cells = list(f.items())
            lx, ly = max((c for c, _ in cells), key=lambda c: (c[1], c[0]))
            last = f[(lx, ly)]
            rel = [(x - lx, y - ly, v) for (x, y), v in cells if (x, y) != (lx, ly)]
            xs = [r[0] for r in rel] + [0]
            ys = [r[1] for r in rel] + [0]
            self.tests.setdefault(last, []).append((rel, min(xs), max(xs), min(ys)))
        self.rule = spec.rule

    def ok(self, grid: np.ndarray, x: int, y: int) -> bool:
        w = self.w
        for rel, mnx, mxx, mny in self.tests.get(int(grid[y, x]), ()):
            if x + mnx < 0 or x + mxx >= w or y + mny < 0:
                continue
            for dx, dy, v in rel:
                if grid[y + dy, x + dx] != v:
                    break
            else:
                return False
        r = self.rule
        if r is not None and x >= r.width - 1 and y >= r.height - 1:
            win = grid[y - r.height + 1 : y + 1, x - r.width + 1 : x + 1]
            if not r.allowed(tuple(int(v) for v in win.ravel())):
                return False
        return True


def _search(
    spec: ShiftSpec,
    width: int,
    height: int,
    fixed: Mapping[Pos, int],
    budget: int,
    node_limit: int,
    on_solution: Callable[[np.ndarray], bool],
    letters: Sequence[int] | None = None,
):
    """Depth-first row-major filling of a ``width x height`` rectangle.

    ``fixed`` maps rectangle-relative positions to an imposed letter or to a
    list of allowed letters.
    ``on_solution`` returns True to stop the search.  Returns
    ``(stopped, exhausted)`` where ``exhausted`` is False if the node limit hit.
    """
    chk = _Checker(spec, width, height, budget)
    grid = np.full((height, width), -1, dtype=np.int64)
    order = [(x, y) for y in range(height) for x in range(width)]
    free = list(letters if letters is not None else range(len(spec.alphabet)))
    choices = []
    for pos in order:
        v = fixed.get(pos)
        if v is None:
            choices.append(free)
        elif isinstance(v, (list, tuple)):
            choices.append(list(v))
        else:
            choices.append([v])
    n = len(order)
    if n == 0:
        return on_solution(grid), True
    idx = [0] * n
    k = 0
    nodes = 0
    while k >= 0:
        x, y = order[k]
        placed = False
        while idx[k] < len(choices[k]):
            grid[y, x] = choices[k][idx[k]]
            idx[k] += 1
            nodes += 1
            if nodes > node_limit:
                return False, False
            if chk.ok(grid, x, y):
                placed = True
                break
        if placed:
            if k == n - 1:
                if on_solution(grid):
                    return True, True
                continue
            k += 1
            idx[k] = 0
            continue
        grid[y, x] = -1
        k -= 1
    return False, True


def admissible_with_margin(
    p: Pattern,
    spec: ShiftSpec,
    margin: int,
    generator_budget: int = 64,
    node_limit: int = DEFAULT_NODE_LIMIT,
):
    """True iff ``p`` extends to a locally admissible rectangle ``margin`` cells larger on every side.

    One-dimensional shifts are only enlarged horizontally.  Returns
    :data:`INCONCLUSIVE` when the search exceeds ``node_limit``.
    """
    if not p.is_rectangular():
        raise ValueError("admissible_with_margin needs a rectangular pattern")
    if not locally_admissible(p, spec, generator_budget):
        return False
    mx = margin
    my = margin if spec.dim == 2 else 0
    (x0, y0), _ = p.bbox()
    fixed = {(x - x0 + mx, y - y0 + my): v for (x, y), v in p.items()}
    w, h = p.width + 2 * mx, p.height + 2 * my
    found, exhausted = _search(spec, w, h, fixed, generator_budget, node_limit, lambda g: True)
    if found:
        return True
    return False if exhausted else INCONCLUSIVE


def enumerate_locally_admissible(
    spec: ShiftSpec, width: int, height: int, generator_budget: int = 64, node_limit: int = DEFAULT_NODE_LIMIT
) -> list[Pattern]:
    """All locally admissible ``width x height`` rectangles anchored at the origin."""
    out: list[Pattern] = []
    cells = rectangle(width, height)

    def keep(g):
        out.append(Pattern({(x, y): int(g[y, x]) for x, y in cells}))
        return False

    _, exhausted = _search(spec, width, height, {}, generator_budget, node_limit, keep)
    if not exhausted:
        raise RuntimeError("node limit exceeded while enumerating local patterns")
    return out


@dataclass(frozen=True)
class CountInterval:
    """Block complexity with inconclusive cases: ``low <= count <= high``."""

    low: int
    high: int

    @property
    def exact(self) -> bool:
        return self.low == self.high

    def __int__(self):
        if not self.exact:
            raise ValueError(f"count only known within [{self.low}, {self.high}]")
        return self.low

    def __eq__(self, other):
        if isinstance(other, int):
            return self.exact and self.low == other
        return isinstance(other, CountInterval) and (self.low, self.high) == (other.low, other.high)

    def __hash__(self):
        return hash((self.low, self.high))


def admissible_blocks(
    spec: ShiftSpec,
    n: int,
    margin: int,
    generator_budget: int = 64,
    node_limit: int = DEFAULT_NODE_LIMIT,
) -> tuple[list[Pattern], list[Pattern]]:
    """Split the locally admissible ``n x n`` blocks into (admissible, inconclusive)."""
    if n < 1:
        raise ValueError("n must be positive")
    h = n if spec.dim == 2 else 1
    yes, unknown = [], []
    for p in enumerate_locally_admissible(spec, n, h, generator_budget, node_limit):
        r = admissible_with_margin(p, spec, margin, generator_budget, node_limit)
        if r is INCONCLUSIVE:
            unknown.append(p)
        elif r:
            yes.append(p)
    return yes, unknown


def block_complexity(
    spec: ShiftSpec,
    n: int,
    margin: int,
    generator_budget: int = 64,
    node_limit: int = DEFAULT_NODE_LIMIT,
) -> CountInterval:
    """Number of ``n x n`` patterns (length ``n`` words in 1D) admissible with the given margin."""
    yes, unknown = admissible_blocks(spec, n, margin, generator_budget, node_limit)
    return CountInterval(len(yes), len(yes) + len(unknown))


__all__ = [
    "Alphabet",
    "BW",
    "BWR",
    "BLACK",
    "WHITE",
    "RED",
    "Pattern",
    "Window",
    "ShiftSpec",
    "IndexedGenerator",
    "WindowRule",
    "INCONCLUSIVE",
    "Verdict",
    "CountInterval",
    "occurs",
    "locally_admissible",
    "admissible_with_margin",
    "admissible_blocks",
    "block_complexity",
    "enumerate_locally_admissible",
    "all_patterns",
    "rectangle",
    "full_shift",
    "s1_shift",
    "s2_shift",
    "rectangle_shift",
]
