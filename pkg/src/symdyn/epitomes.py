"""Epitome families: compact values that a bounded exterior can pin down.

An epitome family maps n x n patterns to values (partially: the evaluator
may be undefined).  For a plain family some exterior pattern R is
compatible with P and with no P' of a different value; for an ordered
family R is compatible exactly with the P' whose value is below P's value.

This module hosts three instances over the letters white/black/red:

* the mirror shift (a horizontal red line with mirror-symmetric half planes),
* the semi-mirror shift (a black cell below the line forces black above it),
* the hidden-square shift of Kass and Madden (no k x k square whose top row
  is red and bottom row is black).

Compatibility is decided exactly on finite patterns through direct checks
of the forbidden families, which is what local admissibility means for
these shifts.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Callable, Hashable, Iterable, Iterator, Sequence

import numpy as np

from .core import (
    BLACK,
    BWR,
    RED,
    WHITE,
    IndexedGenerator,
    Pattern,
    ShiftSpec,
    _search,
    all_patterns,
    rectangle,
)


class BudgetExceeded(RuntimeError):
    """Raised by an evaluator that ran out of its step budget."""


@dataclass(frozen=True)
class EpitomeFamily:
    name: str
    evaluator: Callable[[Pattern], Hashable | None]
    order: Callable[[Hashable, Hashable], bool] | None = None
    domain: Callable[[Pattern], bool] | None = None
    time_class: str = "computable"  # "computable" | "exp-time" | "oracle"
    alphabet_size: int = 3

    def value(self, p: Pattern):
        if self.domain is not None and not self.domain(p):
            return None
        return self.evaluator(p)

    def leq(self, a, b) -> bool:
        if self.order is None:
            return a == b
        return self.order(a, b)


# --------------------------------------------------------------------------
# Pattern helpers
# --------------------------------------------------------------------------


def square(n: int, origin=(0, 0)) -> list[tuple[int, int]]:
    return rectangle(n, n, origin)


def is_red_free(p: Pattern) -> bool:
    return all(v != RED for _, v in p.items())


def blackset(p: Pattern) -> frozenset:
    (x0, y0), _ = p.bbox() if len(p) else ((0, 0), (0, 0))
    return frozenset((x - x0, y - y0) for (x, y), v in p.items() if v == BLACK)


def bw_patterns(n: int) -> Iterator[Pattern]:
    """All n x n black/white patterns."""
    return all_patterns(2, n, n)


def _arrays(p: Pattern):
    """(red, black, defined) boolean grids indexed [y, x] plus the origin."""
    val, origin = _values(p)
    return val == RED, val == BLACK, val >= 0, origin


def render_svg(p: Pattern, cell: int = 12) -> str:
    """SVG rendering of a (possibly non-rectangular) white/black/red pattern."""
    fill = {WHITE: "#f4f4f4", BLACK: "#333333", RED: "#d33f3f"}
    (x0, y0), (x1, y1) = p.bbox()
    w, h = (x1 - x0 + 1) * cell, (y1 - y0 + 1) * cell
    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}">']
    for (x, y), v in p.items():
        px, py = (x - x0) * cell, (y1 - y) * cell
        out.append(f'<rect x="{px}" y="{py}" width="{cell}" height="{cell}" fill="{fill.get(v, "#88f")}" stroke="#999"/>')
    out.append("</svg>")
    return "\n".join(out)


# --------------------------------------------------------------------------
# Mirror and semi-mirror shifts
# --------------------------------------------------------------------------


def _mirror_pattern(i: int, semi: bool) -> Pattern:
    """Enumerate the forbidden family.

    Indices 0-3 are a red cell beside a non-red one; afterwards even indices
    give two reds on different rows and odd indices give asymmetric pairs
    around a red cell (for the semi-mirror: black below, white above).
    """
    if i < 4:
        side, letter = divmod(i, 2)
        return Pattern({(0, 0): RED, (1 if side == 0 else -1, 0): (WHITE, BLACK)[letter]})
    j, kind = divmod(i - 4, 2)
    if kind == 0:  # offsets (dx, dy) with dy >= 1, shell by shell
        d = 1
        while j >= 2 * d + 1:
            j -= 2 * d + 1
            d += 1
        return Pattern({(0, 0): RED, (j - d, d): RED})
    if semi:
        return Pattern({(0, 0): RED, (0, -(j + 1)): BLACK, (0, j + 1): WHITE})
    d, pair = divmod(j, 2)
    a, b = ((BLACK, WHITE), (WHITE, BLACK))[pair]
    return Pattern({(0, 0): RED, (0, d + 1): a, (0, -(d + 1)): b})


def mirror_shift() -> ShiftSpec:
    return ShiftSpec(BWR, IndexedGenerator(lambda i: _mirror_pattern(i, False), "mirror"), name="mirror")


def semi_mirror_shift() -> ShiftSpec:
    return ShiftSpec(BWR, IndexedGenerator(lambda i: _mirror_pattern(i, True), "semi-mirror"), name="semi-mirror")


def _values(p: Pattern) -> tuple[np.ndarray, tuple[int, int]]:
    """Letter grid [y, x] over the bounding box, -1 where undefined."""
    (x0, y0), (x1, y1) = p.bbox()
    val = np.full((y1 - y0 + 1, x1 - x0 + 1), -1, dtype=np.int64)
    for (x, y), v in p.items():
        val[y - y0, x - x0] = v
    return val, (x0, y0)


def mirror_ok_batch(vals: np.ndarray, semi: bool = False) -> np.ndarray:
    """Vectorised (semi-)mirror check over a stack of letter grids ``[b, y, x]``."""
    red, black, defined = vals == RED, vals == BLACK, vals >= 0
    b, h, _ = vals.shape
    red_rows = red.any(axis=2)
    ok = red_rows.sum(axis=1) <= 1
    r = np.argmax(red_rows, axis=1)
    has = red_rows.any(axis=1)
    idx = np.arange(b)
    line = red[idx, r] & has[:, None]
    nonred = defined[idx, r] & ~red[idx, r]
    ok &= ~((line[:, :-1] & nonred[:, 1:]).any(axis=1) | (line[:, 1:] & nonred[:, :-1]).any(axis=1))
    for d in range(1, h):
        up, down = r + d, r - d
        inside = (up < h) & (down >= 0) & has
        up_c, down_c = np.clip(up, 0, h - 1), np.clip(down, 0, h - 1)
        both = line & defined[idx, up_c] & defined[idx, down_c] & inside[:, None]
        if semi:
            bad = both & black[idx, down_c] & ~black[idx, up_c]
        else:
            bad = both & (black[idx, down_c] != black[idx, up_c])
        ok &= ~bad.any(axis=1)
    return ok


def mirror_admissible(p: Pattern, semi: bool = False) -> bool:
    """Exact check that no pattern of the (semi-)mirror forbidden family occurs in ``p``."""
    if not len(p):
        return True
    val, _ = _values(p)
    return bool(mirror_ok_batch(val[None], semi)[0])


def mirror_compatibility(n: int, semi: bool = False) -> np.ndarray:
    """Matrix M[i, j]: is pattern j compatible with the enforcer of pattern i?

    Patterns are all n x n black/white squares in :func:`bw_patterns` order.
    """
    pats = list(bw_patterns(n))
    grids = np.array([_values(q)[0] for q in pats])
    out = np.zeros((len(pats), len(pats)), dtype=bool)
    for i, p in enumerate(pats):
        val, (x0, y0) = _values(mirror_enforcer(p))
        stack = np.repeat(val[None], len(pats), axis=0)
        stack[:, -y0 : -y0 + n, -x0 : -x0 + n] = grids
        out[i] = mirror_ok_batch(stack, semi)
    return out


def mirror_epitome(n: int) -> EpitomeFamily:
    """Identity on red-free n x n patterns, undefined otherwise."""
    return EpitomeFamily(
        f"mirror-{n}",
        evaluator=lambda p: p.normalize(),
        domain=lambda p: is_red_free(p) and p.width == n and p.height == n,
        time_class="exp-time",
    )


def semi_mirror_order(n: int) -> Callable[[Pattern, Pattern], bool]:
    """Values are red-free patterns, ordered by inclusion of their black cells."""

    def leq(a: Pattern, b: Pattern) -> bool:
        return blackset(a) <= blackset(b)

    return leq


def semi_mirror_epitome(n: int) -> EpitomeFamily:
    return EpitomeFamily(
        f"semi-mirror-{n}",
        evaluator=lambda p: p.normalize(),
        order=semi_mirror_order(n),
        domain=lambda p: is_red_free(p) and p.width == n and p.height == n,
        time_class="exp-time",
    )


def mirror_enforcer(p: Pattern, margin: int | None = None) -> Pattern:
    """Exterior pattern R pinning down the red-free square ``p``.

    R lives on the square window enlarged by ``margin`` (default n + 1, the
    least that holds every mirrored cell) minus the support of ``p``: a red
    row one above ``p``, black at the mirror images of p's black cells,
    white elsewhere.
    """
    if not is_red_free(p):
        raise ValueError("the enforcer needs a red-free pattern")
    n = p.width
    m = n + 1 if margin is None else margin
    (x0, y0), _ = p.bbox()
    line = y0 + n
    cells = {}
    for y in range(y0 - m, y0 + n + m):
        for x in range(x0 - m, x0 + n + m):
            if (x, y) in p:
                continue
            if y == line:
                cells[(x, y)] = RED
            elif y > line and (x, 2 * line - y) in p:
                cells[(x, y)] = p[(x, 2 * line - y)]
            else:
                cells[(x, y)] = WHITE
    return Pattern(cells)


# --------------------------------------------------------------------------
# Hidden squares (Kass-Madden)
# --------------------------------------------------------------------------


def _hidden_square(k: int) -> Pattern:
    return Pattern({**{(x, k - 1): RED for x in range(k)}, **{(x, 0): BLACK for x in range(k)}})


def km_shift() -> ShiftSpec:
    """No k x k square (k >= 2) with an all-red top row and an all-black bottom row."""
    return ShiftSpec(BWR, IndexedGenerator(lambda i: _hidden_square(i + 2), "hidden-squares"), name="hidden-squares")


def _runs(mask: np.ndarray) -> np.ndarray:
    """run[y, x] = length of the run of True starting at x and going right."""
    run = np.zeros(mask.shape, dtype=np.int64)
    acc = np.zeros(mask.shape[0], dtype=np.int64)
    for x in range(mask.shape[1] - 1, -1, -1):
        acc = np.where(mask[:, x], acc + 1, 0)
        run[:, x] = acc
    return run


def find_hidden_square(p: Pattern):
    """Return ``(x, y, k)`` (bottom-left corner, side) of a hidden square, or None."""
    if not len(p):
        return None
    red, black, _, (x0, y0) = _arrays(p)
    rr, br = _runs(red), _runs(black)
    h = red.shape[0]
    for k in range(2, min(red.shape) + 1):
        hits = (br[: h - k + 1] >= k) & (rr[k - 1 :] >= k)
        if hits.any():
            y, x = np.argwhere(hits)[0]
            return int(x) + x0, int(y) + y0, k
    return None


def hidden_square_free(p: Pattern) -> bool:
    return find_hidden_square(p) is None


def simple_pattern(profile: Sequence[int]) -> Pattern:
    """n x n pattern whose row i (bottom row first) is k_i black cells then white."""
    n = len(profile)
    if any(not 0 <= k <= n for k in profile):
        raise ValueError("profile entries must lie in [0, n]")
    return Pattern({(x, y): BLACK if x < profile[y] else WHITE for y in range(n) for x in range(n)})


def km_profile(p: Pattern) -> tuple[int, ...] | None:
    """Black-prefix length of every row (bottom first) if ``p`` is simple, else None."""
    if not len(p) or not p.is_rectangular() or p.width != p.height:
        return None
    (x0, y0), _ = p.bbox()
    n = p.width
    out = []
    for y in range(n):
        row = [p[(x0 + x, y0 + y)] for x in range(n)]
        if RED in row:
            return None
        k = row.index(WHITE) if WHITE in row else n
        if any(v != WHITE for v in row[k:]):
            return None
        out.append(k)
    return tuple(out)


def profile_leq(a: Sequence[int], b: Sequence[int]) -> bool:
    return all(x <= y for x, y in zip(a, b))


def km_epitome(n: int) -> EpitomeFamily:
    return EpitomeFamily(
        f"hidden-squares-{n}",
        evaluator=km_profile,
        order=profile_leq,
        domain=lambda p: p.width == n and p.height == n,
        time_class="computable",
    )


def km_enforcer(p: Pattern) -> Pattern:
    """Exterior pattern forcing every compatible simple pattern below p's profile.

    Row i (1-based, bottom first, at y = i - 1) gets a black run of total
    length 3n - 2i + 1 ending at p's last black cell of that row; row
    3n - i + 1 gets a red run of length 3n - 2i + 2 starting in the same
    column.  Every other cell of the bounding box is white.
    """
    prof = km_profile(p)
    if prof is None:
        raise ValueError("the enforcer needs a simple pattern")
    n = len(prof)
    (x0, y0), _ = p.bbox()
    cells = {}
    for i in range(1, n + 1):
        k = prof[i - 1]
        left = k - (3 * n - 2 * i + 1)
        for x in range(left, k):
            cells[(x0 + x, y0 + i - 1)] = BLACK
        for x in range(left, left + 3 * n - 2 * i + 2):
            cells[(x0 + x, y0 + 3 * n - i)] = RED
    xs = [x for x, _ in cells] + [x0 + n - 1]
    ys = [y for _, y in cells]
    out = {}
    for y in range(min(ys), max(ys) + 1):
        for x in range(min(xs), max(xs) + 1):
            if (x, y) in p:
                continue
            out[(x, y)] = cells.get((x, y), WHITE)
    return Pattern(out)


def profiles(n: int) -> Iterator[tuple[int, ...]]:
    return itertools.product(range(n + 1), repeat=n)


# --------------------------------------------------------------------------
# Counting and chains
# --------------------------------------------------------------------------


def count_values(family: EpitomeFamily, patterns: Iterable[Pattern]) -> int:
    """Number of distinct defined values over the given patterns."""
    vals = set()
    for p in patterns:
        try:
            v = family.value(p)
        except BudgetExceeded:
            continue
        if v is not None:
            vals.add(v)
    return len(vals)


def _key(v) -> tuple:
    if isinstance(v, Pattern):
        return tuple(sorted(v.items()))
    return (v,)


def chain_from_epitomes(family: EpitomeFamily, patterns: Iterable[Pattern]) -> list[Pattern]:
    """One representative per value, maximal values first.

    The result satisfies: for j < i the j-th value is not below the i-th.
    Patterns whose evaluation exceeds its budget are skipped.
    """
    reps: dict = {}
    for p in patterns:
        try:
            v = family.value(p)
        except BudgetExceeded:
            continue
        if v is not None and v not in reps:
            reps[v] = p
    remaining = sorted(reps, key=_key)
    out = []
    while remaining:
        for v in remaining:
            if not any(w != v and family.leq(v, w) for w in remaining):
                break
        else:  # pragma: no cover - a finite partial order has maximal elements
            raise ValueError("order has no maximal element; not a partial order")
        remaining.remove(v)
        out.append(reps[v])
    return out


def chain_is_ordered(family: EpitomeFamily, chain: Sequence[Pattern]) -> bool:
    vals = [family.value(p) for p in chain]
    return all(not family.leq(vals[j], vals[i]) for i in range(len(vals)) for j in range(i))


def chain_is_increasing(
    chain: Sequence[Pattern],
    enforcer: Callable[[Pattern], Pattern],
    compatible: Callable[[Pattern], bool],
) -> bool:
    """Witness check: R_i is compatible with P_i and with no earlier P_j.

    This shows each extension set adds an exterior missing from the union
    of the earlier ones, so the unions increase strictly.
    """
    for i, p in enumerate(chain):
        r = enforcer(p)
        if not compatible(p.union(r)):
            return False
        for q in chain[:i]:
            if compatible(q.translate(*_offset(q, p)).union(r)):
                return False
    return True


def _offset(q: Pattern, p: Pattern) -> tuple[int, int]:
    (qx, qy), _ = q.bbox()
    (px, py), _ = p.bbox()
    return px - qx, py - qy


# --------------------------------------------------------------------------
# Bounded extension sets
# --------------------------------------------------------------------------


def extension_set_bounded(
    p: Pattern,
    spec: ShiftSpec,
    margin,
    generator_budget: int = 64,
    node_limit: int = 2_000_000,
    compatible: Callable[[Pattern], bool] | None = None,
) -> frozenset:
    """All margin-ring patterns R (relative to p's bounding box) with p | R admissible.

    ``margin`` is an int, or ``(left, right)`` / ``(left, right, bottom,
    top)``.  One-dimensional shifts get no vertical margin.  Compatibility
    is local admissibility of the union unless ``compatible`` is given.
    Ring patterns are returned as frozensets of ``((dx, dy), letter)`` with
    offsets relative to p's bottom-left corner.
    """
    if isinstance(margin, int):
        left = right = margin
        bottom = top = margin if spec.dim == 2 else 0
    elif len(margin) == 2:
        left, right = margin
        bottom = top = 0
    else:
        left, right, bottom, top = margin
    (x0, y0), _ = p.bbox()
    w, h = p.width + left + right, p.height + bottom + top
    fixed = {(x - x0 + left, y - y0 + bottom): v for (x, y), v in p.items()}
    ring = [(x, y) for y in range(h) for x in range(w) if (x, y) not in fixed]
    out = set()

    def keep(g):
        cells = frozenset(((x - left, y - bottom), int(g[y, x])) for x, y in ring)
        if compatible is not None:
            full = Pattern({(x, y): int(g[y, x]) for y in range(h) for x in range(w)})
            if not compatible(full):
                return False
        out.add(cells)
        return False

    _, exhausted = _search(spec, w, h, fixed, generator_budget, node_limit, keep)
    if not exhausted:
        raise RuntimeError("node limit exceeded while enumerating extensions")
    return frozenset(out)
