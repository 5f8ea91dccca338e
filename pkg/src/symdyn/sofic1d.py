"""Bounded follower sets of one-dimensional shifts.

The follower set of a word u is the set of words v such that uv is
admissible.  Truncating v to length d gives a computable invariant; the
number of classes of words with equal depth-d follower sets is finite
evidence of soficity when it stabilises as d grows, and grows without
bound for shifts such as the one-dimensional mirror shift.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Iterable, Sequence

from .core import BWR, RED, IndexedGenerator, Pattern, ShiftSpec

Word = tuple[int, ...]


def word_checker(spec: ShiftSpec, max_len: int, generator_budget: int | None = None) -> Callable[[Word], bool]:
    """Local admissibility of words up to ``max_len`` for a 1D shift.

    Forbidden patterns must be contiguous words.  Generators are assumed to
    list patterns by nondecreasing length and are read until the first
    pattern longer than ``max_len`` (or ``generator_budget`` patterns).
    Longer patterns cannot occur in the words checked.
    """
    if spec.dim != 1:
        raise ValueError("follower sets are defined for one-dimensional shifts")
    if spec.rule is not None:
        raise ValueError("window rules are not supported for words")
    if spec.is_explicit:
        pats = spec.forbidden_list()
    else:
        pats = []
        for i in range(generator_budget or 1_000_000):
            p = spec.forbidden.produce(i)
            if p is None or p.width > max_len:
                break
            pats.append(p)
    words = []
    for p in pats:
        if p.height != 1 or not p.is_rectangular():
            raise ValueError("forbidden patterns of a 1D shift must be contiguous words")
        (x0, _), _ = p.bbox()
        w = tuple(p[(x0 + i, 0)] for i in range(p.width))
        if len(w) <= max_len:
            words.append(w)
    by_last: dict[int, list[Word]] = {}
    for w in words:
        by_last.setdefault(w[-1], []).append(w)

    @lru_cache(maxsize=None)
    def ok(word: Word) -> bool:
        if not word:
            return True
        if not ok(word[:-1]):
            return False
        for f in by_last.get(word[-1], ()):
            if len(f) <= len(word) and word[len(word) - len(f) :] == f:
                return False
        return True

    return ok


def mirror1d_admissible(word: Word) -> bool:
    """One-dimensional mirror shift: at most one red, and symmetry around it."""
    reds = [i for i, a in enumerate(word) if a == RED]
    if len(reds) > 1:
        return False
    if not reds:
        return True
    r = reds[0]
    k = min(r, len(word) - 1 - r)
    return all(word[r - j] == word[r + j] for j in range(1, k + 1))


@lru_cache(maxsize=None)
def _minimal_forbidden(length: int) -> tuple[Word, ...]:
    found = []
    for w in itertools.product(range(3), repeat=length):
        if not mirror1d_admissible(w) and mirror1d_admissible(w[1:]) and mirror1d_admissible(w[:-1]):
            found.append(w)
    return tuple(found)


def _mirror1d_forbidden(i: int) -> Pattern:
    """Minimal forbidden words in order of length: two reds, or an asymmetric pair around a red."""
    length = 2
    while True:
        found = _minimal_forbidden(length)
        if i < len(found):
            return Pattern.word(found[i])
        i -= len(found)
        length += 1


def mirror1d_shift() -> ShiftSpec:
    return ShiftSpec(BWR, IndexedGenerator(_mirror1d_forbidden, "mirror-1d"), dim=1, name="mirror-1d")


def _words(k: int, max_len: int, ok: Callable[[Word], bool]) -> list[Word]:
    out = [()]
    frontier = [()]
    for _ in range(max_len):
        frontier = [w + (a,) for w in frontier for a in range(k) if ok(w + (a,))]
        out.extend(frontier)
    return out


def follower_set(u: Word, d: int, k: int, ok: Callable[[Word], bool]) -> frozenset:
    """All v of length d with uv admissible."""
    frontier = [()]
    for _ in range(d):
        frontier = [v + (a,) for v in frontier for a in range(k) if ok(u + v + (a,))]
    return frozenset(frontier)


@dataclass(frozen=True)
class FollowerTable:
    depth: int
    followers: dict  # word -> frozenset of continuations
    classes: tuple  # tuple of tuples of words, sorted

    @property
    def count(self) -> int:
        return len(self.classes)

    def representatives(self) -> list[Word]:
        return [c[0] for c in self.classes]

    def class_of(self, u: Word) -> int:
        for i, c in enumerate(self.classes):
            if u in c:
                return i
        raise KeyError(u)


def _table(words: Iterable[Word], d: int, k: int, ok) -> FollowerTable:
    followers = {u: follower_set(u, d, k, ok) for u in words}
    groups: dict[frozenset, list[Word]] = {}
    for u, f in followers.items():
        groups.setdefault(f, []).append(u)
    classes = tuple(sorted((tuple(sorted(g, key=lambda w: (len(w), w))) for g in groups.values()), key=lambda c: (len(c[0]), c[0])))
    return FollowerTable(d, followers, classes)


def _resolve(spec_or_ok, k: int | None, max_len: int):
    if isinstance(spec_or_ok, ShiftSpec):
        return word_checker(spec_or_ok, max_len), len(spec_or_ok.alphabet)
    if k is None:
        raise ValueError("an admissibility predicate needs the alphabet size")
    return spec_or_ok, k


def follower_classes(spec_or_ok, L: int, d: int, k: int | None = None) -> FollowerTable:
    """Classes of admissible words of length <= L by their depth-d follower sets."""
    ok, k = _resolve(spec_or_ok, k, L + d)
    return _table(_words(k, L, ok), d, k, ok)


def class_growth(spec_or_ok, lengths: Sequence[int], d: int, k: int | None = None, select=None) -> dict[int, int]:
    """Number of follower classes among admissible words of each exact length.

    ``select`` optionally filters the words (e.g. words ending in red).
    """
    ok, k = _resolve(spec_or_ok, k, max(lengths) + d)
    out = {}
    for n in lengths:
        words = [w for w in _words(k, n, ok) if len(w) == n and (select is None or select(w))]
        out[n] = _table(words, d, k, ok).count
    return out


def stabilization(spec_or_ok, L: int, d: int, k: int | None = None) -> tuple[tuple[int, int, int], bool]:
    """Class counts at depths d, d+1, d+2 and whether they agree (evidence, not proof)."""
    counts = tuple(follower_classes(spec_or_ok, L, dd, k).count for dd in (d, d + 1, d + 2))
    return counts, len(set(counts)) == 1


def red_suffixed(word: Word) -> bool:
    return bool(word) and word[-1] == RED and RED not in word[:-1]


def rename(word_ok: Callable[[Word], bool], perm: Sequence[int]) -> Callable[[Word], bool]:
    """Admissibility predicate of the shift with letters renamed by ``perm``."""
    inv = {b: a for a, b in enumerate(perm)}
    return lambda w: word_ok(tuple(inv[a] for a in w))

