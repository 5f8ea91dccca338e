import itertools

import numpy as np
import pytest
from hypothesis import given, strategies as st

from symdyn.core import Alphabet, ShiftSpec, block_complexity, enumerate_locally_admissible, rectangle_shift, s1_shift
from symdyn.wang import (
    Boundary,
    WangTileSet,
    arc_consistent,
    checkerboard_tiles,
    count_tilings,
    first_tiling,
    iter_tilings,
    projected_patterns,
    sft_to_wang,
    tile_rectangle,
    tiling_is_valid,
    wang_to_sft,
)


def brute_count(ts, w, h, boundary=None):
    """Enumerate every assignment; only for tiny instances."""
    b = boundary or Boundary()
    n = 0
    for cells in itertools.product(range(len(ts)), repeat=w * h):
        grid = np.array(cells).reshape(h, w)
        if not tiling_is_valid(ts, grid):
            continue
        tiles = [[ts.tiles[grid[y, x]] for x in range(w)] for y in range(h)]
        if any(tiles[y][0].west != c for y, c in b.west.items()):
            continue
        if any(tiles[y][w - 1].east != c for y, c in b.east.items()):
            continue
        if any(tiles[0][x].south != c for x, c in b.south.items()):
            continue
        if any(tiles[h - 1][x].north != c for x, c in b.north.items()):
            continue
        n += 1
    return n


def test_one_letter_sft_gives_one_tile():
    ts, letter = sft_to_wang(ShiftSpec(Alphabet(("only",)), ()))
    assert len(ts) == 1 and len(ts.colors) == 1 and letter == {0: 0}


def test_single_compatible_tile_counts_once():
    ts = WangTileSet(("c",), ((0, 0, 0, 0),))
    assert count_tilings(ts, 2, 2) == 1


def test_checkerboard_has_two_phases():
    ts = checkerboard_tiles()
    assert count_tilings(ts, 2, 2) == 2
    assert count_tilings(ts, 5, 3) == 2


@pytest.mark.parametrize("spec,n", [(rectangle_shift(), 3), (s1_shift(dim=2), 3)])
def test_projection_matches_local_patterns(spec, n):
    ts, letter = sft_to_wang(spec)
    local = enumerate_locally_admissible(spec, n, n)
    assert len(projected_patterns(ts, letter, n, local)) == len(local) == block_complexity(spec, n, 1)


def test_wang_to_sft_mismatch_pairs():
    # each tile matches itself horizontally but not the other; vertical edges all agree
    ts = WangTileSet(("v", "a", "b"), ((0, 1, 0, 1), (0, 2, 0, 2)))
    spec = wang_to_sft(ts)
    assert len(spec.forbidden) == 2
    assert {tuple(sorted(p.items())) for p in spec.forbidden} == {
        (((0, 0), 0), ((1, 0), 1)),
        (((0, 0), 1), ((1, 0), 0)),
    }


def test_uniform_tile_gives_empty_forbidden_set():
    assert wang_to_sft(WangTileSet(("c",), ((0, 0, 0, 0),))).forbidden == ()


tile_sets = st.lists(st.tuples(*[st.integers(0, 2)] * 4), min_size=1, max_size=5).map(
    lambda quads: WangTileSet(("p", "q", "r"), tuple(quads))
)


@given(tile_sets, st.integers(1, 3), st.integers(1, 2))
def test_search_count_matches_brute_force(ts, w, h):
    assert count_tilings(ts, w, h) == brute_count(ts, w, h)


@given(tile_sets, st.integers(0, 2), st.integers(0, 2))
def test_boundary_count_matches_brute_force(ts, west, north):
    b = Boundary(west={0: west}, north={1: north})
    assert count_tilings(ts, 2, 2, b) == brute_count(ts, 2, 2, b)


@given(tile_sets, st.integers(1, 3), st.integers(1, 3))
def test_first_is_least_of_enumeration(ts, w, h):
    all_ = list(iter_tilings(ts, w, h))
    first = first_tiling(ts, w, h)
    if not all_:
        assert first is None
        return
    assert all(tiling_is_valid(ts, g) for g in all_)
    key = lambda g: tuple(g.ravel())  # noqa: E731
    assert key(first) == min(key(g) for g in all_)
    assert len(all_) == tile_rectangle(ts, w, h, mode="count")


@given(tile_sets, st.integers(1, 3))
def test_wang_to_sft_round_trip(ts, n):
    spec = wang_to_sft(ts)
    local = enumerate_locally_admissible(spec, n, n)
    assert len(local) == count_tilings(ts, n, n)


@given(tile_sets)
def test_arc_consistency_keeps_every_tiling(ts):
    mask = np.ones((2, 3, len(ts)), dtype=bool)
    pruned = arc_consistent(ts, mask)
    assert count_tilings(ts, 3, 2, mask=pruned) == count_tilings(ts, 3, 2)


def test_tileset_json_round_trip():
    ts, _ = sft_to_wang(rectangle_shift())
    back = WangTileSet.from_json(ts.to_json())
    assert back == ts


def test_predicate_agrees_detects_disagreement():
    ok = WangTileSet.from_labels([(0, 0, 0, 0)], predicate=lambda n, e, s, w: n == s)
    bad = WangTileSet.from_labels([(0, 1, 1, 0)], predicate=lambda n, e, s, w: n == s)
    assert ok.predicate_agrees() and not bad.predicate_agrees()
