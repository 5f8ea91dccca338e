import itertools

import numpy as np
import pytest
from hypothesis import given, strategies as st

from symdyn.core import BLACK, RED, WHITE, Pattern, full_shift, s1_shift, s2_shift
from symdyn.epitomes import (
    EpitomeFamily,
    bw_patterns,
    chain_from_epitomes,
    chain_is_increasing,
    chain_is_ordered,
    count_values,
    extension_set_bounded,
    find_hidden_square,
    hidden_square_free,
    km_enforcer,
    km_epitome,
    km_profile,
    mirror_admissible,
    mirror_compatibility,
    mirror_enforcer,
    mirror_epitome,
    profile_leq,
    profiles,
    semi_mirror_epitome,
    semi_mirror_order,
    simple_pattern,
)


def test_mirror_epitome_examples():
    fam = mirror_epitome(2)
    white = Pattern.from_rows(["..", ".."])
    assert fam.value(white) == white
    assert fam.value(Pattern.from_rows(["r.", ".."])) is None
    assert count_values(fam, bw_patterns(2)) == 16


def test_semi_mirror_order_examples():
    leq = semi_mirror_order(2)
    white = Pattern.from_rows(["..", ".."])
    a, b = Pattern.from_rows(["#.", ".."]), Pattern.from_rows([".#", ".."])
    assert all(leq(white, p) for p in bw_patterns(2))
    assert not leq(a, b) and not leq(b, a)


@given(st.integers(0, 15), st.integers(0, 15))
def test_semi_mirror_order_antisymmetric(i, j):
    pats = list(bw_patterns(2))
    leq = semi_mirror_order(2)
    if leq(pats[i], pats[j]) and leq(pats[j], pats[i]):
        assert i == j


def test_mirror_enforcer_examples():
    white = Pattern.from_rows(["..", ".."])
    r = mirror_enforcer(white)
    assert {v for _, v in r.items()} == {WHITE, RED}
    assert all(v == RED for (x, y), v in r.items() if y == 2) and mirror_admissible(white.union(r))
    one = Pattern({(0, 0): WHITE, (1, 0): BLACK, (0, 1): WHITE, (1, 1): WHITE})
    r = mirror_enforcer(one)
    assert r[(1, 4)] == BLACK and sum(1 for _, v in r.items() if v == BLACK) == 1


def test_mirror_enforcer_pins_exactly_one_pattern():
    assert (mirror_compatibility(2) == np.eye(16, dtype=bool)).all()


def test_semi_mirror_enforcer_pins_lower_set():
    pats = list(bw_patterns(2))
    m = mirror_compatibility(2, semi=True)
    leq = semi_mirror_order(2)
    want = np.array([[leq(q, p) for q in pats] for p in pats])
    assert (m == want).all()


def test_km_profile_examples():
    prof = (4, 3, 8, 5, 4, 2, 4, 6)
    assert km_profile(simple_pattern(prof)) == prof
    assert km_profile(Pattern.from_rows(["..."] * 3)) == (0, 0, 0)
    assert km_profile(Pattern.from_rows(["###"] * 3)) == (3, 3, 3)
    assert km_profile(Pattern.from_rows([".#", ".."])) is None


def test_km_enforcer_run_lengths():
    p = simple_pattern((1, 1))
    r = km_enforcer(p)
    full = p.union(r)

    def run(y, letter):
        return sum(1 for (x, yy), v in full.items() if yy == y and v == letter)

    assert (run(0, BLACK), run(1, BLACK)) == (5, 3)
    assert (run(5, RED), run(4, RED)) == (6, 4)
    right_black = [max(x for (x, yy), v in full.items() if yy == y and v == BLACK) for y in (0, 1)]
    left_red = [min(x for (x, yy), v in full.items() if yy == y and v == RED) for y in (5, 4)]
    left_black = [min(x for (x, yy), v in full.items() if yy == y and v == BLACK) for y in (0, 1)]
    assert right_black == [0, 0] and left_red == left_black


def test_hidden_square_examples():
    assert hidden_square_free(Pattern.from_rows(["...", "..."]))
    assert not hidden_square_free(Pattern.from_rows(["rr", "##"]))
    assert find_hidden_square(Pattern.from_rows(["rr", "##"])) == (0, 0, 2)


@pytest.mark.parametrize("n", [1, 2])
def test_km_enforcer_separates_profiles(n):
    for prof in profiles(n):
        p = simple_pattern(prof)
        r = km_enforcer(p)
        assert hidden_square_free(p.union(r))
        for other in profiles(n):
            q = simple_pattern(other)
            assert hidden_square_free(q.union(r)) == profile_leq(other, prof)


@pytest.mark.parametrize("n,want", [(1, 2), (2, 9), (3, 64)])
def test_km_value_count(n, want):
    assert count_values(km_epitome(n), [simple_pattern(p) for p in profiles(n)]) == want


def test_km_count_over_every_pattern_n2():
    from symdyn.core import all_patterns

    assert count_values(km_epitome(2), all_patterns(3, 2, 2)) == 9


def test_chains():
    km = km_epitome(2)
    chain = chain_from_epitomes(km, [simple_pattern(p) for p in profiles(2)])
    assert len(chain) == 9 and chain_is_ordered(km, chain)
    assert chain_is_increasing(chain, km_enforcer, hidden_square_free)
    semi = semi_mirror_epitome(2)
    chain = chain_from_epitomes(semi, bw_patterns(2))
    assert len(chain) == 16 and chain_is_ordered(semi, chain)
    assert len(chain[0]) == 4 and all(v == BLACK for _, v in chain[0].items())
    single = EpitomeFamily("const", evaluator=lambda p: 0)
    assert len(chain_from_epitomes(single, bw_patterns(2))) == 1


def test_extension_sets():
    ring = extension_set_bounded(Pattern({(0, 0): BLACK}), full_shift(2), 1)
    assert len(ring) == 2**8
    ext = extension_set_bounded(Pattern.word([BLACK]), s1_shift(), 1)
    assert ext == {frozenset({((-1, 0), WHITE), ((1, 0), WHITE)})}


def test_extension_sets_detect_equal_futures():
    # under S2 the words 1 and 100 continue in the same way on the right
    def right_ring(word):
        rings = extension_set_bounded(Pattern.word(word), s2_shift(), (0, 3))
        return {frozenset(((dx - len(word), dy), v) for (dx, dy), v in r) for r in rings}

    a = right_ring([BLACK])
    assert a == right_ring([BLACK, WHITE, WHITE]) != right_ring([BLACK, WHITE])
