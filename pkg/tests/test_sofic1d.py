import pytest
from hypothesis import given, strategies as st

from symdyn.core import RED, full_shift, s1_shift, s2_shift
from symdyn.sofic1d import (
    class_growth,
    follower_classes,
    mirror1d_admissible,
    mirror1d_shift,
    red_suffixed,
    rename,
    stabilization,
    word_checker,
)


def test_full_shift_has_one_class():
    assert follower_classes(full_shift(2, dim=1), 5, 3).count == 1


def test_s1_has_two_classes():
    assert follower_classes(s1_shift(), 5, 3).count == 2


def test_s2_has_three_classes_and_stabilises():
    table = follower_classes(s2_shift(), 6, 4)
    assert table.count == 3
    counts, stable = stabilization(s2_shift(), 6, 3)
    assert stable and counts[0] == 3


def test_s2_classes_are_tail_parities():
    table = follower_classes(s2_shift(), 6, 4)
    assert table.class_of((0, 1)) != table.class_of((1, 0))
    assert table.class_of((1, 0)) != table.class_of((1, 0, 0))
    assert table.class_of((1, 0, 0)) == table.class_of((0, 1, 0, 0))


@pytest.mark.parametrize("n,least", [(2, 4), (3, 8)])
def test_mirror_classes_grow_exponentially(n, least):
    counts = class_growth(mirror1d_shift(), [n + 1], n + 1, select=red_suffixed)
    assert counts[n + 1] >= least


def test_mirror_checker_matches_direct_predicate():
    ok = word_checker(mirror1d_shift(), 6)
    import itertools

    for n in range(7):
        for w in itertools.product(range(3), repeat=n):
            assert ok(w) == mirror1d_admissible(w), w


def test_full_shift_growth_is_constant():
    assert set(class_growth(full_shift(2, dim=1), [1, 2, 3, 4], 3).values()) == {1}


@pytest.mark.parametrize("spec", [s1_shift(), s2_shift()])
def test_depth_refines_classes(spec):
    coarse = follower_classes(spec, 5, 2)
    fine = follower_classes(spec, 5, 3)
    assert fine.count >= coarse.count
    for cls in fine.classes:
        assert len({coarse.class_of(u) for u in cls}) == 1


@given(st.permutations([0, 1, RED]))
def test_class_count_invariant_under_renaming(perm):
    ok = word_checker(mirror1d_shift(), 7)
    base = follower_classes(ok, 3, 3, k=3).count
    assert follower_classes(rename(ok, perm), 3, 3, k=3).count == base
