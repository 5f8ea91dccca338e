from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from symdyn.sparse import (
    DensitySpec,
    Hierarchy,
    SparseConfig,
    check_responsibility,
    density_admissible,
    ell,
    find_forbidden,
    flip_arrow,
    forbidden_rank,
    free_square,
    g_witness_position,
    inject_loop,
    is_forbidden_density,
    max_points,
    pair_enumerator,
    parameter_check,
    parasite_tolerance_check,
    random_config,
    synthesize_fields,
    unused_point,
    verify_all,
    verify_hierarchy,
)

HALF = Fraction(1, 2)
SPEC = DensitySpec()
_cache = {}


def hierarchy_for(seed):
    if seed not in _cache:
        _cache[seed] = synthesize_fields(random_config(seed, SPEC), SPEC, 2)
    return _cache[seed]


def brute_density_ok(points, eps):
    """Every square anchored near the points, each side up to the bounding box."""
    pts = set(points)
    if not pts:
        return True
    xs = [x for x, _ in pts]
    ys = [y for _, y in pts]
    span = max(max(xs) - min(xs), max(ys) - min(ys)) + 1
    for n in range(1, span + 1):
        cap = max_points(n, eps)
        for x0 in range(min(xs) - n + 1, max(xs) + 1):
            for y0 in range(min(ys) - n + 1, max(ys) + 1):
                inside = sum(1 for x, y in pts if x0 <= x < x0 + n and y0 <= y < y0 + n)
                if inside > cap:
                    return False
    return True


@pytest.mark.parametrize("n,eps,want", [(16, HALF, 4), (15, HALF, 3), (1, HALF, 1), (27, Fraction(1, 3), 3), (26, Fraction(1, 3), 2)])
def test_max_points_exact(n, eps, want):
    assert max_points(n, eps) == want


@given(st.integers(1, 5000), st.sampled_from([Fraction(1, 2), Fraction(1, 3), Fraction(2, 3)]))
def test_max_points_is_integer_root(n, eps):
    m = max_points(n, eps)
    p, q = eps.numerator, eps.denominator
    assert m**q <= n**p < (m + 1) ** q


def test_forbidden_square_counts():
    assert is_forbidden_density(5, 16, SPEC)
    assert not is_forbidden_density(4, 16, SPEC)
    assert is_forbidden_density([(0, 0), (1, 1)], 2, SPEC)


@given(st.lists(st.tuples(st.integers(0, 7), st.integers(0, 7)), max_size=6, unique=True))
def test_density_check_matches_brute_force(points):
    ok, witness = density_admissible(points, HALF)
    assert ok == brute_density_ok(points, HALF)
    if not ok:
        x0, y0, n = witness[:3]
        inside = sum(1 for x, y in points if x0 <= x < x0 + n and y0 <= y < y0 + n)
        assert inside > max_points(n, HALF)


def test_rank_budget():
    assert [ell(k) for k in (0, 1, 2, 3, 4, 7, 8, 16)] == [0, 0, 1, 1, 2, 2, 3, 4]
    en = pair_enumerator()
    assert forbidden_rank(4, en) == []
    pats = forbidden_rank(16, en)
    assert pats and all(len(p.blacks) <= 4 and max(p.width, p.height) <= 4 for p in pats)


@pytest.mark.parametrize("seed", range(4))
def test_random_config_is_admissible(seed):
    cfg = random_config(seed, SPEC)
    assert density_admissible(cfg.points, HALF)[0]
    assert find_forbidden(cfg.points, forbidden_rank(SPEC.schedule[-1], pair_enumerator())) is None
    assert cfg == random_config(seed, SPEC)


@pytest.mark.parametrize("seed", range(3))
def test_synthesized_fields_verify(seed):
    reports = verify_hierarchy(hierarchy_for(seed), pair_enumerator())
    assert [r.level for r in reports] == [0, 1, 2]
    assert all(r.ok for r in reports), [r.failures[:2] for r in reports]
    assert all(r.checked > 0 for r in reports)


def test_config_and_hierarchy_json_round_trip():
    cfg = random_config(5, SPEC)
    assert SparseConfig.from_json(cfg.to_json()) == cfg
    h = hierarchy_for(0)
    back = Hierarchy.from_json(h.to_json())
    assert back.to_json() == h.to_json()
    assert all(r.ok for r in verify_hierarchy(back, pair_enumerator()))


def test_flipped_arrow_breaks_transit():
    h = hierarchy_for(1)
    bad, tile = flip_arrow(h, 0)
    rep = verify_all(bad, 0, pair_enumerator())
    assert not rep.ok
    assert any(w.prop.startswith("D") for w in rep.failures)
    assert verify_all(h, 0, pair_enumerator()).ok  # original untouched


def test_injected_forbidden_pattern_is_located():
    en = pair_enumerator()
    pat = forbidden_rank(16, en)[0]
    keep = [(40 + x, 40 + y) for x, y in pat.blacks]
    cfg = random_config(3, SPEC, keep=keep)
    assert set(keep) <= set(cfg.points)
    reports = verify_hierarchy(synthesize_fields(cfg, SPEC, 2), en)
    g = [w for r in reports for w in r.failures if w.prop == "G"]
    assert g
    assert g_witness_position(g[0]) == (0, (40, 40))
    assert reports[0].ok  # rank of level 0 forbids nothing yet


def test_responsibility_zone_check():
    en = pair_enumerator()
    assert check_responsibility([(0, 0), (3, 0)], 16, en, N=8).ok is False
    assert check_responsibility([(0, 0), (3, 0)], 2, en, N=8).ok
    assert check_responsibility([(0, 0), (9, 9)], 16, en, N=8).ok


def test_parasite_loop_is_tolerated():
    h = hierarchy_for(0)
    cells, pt = free_square(h, 0), unused_point(h, 0)
    rep = parasite_tolerance_check(h, 0, cells, pt, pair_enumerator())
    assert rep.d_passes and rep.field5_unchanged and rep.failures == ()


def test_loop_claiming_an_initial_point_is_caught():
    h = hierarchy_for(0)
    cells, pt = free_square(h, 0), unused_point(h, 0)
    rep = parasite_tolerance_check(h, 0, cells, pt, pair_enumerator(), initial=True)
    assert not rep.d_passes and rep.field5_unchanged
    looped = inject_loop(h, 0, cells, pt)
    assert verify_all(looped, 0, pair_enumerator()).ok


def test_parameter_inequalities():
    assert parameter_check(SPEC).ok
    small = parameter_check(DensitySpec(C=2))
    assert not small.ok and small.first_failure is not None
