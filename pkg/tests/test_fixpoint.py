import random
from collections import defaultdict

import pytest
from hypothesis import given, strategies as st

from symdyn.fixpoint import (
    SimGeometry,
    SizingError,
    assemble,
    border_of,
    cable_end_to_end,
    certify,
    classify_cell,
    count_bordered,
    decode_fields,
    encode_fields,
    flip_cable_bit,
    membership,
    one_tile_rho,
    phi,
    role_map,
    route_cells,
    simulate_tileset,
    smallest_geometry,
    super_colors,
    tile_count_fit,
    two_tile_rho,
    variable_zoom_schedule,
    verify_supertile,
    zoom_N,
)

_sims = {}


def sim_for(name):
    if name not in _sims:
        _sims[name] = simulate_tileset(one_tile_rho() if name == "one" else two_tile_rho())
    return _sims[name]


def mixed_quads(sim, rng, count):
    """Quadruples whose sides come from different listed tiles at the same position."""
    by_pos = defaultdict(list)
    ts = sim.tileset
    for t in ts.tiles:
        quad = ts.labels(t)
        by_pos[quad[2][1:3]].append(quad)
    groups = [g for g in by_pos.values() if len(g) > 1]
    out = []
    for _ in range(count):
        g = rng.choice(groups)
        out.append(tuple(rng.choice(g)[side] for side in range(4)))
    return out


def test_smallest_geometry():
    g = smallest_geometry()
    assert (g.N, g.q, g.hU) == (62, 8, 5)
    g.check()
    with pytest.raises(SizingError):
        SimGeometry(61, 8, 1, 4, 5).check()


def test_default_geometry_too_small_names_budget():
    with pytest.raises(SizingError, match="checker"):
        simulate_tileset(one_tile_rho(), N=64)


@pytest.mark.parametrize("name", ["one", "two"])
def test_reference_supertiles_certified(name):
    sim = sim_for(name)
    for t in range(len(sim.rho.tiles)):
        grid = assemble(sim, t)
        assert verify_supertile(sim, grid) == (True, "ok")
        assert phi(sim, grid) == t
        assert cable_end_to_end(sim, grid)
        assert certify(sim, t) == (1, True)


def test_super_colors_follow_rho():
    sim = sim_for("two")
    colors = [super_colors(sim, assemble(sim, t)) for t in range(2)]
    assert colors[0] != colors[1]
    # equal colors of rho give equal super-colors, and different colors differ
    t0, t1 = sim.rho.tiles
    assert colors[0]["right"] == colors[1]["left"]
    assert (colors[0]["left"] == colors[1]["left"]) == (t0.west == t1.west)
    assert colors[0]["top"] == colors[0]["bottom"] == colors[1]["top"]


def test_flipped_cable_bit_is_rejected():
    sim = sim_for("one")
    grid = assemble(sim, 0)
    (x, y), _ = route_cells(sim.geom, "left", 0)[3]
    ok, why = verify_supertile(sim, flip_cable_bit(grid, x, y))
    assert not ok and why


def test_border_admits_exactly_one_filling():
    sim = sim_for("one")
    assert count_bordered(sim, border_of(sim, assemble(sim, 0))) == 1


def test_every_position_has_a_role():
    g = smallest_geometry()
    roles = role_map(g)
    assert len(roles) == g.N * g.N
    assert all(classify_cell(x, y, g) == roles[(x, y)] for (x, y) in [(0, 0), (5, 17), (g.N - 1, g.N - 1)])


def test_cables_are_paths():
    g = smallest_geometry()
    for fam in ("left", "bottom", "right", "top"):
        cells = [c for c, _ in route_cells(g, fam, 0)]
        assert len(cells) == len(set(cells))
        assert all(abs(a[0] - b[0]) + abs(a[1] - b[1]) == 1 for a, b in zip(cells, cells[1:]))


def test_membership_matches_tile_list():
    rng = random.Random(7)
    for name in ("one", "two"):
        sim = sim_for(name)
        ts = sim.tileset
        listed = {ts.labels(t) for t in ts.tiles}
        assert ts.predicate_agrees()
        quads = mixed_quads(sim, rng, 3000)
        verdicts = [membership(sim, *q) for q in quads]
        assert verdicts == [q in listed for q in quads]
        assert any(verdicts) and not all(verdicts)


def test_tile_count_is_quadratic():
    counts = {N: len(simulate_tileset(one_tile_rho(), N=N, q=8, hU=5).tileset) for N in (64, 80, 96)}
    a = tile_count_fit(counts)
    assert all(c <= a * N * N + 1e-9 for N, c in counts.items())
    assert a <= 4


@given(st.lists(st.lists(st.integers(0, 1), max_size=5), max_size=4))
def test_field_encoding_round_trip(fields):
    assert decode_fields(encode_fields(fields)) == [tuple(f) for f in fields]


def test_zoom_schedule():
    assert [zoom_N(k) for k in range(4)] == [128, 256, 512, 1024]
    lvl = variable_zoom_schedule(2)
    assert lvl.N == 512 and lvl.rank == "10"
