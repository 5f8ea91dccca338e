import functools
import itertools

import numpy as np
import pytest
from hypothesis import given, strategies as st

from symdyn.core import Alphabet, ShiftSpec, locally_admissible
from symdyn.hierarchy import (
    DESK,
    EMPTY_COMPLEXITY,
    BorderError,
    Exceeds,
    HierarchyParams,
    IntegrityError,
    assemble,
    border_cells,
    build_family,
    busy_beaver_program,
    checkerboard_shift,
    closure_block_count,
    contains_all_2x2_blocks,
    cut_window,
    first_incompressible_matrix,
    polynomial_envelope,
    random_domino_shift,
    reconstruct_standard,
    recovery_overhead,
    recovery_program,
    recursive_coloring,
    rederive_window,
    run,
    shortest_program,
    some_border,
    time_bounded_K,
)


def all_programs(max_len):
    for n in range(max_len + 1):
        for bits in itertools.product("01", repeat=n):
            yield "".join(bits)


@functools.lru_cache(maxsize=None)
def output_table(t, max_len):
    """Shortest program length for every output reachable by programs of at most max_len bits."""
    table = {}
    for p in all_programs(max_len):
        r = run(p, t)
        if r.ok and r.output not in table:
            table[r.output] = len(p)
    return table


def brute_K(x, t, max_len):
    return output_table(t, max_len).get(x)


@functools.lru_cache(maxsize=None)
def desk_family():
    return build_family(DESK, 1)


def bits_of(m):
    return "".join(str(int(b)) for b in np.asarray(m).ravel())


def test_documented_instructions():
    assert run(assemble(("LIT", "0110"), "HALT")).output == "0110"
    assert run(assemble(("ZEROS", 3), ("ONES", 2), "HALT")).output == "00011"
    assert run(assemble("EMIT1", "EMIT0", "MIRROR", "HALT")).output == "1001"
    assert run(assemble(("LIT", "1011"), ("TRANSPOSE", 2), "HALT")).output == "1101"
    assert not run(assemble(("COPY", 5, 1), "HALT")).ok
    assert not run("00000").ok  # HALT must be the last bit


def test_empty_string_complexity():
    assert time_bounded_K("", 100) == EMPTY_COMPLEXITY == brute_K("", 100, 6)


@given(st.text("01", max_size=3), st.sampled_from([20, 100, 1000]))
def test_complexity_matches_brute_force(x, t):
    want = brute_K(x, t, 11)
    got = time_bounded_K(x, t, 11)
    assert (got == want) if want is not None else isinstance(got, Exceeds)


@given(st.text("01", min_size=1, max_size=8), st.integers(10, 300), st.integers(0, 300))
def test_complexity_monotone_in_budget(x, t, extra):
    a, b = time_bounded_K(x, t, 16), time_bounded_K(x, t + extra, 16)
    if not isinstance(a, Exceeds):
        assert not isinstance(b, Exceeds) and b <= a


def test_nine_bits_without_short_program():
    m = first_incompressible_matrix(3, 100, 9)
    x = bits_of(m)
    assert str(time_bounded_K(x, 100, 8)) == "> 8"


def test_shortest_program_prints_target():
    p = shortest_program("0000000011", 500, 22)
    assert len(p) == time_bounded_K("0000000011", 500, 22) <= 22
    r = run(p, 500)
    assert r.ok and r.output == "0000000011"


@pytest.mark.parametrize("n,theta", [(2, 4), (2, 11), (3, 9)])
def test_first_incompressible_matrix(n, theta):
    m = first_incompressible_matrix(n, 100, theta)
    shorter = set(output_table(100, theta - 1))
    for v in range(int(bits_of(m), 2)):
        assert format(v, f"0{n * n}b") in shorter
    assert bits_of(m) not in shorter


def test_zero_threshold_gives_zero_matrix():
    assert not first_incompressible_matrix(3, 100, 0).any()


def test_family_shapes_and_inversion():
    fam = desk_family()
    ns, Ns = DESK.sides(1)
    assert (ns, Ns) == ([2, 8], [2, 16])
    assert fam.Q[1][0].shape == (16, 16)
    assert not fam.Q[0][0].any() and fam.Q[0][1].all()
    for q0, q1 in fam.Q:
        assert (q1 == 1 - q0).all()


def test_exponent_must_be_at_least_three():
    with pytest.raises(ValueError):
        HierarchyParams(2, 2)


def test_level_one_complexities():
    fam = desk_family()
    theta = DESK.threshold(1)
    assert isinstance(time_bounded_K(bits_of(fam.R[0]), DESK.t(1), theta - 1), Exceeds)
    c0 = recovery_overhead(16)
    for q in fam.Q[1]:
        assert isinstance(time_bounded_K(bits_of(q), DESK.t_prime[0], theta - c0 - 1), Exceeds)


def test_recovery_program_recovers_R():
    fam = desk_family()
    r_prog = assemble(("ZEROS", 63), "EMIT1", "HALT")
    assert run(r_prog, DESK.t(1)).output == bits_of(fam.R[0])
    q_prog = r_prog[:-4] + assemble(("SCALE", 8), "HALT")
    assert run(q_prog, DESK.t(1)).output == bits_of(fam.Q[1][0])
    r = run(recovery_program(q_prog, 16), DESK.t(1))
    assert r.ok and r.output == bits_of(fam.R[0])


def test_block_detector():
    assert not contains_all_2x2_blocks(np.zeros((4, 4), dtype=np.uint8))
    # a de Bruijn-style torus of side 4 holds every 2x2 block
    m = np.array([[0, 0, 1, 1], [0, 1, 0, 1], [1, 1, 0, 0], [1, 0, 1, 0]])
    tile = np.tile(m, (2, 2))[:5, :5]
    assert contains_all_2x2_blocks(tile) == (len({tuple(tile[y:y + 2, x:x + 2].ravel()) for y in range(4) for x in range(4)}) == 16)


def test_reconstruct_trivial_offset():
    fam = desk_family()
    w = cut_window(fam, 1, (0, 0), (0, 0, 0, 0))
    assert (reconstruct_standard(w, (0, 0), (0, 0, 0, 0)) == fam.Q[1][0]).all()


def test_reconstruct_and_integrity():
    fam = desk_family()
    ids = (1, 0, 0, 1)
    w = cut_window(fam, 1, (3, 5), ids)
    q0 = fam.Q[1][0]
    assert (reconstruct_standard(w, (3, 5), ids, reference=q0) == q0).all()
    w[2, 7] ^= 1
    with pytest.raises(IntegrityError):
        reconstruct_standard(w, (3, 5), ids, reference=q0)


@given(st.integers(0, 16), st.integers(0, 16), st.integers(0, 15))
def test_reconstruct_random_windows(ox, oy, code):
    fam = desk_family()
    ids = tuple((code >> k) & 1 for k in range(4))
    w = cut_window(fam, 1, (ox, oy), ids)
    assert (reconstruct_standard(w, (ox, oy), ids) == fam.Q[1][0]).all()


def test_closure_counts():
    fam = desk_family()
    assert closure_block_count(fam, 1, 1) == 2
    assert closure_block_count(fam, 1, 16) <= 17 * 17 * 16
    ns = [1, 2, 4, 8, 16]
    counts = [closure_block_count(fam, 1, n) for n in ns]
    A, B = polynomial_envelope(ns, counts)
    assert all(c <= A * n**B + 1e-9 for n, c in zip(ns, counts)) and B < 4


def test_busy_beaver_small():
    assert busy_beaver_program(1) is None
    assert busy_beaver_program(5) == "0000"
    best = busy_beaver_program(9)
    halting = [(r.steps, p) for p in all_programs(8) for r in [run(p)] if r.ok]
    top = max(s for s, _ in halting)
    assert best == min(p for s, p in halting if s == top)


def test_one_letter_coloring_is_unique():
    spec = ShiftSpec(Alphabet(("a",)), ())
    border = {c: 0 for c in border_cells(5)}
    p = recursive_coloring(spec, 2, border)
    assert len(p) == 25 and {v for _, v in p.items()} == {0}


def test_checkerboard_coloring_is_forced():
    border = {(x, y): (x + y) % 2 for x, y in border_cells(5)}
    p = recursive_coloring(checkerboard_shift(), 2, border)
    assert all(v == (x + y) % 2 for (x, y), v in p.items())


def test_bad_border_rejected():
    border = {(x, y): 0 for x, y in border_cells(5)}
    with pytest.raises(BorderError):
        recursive_coloring(checkerboard_shift(), 2, border)


@pytest.mark.parametrize("seed", [1, 2])
def test_domino_coloring_properties(seed):
    spec = random_domino_shift(seed)
    border = some_border(spec, 3, seed)
    a = recursive_coloring(spec, 3, border)
    assert a == recursive_coloring(spec, 3, border)
    assert locally_admissible(a, spec)
    for n in (2, 3, 5):
        for x, y in [(0, 0), (1, 2), (9 - n, 9 - n)]:
            assert rederive_window(spec, a, 3, x, y, n)
