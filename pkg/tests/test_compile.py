import itertools

import numpy as np
import pytest
from hypothesis import given, strategies as st

from symdyn.compile import (
    END,
    BoundaryError,
    SpaceTimeDiagram,
    compile_spec,
    completions,
    copy_twohead,
    full_choice_nca,
    identity_nca,
    increment_tm,
    noop_tm,
    random_nca,
    random_tm,
    render_ppm,
    simulate,
    spec_from_json,
    stationary_twohead,
    tm_row,
    twohead_row,
    unary_successor_tm,
    verify_spacetime,
    xor_nca,
)


def test_noop_rows_are_identical():
    m = noop_tm()
    d = simulate(m, tm_row(["0", "1", "0"], 1, "h"), 3)
    assert d.height == 4 and len(set(d.rows)) == 1
    compiled = compile_spec(m)
    for c in completions(compiled, d.rows[0], 3):
        assert len(set(c.rows)) == 1


def test_unary_successor_diagram_is_admissible():
    m = unary_successor_tm()
    d = simulate(m, tm_row(["1", "1", "0", "0", "0", "0"], 0, "scan"), 3)
    assert (d.width, d.height) == (6, 4)
    assert [s for s, _ in d.rows[-1]] == ["1", "1", "1", "0", "0", "0"]
    assert verify_spacetime(d, compile_spec(m))


def test_forbidden_count_matches_direct_enumeration():
    compiled = compile_spec(noop_tm())
    k = len(compiled.letters)
    rule = compiled.spec.rule
    direct = sum(1 for w in itertools.product(range(k), repeat=6) if not rule.allowed(w))
    assert compiled.forbidden_count() == direct
    first = compiled.forbidden_windows().take(5)
    assert all(not rule.allowed(tuple(p[(x, y)] for y in range(2) for x in range(3))) for p in first)


def test_increment_of_011():
    m = increment_tm()
    d = simulate(m, tm_row(["0", "1", "1"], 2, "carry"), 4)
    assert "".join(s for s, _ in d.rows[-1]) == "100"
    assert verify_spacetime(d, compile_spec(m))


def test_stationary_twohead_rows_constant():
    m = stationary_twohead()
    d = simulate(m, twohead_row(m, ["0", "1", "1", "0"], 1, 2), 3)
    assert len(set(d.rows)) == 1
    assert verify_spacetime(d, compile_spec(m))


def test_copy_twohead_and_state_mutation():
    m = copy_twohead(3)
    tape = ["1", "0", "1", "0", "0", "0", "0", "0"]
    d = simulate(m, twohead_row(m, tape, 4, 0), 3)
    compiled = compile_spec(m)
    assert verify_spacetime(d, compiled)
    assert [c[0] for c in d.rows[-1]][4:7] == ["1", "0", "1"]
    cell = list(d.rows[1][3])
    cell[3] = "h" if cell[3] != "h" else "c0"
    assert not verify_spacetime(d.with_cell(3, 1, tuple(cell)), compiled)


def test_identity_nca_columns_constant():
    compiled = compile_spec(identity_nca())
    for c in completions(compiled, (0, 1, 1, 0), 3):
        assert all(len({r[x] for r in c.rows}) == 1 for x in range(4))


def test_full_choice_nca_accepts_everything():
    compiled = compile_spec(full_choice_nca())
    for bits in itertools.product((0, 1), repeat=6):
        d = SpaceTimeDiagram([bits[:3], bits[3:]])
        assert verify_spacetime(d, compiled)


def test_xor_flips_break_admissibility():
    a = xor_nca()
    compiled = compile_spec(a)
    d = simulate(a, (0, 1, 0, 0, 1, 1, 0, 1), 4)
    assert (d.width, d.height) == (8, 5) and verify_spacetime(d, compiled)
    for y in range(1, 4):
        for x in range(1, 7):
            assert not verify_spacetime(d.with_cell(x, y, 1 - d.rows[y][x]), compiled)


def test_choice_oracle_gives_distinct_diagrams():
    a = full_choice_nca()
    compiled = compile_spec(a)
    zeros = simulate(a, (0, 1, 0), 2, choices=[0] * 6)
    ones = simulate(a, (0, 1, 0), 2, choices=[1] * 6)
    assert zeros != ones and verify_spacetime(zeros, compiled) and verify_spacetime(ones, compiled)


def test_verify_mutation_examples():
    a = xor_nca()
    compiled = compile_spec(a)
    d = simulate(a, (1, 0, 0, 1), 3)
    assert verify_spacetime(d, compiled)
    assert not verify_spacetime(d.with_cell(1, 2, 1 - d.rows[2][1]), compiled)
    changed = simulate(a, (0, 0, 0, 1), 3)
    assert verify_spacetime(changed, compiled)


def test_deterministic_machine_has_unique_completion():
    m = increment_tm()
    compiled = compile_spec(m)
    bottom = tm_row(["0", "1", "1"], 2, "carry")
    (only,) = completions(compiled, bottom, 4)
    assert only == simulate(m, bottom, 3)


def test_head_leaving_window_is_reported():
    with pytest.raises(BoundaryError):
        simulate(unary_successor_tm(), tm_row(["1", "1"], 0, "scan"), 3)


def test_machine_json_round_trip():
    for m in (increment_tm(), copy_twohead(2), xor_nca()):
        assert spec_from_json(m.to_json()) == m


def test_ppm_header():
    d = simulate(xor_nca(), (0, 1, 0), 2)
    head = render_ppm(d, scale=2).split("\n")[:3]
    assert head == ["P3", "6 6", "255"]


@given(st.integers(0, 10_000), st.integers(3, 6), st.integers(1, 3))
def test_random_tm_round_trip(seed, width, steps):
    rng = np.random.default_rng(seed)
    m = random_tm(rng)
    compiled = compile_spec(m)
    tape = [("0", "1")[int(b)] for b in rng.integers(0, 2, width)]
    try:
        d = simulate(m, tm_row(tape, int(rng.integers(width)), m.start), steps)
    except BoundaryError:
        return
    assert verify_spacetime(d, compiled)


@given(st.integers(0, 10_000), st.integers(2, 6), st.integers(1, 3))
def test_random_nca_round_trip(seed, width, steps):
    rng = np.random.default_rng(seed)
    a = random_nca(rng)
    compiled = compile_spec(a)
    row = tuple(int(v) for v in rng.integers(0, 2, width))
    choices = [int(v) for v in rng.integers(0, 2, width * steps)]
    d = simulate(a, row, steps, choices)
    assert verify_spacetime(d, compiled)
    x, y = int(rng.integers(width)), int(rng.integers(1, steps + 1))
    other = [v for v in range(a.size) if v != d.rows[y][x]]
    bad = d.with_cell(x, y, other[0])
    # a different letter can still be a legal choice of a nondeterministic rule
    ext = (a.boundary,) + d.rows[y - 1] + (a.boundary,)
    legal = other[0] in a.options(*ext[x : x + 3])
    if not legal:
        assert not verify_spacetime(bad, compiled)
