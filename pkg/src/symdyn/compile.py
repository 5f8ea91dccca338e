"""Compile Turing machines and nondeterministic cellular automata to 3x2 window shifts.

A space-time diagram has time running upward: row ``t`` is the configuration
after ``t`` steps.  Every compiled shift forbids the ``3 x 2`` windows whose
top-middle cell is not a legal successor of the bottom triple.

Finite windows.  A ``3 x 2`` rule only constrains cells that have both
horizontal neighbours, so the outermost columns of a bare rectangle are
free.  :func:`verify_spacetime` therefore frames the diagram with one
constant column on each side (a head-free ``End`` cell for machines, the
automaton's boundary letter for automata) before checking it; every original
cell is then a middle cell and determinism gives a unique completion.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from typing import Hashable, Iterable, Mapping, Sequence

import numpy as np

from .core import Alphabet, IndexedGenerator, Pattern, ShiftSpec, WindowRule, _search

END = "E"
MOVES = {"L": -1, "S": 0, "R": 1}


class BoundaryError(Exception):
    """A head left the finite simulation window."""


# --------------------------------------------------------------------------
# Machine descriptions
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class TMSpec:
    symbols: tuple[str, ...]
    states: tuple[str, ...]
    start: str
    halt: frozenset[str]
    delta: Mapping[tuple[str, str], tuple[str, str, str]]
    name: str = "tm"

    def __post_init__(self):
        for s in ("0", "1", END):
            if s not in self.symbols:
                raise ValueError(f"tape alphabet must contain {s!r}")
        for q in self.states:
            if q in self.halt:
                continue
            for a in self.symbols:
                if (q, a) not in self.delta:
                    raise ValueError(f"transition missing for {(q, a)}")
        for (q, a), (q2, b, m) in self.delta.items():
            if q2 not in self.states or b not in self.symbols or m not in MOVES:
                raise ValueError(f"bad transition {(q, a)} -> {(q2, b, m)}")

    def to_json(self) -> dict:
        return {
            "kind": "tm",
            "symbols": list(self.symbols),
            "states": list(self.states),
            "start": self.start,
            "halt": sorted(self.halt),
            "delta": [[q, a, *v] for (q, a), v in sorted(self.delta.items())],
            "name": self.name,
        }

    @classmethod
    def from_json(cls, d: Mapping) -> "TMSpec":
        delta = {(q, a): (q2, b, m) for q, a, q2, b, m in d["delta"]}
        return cls(tuple(d["symbols"]), tuple(d["states"]), d["start"], frozenset(d["halt"]), delta, d.get("name", "tm"))


@dataclass(frozen=True)
class TwoHeadTMSpec:
    """One tape, two heads, one shared control state.

    ``delta[(state, sym_under_head1, sym_under_head2)] = (state', write1, write2, move1, move2)``.
    When both heads share a cell their writes must agree.
    """

    symbols: tuple[str, ...]
    states: tuple[str, ...]
    start: str
    halt: frozenset[str]
    delta: Mapping[tuple[str, str, str], tuple[str, str, str, str, str]]
    name: str = "twohead"

    def __post_init__(self):
        for s in ("0", "1", END):
            if s not in self.symbols:
                raise ValueError(f"tape alphabet must contain {s!r}")
        for q in self.states:
            if q in self.halt:
                continue
            for a, b in itertools.product(self.symbols, repeat=2):
                if (q, a, b) not in self.delta:
                    raise ValueError(f"transition missing for {(q, a, b)}")

    def to_json(self) -> dict:
        return {
            "kind": "twohead",
            "symbols": list(self.symbols),
            "states": list(self.states),
            "start": self.start,
            "halt": sorted(self.halt),
            "delta": [[*k, *v] for k, v in sorted(self.delta.items())],
            "name": self.name,
        }

    @classmethod
    def from_json(cls, d: Mapping) -> "TwoHeadTMSpec":
        delta = {(r[0], r[1], r[2]): tuple(r[3:]) for r in d["delta"]}
        return cls(tuple(d["symbols"]), tuple(d["states"]), d["start"], frozenset(d["halt"]), delta, d.get("name", "twohead"))


@dataclass(frozen=True)
class NCASpec:
    """Radius-one nondeterministic automaton on letters ``0..k-1``.

    ``relation[(a, b, c)]`` is the non-empty set of possible next letters of
    the middle cell.  ``error`` is absorbing and forbidden as a single cell;
    ``boundary`` is the letter assumed outside finite windows.
    """

    size: int
    relation: Mapping[tuple[int, int, int], frozenset[int]]
    error: int | None = None
    boundary: int = 0
    name: str = "nca"

    def __post_init__(self):
        for t in itertools.product(range(self.size), repeat=3):
            out = self.relation.get(t)
            if not out:
                raise ValueError(f"relation undefined or empty on {t}")
            if self.error is not None and t[1] == self.error and set(out) != {self.error}:
                raise ValueError("error letter must be absorbing")

    @property
    def nondeterministic(self) -> bool:
        return any(len(v) >= 2 for v in self.relation.values())

    def options(self, a: int, b: int, c: int) -> tuple[int, ...]:
        return tuple(sorted(self.relation[(a, b, c)]))

    def to_json(self) -> dict:
        return {
            "kind": "nca",
            "size": self.size,
            "error": self.error,
            "boundary": self.boundary,
            "relation": [[*k, sorted(v)] for k, v in sorted(self.relation.items())],
            "name": self.name,
        }

    @classmethod
    def from_json(cls, d: Mapping) -> "NCASpec":
        rel = {(r[0], r[1], r[2]): frozenset(r[3]) for r in d["relation"]}
        return cls(int(d["size"]), rel, d.get("error"), int(d.get("boundary", 0)), d.get("name", "nca"))


def nca_from_function(size: int, fn, error: int | None = None, boundary: int = 0, name: str = "nca") -> NCASpec:
    """Build an automaton from ``fn(a, b, c) -> iterable of letters``."""
    rel = {}
    for t in itertools.product(range(size), repeat=3):
        rel[t] = frozenset([error]) if (error is not None and t[1] == error) else frozenset(fn(*t))
    return NCASpec(size, rel, error, boundary, name)


def spec_from_json(d: Mapping):
    kind = d.get("kind")
    if kind == "tm":
        return TMSpec.from_json(d)
    if kind == "twohead":
        return TwoHeadTMSpec.from_json(d)
    if kind == "nca":
        return NCASpec.from_json(d)
    raise ValueError(f"unknown machine kind {kind!r}")


# --------------------------------------------------------------------------
# Compiled shifts
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class CompiledShift:
    """A 3x2-window shift together with its composite letters."""

    spec: ShiftSpec
    letters: tuple[Hashable, ...]
    successors: Mapping[tuple[int, int, int], frozenset[int]] = field(repr=False)
    pad: int
    source: object = field(repr=False)
    pad_options: tuple[int, ...] = ()

    def pad_for(self, row: Sequence[int]) -> int:
        """Framing letter for a row of letter ids.

        Two-head letters replicate the shared control fields, so the frame
        copies them from the row; other machines use one constant letter.
        """
        if isinstance(self.source, TwoHeadTMSpec):
            shared = self.letters[row[0]][3:]
            return self.index[(END, False, False, *shared)]
        return self.pad

    def pads(self) -> tuple[int, ...]:
        return self.pad_options or (self.pad,)

    @property
    def index(self) -> dict:
        return {l: i for i, l in enumerate(self.letters)}

    def encode(self, row: Sequence[Hashable]) -> tuple[int, ...]:
        idx = self.index
        return tuple(idx[l] for l in row)

    def decode(self, row: Sequence[int]) -> tuple:
        return tuple(self.letters[i] for i in row)

    def forbidden_count(self) -> int:
        """Rejected 3x2 windows: ``|A|^6`` minus the consistent ones."""
        k = len(self.letters)
        consistent = sum(len(v) for v in self.successors.values())
        return k**6 - consistent * k * k

    def forbidden_windows(self) -> IndexedGenerator:
        """Lexicographic enumeration of the rejected 3x2 windows."""
        k = len(self.letters)
        succ = self.successors
        cache: list[Pattern] = []
        it = itertools.product(range(k), repeat=6)
        cells = [(x, y) for y in range(2) for x in range(3)]

        def produce(i: int):
            while len(cache) <= i:
                for w in it:
                    a, b, c, d, e, f = w
                    if e not in succ.get((a, b, c), ()):
                        cache.append(Pattern(zip(cells, w)))
                        break
                else:
                    return None
            return cache[i]

        return IndexedGenerator(produce, "3x2-windows")


def _rule_from(successors) -> WindowRule:
    def allowed(w):
        return w[4] in successors.get((w[0], w[1], w[2]), ())

    return WindowRule(3, 2, allowed, "3x2")


def _tm_letters(m: TMSpec):
    return tuple((s, None) for s in m.symbols) + tuple((s, q) for q in m.states for s in m.symbols)


def _tm_successor(m: TMSpec, a, b, c):
    """Successor of the middle cell, or None when the triple is inconsistent."""
    heads = [x for x in (a, b, c) if x[1] is not None]
    if len(heads) > 1:
        return None
    sym, q = b
    if q is not None:
        if q in m.halt:
            return b
        q2, w, mv = m.delta[(q, sym)]
        return (w, q2 if mv == "S" else None)
    if a[1] is not None and a[1] not in m.halt:
        q2, _, mv = m.delta[(a[1], a[0])]
        if mv == "R":
            return (sym, q2)
    if c[1] is not None and c[1] not in m.halt:
        q2, _, mv = m.delta[(c[1], c[0])]
        if mv == "L":
            return (sym, q2)
    return (sym, None)


def tm_to_sft(m: TMSpec) -> CompiledShift:
    letters = _tm_letters(m)
    idx = {l: i for i, l in enumerate(letters)}
    succ = {}
    for a, b, c in itertools.product(letters, repeat=3):
        s = _tm_successor(m, a, b, c)
        if s is not None:
            succ[(idx[a], idx[b], idx[c])] = frozenset([idx[s]])
    alpha = Alphabet(tuple(_letter_name(l) for l in letters))
    spec = ShiftSpec(alpha, (), rule=_rule_from(succ), name=f"tm:{m.name}")
    return CompiledShift(spec, letters, succ, idx[(END, None)], m)


def _twohead_letters(m: TwoHeadTMSpec):
    out = []
    syms = m.symbols
    for s in syms:
        for h1, h2 in itertools.product((False, True), repeat=2):
            for q in m.states:
                for s1 in (s,) if h1 else syms:
                    for s2 in (s,) if h2 else syms:
                        out.append((s, h1, h2, q, s1, s2))
    return tuple(out)


def _twohead_step(m: TwoHeadTMSpec, q, s1, s2):
    if q in m.halt:
        return q, None, None, "S", "S"
    return m.delta[(q, s1, s2)]


def _twohead_successor_core(m, a, b, c):
    """(sym, h1, h2, state) of the middle successor, or None if inconsistent."""
    shared = {x[3:] for x in (a, b, c)}
    if len(shared) != 1:
        return None
    q, s1, s2 = b[3], b[4], b[5]
    q2, w1, w2, m1, m2 = _twohead_step(m, q, s1, s2)
    if q in m.halt:
        return b[:4]
    sym = b[0]
    if b[1] and b[2] and w1 != w2:
        return None
    if b[1]:
        sym = w1
    elif b[2]:
        sym = w2
    h1 = (a[1] and m1 == "R") or (b[1] and m1 == "S") or (c[1] and m1 == "L")
    h2 = (a[2] and m2 == "R") or (b[2] and m2 == "S") or (c[2] and m2 == "L")
    return (sym, bool(h1), bool(h2), q2)


def twohead_to_sft(m: TwoHeadTMSpec) -> CompiledShift:
    """Every cell carries the shared state and both scanned symbols.

    The rule checks the bottom triple and the top triple agree on those
    replicated fields, and the top-middle cell's own symbol, head marks and
    state follow the transition.
    """
    letters = _twohead_letters(m)
    idx = {l: i for i, l in enumerate(letters)}
    by_core: dict = {}
    for l in letters:
        by_core.setdefault(l[:4], []).append(l)
    succ = {}
    for a, b, c in itertools.product(letters, repeat=3):
        core = _twohead_successor_core(m, a, b, c)
        if core is not None and core in by_core:
            succ[(idx[a], idx[b], idx[c])] = frozenset(idx[l] for l in by_core[core])

    def allowed(w):
        if w[4] not in succ.get((w[0], w[1], w[2]), ()):
            return False
        top = {letters[i][3:] for i in w[3:]}
        return len(top) == 1

    alpha = Alphabet(tuple(_letter_name(l) for l in letters))
    spec = ShiftSpec(alpha, (), rule=WindowRule(3, 2, allowed, "3x2-twohead"), name=f"twohead:{m.name}")
    pads = tuple(idx[l] for l in letters if l[0] == END and not l[1] and not l[2])
    return CompiledShift(spec, letters, succ, pads[0], m, pads)


def nca_to_sft(a: NCASpec) -> CompiledShift:
    letters = tuple(range(a.size))
    succ = {t: frozenset(v) for t, v in a.relation.items()}
    forb = () if a.error is None else (Pattern({(0, 0): a.error}),)
    alpha = Alphabet.of_size(a.size)
    spec = ShiftSpec(alpha, forb, rule=_rule_from(succ), name=f"nca:{a.name}")
    return CompiledShift(spec, letters, succ, a.boundary, a)


def compile_spec(spec) -> CompiledShift:
    if isinstance(spec, TMSpec):
        return tm_to_sft(spec)
    if isinstance(spec, TwoHeadTMSpec):
        return twohead_to_sft(spec)
    if isinstance(spec, NCASpec):
        return nca_to_sft(spec)
    raise TypeError(f"cannot compile {type(spec).__name__}")


def _letter_name(l) -> str:
    return json.dumps(l)


# --------------------------------------------------------------------------
# Space-time diagrams
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class SpaceTimeDiagram:
    """Rows of composite letters, ``rows[0]`` is the input row."""

    rows: tuple[tuple, ...]

    def __post_init__(self):
        object.__setattr__(self, "rows", tuple(tuple(r) for r in self.rows))
        if not self.rows or len({len(r) for r in self.rows}) != 1:
            raise ValueError("a diagram is a non-empty rectangle")

    @property
    def width(self) -> int:
        return len(self.rows[0])

    @property
    def height(self) -> int:
        return len(self.rows)

    def to_pattern(self, compiled: CompiledShift) -> Pattern:
        idx = compiled.index
        return Pattern({(x, y): idx[v] for y, r in enumerate(self.rows) for x, v in enumerate(r)})

    def with_cell(self, x: int, y: int, value) -> "SpaceTimeDiagram":
        rows = [list(r) for r in self.rows]
        rows[y][x] = value
        return SpaceTimeDiagram(rows)

    def to_json(self) -> dict:
        return {"rows": [[list(v) if isinstance(v, tuple) else v for v in r] for r in self.rows]}

    @classmethod
    def from_json(cls, d: Mapping) -> "SpaceTimeDiagram":
        return cls([[tuple(v) if isinstance(v, list) else v for v in r] for r in d["rows"]])


def tm_row(tape: Sequence[str], head: int, state: str) -> tuple:
    return tuple((s, state if i == head else None) for i, s in enumerate(tape))


def twohead_row(m: TwoHeadTMSpec, tape: Sequence[str], head1: int, head2: int, state: str | None = None) -> tuple:
    q = state or m.start
    s1, s2 = tape[head1], tape[head2]
    return tuple((s, i == head1, i == head2, q, s1, s2) for i, s in enumerate(tape))


def _simulate_tm(m: TMSpec, row, steps):
    rows = [tuple(row)]
    heads = [i for i, c in enumerate(row) if c[1] is not None]
    if len(heads) != 1:
        raise ValueError("input row must carry exactly one head")
    cur = list(row)
    for _ in range(steps):
        (h,) = [i for i, c in enumerate(cur) if c[1] is not None]
        sym, q = cur[h]
        nxt = list(cur)
        if q not in m.halt:
            q2, w, mv = m.delta[(q, sym)]
            nh = h + MOVES[mv]
            if not 0 <= nh < len(cur):
                raise BoundaryError(f"head leaves the window at step {len(rows)}")
            nxt[h] = (w, None)
            nxt[nh] = (nxt[nh][0], q2)
        cur = nxt
        rows.append(tuple(cur))
    return SpaceTimeDiagram(rows)


def _simulate_twohead(m: TwoHeadTMSpec, row, steps):
    cur = [list(c) for c in row]
    rows = [tuple(row)]
    for _ in range(steps):
        h1 = [i for i, c in enumerate(cur) if c[1]]
        h2 = [i for i, c in enumerate(cur) if c[2]]
        if len(h1) != 1 or len(h2) != 1:
            raise ValueError("each row must carry exactly one of each head")
        p1, p2 = h1[0], h2[0]
        q = cur[0][3]
        tape = [c[0] for c in cur]
        if q not in m.halt:
            q2, w1, w2, m1, m2 = m.delta[(q, tape[p1], tape[p2])]
            if p1 == p2 and w1 != w2:
                raise ValueError("co-located heads write different symbols")
            tape[p1] = w1
            tape[p2] = w2
            p1, p2 = p1 + MOVES[m1], p2 + MOVES[m2]
            if not (0 <= p1 < len(tape) and 0 <= p2 < len(tape)):
                raise BoundaryError(f"head leaves the window at step {len(rows)}")
            q = q2
        cur = [[s, i == p1, i == p2, q, tape[p1], tape[p2]] for i, s in enumerate(tape)]
        rows.append(tuple(tuple(c) for c in cur))
    return SpaceTimeDiagram(rows)


def _simulate_nca(a: NCASpec, row, steps, choices):
    choices = list(choices) if choices is not None else []
    k = 0
    cur = list(row)
    rows = [tuple(cur)]
    for _ in range(steps):
        ext = [a.boundary] + cur + [a.boundary]
        nxt = []
        for i in range(len(cur)):
            opts = a.options(ext[i], ext[i + 1], ext[i + 2])
            c = choices[k] if k < len(choices) else 0
            k += 1
            nxt.append(opts[c % len(opts)])
        cur = nxt
        rows.append(tuple(cur))
    return SpaceTimeDiagram(rows)


def simulate(spec, row: Sequence, steps: int, choices: Iterable[int] | None = None) -> SpaceTimeDiagram:
    """Reference executor.

    For automata, ``choices`` is consumed one entry per cell per step
    (row-major); entry ``c`` selects option ``c mod |f(a,b,c)|`` among the
    sorted possibilities, missing entries meaning 0.
    """
    if isinstance(spec, TMSpec):
        return _simulate_tm(spec, row, steps)
    if isinstance(spec, TwoHeadTMSpec):
        return _simulate_twohead(spec, row, steps)
    if isinstance(spec, NCASpec):
        return _simulate_nca(spec, row, steps, choices)
    raise TypeError(f"cannot simulate {type(spec).__name__}")


def _framed_grid(d: SpaceTimeDiagram, compiled: CompiledShift) -> np.ndarray:
    idx = compiled.index
    g = np.zeros((d.height, d.width + 2), dtype=np.int64)
    for y, r in enumerate(d.rows):
        for x, v in enumerate(r):
            if v not in idx:
                raise KeyError(f"letter {v!r} is not in the compiled alphabet")
            g[y, x + 1] = idx[v]
        g[y, 0] = g[y, -1] = compiled.pad_for(g[y, 1:-1])
    return g


def _grid_admissible(g: np.ndarray, compiled: CompiledShift) -> bool:
    spec = compiled.spec
    for f in spec.forbidden_list(0):
        # only single-cell error patterns are listed explicitly
        if len(f) == 1 and (g == f[(0, 0)]).any():
            return False
    succ = compiled.successors
    rule = spec.rule
    h, w = g.shape
    for y in range(h - 1):
        for x in range(w - 2):
            win = tuple(int(v) for v in g[y : y + 2, x : x + 3].ravel())
            if rule is not None:
                if not rule.allowed(win):
                    return False
            elif win[4] not in succ.get(win[:3], ()):
                return False
    return True


def verify_spacetime(d: SpaceTimeDiagram, compiled: CompiledShift) -> bool:
    """Local admissibility of the diagram framed by constant boundary columns."""
    try:
        g = _framed_grid(d, compiled)
    except KeyError:
        return False
    return _grid_admissible(g, compiled)


def completions(compiled: CompiledShift, bottom: Sequence, height: int, limit: int = 0,
                node_limit: int = 5_000_000) -> list[SpaceTimeDiagram]:
    """Exhaustive search of framed diagrams with the given input row.

    Every cell above the input row ranges over the whole composite alphabet;
    the search stops after ``limit`` solutions when ``limit > 0``.
    """
    idx = compiled.index
    w = len(bottom) + 2
    row0 = [idx[v] for v in bottom]
    pad0 = compiled.pad_for(row0)
    fixed: dict = {(0, 0): pad0, (w - 1, 0): pad0}
    for x, v in enumerate(row0):
        fixed[(x + 1, 0)] = v
    for y in range(1, height):
        fixed[(0, y)] = list(compiled.pads())
        fixed[(w - 1, y)] = list(compiled.pads())
    out: list[SpaceTimeDiagram] = []

    def keep(g):
        out.append(SpaceTimeDiagram([compiled.decode(g[y, 1:-1]) for y in range(height)]))
        return limit > 0 and len(out) >= limit

    _, exhausted = _search(compiled.spec, w, height, fixed, 0, node_limit, keep)
    if not exhausted and not (limit and len(out) >= limit):
        raise RuntimeError("node limit exceeded during completion search")
    return out


# --------------------------------------------------------------------------
# Rendering
# --------------------------------------------------------------------------


def render_ppm(d: SpaceTimeDiagram, scale: int = 8) -> str:
    """Plain PPM (P3), top row of the image is the last time step."""
    palette = {}
    base = [(255, 255, 255), (20, 20, 20), (200, 40, 40), (40, 120, 200), (60, 170, 60), (230, 180, 30)]

    def color(v):
        if v not in palette:
            if isinstance(v, tuple) and len(v) >= 2 and any(x not in (None, False) for x in v[1:3]):
                palette[v] = (200, 40, 40) if v[0] == "1" else (240, 150, 150)
            elif isinstance(v, tuple):
                palette[v] = {"0": (255, 255, 255), "1": (20, 20, 20)}.get(v[0], (120, 120, 120))
            else:
                palette[v] = base[int(v) % len(base)] if isinstance(v, int) else base[len(palette) % len(base)]
        return palette[v]

    w, h = d.width * scale, d.height * scale
    lines = ["P3", f"{w} {h}", "255"]
    for y in range(d.height - 1, -1, -1):
        row = []
        for v in d.rows[y]:
            r, g, b = color(v)
            row.extend([f"{r} {g} {b}"] * scale)
        line = " ".join(row)
        lines.extend([line] * scale)
    return "\n".join(lines) + "\n"


# --------------------------------------------------------------------------
# Example machines
# --------------------------------------------------------------------------


def noop_tm() -> TMSpec:
    return TMSpec(("0", "1", END), ("h",), "h", frozenset({"h"}), {}, "noop")


def increment_tm() -> TMSpec:
    """Binary increment with the head on the least significant (rightmost) bit."""
    delta = {
        ("carry", "1"): ("carry", "0", "L"),
        ("carry", "0"): ("done", "1", "S"),
        ("carry", END): ("done", "1", "S"),
    }
    return TMSpec(("0", "1", END), ("carry", "done"), "carry", frozenset({"done"}), delta, "increment")


def unary_successor_tm() -> TMSpec:
    """Walk right over a block of ones and append one more."""
    delta = {
        ("scan", "1"): ("scan", "1", "R"),
        ("scan", "0"): ("done", "1", "S"),
        ("scan", END): ("done", "1", "S"),
    }
    return TMSpec(("0", "1", END), ("scan", "done"), "scan", frozenset({"done"}), delta, "unary-successor")


def random_tm(rng: np.random.Generator, n_states: int = 2) -> TMSpec:
    syms = ("0", "1", END)
    states = tuple(f"q{i}" for i in range(n_states)) + ("h",)
    delta = {}
    for q in states[:-1]:
        for a in syms:
            q2 = states[rng.integers(len(states))]
            b = ("0", "1")[rng.integers(2)]
            mv = "LSR"[rng.integers(3)]
            delta[(q, a)] = (q2, b, mv)
    return TMSpec(syms, states, "q0", frozenset({"h"}), delta, "random")


def stationary_twohead() -> TwoHeadTMSpec:
    syms = ("0", "1", END)
    delta = {("s", a, b): ("s", a, b, "S", "S") for a in syms for b in syms}
    return TwoHeadTMSpec(syms, ("s",), "s", frozenset(), delta, "stationary")


def copy_twohead(block: int = 3) -> TwoHeadTMSpec:
    """Head 2 reads a block of ``block`` cells while head 1 writes it elsewhere."""
    syms = ("0", "1", END)
    states = tuple(f"c{i}" for i in range(block)) + ("h",)
    delta = {}
    for i in range(block):
        nxt = states[i + 1]
        for a in syms:
            for b in syms:
                w = b if b != END else "0"
                delta[(states[i], a, b)] = (nxt, w, b, "R", "R")
    return TwoHeadTMSpec(syms, states, "c0", frozenset({"h"}), delta, "copy")


def identity_nca(size: int = 2) -> NCASpec:
    return nca_from_function(size, lambda a, b, c: {b}, name="identity")


def full_choice_nca() -> NCASpec:
    return nca_from_function(2, lambda a, b, c: {0, 1}, name="full-choice")


def xor_nca() -> NCASpec:
    return nca_from_function(2, lambda a, b, c: {a ^ c}, name="rule90")


def random_nca(rng: np.random.Generator, size: int = 2, with_error: bool = True) -> NCASpec:
    k = size + (1 if with_error else 0)
    err = size if with_error else None
    table = {}
    for t in itertools.product(range(k), repeat=3):
        if err is not None and err in t:
            table[t] = {err}
            continue
        n = 1 + int(rng.integers(2))
        opts = set(int(v) for v in rng.choice(size, size=min(n, size), replace=False))
        table[t] = opts
    return nca_from_function(k, lambda a, b, c: table[(a, b, c)], error=err, name="random")
