"""An enhanced nondeterministic cellular-automaton machine.

The tape holds cells ``(symbol, marks, activity, signal)``:

* ``symbol``: 0/1 data bits, :data:`ELEM` (element separator) or
  :data:`FIELD` (field separator / end cell);
* ``marks``: a frozenset of special mark names;
* ``activity``: ``k >= 1`` for principal cell ``k``, :data:`SECONDARY` or
  :data:`INACTIVE`;
* ``signal``: id of the jump wire crossing an inactive cell during the
  current step (``0`` when idle).

A single global internal state is visible to every cell.  One VM step lets a
program (1) read the symbols under the principal cells, (2) pick a new
internal state and an action for each principal (write, move, or jump to the
nearest secondary cell in a direction), and (3) update every non-principal
cell from its own contents, the internal state, the principal readings and,
so that secondary markers can slide along their element, its left
neighbour.  A jump over any distance costs one step; the crossed cells form
a wire whose length is recorded for diagnostics.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Mapping, Sequence

INACTIVE = 0
SECONDARY = -1
ELEM = 2
FIELD = 3

GLOBAL_BEGIN = "begin"
GLOBAL_END = "end"

#: Published step-bound constant for :func:`list_search`: steps <= LIST_SEARCH_C * q.
LIST_SEARCH_C = 9


@dataclass(frozen=True)
class Cell:
    symbol: int
    marks: frozenset = frozenset()
    activity: int = INACTIVE
    signal: int = 0

    def glyph(self) -> str:
        s = {0: "0", 1: "1", ELEM: "|", FIELD: "#"}.get(self.symbol, "?")
        if self.activity > 0:
            return f"[{s}]"
        if self.activity == SECONDARY:
            return f"({s})"
        return f" {s} "


@dataclass(frozen=True)
class VMState:
    tape: tuple[Cell, ...]
    state: object = "start"
    steps: int = 0
    error: bool = False
    wires: tuple[int, ...] = ()

    def principals(self) -> dict[int, int]:
        """principal id -> position."""
        return {c.activity: i for i, c in enumerate(self.tape) if c.activity > 0}

    def secondaries(self) -> list[int]:
        return [i for i, c in enumerate(self.tape) if c.activity == SECONDARY]

    def trace_line(self) -> str:
        flag = " ERR" if self.error else ""
        return f"{self.steps:5d} {str(self.state):12s}{flag} " + "".join(c.glyph() for c in self.tape)


@dataclass(frozen=True)
class Action:
    """What a principal cell does during one step.

    ``write``: new symbol (None keeps it); ``move``: -1, 0 or +1;
    ``jump``: -1 or +1 to jump instead of moving; ``leave``: activity left
    behind when the principal relocates (secondary or inactive); ``mark``:
    special marks added to the cell under the principal.
    """

    write: int | None = None
    move: int = 0
    jump: int | None = None
    leave: int = INACTIVE
    mark: frozenset | None = None


class VMProgram:
    """Base program: keeps the state, principals idle, other cells unchanged."""

    def principal(self, vm: VMState, readings: Mapping[int, tuple]) -> tuple[object, dict[int, Action]]:
        return vm.state, {}

    def update_cell(self, vm: VMState, readings: Mapping[int, tuple], new_state, i: int) -> tuple[int, frozenset]:
        c = vm.tape[i]
        return c.activity, c.marks


class MoveRight(VMProgram):
    """Every principal moves one cell to the right."""

    def principal(self, vm, readings):
        return vm.state, {pid: Action(move=1) for pid in readings}


def _signal_conflict(tape: Sequence[Cell]) -> bool:
    for a, b in zip(tape, tape[1:]):
        if a.activity == INACTIVE and b.activity == INACTIVE and a.signal and b.signal and a.signal != b.signal:
            return True
    return False


def _error(vm: VMState, steps: int | None = None) -> VMState:
    return replace(vm, error=True, steps=vm.steps if steps is None else steps)


def _readings(vm: VMState) -> dict[int, tuple]:
    out = {}
    n = len(vm.tape)
    for pid, i in vm.principals().items():
        c = vm.tape[i]
        right = vm.tape[i + 1].symbol if i + 1 < n else None
        out[pid] = (c.symbol, c.marks, right)
    return out


def _relocate(tape: list[Cell], src: int, dst: int, pid: int, leave: int) -> None:
    tape[src] = replace(tape[src], activity=leave)
    tape[dst] = replace(tape[dst], activity=pid)


def nearest_secondary(tape: Sequence[Cell], start: int, direction: int) -> int | None:
    i = start + direction
    while 0 <= i < len(tape):
        if tape[i].activity == SECONDARY:
            return i
        i += direction
    return None


def step(vm: VMState, program: VMProgram, k: int | None = None) -> VMState:
    """One synchronous VM step; errors are absorbing."""
    if vm.error:
        return vm
    if _signal_conflict(vm.tape):
        return _error(vm)
    readings = _readings(vm)
    new_state, actions = program.principal(vm, readings)
    if new_state == "error":
        return _error(vm, vm.steps + 1)
    tape = [replace(c, signal=0) for c in vm.tape]
    ppos = vm.principals()
    for i, c in enumerate(vm.tape):
        if c.activity > 0:
            continue
        act, marks = program.update_cell(vm, readings, new_state, i)
        tape[i] = replace(tape[i], activity=act, marks=marks)
    wires = []
    for pid in sorted(actions):
        a = actions[pid]
        i = ppos[pid]
        if a.write is not None:
            tape[i] = replace(tape[i], symbol=a.write)
        if a.mark is not None:
            tape[i] = replace(tape[i], marks=tape[i].marks | a.mark)
        if a.jump is not None:
            j = nearest_secondary(tape, i, a.jump)
            if j is None:
                return _error(vm, vm.steps + 1)
            lo, hi = sorted((i, j))
            for w in range(lo + 1, hi):
                if tape[w].activity == INACTIVE:
                    tape[w] = replace(tape[w], signal=pid)
            wires.append(hi - lo)
            _relocate(tape, i, j, pid, a.leave)
        elif a.move:
            j = i + a.move
            if not 0 <= j < len(tape) or tape[j].activity > 0:
                return _error(vm, vm.steps + 1)
            _relocate(tape, i, j, pid, a.leave)
    out = VMState(tuple(tape), new_state, vm.steps + 1, False, vm.wires + tuple(wires))
    expected = len(ppos) if k is None else k
    if len(out.principals()) != expected or _signal_conflict(out.tape):
        return _error(out)
    return out


def jump(vm: VMState, pid: int, direction: int, leave: int = SECONDARY) -> VMState:
    """Single jump of principal ``pid``; error if no secondary cell lies that way."""

    class _Jump(VMProgram):
        def principal(self, v, readings):
            return v.state, {pid: Action(jump=direction, leave=leave)}

    if pid not in vm.principals():
        raise KeyError(f"no principal cell with id {pid}")
    return step(vm, _Jump())


def run(vm: VMState, program: VMProgram, max_steps: int, stop=lambda v: False) -> list[VMState]:
    """Run until ``stop``, error or ``max_steps``; returns the trace including the start."""
    trace = [vm]
    while len(trace) <= max_steps and not vm.error and not stop(vm):
        vm = step(vm, program)
        trace.append(vm)
    return trace


def dump_trace(trace: Sequence[VMState]) -> str:
    return "\n".join(v.trace_line() for v in trace)


# --------------------------------------------------------------------------
# List search
# --------------------------------------------------------------------------


def _build_search_tape(e: str, lists: Sequence[Sequence[str]]) -> tuple[list[Cell], dict]:
    q = len(e)
    tape = []
    for i, b in enumerate(e):
        marks = {"e"}
        if i == 0:
            marks.add(GLOBAL_BEGIN)
        if i == q - 1:
            marks.add("e_end")
        tape.append(Cell(int(b), frozenset(marks), 1 if i == 0 else INACTIVE))
    starts = {}
    for li, lst in enumerate(lists):
        tape.append(Cell(FIELD, frozenset({"list"})))
        for ei, el in enumerate(lst):
            if len(el) < q:
                raise ValueError("list elements must be at least as long as the query")
            tape.append(Cell(ELEM))
            starts[len(tape)] = (li, ei)
            for j, b in enumerate(el):
                tape.append(Cell(int(b), frozenset({"x"}), SECONDARY if j == 0 else INACTIVE))
    tape.append(Cell(FIELD, frozenset({GLOBAL_END}), SECONDARY))
    return tape, starts


class ListSearch(VMProgram):
    """Prefix search of ``e`` among the list elements (one principal cell).

    States: ``scan`` (q steps), ``jump1``, ``jump2``, ``activate``,
    ``jumpL``, ``deactivate``, ``jumpR1``, ``jumpR2``, then ``unique`` or
    ``pair``.  Every failure enters the error state.
    """

    def principal(self, vm, readings):
        sym, marks, _ = readings[1]
        st = vm.state
        if st in ("start", "scan"):
            if "e_end" in marks:
                return "jump1", {1: Action(move=0)}
            return "scan", {1: Action(move=1)}
        if st == "jump1":
            return "landed1", {1: Action(jump=1, leave=INACTIVE)}
        if st == "landed1":
            if GLOBAL_END in marks:
                return "error", {}
            return "landed2", {1: Action(jump=1, leave=SECONDARY)}
        if st == "landed2":
            if GLOBAL_END in marks:
                return "unique", {}
            return "activate", {}
        if st == "activate":
            return "landedL", {1: Action(jump=-1, leave=SECONDARY)}
        if st == "landedL":
            if sym != FIELD:
                return "error", {}
            return "deactivate", {}
        if st == "deactivate":
            return "landedR1", {1: Action(jump=1, leave=INACTIVE)}
        if st == "landedR1":
            return "landedR2", {1: Action(jump=1, leave=SECONDARY)}
        if st == "landedR2":
            return ("pair" if GLOBAL_END in marks else "error"), {}
        return st, {}

    def update_cell(self, vm, readings, new_state, i):
        c = vm.tape[i]
        st = vm.state
        if st in ("start", "scan"):
            bit, marks, _ = readings[1]
            last = "e_end" in marks
            left = vm.tape[i - 1] if i > 0 else None
            if c.symbol == FIELD:
                return c.activity, c.marks
            if last:
                # final comparison: survivors stay put, mismatches die
                if c.activity == SECONDARY:
                    return (SECONDARY if c.symbol == bit else INACTIVE), c.marks
                return c.activity, c.marks
            # the marker slides one cell right if the left neighbour matched
            if left is not None and left.activity == SECONDARY and left.symbol != FIELD and left.symbol == bit:
                return SECONDARY, c.marks
            if c.activity == SECONDARY:
                return INACTIVE, c.marks
            return c.activity, c.marks
        if new_state == "activate":
            if c.symbol == FIELD and "list" in c.marks:
                return SECONDARY, c.marks
        if st == "landedL" and new_state == "deactivate":
            if c.symbol == FIELD and "list" in c.marks:
                return INACTIVE, c.marks
        return c.activity, c.marks


@dataclass(frozen=True)
class SearchOutcome:
    kind: str  # "unique" | "pair" | "error"
    found: tuple[tuple[int, int], ...] = ()
    steps: int = 0
    reason: str = ""


def _owner(pos: int, starts: Mapping[int, tuple[int, int]]) -> tuple[int, int]:
    best = max(p for p in starts if p <= pos)
    return starts[best]


def list_search(e: str, lists: Sequence[Sequence[str]], trace: bool = False):
    """Run the prefix search; returns a :class:`SearchOutcome` (and the trace when asked)."""
    if not e:
        raise ValueError("the query must have at least one bit")
    tape, starts = _build_search_tape(e, lists)
    vm = VMState(tuple(tape), "start")
    prog = ListSearch()
    states = run(vm, prog, max_steps=len(e) + 16, stop=lambda v: v.state in ("unique", "pair"))
    last = states[-1]
    if last.error:
        reason = {"landed1": "no match", "landedL": "two matches in one list", "landedR2": "three or more matches"}
        out = SearchOutcome("error", (), last.steps, reason.get(str(states[-1].state), "error"))
    elif last.state in ("unique", "pair"):
        found = tuple(_owner(p, starts) for p in last.secondaries() if last.tape[p].symbol != FIELD)
        out = SearchOutcome(str(last.state), found, last.steps)
    else:  # pragma: no cover - the step budget is generous
        out = SearchOutcome("error", (), last.steps, "step budget")
    return (out, states) if trace else out


def list_search_oracle(e: str, lists: Sequence[Sequence[str]]) -> SearchOutcome:
    """Direct linear scan with the same outcome conventions."""
    hits = [(li, ei) for li, l in enumerate(lists) for ei, el in enumerate(l) if el.startswith(e)]
    if len(hits) == 1:
        return SearchOutcome("unique", tuple(hits))
    if len(hits) == 2 and hits[0][0] != hits[1][0]:
        return SearchOutcome("pair", tuple(hits))
    return SearchOutcome("error")


# --------------------------------------------------------------------------
# Special marks and the initialisation sweep
# --------------------------------------------------------------------------

SIDES = ("W", "N", "E", "S")


def mark_catalog() -> tuple[str, ...]:
    """The 75 special marks used by the sparse-shift deployment.

    2 for the rank field, 2 per side for each of the coordinate and side-bit
    fields, 4 per side for the own-points field plus one interior mark for
    its west copy, 4 per side for the flow field, 2 per side for the
    bit-chain field and 4 per side for the responsibility field.
    """
    out = ["F2.start", "F2.end"]
    for f in ("F3", "F4"):
        for s in SIDES:
            out += [f"{f}.{s}.start", f"{f}.{s}.end"]
    for s in SIDES:
        out += [f"F5.{s}.start", f"F5.{s}.end", f"F5.{s}.estart", f"F5.{s}.eend"]
    out.append("F5.W.inner")
    for s in SIDES:
        out += [f"F6.{s}.start", f"F6.{s}.end", f"F6.{s}.estart", f"F6.{s}.eend"]
    for s in SIDES:
        out += [f"F7.{s}.start", f"F7.{s}.end"]
    for s in SIDES:
        out += [f"F8.{s}.start", f"F8.{s}.end", f"F8.{s}.estart", f"F8.{s}.eend"]
    return tuple(out)


@dataclass(frozen=True)
class FieldSpec:
    """One input field: a scalar bit string or a list of bit-string elements."""

    name: str  # e.g. "F5"
    side: str | None  # one of SIDES, or None for side-free fields
    elements: tuple[str, ...]
    is_list: bool = False

    @property
    def prefix(self) -> str:
        return self.name if self.side is None else f"{self.name}.{self.side}"


def encode_fields(fields: Sequence[FieldSpec]) -> list[int]:
    """Symbols: FIELD before every field, ELEM before each list element, a final FIELD."""
    out: list[int] = []
    for f in fields:
        out.append(FIELD)
        if f.is_list:
            for el in f.elements:
                out.append(ELEM)
                out.extend(int(b) for b in el)
        else:
            out.extend(int(b) for b in "".join(f.elements))
    out.append(FIELD)
    return out


class InitMarks(VMProgram):
    """Single principal sweeping right one cell per step, writing marks.

    The program knows the ordered field schema (name, side, list or
    scalar).  Its internal state ``(field index, element index, bits seen in
    the current element)`` plus the symbol to the right is enough to decide
    every mark of the current cell, so each step is local.
    """

    def __init__(self, schema: Sequence[tuple[str, str | None, bool]]):
        self.schema = list(schema)

    def _prefix(self, fi: int) -> str:
        name, side, _ = self.schema[fi]
        return name if side is None else f"{name}.{side}"

    def principal(self, vm, readings):
        sym, marks, right = readings[1]
        fi, ei, seen = vm.state
        new = set()
        if vm.steps == 0:
            new.add(GLOBAL_BEGIN)
        if right is None:
            if sym != FIELD or fi != len(self.schema) - 1:
                return "error", {}
            new.add(GLOBAL_END)
            return "done", {1: Action(mark=frozenset(new))}
        if sym == FIELD:
            fi += 1
            if fi >= len(self.schema):
                return "error", {}
            is_list = self.schema[fi][2]
            if (is_list and right not in (ELEM, FIELD)) or (not is_list and right not in (0, 1)):
                return "error", {}
            return (fi, -1 if is_list else 0, 0), {1: Action(move=1, mark=frozenset(new))}
        if fi < 0:
            return "error", {}
        name, side, is_list = self.schema[fi]
        if sym == ELEM:
            if not is_list or right not in (0, 1):
                return "error", {}
            return (fi, ei + 1, 0), {1: Action(move=1, mark=frozenset(new))}
        if sym not in (0, 1) or (not is_list and right == ELEM):
            return "error", {}
        pre = self._prefix(fi)
        if seen == 0:
            new.add(f"{pre}.start" if ei <= 0 else f"{pre}.estart")
        if right == FIELD:
            new.add(f"{pre}.end")
        elif right == ELEM:
            new.add(f"{pre}.eend")
        if name == "F5" and side == "W" and not any(m.startswith(pre) for m in new):
            new.add(f"{pre}.inner")
        return (fi, ei, seen + 1), {1: Action(move=1, mark=frozenset(new))}


def init_marks(fields: Sequence[FieldSpec]) -> VMState:
    """Sweep the encoded input once, writing field and element marks.

    Takes exactly one VM step per input cell.  Malformed delimiters raise
    the error flag.
    """
    tape = encode_fields(fields)
    cells = tuple(Cell(s, frozenset(), 1 if i == 0 else INACTIVE) for i, s in enumerate(tape))
    prog = InitMarks([(f.name, f.side, f.is_list) for f in fields])
    trace = run(VMState(cells, (-1, 0, 0)), prog, max_steps=len(tape), stop=lambda v: v.state == "done")
    return trace[-1]


def init_marks_raw(schema: Sequence[tuple[str, str | None, bool]], symbols: Sequence[int]) -> VMState:
    """Same sweep on an arbitrary symbol sequence (used to exercise malformed input)."""
    cells = tuple(Cell(s, frozenset(), 1 if i == 0 else INACTIVE) for i, s in enumerate(symbols))
    trace = run(VMState(cells, (-1, 0, 0)), InitMarks(schema), max_steps=len(symbols), stop=lambda v: v.state == "done")
    return trace[-1]


def marks_by_name(vm: VMState) -> dict[str, list[int]]:
    out: dict[str, list[int]] = {}
    for i, c in enumerate(vm.tape):
        for m in c.marks:
            out.setdefault(m, []).append(i)
    return out
