"""Time-bounded Kolmogorov complexity on a toy decompressor, and the
standard-pattern hierarchy built from incompressible matrices.

Toy decompressor
----------------
A program is a bit string read left to right.  Instructions start with a
4-bit opcode (most significant bit first); numeric arguments use the
Elias gamma code of ``n + 1`` so that 0 is encoded as ``1``.  The machine
keeps one output buffer of bits (capacity :data:`BUF_CAP`).

====  ============  ==========================================================
code  mnemonic      effect
====  ============  ==========================================================
0     HALT          stop; valid only if it is the last bit of the program
1     EMIT0         append 0
2     EMIT1         append 1
3     LIT n b..     append the next n program bits
4     ZEROS n       append n zeros
5     ONES n        append n ones
6     COPY k n      append the last k bits n times
7     INVERT k      invert the last k bits
8     DOUBLE        replace every bit b by bb
9     REVERSE       reverse the buffer
10    SCALE w       rows of width w; every bit becomes a 2x2 block
11    DOWN w        rows of width w; keep even rows and even columns
12    XORSHIFT k    b[i] ^= old b[i-k] for i >= k
13    APPENDINV     append the bitwise inversion of the buffer
14    MIRROR        append the reversed buffer
15.0  PERIOD n      extend the buffer periodically to length n
15.1  TRANSPOSE w   transpose the matrix of rows of width w
15.2  CLEAR         empty the buffer
15.3  ROTATE k      rotate the buffer left by k
====  ============  ==========================================================

Opcode 15 is followed by two more bits selecting the extended instruction,
which gives 19 instructions.  Every instruction costs one step plus one
step per buffer bit it writes.  A program is *valid* when it halts exactly
at its last bit within the step budget; invalid arguments (k larger than
the buffer, widths that do not divide it, zero widths) make it invalid.
Valid programs form a prefix-free set.  The empty string has complexity 4
(the program ``0000``).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ._jit import njit
from .core import BW, Alphabet, Pattern, ShiftSpec, _search

BUF_CAP = 4096
T_MAX = 1 << 16
EMPTY_COMPLEXITY = 4

OK, INVALID, TIMEOUT, OVERFLOW = 1, 0, -1, -2

MNEMONICS = (
    "HALT", "EMIT0", "EMIT1", "LIT", "ZEROS", "ONES", "COPY", "INVERT", "DOUBLE",
    "REVERSE", "SCALE", "DOWN", "XORSHIFT", "APPENDINV", "MIRROR",
    "PERIOD", "TRANSPOSE", "CLEAR", "ROTATE",
)  # fmt: skip


# --------------------------------------------------------------------------
# Interpreter kernel
# --------------------------------------------------------------------------


@njit
def _read_bits(prog, plen, pos, k):
    """Read k bits as an integer; returns (value, new pos) or (-1, pos) past the end."""
    if pos + k > plen:
        return -1, pos
    v = 0
    for i in range(k):
        v = (v << 1) | int(prog[pos + i])
    return v, pos + k


@njit
def _read_num(prog, plen, pos):
    """Elias gamma of n + 1; returns (n, new pos) or (-1, pos) on failure."""
    z = 0
    while pos < plen and prog[pos] == 0:
        z += 1
        pos += 1
        if z > 20:
            return -1, pos
    if pos + z + 1 > plen:
        return -1, pos
    v = 0
    for i in range(z + 1):
        v = (v << 1) | int(prog[pos + i])
    return v - 1, pos + z + 1


@njit
def run_program(prog, plen, t, out, tmp):
    """Run ``prog[:plen]``; returns (status, output length, steps)."""
    n = 0
    pos = 0
    steps = 0
    cap = out.shape[0]
    while True:
        op, pos = _read_bits(prog, plen, pos, 4)
        if op < 0:
            return INVALID, n, steps
        steps += 1
        if op == 15:
            ext, pos = _read_bits(prog, plen, pos, 2)
            if ext < 0:
                return INVALID, n, steps
            op = 15 + ext
        if op == 0:
            if pos != plen:
                return INVALID, n, steps
            return OK, n, steps
        elif op == 1 or op == 2:
            if n + 1 > cap:
                return OVERFLOW, n, steps
            out[n] = op - 1
            n += 1
            steps += 1
        elif op == 3:
            k, pos = _read_num(prog, plen, pos)
            if k < 0 or pos + k > plen:
                return INVALID, n, steps
            if n + k > cap:
                return OVERFLOW, n, steps
            for i in range(k):
                out[n + i] = prog[pos + i]
            pos += k
            n += k
            steps += k
        elif op == 4 or op == 5:
            k, pos = _read_num(prog, plen, pos)
            if k < 0:
                return INVALID, n, steps
            if n + k > cap:
                return OVERFLOW, n, steps
            for i in range(k):
                out[n + i] = op - 4
            n += k
            steps += k
        elif op == 6:
            k, pos = _read_num(prog, plen, pos)
            if k < 1:
                return INVALID, n, steps
            r, pos = _read_num(prog, plen, pos)
            if r < 0 or k > n:
                return INVALID, n, steps
            if n + k * r > cap:
                return OVERFLOW, n, steps
            base = n - k
            for j in range(r):
                for i in range(k):
                    out[n] = out[base + i]
                    n += 1
            steps += k * r
        elif op == 7:
            k, pos = _read_num(prog, plen, pos)
            if k < 0 or k > n:
                return INVALID, n, steps
            for i in range(n - k, n):
                out[i] = 1 - out[i]
            steps += k
        elif op == 8:
            if 2 * n > cap:
                return OVERFLOW, n, steps
            for i in range(n - 1, -1, -1):
                out[2 * i] = out[i]
                out[2 * i + 1] = out[i]
            steps += 2 * n
            n *= 2
        elif op == 9:
            for i in range(n // 2):
                a = out[i]
                out[i] = out[n - 1 - i]
                out[n - 1 - i] = a
            steps += n
        elif op == 10 or op == 11 or op == 16:
            w, pos = _read_num(prog, plen, pos)
            if w < 1 or n % w != 0:
                return INVALID, n, steps
            h = n // w
            if op == 10:
                if 4 * n > cap:
                    return OVERFLOW, n, steps
                for y in range(h):
                    for x in range(w):
                        b = out[y * w + x]
                        for dy in range(2):
                            for dx in range(2):
                                tmp[(2 * y + dy) * 2 * w + 2 * x + dx] = b
                n *= 4
            elif op == 11:
                w2 = (w + 1) // 2
                h2 = (h + 1) // 2
                for y in range(h2):
                    for x in range(w2):
                        tmp[y * w2 + x] = out[2 * y * w + 2 * x]
                n = w2 * h2
            else:
                for y in range(h):
                    for x in range(w):
                        tmp[x * h + y] = out[y * w + x]
            for i in range(n):
                out[i] = tmp[i]
            steps += n
        elif op == 12:
            k, pos = _read_num(prog, plen, pos)
            if k < 1:
                return INVALID, n, steps
            for i in range(n - 1, k - 1, -1):
                out[i] = out[i] ^ out[i - k]
            steps += n
        elif op == 13 or op == 14:
            if 2 * n > cap:
                return OVERFLOW, n, steps
            for i in range(n):
                out[n + i] = (1 - out[i]) if op == 13 else out[n - 1 - i]
            steps += n
            n *= 2
        elif op == 15:
            k, pos = _read_num(prog, plen, pos)
            if k < 0 or n == 0:
                return INVALID, n, steps
            if k > cap:
                return OVERFLOW, n, steps
            for i in range(n, k):
                out[i] = out[i % n]
            if k > n:
                steps += k - n
                n = k
        elif op == 17:
            n = 0
        else:  # op == 18, ROTATE
            k, pos = _read_num(prog, plen, pos)
            if k < 0 or n == 0:
                return INVALID, n, steps
            k = k % n
            for i in range(n):
                tmp[i] = out[(i + k) % n]
            for i in range(n):
                out[i] = tmp[i]
            steps += n
        if steps > t:
            return TIMEOUT, n, steps


@njit
def _int_to_bits(v, length, prog):
    for i in range(length):
        prog[length - 1 - i] = (v >> i) & 1


@njit
def _find_program(target, tlen, length, t):
    """Smallest (lexicographic) program of exactly ``length`` bits printing target, or -1."""
    prog = np.zeros(max(length, 1), dtype=np.uint8)
    out = np.zeros(BUF_CAP, dtype=np.uint8)
    tmp = np.zeros(4 * BUF_CAP, dtype=np.uint8)
    for v in range(1 << length):
        _int_to_bits(v, length, prog)
        st, n, steps = run_program(prog, length, t, out, tmp)
        if st == OK and n == tlen:
            same = True
            for i in range(n):
                if out[i] != target[i]:
                    same = False
                    break
            if same:
                return v
    return -1


@njit
def _outputs_of_length(length, t, outlen, res):
    """Pack outputs of ``outlen`` <= 64 bits of all programs of ``length`` bits into res."""
    prog = np.zeros(max(length, 1), dtype=np.uint8)
    out = np.zeros(BUF_CAP, dtype=np.uint8)
    tmp = np.zeros(4 * BUF_CAP, dtype=np.uint8)
    m = 0
    for v in range(1 << length):
        _int_to_bits(v, length, prog)
        st, n, steps = run_program(prog, length, t, out, tmp)
        if st == OK and n == outlen:
            code = np.uint64(0)
            for i in range(n):
                code = (code << np.uint64(1)) | np.uint64(out[i])
            res[m] = code
            m += 1
    return m


@njit
def _busiest(length, t):
    """(max steps, first program) over halting programs of exactly ``length`` bits."""
    prog = np.zeros(max(length, 1), dtype=np.uint8)
    out = np.zeros(BUF_CAP, dtype=np.uint8)
    tmp = np.zeros(4 * BUF_CAP, dtype=np.uint8)
    best = -1
    arg = -1
    for v in range(1 << length):
        _int_to_bits(v, length, prog)
        st, n, steps = run_program(prog, length, t, out, tmp)
        if st == OK and steps > best:
            best = steps
            arg = v
    return best, arg


# --------------------------------------------------------------------------
# Python front end
# --------------------------------------------------------------------------


def _bits(s) -> np.ndarray:
    if isinstance(s, str):
        return np.array([int(c) for c in s], dtype=np.uint8)
    return np.asarray(s, dtype=np.uint8).ravel()


def _to_str(v: int, length: int) -> str:
    return format(v, f"0{length}b") if length else ""


@dataclass(frozen=True)
class RunResult:
    status: int
    output: str
    steps: int

    @property
    def ok(self) -> bool:
        return self.status == OK


def run(program: str, t: int = T_MAX) -> RunResult:
    """Run one program (a '0'/'1' string) with step budget ``t``."""
    if t > T_MAX:
        raise ValueError("step budget above T_MAX")
    prog = _bits(program)
    if len(prog) == 0:
        prog = np.zeros(1, dtype=np.uint8)
        plen = 0
    else:
        plen = len(prog)
    out = np.zeros(BUF_CAP, dtype=np.uint8)
    tmp = np.zeros(4 * BUF_CAP, dtype=np.uint8)
    st, n, steps = run_program(prog, plen, t, out, tmp)
    return RunResult(int(st), "".join(map(str, out[:n])), int(steps))


def gamma(n: int) -> str:
    """Argument encoding: Elias gamma of n + 1."""
    b = format(n + 1, "b")
    return "0" * (len(b) - 1) + b


def assemble(*items) -> str:
    """Tiny assembler: ``assemble(("LIT", "0110"), ("ZEROS", 5), "HALT")``."""
    out = []
    for it in items:
        name, *args = (it,) if isinstance(it, str) else it
        code = MNEMONICS.index(name)
        out.append(format(code, "04b") if code < 15 else "1111" + format(code - 15, "02b"))
        if name == "LIT":
            out.append(gamma(len(args[0])) + args[0])
        else:
            out.extend(gamma(a) for a in args)
    return "".join(out)


@dataclass(frozen=True)
class Exceeds:
    """Complexity above the enumeration bound."""

    bound: int

    def __str__(self):
        return f"> {self.bound}"

    def __ge__(self, other: int) -> bool:
        return other <= self.bound + 1

    def __gt__(self, other: int) -> bool:
        return other <= self.bound


def shortest_program(x, t: int, max_len: int) -> str | None:
    """Lexicographically first among the shortest programs printing x within t steps."""
    target = _bits(x)
    if len(target) > BUF_CAP:
        raise ValueError("target longer than the output buffer")
    for length in range(0, max_len + 1):
        v = _find_program(target, len(target), length, t)
        if v >= 0:
            return _to_str(int(v), length)
    return None


def time_bounded_K(x, t: int, max_len: int = 20):
    """Exact C^t(x) relative to the toy decompressor, or :class:`Exceeds`."""
    if t > T_MAX:
        raise ValueError("step budget above T_MAX")
    p = shortest_program(x, t, max_len)
    return len(p) if p is not None else Exceeds(max_len)


def outputs_below(length_bound: int, t: int, outlen: int) -> set[int]:
    """Packed outputs of length ``outlen`` (<= 64) of all programs shorter than ``length_bound``."""
    if outlen > 64:
        raise ValueError("packed outputs are limited to 64 bits")
    found: set[int] = set()
    for length in range(length_bound):
        res = np.zeros(1 << length, dtype=np.uint64)
        m = _outputs_of_length(length, t, outlen, res)
        found.update(int(v) for v in res[:m])
    return found


def first_incompressible_matrix(n: int, t: int, theta: int | None = None) -> np.ndarray:
    """Lexicographically first row-major n x n matrix with C^t >= theta (default n^2)."""
    theta = n * n if theta is None else theta
    if n * n > 64:
        raise ValueError("matrix too large for packed enumeration")
    short = outputs_below(theta, t, n * n)
    v = 0
    while v in short:
        v += 1
    assert v < 1 << (n * n), "counting guarantees an incompressible matrix"
    bits = [(v >> (n * n - 1 - i)) & 1 for i in range(n * n)]
    return np.array(bits, dtype=np.uint8).reshape(n, n)


def busy_beaver_program(m: int, t: int = T_MAX) -> str | None:
    """Halting program shorter than m bits with the most steps (lexicographic tie-break)."""
    best_steps, best = -1, None
    for length in range(m):
        s, v = _busiest(length, t)
        if s < 0:
            continue
        p = _to_str(int(v), length)
        if s > best_steps or (s == best_steps and p < best):
            best_steps, best = int(s), p
    return best


# --------------------------------------------------------------------------
# Standard patterns
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class HierarchyParams:
    n0: int = 2
    c: int = 3
    theta: tuple | None = None  # per-level threshold override (levels 1..)
    t_prime: tuple = (2048,)  # per-level budgets t'_i

    def __post_init__(self):
        if self.c < 3:
            raise ValueError("the exponent c must be at least 3")

    def sides(self, levels: int) -> tuple[list[int], list[int]]:
        """(n_0..n_levels, N_0..N_levels) with N_i = n_0 * ... * n_i."""
        ns, Ns = [self.n0], [self.n0]
        for _ in range(levels):
            ns.append(Ns[-1] ** self.c)
            Ns.append(Ns[-1] * ns[-1])
        return ns, Ns

    def t(self, i: int) -> int:
        """Budget defining R_i: 4 * (t'_i + N_i^2), room for the recovery program."""
        _, Ns = self.sides(i)
        return 4 * (self.t_prime[i - 1] + Ns[i] ** 2)

    def threshold(self, i: int) -> int:
        ns, _ = self.sides(i)
        return ns[i] ** 2 if self.theta is None else self.theta[i - 1]


# Desk-scale family: n0 = 2, exponent 3, one level (N1 = 16).  The natural
# threshold n1^2 = 64 would need 2^63 programs; 22 bits is the largest
# threshold whose full enumeration stays around a second.  At this size the
# lexicographically first incompressible R1 is nearly all zeros, so it does
# not hold every 2x2 block; that property needs larger levels.
DESK = HierarchyParams(2, 3, theta=(22,), t_prime=(2048,))


@dataclass
class StandardPatternFamily:
    params: HierarchyParams
    R: list = field(default_factory=list)  # R_1..R_levels
    Q: list = field(default_factory=list)  # (Q_i^0, Q_i^1) for i = 0..levels

    @property
    def levels(self) -> int:
        return len(self.Q) - 1


def substitute(r: np.ndarray, q0: np.ndarray, q1: np.ndarray) -> np.ndarray:
    """Replace every 0 of r by q0 and every 1 by q1 (arrays indexed [row, col])."""
    s = q0.shape[0]
    n = r.shape[0]
    out = np.empty((n * s, n * s), dtype=np.uint8)
    for y in range(n):
        for x in range(n):
            out[y * s : (y + 1) * s, x * s : (x + 1) * s] = q1 if r[y, x] else q0
    return out


def build_family(params: HierarchyParams = DESK, levels: int = 1) -> StandardPatternFamily:
    ns, Ns = params.sides(levels)
    q0 = np.zeros((Ns[0], Ns[0]), dtype=np.uint8)
    fam = StandardPatternFamily(params, [], [(q0, 1 - q0)])
    for i in range(1, levels + 1):
        r = first_incompressible_matrix(ns[i], params.t(i), params.threshold(i))
        a, b = fam.Q[-1]
        q = substitute(r, a, b)
        fam.R.append(r)
        fam.Q.append((q, 1 - q))
    return fam


def recovery_program(prefix: str, side: int) -> str:
    """Turn a halting program for Q into one for R: drop HALT, append DOWN side, HALT.

    Its length overhead ``4 + len(gamma(side)) + 4 - 4`` is the constant c0.
    """
    if not prefix.endswith("0000"):
        raise ValueError("program must end with HALT")
    return prefix[:-4] + assemble(("DOWN", side), "HALT")


def recovery_overhead(side: int) -> int:
    return len(assemble(("DOWN", side), "HALT")) - 4


def contains_all_2x2_blocks(r: np.ndarray) -> bool:
    seen = {tuple(r[y : y + 2, x : x + 2].ravel()) for y in range(r.shape[0] - 1) for x in range(r.shape[1] - 1)}
    return len(seen) == 16


class IntegrityError(ValueError):
    pass


def block_of(fam: StandardPatternFamily, i: int, ids) -> np.ndarray:
    """2x2 arrangement [[ids0, ids1], [ids2, ids3]] (bottom-left, bottom-right, top-left, top-right)."""
    q = fam.Q[i]
    bl, br, tl, tr = (q[b] for b in ids)
    return np.block([[bl, br], [tl, tr]])


def cut_window(fam: StandardPatternFamily, i: int, offset, ids) -> np.ndarray:
    """N_i x N_i window of the 2x2 block at ``offset = (x, y)`` (array rows are y)."""
    n = fam.Q[i][0].shape[0]
    ox, oy = offset
    if not (0 <= ox <= n and 0 <= oy <= n):
        raise ValueError("offset outside the block")
    return block_of(fam, i, ids)[oy : oy + n, ox : ox + n].copy()


def reconstruct_standard(window: np.ndarray, offset, ids, reference: np.ndarray | None = None) -> np.ndarray:
    """Rebuild Q_i^0 from a window of a 2x2 block of standard patterns.

    Every residue class mod N_i is covered exactly once; the quadrant ids
    say which corners are inverted.  When ``reference`` is given the result
    is checked against it and a mismatch raises :class:`IntegrityError`.
    """
    n = window.shape[0]
    ox, oy = offset
    out = np.empty_like(window)
    for y in range(n):
        for x in range(n):
            bx, by = ox + x, oy + y
            quad = (1 if bx >= n else 0) + (2 if by >= n else 0)
            out[by % n, bx % n] = window[y, x] ^ ids[quad]
    if reference is not None and not np.array_equal(out, reference):
        raise IntegrityError("window inconsistent with the standard pattern")
    return out


def descriptor_bits(n: int) -> int:
    """Side information to regenerate a window: two offsets and four quadrant bits."""
    return 2 * math.ceil(math.log2(n + 1)) + 4


def closure_block_count(fam: StandardPatternFamily, i: int, n: int) -> int:
    """Distinct n x n windows over every offset of every 2x2 block of level-i patterns."""
    seen = set()
    for code in range(16):
        ids = [(code >> k) & 1 for k in range(4)]
        blk = block_of(fam, i, ids)
        m = blk.shape[0]
        for y in range(m - n + 1):
            for x in range(m - n + 1):
                seen.add(np.packbits(blk[y : y + n, x : x + n]).tobytes())
    return len(seen)


def polynomial_envelope(ns, counts) -> tuple[float, float]:
    """Fit count <= A * n^B: B by least squares in log-log, A the smallest constant that covers every point."""
    x = np.log(np.asarray(ns, dtype=float))
    y = np.log(np.asarray(counts, dtype=float))
    B = float(np.polyfit(x, y, 1)[0]) if len(ns) > 1 else 0.0
    A = float(np.max(np.asarray(counts) / np.asarray(ns, dtype=float) ** B))
    return A, B


# --------------------------------------------------------------------------
# Recursive low-complexity coloring
# --------------------------------------------------------------------------


class BorderError(ValueError):
    pass


_COMPLETABLE_CACHE: dict = {}


def _completable(spec, size: int, fixed: dict, budget: int, node_limit: int) -> bool:
    key = (spec, size, frozenset(fixed.items()), budget)
    hit = _COMPLETABLE_CACHE.get(key)
    if hit is not None:
        return hit
    found, exhausted = _search(spec, size, size, fixed, budget, node_limit, lambda g: True)
    if not found and not exhausted:
        raise RuntimeError("node limit exceeded while checking completability")
    if len(_COMPLETABLE_CACHE) > 200_000:
        _COMPLETABLE_CACHE.clear()
    _COMPLETABLE_CACHE[key] = bool(found)
    return bool(found)


def _cross(size: int) -> list[tuple[int, int]]:
    """Middle row left to right, then the middle column bottom to top (centre once)."""
    mid = size // 2
    row = [(x, mid) for x in range(1, size - 1)]
    col = [(mid, y) for y in range(1, size - 1) if y != mid]
    return row + col


def border_cells(size: int) -> list[tuple[int, int]]:
    return [(x, y) for y in range(size) for x in range(size) if x in (0, size - 1) or y in (0, size - 1)]


def recursive_coloring(spec, k: int, border, generator_budget: int = 64, node_limit: int = 2_000_000) -> Pattern:
    """Deterministic (2^k+1)-square coloring from its border.

    At each level the centre cross gets the lexicographically first
    coloring (cell by cell, smallest letter first) that keeps the current
    square completable to a locally admissible square; the four quarter
    squares are then handled recursively from their now complete borders.
    """
    size = (1 << k) + 1
    grid = dict(border.items() if hasattr(border, "items") else border)
    missing = [c for c in border_cells(size) if c not in grid]
    if missing:
        raise BorderError(f"border cells missing: {missing[:4]}")

    def local(x0, y0, s):
        return {(x - x0, y - y0): v for (x, y), v in grid.items() if x0 <= x < x0 + s and y0 <= y < y0 + s}

    if not _completable(spec, size, local(0, 0, size), generator_budget, node_limit):
        raise BorderError("border does not extend to a locally admissible square")

    def fill(x0, y0, s):
        if s <= 2:
            return
        for cx, cy in _cross(s):
            for letter in range(len(spec.alphabet)):
                grid[(x0 + cx, y0 + cy)] = letter
                if _completable(spec, s, local(x0, y0, s), generator_budget, node_limit):
                    break
            else:  # pragma: no cover - completability was established above
                raise BorderError("no completable letter for a cross cell")
        h = s // 2
        for dy in (0, h):
            for dx in (0, h):
                fill(x0 + dx, y0 + dy, h + 1)

    fill(0, 0, size)
    return Pattern(grid)


def covering_squares(k: int, x: int, y: int, n: int) -> tuple[int, list[tuple[int, int]]]:
    """Level j (side 2^j + 1) and corners of the <= 4 standard squares covering an n-window."""
    j = max(0, math.ceil(math.log2(n))) if n > 1 else 0
    j = min(j, k)
    step = 1 << j
    last = (1 << (k - j)) - 1

    def spans(a, b):
        return sorted({min(a // step, last), min(b // step, last)})

    xs, ys = spans(x, x + n - 1), spans(y, y + n - 1)
    return j, [(ax * step, ay * step) for ay in ys for ax in xs]


def rederive_window(spec, coloring: Pattern, k: int, x: int, y: int, n: int, **kw) -> bool:
    """Recompute an n x n sub-square from the borders of its covering standard squares."""
    j, corners = covering_squares(k, x, y, n)
    side = (1 << j) + 1
    rebuilt = {}
    for cx, cy in corners:
        border = {(bx, by): coloring[(cx + bx, cy + by)] for bx, by in border_cells(side)}
        sub = recursive_coloring(spec, j, border, **kw) if j > 0 else Pattern(border)
        for (bx, by), v in sub.items():
            rebuilt[(cx + bx, cy + by)] = v
    return all(rebuilt.get((x + i, y + jj)) == coloring[(x + i, y + jj)] for i in range(n) for jj in range(n))


def domino_shift(k: int, forbidden_pairs, name: str = "dominoes"):
    """SFT over k letters forbidding the given ``(a, b, axis)`` pairs (axis 0: a left of b, 1: a below b)."""
    pats = []
    for a, b, axis in forbidden_pairs:
        second = (1, 0) if axis == 0 else (0, 1)
        pats.append(Pattern({(0, 0): a, second: b}))
    return ShiftSpec(Alphabet.of_size(k) if k != 2 else BW, tuple(pats), name=name)


def checkerboard_shift():
    """Two letters, equal horizontal or vertical neighbours forbidden."""
    return domino_shift(2, [(a, a, ax) for a in (0, 1) for ax in (0, 1)], "checkerboard")


def random_domino_shift(seed: int, k: int = 3, count: int = 4):
    """Seeded k-letter SFT with ``count`` forbidden two-cell patterns; never empty (a letter stays free)."""
    rng = np.random.default_rng(seed)
    pairs = set()
    while len(pairs) < count:
        a, b, ax = (int(v) for v in (rng.integers(k), rng.integers(k), rng.integers(2)))
        if a == b == 0:
            continue  # keep the constant configuration of letter 0 admissible
        pairs.add((a, b, ax))
    return domino_shift(k, sorted(pairs), f"dominoes-{seed}")


def some_border(spec, k: int, seed: int | None = None, generator_budget: int = 64) -> dict:
    """Border of a locally admissible (2^k+1)-square.

    Without a seed this is the first square found by search; with a seed the
    letters are tried in a seeded random order at every cell.
    """
    size = (1 << k) + 1
    found = {}
    fixed = {}
    if seed is not None:
        rng = np.random.default_rng(seed)
        letters = len(spec.alphabet)
        fixed = {(x, y): [int(v) for v in rng.permutation(letters)] for y in range(size) for x in range(size)}

    def keep(g):
        for x, y in border_cells(size):
            found[(x, y)] = int(g[y, x])
        return True

    _search(spec, size, size, fixed, generator_budget, 2_000_000, keep)
    if not found:
        raise BorderError("no admissible square of this size")
    return found
