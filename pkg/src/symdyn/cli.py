"""Command-line front end.

Every command prints (or writes with ``--out``) a JSON report carrying the
package version, the seed and the backend.  Reports are byte-identical for
identical arguments; wall-clock timing is added only with ``--timing``.
The default node limit of the bounded searches comes from the environment
variable ``SYMDYN_NODE_LIMIT``.
"""

from __future__ import annotations

import json
import os
import sys
import time
from fractions import Fraction
from pathlib import Path

import click
import numpy as np

from . import __version__
from ._jit import backend

NODE_LIMIT_ENV = "SYMDYN_NODE_LIMIT"


def default_node_limit() -> int:
    raw = os.environ.get(NODE_LIMIT_ENV, "")
    try:
        v = int(raw) if raw else 2_000_000
    except ValueError as exc:
        raise click.UsageError(f"{NODE_LIMIT_ENV} must be an integer, got {raw!r}") from exc
    if v <= 0:
        raise click.UsageError(f"{NODE_LIMIT_ENV} must be positive")
    return v


def _jsonable(v):
    if isinstance(v, dict):
        return {str(k): _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple, set, frozenset)):
        items = [_jsonable(x) for x in v]
        return sorted(items, key=repr) if isinstance(v, (set, frozenset)) else items
    if isinstance(v, Fraction):
        return str(v)
    if isinstance(v, np.integer):
        return int(v)
    if isinstance(v, np.ndarray):
        return v.tolist()
    return v


class Report:
    def __init__(self, ctx: click.Context, command: str, seed: int | None = None):
        self.ctx = ctx
        self.command = command
        self.seed = seed
        self.t0 = time.perf_counter()

    def emit(self, result: dict, out: str | None = None, ok: bool = True) -> None:
        body = {"command": self.command, "version": __version__, "backend": backend(), "seed": self.seed, "ok": ok, "result": _jsonable(result)}
        if self.ctx.obj.get("timing"):
            body["elapsed_s"] = round(time.perf_counter() - self.t0, 6)
        text = json.dumps(body, sort_keys=True, indent=2)
        if out:
            Path(out).write_text(text + "\n")
        else:
            click.echo(text)
        if not ok:
            self.ctx.exit(1)


def _read_json(path: str):
    try:
        return json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise click.BadParameter(f"cannot read JSON from {path}: {exc}") from exc


class _Main(click.Group):
    """Turns errors raised while decoding user input into a one-line message."""

    def invoke(self, ctx):
        try:
            return super().invoke(ctx)
        except (IndexError, KeyError, TypeError, ValueError) as exc:
            raise click.ClickException(f"malformed input: {type(exc).__name__}: {exc}") from exc


@click.group(cls=_Main)
@click.version_option(__version__, prog_name="symdyn")
@click.option("--timing", is_flag=True, help="Add wall-clock time to reports.")
@click.pass_context
def main(ctx, timing):
    """Workbench for two-dimensional symbolic dynamics."""
    ctx.ensure_object(dict)
    ctx.obj["timing"] = timing


# --------------------------------------------------------------------------
# core
# --------------------------------------------------------------------------

def _builtin_shift(name: str):
    from . import core, epitomes, sofic1d

    table = {
        "full": lambda: core.full_shift(2, 2),
        "full1d": lambda: core.full_shift(2, 1),
        "s1": lambda: core.s1_shift(1),
        "s2": lambda: core.s2_shift(1),
        "s1-2d": lambda: core.s1_shift(2),
        "rectangle": core.rectangle_shift,
        "mirror": epitomes.mirror_shift,
        "semi-mirror": epitomes.semi_mirror_shift,
        "km": epitomes.km_shift,
        "mirror1d": sofic1d.mirror1d_shift,
    }
    if name not in table:
        raise click.BadParameter(f"unknown shift {name!r}; choose from {', '.join(sorted(table))}")
    return table[name]()


def _load_shift(spec_path: str | None, builtin: str | None):
    from .core import ShiftSpec

    if spec_path:
        return ShiftSpec.from_json(_read_json(spec_path))
    if builtin:
        return _builtin_shift(builtin)
    raise click.UsageError("give a shift JSON file or --builtin NAME")


@main.group()
def core():
    """Shifts, patterns and admissibility."""


@core.command("check")
@click.argument("spec_path", required=False)
@click.option("--builtin")
@click.option("--pattern", "pattern_path", required=True, help="Pattern JSON: list of [x, y, letter].")
@click.option("--margin", type=int, default=0, show_default=True)
@click.pass_context
def core_check(ctx, spec_path, builtin, pattern_path, margin):
    """Local admissibility (and admissibility with a margin)."""
    from .core import INCONCLUSIVE, Pattern, admissible_with_margin, locally_admissible

    rep = Report(ctx, "core check")
    spec = _load_shift(spec_path, builtin)
    try:
        p = Pattern.from_json(_read_json(pattern_path), spec.alphabet)
    except (ValueError, TypeError) as exc:
        raise click.BadParameter(f"malformed pattern: {exc}; letters are {', '.join(spec.alphabet.names)}") from exc
    res = {"locally_admissible": locally_admissible(p, spec)}
    if margin:
        v = admissible_with_margin(p, spec, margin, node_limit=default_node_limit())
        res["margin"] = margin
        res["extends"] = "inconclusive" if v is INCONCLUSIVE else bool(v)
    rep.emit(res)


@core.command("count")
@click.argument("spec_path", required=False)
@click.option("--builtin")
@click.option("--n", type=int, required=True)
@click.option("--margin", type=int, default=1, show_default=True)
@click.pass_context
def core_count(ctx, spec_path, builtin, n, margin):
    """Block complexity with a bounded extension margin."""
    from .core import block_complexity

    rep = Report(ctx, "core count")
    spec = _load_shift(spec_path, builtin)
    c = block_complexity(spec, n, margin, node_limit=default_node_limit())
    rep.emit({"n": n, "margin": margin, "low": c.low, "high": c.high, "exact": c.exact})


# --------------------------------------------------------------------------
# wang
# --------------------------------------------------------------------------

@main.group()
def wang():
    """Wang tilesets and tiling search."""


def _load_tileset(path: str | None, builtin: str | None):
    from .wang import WangTileSet, checkerboard_tiles

    if path:
        return WangTileSet.from_json(_read_json(path))
    if builtin == "checkerboard":
        return checkerboard_tiles()
    raise click.UsageError("give a tileset JSON file or --builtin checkerboard")


def _tileset_args(fn):
    fn = click.option("--h", "height", type=int, required=True)(fn)
    fn = click.option("--w", "width", type=int, required=True)(fn)
    fn = click.option("--builtin")(fn)
    return click.argument("tileset_path", required=False)(fn)


@wang.command("count")
@_tileset_args
@click.pass_context
def wang_count(ctx, tileset_path, builtin, width, height):
    """Count tilings of a rectangle."""
    from .wang import SearchLimit, count_tilings

    rep = Report(ctx, "wang count")
    ts = _load_tileset(tileset_path, builtin)
    try:
        n = count_tilings(ts, width, height, node_limit=default_node_limit())
    except SearchLimit as exc:
        rep.emit({"error": str(exc)}, ok=False)
        return
    rep.emit({"tiles": len(ts), "width": width, "height": height, "tilings": n})


@wang.command("solve")
@_tileset_args
@click.option("--svg", type=click.Path(dir_okay=False), help="Write the tiling as SVG.")
@click.pass_context
def wang_solve(ctx, tileset_path, builtin, width, height, svg):
    """Lexicographically first tiling of a rectangle."""
    from .wang import SearchLimit, first_tiling, render_svg

    rep = Report(ctx, "wang solve")
    ts = _load_tileset(tileset_path, builtin)
    try:
        grid = first_tiling(ts, width, height, node_limit=default_node_limit())
    except SearchLimit as exc:
        rep.emit({"error": str(exc)}, ok=False)
        return
    if svg and grid is not None:
        Path(svg).write_text(render_svg(ts, grid))
    rep.emit({"width": width, "height": height, "tiling": None if grid is None else grid.tolist()})


@wang.command("convert")
@click.argument("path", required=False)
@click.option("--builtin", help="Builtin shift name (SFT to tiles direction).")
@click.option("--to-sft", is_flag=True, help="Read a tileset and emit the nearest-neighbour SFT instead.")
@click.option("--out", type=click.Path(dir_okay=False))
@click.pass_context
def wang_convert(ctx, path, builtin, to_sft, out):
    """Convert between explicit SFTs and Wang tilesets."""
    from .wang import EmptyShift, WangTileSet, sft_to_wang, wang_to_sft

    rep = Report(ctx, "wang convert")
    if to_sft:
        if not path:
            raise click.UsageError("--to-sft needs a tileset JSON file")
        spec = wang_to_sft(WangTileSet.from_json(_read_json(path)))
        body = spec.to_json()
        if out:
            Path(out).write_text(json.dumps(body, sort_keys=True))
        rep.emit({"forbidden": len(spec.forbidden), "written": out})
        return
    spec = _load_shift(path, builtin)
    if not spec.is_explicit:
        raise click.BadParameter(f"{spec.name or 'this shift'} has no finite forbidden list to convert")
    try:
        ts, _ = sft_to_wang(spec)
    except EmptyShift as exc:
        rep.emit({"empty": True, "reason": str(exc)})
        return
    if out:
        Path(out).write_text(json.dumps(ts.to_json(), sort_keys=True))
    rep.emit({"tiles": len(ts), "colors": len(ts.colors), "written": out})


# --------------------------------------------------------------------------
# compile
# --------------------------------------------------------------------------

WINDOW_LIST_LIMIT = 20_000  # larger forbidden sets are reported by count only

_MACHINES = {
    "tm": ("increment", "unary", "noop", "random"),
    "twohead": ("copy", "stationary"),
    "nca": ("xor", "identity", "full-choice", "random"),
}


def _machine(kind: str, name: str, seed: int):
    from . import compile as cp

    rng = np.random.default_rng(seed)
    table = {
        ("tm", "increment"): cp.increment_tm,
        ("tm", "unary"): cp.unary_successor_tm,
        ("tm", "noop"): cp.noop_tm,
        ("tm", "random"): lambda: cp.random_tm(rng),
        ("twohead", "copy"): lambda: cp.copy_twohead(3),
        ("twohead", "stationary"): cp.stationary_twohead,
        ("nca", "xor"): cp.xor_nca,
        ("nca", "identity"): lambda: cp.identity_nca(2),
        ("nca", "full-choice"): cp.full_choice_nca,
        ("nca", "random"): lambda: cp.random_nca(rng),
    }
    return table[(kind, name)](), rng


def _parse_row(kind: str, spec, row_json: str) -> list:
    """Decode ``--row`` and check its shape against the machine."""
    try:
        raw = json.loads(row_json)
    except json.JSONDecodeError as exc:
        raise click.BadParameter(f"--row is not JSON: {exc}") from exc
    if not isinstance(raw, list) or not raw:
        raise click.BadParameter("--row must be a non-empty JSON list")
    if kind == "nca":
        if not all(isinstance(v, int) and 0 <= v < spec.size for v in raw):
            raise click.BadParameter(f"--row cells must be integers in [0, {spec.size})")
        return raw
    width = 2 if kind == "tm" else 6
    if not all(isinstance(v, list) and len(v) == width for v in raw):
        hint = '[symbol, state or null], e.g. [["0", "q0"], ["1", null]]' if kind == "tm" else "rows built like twohead_row"
        raise click.BadParameter(f"--row cells must be lists of length {width}: {hint}")
    if kind == "tm":
        if any(v[0] not in spec.symbols for v in raw):
            raise click.BadParameter(f"--row symbols must come from {list(spec.symbols)}")
        if sum(v[1] is not None for v in raw) != 1:
            raise click.BadParameter("--row needs exactly one cell carrying the head state")
    return [tuple(v) for v in raw]


def _compile_command(kind: str):
    @click.argument("machine_path", required=False)
    @click.option("--machine", type=click.Choice(_MACHINES[kind]), help="Builtin machine.")
    @click.option("--row", "row_json", help="Input row as JSON; runs and verifies a diagram.")
    @click.option("--steps", type=int, default=4, show_default=True)
    @click.option("--seed", type=int, default=0, show_default=True)
    @click.option("--out", type=click.Path(dir_okay=False), help="Write the compiled window shift as JSON.")
    @click.option("--ppm", type=click.Path(dir_okay=False), help="Write the diagram as PPM.")
    @click.pass_context
    def command(ctx, machine_path, machine, row_json, steps, seed, out, ppm):
        from . import compile as cp

        rep = Report(ctx, f"compile {kind}", seed)
        if machine_path:
            spec, rng = cp.spec_from_json(_read_json(machine_path)), np.random.default_rng(seed)
        elif machine:
            spec, rng = _machine(kind, machine, seed)
        else:
            raise click.UsageError("give a machine JSON file or --machine NAME")
        compiled = cp.compile_spec(spec)
        res = {"letters": len(compiled.letters), "window": [3, 2], "forbidden_windows": compiled.forbidden_count()}
        if out:
            n = compiled.forbidden_count()
            listed = n <= WINDOW_LIST_LIMIT
            body = {
                "letters": _jsonable(compiled.letters),
                "window": [3, 2],
                "forbidden_count": n,
                "forbidden": [p.to_json() for p in compiled.forbidden_windows().take(n)] if listed else None,
            }
            Path(out).write_text(json.dumps(body, sort_keys=True))
            res["written"] = out
        row = None
        if row_json:
            row = _parse_row(kind, spec, row_json)
        elif isinstance(spec, cp.NCASpec):
            row = [int(v) for v in rng.integers(0, spec.size, 5)]
        elif isinstance(spec, cp.TMSpec):
            row = cp.tm_row(["0", "1", "1", "0", "0"], 1, spec.start)
        if row is not None:
            try:
                d = cp.simulate(spec, row, steps)
            except cp.BoundaryError as exc:
                rep.emit({**res, "error": str(exc)}, ok=False)
                return
            if ppm:
                Path(ppm).write_text(cp.render_ppm(d))
            res.update({"verified": cp.verify_spacetime(d, compiled), "diagram": d.to_json()})
        rep.emit(res)

    label = {"tm": "a Turing machine", "twohead": "a two-head Turing machine", "nca": "a nondeterministic CA"}[kind]
    command.__doc__ = f"Compile {label} to a 3x2-window shift (and run it on a row)."
    return command


@main.group("compile")
def compile_():
    """Compile machines to 3x2-window shifts."""


for _kind in _MACHINES:
    compile_.command(_kind)(_compile_command(_kind))


# --------------------------------------------------------------------------
# ncavm
# --------------------------------------------------------------------------

@main.group()
def ncavm():
    """The marked-tape virtual machine."""


@ncavm.command("search")
@click.option("--query", required=True, help="Bit string to look up.")
@click.option("--lists", "lists_json", required=True, help='JSON list of lists of bit strings, e.g. \'[["01","10"],["11"]]\'.')
@click.option("--trace", "show_trace", is_flag=True, help="Include the step-by-step tape trace.")
@click.pass_context
def ncavm_search(ctx, query, lists_json, show_trace):
    """Prefix search in a list of lists; compares with the linear-scan oracle."""
    from .ncavm import LIST_SEARCH_C, dump_trace, list_search, list_search_oracle

    rep = Report(ctx, "ncavm search")
    lists = json.loads(lists_json)
    got, states = list_search(query, lists, trace=True)
    want = list_search_oracle(query, lists)
    res = {"kind": got.kind, "found": got.found, "reason": got.reason, "steps": got.steps, "bound": LIST_SEARCH_C * len(query), "oracle_agrees": (got.kind, got.found) == (want.kind, want.found)}
    if show_trace:
        res["trace"] = dump_trace(states).split("\n")
    rep.emit(res)


@ncavm.command("run")
@click.argument("layout_path")
@click.pass_context
def ncavm_run(ctx, layout_path):
    """Mark-initialization sweep over a field layout.

    The layout is a JSON list of ``{"name", "side", "elements", "is_list"}``.
    """
    from .ncavm import FieldSpec, init_marks, marks_by_name

    rep = Report(ctx, "ncavm run")
    fields = [FieldSpec(f["name"], f.get("side"), tuple(f.get("elements", ())), bool(f.get("is_list", False))) for f in _read_json(layout_path)]
    vm = init_marks(fields)
    rep.emit({"steps": vm.steps, "error": vm.error, "marks": dict(sorted(marks_by_name(vm).items()))}, ok=not vm.error)


@ncavm.command("marks")
@click.pass_context
def ncavm_marks(ctx):
    """List the mark catalog."""
    from .ncavm import mark_catalog

    rep = Report(ctx, "ncavm marks")
    cat = mark_catalog()
    rep.emit({"count": len(cat), "marks": cat})


# --------------------------------------------------------------------------
# flow
# --------------------------------------------------------------------------

@main.group()
def flow():
    """Super-tile flow graphs."""


@flow.command("random")
@click.option("--n", type=int, default=4, show_default=True)
@click.option("--rho", type=int, default=2, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--out", type=click.Path(dir_okay=False))
@click.pass_context
def flow_random(ctx, n, rho, seed, out):
    """A seeded random valid graph."""
    from .flow import random_valid_graph

    rep = Report(ctx, "flow random", seed)
    g = random_valid_graph(n, rho, seed)
    if out:
        Path(out).write_text(g.to_json())
    rep.emit({"graph": json.loads(g.to_json()), "F": g.F})


def _load_graph(rep, graph_path):
    from .flow import SuperTileFlowGraph, validate

    g = SuperTileFlowGraph.from_json(json.dumps(_read_json(graph_path)))
    rep.seed = g.seed
    v = validate(g)
    if not v.ok:
        rep.emit({"valid": False, "violations": list(v.violations)}, ok=False)
    return g


@flow.command("solve")
@click.argument("graph_path")
@click.option("--out", type=click.Path(dir_okay=False), help="Write the path/cycle decomposition here.")
@click.pass_context
def flow_solve(ctx, graph_path, out):
    """Maximum flow value, the cut check and (with --out) the decomposition."""
    from .flow import decompose, max_flow, min_cut_check

    rep = Report(ctx, "flow solve")
    g = _load_graph(rep, graph_path)
    f = max_flow(g)
    cut = min_cut_check(g)
    if out:
        dec = decompose(g, f)
        Path(out).write_text(json.dumps({"paths": [list(p) for p in dec.paths], "cycles": [list(c) for c in dec.cycles]}, sort_keys=True))
    rep.emit({"decomposition": out, "valid": True, "F": g.F, "value": f.value(g), "arcs": sorted([u, v, c] for (u, v), c in f.values.items()), "min_cut": {"value": cut.value, "source_cut": cut.source_cut, "sink_cut": cut.sink_cut, "exhaustive_min": cut.exhaustive_min}})


@flow.command("decompose")
@click.argument("graph_path")
@click.option("--out", type=click.Path(dir_okay=False), help="Write the decomposition here.")
@click.pass_context
def flow_decompose(ctx, graph_path, out):
    """Elementary paths and cycles of a maximum flow."""
    from .flow import decompose, max_flow

    rep = Report(ctx, "flow decompose")
    g = _load_graph(rep, graph_path)
    f = max_flow(g)
    dec = decompose(g, f)
    body = {"paths": [list(p) for p in dec.paths], "cycles": [list(c) for c in dec.cycles]}
    if out:
        Path(out).write_text(json.dumps(body, sort_keys=True))
    exact = dict(dec.reconstruct()) == {a: v for a, v in f.values.items() if v}
    rep.emit({"F": g.F, "paths": len(dec.paths), "cycles": len(dec.cycles), "reconstructs": exact, "decomposition": out or body})


@flow.command("route")
@click.argument("graph_path")
@click.pass_context
def flow_route(ctx, graph_path):
    """Per-cell arrow tables routing each produced unit to a sink slot."""
    from .flow import route_points

    rep = Report(ctx, "flow route")
    g = _load_graph(rep, graph_path)
    r = route_points(g.n, g.rho, g.sources, list(g.sinks))
    rep.emit({"paths": [list(map(list, p)) for p in r.paths], "tables": {f"{x},{y}": v for (x, y), v in sorted(r.tables.items())}})


# --------------------------------------------------------------------------
# epitomes
# --------------------------------------------------------------------------

@main.group()
def epi():
    """Epitome counting, chains and enforcers."""


def _family(family: str, n: int):
    from . import epitomes as ep

    if family == "km":
        return ep.km_epitome(n), [ep.simple_pattern(p) for p in ep.profiles(n)]
    if family == "mirror":
        return ep.mirror_epitome(n), list(ep.bw_patterns(n))
    return ep.semi_mirror_epitome(n), list(ep.bw_patterns(n))


_FAMILY = click.option("--family", type=click.Choice(["km", "mirror", "semi-mirror"]), required=True)


@epi.command("count")
@_FAMILY
@click.option("--n", type=int, required=True)
@click.pass_context
def epi_count(ctx, family, n):
    """Number of distinct epitome values on n x n patterns."""
    from .epitomes import count_values

    rep = Report(ctx, "epi count")
    fam, pats = _family(family, n)
    rep.emit({"family": family, "n": n, "values": count_values(fam, pats)})


@epi.command("chain")
@_FAMILY
@click.option("--n", type=int, required=True)
@click.pass_context
def epi_chain(ctx, family, n):
    """Maximal-first chain of representatives, one per value."""
    from .epitomes import chain_from_epitomes, chain_is_ordered

    rep = Report(ctx, "epi chain")
    fam, pats = _family(family, n)
    chain = chain_from_epitomes(fam, pats)
    rep.emit({"family": family, "n": n, "length": len(chain), "ordered": chain_is_ordered(fam, chain), "chain": [p.to_json() for p in chain]})


@epi.command("enforce")
@click.option("--family", type=click.Choice(["km", "mirror"]), required=True)
@click.option("--profile", help="Comma-separated row profile (km).")
@click.option("--pattern", "pattern_path", help="Pattern JSON (mirror), letters white/black.")
@click.option("--svg", type=click.Path(dir_okay=False))
@click.pass_context
def epi_enforce(ctx, family, profile, pattern_path, svg):
    """Exterior pattern enforcing a value."""
    from . import epitomes as ep
    from .core import BWR, Pattern

    rep = Report(ctx, "epi enforce")
    if family == "km":
        if not profile:
            raise click.UsageError("--profile is required for km")
        p = ep.simple_pattern([int(v) for v in profile.split(",")])
        r = ep.km_enforcer(p)
        check = {"hidden_square_free": ep.hidden_square_free(p.union(r))}
    else:
        if not pattern_path:
            raise click.UsageError("--pattern is required for mirror")
        p = Pattern.from_json(_read_json(pattern_path), BWR)
        r = ep.mirror_enforcer(p)
        check = {"admissible": ep.mirror_admissible(p.union(r))}
    if svg:
        Path(svg).write_text(ep.render_svg(p.union(r)))
    rep.emit({"family": family, "enforcer": r.to_json(BWR), **check})


# --------------------------------------------------------------------------
# Kolmogorov hierarchy
# --------------------------------------------------------------------------

@main.group()
def kolm():
    """Resource-bounded complexity on the toy decompressor."""


@kolm.command("k")
@click.argument("bits")
@click.option("--t", "budget", type=int, default=2048, show_default=True)
@click.option("--max-len", type=int, default=16, show_default=True)
@click.pass_context
def kolm_k(ctx, bits, budget, max_len):
    """Exact time-bounded complexity of a bit string."""
    from .hierarchy import Exceeds, shortest_program, time_bounded_K

    rep = Report(ctx, "kolm k")
    if set(bits) - {"0", "1"}:
        raise click.BadParameter("BITS must be a 0/1 string")
    k = time_bounded_K(bits, budget, max_len)
    if isinstance(k, Exceeds):
        rep.emit({"x": bits, "t": budget, "K": None, "exceeds": max_len})
    else:
        rep.emit({"x": bits, "t": budget, "K": k, "program": shortest_program(bits, budget, max_len)})


@kolm.command("first-r")
@click.option("--n", type=int, required=True)
@click.option("--t", "budget", type=int, default=2048, show_default=True)
@click.option("--theta", type=int)
@click.pass_context
def kolm_first_r(ctx, n, budget, theta):
    """Lexicographically first matrix of complexity at least theta."""
    from .hierarchy import first_incompressible_matrix

    rep = Report(ctx, "kolm first-r")
    r = first_incompressible_matrix(n, budget, theta)
    rep.emit({"n": n, "t": budget, "theta": n * n if theta is None else theta, "R": r.tolist()})


@kolm.command("family")
@click.option("--levels", type=int, default=1, show_default=True)
@click.pass_context
def kolm_family(ctx, levels):
    """Build the standard-pattern family with the desk parameters."""
    from .hierarchy import DESK, build_family

    rep = Report(ctx, "kolm family")
    fam = build_family(DESK, levels)
    ns, Ns = DESK.sides(levels)
    rep.emit({"n": ns, "N": Ns, "R": [r.tolist() for r in fam.R], "Q_sides": [int(q[0].shape[0]) for q in fam.Q]})


@kolm.command("color")
@click.option("--shift", "name", type=click.Choice(["checkerboard", "random"]), default="checkerboard", show_default=True)
@click.option("--k", type=int, default=2, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.pass_context
def kolm_color(ctx, name, k, seed):
    """Recursive lexicographically-first coloring of a (2^k+1)-square."""
    from .hierarchy import checkerboard_shift, random_domino_shift, recursive_coloring, some_border

    rep = Report(ctx, "kolm color", seed)
    spec = checkerboard_shift() if name == "checkerboard" else random_domino_shift(seed)
    border = some_border(spec, k, seed)
    p = recursive_coloring(spec, k, border, node_limit=default_node_limit())
    rep.emit({"shift": name, "k": k, "coloring": p.to_array().tolist()})


@kolm.command("bb")
@click.option("--m", type=int, required=True)
@click.pass_context
def kolm_bb(ctx, m):
    """Slowest halting program shorter than m bits."""
    from .hierarchy import busy_beaver_program, run

    rep = Report(ctx, "kolm bb")
    p = busy_beaver_program(m)
    res = {"m": m, "program": p}
    if p is not None:
        r = run(p)
        res.update({"steps": r.steps, "output": r.output})
    rep.emit(res)


# --------------------------------------------------------------------------
# sparse
# --------------------------------------------------------------------------

@main.group()
def sparse():
    """Density-bounded configurations and their field hierarchy."""


def _spec_from(cfg: dict):
    from .sparse import DensitySpec

    return DensitySpec.from_json(cfg["spec"]) if "spec" in cfg else DensitySpec()


@sparse.command("random")
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--out", type=click.Path(dir_okay=False))
@click.pass_context
def sparse_random(ctx, seed, out):
    """A seeded density-admissible configuration (JSON with spec and config)."""
    from .sparse import DensitySpec, random_config

    rep = Report(ctx, "sparse random", seed)
    spec = DensitySpec()
    cfg = random_config(seed, spec)
    body = {"seed": seed, "spec": spec.to_json(), "config": json.loads(cfg.to_json())}
    if out:
        Path(out).write_text(json.dumps(body, sort_keys=True))
    rep.emit(body)


@sparse.command("synth")
@click.argument("config_path")
@click.option("--levels", type=int, default=2, show_default=True)
@click.option("--out", type=click.Path(dir_okay=False), help="Write the assembly dump here.")
@click.pass_context
def sparse_synth(ctx, config_path, levels, out):
    """Synthesize the fields of every level and verify them."""
    from .sparse import ConstructionError, SparseConfig, pair_enumerator, synthesize_fields, verify_hierarchy

    data = _read_json(config_path)
    rep = Report(ctx, "sparse synth", data.get("seed"))
    spec = _spec_from(data)
    cfg = SparseConfig.from_json(json.dumps(data["config"]))
    try:
        h = synthesize_fields(cfg, spec, levels)
    except ConstructionError as exc:
        rep.emit({"error": str(exc)}, ok=False)
        return
    reports = verify_hierarchy(h, pair_enumerator())
    if out:
        Path(out).write_text(h.to_json())
    ok = all(r.ok for r in reports)
    rep.emit({"levels": levels, "verify": [r.summary() for r in reports], "dump": out}, ok=ok)


@sparse.command("verify")
@click.argument("hierarchy_path")
@click.pass_context
def sparse_verify(ctx, hierarchy_path):
    """Verify a dumped hierarchy."""
    from .sparse import Hierarchy, pair_enumerator, verify_hierarchy

    rep = Report(ctx, "sparse verify")
    h = Hierarchy.from_json(Path(hierarchy_path).read_text())
    reports = verify_hierarchy(h, pair_enumerator())
    rep.emit({"verify": [r.summary() for r in reports]}, ok=all(r.ok for r in reports))


@sparse.command("check")
@click.option("--C", "C", type=int, default=128, show_default=True)
@click.pass_context
def sparse_check(ctx, C):
    """Parameter inequalities for the exponent constant C."""
    from .sparse import DensitySpec, parameter_check

    rep = Report(ctx, "sparse check")
    r = parameter_check(DensitySpec(C=C))
    rep.emit({"C": C, "ok": r.ok, "first_failure": r.first_failure, "rows": r.rows})


# --------------------------------------------------------------------------
# fixpoint
# --------------------------------------------------------------------------

@main.group()
def fix():
    """Tileset simulating another tileset with zoom N."""


def _rho(name_or_path: str):
    from .fixpoint import one_tile_rho, two_tile_rho
    from .wang import WangTileSet

    if name_or_path == "one":
        return one_tile_rho()
    if name_or_path == "two":
        return two_tile_rho()
    return WangTileSet.from_json(_read_json(name_or_path))


_geom_options = [
    click.option("--rho", "rho_name", default="one", show_default=True, help="one | two | tileset JSON"),
    click.option("--N", "N", type=int, help="Zoom; default: smallest override geometry."),
    click.option("--q", type=int, help="Super-color width override (default N/16)."),
    click.option("--hU", "hU", type=int, help="Checker rows override (default q)."),
]


def geom_options(fn):
    for opt in reversed(_geom_options):
        fn = opt(fn)
    return fn


def _simulate(ctx, rep, rho_name, N, q, hU):
    from .fixpoint import SizingError, simulate_tileset

    try:
        return simulate_tileset(_rho(rho_name), N=N, q=q, hU=hU)
    except SizingError as exc:
        rep.emit({"sizing_error": str(exc)}, ok=False)


@fix.command("gen")
@geom_options
@click.option("--out", type=click.Path(dir_okay=False), help="Write the tileset JSON here.")
@click.pass_context
def fix_gen(ctx, rho_name, N, q, hU, out):
    """Generate the simulating tileset."""
    rep = Report(ctx, "fix gen")
    sim = _simulate(ctx, rep, rho_name, N, q, hU)
    g = sim.geom
    if out:
        Path(out).write_text(json.dumps(sim.tileset.to_json()))
    rep.emit({"N": g.N, "q": g.q, "qp": g.qp, "k": g.k, "hU": g.hU, "default_ratios": g.in_default_regime(), "tiles": len(sim.tileset), "colors": len(sim.tileset.colors), "tiles_per_cell": len(sim.tileset) / g.N**2, "written": out})


@fix.command("verify")
@geom_options
@click.pass_context
def fix_verify(ctx, rho_name, N, q, hU):
    """Certify every reference super-tile by exhaustive bordered search."""
    from .fixpoint import assemble, certify, phi, verify_supertile

    rep = Report(ctx, "fix verify")
    sim = _simulate(ctx, rep, rho_name, N, q, hU)
    rows = []
    for t in range(len(sim.rho.tiles)):
        ref = assemble(sim, t)
        count, same = certify(sim, t)
        rows.append({"tile": t, "verify_supertile": verify_supertile(sim, ref)[0], "fillings": count, "equals_reference": same, "phi": phi(sim, ref)})
    ok = all(r["fillings"] == 1 and r["equals_reference"] and r["verify_supertile"] and r["phi"] == r["tile"] for r in rows)
    rep.emit({"N": sim.N, "tiles": len(sim.tileset), "supertiles": rows}, ok=ok)


@fix.command("roles")
@geom_options
@click.option("--svg", type=click.Path(dir_okay=False), help="Write the role map as SVG.")
@click.option("--text", "as_text", is_flag=True, help="Include the role map as text.")
@click.pass_context
def fix_roles(ctx, rho_name, N, q, hU, svg, as_text):
    """Role counts of the geometry (and the role map)."""
    from collections import Counter

    from .fixpoint import render_roles_svg, role_map, roles_text

    rep = Report(ctx, "fix roles")
    sim = _simulate(ctx, rep, rho_name, N, q, hU)
    g = sim.geom
    counts = Counter(r.kind for r in role_map(g).values())
    if svg:
        Path(svg).write_text(render_roles_svg(g))
    body = {"N": g.N, "q": g.q, "counts": dict(sorted(counts.items()))}
    if as_text:
        body["map"] = roles_text(g).split("\n")
    rep.emit(body)


# --------------------------------------------------------------------------
# sofic1d
# --------------------------------------------------------------------------

@main.group()
def sofic1d():
    """One-dimensional follower sets."""


@sofic1d.command("classes")
@click.option("--shift", "name", type=click.Choice(["full1d", "s1", "s2", "mirror1d"]), required=True)
@click.option("--L", "L", type=int, default=5, show_default=True)
@click.option("--d", type=int, default=3, show_default=True)
@click.pass_context
def sofic1d_classes(ctx, name, L, d):
    """Follower-set classes and their stabilization across depths."""
    from .sofic1d import follower_classes, stabilization

    rep = Report(ctx, "sofic1d classes")
    spec = _builtin_shift(name)
    table = follower_classes(spec, L, d)
    counts, stable = stabilization(spec, L, d)
    rep.emit({"shift": name, "L": L, "d": d, "classes": table.count, "representatives": [list(w) for w in table.representatives()], "depth_counts": counts, "stable": stable})


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
