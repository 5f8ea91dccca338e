"""The numba kernels and the plain-numpy fallback must agree bit for bit."""

import json
import os
import subprocess
import sys

from symdyn._jit import backend

WORKLOAD = r'''
import itertools, json, random
from symdyn.flow import max_flow, random_valid_graph
from symdyn.hierarchy import assemble, busy_beaver_program, first_incompressible_matrix, run, shortest_program, time_bounded_K
from symdyn.wang import WangTileSet, count_tilings, first_tiling

rng = random.Random(1)
programs = ["".join(rng.choice("01") for _ in range(rng.randint(0, 40))) for _ in range(400)]
programs += ["0100000100101010110000", "0011000000101110000"]
ops = [("EMIT0",), ("EMIT1",), ("LIT", "0110101"), ("ZEROS", 300), ("ONES", 257), ("COPY", 5, 3), ("INVERT", 4),
       ("DOUBLE",), ("REVERSE",), ("SCALE", 4), ("DOWN", 4), ("XORSHIFT", 3), ("APPENDINV",), ("MIRROR",),
       ("PERIOD", 700), ("TRANSPOSE", 8), ("CLEAR",), ("ROTATE", 11)]
for _ in range(300):
    body = [("ONES", rng.randint(1, 40)), ("ZEROS", rng.randint(1, 40))] + [rng.choice(ops) for _ in range(rng.randint(1, 6))]
    programs.append(assemble(*body, "HALT"))
out = {
    "runs": [[r.status, r.output, r.steps] for r in (run(p, 3000) for p in programs)],
    "K": [str(time_bounded_K(x, 300, 12)) for x in ("", "0", "0110", "00000000", "1011001")],
    "shortest": shortest_program("0110", 300, 17),
    "first": first_incompressible_matrix(3, 100, 12).tolist(),
    "bb": busy_beaver_program(8),
    "flow": [max_flow(random_valid_graph(n, r, s)).values.__repr__() for n, r, s in [(3, 2, 1), (5, 3, 2), (6, 4, 3)]],
}
tiles = [q for q in itertools.product(range(2), repeat=4) if sum(q) % 2 == 0]
ts = WangTileSet.from_labels(tiles)
out["tilings"] = count_tilings(ts, 2, 3)
out["first_tiling"] = first_tiling(ts, 3, 2).tolist()
print(json.dumps(out, sort_keys=True))
'''


def run_workload(no_numba):
    env = dict(os.environ)
    env.pop("SYMDYN_NO_NUMBA", None)
    if no_numba:
        env["SYMDYN_NO_NUMBA"] = "1"
    res = subprocess.run([sys.executable, "-c", WORKLOAD], env=env, capture_output=True, text=True, check=True, timeout=600)
    return json.loads(res.stdout)


def test_fallback_matches_compiled_kernels():
    fast, slow = run_workload(False), run_workload(True)
    for key in fast:
        assert fast[key] == slow[key], key


def test_backend_name():
    assert backend() in ("numba", "numpy")
