"""Compare the numba kernels against the pure-numpy fallback.

Each workload runs in a fresh interpreter, once with numba and once with
``SYMDYN_NO_NUMBA=1``.  The first call is a warm-up (it also triggers or
loads the numba compilation) and is not timed.  Both backends must return
the same result; the script exits non-zero otherwise.

    python3 benchmarks/bench_kernels.py            # all workloads
    python3 benchmarks/bench_kernels.py --only flow --repeat 5
"""

from __future__ import annotations

import argparse
import itertools
import json
import os
import subprocess
import sys
import time


def _wang():
    from symdyn.wang import WangTileSet, count_tilings

    tiles = [q for q in itertools.product(range(2), repeat=4) if sum(q) % 2 == 0]
    ts = WangTileSet.from_labels(tiles)
    return lambda: count_tilings(ts, 3, 4)


def _flow():
    from symdyn.flow import max_flow, random_valid_graph

    graphs = [random_valid_graph(8, 4, seed) for seed in range(40)]
    return lambda: [max_flow(g).value(g) for g in graphs]


def _kolm():
    from symdyn.hierarchy import time_bounded_K

    targets = ["0110", "0000000011", "10101010", "111000111"]
    return lambda: [str(time_bounded_K(x, 500, 13)) for x in targets]


def _interpreter():
    from symdyn.hierarchy import assemble, run

    prog = assemble(("ZEROS", 63), "EMIT1", ("SCALE", 8), "HALT")
    return lambda: [run(prog, 9216).output.count("1") for _ in range(20)]


WORKLOADS = {
    "wang": ("count parity-tile tilings of a 3x4 rectangle", _wang),
    "flow": ("max flow on 40 random 8x8 graphs, rho=4", _flow),
    "kolm": ("time-bounded complexity of 4 strings, programs up to 13 bits", _kolm),
    "interpreter": ("20 decompressor runs producing a 64x64 scaled matrix", _interpreter),
}


def worker(name: str, repeat: int) -> None:
    from symdyn._jit import backend

    fn = WORKLOADS[name][1]()
    result = fn()
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    print(json.dumps({"backend": backend(), "seconds": best, "result": result}))


def measure(name: str, repeat: int, no_numba: bool) -> dict:
    env = dict(os.environ)
    env.pop("SYMDYN_NO_NUMBA", None)
    if no_numba:
        env["SYMDYN_NO_NUMBA"] = "1"
    out = subprocess.run(
        [sys.executable, __file__, "--worker", name, "--repeat", str(repeat)],
        env=env,
        check=True,
        capture_output=True,
        text=True,
    )
    return json.loads(out.stdout.strip().splitlines()[-1])


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__.split("\n")[0])
    ap.add_argument("--only", choices=sorted(WORKLOADS), action="append")
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--worker", help=argparse.SUPPRESS)
    args = ap.parse_args()
    if args.worker:
        worker(args.worker, args.repeat)
        return 0
    mismatched = False
    print(f"{'workload':<12} {'numba s':>10} {'numpy s':>10} {'speedup':>9}  description")
    for name in args.only or WORKLOADS:
        fast = measure(name, args.repeat, no_numba=False)
        slow = measure(name, args.repeat, no_numba=True)
        same = fast["result"] == slow["result"]
        mismatched |= not same
        speedup = slow["seconds"] / fast["seconds"] if fast["seconds"] > 0 else float("inf")
        flag = "" if same else "  RESULTS DIFFER"
        print(f"{name:<12} {fast['seconds']:>10.4f} {slow['seconds']:>10.4f} {speedup:>8.1f}x  {WORKLOADS[name][0]}{flag}")
    return 1 if mismatched else 0


if __name__ == "__main__":
    sys.exit(main())
