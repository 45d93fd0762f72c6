"""Time the compiled and pure-Python fixpoint sweeps on the same pebble instances.

The table building step is shared Python code and is reported once.

    python benchmarks/bench_kernels.py [--repeat 3]
"""

import argparse
import random
import time

from array import array

from pebblelog import _kernels
from pebblelog.pebble import _build
from pebblelog.structures import clique, cycle, digraph


def instances(seed=7):
    rng = random.Random(seed)
    edges = {(x, y) for x in range(1, 9) for y in range(1, 9) if x != y and rng.random() < 0.3}
    yield "C7 vs K2 (2,3)", cycle(7, symmetric=True), clique(2), 2, 3
    yield "K4 vs K3 (2,3)", clique(4), clique(3), 2, 3
    yield "random 8-vertex vs K3 (2,3)", digraph(8, edges), clique(3), 2, 3
    yield "C9 vs K2 (3,4)", cycle(9, symmetric=True), clique(2), 3, 4
    yield "C11 vs K3 (2,3)", cycle(11), clique(3), 2, 3
    yield "K5 vs K4 (3,4)", clique(5), clique(4), 3, 4


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t)
    return min(times), out


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    kernels = [("python", _kernels.python_sweep_fixpoint)]
    if _kernels.compiled_sweep_fixpoint is not None:
        kernels.append(("cython", _kernels.compiled_sweep_fixpoint))
    else:
        print("compiled kernel not built; timing the Python kernel only")
    print(f"{'instance':28} {'maps':>7} {'build s':>8} {'kernel':8} {'sweep ms':>9} {'alive':>6}")
    for name, a, b, l, k in instances():
        t = time.perf_counter()
        maps, *csr = _build(a, b, l, k, None)
        build = time.perf_counter() - t
        order = array("i", range(len(maps)))
        alive_counts = set()
        for kname, kern in kernels:

            def sweep():
                alive = bytearray(b"\x01" * len(maps))
                kern(alive, *csr, order)
                return sum(alive)

            secs, alive = best_of(sweep, args.repeat)
            alive_counts.add(alive)
            print(f"{name:28} {len(maps):7d} {build:8.3f} {kname:8} {secs * 1e3:9.3f} {alive:6d}")
        assert len(alive_counts) == 1, "kernels disagree"

if __name__ == "__main__":
    main()
