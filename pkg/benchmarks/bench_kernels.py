"""Times the BFS kernels (closeness stats + Brandes accumulation) under the
compiled and pure-Python backends on SBM graphs of growing size.

Run: python3 benchmarks/bench_kernels.py [--sizes 500,1000,2000] [--degree 10]
"""

import argparse
import time

import numpy as np

from gck._kernels import pure
from gck.synth import sbm_graph

try:
    from gck._kernels import _ckern
except ImportError:
    _ckern = None


def time_backend(impl, indptr, indices, sources, repeat=3):
    best = {}
    for name in ("closeness_stats", "brandes_partial"):
        fn = getattr(impl, name)
        runs = []
        for _ in range(repeat):
            t0 = time.perf_counter()
            fn(indptr, indices, sources)
            runs.append(time.perf_counter() - t0)
        best[name] = min(runs)
    return best


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--sizes", default="500,1000,2000")
    ap.add_argument("--degree", type=float, default=10.0, help="target mean degree")
    ap.add_argument("--max-sources", type=int, default=256)
    args = ap.parse_args()
    sizes = [int(s) for s in args.sizes.split(",")]

    print(f"{'nodes':>7} {'edges':>8} {'kernel':<16} {'python':>10} {'compiled':>10} {'speedup':>8}")
    for n in sizes:
        blocks = [n // 4] * 4
        p_in = args.degree / (2 * (n // 4))
        g, _ = sbm_graph(blocks, p_in=p_in, p_out=p_in / 10, seed=1)
        indptr, indices = g.to_csr()
        sources = np.arange(min(n, args.max_sources), dtype=np.int64)
        py = time_backend(pure, indptr, indices, sources, repeat=1)
        cy = time_backend(_ckern, indptr, indices, sources) if _ckern else None
        for name in ("closeness_stats", "brandes_partial"):
            pt = py[name]
            if cy:
                ct = cy[name]
                print(f"{n:>7} {g.edge_count():>8} {name:<16} {pt:>9.4f}s {ct:>9.4f}s {pt / ct:>7.1f}x")
            else:
                print(f"{n:>7} {g.edge_count():>8} {name:<16} {pt:>9.4f}s {'n/a':>10} {'':>8}")


if __name__ == "__main__":
    main()
