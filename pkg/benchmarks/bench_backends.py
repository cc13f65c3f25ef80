"""Benchmark the compiled kernels against the pure-Python fallback.

Usage: python3 benchmarks/bench_backends.py
"""

import time

import numpy as np

from lampwalk import _core_py
from lampwalk.cli import resolve_graph
from lampwalk.graphs import ball, kernel

try:
    from lampwalk import _core

    impls = [("compiled", _core), ("pure", _core_py)]
except ImportError:
    print("compiled extension not available; benchmarking pure only")
    impls = [("pure", _core_py)]


def path_sum_inputs(spec, root_label, n):
    g = resolve_graph(spec)
    root = g.id_of(root_label)
    B = ball(g, root, n // 2)
    k = kernel(g)
    pos = {v: i for i, v in enumerate(B)}
    indptr, nbr, probs = [0], [], []
    for v in B:
        for u in k.neighbors(v):
            j = pos.get(u)
            if j is not None:
                nbr.append(j)
                probs.append(k.p(v, u))
        indptr.append(len(nbr))
    inv_m_pow = np.array([2.0 ** -j for j in range(len(B) + 1)])
    return (0, n, np.array(indptr, dtype=np.int64),
            np.array(nbr, dtype=np.int64), np.array(probs), inv_m_pow)


def lamp_apply_inputs(width):
    # Walker on a line segment, dense lamp amplitudes over the segment.
    g = resolve_graph("line")
    root = g.id_of(0)
    k = kernel(g)
    sites = [g.id_of(lab) for lab in range(width)]
    pos = {s: i for i, s in enumerate(sites)}
    nv, m = len(sites), 2
    stride = np.array([m**i for i in range(nv)], dtype=np.int64)
    indptr, nbr, wts = [0], [], []
    for s in sites:
        for u in k.neighbors(s):
            j = pos.get(u)
            if j is not None:
                nbr.append(j)
                wts.append(k.p(s, u) / (m * m))
        indptr.append(len(nbr))
    rng = np.random.default_rng(0)
    codes = np.arange(2**nv, dtype=np.int64)
    keys = np.sort(codes * nv + pos[root])
    amps = rng.standard_normal(len(keys))
    return (keys, amps, nv, m, np.array(indptr, dtype=np.int64),
            np.array(nbr, dtype=np.int64), np.array(wts), stride)


def run(label, fn, args, repeat=3):
    best = float("inf")
    result = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        result = fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best, result


def main():
    print(f"{'kernel':<34}" + "".join(f"{name:>12}" for name, _ in impls))

    # Balls must stay within 64 vertices (compiled visited-set bitmask).
    for spec, root, n in [("grid:3x3", (1, 1), 10), ("z2", (0, 0), 10),
                          ("grid:4x4", (1, 1), 12)]:
        args = path_sum_inputs(spec, root, n)
        times, vals = [], []
        for _, mod in impls:
            t, v = run(spec, mod.path_sum_float, args)
            times.append(t)
            vals.append(v)
        assert all(v == vals[0] for v in vals), "backend mismatch"
        row = f"path_sum {spec} n={n}"
        print(f"{row:<34}" + "".join(f"{t * 1e3:>10.1f}ms" for t in times))

    for width in (12, 14, 16):
        args = lamp_apply_inputs(width)
        times, vals = [], []
        for _, mod in impls:
            t, v = run(f"apply {width}", mod.lamp_apply, args)
            times.append(t)
            vals.append(v)
        k0, a0 = vals[0]
        for kk, aa in vals[1:]:
            assert np.array_equal(kk, k0) and np.array_equal(aa, a0)
        row = f"lamp_apply window={width} sites"
        print(f"{row:<34}" + "".join(f"{t * 1e3:>10.1f}ms" for t in times))


if __name__ == "__main__":
    main()
