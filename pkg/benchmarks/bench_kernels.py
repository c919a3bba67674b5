#!/usr/bin/env python3
"""Compare the numba kernels against the pure-numpy fallback.

Usage:
    python benchmarks/bench_kernels.py [--frames 30] [--width-mb 40] [--height-mb 30] [--repeat 3]

Builds one epoch of the synthetic H.264 workload (GOP = frames, so a single
graph) and times each kernel with both implementations. JIT compilation is
excluded by a warm-up call. Results from the two paths are compared too.
"""

import argparse
import time

import numpy as np

from epgimpact.graph import DEFAULT_CHUNK
from epgimpact.h264 import build_epgs
from epgimpact.kernels import jit, numpy_impl
from epgimpact.tracegen import GenParams, generate_trace


def exact(impl, g):
    n = g.node_count
    out = np.zeros(n)
    for c0 in range(0, n, DEFAULT_CHUNK):
        impl.closure_chunk(g.indptr, g.indices, g.weights, c0, min(n, c0 + DEFAULT_CHUNK), True, out)
    return out


def fast(impl, g):
    return impl.fast_bound(g.indptr, g.indices, g.weights)


def sweep(impl, g):
    n = g.node_count
    out = np.zeros(n)
    for s0 in range(0, n, DEFAULT_CHUNK):
        impl.worst_sweep_batch(g.in_indptr, g.in_indices, g.weights, s0, min(n, s0 + DEFAULT_CHUNK), out)
    return out


def prob(impl, g):
    draws = np.random.Generator(np.random.PCG64(0)).random(g.edge_count)
    return impl.propagate(g.in_indptr, g.in_indices, 0, 0.5, draws)


def best_of(fn, repeat):
    best = float("inf")
    result = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        result = fn()
        best = min(best, time.perf_counter() - t0)
    return best, result


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--frames", type=int, default=30)
    ap.add_argument("--width-mb", type=int, default=40)
    ap.add_argument("--height-mb", type=int, default=30)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()

    params = GenParams(frames=args.frames, width_mb=args.width_mb, height_mb=args.height_mb, gop_length=args.frames)
    (g, _), = build_epgs(generate_trace(params), backend="fast")
    print(f"graph: {g.node_count} nodes, {g.edge_count} edges")

    tiny = build_epgs(generate_trace(GenParams(frames=2, width_mb=2, height_mb=2, gop_length=2)), backend="fast")
    (small, _), = tiny
    for kernel in (exact, fast, sweep, prob):
        kernel(jit, small)

    print(f"{'kernel':<8}{'numba [s]':>12}{'numpy [s]':>12}{'speedup':>10}  agree")
    for kernel in (exact, fast, sweep, prob):
        t_jit, r_jit = best_of(lambda: kernel(jit, g), args.repeat)
        t_np, r_np = best_of(lambda: kernel(numpy_impl, g), args.repeat)
        agree = np.allclose(r_jit, r_np, rtol=1e-12) if r_jit.dtype != bool else np.array_equal(r_jit, r_np)
        print(f"{kernel.__name__:<8}{t_jit:>12.4f}{t_np:>12.4f}{t_np / t_jit:>9.1f}x  {agree}")


if __name__ == "__main__":
    main()
