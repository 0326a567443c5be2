"""Compiled kernels against the numpy fallback.

    python3 benchmarks/bench_kernels.py [--repeat 5] [--n 300]

Prints one line per kernel: best wall time for each backend and the speedup.
Outputs of the two backends are compared before timing.
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from woodwalk import _pykernels
from woodwalk.codec import decode
from woodwalk.embed import _flow_csr, face_structure, schnyder_embedding
from woodwalk.sampling import dp_sample

try:
    from woodwalk import _ckernels
except ImportError:  # fallback-only build
    _ckernels = None


def _best(fn, repeat):
    out, best = None, float("inf")
    for _ in range(repeat):
        t = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t)
    return best, out


def _same(a, b):
    if isinstance(a, tuple):
        return all(_same(x, y) for x, y in zip(a, b))
    return np.array_equal(np.asarray(a), np.asarray(b))


def cases(n: int, seed: int):
    rng = np.random.default_rng(seed)
    bits = rng.integers(0, 2 ** 63, size=1 << 15, dtype=np.uint64)
    trials = rng.integers(0, 2 ** 63, size=(1 << 16, 1), dtype=np.uint64)
    walk = np.cumsum(rng.choice([-1, 0, 1], size=(2, 1 << 18)), axis=1)
    s = decode(dp_sample(n, seed))
    fs = face_structure(s)
    ptr, idx = _flow_csr(s, s.inner_vertices)
    seeds = np.array([fs.seeds[c] for c in "brg"], dtype=np.int64)
    E = schnyder_embedding(s, validate=False)
    verts = s.vertices
    index = {v: k for k, v in enumerate(verts)}
    pts = np.array([E.point(v) for v in verts], dtype=np.int64)
    segs = np.array([(index[e.tail], index[e.head]) for e in s.edges], dtype=np.int64)
    return {
        "chain_letters": lambda k: k.chain_letters(bits, 0, 32 * len(bits)),
        "rejection_accepts(n=10)": lambda k: k.rejection_accepts(trials, 10),
        "green_run": lambda k: k.green_run(bits, 32 * len(bits) - 1, 1 << 40, 0, 0),
        "sigma_sequence": lambda k: k.sigma_sequence(walk[0], walk[1]),
        f"region_counts(n={n})": lambda k: k.region_counts(fs.face_edges, fs.edge_faces,
                                                          ptr, idx, seeds),
        f"segment_violations(n={n})": lambda k: k.segment_violations(pts, segs),
    }


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--n", type=int, default=300, help="map size for the geometric kernels")
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)
    if _ckernels is None:
        print("compiled kernels not built; nothing to compare")
        return 1
    print(f"{'kernel':32s} {'python':>10s} {'cython':>10s} {'speedup':>8s}")
    for name, fn in cases(args.n, args.seed).items():
        tp, op = _best(lambda: fn(_pykernels), args.repeat)
        tc, oc = _best(lambda: fn(_ckernels), args.repeat)
        if not _same(op, oc):
            print(f"{name:32s} OUTPUT MISMATCH")
            return 1
        print(f"{name:32s} {tp * 1e3:9.2f}ms {tc * 1e3:9.2f}ms {tp / tc:7.1f}x")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
