"""The compiled kernels and the numpy fallback must agree exactly."""

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from woodwalk import _pykernels as py
from woodwalk import kernels

ck = pytest.importorskip("woodwalk._ckernels")

words64 = st.lists(st.integers(0, 2 ** 64 - 1), min_size=1, max_size=40).map(
    lambda xs: np.array(xs, dtype=np.uint64))


def same(a, b):
    if isinstance(a, tuple):
        return len(a) == len(b) and all(same(x, y) for x, y in zip(a, b))
    return np.array_equal(np.asarray(a), np.asarray(b))


def test_backend_selected():
    assert kernels.BACKEND == "cython"


@given(words64, st.integers(0, 2), st.integers(0, 64))
def test_chain_letters(bits, start, extra):
    length = min(32 * len(bits), extra + 1)
    a = py.chain_letters(bits, start, length)
    b = ck.chain_letters(bits, start, length)
    assert same(a, b)
    s = "".join("brg"[c] for c in a)
    assert "rb" not in s


@given(st.integers(1, 12), st.integers(1, 50), st.integers(0, 2 ** 32))
def test_rejection_accepts(n, trials, seed):
    wpt = (2 * (3 * n - 1) + 63) // 64
    bits = np.random.default_rng(seed).integers(0, 2 ** 63, size=(trials, wpt), dtype=np.uint64)
    assert same(py.rejection_accepts(bits, n), ck.rejection_accepts(bits, n))


def test_rejection_accepts_counts_Wn():
    # n=1: every 2-letter continuation of g, and exactly "br" lands in W_1
    bits = np.arange(16, dtype=np.uint64).reshape(16, 1)
    acc = ck.rejection_accepts(bits, 1)
    assert same(acc, py.rejection_accepts(bits, 1))
    letters = ["g" + "".join("brg"[c] for c in py.chain_letters(b, 2, 3)[1:]) for b in bits]
    assert [w == "gbr" for w in letters] == [bool(x) for x in acc]


@given(words64, st.integers(0, 6), st.integers(0, 1), st.integers(0, 5))
def test_green_run(bits, level, prev_r, count):
    n = 32 * len(bits) - 1
    assert same(py.green_run(bits, n, level, prev_r, count),
                ck.green_run(bits, n, level, prev_r, count))


walks = st.lists(st.tuples(st.integers(-2, 1), st.integers(-1, 1)), max_size=300).map(
    lambda xs: np.vstack([[0, 0], np.cumsum(np.array(xs, dtype=np.int64).reshape(-1, 2), axis=0)]))


@given(walks)
def test_sigma_sequence(P):
    x, y = np.ascontiguousarray(P[:, 0]), np.ascontiguousarray(P[:, 1])
    assert same(py.sigma_sequence(x, y), ck.sigma_sequence(x, y))


@given(st.integers(1, 60), st.integers(0, 10 ** 6))
def test_region_counts(n, seed):
    from woodwalk.codec import decode
    from woodwalk.embed import _flow_csr, face_structure
    from woodwalk.sampling import dp_sample

    s = decode(dp_sample(n, seed))
    fs = face_structure(s)
    ptr, idx = _flow_csr(s, s.inner_vertices)
    seeds = np.array([fs.seeds[c] for c in "brg"], dtype=np.int64)
    args = (fs.face_edges, fs.edge_faces, ptr, idx, seeds)
    assert same(py.region_counts(*args), ck.region_counts(*args))


@given(st.integers(2, 9), st.integers(1, 14), st.integers(0, 2 ** 32))
def test_segment_violations(nv, ne, seed):
    rng = np.random.default_rng(seed)
    pts = rng.integers(0, 4, size=(nv, 2)).astype(np.int64)
    segs = np.array([rng.choice(nv, 2, replace=False) for _ in range(ne)], dtype=np.int64)
    assert same(py.segment_violations(pts, segs), ck.segment_violations(pts, segs))


def test_segment_cases():
    pts = np.array([[0, 0], [2, 2], [0, 2], [2, 0], [1, 1], [4, 4]], dtype=np.int64)
    for k in (py, ck):
        assert k.segment_violations(pts, np.array([[0, 1], [2, 3]]))[0] == 1  # X crossing
        assert k.segment_violations(pts, np.array([[0, 1], [1, 3]]))[0] == 0  # shared end
        assert k.segment_violations(pts, np.array([[0, 1], [0, 5]]))[0] == 1  # overlap at a shared end
        assert k.segment_violations(pts, np.array([[0, 1], [4, 2]]))[0] == 1  # T junction
        assert k.segment_violations(pts, np.array([[0, 2], [1, 3]]))[0] == 0


def test_fallback_selected_by_env():
    import os
    import subprocess
    import sys

    env = dict(os.environ, WOODWALK_PURE_PYTHON="1")
    out = subprocess.run([sys.executable, "-c",
                          "from woodwalk import kernels, sampling;"
                          "print(kernels.BACKEND, sampling.dp_sample(30, 1).letters)"],
                         env=env, capture_output=True, text=True, check=True).stdout.split()
    from woodwalk.sampling import dp_sample

    assert out == ["python", dp_sample(30, 1).letters]
