"""Pure-numpy kernels.  Same signatures and bit-for-bit the same results as
the compiled module ``_ckernels``.

Letter codes are b=0, r=1, g=2.  A chain transition consumes two bits of a
uint64 buffer, little end first: from b or g the pair value 0/1 gives b, 2
gives r, 3 gives g; from r the high bit alone decides (0 -> r, 1 -> g).
"""

from __future__ import annotations

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

B, R, G = 0, 1, 2


def _pairs(bits: np.ndarray, m: int, offset: int = 0) -> np.ndarray:
    t = np.arange(offset, offset + m, dtype=np.int64)
    words = bits[t >> 5]
    return ((words >> ((t & 31) << 1).astype(np.uint64)) & np.uint64(3)).astype(np.int8)


def _letters_from_pairs(v: np.ndarray, start_is_r: np.ndarray) -> np.ndarray:
    """Letters produced by pair values ``v`` (..., m) from the given start states.

    A pair 3 always lands on g (state resets to not-r); a pair 2 toggles the
    r state; pairs 0/1 keep it.  So the state after a step is the parity of
    2-pairs since the last 3-pair, xor the start state if there was none.
    """
    m = v.shape[-1]
    reset = v == 3
    flip = (v == 2).astype(np.int64)
    cf = np.cumsum(flip, axis=-1)
    pos = np.where(reset, np.arange(m), -1)
    last = np.maximum.accumulate(pos, axis=-1)
    base = np.take_along_axis(cf, np.maximum(last, 0), axis=-1)
    base = np.where(last >= 0, base, 0)
    par = ((cf - base) & 1).astype(bool)
    init = np.broadcast_to(np.asarray(start_is_r, dtype=bool)[..., None], par.shape)
    after = np.where(last >= 0, par, par ^ init)
    before = np.concatenate([init[..., :1], after[..., :-1]], axis=-1)
    hi = v >= 2
    in_r = np.where(hi, G, R)
    not_r = np.where(hi, np.where(v == 2, R, G), B)
    return np.where(before, in_r, not_r).astype(np.uint8)


def chain_letters(bits: np.ndarray, start: int, length: int) -> np.ndarray:
    out = np.empty(length, dtype=np.uint8)
    if length == 0:
        return out
    out[0] = start
    if length > 1:
        v = _pairs(bits, length - 1)
        out[1:] = _letters_from_pairs(v, np.bool_(start == R))
    return out


def rejection_accepts(bits: np.ndarray, n: int) -> np.ndarray:
    """Accept flags for trials, one row of ``bits`` per trial; w_1 = g."""
    bits = np.ascontiguousarray(bits, dtype=np.uint64)
    trials = bits.shape[0]
    m = 3 * n - 1
    out = np.zeros(trials, dtype=np.uint8)
    chunk = max(1, (1 << 22) // max(m, 1))
    t = np.arange(m, dtype=np.int64)
    shifts = ((t & 31) << 1).astype(np.uint64)
    for a in range(0, trials, chunk):
        blk = bits[a:a + chunk]
        v = ((blk[:, t >> 5] >> shifts) & np.uint64(3)).astype(np.int8)
        lt = _letters_from_pairs(v, np.zeros(blk.shape[0], dtype=bool))
        dl = np.where(lt == B, 1, np.where(lt == R, -1, 0)).astype(np.int16)
        dr = np.where(lt == B, -1, np.where(lt == G, 1, 0)).astype(np.int16)
        L = np.cumsum(dl, axis=1)
        Rw = 1 + np.cumsum(dr, axis=1)
        ok = (L.min(axis=1) >= 0) & (Rw.min(axis=1) >= 0) & (L[:, -1] == 0) & (Rw[:, -1] == 0)
        out[a:a + chunk] = ok
    return out


def green_run(bits: np.ndarray, nsteps: int, level: int, prev_r: int, count: int):
    """Continue a green-in-degree walk after a b.

    ``level`` is L minus its value at the anchor b.  Returns
    ``(level, prev_r, count, steps_used, done)``; done means L went below the
    anchor level, after which no more green edges can arrive.
    """
    start = R if prev_r else B
    lt = chain_letters(bits, start, nsteps + 1)[1:]
    dl = np.where(lt == B, 1, np.where(lt == R, -1, 0)).astype(np.int64)
    L = level + np.cumsum(dl)
    below = np.flatnonzero(L < 0)
    stop = int(below[0]) if below.size else nsteps
    seg_l = L[:stop]
    seg = lt[:stop]
    # running min >= 0 holds on seg because we stop at the first drop
    count += int(np.count_nonzero((seg == G) & (seg_l == 0)))
    if below.size:
        return int(L[stop]), 1, count, stop + 1, True
    return int(L[-1]) if nsteps else level, int(lt[-1] == R) if nsteps else prev_r, count, nsteps, False


def sigma_sequence(X: np.ndarray, Y: np.ndarray) -> np.ndarray:
    """Alternating strict first-passage times below the previous value.

    sigma_0 = 0; odd sigma uses the first coordinate, even sigma the second.
    Stops at the first sigma that is not reached inside the arrays.
    """
    X = np.asarray(X, dtype=np.int64)
    Y = np.asarray(Y, dtype=np.int64)
    N = X.shape[0]
    out = [0]
    s = 0
    use_x = True
    chunk = 256
    while True:
        arr = X if use_x else Y
        lvl = arr[s]
        j = s + 1
        found = -1
        c = chunk
        while j < N:
            seg = arr[j:j + c]
            hit = np.flatnonzero(seg < lvl)
            if hit.size:
                found = j + int(hit[0])
                break
            j += c
            c = min(c * 2, 1 << 20)
        if found < 0:
            return np.asarray(out, dtype=np.int64)
        out.append(found)
        s = found
        use_x = not use_x


def region_counts(face_edges: np.ndarray, edge_faces: np.ndarray, flow_ptr: np.ndarray,
                  flow_idx: np.ndarray, seeds: np.ndarray) -> np.ndarray:
    """Face counts of the regions containing each seed face, per vertex.

    ``edge_faces[e]`` lists the two inner faces across inner edge ``e``; the
    flow-line edges of vertex ``k`` are ``flow_idx[flow_ptr[k]:flow_ptr[k+1]]``
    and are cut before flooding.
    """
    nf = face_edges.shape[0]
    ne = edge_faces.shape[0]
    nv = flow_ptr.shape[0] - 1
    out = np.zeros((nv, seeds.shape[0]), dtype=np.int64)
    a = edge_faces[:, 0]
    b = edge_faces[:, 1]
    for k in range(nv):
        keep = np.ones(ne, dtype=bool)
        keep[flow_idx[flow_ptr[k]:flow_ptr[k + 1]]] = False
        g = coo_matrix((np.ones(int(keep.sum()), dtype=np.int8), (a[keep], b[keep])), shape=(nf, nf))
        _, lab = connected_components(g, directed=False)
        sizes = np.bincount(lab, minlength=nf)
        out[k] = sizes[lab[seeds]]
    return out


def _orient(ax, ay, bx, by, cx, cy):
    return np.sign((bx - ax) * (cy - ay) - (by - ay) * (cx - ax))


def _on_seg(ax, ay, bx, by, px, py):
    # p collinear with ab: is p within the closed bounding box
    return ((np.minimum(ax, bx) <= px) & (px <= np.maximum(ax, bx))
            & (np.minimum(ay, by) <= py) & (py <= np.maximum(ay, by)))


def segment_violations(points: np.ndarray, segs: np.ndarray):
    """Count segment pairs meeting anywhere except at a shared endpoint.

    Returns ``(count, first_i, first_j)`` with -1 indices if none.
    """
    P = np.asarray(points, dtype=np.int64)
    S = np.asarray(segs, dtype=np.int64)
    E = S.shape[0]
    count = 0
    first = (-1, -1)
    for i in range(E - 1):
        u, v = S[i]
        j = np.arange(i + 1, E)
        p, q = S[j, 0], S[j, 1]
        ax, ay = P[u]
        bx, by = P[v]
        cx, cy = P[p, 0], P[p, 1]
        dx, dy = P[q, 0], P[q, 1]
        shared = (p == u) | (p == v) | (q == u) | (q == v)
        d1 = _orient(ax, ay, bx, by, cx, cy)
        d2 = _orient(ax, ay, bx, by, dx, dy)
        d3 = _orient(cx, cy, dx, dy, ax, ay)
        d4 = _orient(cx, cy, dx, dy, bx, by)
        proper = (d1 * d2 < 0) & (d3 * d4 < 0)
        touch = (((d1 == 0) & _on_seg(ax, ay, bx, by, cx, cy))
                 | ((d2 == 0) & _on_seg(ax, ay, bx, by, dx, dy))
                 | ((d3 == 0) & _on_seg(cx, cy, dx, dy, ax, ay))
                 | ((d4 == 0) & _on_seg(cx, cy, dx, dy, bx, by)))
        hit_free = ~shared & (proper | touch)
        # sharing an endpoint: only a collinear overlap counts
        same = np.where(p == u, 0, np.where(p == v, 1, np.where(q == u, 2, 3)))
        ox = np.where((same == 0) | (same == 1), dx, cx)
        oy = np.where((same == 0) | (same == 1), dy, cy)
        sx = np.where((same == 0) | (same == 2), ax, bx)
        sy = np.where((same == 0) | (same == 2), ay, by)
        tx = np.where((same == 0) | (same == 2), bx, ax)
        ty = np.where((same == 0) | (same == 2), by, ay)
        col = _orient(sx, sy, tx, ty, ox, oy) == 0
        dot = (tx - sx) * (ox - sx) + (ty - sy) * (oy - sy)
        both = ((p == u) & (q == v)) | ((p == v) & (q == u))
        hit_shared = shared & ((col & (dot > 0)) | both)
        hit = hit_free | hit_shared
        c = int(np.count_nonzero(hit))
        if c and count == 0:
            first = (i, int(j[np.argmax(hit)]))
        count += c
    return count, first[0], first[1]
