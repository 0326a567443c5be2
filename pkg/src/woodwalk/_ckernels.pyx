# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled kernels; see _pykernels for the shared contract."""

import numpy as np
cimport numpy as cnp
from libc.stdint cimport uint64_t, int64_t, uint8_t, int32_t

cnp.import_array()

DEF B = 0
DEF R = 1
DEF G = 2


cdef inline int _pair(const uint64_t[::1] bits, int64_t t) nogil:
    return <int>((bits[t >> 5] >> ((t & 31) << 1)) & 3)


cdef inline int _step(int prev, int v) nogil:
    if prev == R:
        return G if v >= 2 else R
    if v < 2:
        return B
    return R if v == 2 else G


def chain_letters(const uint64_t[::1] bits, int start, Py_ssize_t length):
    out = np.empty(length, dtype=np.uint8)
    cdef uint8_t[::1] o = out
    cdef Py_ssize_t t
    cdef int cur = start
    if length == 0:
        return out
    with nogil:
        o[0] = start
        for t in range(1, length):
            cur = _step(cur, _pair(bits, t - 1))
            o[t] = cur
    return out


def rejection_accepts(bits, int n):
    cdef const uint64_t[:, ::1] bb = np.ascontiguousarray(bits, dtype=np.uint64)
    cdef Py_ssize_t trials = bb.shape[0]
    out = np.zeros(trials, dtype=np.uint8)
    cdef uint8_t[::1] o = out
    cdef Py_ssize_t i
    cdef int64_t t, m = 3 * n - 1
    cdef int cur, v
    cdef int64_t L, Rr
    with nogil:
        for i in range(trials):
            cur = G
            L = 0
            Rr = 1
            for t in range(m):
                v = <int>((bb[i, t >> 5] >> ((t & 31) << 1)) & 3)
                cur = _step(cur, v)
                if cur == B:
                    L += 1
                    Rr -= 1
                    if Rr < 0:
                        break
                elif cur == R:
                    L -= 1
                    if L < 0:
                        break
                else:
                    Rr += 1
                # cannot return to the origin in the remaining steps
                if L + 2 * Rr > m - 1 - t:
                    break
            else:
                if L == 0 and Rr == 0:
                    o[i] = 1
    return out


def green_run(const uint64_t[::1] bits, int64_t nsteps, int64_t level, int prev_r, int64_t count):
    cdef int64_t t
    cdef int cur = R if prev_r else B
    cdef int v
    with nogil:
        for t in range(nsteps):
            v = _pair(bits, t)
            cur = _step(cur, v)
            if cur == B:
                level += 1
            elif cur == R:
                level -= 1
                if level < 0:
                    break
            elif level == 0:
                count += 1
    if nsteps and level < 0:
        return int(level), 1, int(count), int(t + 1), True
    return int(level), int(cur == R) if nsteps else prev_r, int(count), int(nsteps), False


def sigma_sequence(X, Y):
    cdef const int64_t[::1] x = np.ascontiguousarray(X, dtype=np.int64)
    cdef const int64_t[::1] y = np.ascontiguousarray(Y, dtype=np.int64)
    cdef Py_ssize_t N = x.shape[0]
    out = [0]
    cdef Py_ssize_t s = 0, j
    cdef bint use_x = True
    cdef int64_t lvl
    while True:
        lvl = x[s] if use_x else y[s]
        j = s + 1
        if use_x:
            while j < N and x[j] >= lvl:
                j += 1
        else:
            while j < N and y[j] >= lvl:
                j += 1
        if j >= N:
            return np.asarray(out, dtype=np.int64)
        out.append(j)
        s = j
        use_x = not use_x


def region_counts(face_edges, edge_faces, flow_ptr, flow_idx, seeds):
    cdef const int64_t[:, ::1] fe = np.ascontiguousarray(face_edges, dtype=np.int64)
    cdef const int64_t[:, ::1] ef = np.ascontiguousarray(edge_faces, dtype=np.int64)
    cdef const int64_t[::1] fp = np.ascontiguousarray(flow_ptr, dtype=np.int64)
    cdef const int64_t[::1] fi = np.ascontiguousarray(flow_idx, dtype=np.int64)
    cdef const int64_t[::1] sd = np.ascontiguousarray(seeds, dtype=np.int64)
    cdef Py_ssize_t nf = fe.shape[0], ne = ef.shape[0]
    cdef Py_ssize_t nv = fp.shape[0] - 1, ns = sd.shape[0]
    out = np.zeros((nv, ns), dtype=np.int64)
    cdef int64_t[:, ::1] o = out
    cdef uint8_t[::1] cut = np.zeros(ne, dtype=np.uint8)
    cdef int64_t[::1] stamp = np.zeros(nf, dtype=np.int64)
    cdef int64_t[::1] stack = np.empty(nf, dtype=np.int64)
    cdef Py_ssize_t k, q, top, c, f, e, g
    cdef int64_t mark = 0, size
    with nogil:
        for k in range(nv):
            for q in range(fp[k], fp[k + 1]):
                cut[fi[q]] = 1
            for q in range(ns):
                mark += 1
                top = 0
                stack[top] = sd[q]
                top += 1
                stamp[sd[q]] = mark
                size = 0
                while top:
                    top -= 1
                    f = stack[top]
                    size += 1
                    for c in range(fe.shape[1]):
                        e = fe[f, c]
                        if e < 0 or cut[e]:
                            continue
                        g = ef[e, 0] if ef[e, 0] != f else ef[e, 1]
                        if stamp[g] != mark:
                            stamp[g] = mark
                            stack[top] = g
                            top += 1
                o[k, q] = size
            for q in range(fp[k], fp[k + 1]):
                cut[fi[q]] = 0
    return out


cdef inline int _sgn(int64_t v) nogil:
    return (v > 0) - (v < 0)


cdef inline int _orient(int64_t ax, int64_t ay, int64_t bx, int64_t by,
                        int64_t cx, int64_t cy) nogil:
    return _sgn((bx - ax) * (cy - ay) - (by - ay) * (cx - ax))


cdef inline bint _on_seg(int64_t ax, int64_t ay, int64_t bx, int64_t by,
                         int64_t px, int64_t py) nogil:
    return (min(ax, bx) <= px <= max(ax, bx)) and (min(ay, by) <= py <= max(ay, by))


def segment_violations(points, segs):
    cdef const int64_t[:, ::1] P = np.ascontiguousarray(points, dtype=np.int64)
    cdef const int64_t[:, ::1] S = np.ascontiguousarray(segs, dtype=np.int64)
    cdef Py_ssize_t E = S.shape[0], i, j
    cdef int64_t u, v, p, q, ax, ay, bx, by, cx, cy, dx, dy
    cdef int64_t sx, sy, tx, ty, ox, oy
    cdef int d1, d2, d3, d4
    cdef bint hit
    cdef int64_t count = 0
    cdef Py_ssize_t fi = -1, fj = -1
    with nogil:
        for i in range(E - 1):
            u = S[i, 0]
            v = S[i, 1]
            ax = P[u, 0]
            ay = P[u, 1]
            bx = P[v, 0]
            by = P[v, 1]
            for j in range(i + 1, E):
                p = S[j, 0]
                q = S[j, 1]
                cx = P[p, 0]
                cy = P[p, 1]
                dx = P[q, 0]
                dy = P[q, 1]
                if p == u or p == v or q == u or q == v:
                    if p == u or p == v:
                        ox = dx
                        oy = dy
                    else:
                        ox = cx
                        oy = cy
                    if p == u or q == u:
                        sx = ax
                        sy = ay
                        tx = bx
                        ty = by
                    else:
                        sx = bx
                        sy = by
                        tx = ax
                        ty = ay
                    hit = ((p == u and q == v) or (p == v and q == u)
                           or (_orient(sx, sy, tx, ty, ox, oy) == 0
                               and (tx - sx) * (ox - sx) + (ty - sy) * (oy - sy) > 0))
                else:
                    d1 = _orient(ax, ay, bx, by, cx, cy)
                    d2 = _orient(ax, ay, bx, by, dx, dy)
                    d3 = _orient(cx, cy, dx, dy, ax, ay)
                    d4 = _orient(cx, cy, dx, dy, bx, by)
                    hit = ((d1 * d2 < 0 and d3 * d4 < 0)
                           or (d1 == 0 and _on_seg(ax, ay, bx, by, cx, cy))
                           or (d2 == 0 and _on_seg(ax, ay, bx, by, dx, dy))
                           or (d3 == 0 and _on_seg(cx, cy, dx, dy, ax, ay))
                           or (d4 == 0 and _on_seg(cx, cy, dx, dy, bx, by)))
                if hit:
                    if count == 0:
                        fi = i
                        fj = j
                    count += 1
    return int(count), int(fi), int(fj)
