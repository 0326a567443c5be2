"""Grouped-step walks, their left/right excursion decomposition, and the
word-level flow-line bookkeeping the decomposition mirrors.

Indices follow the word: ``forward_grouped(w, T)`` looks at the letters
after ``T``; ``reverse_grouped`` at those before.  A finite W_n word may use
``T = 0``, the empty prefix.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import kernels
from .rng import SeedSpec, as_seedspec, raw_bits
from .words import Word, as_word

_DL = np.array([1, -1, 0], dtype=np.int64)
_DR = np.array([-1, 0, 1], dtype=np.int64)


class AnchorError(ValueError):
    pass


NONE = -(1 << 62)  # missing index; window indices can be negative


def _codes(w: Word) -> np.ndarray:
    lut = np.zeros(256, dtype=np.uint8)
    lut[ord("r")] = 1
    lut[ord("g")] = 2
    return lut[np.frombuffer(w.letters.encode("ascii"), dtype=np.uint8)]


def _prefix_walk(codes: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """L, R after each position, with a leading zero for the empty prefix."""
    L = np.concatenate([[0], np.cumsum(_DL[codes])])
    R = np.concatenate([[0], np.cumsum(_DR[codes])])
    return L, R


@dataclass(frozen=True)
class GroupedWalk:
    """Points of a grouped-step walk and the word positions they sit at.

    ``points[k]`` is the walk at ``tau[k]`` minus the walk at ``tau[0]``;
    for reverse walks the two coordinates are (R, L) rather than (L, R).
    """

    points: np.ndarray
    tau: np.ndarray
    anchor: int
    reverse: bool = False
    trailing_r: int | None = None

    def __len__(self) -> int:
        return len(self.points)

    @property
    def increments(self) -> np.ndarray:
        return np.diff(self.points, axis=0)

    @property
    def endpoint(self) -> tuple[int, int]:
        x, y = self.points[-1]
        return int(x), int(y)


def forward_grouped(w: Word | str, T: int | None = None) -> GroupedWalk:
    """Group each r-run with the non-r letter that closes it, looking forward from T."""
    w = as_word(w)
    codes = _codes(w)
    L, R = _prefix_walk(codes)
    if T is None:
        T = w.first - 1 if w.offset == 1 else None
        if T is None:
            raise AnchorError("windows need an explicit anchor")
    if T == w.first - 1:
        if w.offset != 1:
            raise AnchorError("the empty-prefix anchor is for finite words")
    elif not w.first <= T <= w.last or w[T] == "r":
        raise AnchorError(f"anchor {T} must index a b or g of the word")
    p0 = T - w.first + 1
    rel = np.flatnonzero(codes[p0:] != 1) + p0 + 1  # prefix positions of non-r letters
    pos = np.concatenate([[p0], rel])
    pts = np.stack([L[pos] - L[p0], R[pos] - R[p0]], axis=1)
    tau = pos + w.first - 1
    trailing = None
    if w.offset == 1:
        trailing = int(len(codes) - pos[-1])
    return GroupedWalk(pts, tau, T, False, trailing)


def reverse_grouped(w: Word | str, T: int) -> GroupedWalk:
    """Reverse grouped walk from a b at T; coordinates are (R, L) differences."""
    w = as_word(w)
    if not w.first <= T <= w.last or w[T] != "b":
        raise AnchorError(f"anchor {T} must index a b of the word")
    codes = _codes(w)
    L, R = _prefix_walk(codes)
    p0 = T - w.first  # prefix position of T - 1
    nonr = np.flatnonzero(codes[:max(p0 - 1, 0)] != 1) + 1
    pos = np.concatenate([[p0], nonr[::-1]])
    pts = np.stack([R[pos] - R[p0], L[pos] - L[p0]], axis=1)
    tau = pos + w.first - 1
    return GroupedWalk(pts, tau, T, True, None)


# -- decomposition ------------------------------------------------------------

@dataclass(frozen=True)
class ExcursionDecomposition:
    """Alternating right/left excursions of a grouped walk.

    ``sigma`` holds every stopping index reached inside the walk; right
    excursions are [sigma[2l], sigma[2l+1]] and left ones
    [sigma[2l+1], sigma[2l+2]].  ``truncated`` is set when the walk ends
    before closing the excursion in progress.
    """

    walk: GroupedWalk
    sigma: np.ndarray
    truncated: bool

    @property
    def points(self) -> np.ndarray:
        return self.walk.points

    @property
    def right_excursions(self) -> list[tuple[int, int]]:
        s = self.sigma
        return [(int(s[i]), int(s[i + 1])) for i in range(0, len(s) - 1, 2)]

    @property
    def left_excursions(self) -> list[tuple[int, int]]:
        s = self.sigma
        return [(int(s[i]), int(s[i + 1])) for i in range(1, len(s) - 1, 2)]

    @property
    def overshoots(self) -> np.ndarray:
        """Delta_i: first-coordinate drop at the close of right excursion i."""
        s, x = self.sigma, self.points[:, 0]
        return np.array([x[s[i]] - x[s[i + 1]] for i in range(0, len(s) - 1, 2)], dtype=np.int64)

    @property
    def left_drops(self) -> np.ndarray:
        s, y = self.sigma, self.points[:, 1]
        return np.array([y[s[i]] - y[s[i + 1]] for i in range(1, len(s) - 1, 2)], dtype=np.int64)

    def _concat(self, parity: int) -> np.ndarray:
        pieces = [np.zeros((1, 2), dtype=np.int64)]
        s = self.sigma
        for i in range(parity, len(s) - 1, 2):
            seg = self.points[s[i]:s[i + 1] + 1] - self.points[s[i]]
            pieces.append(pieces[-1][-1] + seg[1:])
        return np.concatenate(pieces)

    @property
    def Z0(self) -> np.ndarray:
        """Concatenated right excursions."""
        return self._concat(0)

    @property
    def Z1(self) -> np.ndarray:
        """Concatenated left excursions."""
        return self._concat(1)

    def T0(self, k: int) -> int:
        s = self.sigma
        return int(sum(s[2 * l + 1] - s[2 * l] for l in range(k)))

    def T1(self, j: int) -> int:
        s = self.sigma
        return int(sum(s[2 * l + 2] - s[2 * l + 1] for l in range(j)))

    def KJ(self, m: int) -> tuple[int, int]:
        """(K_m, J_m): completed left and right excursions by walk time m."""
        i = int(np.searchsorted(self.sigma, m, side="right")) - 1
        if i < 0:
            raise ValueError("time before sigma_0")
        if i == len(self.sigma) - 1 and self.truncated and m >= len(self.points):
            raise ValueError("time beyond the walk")
        l, odd = divmod(i, 2)
        return (l, l + 1) if odd else (l, l)

    def local_time_counts(self, m: int) -> tuple[int, int]:
        """(sum of overshoots over completed right excursions, completed left excursions) at time m.

        This is the running-infimum form: the concatenated right excursions
        lose Delta_i in the first coordinate and the left ones lose exactly 1
        in the second.
        """
        K, J = self.KJ(m)
        return int(self.overshoots[:J].sum()), K

    def local_time(self, m: int, n: int) -> float:
        d, k = self.local_time_counts(m)
        return d / math.sqrt(4 * n) + k / math.sqrt(2 * n)


def decompose(G: GroupedWalk, pairs: int | None = None) -> ExcursionDecomposition:
    """sigma_0 = 0, then alternately the first strict drop of the first and second coordinate."""
    x = np.ascontiguousarray(G.points[:, 0])
    y = np.ascontiguousarray(G.points[:, 1])
    sigma = kernels.sigma_sequence(x, y)
    truncated = True
    if pairs is not None and len(sigma) > 2 * pairs:
        sigma = sigma[:2 * pairs + 1]
        truncated = False
    return ExcursionDecomposition(G, np.asarray(sigma, dtype=np.int64), truncated)


def overshoots(D: ExcursionDecomposition) -> np.ndarray:
    """Delta_i for forward walks.  For reverse walks every right-excursion
    drop is exactly 1 and that is asserted."""
    d = D.overshoots
    if D.walk.reverse and np.any(d != 1):
        raise AssertionError(f"reverse right excursion with drop {d[d != 1][0]}")
    return d


# -- word-level flow lines ----------------------------------------------------

@dataclass(frozen=True)
class _Lookups:
    first: int
    gb: dict[int, int]
    br: dict[int, int]
    next_g: np.ndarray      # next g strictly after i, or NONE
    prev_nonr: np.ndarray   # last non-r strictly before i, or NONE
    br_top: np.ndarray      # top of the br stack after processing i, or NONE


def _lookups(w: Word) -> _Lookups:
    N = len(w)
    f = w.first
    gb: dict[int, int] = {}
    br: dict[int, int] = {}
    sg: list[int] = []
    sb: list[int] = []
    top = np.full(N, NONE, dtype=np.int64)
    for p, c in enumerate(w.letters):
        i = p + f
        if c == "g":
            sg.append(i)
        elif c == "b":
            if sg:
                j = sg.pop()
                gb[i], gb[j] = j, i
            sb.append(i)
        elif sb:
            j = sb.pop()
            br[i], br[j] = j, i
        top[p] = sb[-1] if sb else NONE
    codes = _codes(w)
    nxt = np.full(N, NONE, dtype=np.int64)
    gpos = np.flatnonzero(codes == 2)
    k = np.searchsorted(gpos, np.arange(N), side="right")
    ok = k < len(gpos)
    nxt[ok] = gpos[k[ok]] + f
    prv = np.full(N, NONE, dtype=np.int64)
    npos = np.flatnonzero(codes != 1)
    k = np.searchsorted(npos, np.arange(N), side="left") - 1
    ok = k >= 0
    prv[ok] = npos[k[ok]] + f
    return _Lookups(f, gb, br, nxt, prv, top)


@dataclass(frozen=True)
class SideClassification:
    """Left/right labels of word indices relative to a (dual) red flow line.

    ``steps`` lists the iteration tuples: (j, j', k) for the flow line,
    (j, j', k) with j' the gb partner for the dual line.  ``line`` is the list
    of word indices whose edges make up the path.
    """

    anchor: int
    dual: bool
    steps: tuple[tuple[int, int, int], ...]
    labels: dict[int, str] = field(repr=False)
    truncated: bool

    @property
    def line(self) -> list[int]:
        return [s[1] for s in self.steps] if not self.dual else [s[2] for s in self.steps]

    def intervals(self) -> list[tuple[int, int, str]]:
        out: list[tuple[int, int, str]] = []
        for i in sorted(self.labels):
            lab = self.labels[i]
            if out and out[-1][2] == lab and out[-1][1] == i - 1:
                out[-1] = (out[-1][0], i, lab)
            else:
                out.append((i, i, lab))
        return out


def flowline_side_classification(w: Word | str, T: int) -> SideClassification:
    """Walk the red flow line from the b at T through the word.

    j_0 = T; j'_i is the r closing j_i's br match, k_i the first g after
    j'_i, and j_{i+1} the b closing k_i's gb match.  Indices in
    [j_i, j'_i - 1] are right of the line, [j'_i + 1, j_{i+1} - 1] left of it,
    and j'_i is on it.
    """
    w = as_word(w)
    if not w.first <= T <= w.last or w[T] != "b":
        raise AnchorError(f"anchor {T} must index a b of the word")
    lk = _lookups(w)
    steps = []
    labels: dict[int, str] = {}
    j = T
    truncated = False
    while True:
        jp = lk.br.get(j)
        if jp is None:
            for i in range(j, w.last + 1):
                labels[i] = "right"
            truncated = True
            break
        for i in range(j, jp):
            labels[i] = "right"
        labels[jp] = "on"
        k = int(lk.next_g[jp - lk.first])
        j1 = lk.gb.get(k) if k != NONE else None
        if j1 is None:
            for i in range(jp + 1, w.last + 1):
                labels[i] = "left"
            steps.append((j, jp, k))
            truncated = True
            break
        steps.append((j, jp, k))
        for i in range(jp + 1, j1):
            labels[i] = "left"
        j = j1
    return SideClassification(T, False, tuple(steps), labels, truncated)


def dual_side_classification(w: Word | str, T: int) -> SideClassification:
    """Walk the dual red flow line from the face left of the blue edge at T, backwards.

    j'_i is the g opening j_i's gb match, k_i = (last non-r before j'_i) + 1,
    and j_{i+1} is the last b before k_i whose br match closes at or after
    k_i.  Indices in [k_i, j_i - 1] are right of the line and
    [j_{i+1}, k_i - 1] left of it.
    """
    w = as_word(w)
    if not w.first <= T <= w.last or w[T] != "b":
        raise AnchorError(f"anchor {T} must index a b of the word")
    lk = _lookups(w)
    steps = []
    labels: dict[int, str] = {}
    j = T
    truncated = False
    while True:
        jp = lk.gb.get(j)
        pn = int(lk.prev_nonr[jp - lk.first]) if jp is not None else NONE
        if pn == NONE:
            # k_i lies before the window, so everything up to j_i - 1 is right
            for i in range(w.first, j):
                labels[i] = "right"
            truncated = True
            break
        k = pn + 1
        steps.append((j, jp, k))
        for i in range(k, j):
            labels[i] = "right"
        j1 = int(lk.br_top[k - 1 - lk.first]) if k > lk.first else NONE
        if j1 == NONE:
            for i in range(w.first, k):
                labels[i] = "left"
            truncated = True
            break
        for i in range(j1, k):
            labels[i] = "left"
        j = j1
    return SideClassification(T, True, tuple(steps), labels, truncated)


def geometric_flowline_sides(S, T: int) -> dict[int, str]:
    """Side of each edge eta(k), k >= T, read off the map itself.

    The three flow lines from vertex T split the inner faces into regions;
    an edge is right of the red line when it borders the region between the
    red and blue lines, left when it borders the one between red and green,
    and on the line when it is a red flow-line edge.
    """
    from .embed import face_structure, flow_regions
    from .maps import flow_line

    fs = face_structure(S)
    reg = flow_regions(S, T)
    red = set(flow_line(S, T, "r").edges)
    out = {}
    for k in range(T, 3 * S.n + 1):
        e = k - 1
        faces = set(fs.edge_faces[e].tolist())
        if e in red:
            out[k] = "on"
        elif faces & reg["g"]:
            out[k] = "right"
        elif faces & reg["b"]:
            out[k] = "left"
        else:
            out[k] = "behind"
    return out


@dataclass(frozen=True)
class IdentityCheck:
    checked: int
    failures: tuple[str, ...]

    @property
    def ok(self) -> bool:
        return not self.failures


def check_forward_identities(w: Word | str, T: int) -> IdentityCheck:
    """j_i = tau(sigma_{2i}) and k_i = tau(sigma_{2i+1}) wherever both sides exist."""
    w = as_word(w)
    fl = flowline_side_classification(w, T)
    D = decompose(forward_grouped(w, T))
    tau, s = D.walk.tau, D.sigma
    bad, n = [], 0
    for i, (j, _, k) in enumerate(fl.steps):
        if 2 * i < len(s):
            n += 1
            if tau[s[2 * i]] != j:
                bad.append(f"j_{i}={j} but tau(sigma_{2 * i})={tau[s[2 * i]]}")
        elif not D.truncated:
            bad.append(f"sigma_{2 * i} missing")
        if k != NONE:
            if 2 * i + 1 < len(s):
                n += 1
                if tau[s[2 * i + 1]] != k:
                    bad.append(f"k_{i}={k} but tau(sigma_{2 * i + 1})={tau[s[2 * i + 1]]}")
            else:
                bad.append(f"sigma_{2 * i + 1} missing while k_{i}={k} exists")
    # every sigma the walk reached must come from a flow-line step
    closed = 2 * len([st for st in fl.steps if st[2] != NONE]) + (1 if not fl.truncated else 0)
    if len(s) > closed + 1:
        bad.append(f"{len(s)} sigmas but only {len(fl.steps)} flow-line steps")
    return IdentityCheck(n, tuple(bad))


def check_dual_identities(w: Word | str, T: int) -> IdentityCheck:
    """bar-tau(sigma_{2i+1}) = k_i - 1 and bar-tau(sigma_{2i}) = j_i - 1."""
    w = as_word(w)
    dl = dual_side_classification(w, T)
    D = decompose(reverse_grouped(w, T))
    tau, s = D.walk.tau, D.sigma
    bad, n = [], 0
    for i, (j, _, k) in enumerate(dl.steps):
        if 2 * i < len(s):
            n += 1
            if tau[s[2 * i]] != j - 1:
                bad.append(f"j_{i}-1={j - 1} but tau(sigma_{2 * i})={tau[s[2 * i]]}")
        if 2 * i + 1 < len(s):
            n += 1
            if tau[s[2 * i + 1]] != k - 1:
                bad.append(f"k_{i}-1={k - 1} but tau(sigma_{2 * i + 1})={tau[s[2 * i + 1]]}")
        elif not D.truncated:
            bad.append(f"sigma_{2 * i + 1} missing while k_{i}={k} exists")
    d = D.overshoots
    if np.any(d != 1):
        bad.append("reverse right excursion drop != 1")
    if np.any(D.left_drops != 1):
        bad.append("reverse left excursion drop != 1")
    return IdentityCheck(n, tuple(bad))


# -- local time ---------------------------------------------------------------

@dataclass(frozen=True)
class LocalTimeAccount:
    n: int
    pairs: int
    increments: tuple[float, ...]
    total: float
    flow_edges: int | None

    @property
    def consistent(self) -> bool:
        return self.flow_edges is None or self.flow_edges == self.pairs


def localtime_accounting(D: ExcursionDecomposition, n: int,
                         flow: SideClassification | None = None) -> LocalTimeAccount:
    """Local-time increments per completed (right, left) pair.

    Each completed right excursion adds Delta_i / sqrt(4n) and each completed
    left excursion 1 / sqrt(2n).  A pair is counted once its right excursion
    closes; ``flow`` supplies the red flow line from the same anchor, whose
    edges with a closing g are matched one to one with those pairs.
    """
    if D.walk.reverse:
        raise ValueError("local-time accounting is for forward decompositions")
    d = D.overshoots
    lefts = len(D.left_excursions)
    inc = []
    for i, di in enumerate(d):
        v = di / math.sqrt(4 * n)
        if i < lefts:
            v += 1 / math.sqrt(2 * n)
        inc.append(float(v))
    flow_edges = None
    if flow is not None:
        flow_edges = sum(1 for st in flow.steps if st[2] != NONE)
    return LocalTimeAccount(n, len(d), tuple(inc), float(sum(inc)), flow_edges)


# -- targets and samplers -----------------------------------------------------

SQRT2 = math.sqrt(2)


@dataclass(frozen=True)
class StatTargets:
    covariance: float = -math.cos(math.pi / 4)
    variance: float = 1.0
    overshoot_mean: float = 2.0
    infimum_ratio: float = SQRT2
    p: float = SQRT2 / (1 + SQRT2)
    c: float = 1 + SQRT2
    exponent: float = 5.0
    prefactor: float = 48 / math.pi
    forward_moments: tuple[int, int, int] = (2, 1, -1)
    reverse_moments: tuple[int, int, int] = (1, 2, -1)
    steps_per_group: Fraction = Fraction(3, 2)


TARGETS = StatTargets()


def step_law(reverse: bool = False, imax: int = 200) -> list[tuple[tuple[int, int], Fraction]]:
    """Increment law of the grouped walk, truncated at jump size ``imax``."""
    out = [((1, -1), Fraction(1, 2))]
    for i in range(imax + 1):
        out.append(((-1, i) if reverse else (-i, 1), Fraction(1, 2 ** (i + 2))))
    return out


def analytic_moments(reverse: bool = False) -> tuple[Fraction, Fraction, Fraction, Fraction, Fraction]:
    """(E x, E y, E x^2, E y^2, E xy) in closed form.

    With P(i) = 2^{-i-2}: sum P(i) = 1/2, sum i P(i) = 1/2, sum i^2 P(i) = 3/2.
    """
    s0, s1, s2 = Fraction(1, 2), Fraction(1, 2), Fraction(3, 2)
    h = Fraction(1, 2)
    # forward: jump (-i, 1) with weight P(i)
    ex = h - s1
    ey = -h + s0
    exx = h + s2
    eyy = h + s0
    exy = -h - s1
    if reverse:
        # (-1, i): swap roles of the jump size
        ex, ey = h - s0, -h + s1
        exx, eyy = h + s0, h + s2
        exy = -h - s1
    return ex, ey, exx, eyy, exy


def mean_group_length() -> Fraction:
    """E[tau(1) - tau(0)]: one non-r letter plus the r-run before it."""
    # from b or g: r-run length 0 w.p. 3/4, else 1 + Geom; from r the run continues w.p. 1/2
    return Fraction(3, 4) * 1 + Fraction(1, 4) * (1 + 2)


def sample_overshoots(count: int, seed: int | SeedSpec = 0, cap: int = 1 << 20,
                      chunk: int = 1024) -> tuple[np.ndarray, int]:
    """First-excursion overshoots Delta_1 from independent anchors.

    The letters after an anchor b form the chain started at b, so each sample
    runs that chain until the grouped first coordinate first drops below 0.
    Samples still open after ``cap`` letters are dropped and counted.
    """
    ss = as_seedspec(seed)
    out = np.empty(count, dtype=np.int64)
    got = 0
    trunc = 0
    for s in range(count):
        gen = ss.generator("overshoot", s)
        level, cur, used = 0, 0, 0
        found = None
        while used < cap:
            bits = raw_bits(gen, (chunk + 31) // 32)
            lt = kernels.chain_letters(bits, cur, chunk + 1)[1:]
            L = level + np.cumsum(_DL[lt])
            hit = np.flatnonzero((lt != 1) & (L < 0))
            if hit.size:
                found = -int(L[hit[0]])
                break
            level = int(L[-1])
            cur = int(lt[-1])
            used += chunk
        if found is None:
            trunc += 1
        else:
            out[got] = found
            got += 1
    return out[:got], trunc
