"""Generators for W_n words and stationary windows.

Three routes to a uniform element of W_n:

* rejection from the Markov chain started at g (every W_n word has chain
  probability ``2 * 16**-n``, so the accepted word is exactly uniform);
* exhaustive enumeration for tiny n;
* count-and-sample over the state space (step, L, R, last-letter-was-r).
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

import numpy as np

from . import kernels
from .rng import SeedSpec, as_seedspec, raw_bits
from .words import STEPS, Word, as_word

CODE = {"b": 0, "r": 1, "g": 2}
LETTER = "brg"

# -- the chain ----------------------------------------------------------------

_Q = Fraction(1, 4)
_H = Fraction(1, 2)


@dataclass(frozen=True)
class ChainParams:
    matrix: tuple[tuple[Fraction, ...], ...] = (
        (_H, _Q, _Q),
        (Fraction(0), _H, _H),
        (_H, _Q, _Q),
    )
    start: str = "g"

    def __post_init__(self):
        for row in self.matrix:
            if sum(row) != 1 or any(x < 0 for x in row):
                raise ValueError("rows must be probability vectors")

    def p(self, a: str, b: str) -> Fraction:
        return self.matrix[CODE[a]][CODE[b]]

    @property
    def stationary(self) -> tuple[Fraction, ...]:
        return (Fraction(1, 3),) * 3

    def is_stationary(self, pi) -> bool:
        return all(sum(pi[i] * self.matrix[i][j] for i in range(3)) == pi[j] for j in range(3))


CHAIN = ChainParams()


def _bits_for(steps: int) -> int:
    return max(1, (steps + 31) // 32)


def markov_word(n: int, seed: int | SeedSpec = 0, substream: int = 0) -> Word:
    """3n letters of the chain with w_1 = g."""
    if n < 1:
        raise ValueError("n must be >= 1")
    gen = as_seedspec(seed).generator("markov", substream)
    bits = raw_bits(gen, _bits_for(3 * n - 1))
    codes = kernels.chain_letters(bits, CODE["g"], 3 * n)
    return Word(codes_to_str(codes))


def codes_to_str(codes: np.ndarray) -> str:
    return np.frombuffer(b"brg", dtype=np.uint8)[codes].tobytes().decode("ascii")


def str_to_codes(s: str) -> np.ndarray:
    lut = np.zeros(256, dtype=np.uint8)
    lut[ord("r")] = 1
    lut[ord("g")] = 2
    return lut[np.frombuffer(s.encode("ascii"), dtype=np.uint8)]


@dataclass(frozen=True)
class ChainProbability:
    exact: Fraction
    zero_reason: str | None = None

    @property
    def log_prob(self) -> float:
        if self.exact == 0:
            return -math.inf
        return math.log(self.exact.numerator) - math.log(self.exact.denominator)


def chain_probability(w: Word | str, params: ChainParams = CHAIN) -> ChainProbability:
    s = as_word(w).letters
    if not s:
        return ChainProbability(Fraction(1))
    if s[0] != params.start:
        return ChainProbability(Fraction(0), f"w_1 = {s[0]!r}, chain starts at {params.start!r}")
    p = Fraction(1)
    for k in range(1, len(s)):
        q = params.p(s[k - 1], s[k])
        if q == 0:
            return ChainProbability(Fraction(0), f"forbidden transition {s[k - 1]}->{s[k]} at {k}-{k + 1}")
        p *= q
    return ChainProbability(p)


def chain_log_prob(w: Word | str) -> float:
    return chain_probability(w).log_prob


# -- exact counts -------------------------------------------------------------

@lru_cache(maxsize=None)
def catalan(n: int) -> int:
    return math.comb(2 * n, n) // (n + 1)


def count_Wn_closed(n: int) -> int:
    """|W_n| from the Catalan determinant, checked against the factorial form."""
    if n < 1:
        raise ValueError("n must be >= 1")
    det = catalan(n + 2) * catalan(n) - catalan(n + 1) ** 2
    f = math.factorial
    num = 6 * f(2 * n) * f(2 * n + 2)
    den = f(n) * f(n + 1) * f(n + 2) * f(n + 3)
    if num % den or num // den != det:
        raise ArithmeticError(f"closed forms disagree at n={n}")
    return det


def exact_acceptance_probability(n: int) -> Fraction:
    return Fraction(2 * count_Wn_closed(n), 16 ** n)


class EnumerationCapError(ValueError):
    pass


def enumerate_Wn(n: int, cap: int = 6) -> list[str]:
    """All of W_n in lexicographic order, by pruned depth-first search."""
    if n > cap:
        raise EnumerationCapError(f"n={n} exceeds the enumeration cap {cap}")
    if n < 0:
        raise ValueError("n must be >= 0")
    m = 3 * n
    out: list[str] = []
    buf: list[str] = []

    def go(k: int, x: int, y: int, last: str):
        if k == m:
            if x == 0 and y == 0:
                out.append("".join(buf))
            return
        for c in "bgr":
            if c == "b" and last == "r":
                continue
            dx, dy = STEPS[c]
            nx, ny = x + dx, y + dy
            if nx < 0 or ny < 0 or nx + 2 * ny > m - k - 1:
                continue
            buf.append(c)
            go(k + 1, nx, ny, c)
            buf.pop()

    go(0, 0, 0, "")
    return out


# -- rejection ----------------------------------------------------------------

class BudgetExhausted(RuntimeError):
    def __init__(self, trials: int):
        super().__init__(f"no W_n word accepted within {trials} trials")
        self.trials = trials


@dataclass(frozen=True)
class RejectionResult:
    word: Word
    trials: int
    substream: int


def _trial_bits(gen: np.random.Generator, n: int, trials: int) -> np.ndarray:
    wpt = _bits_for(3 * n - 1)
    return raw_bits(gen, trials * wpt).reshape(trials, wpt)


def rejection_sample(n: int, seed: int | SeedSpec = 0, budget: int = 10 ** 9,
                     substream: int = 0, batch: int = 1 << 16) -> RejectionResult:
    """Chain trials until one lands in W_n; trials abort at the first quadrant exit.

    Each trial owns a fixed block of the stream, so the result does not
    depend on ``batch``.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    gen = as_seedspec(seed).generator(f"rejection/{n}", substream)
    done, size = 0, min(batch, 256)
    while done < budget:
        k = min(size, budget - done)
        size = min(2 * size, batch)
        bits = _trial_bits(gen, n, k)
        acc = kernels.rejection_accepts(bits, n)
        hit = np.flatnonzero(acc)
        if hit.size:
            i = int(hit[0])
            codes = kernels.chain_letters(np.ascontiguousarray(bits[i]), CODE["g"], 3 * n)
            return RejectionResult(Word(codes_to_str(codes)), done + i + 1, substream)
        done += k
    raise BudgetExhausted(done)


def rejection_samples(n: int, count: int, seed: int | SeedSpec = 0,
                      budget: int = 10 ** 9) -> list[RejectionResult]:
    return [rejection_sample(n, seed, budget, substream=i) for i in range(count)]


# -- acceptance probability ---------------------------------------------------

CHUNK_TRIALS = 1 << 20


@dataclass(frozen=True)
class AcceptanceEstimate:
    n: int
    trials: int
    accepted: int
    estimate: float
    ci_low: float
    ci_high: float

    def to_dict(self) -> dict:
        return {"n": self.n, "estimate": self.estimate, "ci_low": self.ci_low,
                "ci_high": self.ci_high, "trials": self.trials, "accepted": self.accepted}


def wilson_interval(k: int, m: int, z: float = 1.959963984540054) -> tuple[float, float]:
    if m == 0:
        return 0.0, 1.0
    p = k / m
    den = 1 + z * z / m
    mid = (p + z * z / (2 * m)) / den
    half = z * math.sqrt(p * (1 - p) / m + z * z / (4 * m * m)) / den
    return max(0.0, mid - half), min(1.0, mid + half)


def _accept_chunk(args) -> int:
    n, seed, chunk, size = args
    gen = SeedSpec(seed).generator(f"accept/{n}", chunk)
    return int(kernels.rejection_accepts(_trial_bits(gen, n, size), n).sum())


def acceptance_probability_estimate(n: int, trials: int, seed: int | SeedSpec = 0,
                                    workers: int = 1) -> AcceptanceEstimate:
    """Fraction of chain trials whose 3n-step walk lies in W_n.

    Trials come in fixed chunks of ``CHUNK_TRIALS`` with one substream each,
    so the estimate is the same for any ``workers``.
    """
    if n < 1 or trials < 1:
        raise ValueError("n and trials must be >= 1")
    ss = as_seedspec(seed)
    jobs = []
    left, c = trials, 0
    while left > 0:
        k = min(CHUNK_TRIALS, left)
        jobs.append((n, ss.seed, c, k))
        left -= k
        c += 1
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as ex:
            acc = sum(ex.map(_accept_chunk, jobs))
        acc = int(acc)
    else:
        acc = sum(_accept_chunk(j) for j in jobs)
    lo, hi = wilson_interval(acc, trials)
    return AcceptanceEstimate(n, trials, acc, acc / trials, lo, hi)


# -- count-and-sample DP ------------------------------------------------------

class MemoryBudgetError(MemoryError):
    def __init__(self, need: int, budget: int):
        super().__init__(f"DP needs about {need / 2**20:.0f} MiB, budget is {budget / 2**20:.0f} MiB")
        self.need = need
        self.budget = budget


DEFAULT_MEMORY = 2 << 30
EXACT_AUTO_MAX_N = 100


def _layer_shape(n: int, k: int) -> tuple[int, int]:
    # any state reachable in k steps and able to return in 3n-k: L + 2R <= min(2k, 3n-k)
    cap = min(2 * k, 3 * n - k)
    return cap + 1, cap // 2 + 1


def _shifted(arr: np.ndarray, dL: int, dR: int, shape: tuple[int, int], dtype) -> np.ndarray:
    out = np.zeros(shape, dtype=dtype)
    if dtype == object:
        out[...] = 0
    lo, hi = max(0, -dL), min(shape[0], arr.shape[0] - dL)
    ro, rh = max(0, -dR), min(shape[1], arr.shape[1] - dR)
    if lo < hi and ro < rh:
        out[lo:hi, ro:rh] = arr[lo + dL:hi + dL, ro + dR:rh + dR]
    return out


def _step_back(n: int, k: int, A1, B1, dtype):
    shape = _layer_shape(n, k)
    via_b = _shifted(A1, 1, -1, shape, dtype)
    via_r = _shifted(B1, -1, 0, shape, dtype)
    via_g = _shifted(A1, 0, 1, shape, dtype)
    Bk = via_r + via_g
    Ak = Bk + via_b
    return Ak, Bk


def _base(dtype):
    one = np.ones((1, 1), dtype=dtype)
    if dtype == object:
        one[0, 0] = 1
    return one, one.copy()


@dataclass
class CountTable:
    """Completion counts for length-k prefixes, stored at checkpoint layers.

    ``A[k][L, R]`` counts completions from (L, R) after k letters when the
    last letter was not r; ``B`` when it was r (so no b may follow).
    Float tables are normalized per layer; ``log_scale[k]`` restores them.
    """

    n: int
    mode: str
    stride: int
    A: dict[int, np.ndarray] = field(default_factory=dict)
    B: dict[int, np.ndarray] = field(default_factory=dict)
    log_scale: dict[int, float] = field(default_factory=dict)

    @property
    def dtype(self):
        return object if self.mode == "exact" else np.float64

    @property
    def relative_error_bound(self) -> float:
        """Worst-case relative error of any float entry: each layer adds at
        most two roundings from the sums and one from the rescale."""
        if self.mode == "exact":
            return 0.0
        return 3 * 3 * self.n * np.finfo(np.float64).eps / 2

    def layers(self, k_lo: int, k_hi: int) -> dict[int, tuple[np.ndarray, np.ndarray]]:
        """Layers k_lo..k_hi rebuilt from the checkpoint at or above k_hi."""
        top = min(3 * self.n, -(-k_hi // self.stride) * self.stride)
        A, B = self.A[top], self.B[top]
        out = {}
        if top <= k_hi:
            out[top] = (A, B)
        for k in range(top - 1, k_lo - 1, -1):
            A, B = _step_back(self.n, k, A, B, self.dtype)
            if self.mode == "float":
                s = max(float(A.max()), 1e-300)
                A, B = A / s, B / s
            if k <= k_hi:
                out[k] = (A, B)
        return out


def _estimate_memory(n: int, mode: str, stride: int) -> int:
    cells = max(a * b for a, b in (_layer_shape(n, k) for k in range(3 * n + 1)))
    per = 8 if mode == "float" else 8 + 28 + (5 * n) // 8 + 8
    layers = (3 * n) // stride + 2 + stride
    return 2 * cells * per * layers


def build_count_table(n: int, mode: str = "exact", memory_budget: int = DEFAULT_MEMORY) -> CountTable:
    if mode not in ("exact", "float"):
        raise ValueError("mode must be 'exact' or 'float'")
    if n < 1:
        raise ValueError("n must be >= 1")
    stride = max(1, math.isqrt(3 * n))
    need = _estimate_memory(n, mode, stride)
    if need > memory_budget:
        raise MemoryBudgetError(need, memory_budget)
    t = CountTable(n, mode, stride)
    dtype = t.dtype
    A, B = _base(dtype)
    logs = 0.0
    t.A[3 * n], t.B[3 * n], t.log_scale[3 * n] = A, B, 0.0
    for k in range(3 * n - 1, -1, -1):
        A, B = _step_back(n, k, A, B, dtype)
        if mode == "float":
            s = float(A.max())
            if s > 0:
                A, B = A / s, B / s
                logs += math.log(s)
        if k % stride == 0:
            t.A[k], t.B[k], t.log_scale[k] = A, B, logs
    return t


def dp_count(n: int, memory_budget: int = DEFAULT_MEMORY) -> int:
    """|W_n| from the exact big-integer table."""
    t = build_count_table(n, "exact", memory_budget)
    return int(t.A[0][0, 0])


def dp_log_count(n: int, memory_budget: int = DEFAULT_MEMORY) -> float:
    """log |W_n| from the floating table (relative error ~1e-13 at n=1000)."""
    t = build_count_table(n, "float", memory_budget)
    return math.log(float(t.A[0][0, 0])) + t.log_scale[0]


def _pick_mode(n: int, mode: str) -> str:
    if mode == "auto":
        return "exact" if n <= EXACT_AUTO_MAX_N else "float"
    return mode


def dp_samples(n: int, count: int, seed: int | SeedSpec = 0, mode: str = "auto",
               memory_budget: int = DEFAULT_MEMORY, table: CountTable | None = None) -> list[Word]:
    """``count`` independent W_n words, drawn step by step in proportion to completion counts.

    Exact mode is exactly uniform.  Float mode is uniform up to the table's
    ``relative_error_bound`` per step.
    """
    mode = _pick_mode(n, mode)
    t = table if table is not None else build_count_table(n, mode, memory_budget)
    if t.mode != mode:
        raise ValueError("table mode does not match requested mode")
    ss = as_seedspec(seed)
    if count <= 0:
        return []
    if mode == "exact":
        rnd = ss.py_random("dp-exact", 0)
    else:
        gen = ss.generator("dp-float", 0)
    L = np.zeros(count, dtype=np.int64)
    R = np.zeros(count, dtype=np.int64)
    lastr = np.zeros(count, dtype=bool)
    letters = np.zeros((count, 3 * n), dtype=np.uint8)
    k = 0
    while k < 3 * n:
        k_hi = min(3 * n, k + t.stride)
        lay = t.layers(k + 1, k_hi)
        for kk in range(k, k_hi):
            A1, B1 = lay[kk + 1]
            sh = A1.shape

            def get(arr, l, r):
                ok = (l >= 0) & (r >= 0) & (l < sh[0]) & (r < sh[1])
                if mode == "exact":
                    return [arr[a, b] if o else 0 for a, b, o in zip(l, r, ok)]
                v = np.zeros(l.shape[0])
                v[ok] = arr[l[ok], r[ok]]
                return v

            wb = get(A1, L + 1, R - 1)
            wr = get(B1, L - 1, R)
            wg = get(A1, L, R + 1)
            if mode == "exact":
                choice = np.empty(count, dtype=np.uint8)
                for i in range(count):
                    b = 0 if lastr[i] else wb[i]
                    tot = b + wr[i] + wg[i]
                    u = rnd.randrange(tot)
                    choice[i] = 0 if u < b else (1 if u < b + wr[i] else 2)
            else:
                wb = np.where(lastr, 0.0, wb)
                tot = wb + wr + wg
                u = gen.random(count) * tot
                choice = np.where(u < wb, 0, np.where(u < wb + wr, 1, 2)).astype(np.uint8)
            letters[:, kk] = choice
            L += np.where(choice == 0, 1, np.where(choice == 1, -1, 0))
            R += np.where(choice == 0, -1, np.where(choice == 2, 1, 0))
            lastr = choice == 1
        k = k_hi
    return [Word(codes_to_str(row)) for row in letters]


def dp_sample(n: int, seed: int | SeedSpec = 0, mode: str = "auto",
              memory_budget: int = DEFAULT_MEMORY) -> Word:
    return dp_samples(n, 1, seed, mode, memory_budget)[0]


# -- stationary windows -------------------------------------------------------

def window_codes(length: int, seed: int | SeedSpec = 0, substream: int = 0,
                 tag: str = "window") -> np.ndarray:
    """``length`` letters of the stationary chain as codes b=0, r=1, g=2."""
    gen = as_seedspec(seed).generator(tag, substream)
    start = int(gen.integers(3))
    bits = raw_bits(gen, _bits_for(max(length - 1, 1)))
    return kernels.chain_letters(bits, start, length)


def stationary_window(m: int, seed: int | SeedSpec = 0, substream: int = 0) -> Word:
    """Letters w_{-m} .. w_m of the stationary chain; index 0 is the root."""
    if m < 0:
        raise ValueError("m must be >= 0")
    return Word(codes_to_str(window_codes(2 * m + 1, seed, substream)), offset=-m)


# -- UIWT local graphs --------------------------------------------------------

@dataclass(frozen=True)
class LocalEdge:
    index: int
    tail: int
    head: int
    color: str


@dataclass(frozen=True)
class LocalGraph:
    edges: dict[int, LocalEdge]
    incomplete: frozenset[int]

    def edge_set(self, lo: int, hi: int) -> set[tuple[int, int, str]]:
        return {(e.tail, e.head, e.color) for i, e in self.edges.items() if lo <= i <= hi}


def _window_structure(w: Word):
    idx = list(w.indices())
    gb: dict[int, int] = {}
    br: dict[int, int] = {}
    enc_gb_open: dict[int, int | None] = {}
    enc_br: dict[int, int | None] = {}
    sg: list[int] = []
    sb: list[int] = []
    for i, c in zip(idx, w.letters):
        if c == "g":
            enc_br[i] = sb[-1] if sb else None
            sg.append(i)
        elif c == "b":
            if sg:
                j = sg.pop()
                gb[i], gb[j] = j, i
            enc_gb_open[i] = sg[-1] if sg else None
            sb.append(i)
        else:
            if sb:
                j = sb.pop()
                br[i], br[j] = j, i
    next_g: dict[int, int | None] = {}
    nxt = None
    for i, c in zip(reversed(idx), reversed(w.letters)):
        next_g[i] = nxt
        if c == "g":
            nxt = i
    return gb, br, enc_gb_open, enc_br, next_g


def uiwt_local_graph(win: Word) -> LocalGraph:
    """Apply the three edge rules wherever the window holds the data they need.

    In the bi-infinite word the outer-vertex cases never occur, so a lookup
    that falls off the window marks the symbol incomplete instead.
    """
    gb, br, enc_gb_open, enc_br, next_g = _window_structure(win)
    edges: dict[int, LocalEdge] = {}
    bad: set[int] = set()
    for i, c in zip(win.indices(), win.letters):
        if c == "b":
            j = enc_gb_open.get(i)
            k = gb.get(j) if j is not None else None
            if k is None:
                bad.add(i)
            else:
                edges[i] = LocalEdge(i, i, k, "b")
        elif c == "r":
            tail = br.get(i)
            j = next_g.get(i)
            k = gb.get(j) if j is not None else None
            if tail is None or k is None:
                bad.add(i)
            else:
                edges[i] = LocalEdge(i, tail, k, "r")
        else:
            tail = gb.get(i)
            j = enc_br.get(i)
            if tail is None or j is None:
                bad.add(i)
            else:
                edges[i] = LocalEdge(i, tail, j, "g")
    return LocalGraph(edges, frozenset(bad))


@dataclass(frozen=True)
class Pocket:
    m: int
    j: int
    k: int
    edges: frozenset[tuple[int, int, str]]
    complete: bool


class PocketNotClosed(LookupError):
    def __init__(self, m: int, found: int):
        super().__init__(f"pocket {m} not closed in window ({found} br matches straddle 0)")
        self.m = m
        self.found = found


def uiwt_pocket(win: Word, m: int, graph: LocalGraph | None = None) -> Pocket:
    """G_m: edges of the symbols in w[j_m, k_m], where (j_m, k_m) is the br match
    straddling 0 with the m-th smallest closing index."""
    if m < 1:
        raise ValueError("m must be >= 1")
    _, br, *_ = _window_structure(win)
    straddle = sorted((k, j) for j, k in br.items() if j < 0 < k and win[j] == "b")
    if len(straddle) < m:
        raise PocketNotClosed(m, len(straddle))
    k, j = straddle[m - 1]
    g = graph if graph is not None else uiwt_local_graph(win)
    complete = not any(j <= i <= k for i in g.incomplete)
    return Pocket(m, j, k, frozenset(g.edge_set(j, k)), complete)


# -- green in-degree at a stopping-time b -------------------------------------

@dataclass(frozen=True)
class GreenSamples:
    values: np.ndarray
    truncated: int


def green_indegree_samples(count: int, seed: int | SeedSpec = 0, cap: int = 1 << 20,
                           chunk: int = 4096) -> GreenSamples:
    """Green in-degree of the first b at or after index 0 of a stationary word.

    The letters after that b are the chain started from b, and green edges
    into it come from later g's at its L level before L first drops below.
    Walks still open after ``cap`` steps are dropped and counted.
    """
    ss = as_seedspec(seed)
    vals = []
    trunc = 0
    for s in range(count):
        gen = ss.generator("green", s)
        # advance to the first b at or after 0
        cur = int(gen.integers(3))
        while cur != 0:
            v = int(gen.integers(4))
            cur = (2 if v >= 2 else 1) if cur == 1 else (0 if v < 2 else (1 if v == 2 else 2))
        level, prev_r, cnt, used = 0, 0, 0, 0
        while True:
            bits = raw_bits(gen, _bits_for(chunk))
            level, prev_r, cnt, k, done = kernels.green_run(bits, chunk, level, prev_r, cnt)
            used += k
            if done:
                vals.append(cnt)
                break
            if used >= cap:
                trunc += 1
                break
    return GreenSamples(np.asarray(vals, dtype=np.int64), trunc)
