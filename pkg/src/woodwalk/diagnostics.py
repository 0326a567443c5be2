"""Desk-scale statistical checks of the scaling claims.

Every report is a pure function of its parameters and seed.  Bands are
stated in the report next to the estimate.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np
from scipy import stats

from .excursions import TARGETS, analytic_moments, forward_grouped, reverse_grouped
from .rng import SeedSpec, as_seedspec
from .sampling import (CHAIN, AcceptanceEstimate, codes_to_str, exact_acceptance_probability,
                       window_codes)
from .words import Word

_DL = np.array([1, -1, 0], dtype=np.int64)
_DR = np.array([-1, 0, 1], dtype=np.int64)


@dataclass
class Check:
    name: str
    estimate: float
    target: float
    band: float
    stderr: float | None = None

    @property
    def z(self) -> float | None:
        if not self.stderr:
            return None
        return (self.estimate - self.target) / self.stderr

    @property
    def passed(self) -> bool:
        return abs(self.estimate - self.target) <= self.band

    def to_dict(self) -> dict:
        d = asdict(self)
        d["z"] = self.z
        d["passed"] = self.passed
        return d


@dataclass
class MomentReport:
    name: str
    checks: list[Check]
    params: dict = field(default_factory=dict)
    extra: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def to_dict(self) -> dict:
        return {"name": self.name, "passed": self.passed, "params": self.params,
                "checks": [c.to_dict() for c in self.checks], **self.extra}


# -- exact chain arithmetic ---------------------------------------------------

def _solve(A: list[list[Fraction]], B: list[list[Fraction]]) -> list[list[Fraction]]:
    """A X = B over the rationals by Gauss-Jordan elimination."""
    n = len(A)
    M = [list(A[i]) + list(B[i]) for i in range(n)]
    for c in range(n):
        p = next(r for r in range(c, n) if M[r][c] != 0)
        M[c], M[p] = M[p], M[c]
        piv = M[c][c]
        M[c] = [x / piv for x in M[c]]
        for r in range(n):
            if r != c and M[r][c] != 0:
                f = M[r][c]
                M[r] = [x - f * y for x, y in zip(M[r], M[c])]
    return [row[n:] for row in M]


def single_step_covariance() -> tuple[tuple[Fraction, Fraction], tuple[Fraction, Fraction]]:
    """Covariance of one increment (dL, dR) under the stationary law."""
    pi = CHAIN.stationary
    f = [(1, -1), (-1, 0), (0, 1)]
    m = [[sum(pi[i] * f[i][a] * f[i][b] for i in range(3)) for b in range(2)] for a in range(2)]
    return (m[0][0], m[0][1]), (m[1][0], m[1][1])


def asymptotic_covariance() -> tuple[tuple[Fraction, Fraction], tuple[Fraction, Fraction]]:
    """lim Cov(Z_N) / N for the stationary chain, exactly.

    With Z = (I - P + 1 pi)^{-1} and centred f, the limit is
    F' D (2Z - I) F, symmetrised.
    """
    P = [list(r) for r in CHAIN.matrix]
    pi = CHAIN.stationary
    A = [[(1 if i == j else 0) - P[i][j] + pi[j] for j in range(3)] for i in range(3)]
    f = [[Fraction(1), Fraction(-1)], [Fraction(-1), Fraction(0)], [Fraction(0), Fraction(1)]]
    Zf = _solve(A, f)  # Z F
    out = [[Fraction(0)] * 2 for _ in range(2)]
    for a in range(2):
        for b in range(2):
            s = sum(pi[i] * f[i][a] * (2 * Zf[i][b] - f[i][b]) for i in range(3))
            t = sum(pi[i] * f[i][b] * (2 * Zf[i][a] - f[i][a]) for i in range(3))
            out[a][b] = (s + t) / 2
    return (out[0][0], out[0][1]), (out[1][0], out[1][1])


# -- covariance ---------------------------------------------------------------

def endpoint_samples(n: int, samples: int, seed: int | SeedSpec = 0) -> np.ndarray:
    """(L_{3n}, R_{3n}) over independent stationary stretches."""
    ss = as_seedspec(seed)
    out = np.empty((samples, 2), dtype=np.int64)
    for s in range(samples):
        c = window_codes(3 * n, ss, s, tag="covariance")
        out[s] = _DL[c].sum(), _DR[c].sum()
    return out


def covariance_check(n: int, samples: int, seed: int | SeedSpec = 0, band: float = 0.1) -> MomentReport:
    """Scaled endpoint variances against 1 and covariance against -cos(pi/4)."""
    E = endpoint_samples(n, samples, seed)
    x = E[:, 0] / math.sqrt(4 * n)
    y = E[:, 1] / math.sqrt(2 * n)
    xc, yc = x - x.mean(), y - y.mean()
    N = len(x)

    def se(v):
        return float(np.std(v, ddof=1) / math.sqrt(N))

    checks = [
        Check("var_L", float(np.mean(xc ** 2)), TARGETS.variance, band, se(xc ** 2)),
        Check("var_R", float(np.mean(yc ** 2)), TARGETS.variance, band, se(yc ** 2)),
        Check("cov", float(np.mean(xc * yc)), TARGETS.covariance, band, se(xc * yc)),
    ]
    (a, b), (_, d) = asymptotic_covariance()
    exact = {"per_letter": [[str(a), str(b)], [str(b), str(d)]],
             "scaled_limit": [float(3 * a / 4), float(3 * d / 2), float(3 * b / math.sqrt(8))]}
    return MomentReport("covariance", checks, {"n": n, "samples": samples,
                                               "seed": as_seedspec(seed).seed},
                        {"exact": exact})


# -- grouped-step moments -----------------------------------------------------

def grouped_increments(count: int, seed: int | SeedSpec = 0, reverse: bool = False) -> np.ndarray:
    """At least ``count`` grouped increments from one long stationary stretch."""
    length = int(count * 1.5) + 64
    while True:
        c = window_codes(length, seed, 0, tag="grouped")
        w = Word(codes_to_str(c), offset=1)
        if reverse:
            T = int(np.flatnonzero(c == 0)[-1]) + 1
            inc = reverse_grouped(w, T).increments
        else:
            T = int(np.flatnonzero(c == 0)[0]) + 1
            inc = forward_grouped(w, T).increments
        if len(inc) >= count:
            return inc[:count]
        length *= 2


def moments_check(count: int, seed: int | SeedSpec = 0, reverse: bool = False,
                  sigmas: float = 3.0) -> MomentReport:
    inc = grouped_increments(count, seed, reverse)
    x, y = inc[:, 0].astype(float), inc[:, 1].astype(float)
    _, _, exx, eyy, exy = analytic_moments(reverse)
    rows = []
    for name, v, t in (("E_x2", x * x, exx), ("E_y2", y * y, eyy), ("E_xy", x * y, exy),
                       ("E_x", x, Fraction(0)), ("E_y", y, Fraction(0))):
        s = float(np.std(v, ddof=1) / math.sqrt(len(v)))
        rows.append(Check(name, float(v.mean()), float(t), sigmas * s, s))
    return MomentReport("moments_reverse" if reverse else "moments_forward", rows,
                        {"count": count, "seed": as_seedspec(seed).seed},
                        {"analytic": [str(exx), str(eyy), str(exy)]})


# -- exponent -----------------------------------------------------------------

@dataclass
class ExponentFit:
    ns: list[int]
    estimates: list[float]
    slope: float
    slope_se: float
    intercept: float
    prefactor_free: float
    prefactor_fixed: float
    prefactor_ci: tuple[float, float]
    excluded: list[int]
    exact_slope: float | None
    slope_band: tuple[float, float] = (-5.4, -4.6)
    prefactor_target: float = TARGETS.prefactor

    @property
    def slope_ok(self) -> bool:
        return self.slope_band[0] <= self.slope <= self.slope_band[1]

    @property
    def prefactor_ok(self) -> bool:
        r = self.prefactor_fixed / self.prefactor_target
        return 0.5 <= r <= 2.0

    @property
    def passed(self) -> bool:
        return self.slope_ok and self.prefactor_ok

    def to_dict(self) -> dict:
        d = asdict(self)
        d.update(slope_ok=self.slope_ok, prefactor_ok=self.prefactor_ok, passed=self.passed)
        return d


def _wls(x: np.ndarray, y: np.ndarray, w: np.ndarray) -> tuple[float, float, float]:
    W = w.sum()
    xm, ym = (w * x).sum() / W, (w * y).sum() / W
    sxx = (w * (x - xm) ** 2).sum()
    slope = (w * (x - xm) * (y - ym)).sum() / sxx
    return float(slope), float(ym - slope * xm), float(math.sqrt(1 / sxx))


def exponent_fit(estimates: Sequence[AcceptanceEstimate], exponent: float = TARGETS.exponent,
                 min_n: int = 10) -> ExponentFit:
    """Weighted log-log fit of acceptance probability against n.

    Weights are the inverse delta-method variances of log(p-hat), i.e. the
    accepted counts.  ``prefactor_fixed`` is the weighted geometric mean of
    p-hat * n^exponent: the constant in front of n^{-exponent}.
    Sizes below ``min_n`` are dropped, as are zero counts (with a warning).
    """
    use, excluded = [], []
    for e in estimates:
        if e.n < min_n:
            excluded.append(e.n)
        elif e.accepted == 0:
            warnings.warn(f"n={e.n}: zero accepted trials, excluded from the fit")
            excluded.append(e.n)
        else:
            use.append(e)
    if len(use) < 2:
        raise ValueError("need at least two usable sizes")
    ns = np.array([e.n for e in use], dtype=float)
    p = np.array([e.estimate for e in use])
    k = np.array([e.accepted for e in use], dtype=float)
    w = k / (1 - p)  # 1 / Var(log p-hat)
    x, y = np.log(ns), np.log(p)
    slope, icpt, _ = _wls(x, y, w)
    resid = y - (icpt + slope * x)
    dof = max(len(x) - 2, 1)
    s2 = max(float((w * resid ** 2).sum() / dof), 1.0)
    xm = (w * x).sum() / w.sum()
    slope_se = math.sqrt(s2 / float((w * (x - xm) ** 2).sum()))
    logc = y + exponent * x
    lc = float((w * logc).sum() / w.sum())
    lc_se = float(math.sqrt(1 / w.sum()))
    exact_slope = None
    try:
        ex = [math.log(exact_acceptance_probability(int(n))) for n in ns]
        exact_slope, _, _ = _wls(x, np.array(ex), np.ones_like(x))
    except (OverflowError, ValueError):
        pass
    return ExponentFit([int(n) for n in ns], [float(v) for v in p], slope, slope_se, icpt,
                       float(math.exp(icpt)), float(math.exp(lc)),
                       (float(math.exp(lc - 1.96 * lc_se)), float(math.exp(lc + 1.96 * lc_se))),
                       excluded, exact_slope)


# -- distribution fits --------------------------------------------------------

@dataclass
class FitReport:
    family: str
    n: int
    chi2: float
    dof: int
    p_chi2: float
    ks: float
    p_ks: float
    mean: float
    var: float
    mean_target: float
    var_target: float
    mean_z: float
    alpha: float = 0.01

    @property
    def passed(self) -> bool:
        return self.p_chi2 > self.alpha

    def to_dict(self) -> dict:
        d = asdict(self)
        d["passed"] = self.passed
        return d


FAMILIES = {"geom": 1, "geom-1": 0}


def distribution_fit(samples: np.ndarray, family: str = "geom", alpha: float = 0.01,
                     min_expected: float = 5.0) -> FitReport:
    """Chi-square (tail cells pooled until each expects ``min_expected``),
    KS on the CDF, and mean against Geom(1/2) or Geom(1/2) - 1."""
    if family not in FAMILIES:
        raise ValueError(f"family must be one of {sorted(FAMILIES)}")
    shift = FAMILIES[family]
    x = np.asarray(samples, dtype=np.int64) - shift  # support 0, 1, ... with P(k) = 2^{-k-1}
    N = len(x)
    if N == 0:
        raise ValueError("no samples")
    if np.any(x < 0):
        raise ValueError(f"sample outside the support of {family}")
    kmax = 0
    while N * 2.0 ** -(kmax + 2) >= min_expected:
        kmax += 1
    # cells 0..kmax-1 exact, cell kmax pools the tail (prob 2^{-kmax})
    obs = np.bincount(np.minimum(x, kmax), minlength=kmax + 1).astype(float)
    exp = np.array([2.0 ** -(k + 1) for k in range(kmax)] + [2.0 ** -kmax]) * N
    chi2, p = stats.chisquare(obs, exp)
    ks_grid = np.arange(0, int(x.max()) + 1)
    emp = np.searchsorted(np.sort(x), ks_grid, side="right") / N
    cdf = 1 - 2.0 ** -(ks_grid + 1)
    D = float(np.max(np.abs(emp - cdf)))
    p_ks = float(stats.kstwobign.sf(D * math.sqrt(N)))
    m, v = float(x.mean() + shift), float(x.var(ddof=1))
    mt = 1.0 + shift
    return FitReport(family, N, float(chi2), kmax, float(p), D, p_ks, m, v, mt, 2.0,
                     (m - mt) / math.sqrt(2.0 / N), alpha)


# -- infimum ratio ------------------------------------------------------------

@dataclass
class RatioReport:
    pairs: int
    mean_overshoot: float
    ratio: float
    ratio_se: float
    p_hat: float
    ratio_band: float = 0.02
    p_band: float = 0.01
    min_pairs: int = 10 ** 4

    @property
    def passed(self) -> bool | None:
        if self.pairs < self.min_pairs:
            return None
        return (abs(self.ratio - TARGETS.infimum_ratio) <= self.ratio_band
                and abs(self.p_hat - TARGETS.p) <= self.p_band)

    def to_dict(self) -> dict:
        d = asdict(self)
        d.update(passed=self.passed, target_ratio=TARGETS.infimum_ratio, target_p=TARGETS.p)
        return d


def ratio_check(overshoots, n: int = 1) -> RatioReport:
    """(sum Delta_i / sqrt(4n)) / (k / sqrt(2n)) for k completed pairs.

    Accepts overshoot arrays or decompositions.  The n-dependence cancels,
    so the ratio is mean(Delta) / sqrt 2.
    """
    if hasattr(overshoots, "overshoots"):
        overshoots = overshoots.overshoots
    elif isinstance(overshoots, (list, tuple)) and overshoots and hasattr(overshoots[0], "overshoots"):
        overshoots = np.concatenate([d.overshoots for d in overshoots])
    d = np.asarray(overshoots, dtype=float)
    k = len(d)
    if k == 0:
        return RatioReport(0, math.nan, math.nan, math.inf, math.nan)
    scale = math.sqrt(2 * n) / math.sqrt(4 * n)
    ratio = float(d.sum() * scale / k)
    se = float(np.std(d, ddof=1) * scale / math.sqrt(k)) if k > 1 else math.inf
    return RatioReport(k, float(d.mean()), ratio, se, ratio / (1 + ratio))


# -- reversal -----------------------------------------------------------------

@dataclass
class ReversalSample:
    L3n: int
    L_count: int
    R_count: int
    GL: int
    GR: int

    @property
    def gap_paper(self) -> int:
        """L^b_{3n} - (|G^L| - |G^R|), the identity as printed."""
        return self.L3n - (self.GL - self.GR)

    @property
    def gap(self) -> int:
        """L^b_{3n} - (|G^R| - |G^L|); L^b_{3n} = |R| - |L| fixes the sign."""
        return self.L3n - (self.GR - self.GL)


def reversal_sample(codes: np.ndarray, start: int, n: int) -> ReversalSample | None:
    """G^L / G^R bookkeeping for the stretch codes[start : start + 3n].

    L collects the r's of the stretch closing a br match opened before it, R
    the b's of the stretch whose match closes after it.  G^L_j (G^R_j) are the
    g's whose innermost enclosing br match is the j-th of those.  Returns None
    when a needed match leaves the array.
    """
    end = start + 3 * n
    stack: list[int] = []
    top = np.full(len(codes), -1, dtype=np.int64)  # innermost open b at each g
    partner = np.full(len(codes), -1, dtype=np.int64)
    for i, c in enumerate(codes.tolist()):
        if c == 0:
            stack.append(i)
        elif c == 1:
            if stack:
                j = stack.pop()
                partner[i], partner[j] = j, i
        elif stack:
            top[i] = stack[-1]
    seg = codes[start:end]
    idx = np.arange(start, end)
    rs = idx[seg == 1]
    bs = idx[seg == 0]
    Lq = rs[(partner[rs] < start)]
    if np.any(partner[Lq] < 0):
        return None
    Rp = bs[(partner[bs] >= end) | (partner[bs] < 0)]
    if np.any(partner[Rp] < 0):
        return None
    openers_L = partner[Lq]
    g_top = top[(codes == 2) & (top >= 0)]
    cnt = np.bincount(g_top, minlength=len(codes))
    GL = int(cnt[openers_L].sum())
    GR = int(cnt[Rp].sum())
    L3n = int(_DL[seg].sum())
    return ReversalSample(L3n, len(Lq), len(Rp), GL, GR)


@dataclass
class ReversalReport:
    n: int
    samples: list[ReversalSample]
    envelope_constant: float
    incomplete: int

    @property
    def envelope(self) -> float:
        return self.envelope_constant * self.n ** 0.25 * math.log(self.n)

    def quantile(self, q: float = 0.95, paper_sign: bool = False) -> float:
        g = [abs(s.gap_paper if paper_sign else s.gap) for s in self.samples]
        return float(np.quantile(g, q)) if g else math.nan

    @property
    def passed(self) -> bool:
        return bool(self.samples) and self.quantile(0.95) < self.envelope

    def to_dict(self) -> dict:
        return {"n": self.n, "samples": len(self.samples), "incomplete": self.incomplete,
                "envelope": self.envelope, "q95_gap": self.quantile(0.95),
                "q95_gap_paper_sign": self.quantile(0.95, True),
                "mean_L3n": float(np.mean([s.L3n for s in self.samples])) if self.samples else None,
                "mean_GL_block": _ratio(sum(s.GL for s in self.samples), sum(s.L_count for s in self.samples)),
                "mean_GR_block": _ratio(sum(s.GR for s in self.samples), sum(s.R_count for s in self.samples)),
                "passed": self.passed}


def _ratio(a: int, b: int) -> float | None:
    return a / b if b else None


def reversal_closeness(n: int, samples: int, seed: int | SeedSpec = 0, margin: int | None = None,
                       envelope_constant: float = 5.0) -> ReversalReport:
    """|L^b_{3n} - (|G^R| - |G^L|)| over stationary stretches, against C n^{1/4} log n."""
    m = margin if margin is not None else 6 * n
    ss = as_seedspec(seed)
    out, bad = [], 0
    for s in range(samples):
        c = window_codes(3 * n + 2 * m, ss, s, tag="reversal")
        r = reversal_sample(c, m, n)
        if r is None:
            bad += 1
        else:
            out.append(r)
    return ReversalReport(n, out, envelope_constant, bad)


def g_block_sizes(codes: np.ndarray, start: int, n: int) -> tuple[np.ndarray, np.ndarray]:
    """Sizes |G^L_j| and |G^R_j| of one stretch, in block order."""
    end = start + 3 * n
    stack: list[int] = []
    partner = np.full(len(codes), -1, dtype=np.int64)
    top = np.full(len(codes), -1, dtype=np.int64)
    for i, c in enumerate(codes.tolist()):
        if c == 0:
            stack.append(i)
        elif c == 1:
            if stack:
                j = stack.pop()
                partner[i], partner[j] = j, i
        elif stack:
            top[i] = stack[-1]
    idx = np.arange(start, end)
    seg = codes[start:end]
    rs = idx[seg == 1]
    Lq = rs[(partner[rs] >= 0) & (partner[rs] < start)]
    bs = idx[seg == 0]
    Rp = bs[partner[bs] >= end][::-1]
    cnt = np.bincount(top[(codes == 2) & (top >= 0)], minlength=len(codes))
    return cnt[partner[Lq]], cnt[Rp]


def reversal_sup_distance(n: int, samples: int, seed: int | SeedSpec = 0) -> dict:
    """sup_t of the gap between the scaled cw blue walk and the reversed ccw one.

    Soft diagnostic on uniform W_n words; there is no pass/fail.
    """
    from .codec import ExplorationSpec, decode, encode
    from .sampling import dp_samples
    from .words import walk_of_word

    sc = np.array([1 / math.sqrt(4 * n), 1 / math.sqrt(2 * n)])
    sups = []
    for w in dp_samples(n, samples, seed):
        a = np.array(walk_of_word(w).points, dtype=float)
        c = np.array(encode(decode(w), ExplorationSpec("b", "ccw"), validate=False).walk.points,
                     dtype=float)
        sups.append(float(np.abs((a - c[::-1]) * sc).max()))
    return {"n": n, "samples": samples, "mean_sup": float(np.mean(sups)),
            "median_sup": float(np.median(sups)), "sups": sups}
