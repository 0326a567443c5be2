"""Exact and statistical self-check suites.

Each check returns a ``Result``; ``run_suite`` collects them into a JSON-ready
summary.  ``quick`` shrinks the sample sizes so a suite finishes in seconds,
at the cost of power.
"""

from __future__ import annotations

import time
from collections import Counter
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from typing import Callable

from scipy import stats

from .codec import decode, dual_profile, encode, same_wood
from .embed import schnyder_embedding, validate_embedding
from .maps import relabel
from .rng import SeedSpec, as_seedspec
from .sampling import (build_count_table, chain_probability, count_Wn_closed, dp_count,
                       dp_samples, enumerate_Wn, rejection_sample, stationary_window)


@dataclass
class Result:
    name: str
    passed: bool
    detail: dict = field(default_factory=dict)
    seconds: float = 0.0

    def to_dict(self) -> dict:
        return asdict(self)

    def line(self) -> str:
        return f"[{'PASS' if self.passed else 'FAIL'}] {self.name} ({self.seconds:.1f}s): " + \
            ", ".join(f"{k}={v}" for k, v in self.detail.items() if not isinstance(v, dict))


def _timed(name: str, fn: Callable[[], tuple[bool, dict]]) -> Result:
    t0 = time.perf_counter()
    ok, detail = fn()
    return Result(name, bool(ok), detail, time.perf_counter() - t0)


def all_words(nmax: int) -> list[str]:
    return [w for n in range(1, nmax + 1) for w in enumerate_Wn(n)]


# -- exact --------------------------------------------------------------------

def check_counting(nmax: int = 5) -> Result:
    def go():
        rows = [(len(enumerate_Wn(n)), dp_count(n), count_Wn_closed(n)) for n in range(1, nmax + 1)]
        ok = all(a == b == c for a, b, c in rows) and [r[0] for r in rows] == [1, 3, 14, 84, 594][:nmax]
        return ok, {"counts": [r[0] for r in rows]}
    return _timed("exact counting", go)


def check_bijection(map_nmax: int = 4, word_nmax: int = 5) -> Result:
    def go():
        bad_words = [w for w in all_words(word_nmax) if encode(decode(w)).word.letters != w]
        nwords = sum(count_Wn_closed(n) for n in range(1, word_nmax + 1))
        maps = [decode(w) for w in all_words(map_nmax)]
        bad_maps = 0
        for s in maps:
            for k in range(3):  # the relabelled woods are distinct objects on the same map
                t = relabel(s, k) if k else s
                if not same_wood(decode(encode(t).word), t):
                    bad_maps += 1
        return not bad_words and not bad_maps, {
            "words": nwords, "word_failures": len(bad_words),
            "maps": len(maps), "woods_checked": 3 * len(maps), "map_failures": bad_maps}
    return _timed("bijection", go)


def check_chain_law(nmax: int = 3) -> Result:
    def go():
        bad = [w for n in range(1, nmax + 1) for w in enumerate_Wn(n)
               if chain_probability(w).exact != Fraction(2, 16 ** n)]
        return not bad, {"words": sum(count_Wn_closed(n) for n in range(1, nmax + 1)),
                         "failures": len(bad)}
    return _timed("chain law on W_n", go)


def _uniform_p(words: list[str], n: int) -> float:
    c = Counter(words)
    support = enumerate_Wn(n)
    if set(c) - set(support):
        return 0.0
    return float(stats.chisquare([c.get(w, 0) for w in support]).pvalue)


def check_sampler_uniformity(samples: int = 50_000, seed: int | SeedSpec = 0,
                             alpha: float = 0.01) -> Result:
    def go():
        out = {}
        for n in (2, 3):
            rej = [rejection_sample(n, seed, substream=i).word.letters for i in range(samples)]
            dp = [w.letters for w in dp_samples(n, samples, seed, mode="exact")]
            out[f"rejection_p_n{n}"] = round(_uniform_p(rej, n), 4)
            out[f"dp_p_n{n}"] = round(_uniform_p(dp, n), 4)
        return all(v > alpha for v in out.values()), {"samples": samples, **out}
    return _timed("sampler uniformity", go)


def check_dual_profiles(nmax: int = 4, dp_n: int = 50, dp_count_: int = 200,
                        seed: int | SeedSpec = 0) -> Result:
    def go():
        words = all_words(nmax) + [w.letters for w in dp_samples(dp_n, dp_count_, seed, "exact")]
        blue = red = 0
        for w in words:
            p = dual_profile(w)
            blue += not p.blue_matches()
            red += not p.red_matches()
        return blue == red == 0, {"words": len(words), "blue_failures": blue, "red_failures": red}
    return _timed("dual flow-line lengths", go)


def check_identities(windows: int = 10_000, m: int = 300, seed: int | SeedSpec = 0) -> Result:
    from .excursions import check_dual_identities, check_forward_identities

    def go():
        checked, fails, first = 0, 0, None
        for s in range(windows):
            win = stationary_window(m, seed, s)
            for rng_, fn in ((range(0, m + 1), check_forward_identities),
                             (range(0, -m - 1, -1), check_dual_identities)):
                T = next((i for i in rng_ if win[i] == "b"), None)
                if T is None:
                    continue
                c = fn(win, T)
                checked += c.checked
                if c.failures:
                    fails += 1
                    first = first or f"window {s}: {c.failures[0]}"
        d = {"windows": windows, "identities": checked, "failing_windows": fails}
        if first:
            d["first_failure"] = first
        return fails == 0 and checked > 0, d
    return _timed("excursion index identities", go)


def check_embeddings(nmax: int = 4, big_n: int = 500, big_count: int = 100,
                     seed: int | SeedSpec = 0) -> Result:
    def go():
        maps = [decode(w) for w in all_words(nmax)]
        table = build_count_table(big_n, "float") if big_count else None
        if big_count:
            maps += [decode(w) for w in dp_samples(big_n, big_count, seed, "float", table=table)]
        bad, crossings = 0, 0
        for s in maps:
            rep = validate_embedding(schnyder_embedding(s, validate=False), s)
            bad += not rep.valid
            crossings += rep.crossings
        return bad == 0, {"maps": len(maps), "invalid": bad, "crossings": crossings}
    return _timed("grid embedding", go)


# -- statistical ----------------------------------------------------------------

def check_exponent(total_trials: int = 10 ** 7, seed: int | SeedSpec = 0, workers: int = 1,
                   ns: tuple[int, ...] = (10, 14, 20)) -> Result:
    from .diagnostics import exponent_fit
    from .sampling import acceptance_probability_estimate

    def go():
        ests = [acceptance_probability_estimate(n, total_trials // len(ns), seed, workers)
                for n in ns]
        fit = exponent_fit(ests)
        return fit.passed, {"slope": round(fit.slope, 3), "slope_ok": fit.slope_ok,
                            "prefactor": round(fit.prefactor_fixed, 3),
                            "prefactor_ok": fit.prefactor_ok,
                            "exact_slope": round(fit.exact_slope, 3)}
    return _timed("acceptance exponent", go)


def check_moments(count: int = 10 ** 6, seed: int | SeedSpec = 0) -> Result:
    from .diagnostics import moments_check
    from .excursions import TARGETS, analytic_moments

    def go():
        exact_f = tuple(analytic_moments(False)[2:]) == TARGETS.forward_moments
        exact_r = tuple(analytic_moments(True)[2:]) == TARGETS.reverse_moments
        f, r = moments_check(count, seed), moments_check(count, seed, reverse=True)
        emp = {c.name + "_fwd": round(c.estimate, 4) for c in f.checks[:3]}
        emp.update({c.name + "_rev": round(c.estimate, 4) for c in r.checks[:3]})
        return exact_f and exact_r and f.passed and r.passed, {
            "analytic_forward": exact_f, "analytic_reverse": exact_r, **emp}
    return _timed("grouped-walk moments", go)


def check_covariance(n: int = 20_000, samples: int = 2000, seed: int | SeedSpec = 0) -> Result:
    from .diagnostics import covariance_check

    def go():
        rep = covariance_check(n, samples, seed)
        return rep.passed, {c.name: round(c.estimate, 4) for c in rep.checks}
    return _timed("endpoint covariance", go)


def check_geometric_laws(samples: int = 10 ** 5, seed: int | SeedSpec = 0) -> Result:
    from .diagnostics import distribution_fit, ratio_check
    from .excursions import TARGETS, sample_overshoots
    from .sampling import green_indegree_samples

    def go():
        d, dtrunc = sample_overshoots(samples, seed)
        g = green_indegree_samples(samples, seed)
        fd = distribution_fit(d, "geom")
        fg = distribution_fit(g.values, "geom-1")
        rr = ratio_check(d)
        mean_ok = abs(rr.mean_overshoot - TARGETS.overshoot_mean) <= 0.05
        p_ok = abs(rr.p_hat - TARGETS.p) <= 0.01
        return fd.passed and fg.passed and mean_ok and p_ok, {
            "overshoot_p": round(fd.p_chi2, 4), "green_p": round(fg.p_chi2, 4),
            "mean_overshoot": round(rr.mean_overshoot, 4), "p_hat": round(rr.p_hat, 4),
            "truncated": dtrunc + g.truncated}
    return _timed("overshoot and green laws", go)


EXACT: dict[str, Callable[..., Result]] = {
    "counting": check_counting,
    "bijection": check_bijection,
    "chain_law": check_chain_law,
    "dual_profiles": check_dual_profiles,
    "embedding": check_embeddings,
}

STAT: dict[str, Callable[..., Result]] = {
    "uniformity": check_sampler_uniformity,
    "exponent": check_exponent,
    "moments": check_moments,
    "covariance": check_covariance,
    "geometric_laws": check_geometric_laws,
    "identities": check_identities,
}

QUICK = {
    "dual_profiles": {"dp_count_": 20},
    "embedding": {"big_n": 100, "big_count": 5},
    "uniformity": {"samples": 5000},
    "exponent": {"total_trials": 10 ** 6},
    "moments": {"count": 10 ** 5},
    "covariance": {"samples": 1000},
    "geometric_laws": {"samples": 10 ** 4},
    "identities": {"windows": 500},
}

_SEEDED = {"dual_profiles", "embedding", "uniformity", "exponent", "moments", "covariance",
           "geometric_laws", "identities"}


def run_suite(suite: str, seed: int = 0, quick: bool = False) -> dict:
    table = {"exact": EXACT, "stat": STAT}[suite]
    results = []
    for name, fn in table.items():
        kw = dict(QUICK.get(name, {})) if quick else {}
        if name in _SEEDED:
            kw["seed"] = as_seedspec(seed)
        results.append(fn(**kw))
    return {"passed": all(r.passed for r in results), "quick": quick,
            "results": [r.to_dict() for r in results]}

