"""Command-line interface: ``woodwalk <subcommand> ...``.

Data goes to stdout, logs to stderr.  Exit status is 0 on success, 1 when a
check fails and 2 on a usage error.  JSON reports carry the configuration
that produced them.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
import time
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .kernels import BACKEND

log = logging.getLogger("woodwalk")


@dataclass
class Config:
    command: str
    seed: int = 0
    workers: int = 1
    trials: int | None = None
    memory: int | None = None
    outputs: dict = field(default_factory=dict)
    format: str | None = None
    extra: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["backend"] = BACKEND
        d["version"] = __version__
        return d


class CheckFailed(Exception):
    pass


def _emit(obj) -> None:
    sys.stdout.write(json.dumps(obj, default=_json_default) + "\n")


def _json_default(o):
    if isinstance(o, (np.integer,)):
        return int(o)
    if isinstance(o, (np.floating,)):
        return float(o)
    if isinstance(o, np.ndarray):
        return o.tolist()
    if isinstance(o, (set, frozenset, tuple)):
        return list(o)
    return str(o)


def _load_map(args):
    from .codec import decode
    from .maps import WoodedTriangulation

    if getattr(args, "word", None):
        return decode(args.word)
    if getattr(args, "input", None):
        return WoodedTriangulation.from_json(Path(args.input).read_text())
    raise SystemExit("one of --word or --input is required")


# -- subcommands --------------------------------------------------------------

def cmd_count(args, cfg):
    from .sampling import count_Wn_closed, dp_count

    v = dp_count(args.n) if args.method == "dp" else count_Wn_closed(args.n)
    print(v)


def cmd_enumerate(args, cfg):
    from .sampling import enumerate_Wn

    for w in enumerate_Wn(args.n, cap=args.cap):
        print(w)


def cmd_sample(args, cfg):
    from .sampling import build_count_table, dp_samples, rejection_sample

    words = []
    if args.method == "rejection":
        for i in range(args.count):
            r = rejection_sample(args.n, args.seed, budget=args.trials or 10 ** 9, substream=i)
            words.append((r.word.letters, {"trials": r.trials, "substream": i}))
    else:
        mode = args.mode if args.mode != "auto" else ("exact" if args.n <= 100 else "float")
        table = build_count_table(args.n, mode, args.memory or (2 << 30))
        for i, w in enumerate(dp_samples(args.n, args.count, args.seed, mode, table=table)):
            meta = {"substream": 0, "index": i, "mode": mode}
            if mode == "float":
                meta["uniformity"] = "approximate"
                meta["relative_error_bound"] = table.relative_error_bound
            words.append((w.letters, meta))
    for w, meta in words:
        if args.format == "words":
            print(w)
        else:
            _emit({"word": w, "n": args.n, "method": args.method, "seed": args.seed, **meta})


def cmd_decode(args, cfg):
    from .codec import decode

    s = decode(args.word)
    text = s.to_json()
    if args.output:
        Path(args.output).write_text(text + "\n")
    print(text)


def cmd_encode(args, cfg):
    from .codec import ExplorationSpec, encode

    s = _load_map(args)
    enc = encode(s, ExplorationSpec(args.color, args.direction))
    print(enc.word.letters)


def cmd_embed(args, cfg):
    from .embed import emit_svg, schnyder_embedding, validate_embedding

    s = _load_map(args)
    E = schnyder_embedding(s, validate=False)
    rep = validate_embedding(E, s)
    if args.svg:
        Path(args.svg).write_text(emit_svg(E, s, fill_faces=args.fill))
    if args.csv:
        Path(args.csv).write_text(E.to_csv())
    _emit({"config": cfg.to_dict(), "n": s.n, "valid": rep.valid, "crossings": rep.crossings,
           "summary": rep.summary()})
    if not rep.valid:
        raise CheckFailed(rep.summary())


def cmd_uiwt(args, cfg):
    from .sampling import PocketNotClosed, stationary_window, uiwt_local_graph, uiwt_pocket

    win = stationary_window(args.window, args.seed)
    g = uiwt_local_graph(win)
    out = {"config": cfg.to_dict(), "window": args.window, "word": win.letters,
           "edges": len(g.edges), "incomplete": len(g.incomplete), "pockets": []}
    for m in range(1, args.pockets + 1):
        try:
            p = uiwt_pocket(win, m, g)
            out["pockets"].append({"m": m, "j": p.j, "k": p.k, "edges": len(p.edges),
                                   "complete": p.complete})
        except PocketNotClosed as e:
            out["pockets"].append({"m": m, "closed": False, "reason": str(e)})
            break
    _emit(out)


def cmd_stats(args, cfg):
    from . import diagnostics as dg
    from .excursions import (check_dual_identities, check_forward_identities,
                             sample_overshoots)
    from .sampling import green_indegree_samples, stationary_window

    k = args.samples
    what = args.what
    if what == "overshoot":
        d, trunc = sample_overshoots(k, args.seed)
        rep = dg.distribution_fit(d, "geom").to_dict()
        rep["truncated"] = trunc
        ok = rep["passed"]
    elif what == "green":
        g = green_indegree_samples(k, args.seed)
        rep = dg.distribution_fit(g.values, "geom-1").to_dict()
        rep["truncated"] = g.truncated
        ok = rep["passed"]
    elif what == "ratio":
        d, trunc = sample_overshoots(k, args.seed)
        rep = dg.ratio_check(d).to_dict()
        ok = rep["passed"] is not False
    elif what == "moments":
        f = dg.moments_check(k, args.seed)
        r = dg.moments_check(k, args.seed, reverse=True)
        rep = {"forward": f.to_dict(), "reverse": r.to_dict()}
        ok = f.passed and r.passed
    elif what == "covariance":
        c = dg.covariance_check(args.n or 20000, k, args.seed)
        rep = c.to_dict()
        ok = c.passed
    elif what == "reversal":
        r = dg.reversal_closeness(args.n or 10000, k, args.seed)
        rep = r.to_dict()
        ok = r.passed
    elif what == "sides":
        m = args.window
        fails, checked = [], 0
        for s in range(k):
            win = stationary_window(m, args.seed, s)
            T = next((i for i in range(0, m + 1) if win[i] == "b"), None)
            if T is not None:
                c = check_forward_identities(win, T)
                checked += c.checked
                fails += [f"window {s}: {x}" for x in c.failures]
            T = next((i for i in range(0, -m - 1, -1) if win[i] == "b"), None)
            if T is not None:
                c = check_dual_identities(win, T)
                checked += c.checked
                fails += [f"window {s}: {x}" for x in c.failures]
        rep = {"identities_checked": checked, "failures": fails[:20], "passed": not fails}
        ok = not fails
    else:  # pragma: no cover - argparse restricts choices
        raise SystemExit(2)
    _emit({"config": cfg.to_dict(), "stat": what, "report": rep, "passed": bool(ok)})
    if not ok:
        raise CheckFailed(what)


def cmd_exponent(args, cfg):
    from .diagnostics import exponent_fit
    from .sampling import acceptance_probability_estimate, exact_acceptance_probability

    ns = [int(x) for x in args.n_list.split(",")]
    ests = []
    for n in ns:
        e = acceptance_probability_estimate(n, args.trials, args.seed, workers=args.workers)
        ests.append(e)
        d = e.to_dict()
        d["exact"] = float(exact_acceptance_probability(n))
        _emit(d)
    try:
        fit = exponent_fit(ests)
    except ValueError as e:
        _emit({"config": cfg.to_dict(), "fit": None, "reason": str(e)})
        return
    _emit({"config": cfg.to_dict(), "fit": fit.to_dict(), "passed": fit.passed})
    if not fit.passed:
        raise CheckFailed("exponent fit outside the bands")


def cmd_verify(args, cfg):
    from .verify import run_suite

    suites = ["exact", "stat"] if args.suite == "all" else [args.suite]
    ok = True
    for s in suites:
        res = run_suite(s, seed=args.seed, quick=args.quick)
        _emit({"config": cfg.to_dict(), "suite": s, **res})
        ok = ok and res["passed"]
    if not ok:
        raise CheckFailed("verify")


# -- parser -------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="woodwalk", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"woodwalk {__version__} ({BACKEND})")
    p.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, seed=True, workers=False):
        if seed:
            sp.add_argument("--seed", type=int, default=0)
        if workers:
            sp.add_argument("--workers", type=int, default=1)

    sp = sub.add_parser("count", help="|W_n|")
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--method", choices=["closed", "dp"], default="closed")
    sp.set_defaults(func=cmd_count)

    sp = sub.add_parser("enumerate", help="list W_n")
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--cap", type=int, default=6)
    sp.set_defaults(func=cmd_enumerate)

    sp = sub.add_parser("sample", help="uniform W_n words")
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--count", type=int, default=1)
    sp.add_argument("--method", choices=["rejection", "dp"], default="dp")
    sp.add_argument("--mode", choices=["auto", "exact", "float"], default="auto")
    sp.add_argument("--trials", type=int, help="rejection budget per sample")
    sp.add_argument("--memory", type=int, help="DP memory budget in bytes")
    sp.add_argument("--format", choices=["jsonl", "words"], default="jsonl")
    common(sp)
    sp.set_defaults(func=cmd_sample)

    sp = sub.add_parser("decode", help="word -> map JSON")
    sp.add_argument("--word", required=True)
    sp.add_argument("--output")
    sp.set_defaults(func=cmd_decode)

    sp = sub.add_parser("encode", help="map -> word")
    g = sp.add_mutually_exclusive_group(required=True)
    g.add_argument("--input")
    g.add_argument("--word")
    sp.add_argument("--color", choices=["b", "r", "g"], default="b")
    sp.add_argument("--direction", choices=["cw", "ccw"], default="cw")
    sp.set_defaults(func=cmd_encode)

    sp = sub.add_parser("embed", help="Schnyder grid embedding")
    g = sp.add_mutually_exclusive_group(required=True)
    g.add_argument("--input")
    g.add_argument("--word")
    sp.add_argument("--svg")
    sp.add_argument("--csv")
    sp.add_argument("--fill", action="store_true", help="shade faces in the SVG")
    sp.set_defaults(func=cmd_embed)

    sp = sub.add_parser("uiwt", help="local graph of a stationary window")
    sp.add_argument("--window", type=int, required=True)
    sp.add_argument("--pockets", type=int, default=3)
    common(sp)
    sp.set_defaults(func=cmd_uiwt)

    sp = sub.add_parser("stats", help="statistical checks")
    sp.add_argument("what", choices=["overshoot", "green", "ratio", "moments", "covariance",
                                     "reversal", "sides"])
    sp.add_argument("--window", type=int, default=500)
    sp.add_argument("--samples", type=int, default=10000)
    sp.add_argument("--n", type=int)
    common(sp)
    sp.set_defaults(func=cmd_stats)

    sp = sub.add_parser("exponent", help="acceptance probability against n")
    sp.add_argument("--n-list", default="10,14,20")
    sp.add_argument("--trials", type=int, default=10 ** 6)
    common(sp, workers=True)
    sp.set_defaults(func=cmd_exponent)

    sp = sub.add_parser("verify", help="run the exact and/or statistical suite")
    sp.add_argument("--suite", choices=["exact", "stat", "all"], default="exact")
    sp.add_argument("--quick", action="store_true")
    common(sp)
    sp.set_defaults(func=cmd_verify)
    return p


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0) if e.code in (0, None) else 2
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        stream=sys.stderr, format="%(levelname)s %(message)s")
    cfg = Config(args.command, seed=getattr(args, "seed", 0), workers=getattr(args, "workers", 1),
                 trials=getattr(args, "trials", None), memory=getattr(args, "memory", None),
                 outputs={k: getattr(args, k) for k in ("svg", "csv", "output")
                          if getattr(args, k, None)},
                 format=getattr(args, "format", None),
                 extra={k: v for k, v in vars(args).items()
                        if k not in ("func", "command", "seed", "workers", "trials", "memory",
                                     "format", "verbose") and v is not None})
    t0 = time.perf_counter()
    try:
        args.func(args, cfg)
    except CheckFailed as e:
        log.error("check failed: %s", e)
        return 1
    except (ValueError, KeyError, LookupError, MemoryError) as e:
        print(f"woodwalk {args.command}: {e}", file=sys.stderr)
        return 2
    log.info("%s finished in %.2fs", args.command, time.perf_counter() - t0)
    return 0


def main() -> None:
    sys.exit(run())
