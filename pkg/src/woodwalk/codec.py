"""The word/map bijection and its word-level shadows.

``decode`` builds the wooded triangulation of a W_n word; ``encode`` walks
around one of the three trees (clockwise or counterclockwise) and records a
letter each time an edge is met for the second time.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass

from .maps import (AB, AG, AR, COLORS, NEXT_COLOR, OUTER_COLOR, PREV_COLOR, ROOT_OF,
                   Edge, MbrMap, WoodedTriangulation, build_mbr, dual_tree, require_valid)
from .words import LatticeWalk, Word, as_word, require_Wn, walk_of_word

_PREV_ROOT = {"b": AG, "r": AB, "g": AR}
_NEXT_ROOT = {"b": AR, "r": AG, "g": AB}


@dataclass(frozen=True)
class ExplorationSpec:
    color: str = "b"
    direction: str = "cw"

    def __post_init__(self):
        if self.color not in COLORS:
            raise ValueError(f"color must be one of b, r, g, not {self.color!r}")
        if self.direction not in ("cw", "ccw"):
            raise ValueError(f"direction must be cw or ccw, not {self.direction!r}")


@dataclass(frozen=True)
class Encoding:
    spec: ExplorationSpec
    word: Word
    edges: tuple[int, ...]  # edge id behind each letter

    @property
    def walk(self) -> LatticeWalk:
        return walk_of_word(self.word)


# -- decode -------------------------------------------------------------------

@dataclass(frozen=True)
class _Structure:
    gb: list[int]        # partner of each g / b under the gb matching (0 if none)
    br: list[int]        # partner of each b / r under the br matching
    enc_gb: list[int]    # for b: closer of the innermost gb pair strictly around it
    enc_br: list[int]    # for g: opener of the innermost br pair strictly around it
    next_g: list[int]    # first g strictly after each index (0 if none)


def _structure(s: str) -> _Structure:
    m = len(s)
    gb = [0] * (m + 2)
    br = [0] * (m + 2)
    enc_gb_open = [0] * (m + 2)
    enc_br = [0] * (m + 2)
    sg: list[int] = []
    sb: list[int] = []
    for i in range(1, m + 1):
        c = s[i - 1]
        if c == "g":
            enc_br[i] = sb[-1] if sb else 0
            sg.append(i)
        elif c == "b":
            if sg:
                j = sg.pop()
                gb[i], gb[j] = j, i
            enc_gb_open[i] = sg[-1] if sg else 0
            sb.append(i)
        else:
            if sb:
                j = sb.pop()
                br[i], br[j] = j, i
    enc_gb = [gb[j] if j else 0 for j in enc_gb_open]
    next_g = [0] * (m + 2)
    nxt = 0
    for i in range(m, -1, -1):
        next_g[i] = nxt
        if i and s[i - 1] == "g":
            nxt = i
    return _Structure(gb, br, enc_gb, enc_br, next_g)


def decode(w: Word | str) -> WoodedTriangulation:
    w = require_Wn(w)
    s = w.letters
    n = w.n
    st = _structure(s)
    edges: list[Edge] = []
    for i in range(1, 3 * n + 1):
        c = s[i - 1]
        if c == "b":
            k = st.enc_gb[i]
            edges.append(Edge(i, k if k else AB, "b"))
        elif c == "r":
            tail = st.br[i]
            j = st.next_g[i]
            edges.append(Edge(tail, st.gb[j] if j else AR, "r"))
        else:
            tail = st.gb[i]
            j = st.enc_br[i]
            edges.append(Edge(tail, j if j else AG, "g"))
    e_abar, e_arag, e_agab = 3 * n, 3 * n + 1, 3 * n + 2
    edges += [Edge(AB, AR, OUTER_COLOR), Edge(AR, AG, OUTER_COLOR), Edge(AG, AB, OUTER_COLOR)]

    ins: dict[tuple[int, str], list[int]] = {}
    for e in range(3 * n):
        ed = edges[e]
        ins.setdefault((ed.head, ed.color), []).append(e)
    rot: dict[int, list[int]] = {}
    for i in range(1, 3 * n + 1):
        if s[i - 1] != "b":
            continue
        rot[i] = ([i - 1] + ins.get((i, "r"), [])
                  + [st.gb[i] - 1] + ins.get((i, "b"), [])
                  + [st.br[i] - 1] + ins.get((i, "g"), [])[::-1])
    rot[AB] = [e_agab] + ins.get((AB, "b"), []) + [e_abar]
    rot[AR] = [e_abar] + ins.get((AR, "r"), []) + [e_arag]
    rot[AG] = [e_arag] + ins.get((AG, "g"), [])[::-1] + [e_agab]
    return WoodedTriangulation(n, edges, rot, word=s)


# -- encode -------------------------------------------------------------------

@dataclass(frozen=True)
class ContourEvent:
    kind: str   # "traverse" | "cross"
    edge: int
    vertex: int  # vertex the walk stands on after the event


def contour_events(s: WoodedTriangulation, color: str = "b",
                   direction: str = "cw") -> list[ContourEvent]:
    """Every traversal of a tree edge and crossing of a non-tree edge, in order."""
    root = ROOT_OF[color]
    x0 = _PREV_ROOT[color]
    if direction == "cw":
        e0 = s.outer_edge(x0, root)
        step = s.cw_next
    else:
        e0 = s.outer_edge(x0, _NEXT_ROOT[color])
        step = s.ccw_next
    tree = set(s.edges_of(color))
    tree.update(e for e in s.rotation[root] if s.edges[e].is_outer)
    out: list[ContourEvent] = []
    x, e = x0, e0
    limit = 4 * len(s.edges) + 8
    while True:
        e = step(x, e)
        if e in tree:
            x = s.edges[e].other(x)
            out.append(ContourEvent("traverse", e, x))
        else:
            out.append(ContourEvent("cross", e, x))
        if (x, e) == (x0, e0):
            return out
        if len(out) > limit:
            raise RuntimeError("contour walk failed to close; rotation system is inconsistent")


def encode(s: WoodedTriangulation, spec: ExplorationSpec | None = None, *,
           validate: bool = True) -> Encoding:
    spec = spec or ExplorationSpec()
    if validate:
        require_valid(s)
    c = spec.color
    if spec.direction == "cw":
        letter = {c: "b", NEXT_COLOR[c]: "r", PREV_COLOR[c]: "g"}
    else:
        letter = {c: "b", NEXT_COLOR[c]: "g", PREV_COLOR[c]: "r"}
    seen: dict[int, int] = {}
    letters, edges = [], []
    for ev in contour_events(s, c, spec.direction):
        ed = s.edges[ev.edge]
        if ed.is_outer:
            continue
        k = seen.get(ev.edge, 0) + 1
        seen[ev.edge] = k
        if k == 2:
            letters.append(letter[ed.color])
            edges.append(ev.edge)
    return Encoding(spec, Word("".join(letters)), tuple(edges))


def canonical_word(s: WoodedTriangulation) -> str:
    return encode(s).word.letters


def _cyclic_equal(a: list[int], b: list[int]) -> bool:
    if len(a) != len(b):
        return False
    if not a:
        return True
    try:
        k = b.index(a[0])
    except ValueError:
        return False
    return b[k:] + b[:k] == a


def same_wood(s: WoodedTriangulation, t: WoodedTriangulation) -> bool:
    """Colored, rooted isomorphism of two woods, vertex ids aside.

    The blue exploration pairs up inner edges; the outer vertices are fixed.
    The pairing must carry colors, endpoints and clockwise rotations across.
    """
    if s.n != t.n:
        return False
    es = encode(s, validate=False)
    et = encode(t, validate=False)
    if es.word != et.word:
        return False
    emap = dict(zip(es.edges, et.edges))
    for u, v in ((AB, AR), (AR, AG), (AG, AB)):
        emap[s.outer_edge(u, v)] = t.outer_edge(u, v)
    vmap = {x: x for x in (AB, AR, AG)}
    for e, f in emap.items():
        a, b = s.edges[e], t.edges[f]
        if a.color != b.color:
            return False
        for x, y in ((a.tail, b.tail), (a.head, b.head)):
            if vmap.setdefault(x, y) != y:
                return False
    if len(set(vmap.values())) != len(vmap):
        return False
    return all(_cyclic_equal([emap[e] for e in s.rotation[v]], list(t.rotation[vmap[v]]))
               for v in s.rotation)


# -- word-level shadows -------------------------------------------------------

def green_set(w: Word | str, i: int) -> list[int]:
    w = as_word(w)
    if w[i] != "b":
        raise ValueError(f"w_{i} is {w[i]!r}, not b")
    L = walk_of_word(w).L
    base = w.first - 1  # L[k - base] is the walk value after letter k
    li = L[i - base]
    out = []
    for k in range(i + 1, w.last + 1):
        lk = L[k - base]
        if lk < li:
            break
        if lk == li and w[k] == "g":
            out.append(k)
    return out


@dataclass(frozen=True)
class DualProfileRow:
    index: int
    letter: str
    Lb: int
    blue_dual_len: int
    red_dual_len: int
    rR: int
    red_ccw_letter: str
    red_ccw_dual_len: int


@dataclass(frozen=True)
class DualProfile:
    rows: tuple[DualProfileRow, ...]

    def blue_matches(self) -> bool:
        return all(r.Lb == r.blue_dual_len for r in self.rows)

    def red_matches(self) -> bool:
        return all(r.rR == r.red_ccw_dual_len for r in self.rows)

    def to_csv(self) -> str:
        buf = io.StringIO()
        out = csv.writer(buf, lineterminator="\n")
        out.writerow(["index", "letter", "Lb", "blue_dual_len", "red_dual_len",
                      "rR", "red_ccw_letter", "red_ccw_dual_len"])
        for r in self.rows:
            out.writerow([r.index, r.letter, r.Lb, r.blue_dual_len, r.red_dual_len,
                          r.rR, r.red_ccw_letter, r.red_ccw_dual_len])
        return buf.getvalue()


def dual_profile(w: Word | str, s: WoodedTriangulation | None = None,
                 m: MbrMap | None = None) -> DualProfile:
    """Dual flow-line lengths next to the walk coordinates they should equal.

    Row ``i`` holds ``L^b_i`` and the dual blue depth of ``F(w_i)``, the dual
    red depth of ``F~(w_i)``, and for the counterclockwise red exploration
    its first coordinate after step ``i`` and the dual red depth of
    ``F~`` of the edge behind its ``i``-th letter.
    """
    w = require_Wn(w)
    s = s if s is not None else decode(w)
    m = m if m is not None else build_mbr(s)
    blue = dual_tree(m, "b").depths
    red = dual_tree(m, "r").depths
    L = walk_of_word(w).L
    rz = encode(s, ExplorationSpec("r", "ccw"), validate=False)
    rR = walk_of_word(rz.word).L
    rows = []
    for i in range(1, len(w) + 1):
        e = i - 1
        er = rz.edges[i - 1]
        rows.append(DualProfileRow(i, w[i], L[i], blue[m.F[e]], red[m.Ftilde[e]],
                                   rR[i], rz.word[i], red[m.Ftilde[er]]))
    return DualProfile(tuple(rows))
