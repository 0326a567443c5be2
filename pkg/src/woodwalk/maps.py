"""Wooded triangulations as rotation-system maps.

Vertices are integers.  Inner vertices carry the 1-based word index of their
b symbol when the map comes from a word; the outer vertices are the negative
constants ``AB``, ``AR``, ``AG``.  Every vertex stores its incident edge ids in
clockwise order, and faces are traced from that data alone.

Darts are pairs ``(edge_id, origin)``.  The face to the left of the dart
``u -> v`` continues along the clockwise successor of the edge at ``v``.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable

AB, AR, AG = -1, -2, -3
OUTER = (AB, AR, AG)
OUTER_NAMES = {AB: "Ab", AR: "Ar", AG: "Ag"}
_OUTER_IDS = {v: k for k, v in OUTER_NAMES.items()}
COLORS = ("b", "r", "g")
ROOT_OF = {"b": AB, "r": AR, "g": AG}
COLOR_OF_ROOT = {AB: "b", AR: "r", AG: "g"}
NEXT_COLOR = {"b": "r", "r": "g", "g": "b"}
PREV_COLOR = {"b": "g", "r": "b", "g": "r"}
OUTER_COLOR = "outer"


class MapError(ValueError):
    pass


class PreconditionError(MapError):
    pass


class NonSimplePathError(MapError):
    pass


class SchnyderError(MapError):
    def __init__(self, report: "SchnyderReport"):
        super().__init__(f"not a valid wooded triangulation: {report.summary()}")
        self.report = report


@dataclass(frozen=True)
class Edge:
    tail: int
    head: int
    color: str | None  # "b" | "r" | "g" | "outer" | None (uncolored)

    def other(self, v: int) -> int:
        if v == self.tail:
            return self.head
        if v == self.head:
            return self.tail
        raise ValueError(f"vertex {v} is not on edge {self}")

    @property
    def is_outer(self) -> bool:
        return self.color == OUTER_COLOR


def vertex_name(v: int) -> str | int:
    return OUTER_NAMES.get(v, v)


def _vertex_from_json(x) -> int:
    if isinstance(x, str):
        if x in _OUTER_IDS:
            return _OUTER_IDS[x]
        return int(x)
    return int(x)


class _RotationMap:
    """Shared plumbing for colored and uncolored maps."""

    def __init__(self, n: int, edges: Iterable[Edge], rotation: dict[int, Iterable[int]]):
        self.n = n
        self.edges: tuple[Edge, ...] = tuple(edges)
        self.rotation: dict[int, tuple[int, ...]] = {v: tuple(r) for v, r in rotation.items()}

    @cached_property
    def _pos(self) -> dict[tuple[int, int], int]:
        return {(v, e): k for v, rot in self.rotation.items() for k, e in enumerate(rot)}

    @property
    def inner_vertices(self) -> list[int]:
        return sorted(v for v in self.rotation if v not in OUTER)

    @property
    def vertices(self) -> list[int]:
        return self.inner_vertices + [v for v in OUTER if v in self.rotation]

    def cw_next(self, v: int, e: int) -> int:
        rot = self.rotation[v]
        return rot[(self._pos[v, e] + 1) % len(rot)]

    def ccw_next(self, v: int, e: int) -> int:
        rot = self.rotation[v]
        return rot[(self._pos[v, e] - 1) % len(rot)]

    def outer_edge(self, u: int, v: int) -> int:
        for e in self.rotation[u]:
            ed = self.edges[e]
            if ed.is_outer and ed.other(u) == v:
                return e
        raise KeyError(f"no outer edge between {vertex_name(u)} and {vertex_name(v)}")

    def faces(self, allowed: set[int] | None = None) -> "FaceTrace":
        return trace_faces(self, allowed)


@dataclass
class FaceTrace:
    faces: list[list[tuple[int, int]]]
    dart_face: dict[tuple[int, int], int]

    def left(self, e: int, origin: int) -> int:
        return self.dart_face[e, origin]


def trace_faces(m: _RotationMap, allowed: set[int] | None = None,
                first: tuple[int, int] | None = None) -> FaceTrace:
    """Left faces of all darts of ``m`` restricted to the ``allowed`` edges.

    Face ids follow the order in which faces are first met; passing ``first``
    makes that dart's face number 0.
    """
    if allowed is None:
        rot = m.rotation
    else:
        rot = {v: tuple(e for e in r if e in allowed) for v, r in m.rotation.items()}
        rot = {v: r for v, r in rot.items() if r}
    pos = {(v, e): k for v, r in rot.items() for k, e in enumerate(r)}
    darts = []
    if first is not None:
        darts.append(first)
    for e in sorted(allowed) if allowed is not None else range(len(m.edges)):
        ed = m.edges[e]
        darts.append((e, ed.tail))
        darts.append((e, ed.head))
    dart_face: dict[tuple[int, int], int] = {}
    faces: list[list[tuple[int, int]]] = []
    for d in darts:
        if d in dart_face:
            continue
        fid = len(faces)
        cycle = []
        cur = d
        while cur not in dart_face:
            dart_face[cur] = fid
            cycle.append(cur)
            e, u = cur
            v = m.edges[e].other(u)
            r = rot[v]
            e2 = r[(pos[v, e] + 1) % len(r)]
            cur = (e2, v)
        if cur != d:
            raise MapError("face tracing did not close on its starting dart")
        faces.append(cycle)
    return FaceTrace(faces, dart_face)


# -- maps ---------------------------------------------------------------------

class Orientation3(_RotationMap):
    """Plane triangulation with oriented, uncolored inner edges."""

    def out_degree(self, v: int) -> int:
        return sum(1 for e in self.rotation[v]
                   if not self.edges[e].is_outer and self.edges[e].tail == v)


class WoodedTriangulation(_RotationMap):
    """Triangulation with a Schnyder wood; see ``validate_schnyder``."""

    def __init__(self, n, edges, rotation, word: str | None = None):
        super().__init__(n, edges, rotation)
        self.word = word

    @cached_property
    def _out(self) -> dict[tuple[int, str], int]:
        out = {}
        for e, ed in enumerate(self.edges):
            if ed.color in COLORS:
                out[ed.tail, ed.color] = e
        return out

    def out_edge(self, v: int, color: str) -> int:
        return self._out[v, color]

    def in_edges(self, v: int, color: str) -> list[int]:
        return [e for e in self.rotation[v]
                if self.edges[e].color == color and self.edges[e].head == v]

    def edges_of(self, color: str) -> list[int]:
        return [e for e, ed in enumerate(self.edges) if ed.color == color]

    def strip_colors(self) -> Orientation3:
        edges = [ed if ed.is_outer else Edge(ed.tail, ed.head, None) for ed in self.edges]
        return Orientation3(self.n, edges, self.rotation)

    # serialization

    def to_dict(self) -> dict:
        rot = {str(vertex_name(v)): list(self.rotation[v]) for v in self.vertices}
        return {
            "n": self.n,
            "edges": [{"tail": vertex_name(ed.tail), "head": vertex_name(ed.head),
                       "color": ed.color} for ed in self.edges],
            "rotation": rot,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), separators=(",", ":"))

    @classmethod
    def from_dict(cls, d: dict) -> "WoodedTriangulation":
        edges = [Edge(_vertex_from_json(e["tail"]), _vertex_from_json(e["head"]), e["color"])
                 for e in d["edges"]]
        rot = {_vertex_from_json(k): [int(x) for x in v] for k, v in d["rotation"].items()}
        return cls(int(d["n"]), edges, rot)

    @classmethod
    def from_json(cls, text: str) -> "WoodedTriangulation":
        return cls.from_dict(json.loads(text))


# -- COLOR --------------------------------------------------------------------

def color_orientation(o: Orientation3) -> WoodedTriangulation:
    """Color a 3-orientation by following second-outgoing-edge paths."""
    for v in o.inner_vertices:
        d = o.out_degree(v)
        if d != 3:
            raise PreconditionError(f"inner vertex {v} has out-degree {d}, expected 3")
    n_inner = sum(1 for ed in o.edges if not ed.is_outer)
    color: dict[int, str] = {}
    for e0, ed0 in enumerate(o.edges):
        if ed0.is_outer or e0 in color:
            continue
        path = [e0]
        seen = {e0}
        e = e0
        while True:
            h = o.edges[e].head
            if h in OUTER:
                c = COLOR_OF_ROOT[h]
                break
            if e in color:
                c = color[e]
                break
            nxt, k = e, 0
            while k < 2:
                nxt = o.cw_next(h, nxt)
                ned = o.edges[nxt]
                if not ned.is_outer and ned.tail == h:
                    k += 1
            if nxt in seen or len(path) > n_inner:
                raise NonSimplePathError(f"COLOR path from edge {e0} revisits edge {nxt}")
            seen.add(nxt)
            path.append(nxt)
            e = nxt
        for x in path:
            color.setdefault(x, c)
    edges = [ed if ed.is_outer else Edge(ed.tail, ed.head, color[e])
             for e, ed in enumerate(o.edges)]
    return WoodedTriangulation(o.n, edges, o.rotation)


# -- validation ---------------------------------------------------------------

@dataclass(frozen=True)
class MapViolation:
    kind: str
    vertex: int | None = None
    detail: str = ""


@dataclass(frozen=True)
class SchnyderReport:
    violations: tuple[MapViolation, ...] = ()

    @property
    def valid(self) -> bool:
        return not self.violations

    def __bool__(self):
        return self.valid

    def kinds(self) -> set[str]:
        return {v.kind for v in self.violations}

    def summary(self) -> str:
        if self.valid:
            return "valid"
        return "; ".join(f"{v.kind}@{vertex_name(v.vertex)}: {v.detail}"
                         if v.vertex is not None else f"{v.kind}: {v.detail}"
                         for v in self.violations[:8])


_INNER_PATTERN = re.compile(r"^Br*Gb*Rg*$")


def _rotation_code(s: WoodedTriangulation, v: int) -> str:
    out = []
    for e in s.rotation[v]:
        ed = s.edges[e]
        if ed.is_outer or ed.color not in COLORS:
            out.append("?")
        elif ed.tail == v:
            out.append(ed.color.upper())
        else:
            out.append(ed.color)
    return "".join(out)


def validate_schnyder(s: WoodedTriangulation) -> SchnyderReport:
    bad: list[MapViolation] = []
    n = s.n
    inner = s.inner_vertices
    if len(inner) != n:
        bad.append(MapViolation("counts", None, f"{len(inner)} inner vertices for n={n}"))
    if any(v not in s.rotation for v in OUTER):
        bad.append(MapViolation("counts", None, "missing outer vertex"))
        return SchnyderReport(tuple(bad))
    if len(s.edges) != 3 * n + 3:
        bad.append(MapViolation("counts", None, f"{len(s.edges)} edges, expected {3 * n + 3}"))
    incident: dict[int, int] = {}
    for e, ed in enumerate(s.edges):
        for x in (ed.tail, ed.head):
            if x not in s.rotation:
                bad.append(MapViolation("rotation", x, f"edge {e} ends at unknown vertex"))
            incident[x] = incident.get(x, 0) + 1
    for v, rot in s.rotation.items():
        if sorted(rot) != sorted(e for e, ed in enumerate(s.edges) if v in (ed.tail, ed.head)):
            bad.append(MapViolation("rotation", v, "rotation does not list exactly the incident edges"))
    if bad:
        return SchnyderReport(tuple(bad))

    outer_edges = [e for e, ed in enumerate(s.edges) if ed.is_outer]
    pairs = {frozenset((s.edges[e].tail, s.edges[e].head)) for e in outer_edges}
    if pairs != {frozenset((AB, AR)), frozenset((AR, AG)), frozenset((AG, AB))}:
        bad.append(MapViolation("outer", None, "outer edges do not form the triangle Ab Ar Ag"))

    for v in inner:
        outs = [s.edges[e].color for e in s.rotation[v] if s.edges[e].tail == v]
        for c in COLORS:
            k = outs.count(c)
            if k != 1:
                bad.append(MapViolation("outdegree", v, f"{k} outgoing {c} edges"))
        code = _rotation_code(s, v)
        if "B" in code:
            k = code.index("B")
            code = code[k:] + code[:k]
        if not _INNER_PATTERN.match(code):
            bad.append(MapViolation("cyclic_order", v, f"clockwise pattern {code}"))
    for root in OUTER:
        c = COLOR_OF_ROOT[root]
        for e in s.rotation[root]:
            ed = s.edges[e]
            if ed.is_outer:
                continue
            if ed.head != root or ed.color != c:
                bad.append(MapViolation("outer_vertex", root, f"edge {e} is not an incoming {c} edge"))
        rot = s.rotation[root]
        nxt = {AB: AG, AR: AB, AG: AR}[root]
        prv = {AB: AR, AR: AG, AG: AB}[root]
        try:
            first, last = s.outer_edge(root, nxt), s.outer_edge(root, prv)
            if rot[0] != first or rot[-1] != last:
                k = rot.index(first)
                rot = rot[k:] + rot[:k]
                if rot[-1] != last:
                    bad.append(MapViolation("cyclic_order", root, "outer edges not adjacent in rotation"))
        except KeyError:
            pass
    if bad:
        return SchnyderReport(tuple(bad))

    for c in COLORS:
        root = ROOT_OF[c]
        for v in inner:
            x, steps = v, 0
            while x not in OUTER and steps <= n:
                x = s.edges[s.out_edge(x, c)].head
                steps += 1
            if x != root:
                bad.append(MapViolation("tree", v, f"{c} flow line does not reach {OUTER_NAMES[root]}"))
                break

    ft = trace_faces(s)
    if len(ft.faces) != 2 * n + 2:
        bad.append(MapViolation("euler", None, f"{len(ft.faces)} faces, expected {2 * n + 2}"))
    elif any(len(f) != 3 for f in ft.faces):
        bad.append(MapViolation("euler", None, "non-triangular face"))
    return SchnyderReport(tuple(bad))


def require_valid(s: WoodedTriangulation) -> WoodedTriangulation:
    rep = validate_schnyder(s)
    if not rep.valid:
        raise SchnyderError(rep)
    return s


# -- relabeling ---------------------------------------------------------------

_VERTEX_SHIFT = {AB: AR, AR: AG, AG: AB}


def relabel(s: WoodedTriangulation, times: int = 1) -> WoodedTriangulation:
    """Cyclic color relabeling b -> r -> g -> b (outer vertices follow)."""
    for _ in range(times % 3):
        shift = lambda v: _VERTEX_SHIFT.get(v, v)  # noqa: E731
        edges = [Edge(shift(ed.tail), shift(ed.head),
                      ed.color if ed.is_outer else NEXT_COLOR[ed.color]) for ed in s.edges]
        rot = {shift(v): r for v, r in s.rotation.items()}
        s = WoodedTriangulation(s.n, edges, rot)
    return s


# -- M_br and dual trees ------------------------------------------------------

@dataclass
class MbrMap:
    source: WoodedTriangulation
    edge_ids: frozenset[int]
    faces: list[list[tuple[int, int]]]
    dart_face: dict[tuple[int, int], int]
    outer_face: int
    F: dict[int, int]
    Ftilde: dict[int, int]

    @property
    def n_vertices(self) -> int:
        return self.source.n + 2

    @property
    def n_edges(self) -> int:
        return len(self.edge_ids)

    @property
    def inner_faces(self) -> list[int]:
        return [f for f in range(len(self.faces)) if f != self.outer_face]

    def left(self, e: int) -> int:
        ed = self.source.edges[e]
        return self.dart_face[e, ed.tail]

    def right(self, e: int) -> int:
        ed = self.source.edges[e]
        return self.dart_face[e, ed.head]

    def boundary_pattern(self, f: int) -> str:
        """Colors along the face boundary traversed counterclockwise.

        Uppercase marks an edge walked along its orientation, lowercase
        against it, ``o`` the outer edge.  The reading starts at a forward
        blue edge when there is one.
        """
        s = self.source
        # left faces are traced clockwise around their interior here, so
        # reverse the dart list for a counterclockwise reading
        out = []
        for e, u in reversed(self.faces[f]):
            ed = s.edges[e]
            v = ed.other(u)
            forward = ed.tail == v  # reversed dart goes v -> u
            c = "o" if ed.is_outer else ed.color
            out.append(c.upper() if forward else c)
        code = "".join(out)
        if "B" in code:
            k = code.index("B")
            code = code[k:] + code[:k]
        return code


def build_mbr(s: WoodedTriangulation) -> MbrMap:
    require_valid(s)
    ab_ar = s.outer_edge(AB, AR)
    ids = frozenset(s.edges_of("b") + s.edges_of("r") + [ab_ar])
    # outer face of M_br: right of Ab -> Ar, i.e. left of the dart leaving Ar
    ft = trace_faces(s, set(ids), first=(ab_ar, AR))
    F, Ft = {}, {}
    for e in ids:
        if e == ab_ar:
            continue
        ed = s.edges[e]
        F[e] = ft.dart_face[e, ed.tail]
        Ft[e] = ft.dart_face[e, ed.head]
    for e in s.edges_of("g"):
        u = s.edges[e].tail
        # walk counterclockwise from the green edge to the first M_br edge eps
        eps = s.ccw_next(u, e)
        while eps not in ids:
            eps = s.ccw_next(u, eps)
        # the face right of u -> other(eps) is the left face of the reverse dart
        x = s.edges[eps].other(u)
        face = ft.dart_face[eps, x]
        F[e] = Ft[e] = face
    return MbrMap(s, ids, ft.faces, ft.dart_face, 0, F, Ft)


@dataclass(frozen=True)
class DualTree:
    color: str
    root: int
    parent: dict[int, int]
    via: dict[int, int]  # face -> primal edge crossed towards the root

    @property
    def n_edges(self) -> int:
        return len(self.parent)

    def depth(self, f: int) -> int:
        d = 0
        while f != self.root:
            f = self.parent[f]
            d += 1
        return d

    @cached_property
    def depths(self) -> dict[int, int]:
        out = {self.root: 0}

        def go(f):
            stack = []
            while f not in out:
                stack.append(f)
                f = self.parent[f]
            d = out[f]
            for g in reversed(stack):
                d += 1
                out[g] = d

        for f in self.parent:
            go(f)
        return out


def dual_tree(m: MbrMap, color: str) -> DualTree:
    """Dual blue tree crosses red edges (right to left face); dual red crosses blue
    edges (left to right face)."""
    s = m.source
    parent, via = {}, {}
    if color == "b":
        for e in s.edges_of("r"):
            a, b = m.right(e), m.left(e)
            if a in parent:
                raise MapError(f"face {a} is right of two red edges")
            parent[a], via[a] = b, e
    elif color == "r":
        for e in s.edges_of("b"):
            a, b = m.left(e), m.right(e)
            if a in parent:
                raise MapError(f"face {a} is left of two blue edges")
            parent[a], via[a] = b, e
    else:
        raise ValueError("dual trees exist for colors 'b' and 'r' only")
    if m.outer_face in parent:
        raise MapError("outer face has a parent")
    t = DualTree(color, m.outer_face, parent, via)
    for f in parent:
        k, g = 0, f
        while g != m.outer_face:
            g = parent.get(g)
            k += 1
            if g is None or k > len(parent):
                raise MapError(f"dual {color} tree: face {f} does not reach the root")
    return t


@dataclass(frozen=True)
class FlowPath:
    color: str
    origin: int
    edges: tuple[int, ...]
    nodes: tuple[int, ...]  # vertices, or faces for dual flow lines
    dual: bool = False

    def __len__(self) -> int:
        return len(self.edges)


def flow_line(s: WoodedTriangulation, v: int, color: str) -> FlowPath:
    if v in OUTER:
        raise PreconditionError("flow lines start at inner vertices")
    edges, nodes = [], [v]
    x = v
    while x not in OUTER:
        e = s.out_edge(x, color)
        edges.append(e)
        x = s.edges[e].head
        nodes.append(x)
        if len(edges) > s.n:
            raise NonSimplePathError(f"{color} flow line from {v} does not terminate")
    return FlowPath(color, v, tuple(edges), tuple(nodes))


def dual_flow_line(m: MbrMap, f: int, color: str, tree: DualTree | None = None) -> FlowPath:
    t = tree if tree is not None else dual_tree(m, color)
    edges, nodes = [], [f]
    while f != t.root:
        edges.append(t.via[f])
        f = t.parent[f]
        nodes.append(f)
    return FlowPath(color, nodes[0], tuple(edges), tuple(nodes), dual=True)


def green_indegree(s: WoodedTriangulation, v: int) -> int:
    if v in OUTER:
        raise PreconditionError("green_indegree takes an inner vertex")
    return sum(1 for e in s.rotation[v] if s.edges[e].color == "g" and s.edges[e].head == v)
