"""Schnyder's straight-line grid embedding.

For an inner vertex v the three flow lines from v cut the inner faces into
three regions.  The coordinate x(v) counts the faces of the region opposite
A_b (between the red and green lines), y(v) the region opposite A_r and z(v)
the region opposite A_g.  Each triple sums to 2n+1, and drawing v at
(x, y) gives a plane straight-line drawing.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass

import numpy as np

from . import kernels
from .maps import AB, AG, AR, OUTER, OUTER_NAMES, WoodedTriangulation, flow_line, trace_faces
from .rng import SeedSpec, as_seedspec


class EmbeddingInvalidError(RuntimeError):
    def __init__(self, report: "EmbeddingReport"):
        super().__init__(report.summary())
        self.report = report


@dataclass(frozen=True)
class FaceStructure:
    """Inner faces of a triangulation as arrays for the flood-fill kernel."""

    face_edges: np.ndarray   # (F, 3) edge ids, -1 for outer edges
    edge_faces: np.ndarray   # (3n, 2) the two inner faces along each inner edge
    seeds: dict[str, int]    # inner face on each outer edge, keyed by the opposite root color


def face_structure(s: WoodedTriangulation) -> FaceStructure:
    ninner = 3 * s.n
    if len(s.edges) != ninner + 3 or any(s.edges[e].is_outer for e in range(ninner)):
        # the flood-fill kernel indexes by edge id without bounds checks
        raise ValueError(f"expected {ninner} inner edges (ids 0..{ninner - 1}) and 3 outer edges")
    ab_ar = s.outer_edge(AB, AR)
    ft = trace_faces(s, first=(ab_ar, AR))  # face 0 is the outer face
    nf = len(ft.faces) - 1
    fe = np.full((nf, 3), -1, dtype=np.int64)
    ef = np.full((ninner, 2), -1, dtype=np.int64)
    for f, darts in enumerate(ft.faces[1:]):
        if len(darts) != 3:
            raise ValueError(f"face {f + 1} has {len(darts)} sides")
        for c, (e, _) in enumerate(darts):
            if e < ninner:
                fe[f, c] = e
                ef[e, 0 if ef[e, 0] < 0 else 1] = f
    seeds = {}
    for color, (u, v) in {"b": (AR, AG), "r": (AG, AB), "g": (AB, AR)}.items():
        e = s.outer_edge(u, v)
        ed = s.edges[e]
        f1, f2 = ft.dart_face[e, ed.tail], ft.dart_face[e, ed.head]
        seeds[color] = (f1 if f2 == 0 else f2) - 1
    return FaceStructure(fe, ef, seeds)


def _flow_csr(s: WoodedTriangulation, verts: list[int]) -> tuple[np.ndarray, np.ndarray]:
    ptr = [0]
    idx: list[int] = []
    for v in verts:
        for c in "brg":
            idx.extend(flow_line(s, v, c).edges)
        ptr.append(len(idx))
    return np.asarray(ptr, dtype=np.int64), np.asarray(idx, dtype=np.int64)


def region_face_counts(s: WoodedTriangulation) -> dict[int, tuple[int, int, int]]:
    """Face counts (x, y, z) of the three flow-line regions of every inner vertex."""
    fs = face_structure(s)
    verts = s.inner_vertices
    ptr, idx = _flow_csr(s, verts)
    seeds = np.array([fs.seeds["b"], fs.seeds["r"], fs.seeds["g"]], dtype=np.int64)
    counts = kernels.region_counts(fs.face_edges, fs.edge_faces, ptr, idx, seeds)
    return {v: (int(a), int(b), int(c)) for v, (a, b, c) in zip(verts, counts)}


def flow_regions(s: WoodedTriangulation, v: int) -> dict[str, set[int]]:
    """Inner-face ids of the three regions at v, keyed by the opposite root color."""
    from scipy.sparse import coo_matrix
    from scipy.sparse.csgraph import connected_components

    fs = face_structure(s)
    cut = set()
    for c in "brg":
        cut.update(flow_line(s, v, c).edges)
    keep = np.array([e not in cut for e in range(len(fs.edge_faces))], dtype=bool)
    nf = fs.face_edges.shape[0]
    a, b = fs.edge_faces[keep, 0], fs.edge_faces[keep, 1]
    g = coo_matrix((np.ones(len(a), dtype=np.int8), (a, b)), shape=(nf, nf))
    _, lab = connected_components(g, directed=False)
    return {c: set(np.flatnonzero(lab == lab[f]).tolist()) for c, f in fs.seeds.items()}


@dataclass(frozen=True)
class GridEmbedding:
    n: int
    coords: dict[int, tuple[int, int, int]]

    @property
    def size(self) -> int:
        return 2 * self.n + 1

    def point(self, v: int) -> tuple[int, int]:
        x, y, _ = self.coords[v]
        return x, y

    def drawn(self, v: int) -> tuple[float, float]:
        """Affine image on the equilateral triangle with corners (0,0), (m,0), (m/2, m*sqrt3/2)."""
        x, y, _ = self.coords[v]
        return x + y / 2, y * 0.8660254037844386

    def to_csv(self) -> str:
        buf = io.StringIO()
        wr = csv.writer(buf, lineterminator="\n")
        wr.writerow(["vertex", "x", "y", "z"])
        for v in sorted(self.coords, key=lambda v: (v in OUTER, abs(v))):
            wr.writerow([OUTER_NAMES.get(v, v), *self.coords[v]])
        return buf.getvalue()


def _raw_embedding(s: WoodedTriangulation) -> GridEmbedding:
    m = 2 * s.n + 1
    coords = dict(region_face_counts(s))
    coords[AB] = (m, 0, 0)
    coords[AR] = (0, m, 0)
    coords[AG] = (0, 0, m)
    return GridEmbedding(s.n, coords)


@dataclass(frozen=True)
class EmbeddingViolation:
    kind: str  # integrality | sum | coincident | crossing
    detail: str


@dataclass(frozen=True)
class EmbeddingReport:
    violations: tuple[EmbeddingViolation, ...]
    crossings: int
    first_pair: tuple[int, int] | None

    @property
    def valid(self) -> bool:
        return not self.violations

    def __bool__(self) -> bool:
        return self.valid

    def summary(self) -> str:
        if self.valid:
            return "valid embedding"
        return "; ".join(f"{v.kind}: {v.detail}" for v in self.violations[:5])


def validate_embedding(E: GridEmbedding, s: WoodedTriangulation) -> EmbeddingReport:
    """Integer triples summing to 2n+1, distinct points, and no two edges
    meeting except at a shared endpoint (exact integer arithmetic)."""
    out: list[EmbeddingViolation] = []
    m = E.size
    for v in s.vertices:
        t = E.coords.get(v)
        if t is None:
            out.append(EmbeddingViolation("integrality", f"vertex {OUTER_NAMES.get(v, v)} missing"))
            continue
        if not all(isinstance(c, (int, np.integer)) for c in t):
            out.append(EmbeddingViolation("integrality", f"vertex {OUTER_NAMES.get(v, v)} has {t}"))
        elif sum(t) != m:
            out.append(EmbeddingViolation("sum", f"vertex {OUTER_NAMES.get(v, v)}: {t} sums to {sum(t)}, not {m}"))
    if out:
        return EmbeddingReport(tuple(out), 0, None)
    verts = s.vertices
    index = {v: k for k, v in enumerate(verts)}
    pts = np.array([E.point(v) for v in verts], dtype=np.int64)
    seen: dict[tuple[int, int], int] = {}
    for v, p in zip(verts, map(tuple, pts.tolist())):
        if p in seen:
            out.append(EmbeddingViolation("coincident", f"{OUTER_NAMES.get(seen[p], seen[p])} and "
                                                        f"{OUTER_NAMES.get(v, v)} at {p}"))
        seen[p] = v
    segs = np.array([(index[ed.tail], index[ed.head]) for ed in s.edges], dtype=np.int64)
    count, i, j = kernels.segment_violations(pts, segs)
    first = None
    if count:
        first = (int(i), int(j))
        out.append(EmbeddingViolation("crossing", f"{count} edge pairs meet; first edges {i} and {j}"))
    return EmbeddingReport(tuple(out), int(count), first)


def schnyder_embedding(s: WoodedTriangulation, validate: bool = True) -> GridEmbedding:
    E = _raw_embedding(s)
    if validate:
        rep = validate_embedding(E, s)
        if not rep.valid:
            raise EmbeddingInvalidError(rep)
    return E


def normalized_vertex_sample(E: GridEmbedding, k: int, seed: int | SeedSpec = 0) -> np.ndarray:
    """k distinct uniform inner vertices, coordinates divided by 2n."""
    inner = sorted(v for v in E.coords if v not in OUTER)
    if k > len(inner):
        raise ValueError(f"asked for {k} of {len(inner)} inner vertices")
    gen = as_seedspec(seed).generator("embed-sample", 0)
    pick = gen.choice(len(inner), size=k, replace=False)
    return np.array([E.coords[inner[i]] for i in pick], dtype=np.float64) / (2 * E.n)


_SVG_COLORS = {"b": "#1f4fd1", "r": "#c8202b", "g": "#1c8c3a", "outer": "#222222"}


def _rgb(hexcolor: str) -> tuple[int, int, int]:
    return tuple(int(hexcolor[k:k + 2], 16) for k in (1, 3, 5))


def emit_svg(E: GridEmbedding, s: WoodedTriangulation, fill_faces: bool = False,
             size: float = 800.0) -> str:
    """Straight-line drawing in a viewBox of side 2n+1 (y axis pointing up).

    ``fill_faces`` shades each inner face with the mean of its three edge colors.
    """
    m = E.size
    pad = m * 0.04
    stroke = max(m / 400, 0.02)
    lines = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{size:g}" height="{size:g}" '
             f'viewBox="{-pad:g} {-pad:g} {m + 2 * pad:g} {m + 2 * pad:g}">',
             f'<g transform="translate(0,{m:g}) scale(1,-1)">']
    if fill_faces:
        fs = trace_faces(s, first=(s.outer_edge(AB, AR), AR))
        for darts in fs.faces[1:]:
            poly = " ".join("{:.4f},{:.4f}".format(*E.drawn(u)) for _, u in darts)
            rgb = np.mean([_rgb(_SVG_COLORS[s.edges[e].color]) for e, _ in darts], axis=0)
            fill = "#" + "".join(f"{int(round(c)):02x}" for c in rgb)
            lines.append(f'<polygon points="{poly}" fill="{fill}" fill-opacity="0.35" stroke="none"/>')
    for ed in s.edges:
        (x1, y1), (x2, y2) = E.drawn(ed.tail), E.drawn(ed.head)
        lines.append(f'<line x1="{x1:.4f}" y1="{y1:.4f}" x2="{x2:.4f}" y2="{y2:.4f}" '
                     f'stroke="{_SVG_COLORS[ed.color]}" stroke-width="{stroke:g}"/>')
    r = stroke * 1.5
    for v in s.vertices:
        x, y = E.drawn(v)
        lines.append(f'<circle cx="{x:.4f}" cy="{y:.4f}" r="{r:g}" fill="#000"/>')
    lines.append("</g></svg>")
    return "\n".join(lines) + "\n"

