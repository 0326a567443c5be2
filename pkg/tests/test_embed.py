from pathlib import Path

import numpy as np
import pytest

from woodwalk.codec import decode
from woodwalk.embed import (
    EmbeddingInvalidError, GridEmbedding, emit_svg, normalized_vertex_sample,
    region_face_counts, schnyder_embedding, validate_embedding,
)
from woodwalk.maps import AB, AG, AR, OUTER, relabel
from woodwalk.sampling import dp_sample, dp_samples


def test_n1():
    s = decode("gbr")
    E = schnyder_embedding(s)
    (v,) = s.inner_vertices
    assert E.coords[v] == (1, 1, 1)
    assert sorted(E.coords[a] for a in OUTER) == [(0, 0, 3), (0, 3, 0), (3, 0, 0)]
    assert validate_embedding(E, s).valid


def test_sums(maps_upto4):
    for s in maps_upto4:
        for t in region_face_counts(s).values():
            assert sum(t) == 2 * s.n + 1


def test_ggbbrr_distinct():
    c = region_face_counts(decode("ggbbrr"))
    assert len(set(c.values())) == 2


def test_all_small_embeddings_valid(maps_upto4):
    for s in maps_upto4:
        rep = validate_embedding(schnyder_embedding(s, validate=False), s)
        assert rep.valid and rep.crossings == 0


def test_n500_valid():
    s = decode(dp_sample(500, seed=1))
    assert validate_embedding(schnyder_embedding(s, validate=False), s).valid


def test_color_rotation_permutes_triples(maps_upto4):
    shift = {AB: AR, AR: AG, AG: AB}
    for s in maps_upto4:
        a = region_face_counts(s)
        b = region_face_counts(relabel(s, 1))
        for v, (x, y, z) in a.items():
            assert b[shift.get(v, v)] == (z, x, y)


def test_perturbed_sum_reported():
    s = decode("gbgbrr")
    E = schnyder_embedding(s)
    v = s.inner_vertices[0]
    x, y, z = E.coords[v]
    bad = GridEmbedding(E.n, {**E.coords, v: (x + 1, y, z)})
    rep = validate_embedding(bad, s)
    assert not rep.valid and "sum" in {x.kind for x in rep.violations}


def test_swapped_positions_cross():
    found = False
    for w in ["ggbgbbrrr", "gbgbgbrrr", "ggbbgbrrr"]:
        s = decode(w)
        E = schnyder_embedding(s)
        u, v = s.inner_vertices[0], s.inner_vertices[-1]
        bad = GridEmbedding(E.n, {**E.coords, u: E.coords[v], v: E.coords[u]})
        rep = validate_embedding(bad, s)
        found = found or rep.crossings > 0
    assert found


def test_malformed_map_rejected():
    from woodwalk.maps import WoodedTriangulation

    s = decode("gbr")
    with pytest.raises(ValueError):
        schnyder_embedding(WoodedTriangulation(2, s.edges, s.rotation))


def test_invalid_raises(monkeypatch):
    import woodwalk.embed as em

    s = decode("gbgbrr")
    good = em.region_face_counts(s)
    v = s.inner_vertices[0]
    monkeypatch.setattr(em, "region_face_counts", lambda t: {**good, v: (0, 0, 5)})
    with pytest.raises(EmbeddingInvalidError) as ei:
        em.schnyder_embedding(s)
    assert not ei.value.report.valid


def test_normalized_sample():
    E = schnyder_embedding(decode("gbr"))
    assert np.allclose(normalized_vertex_sample(E, 1), 0.5)
    s = decode(dp_sample(100, seed=2))
    E = schnyder_embedding(s, validate=False)
    pts = normalized_vertex_sample(E, 50, seed=3)
    assert pts.shape == (50, 3)
    assert np.all(pts >= 0) and np.all(pts <= (2 * 100 + 1) / 200)
    with pytest.raises(ValueError):
        normalized_vertex_sample(E, 101)


def test_coordinate_means_symmetric():
    tables = [schnyder_embedding(decode(w), validate=False) for w in dp_samples(500, 6, seed=9)]
    pts = np.vstack([normalized_vertex_sample(E, 200, seed=i) for i, E in enumerate(tables)])
    target = (2 * 500 + 1) / (2 * 500) / 3
    se = pts.std(axis=0, ddof=1) / np.sqrt(len(pts))
    # points within one map are correlated, so allow a wider band than 3 se
    assert np.all(np.abs(pts.mean(axis=0) - target) <= 10 * se)


def test_svg_n1():
    s = decode("gbr")
    out = emit_svg(schnyder_embedding(s), s)
    assert out.count("<line") == 6 and out.count("<circle") == 4
    assert 'viewBox="' in out


def test_svg_deterministic():
    s = decode("ggbgbbrrr")
    E = schnyder_embedding(s)
    a, b = emit_svg(E, s), emit_svg(E, s)
    assert a == b
    assert a == (Path(__file__).parent / "data" / "ggbgbbrrr.svg").read_text()


def test_svg_fill():
    s = decode("gbgbrr")
    out = emit_svg(schnyder_embedding(s), s, fill_faces=True)
    assert out.count("<polygon") == 2 * s.n + 1


def test_csv():
    s = decode("gbgbrr")
    lines = schnyder_embedding(s).to_csv().strip().split("\n")
    assert lines[0] == "vertex,x,y,z" and len(lines) == s.n + 4
    assert {ln.split(",")[0] for ln in lines[-3:]} == {"Ab", "Ar", "Ag"}

