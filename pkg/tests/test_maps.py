from collections import Counter

import pytest

from woodwalk.codec import decode
from woodwalk.maps import (
    AB, AG, AR, OUTER, Edge, Orientation3, PreconditionError, SchnyderError, WoodedTriangulation,
    build_mbr, color_orientation, dual_flow_line, dual_tree, flow_line, green_indegree,
    relabel, require_valid, validate_schnyder,
)
from woodwalk.sampling import enumerate_Wn
from woodwalk.words import walk_of_word


def test_gbr_is_the_star():
    s = decode("gbr")
    (v,) = s.inner_vertices
    heads = {s.edges[s.out_edge(v, c)].head: c for c in "brg"}
    assert heads == {AB: "b", AR: "r", AG: "g"}
    assert validate_schnyder(s).valid


def test_color_star_orientation():
    s = decode("gbr")
    o = s.strip_colors()
    assert all(ed.color is None for ed in o.edges if not ed.is_outer)
    assert [ed.color for ed in color_orientation(o).edges] == [ed.color for ed in s.edges]


def test_color_recovers_W3_woods():
    for w in enumerate_Wn(3):
        s = decode(w)
        t = color_orientation(s.strip_colors())
        assert [e.color for e in t.edges] == [e.color for e in s.edges]


def test_color_rejects_outdegree_two():
    s = decode("gbgbrr")
    v = s.inner_vertices[0]
    e = s.out_edge(v, "g")
    ed = s.edges[e]
    edges = list(s.strip_colors().edges)
    edges[e] = Edge(ed.head, ed.tail, None)
    with pytest.raises(PreconditionError):
        color_orientation(Orientation3(s.n, edges, s.rotation))


def test_swapped_rotation_is_reported():
    s = decode("gbr")
    (v,) = s.inner_vertices
    rot = dict(s.rotation)
    eg, er = s.out_edge(v, "g"), s.out_edge(v, "r")
    rot[v] = tuple(er if e == eg else eg if e == er else e for e in rot[v])
    rep = validate_schnyder(WoodedTriangulation(s.n, s.edges, rot))
    assert "cyclic_order" in rep.kinds()
    assert any(x.vertex == v for x in rep.violations)
    with pytest.raises(SchnyderError):
        require_valid(WoodedTriangulation(s.n, s.edges, rot))


def test_all_small_maps_valid(maps_upto4):
    assert len(maps_upto4) == 102
    for s in maps_upto4:
        assert validate_schnyder(s).valid
        assert len(s.vertices) == s.n + 3 and len(s.edges) == 3 * s.n + 3


def test_relabel_keeps_validity(maps_upto4):
    for s in maps_upto4[:40]:
        for k in (1, 2):
            assert validate_schnyder(relabel(s, k)).valid


def test_json_round_trip(maps_upto4):
    from woodwalk.codec import encode

    for s in maps_upto4:
        t = WoodedTriangulation.from_json(s.to_json())
        assert encode(t).word.letters == encode(s).word.letters


def test_mbr_n1():
    m = build_mbr(decode("gbr"))
    assert len(m.faces) == 2 and len(m.inner_faces) == 1
    s = m.source
    (e,) = s.edges_of("b")
    assert m.F[e] == m.inner_faces[0]


def test_mbr_faces_have_one_blue_and_one_red_side(maps_upto4):
    for s in maps_upto4:
        m = build_mbr(s)
        assert len(m.inner_faces) == s.n
        left_b = Counter(m.left(e) for e in s.edges_of("b"))
        right_r = Counter(m.right(e) for e in s.edges_of("r"))
        for f in m.inner_faces:
            assert left_b[f] == 1 and right_r[f] == 1


def test_F_on_gbgbrr():
    s = decode("gbgbrr")
    m = build_mbr(s)
    assert sorted(m.F[e] for e in s.edges_of("b")) == sorted(m.inner_faces)


def test_dual_trees(maps_upto4):
    t = dual_tree(build_mbr(decode("gbr")), "b")
    assert t.n_edges == 1
    for s in maps_upto4:
        m = build_mbr(s)
        tb = dual_tree(m, "b")
        assert tb.n_edges == len(s.edges_of("r")) == s.n
        assert all(tb.depths[f] > 0 for f in m.inner_faces)
    with pytest.raises(ValueError):
        dual_tree(build_mbr(decode("gbr")), "g")


def test_flow_lines():
    s = decode("gbr")
    (v,) = s.inner_vertices
    p = flow_line(s, v, "r")
    assert p.nodes == (v, AR) and len(p) == 1
    s = decode("gbgbrr")
    assert flow_line(s, 2, "r").nodes[-1] == AR
    with pytest.raises(PreconditionError):
        flow_line(s, AB, "b")


def test_flow_lines_meet_only_at_start(maps_upto4):
    for s in maps_upto4:
        for v in s.inner_vertices:
            sets = [set(flow_line(s, v, c).nodes[1:]) for c in "brg"]
            assert not (sets[0] & sets[1] or sets[1] & sets[2] or sets[0] & sets[2])


def test_dual_flow_line_length():
    m = build_mbr(decode("gbr"))
    assert len(dual_flow_line(m, m.inner_faces[0], "b")) == 1
    s = decode("gbgbrr")
    m = build_mbr(s)
    L = walk_of_word("gbgbrr").L
    assert len(dual_flow_line(m, m.F[1], "b")) == L[2] == 1


def test_green_indegree():
    assert green_indegree(decode("gbr"), 2) == 0
    s = decode("gbgbrr")
    assert green_indegree(s, 2) == 1 and green_indegree(s, 4) == 0
    with pytest.raises(PreconditionError):
        green_indegree(s, AG)


def test_green_indegree_matches_word(words_upto4):
    from woodwalk.codec import green_set

    for w in words_upto4:
        s = decode(w)
        for i, c in enumerate(w, start=1):
            if c == "b":
                assert green_indegree(s, i) == len(green_set(w, i))
