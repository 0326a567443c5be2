import pytest
from hypothesis import given
from hypothesis import strategies as st

from woodwalk.codec import (
    ExplorationSpec, decode, dual_profile, encode, green_set, same_wood,
)
from woodwalk.maps import relabel
from woodwalk.sampling import dp_sample, dp_samples, enumerate_Wn
from woodwalk.words import NotInWnError, validate_Wn, walk_of_word


def test_encode_n1():
    assert encode(decode("gbr")).word.letters == "gbr"


def test_round_trip_ggbbrr():
    assert encode(decode("ggbbrr")).walk == walk_of_word("ggbbrr")


def test_decode_gbgbrr_green_edge():
    s = decode("gbgbrr")
    assert s.inner_vertices == [2, 4]
    green_in = [e for e in s.in_edges(2, "g")]
    assert len(green_in) == 1 and s.edges[green_in[0]].tail == 4


def test_decode_rejects_non_members():
    with pytest.raises(NotInWnError):
        decode("grb")


@pytest.mark.parametrize("n", [1, 2, 3, 4, 5])
def test_encode_decode_identity(n):
    for w in enumerate_Wn(n):
        assert encode(decode(w)).word.letters == w


def test_decode_encode_identity(maps_upto4):
    for s in maps_upto4:
        for k in range(3):
            t = relabel(s, k)
            assert same_wood(decode(encode(t).word), t)


def test_same_wood_separates_distinct_words():
    ws = enumerate_Wn(3)
    maps = [decode(w) for w in ws]
    for i in range(len(ws)):
        for j in range(len(ws)):
            assert same_wood(maps[i], maps[j]) == (i == j)


@pytest.mark.parametrize("spec", [ExplorationSpec(c, d) for c in "brg" for d in ("cw", "ccw")])
def test_every_exploration_gives_a_member(spec):
    for n in (1, 2, 3):
        for w in enumerate_Wn(n):
            assert validate_Wn(encode(decode(w), spec).word).member


def test_relabel_matches_color_encoding():
    for w in enumerate_Wn(3):
        s = decode(w)
        assert encode(relabel(s, 1), ExplorationSpec("r")).word == encode(s).word


def test_bad_spec():
    with pytest.raises(ValueError):
        ExplorationSpec("x")
    with pytest.raises(ValueError):
        ExplorationSpec("b", "up")


@given(st.integers(0, 10 ** 6), st.integers(5, 40))
def test_round_trip_random(seed, n):
    w = dp_sample(n, seed).letters
    assert encode(decode(w)).word.letters == w


def test_green_set_examples():
    assert green_set("gbgbrr", 2) == [3]
    assert green_set("gbr", 2) == []
    assert green_set("ggbbrr", 3) == [] and green_set("ggbbrr", 4) == []
    with pytest.raises(ValueError):
        green_set("gbr", 1)


def test_dual_profile_examples():
    assert [r.blue_dual_len for r in dual_profile("gbgbrr").rows] == [0, 1, 1, 2, 1, 0]
    assert [r.Lb for r in dual_profile("gbgbrr").rows] == [0, 1, 1, 2, 1, 0]
    assert [r.blue_dual_len for r in dual_profile("gbr").rows] == [0, 1, 0]


def test_dual_profile_all_small(words_upto4):
    for w in words_upto4:
        p = dual_profile(w)
        assert p.blue_matches() and p.red_matches()


def test_dual_profile_n50():
    for w in dp_samples(50, 200, seed=3, mode="exact"):
        p = dual_profile(w)
        assert p.blue_matches() and p.red_matches()


def test_dual_profile_csv():
    text = dual_profile("gbgbrr").to_csv()
    head, *rows = text.strip().split("\n")
    assert head.startswith("index,letter,Lb,blue_dual_len,red_dual_len")
    assert len(rows) == 6
