import pytest
from hypothesis import given
from hypothesis import strategies as st

from woodwalk.sampling import enumerate_Wn
from woodwalk.words import (
    DyckPath, InvalidDyckError, InvalidStepError, InvalidWordError, LatticeWalk, PlaneTree,
    Word, dyck_to_tree, match_pairs, shear_dyck_pair, tree_to_dyck, validate_Wn,
    walk_of_word, word_of_walk,
)

letters = st.text(alphabet="brg", max_size=30)


def test_walk_of_gbr():
    assert walk_of_word("gbr").points == ((0, 0), (0, 1), (1, 0), (0, 0))


def test_walk_of_empty_and_gg():
    assert walk_of_word("").points == ((0, 0),)
    assert walk_of_word("gg").points == ((0, 0), (0, 1), (0, 2))


def test_word_of_walk():
    assert word_of_walk([(0, 0), (0, 1), (1, 0), (0, 0)]).letters == "gbr"
    assert word_of_walk([(0, 0)]).letters == ""
    with pytest.raises(InvalidStepError) as ei:
        word_of_walk([(0, 0), (1, 0)])
    assert ei.value.index == 1


def test_bad_letter():
    with pytest.raises(InvalidWordError):
        Word("gbx")


@given(letters)
def test_walk_round_trip(s):
    assert word_of_walk(walk_of_word(s)).letters == s


@given(letters)
def test_csv_round_trip(s):
    z = walk_of_word(s)
    assert LatticeWalk.from_csv(z.to_csv()) == z


def test_membership_examples():
    assert validate_Wn("gbr").member
    rep = validate_Wn("grb")
    assert {"quadrant", "r_then_b"} <= rep.kinds()
    assert [v.index for v in rep.violations if v.kind == "quadrant"] == [2]
    rep = validate_Wn("ggbrbr")
    assert rep.kinds() == {"r_then_b"}
    assert [v.index for v in rep.violations] == [4]


@given(letters)
def test_membership_matches_definition(s):
    pts = walk_of_word(s).points
    member = (len(s) % 3 == 0 and pts[-1] == (0, 0)
              and all(x >= 0 and y >= 0 for x, y in pts) and "rb" not in s)
    assert validate_Wn(s).member == member


def test_match_examples():
    assert match_pairs("gbr", "gb").pairs == ((1, 2),)
    assert match_pairs("gbr", "br").pairs == ((2, 3),)
    assert set(match_pairs("ggbbrr", "gb").pairs) == {(2, 3), (1, 4)}
    m = match_pairs("b", "br")
    assert m.pairs == () and m.unmatched == (1,)


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_Wn_matchings_are_perfect(n):
    for w in enumerate_Wn(n):
        assert match_pairs(w, "gb").unmatched == ()
        assert match_pairs(w, "br").unmatched == ()


def test_tree_contours():
    assert tree_to_dyck(PlaneTree([PlaneTree()])).steps == (1, -1)
    assert tree_to_dyck(PlaneTree([PlaneTree([PlaneTree()])])).steps == (1, 1, -1, -1)
    assert tree_to_dyck(PlaneTree([PlaneTree(), PlaneTree()])).steps == (1, -1, 1, -1)


def test_bad_dyck():
    with pytest.raises(InvalidDyckError):
        DyckPath((-1, 1))
    with pytest.raises(InvalidDyckError):
        DyckPath((1,))


@st.composite
def dyck(draw):
    k = draw(st.integers(0, 12))
    steps, h, ups = [], 0, 0
    while ups < k or h:
        if ups < k and (h == 0 or draw(st.booleans())):
            steps.append(1)
            h += 1
            ups += 1
        else:
            steps.append(-1)
            h -= 1
    return tuple(steps)


@given(dyck())
def test_dyck_tree_round_trip(steps):
    assert tree_to_dyck(dyck_to_tree(steps)).steps == steps


def test_shear_examples():
    sp = shear_dyck_pair("gbr")
    assert sp.abscissa == (0, 1, 1, 0)
    assert sp.ordinate == (0, 1, 0, 0)
    assert sp.non_crossing
    assert shear_dyck_pair("ggbbrr").non_crossing


def test_shear_all_W5():
    assert all(shear_dyck_pair(w).non_crossing for w in enumerate_Wn(5))
