import pytest
from hypothesis import given, strategies as st

from krh.braid import BraidWord, Cube, ParseError, RangeError, Subword, parse_braid, resolution_diagram


@pytest.mark.parametrize("text", ["1 1 1", "[1,1,1]", "(1, 1, 1)", "1,1, 1", "  +1 1 1 "])
def test_parse_forms(text):
    assert parse_braid(text, 2).letters == (1, 1, 1)


def test_parse_empty_and_negative():
    assert parse_braid("", 1).letters == ()
    assert parse_braid("[]", 3).letters == ()
    assert parse_braid("1 -2 1", 3).letters == (1, -2, 1)


@pytest.mark.parametrize("text", ["1 a", "[1 2", "1.5", "--1", "1 2]"])
def test_parse_errors(text):
    with pytest.raises(ParseError):
        parse_braid(text, 3)


@pytest.mark.parametrize("strands,text", [(2, "2"), (3, "0"), (2, "-2"), (0, "")])
def test_range_errors(strands, text):
    with pytest.raises(RangeError):
        parse_braid(text, strands)


@given(st.integers(2, 5).flatmap(lambda r: st.tuples(
    st.just(r), st.lists(st.integers(1 - r, r - 1).filter(bool), max_size=6))))
def test_text_round_trip(case):
    r, letters = case
    w = BraidWord(r, tuple(letters))
    assert parse_braid(w.text(), r) == w


def test_selectors_and_shift():
    w = BraidWord(3, (1, -2, -1))
    assert w.i_plus == 0b001 and w.i_minus == 0b110
    J = Subword(w, 0b111)
    assert J.negative_count == 2 and J.shift == 4
    assert J.letters == (1, 2, 1)
    assert Subword(w, w.i_plus).cubical_degree == 0
    assert Subword(w, w.i_minus).cubical_degree == 3
    with pytest.raises(ValueError):
        Subword(w, 0b1000)


@given(st.lists(st.sampled_from([1, -1, 2, -2]), min_size=1, max_size=5))
def test_cube_edges(letters):
    w = BraidWord(3, tuple(letters))
    c = Cube(w)
    n = w.n
    assert len(c.vertices) == 2 ** n
    assert len(c.edges) == n * 2 ** (n - 1)
    for e in c.edges:
        assert e.source.leq(e.target)
        assert e.target.cubical_degree + 1 == e.source.cubical_degree
        assert (e.kind == "positive") == (w.letters[e.position] > 0)
        assert e.source.mask ^ e.target.mask == 1 << e.position
    assert len(c.squares()) == (n * (n - 1) // 2) * 2 ** max(n - 2, 0)


@given(st.lists(st.sampled_from([1, -1, 2, -2]), min_size=2, max_size=5))
def test_square_signs_anticommute(letters):
    # the two paths around every face carry opposite signs
    for top, _, ((e1, f1), (e2, f2)) in Cube(BraidWord(3, tuple(letters))).squares():
        assert (e1.sign * f1.sign) == -(e2.sign * f2.sign)


def test_levels_partition_vertices():
    c = Cube(BraidWord(2, (1, -1, 1)))
    levels = c.by_degree()
    assert sorted(m for ms in levels.values() for m in ms) == list(range(8))
    assert levels[0] == [c.word.i_plus]


def test_resolution_diagram_layers():
    w = BraidWord(3, (1, -2))
    D = resolution_diagram(w, 0b10)
    assert D.n == 2
    assert D.crossings == [(2, 2)]
    assert D.layers[0].marks == (1, 2, 3)
    assert D.layers[2].marks == (1,)
    assert D.incoming(0, 2) == (2, 2)
    assert D.x_var(1) == (0, 1) and D.y_var(1) == (2, 1)
    assert len(D.arc_variables()) == 9
    with pytest.raises(ValueError):
        resolution_diagram(w, 0b100)
