"""Randomized differential identities and cube face signs; runnable on its own."""
import itertools
from functools import lru_cache

import pytest
from hypothesis import given, settings, strategies as st

from krh.braid import BraidWord, Cube, resolution_diagram
from krh.cube import CubeEngine, DMinus
from krh.khrcomplex import KREdgeMap, kr_vertex, power_potential

CASES = settings(max_examples=200, deadline=None, derandomize=True)


@st.composite
def words(draw, max_len=3):
    r = draw(st.sampled_from((2, 3)))
    letters = draw(st.lists(st.sampled_from([l for l in range(1 - r, r) if l]),
                            min_size=1, max_size=max_len))
    return BraidWord(r, tuple(letters))


def random_element(draw, basis, max_terms=4):
    if not basis:
        return {}
    picks = draw(st.lists(st.integers(0, len(basis) - 1), min_size=1, max_size=max_terms))
    coeffs = draw(st.lists(st.integers(-3, 3).filter(bool), min_size=len(picks), max_size=len(picks)))
    z = {}
    for i, c in zip(picks, coeffs):
        z[basis[i]] = z.get(basis[i], 0) + c
    return {k: v for k, v in z.items() if v}


def add(a, b, c=1):
    out = dict(a)
    for k, v in b.items():
        out[k] = out.get(k, 0) + c * v
    return {k: v for k, v in out.items() if v}


def apply(f, z):
    out = {}
    for k, c in z.items():
        for k2, c2 in f(k).items():
            out[k2] = out.get(k2, 0) + c * c2
    return {k: v for k, v in out.items() if v}


@lru_cache(maxsize=None)
def engine(word):
    return CubeEngine(word)


@lru_cache(maxsize=None)
def vertex_complex(word, mask, n):
    return kr_vertex(resolution_diagram(word, mask), power_potential(n))


@lru_cache(maxsize=None)
def kr_edge(word, index, n):
    return KREdgeMap(Cube(word).edges[index], power_potential(n))


# ------------------------------------------------------------------ CH(B_J)

@CASES
@given(st.data())
def test_hochschild_and_beta_anticommute(data):
    w = data.draw(words())
    eng = engine(w)
    mask = data.draw(st.integers(0, w.full))
    v = eng.vertex(mask)
    h = data.draw(st.integers(0, w.strands))
    q = h + 2 * data.draw(st.integers(0, 3))
    z = random_element(data.draw, v.cx.basis(h, q))
    assert v.cx.d_apply(v.cx.d_apply(z)) == {}
    n = data.draw(st.sampled_from((1, 2)))
    for dm in (DMinus("beta", n), DMinus("kappa", n)):
        mul = eng.minus_chain(mask, dm)
        # d_- has odd Koszul degree: d_H(k z) = -k d_H(z)
        assert add(v.cx.d_apply(apply(mul, z)), apply(mul, v.cx.d_apply(z))) == {}
        assert apply(mul, apply(mul, z)) == {}


@CASES
@given(st.data())
def test_edge_maps_commute_with_hochschild(data):
    w = data.draw(words())
    eng = engine(w)
    edge = data.draw(st.sampled_from(eng.cube.edges))
    top = eng.vertex(edge.target.mask)
    bot = eng.vertex(edge.source.mask)
    h = data.draw(st.integers(0, w.strands))
    q = h + 2 * data.draw(st.integers(0, 3))
    z = random_element(data.draw, top.cx.basis(h, q))
    f = eng.edge_chain(edge)
    assert apply(f, top.cx.d_apply(z)) == bot.cx.d_apply(apply(f, z))


@CASES
@given(st.data())
def test_cube_double_complex_identities(data):
    w = data.draw(words(max_len=2))
    eng = engine(w)
    n = data.draw(st.sampled_from((1, 2)))
    dm = DMinus(data.draw(st.sampled_from(("beta", "kappa"))), n)
    s = data.draw(st.sampled_from(eng.s_range(dm, 6 - dm.degree * w.strands)))
    C = eng.double_complex(dm, s, "Q")
    assert C.check()


# ------------------------------------------------------------------ K_p(D_J)

@CASES
@given(st.data())
def test_vertex_complex_differentials(data):
    w = data.draw(words(max_len=2))
    mask = data.draw(st.integers(0, w.full))
    n = data.draw(st.sampled_from((1, 2)))
    K = vertex_complex(w, mask, n)
    h = data.draw(st.integers(0, 3))
    q = data.draw(st.integers(h, h + 5))
    z = random_element(data.draw, K.basis(h, q))
    assert K.d_plus(K.d_plus(z)) == {}
    assert K.d_minus(K.d_minus(z)) == {}
    assert add(K.d_plus(K.d_minus(z)), K.d_minus(K.d_plus(z))) == {}
    assert K.d_total(K.d_total(z)) == {}


@CASES
@given(st.data())
def test_vertex_edge_maps_commute_with_total_differential(data):
    w = data.draw(words(max_len=2))
    n = data.draw(st.sampled_from((1, 2)))
    index = data.draw(st.integers(0, len(Cube(w).edges) - 1))
    em = kr_edge(w, index, n)
    h = data.draw(st.integers(0, 3))
    q = data.draw(st.integers(h, h + 5))
    z = random_element(data.draw, em.src.basis(h, q))
    assert em.apply(em.src.d_total(z)) == em.tgt.d_total(em.apply(z))


# ------------------------------------------------------------------ faces

def all_words(max_len):
    for r in (2, 3):
        letters = [l for l in range(1 - r, r) if l]
        for n in range(2, max_len + 1):
            for ls in itertools.product(letters, repeat=n):
                yield BraidWord(r, ls)


@pytest.mark.parametrize("r", [2, 3])
def test_every_square_anticommutes(r):
    bad = []
    for w in all_words(4):
        if w.strands != r:
            continue
        eng = CubeEngine(w)
        for h in range(r + 1):
            for Q in (h, h + 2):
                if not eng.face_check_chain(h, Q):
                    bad.append((w.letters, h, Q))
    assert not bad


def test_dv_squares_to_zero_on_hh():
    for w in [BraidWord(2, (1, 1, 1)), BraidWord(3, (1, -2, 1)), BraidWord(2, (1, -1, 1, -1))]:
        eng = CubeEngine(w)
        for h in range(w.strands + 1):
            for Q in eng.q_range(h, 6):
                assert eng.dv_squared_ok(h, Q)
