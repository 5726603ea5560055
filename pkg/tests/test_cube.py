import pytest

from khovanov_oracle import khovanov
from krh.braid import BraidWord
from krh.cube import (
    CubeEngine,
    DMinus,
    IntermediateTorsion,
    check_ins,
    homfly_homology,
    krasner_report,
    rational_sln,
    sln_normalized,
    sln_scaled,
    sln_unnormalized,
)
from krh.exactalg import GradedAbelianGroup
from krh.report import WindowTooSmall, align_shift

UNKNOT = BraidWord(1, ())
Z = GradedAbelianGroup(1)


def test_raw_sl1_unknot_has_two_torsion():
    rep = sln_unnormalized(UNKNOT, 1, 7)
    assert rep.groups[(0, 1, 1)] == Z
    for q in (3, 5, 7):
        assert rep.groups[(0, 1, q)] == GradedAbelianGroup(0, (2,))


def test_homfly_of_one_crossing_is_shifted_unknot():
    a = homfly_homology(BraidWord(2, (1,)), 10).groups
    b = homfly_homology(UNKNOT, 10).groups
    assert align_shift(a, b, 10, 10) == (1, 1, 1)


# Same link, different braid: one overall shift must align the tables.
SAME_LINK = [
    (BraidWord(2, (1, -1)), BraidWord(2, ())),       # both the two-component unlink
    (BraidWord(2, (1, 1, -1)), BraidWord(2, (1,))),
    (BraidWord(2, (1,)), UNKNOT),
    (BraidWord(2, (-1,)), UNKNOT),
    (BraidWord(3, (1, 2)), UNKNOT),
    (BraidWord(3, (1, -2)), UNKNOT),
]


@pytest.mark.parametrize("a,b", SAME_LINK, ids=lambda w: f"{w.strands}:{w.letters}")
@pytest.mark.parametrize("theory", ["homfly", "sl2"])
def test_markov_and_reidemeister_instances(a, b, theory):
    f = (lambda w: homfly_homology(w, 10).groups) if theory == "homfly" else (
        lambda w: sln_normalized(w, 2, 10).groups)
    assert align_shift(f(a), f(b), 10, 10) is not None


def test_unlink_differs_from_unknot():
    a = homfly_homology(BraidWord(2, (1, -1)), 10).groups
    b = homfly_homology(UNKNOT, 10).groups
    assert align_shift(a, b, 10, 10) is None


def test_integral_trefoil_has_two_torsion():
    rep = sln_normalized(BraidWord(2, (1, 1, 1)), 2, 10)
    assert rep.checks["total_isomorphic"]
    assert rep.checks["concentrated"]
    assert rep.groups[(1, 2, 8)] == GradedAbelianGroup(0, (2,))
    assert rep.total_rank() == 4


def test_scaled_theory_matches_raw_rationally():
    w = BraidWord(2, (1, 1))
    a = sln_scaled(w, 2, 8)
    b = sln_unnormalized(w, 2, 8)
    free = lambda r: {k: g.free_rank for k, g in r.groups.items() if g.free_rank}
    assert free(a) == free(b)


def _bigraded(rep):
    return sorted((v, q) for (v, h, q), g in rep.groups.items() for _ in range(g.free_rank))


def _khovanov_bigraded(strands, letters):
    return sorted((-r, q) for (r, q), c in khovanov(strands, letters).items() for _ in range(c))


def _same_up_to_shift(a, b):
    if len(a) != len(b):
        return False
    s = (a[0][0] - b[0][0], a[0][1] - b[0][1])
    return sorted((x + s[0], y + s[1]) for x, y in b) == a


@pytest.mark.parametrize("strands,letters,q", [(2, (1, 1, 1), 12), (2, (1, 1), 10), (2, (-1, -1, -1), 12)])
def test_rational_sl2_matches_khovanov_oracle(strands, letters, q):
    rep = rational_sln(BraidWord(strands, letters), 2, q)
    assert rep.checks["orders_agree"]
    assert _same_up_to_shift(_bigraded(rep), _khovanov_bigraded(strands, letters))


@pytest.mark.slow
def test_figure_eight_matches_khovanov_oracle():
    rep = rational_sln(BraidWord(3, (1, -2, 1, -2)), 2, 12)
    assert rep.total_rank() == 6
    assert _same_up_to_shift(_bigraded(rep), _khovanov_bigraded(3, (1, -2, 1, -2)))


@pytest.mark.parametrize("word", [BraidWord(2, (1,)), BraidWord(3, (1, 2)), BraidWord(3, (-1, 2))],
                         ids=lambda w: str(w.letters))
def test_ins_positive(word):
    assert check_ins(word, "positive", 2, 6).passed


@pytest.mark.parametrize("word", [BraidWord(2, (-1,)), BraidWord(3, (1, -2))], ids=lambda w: str(w.letters))
def test_ins_negative(word):
    assert check_ins(word, "negative", 2, 6).passed


def test_ins_rejects_wrong_sign():
    with pytest.raises(ValueError):
        check_ins(BraidWord(2, (1,)), "negative")


def test_u3_domain_vanishes_for_sl2():
    rep = check_ins(BraidWord(3, (1, 2, 1)), "u3", 2, 9)
    assert rep.passed
    assert set(rep.verdicts.values()) <= {"zero", "null-domain"}


@pytest.mark.slow
@pytest.mark.parametrize("letters", [(1, 2, 1), (2, 1, 2)])
def test_u3_inclusion_split_injective_for_sl3(letters):
    rep = check_ins(BraidWord(3, letters), "u3", 3, 11)
    assert rep.passed
    assert "split-injective" in rep.verdicts.values()


def test_u3_rejects_other_endings():
    with pytest.raises(ValueError):
        check_ins(BraidWord(3, (1, 1, 2)), "u3", 2, 6)


@pytest.mark.parametrize("letters", [(), (1,), (1, 1), (1, 1, 1)])
def test_krasner_first_page_is_homfly(letters):
    w = BraidWord(2 if letters else 1, letters)
    eng = CubeEngine(w)
    hom = homfly_homology(eng, 16).groups
    for s, pg in eng.krasner(1, 10).items():
        for (h, t), g in pg[1].groups.items():
            if not g.is_zero():
                assert hom.get((t, h, s + 3 * h)) == g


@pytest.mark.parametrize("letters,n", [((1,), 1), ((1, 1, 1), 1), ((1, 1, 1), 2)])
def test_krasner_limit_has_rational_rank(letters, n):
    w = BraidWord(2, letters)
    assert krasner_report(w, n, 12).total_rank() == rational_sln(w, n, 12).total_rank()


def test_annihilation_power_is_sharp():
    eng = CubeEngine(BraidWord(2, (1, 1)))
    dm = DMinus("beta", 2)
    m = eng.word.full
    hits = [(h, Q) for h in range(3) for Q in eng.q_range(h, 8) if eng.stage2(m, dm, h, Q).rank]
    assert hits
    assert all(eng.annihilated(m, dm, h, Q, 1, 2) for h, Q in hits)
    assert not all(eng.annihilated(m, dm, h, Q, 1, 1) for h, Q in hits)


def test_negative_window_is_rejected():
    for f in (lambda: homfly_homology(UNKNOT, -1), lambda: sln_normalized(UNKNOT, 2, -1),
              lambda: rational_sln(UNKNOT, 2, -2)):
        with pytest.raises(WindowTooSmall):
            f()


def test_intermediate_torsion_is_an_arithmetic_error():
    assert issubclass(IntermediateTorsion, ArithmeticError)


def test_parallel_engine_is_deterministic():
    w = BraidWord(3, (1, -2, 1))
    a = homfly_homology(w, 8, jobs=1)
    b = homfly_homology(w, 8, jobs=2)
    assert a.groups == b.groups
