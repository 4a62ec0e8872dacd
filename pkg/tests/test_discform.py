import random
from fractions import Fraction as F

import pytest
from hypothesis import given, settings, strategies as st

from corpus import U2, V2, lattice_corpus
from genusforge.classify import TABLE5
from genusforge.discform import (
    FiniteQuadraticForm,
    FormError,
    GluingDatum,
    WittFailure,
    elementary_subspaces,
    embeddings,
    enumerate_gluings,
    from_genus,
    glue,
    isometric,
    jordan_constituents,
    orthogonal_complement,
    symbol_of_form,
    witt_complement,
)
from genusforge.genus import p_length, parse_symbol, symbol_from_gram
from genusforge.lattice import GramMatrix, discriminant_form


def form(text):
    return from_genus(parse_symbol(text))


def test_form_validation():
    with pytest.raises(FormError):
        FiniteQuadraticForm([2], [[F(1, 3)]])
    with pytest.raises(FormError):
        FiniteQuadraticForm([2], [[F(1, 4)]])
    with pytest.raises(FormError):
        FiniteQuadraticForm([2, 2], [[1, F(1, 2)], [0, 1]])
    assert FiniteQuadraticForm([1, 3], [[0, 0], [0, F(2, 3)]]).orders == (3,)


def test_u2_and_v2_differ():
    assert sorted(U2.q(x) for x in U2.elements()) == [0, 0, 0, 1]
    assert sorted(V2.q(x) for x in V2.elements()) == [0, 1, 1, 1]
    assert not isometric(U2, V2)
    assert isometric(U2, U2) and isometric(V2, form("2_II^-2"))


def test_half_integral_sub_has_embedding_dependent_complements():
    half, q32, q34 = F(1, 2), F(3, 2), F(3, 4)
    a = FiniteQuadraticForm([2, 2, 4, 4], [[half, 0, 0, 0], [0, q32, 0, 0], [0, 0, q34, 0], [0, 0, 0, q34]])
    c1 = orthogonal_complement([(1, 0, 0, 0), (0, 1, 0, 0)], a)
    c2 = orthogonal_complement([(1, 0, 2, 0), (0, 1, 0, 2)], a)
    d1 = FiniteQuadraticForm([4, 4], [[q34, 0], [0, q34]])
    d2 = FiniteQuadraticForm([4, 4], [[F(5, 4), 0], [0, F(1, 4)]])
    assert isometric(c1, d1) and isometric(c2, d2)
    assert not isometric(d1, d2)
    assert F(1, 4) not in {c1.q(x) for x in c1.elements()}
    q = FiniteQuadraticForm([2, 2], [[half, 0], [0, q32]])
    with pytest.raises(WittFailure):
        witt_complement(a, q)


def test_v2_complement_inside_three_half_integral_generators():
    a = FiniteQuadraticForm([2, 2, 2], [[F(7, 2), 0, 0], [0, F(7, 2), 0], [0, 0, F(7, 2)]])
    c = orthogonal_complement([(1, 1, 0), (0, 1, 1)], a)
    assert c.order == 2
    (x,) = [x for x in c.elements() if any(x)]
    assert c.q(x) == F(5, 2) % 2


@pytest.mark.parametrize("big, small", [
    ("2_5^+3 7^-1", "2_5^-1 7^-1"),
    ("2_II^-2 8_3^-1", "8_3^-1"),
    ("2_5^+3 3^-1 5^+1", "2_5^-1 3^-1 5^+1"),
])
def test_witt_complement_examples(big, small):
    assert isometric(witt_complement(form(big), V2), form(small))


def test_witt_complement_trivial_cases():
    assert witt_complement(V2, V2).order == 1
    with pytest.raises(FormError):
        witt_complement(form("2_II^+2"), V2.direct_sum(V2))


@pytest.mark.parametrize("hm", sorted(TABLE5))
def test_witt_complement_golden_rows(hm):
    lam, aux = TABLE5[hm]
    assert isometric(witt_complement(form(lam), V2), form(aux))


def test_embedding_counts():
    # v(2) has six form-preserving automorphisms (it is the hexagonal shape mod 2)
    assert len(embeddings(V2, V2)) == 6
    assert len(embeddings(U2, U2)) == 2
    assert embeddings(V2, U2) == []


@pytest.mark.parametrize("r, k, count", [(3, 1, 7), (3, 2, 7), (4, 2, 35), (6, 2, 651), (5, 0, 1)])
def test_elementary_subspace_counts(r, k, count):
    a = FiniteQuadraticForm([2] * r, [[F(1, 2) if i == j else 0 for j in range(r)] for i in range(r)])
    subs = elementary_subspaces(a, 2, k)
    assert len(subs) == count
    assert len({frozenset(a.span(b)) for b in subs}) == count


def test_gluing_always_contains_trivial():
    ds = enumerate_gluings(form("5^+1"), form("3^+1"), 5)
    assert len(ds) == 1 and ds[0].order == 1
    assert isometric(glue(ds[0]), form("5^+1 3^+1"))


def test_rank_one_six_does_not_glue_at_three():
    a = form("2_1^+1 3^-1 9^+1")
    v = discriminant_form(GramMatrix([[6]]))
    orders = {d.order for d in enumerate_gluings(a, v, 3)}
    assert orders == {1}


def test_order_nine_gluing_for_two_three_nine():
    a = form("2_7^+1 3^+2 9^-1")
    ds = [d for d in enumerate_gluings(a, form("3^+2"), 3) if d.order == 9]
    assert ds
    assert all(isometric(glue(d), form("2_7^+1 9^-1")) for d in ds)


def test_gluing_datum_validation():
    a, b = form("3^+1"), form("3^-1")
    with pytest.raises(FormError):
        GluingDatum(a, a, ((1, 1),))
    d = GluingDatum(a, b, ((1, 1),))
    assert d.order == 3 and glue(d).order == 1


def test_jordan_constituents_of_known_forms():
    cons = jordan_constituents(form("3^+1 9^-1"), 3)
    assert [(c.scale, c.dim, c.sign) for c in cons] == [(3, 1, 1), (9, 1, -1)]
    assert str(symbol_of_form(form("2_II^-2 4_3^-1"))) == "2_II^-2 4_3^-1"


def test_element_cap():
    big = FiniteQuadraticForm([2 ** 11] * 2, [[F(2, 2 ** 11), 0], [0, F(2, 2 ** 11)]])
    with pytest.raises(FormError):
        list(big.elements())


def test_lattice_and_symbol_routes_agree_on_corpus():
    for name, g in lattice_corpus().items():
        s = symbol_from_gram(g)
        a = discriminant_form(g)
        assert isometric(from_genus(s), a), name
        for p in a.primes():
            assert p_length(s, p) == a.p_rank(p), name


# properties

SMALL = ["3^+1", "3^-1", "3^+2", "9^+1", "2_II^-2", "2_II^+2", "2_1^+1", "2_7^+1", "4_3^-1",
         "2_1^+1 3^-1", "5^-1", "4_II^+2", "2_3^-1 4_1^+1"]


@given(st.sampled_from(SMALL), st.sampled_from(SMALL), st.sampled_from([2, 3]))
@settings(max_examples=80, deadline=None)
def test_glue_order_identity(x, y, p):
    left, right = form(x), form(y)
    for d in enumerate_gluings(left, right, p):
        g = glue(d)
        assert g.order * d.order ** 2 == left.order * right.order
        if d.order == 1:
            assert isometric(g, left.direct_sum(right))


@given(st.sampled_from(SMALL + ["2_5^+3 3^-1", "8_1^+1 3^+2"]), st.integers(0, 10 ** 6))
@settings(max_examples=80, deadline=None)
def test_orthogonal_complement_routes_agree(sym, seed):
    a = form(sym)
    rng = random.Random(seed)
    els = list(a.elements())
    gens = rng.sample(els, min(len(els), rng.randint(1, 2)))
    assert set(a.orthogonal_elements(gens)) == a.span(a.orthogonal_generators(gens))


@given(st.sampled_from(SMALL + ["2_5^+3 7^-1", "4_7^+1 8_1^+1 3^+2", "8_6^-2 3^-1", "11^+2"]))
@settings(max_examples=40, deadline=None)
def test_symbol_of_form_round_trip(sym):
    a = form(sym)
    assert isometric(from_genus(symbol_of_form(a)), a)
