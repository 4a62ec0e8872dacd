import pytest
from hypothesis import assume, given, settings, strategies as st

from corpus import lattice_corpus
from genusforge.genus import (
    Constituent,
    GenusError,
    GenusSymbol,
    IllegalSymbol,
    canonicalize_2adic,
    check_legal,
    exists,
    legal_odd_pairs,
    negate,
    oddity,
    p_excess,
    p_length,
    parse_symbol,
    print_symbol,
    symbol_from_gram,
    two_adic_equivalent,
    with_signature,
)
from genusforge.lattice import GramMatrix, root_lattice_d, signature

# symbols of the corpus lattices, frozen from an independent hand/SNF computation
CORPUS_SYMBOLS = {
    "A1": "II_{0,1} 2_7^+1",
    "A2": "II_{0,2} 3^+1",
    "A3": "II_{0,3} 4_5^-1",
    "A5": "II_{0,5} 2_1^+1 3^-1",
    "D4": "II_{0,4} 2_II^-2",
    "D6": "II_{0,6} 2_6^-2",
    "D8": "II_{0,8} 2_II^+2",
    "E6": "II_{0,6} 3^-1",
    "E7": "II_{0,7} 2_1^+1",
    "E8": "II_{0,8}",
    "<44>": "II_{1,0} 4_3^-1 11^+1",
    "<-18>": "II_{0,1} 2_7^+1 9^+1",
    "<18>": "II_{1,0} 2_1^+1 9^-1",
    "U(3)": "II_{1,1} 3^-2",
    "U(8)": "II_{1,1} 8_II^+2",
    "D4(2)": "II_{0,4} 2_II^-2 4_II^-2",
    "[[-4,8],[8,-8]]": "II_{1,1} 4_7^+1 8_1^+1",
    "[[8,4,4],[4,8,2],[4,2,8]]": "II_{3,0} 2_II^+2 8_7^+1 3^+2",
}


@pytest.mark.parametrize("name", sorted(CORPUS_SYMBOLS))
def test_symbol_from_gram(name):
    s = symbol_from_gram(lattice_corpus()[name])
    assert canonicalize_2adic(s) == canonicalize_2adic(parse_symbol(CORPUS_SYMBOLS[name]))


def test_symbol_of_d4_and_rank_one_44():
    assert print_symbol(symbol_from_gram(root_lattice_d(4)).fragment()) == "2_II^-2"
    assert print_symbol(symbol_from_gram(GramMatrix([[44]])).fragment()) == "4_3^-1 11^+1"


def test_parse_print_round_trip():
    for text in ["II_{1,21} 2_II^-2", "4_5^-1 8_1^+1 3^+1", "2_II^-2 3^-1 7^-1", "II_{0,4} 3^+2"]:
        assert print_symbol(parse_symbol(text)) == text
    assert parse_symbol("3^−1") == parse_symbol("3^-1")
    assert parse_symbol("II_{0,21} 4_5^-1 11^+1") == parse_symbol("4_5^-1 11^+1", signature=(0, 21))


@pytest.mark.parametrize("bad", ["2^+1", "3_1^+1", "6^+1", "1^+2", "3^+1 3^-1", "4_9^+1", "x"])
def test_malformed_symbols(bad):
    with pytest.raises(GenusError):
        parse_symbol(bad)


def test_illegal_constituent_rejected():
    with pytest.raises(IllegalSymbol):
        check_legal(parse_symbol("2_3^+1"))
    with pytest.raises(IllegalSymbol):
        exists(parse_symbol("2_3^+1"))
    assert (3, 1) not in legal_odd_pairs(1)
    assert {(1, 1), (7, 1), (3, -1), (5, -1)} == set(legal_odd_pairs(1))


def test_fused_compartment_is_legal():
    s = parse_symbol("2_7^+1 4_3^+1")
    check_legal(s)
    assert print_symbol(canonicalize_2adic(s)) == "2_1^+1 4_1^+1"


@pytest.mark.parametrize("p", [3, 5, 7, 11])
@pytest.mark.parametrize("eps", [1, -1])
def test_p_excess_of_two_dimensional_constituent(p, eps):
    s = parse_symbol(f"{p}^{'+' if eps > 0 else '-'}2")
    assert p_excess(s, p) == (2 * (p - 1) + 2 * (1 - eps)) % 8


def test_p_excess_rank_one():
    # p^{+1}: p - 1; a minus sign at odd exponent adds 4
    assert p_excess(parse_symbol("3^+1"), 3) == 2
    assert p_excess(parse_symbol("3^-1"), 3) == 6
    assert p_excess(parse_symbol("9^-1"), 3) == 0


def test_negate_examples():
    assert print_symbol(negate(parse_symbol("3^-1 7^-1"))) == "3^+1 7^+1"
    assert print_symbol(negate(parse_symbol("5^-1"))) == "5^-1"
    assert print_symbol(negate(parse_symbol("2_7^+1"))) == "2_1^+1"


def test_with_signature_fills_unimodular_parts():
    s = with_signature(parse_symbol("4_5^-1 11^+1"), 0, 21)
    assert s.rank == 21 and s.det() == -44
    assert exists(s)
    with pytest.raises(GenusError):
        with_signature(parse_symbol("3^+2"), 0, 1)


def test_existence_failures():
    assert not exists(parse_symbol("II_{0,1} 2_1^+1"))
    assert not exists(parse_symbol("II_{0,2} 3^-1"))
    assert exists(parse_symbol("II_{0,2} 3^+1"))


def test_p_length():
    s = parse_symbol("II_{0,20} 2_II^-2 3^+2 5^+1")
    assert [p_length(s, p) for p in (2, 3, 5, 7)] == [2, 2, 1, 0]


def _global_congruence(s):
    total = s.sig_plus - s.sig_minus
    for p in s.primes():
        if p != 2:
            total += p_excess(s, p)
    return total % 8 == oddity(s) % 8


def test_oddity_formula_on_corpus():
    for name, g in lattice_corpus().items():
        s = symbol_from_gram(g)
        assert (s.sig_plus, s.sig_minus) == signature(g)
        assert _global_congruence(s), name
        assert exists(s), name


# random legal fragments

@st.composite
def fragments(draw):
    loc = {}
    for p in draw(st.lists(st.sampled_from([2, 3, 5, 7]), min_size=1, max_size=3, unique=True)):
        exps = draw(st.lists(st.integers(1, 3), min_size=1, max_size=2, unique=True))
        cons = []
        for e in exps:
            if p != 2:
                cons.append(Constituent(p, e, draw(st.integers(1, 2)), draw(st.sampled_from([1, -1]))))
            elif draw(st.booleans()):
                cons.append(Constituent(2, e, 2 * draw(st.integers(1, 2)), draw(st.sampled_from([1, -1])), "II"))
            else:
                n = draw(st.integers(1, 3))
                odd, sign = draw(st.sampled_from(sorted(legal_odd_pairs(n))))
                cons.append(Constituent(2, e, n, sign, odd))
        loc[p] = cons
    s = GenusSymbol(loc)
    try:
        check_legal(s)
    except IllegalSymbol:
        assume(False)
    return s


@given(fragments())
@settings(max_examples=200, deadline=None)
def test_negate_is_an_involution(s):
    assert two_adic_equivalent(negate(negate(s)), s)
    assert negate(negate(s)).per_prime.keys() == s.per_prime.keys()


@given(fragments())
@settings(max_examples=200, deadline=None)
def test_canonicalize_is_idempotent(s):
    c = canonicalize_2adic(s)
    assert canonicalize_2adic(c) == c
    assert two_adic_equivalent(c, s)


@given(fragments())
@settings(max_examples=200, deadline=None)
def test_print_parse_round_trip(s):
    assert parse_symbol(print_symbol(s)) == s
