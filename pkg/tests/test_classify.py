import pytest
from sympy import primerange

from genusforge.classify import (
    ClassificationEntry,
    DataError,
    TABLE4_IDS,
    classify_all,
    classify_entry,
    dataset,
    embedded_entries,
    get_entry,
    load_entries,
    mukai_holds,
    mukai_residues,
    mukai_residues_closed_form,
    parse_entries,
    reason_code,
    reproduce_table,
    symbolic_conditions,
    validate_entries,
    verdict_line,
)
from genusforge.criteria import chi

HEADER = "hm_id\tgroup\torder\trank_fixed\tgenus\torbits\tcontains\n"


def test_embedded_corpus_is_valid():
    entries = list(embedded_entries())
    assert validate_entries(entries) == []
    assert {e.hm_id for e in entries} >= set(TABLE4_IDS)


def test_rank_two_row_rejected():
    with pytest.raises(DataError, match="line 2"):
        parse_entries(HEADER + "999\tX\t10\t2\t3^+1\t-\t-\n")


def test_symbol_rank_mismatch_rejected():
    # 22 constituent dimensions cannot fit into rank 21
    with pytest.raises(DataError):
        parse_entries(HEADER + "999\tX\t10\t3\t3^+22\t-\t-\n")
    # odd leftover dimension for an even lattice
    with pytest.raises(DataError):
        parse_entries(HEADER + "999\tX\t10\t4\t2_1^+1 3^+1\t-\t-\n")


def test_schema_errors_carry_line_numbers():
    with pytest.raises(DataError, match="line 1"):
        parse_entries("1\t2\t3\n")
    with pytest.raises(DataError, match="line 2"):
        parse_entries(HEADER + "abc\tX\t10\t3\t3^+1\t-\t-\n")


def test_validation_reports_orbit_problems():
    bad = ClassificationEntry(500, "X", 10, 4, "3^+1 5^+1 7^+1", ((1, 1, 1, 21),))
    report = validate_entries([bad, bad])
    assert any("duplicate" in r for r in report)
    assert any("square class" in r for r in report)


def test_load_entries_and_environment(tmp_path, monkeypatch):
    path = tmp_path / "extra.tsv"
    path.write_text(HEADER + "900\tTest\t60\t4\t3^+1 5^+1 7^+1\t1,1,7,15\t-\n", encoding="utf-8")
    entries = load_entries(path)
    assert entries[0].hm_id == 900 and entries[0].orbits == ((1, 1, 7, 15),)
    monkeypatch.setenv("GENUSFORGE_DATA", str(path))
    assert 900 in dataset() and 165 in dataset()


@pytest.mark.parametrize("hm, p, expected", [(165, 11, "yes"), (165, 7, "no"), (120, 11, "yes"),
                                             (128, 5, "yes"), (163, 3, "yes"), (167, 5, "yes"),
                                             (169, 3, "no"), (201, 3, "no"), (171, 2, "yes"), (162, 2, "no")])
def test_classify_examples(hm, p, expected):
    assert classify_entry(get_entry(hm), p).realized == expected


def test_square_determinant_rows_only_at_one_prime():
    for p in primerange(2, 200):
        v = classify_entry(get_entry(128), p)
        assert v.realized == ("yes" if p == 5 else "no"), p


def test_every_verdict_cites_reasons():
    for hm, p, v in classify_all(bound=14):
        assert v.reasons, (hm, p)
        assert v.realized in ("yes", "no", "undetermined")


def test_classification_is_order_independent():
    entries = dataset()
    shuffled = dict(reversed(list(entries.items())))
    a = [(hm, p, v.realized) for hm, p, v in classify_all(entries, 30)]
    b = [(hm, p, v.realized) for hm, p, v in classify_all(shuffled, 30)]
    assert a == b


def test_verdict_line_format():
    v = classify_entry(get_entry(102), 5)
    hm, p, yes_no, chain = verdict_line(102, 5, v).split("\t")
    assert (hm, p, yes_no) == ("102", "5", "no")
    assert "(21/5)=1" in chain and reason_code(v) == "(21/5)=1"


@pytest.mark.parametrize("table", [1, 2, 4, 6, 7])
def test_tables_reproduce(table):
    diff = reproduce_table(table)
    assert diff.ok, diff.mismatches()


def test_unknown_table():
    with pytest.raises(KeyError):
        reproduce_table(3)


def test_missing_genus_symbol():
    with pytest.raises(DataError):
        classify_entry(ClassificationEntry(1, "X", 1, 3, ""), 5)


def test_symbolic_conditions():
    assert symbolic_conditions(get_entry(102)) == "p does not divide 1693440 and (21/p) = -1"
    assert symbolic_conditions(get_entry(165)) is None


def test_mukai_small_primes():
    assert not mukai_holds(2) and not mukai_holds(11)
    assert mukai_holds(311)
    with pytest.raises(ValueError):
        mukai_holds(15)


def test_mukai_residues_match_squares():
    assert mukai_residues(20000) == mukai_residues_closed_form()
    assert len(mukai_residues_closed_form()) == 12


def test_mukai_agrees_with_legendre_symbols():
    for p in primerange(3, 3000):
        direct = p > 7 and all(chi(q, p) == 1 for q in (2, 3, 5, 7))
        assert mukai_holds(p) == direct


def test_mukai_primes_realize_no_table4_group():
    for p in primerange(2, 2000):
        if mukai_holds(p):
            for hm in TABLE4_IDS:
                assert classify_entry(get_entry(hm), p).realized == "no"
