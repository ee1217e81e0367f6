from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from chemalgebra.balance import BalanceStatus
from chemalgebra.errors import LineCountMismatch
from chemalgebra.reaction import Encoding, parse_stoich_line
from chemalgebra.scoring import (
    MatchCounts,
    identity_baseline,
    match_bags,
    match_molecules_only,
    score_lines,
    score_sample,
)

PRED = "{3}H2O.{2}HCl.{1}CO2"
TRUTH = "{2}H2O.{2}HCl.{1}CH4"


def bags(text):
    return parse_stoich_line(text, Encoding.FORMULA)


def test_worked_multiset_example():
    counts = match_bags(bags(PRED), bags(TRUTH))
    assert (counts.tp, counts.fp, counts.fn) == (4, 2, 1)
    assert counts.jaccard == Fraction(4, 7)
    assert counts.f1 == Fraction(8, 11)


def test_worked_molecule_only_example():
    counts = match_molecules_only(bags(PRED), bags(TRUTH))
    assert (counts.tp, counts.fp, counts.fn) == (2, 1, 1)
    assert counts.jaccard == Fraction(1, 2)
    assert counts.f1 == Fraction(2, 3)


def test_match_identical_and_disjoint():
    same = match_bags(bags(TRUTH), bags(TRUTH))
    assert same.fp == same.fn == 0 and same.tp == 5
    disjoint = match_bags(bags("{1}CO2"), bags("{2}H2O"))
    assert disjoint.tp == 0 and disjoint.fp == 1 and disjoint.fn == 2


def test_presence_collapse():
    counts = match_molecules_only(bags("{5}H2O"), bags("{1}H2O"))
    assert (counts.tp, counts.fp, counts.fn) == (1, 0, 0)


def test_match_is_symmetric_with_fp_fn_swapped():
    a, b = bags(PRED), bags(TRUTH)
    fwd = match_bags(a, b)
    rev = match_bags(b, a)
    assert (fwd.tp, fwd.fp, fwd.fn) == (rev.tp, rev.fn, rev.fp)


def test_count_conservation():
    counts = match_bags(bags(PRED), bags(TRUTH))
    assert counts.tp + counts.fp == 6  # predicted multiplicity
    assert counts.tp + counts.fn == 5  # truth multiplicity


def test_score_sample_flags():
    s = score_sample("{1}CH4.{2}H2O", TRUTH, PRED, Encoding.FORMULA)
    assert not s.exact
    assert s.valid
    assert not s.alo  # CH4 missing from the prediction
    s2 = score_sample("{1}CH4", "{1}CH4", "{1}CH4", Encoding.FORMULA)
    assert s2.exact and s2.alo and s2.counts.fp == 0 and s2.counts.fn == 0


def test_alo_ignores_coefficients():
    s = score_sample("{1}CH4", "{2}H2O.{1}CH4", "{9}H2O.{9}CH4", Encoding.FORMULA)
    assert s.alo and not s.exact


def test_balance_classification_against_src():
    s = score_sample("{1}CO2.{4}H2", "{1}CH4.{2}H2O", "{1}CH4.{2}H2O", Encoding.FORMULA)
    assert s.balance_status is BalanceStatus.BALANCED
    s = score_sample("{1}CO2.{4}H2", "{1}CH4.{2}H2O", "{1}CH4.{1}H2O", Encoding.FORMULA)
    assert s.balance_status is BalanceStatus.DEFICITARY
    s = score_sample("{1}CO2.{4}H2", "{1}CH4.{2}H2O", "{1}CH4.{2}H2O.{1}N2", Encoding.FORMULA)
    assert s.balance_status is BalanceStatus.EXCEEDING


def test_unparseable_prediction_lines():
    s = score_sample("{1}CH4", "{2}H2O.{1}CH4", "garbage", Encoding.FORMULA)
    assert not s.valid
    assert (s.counts.tp, s.counts.fp, s.counts.fn) == (0, 0, 3)
    partial = score_sample("{1}CH4", "{2}H2O.{1}CH4", "{1}H2O.garbage", Encoding.FORMULA)
    assert not partial.valid
    assert (partial.counts.tp, partial.counts.fp, partial.counts.fn) == (1, 0, 2)


def test_score_lines_single_sample_report():
    report = score_lines(["{1}CH4"], [TRUTH], [PRED], Encoding.FORMULA)
    assert report.n == 1
    assert report.em == 0
    assert report.jac == Fraction(4, 7)
    assert report.f1 == Fraction(8, 11)
    assert report.mol_jac == Fraction(1, 2)
    assert report.mol_f1 == Fraction(2, 3)


def test_perfect_prediction_scores_100():
    report = score_lines(["{1}CH4"], [TRUTH], [TRUTH], Encoding.FORMULA)
    assert report.em == report.jac == report.f1 == 1
    assert report.alo == report.val == 1


def test_line_count_mismatch():
    with pytest.raises(LineCountMismatch):
        score_lines(["a"], ["b", "c"], ["d"], Encoding.FORMULA)


def test_aggregation_is_exact_mean():
    report = score_lines(
        ["{1}CH4", "{1}CH4"],
        [TRUTH, TRUTH],
        [PRED, TRUTH],
        Encoding.FORMULA,
    )
    assert report.jac == (Fraction(4, 7) + 1) / 2
    assert report.em == Fraction(1, 2)
    assert report.percent("jac") == f"{float((Fraction(4, 7) + 1) / 2) * 100:.2f}"


def test_report_delimited_fields():
    report = score_lines(["{1}CH4"], [TRUTH], [PRED], Encoding.FORMULA)
    text = report.to_delimited()
    header, row = text.strip().split("\n")
    assert header.split("\t") == ["n", "em", "jac", "f1", "mol_jac", "mol_f1",
                                  "alo", "val", "bal", "def", "exc", "d_e"]
    assert row.split("\t")[0] == "1"


def test_identity_baseline_roundtrip():
    src = ["{1}CO2.{4}H2.{1}Ni", "{2}H2O.{1}CH4"]
    pred = identity_baseline(src, Encoding.FORMULA)
    report = score_lines(src, src, pred, Encoding.FORMULA)
    assert report.em == 1
    report2 = score_lines(src, ["{1}CH4", "{1}CO2"], pred, Encoding.FORMULA)
    assert report2.bal == 1 and report2.em == 0


def test_parallel_scoring_matches_serial():
    src = ["{1}CH4"] * 8
    tgt = [TRUTH] * 8
    pred = [PRED, TRUTH] * 4
    assert (score_lines(src, tgt, pred, Encoding.FORMULA, jobs=2)
            == score_lines(src, tgt, pred, Encoding.FORMULA, jobs=1))


counts_strategy = st.builds(
    MatchCounts,
    st.integers(0, 50), st.integers(0, 50), st.integers(0, 50),
)


@given(counts_strategy)
def test_jaccard_never_exceeds_f1(counts):
    assert counts.jaccard <= counts.f1
    if counts.fp + counts.fn == 0:
        assert counts.jaccard == counts.f1


@given(st.lists(st.tuples(st.integers(0, 5), st.integers(0, 5)), min_size=1, max_size=6),
       st.lists(st.tuples(st.integers(0, 5), st.integers(0, 5)), min_size=1, max_size=6))
def test_match_conservation_property(pred_pairs, truth_pairs):
    from chemalgebra.formula import ChemicalFormula, AtomBag
    from chemalgebra.reaction import StoichBag, StoichEntry

    def to_bag(pairs):
        entries = []
        for i, (mol_id, coeff) in enumerate(pairs):
            if coeff == 0:
                continue
            formula = ChemicalFormula.from_bag(AtomBag({"C": mol_id + 1}))
            entries.append(StoichEntry(coeff, formula))
        return StoichBag(entries)

    pred, truth = to_bag(pred_pairs), to_bag(truth_pairs)
    counts = match_bags(pred, truth)
    assert counts.tp + counts.fp == sum(pred.as_multiset().values())
    assert counts.tp + counts.fn == sum(truth.as_multiset().values())
    mol = match_molecules_only(pred, truth)
    assert mol.tp <= len(set(pred.as_multiset()) & set(truth.as_multiset()))
