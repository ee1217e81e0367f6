import random

import pytest

from chemalgebra.errors import BadCoefficient, EmptyBag, MalformedReaction
from chemalgebra.formula import AtomBag
from chemalgebra.reaction import (
    Encoding,
    StoichBag,
    convert_encoding,
    parse_reaction,
    parse_stoich_line,
    print_reaction,
    print_stoich_line,
)
from chemalgebra.rng import SplitMix64

from conftest import CORPUS_LINES, random_formula_reaction


def formulas(bag: StoichBag):
    return {e.mol.certificate: e.coefficient for e in bag}


def test_parse_reaction_smiles_sabatier():
    rxn = parse_reaction("O=C=O.[HH].[HH].[HH].[HH]>[Ni]>C.O.O")
    assert {e.mol.formula.text: e.coefficient for e in rxn.reactants} == {"CO2": 1, "H2": 4}
    assert {e.mol.formula.text: e.coefficient for e in rxn.reagents} == {"Ni": 1}
    assert {e.mol.formula.text: e.coefficient for e in rxn.products} == {"CH4": 1, "H2O": 2}


def test_identity_reaction_round_trips():
    rxn = parse_reaction("C>>C")
    assert rxn.left_bag() == rxn.right_bag()
    assert print_reaction(rxn) == "{1}C>>{1}C"


def test_separator_count_is_enforced():
    with pytest.raises(MalformedReaction):
        parse_reaction("A>B")


def test_spaced_arrow_is_tolerated():
    rxn = parse_reaction("{1}CO2.{4}H2.{1}Ni > > {1}CH4.{2}H2O.{1}Ni", Encoding.FORMULA)
    assert print_reaction(rxn) == "{1}CO2.{4}H2.{1}Ni>>{1}CH4.{2}H2O.{1}Ni"


def test_parse_stoich_line_examples():
    bag = parse_stoich_line("{1}O=C=O.{4}[HH].{1}[Ni]", Encoding.SMILES)
    assert {e.mol.formula.text: e.coefficient for e in bag} == {"CO2": 1, "H2": 4, "Ni": 1}

    bag_f = parse_stoich_line("{1}CO2.{4}H2.{1}Ni", Encoding.FORMULA)
    assert {e.mol.text: e.coefficient for e in bag_f} == {"CO2": 1, "H2": 4, "Ni": 1}
    assert bag.total_bag() == bag_f.total_bag()

    five = parse_stoich_line("{3}HCl.{4}Cl-.{1}C14H22O.{1}C6H12O.{2}C8H10", Encoding.FORMULA)
    assert len(five) == 5


def test_missing_prefix_defaults_to_one():
    bag = parse_stoich_line("CO2.{2}H2", Encoding.FORMULA)
    assert [e.coefficient for e in bag] == [1, 2]


@pytest.mark.parametrize("bad", ["{0}C", "{-3}C", "{x}C", "{2000000}C"])
def test_bad_coefficients(bad):
    with pytest.raises(BadCoefficient):
        parse_stoich_line(bad, Encoding.SMILES)


def test_duplicate_folding():
    assert (parse_stoich_line("O.O.O", Encoding.SMILES)
            == parse_stoich_line("{3}O", Encoding.SMILES))


def test_normalization_idempotent():
    bag = parse_stoich_line("{2}C.{3}C.{1}O", Encoding.SMILES)
    again = StoichBag(bag.entries)
    assert bag == again and [e.coefficient for e in again] == [5, 1]


def test_print_round_trip_both_encodings():
    rng = random.Random(11)
    for _ in range(25):
        rxn = random_formula_reaction(rng)
        line = print_stoich_line(rxn.left_bag(), Encoding.FORMULA)
        assert parse_stoich_line(line, Encoding.FORMULA) == rxn.left_bag()
    for text in CORPUS_LINES:
        rxn = parse_reaction(text)
        line = print_stoich_line(rxn.right_bag(), Encoding.SMILES)
        assert parse_stoich_line(line, Encoding.SMILES) == rxn.right_bag()


def test_print_uses_canonical_smiles():
    bag = parse_stoich_line("{2}O", Encoding.SMILES)
    assert print_stoich_line(bag, Encoding.SMILES) == "{2}O"
    bag2 = parse_stoich_line("OCC", Encoding.SMILES)
    assert print_stoich_line(bag2, Encoding.SMILES) == print_stoich_line(
        parse_stoich_line("CCO", Encoding.SMILES), Encoding.SMILES)


def test_print_empty_bag_rejected():
    with pytest.raises(EmptyBag):
        print_stoich_line(StoichBag(), Encoding.SMILES)


def test_seeded_shuffle_is_deterministic():
    bag = parse_stoich_line("{1}CO2.{4}H2.{1}Ni.{2}H2O.{1}CH4", Encoding.FORMULA)
    a = print_stoich_line(bag, Encoding.FORMULA, SplitMix64(99))
    b = print_stoich_line(bag, Encoding.FORMULA, SplitMix64(99))
    c = print_stoich_line(bag, Encoding.FORMULA, SplitMix64(100))
    assert a == b
    assert sorted(a.split(".")) == sorted(c.split("."))
    assert parse_stoich_line(a, Encoding.FORMULA) == bag


def test_reagent_classification_on_two_sided_input():
    rxn = parse_reaction("{1}CO2.{4}H2.{1}Ni>>{1}CH4.{2}H2O.{1}Ni", Encoding.FORMULA)
    assert {e.mol.text for e in rxn.reagents} == {"Ni"}
    assert {e.mol.text for e in rxn.reactants} == {"CO2", "H2"}


def test_unequal_coefficients_stay_on_their_sides():
    # one HCl passes through, one more is produced
    rxn = parse_reaction("{1}HCl.{1}C5H5N>>{2}HCl.{1}C5H5N", Encoding.FORMULA)
    assert {e.mol.text for e in rxn.reagents} == {"C5H5N"}
    assert {e.mol.text: e.coefficient for e in rxn.reactants} == {"HCl": 1}
    assert {e.mol.text: e.coefficient for e in rxn.products} == {"HCl": 2}


def test_dialect_equivalence():
    for text in CORPUS_LINES:
        rxn = parse_reaction(text)
        conv = convert_encoding(rxn, Encoding.FORMULA)
        assert conv.left_total() == rxn.left_total()
        assert conv.right_total() == rxn.right_total()


def test_total_bag_accumulates():
    bag = parse_stoich_line("{1}CO2.{4}H2.{1}Ni", Encoding.FORMULA)
    assert bag.total_bag() == AtomBag({"C": 1, "H": 8, "O": 2, "Ni": 1})
