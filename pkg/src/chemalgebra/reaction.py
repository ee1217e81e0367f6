"""Reaction data model and the three text dialects.

Supported texts:

* plain reaction SMILES ``R>G>P`` with ``.``-separated molecules,
* stoichiometric lines, one side per line: ``{3}HCl.{4}Cl-`` (SMILES or
  FORMULA rendering of each molecule),
* two-sided stoichiometric reactions ``LEFT>>RIGHT``.

Molecules are deduplicated per side: normalization merges entries that share
a canonical certificate by summing their coefficients. A molecule appearing
on both sides with the same coefficient is classified as a reagent, which
the balance solver later turns into a tie constraint.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, List, Optional, Sequence, Tuple, Union

from .errors import BadCoefficient, EmptyBag, MalformedReaction
from .formula import AtomBag, ChemicalFormula, parse_formula, sum_bags
from .rng import SplitMix64
from .smiles import MolGraph, molecule_from_smiles

MAX_COEFFICIENT = 10**6

Molecule = Union[MolGraph, ChemicalFormula, "RenderedMolecule"]


class Encoding(Enum):
    SMILES = "smiles"
    FORMULA = "formula"


def molecule_key(mol: Molecule) -> object:
    """Canonical identity used to merge and compare molecules."""
    return mol.certificate


def molecule_bag(mol: Molecule) -> AtomBag:
    if isinstance(mol, (ChemicalFormula, RenderedMolecule)):
        return mol.bag
    assert mol.formula is not None
    return mol.formula.bag


def render_molecule(mol: Molecule, encoding: Encoding) -> str:
    if encoding is Encoding.FORMULA:
        if isinstance(mol, ChemicalFormula):
            return mol.text
        if isinstance(mol, RenderedMolecule):
            from .formula import format_formula
            return format_formula(mol.bag)
        assert mol.formula is not None
        return mol.formula.text
    if isinstance(mol, ChemicalFormula):
        raise MalformedReaction("formula-encoded molecule cannot be rendered as SMILES")
    if isinstance(mol, RenderedMolecule):
        return mol.text
    assert mol.canonical_smiles is not None
    return mol.canonical_smiles


def to_formula_molecule(mol: Molecule) -> ChemicalFormula:
    if isinstance(mol, ChemicalFormula):
        return mol
    if isinstance(mol, RenderedMolecule):
        return ChemicalFormula.from_bag(mol.bag)
    assert mol.formula is not None
    return mol.formula


@dataclass(frozen=True)
class RenderedMolecule:
    """Corpus-scale stand-in for a parsed molecule: canonical text plus bag.

    Canonical SMILES strings are in bijection with certificates (re-parsing
    one always reproduces the certificate it was written from), so the text
    is a sound merge key and the heavyweight graph can be dropped.
    """

    text: str
    bag: AtomBag

    @property
    def certificate(self) -> object:
        return ("smiles", self.text)


@dataclass(frozen=True)
class StoichEntry:
    coefficient: int
    mol: Molecule

    def __post_init__(self):
        if self.coefficient < 1:
            raise BadCoefficient(f"coefficient must be >= 1, got {self.coefficient}")

    @property
    def key(self) -> object:
        return molecule_key(self.mol)

    def scaled(self, k: int) -> "StoichEntry":
        return StoichEntry(self.coefficient * k, self.mol)


class StoichBag:
    """Ordered list of coefficiented molecules with certificate-level dedup."""

    __slots__ = ("entries",)

    def __init__(self, entries: Iterable[StoichEntry] = (), normalize: bool = True):
        items = list(entries)
        if normalize:
            merged: dict = {}
            order: List[object] = []
            for e in items:
                k = e.key
                if k in merged:
                    merged[k] = StoichEntry(merged[k].coefficient + e.coefficient, merged[k].mol)
                else:
                    merged[k] = e
                    order.append(k)
            items = [merged[k] for k in order]
        self.entries: Tuple[StoichEntry, ...] = tuple(items)

    def __iter__(self):
        return iter(self.entries)

    def __len__(self) -> int:
        return len(self.entries)

    def __bool__(self) -> bool:
        return bool(self.entries)

    def __eq__(self, other) -> bool:
        if not isinstance(other, StoichBag):
            return NotImplemented
        return self.as_multiset() == other.as_multiset()

    def __hash__(self):
        return hash(frozenset(self.as_multiset().items()))

    def as_multiset(self) -> dict:
        return {e.key: e.coefficient for e in self.entries}

    def coefficient_of(self, key: object) -> int:
        for e in self.entries:
            if e.key == key:
                return e.coefficient
        return 0

    def total_bag(self) -> AtomBag:
        return sum_bags(molecule_bag(e.mol).scale(e.coefficient) for e in self.entries)

    def scaled(self, k: int) -> "StoichBag":
        return StoichBag((e.scaled(k) for e in self.entries), normalize=False)

    def extended(self, extra: Iterable[StoichEntry]) -> "StoichBag":
        return StoichBag(list(self.entries) + list(extra))

    def __repr__(self) -> str:
        inner = ", ".join(f"{e.coefficient}x{e.key!r}" for e in self.entries)
        return f"StoichBag({inner})"


@dataclass(frozen=True)
class StoichReaction:
    """Reactants, reagents and products; reagents belong to both sides."""

    reactants: StoichBag
    reagents: StoichBag
    products: StoichBag
    encoding: Encoding

    def left_entries(self) -> List[StoichEntry]:
        return list(self.reactants) + list(self.reagents)

    def right_entries(self) -> List[StoichEntry]:
        return list(self.products) + list(self.reagents)

    def left_bag(self) -> StoichBag:
        return StoichBag(self.left_entries())

    def right_bag(self) -> StoichBag:
        return StoichBag(self.right_entries())

    def left_total(self) -> AtomBag:
        return self.left_bag().total_bag()

    def right_total(self) -> AtomBag:
        return self.right_bag().total_bag()


_COEFF = re.compile(r"\{(-?\d+)\}")


def _parse_item(item: str, encoding: Encoding) -> StoichEntry:
    coefficient = 1
    m = _COEFF.match(item)
    if m:
        coefficient = int(m.group(1))
        if coefficient < 1:
            raise BadCoefficient(f"coefficient {coefficient} in {item!r}")
        if coefficient > MAX_COEFFICIENT:
            raise BadCoefficient(f"coefficient {coefficient} above cap in {item!r}")
        item = item[m.end():]
    elif item.startswith("{"):
        raise BadCoefficient(f"unreadable coefficient prefix in {item!r}")
    if not item:
        raise MalformedReaction("empty molecule token")
    if encoding is Encoding.FORMULA:
        mol: Molecule = parse_formula(item)
    else:
        mol = molecule_from_smiles(item)
    return StoichEntry(coefficient, mol)


def parse_stoich_line(text: str, encoding: Encoding) -> StoichBag:
    """Parse one side: '.'-separated ``{k}MOL`` items (missing ``{k}`` means 1)."""
    text = re.sub(r"\s+", "", text)
    if not text:
        raise MalformedReaction("empty stoichiometric line")
    return StoichBag(_parse_item(item, encoding) for item in text.split("."))


def _parse_item_lenient(item: str) -> StoichEntry:
    """SMILES first, raw formula as the fallback (solver input convenience)."""
    from .errors import ChemError

    try:
        return _parse_item(item, Encoding.SMILES)
    except ChemError:
        return _parse_item(item, Encoding.FORMULA)


def print_stoich_line(bag: StoichBag, encoding: Encoding,
                      rng: Optional[SplitMix64] = None) -> str:
    """Render a bag as ``{k}MOL`` items joined by dots.

    Entry order is preserved unless ``rng`` is given, in which case the
    entries are shuffled with it (one deterministic permutation per call).
    """
    if not bag:
        raise EmptyBag("cannot print an empty stoichiometric bag")
    entries: Sequence[StoichEntry] = bag.entries
    if rng is not None:
        entries = rng.shuffle(entries)
    return ".".join(f"{{{e.coefficient}}}{render_molecule(e.mol, encoding)}"
                    for e in entries)


def classify_reaction(left: StoichBag, middle: StoichBag, right: StoichBag,
                      encoding: Encoding) -> StoichReaction:
    """Assemble a reaction, moving equal-coefficient both-side molecules into reagents."""
    reagent_entries = list(middle)
    right_coeffs = right.as_multiset()
    reactants: List[StoichEntry] = []
    shared = {}
    for e in left:
        if right_coeffs.get(e.key) == e.coefficient:
            shared[e.key] = e
            reagent_entries.append(e)
        else:
            reactants.append(e)
    products = [e for e in right if e.key not in shared]
    return StoichReaction(
        reactants=StoichBag(reactants),
        reagents=StoichBag(reagent_entries),
        products=StoichBag(products),
        encoding=encoding,
    )


def parse_reaction(text: str, encoding: Encoding = Encoding.SMILES) -> StoichReaction:
    """Parse ``R>G>P`` or ``LEFT>>RIGHT`` into a classified StoichReaction.

    Whitespace anywhere in the line is tolerated and removed. Duplicate
    molecule strings merge into one entry whose coefficient is the
    multiplicity.
    """
    parts = re.sub(r"\s+", "", text).split(">")
    if len(parts) != 3:
        raise MalformedReaction(
            f"expected two '>' separators, found {len(parts) - 1} in {text!r}")
    left_text, middle_text, right_text = parts
    if not left_text or not right_text:
        raise MalformedReaction(f"reaction side missing in {text!r}")
    left = parse_stoich_line(left_text, encoding)
    middle = parse_stoich_line(middle_text, encoding) if middle_text else StoichBag()
    right = parse_stoich_line(right_text, encoding)
    return classify_reaction(left, middle, right, encoding)


# kept for symmetry with the reaction-SMILES ingestion path
def parse_reaction_smiles(text: str) -> StoichReaction:
    return parse_reaction(text, Encoding.SMILES)


def parse_reaction_lenient(text: str) -> StoichReaction:
    """Like parse_reaction, but each molecule may be SMILES or a raw formula.

    Mixed-dialect input is convenient on the command line when only the atom
    bags matter (balance checks, coefficient solving). Rendering keeps the
    SMILES encoding for whatever parsed as SMILES.
    """
    parts = re.sub(r"\s+", "", text).split(">")
    if len(parts) != 3:
        raise MalformedReaction(
            f"expected two '>' separators, found {len(parts) - 1} in {text!r}")
    left_text, middle_text, right_text = parts
    if not left_text or not right_text:
        raise MalformedReaction(f"reaction side missing in {text!r}")

    def side(chunk: str) -> StoichBag:
        if not chunk:
            return StoichBag()
        return StoichBag(_parse_item_lenient(item) for item in chunk.split("."))

    return classify_reaction(side(left_text), side(middle_text), side(right_text),
                             Encoding.SMILES)


def print_reaction(reaction: StoichReaction, with_coefficients: bool = True,
                   rng: Optional[SplitMix64] = None) -> str:
    """Render a reaction as ``LEFT>>RIGHT`` in its own encoding.

    With ``with_coefficients=False`` molecules are repeated coefficient-many
    times instead of carrying ``{k}`` prefixes (plain reaction SMILES style).
    """
    def side(bag: StoichBag) -> str:
        if with_coefficients:
            return print_stoich_line(bag, reaction.encoding, rng)
        toks = []
        for e in bag:
            toks.extend([render_molecule(e.mol, reaction.encoding)] * e.coefficient)
        return ".".join(toks)

    return f"{side(reaction.left_bag())}>>{side(reaction.right_bag())}"


def convert_encoding(reaction: StoichReaction, encoding: Encoding) -> StoichReaction:
    """Re-express a reaction in another encoding (SMILES -> FORMULA only)."""
    if encoding is reaction.encoding:
        return reaction
    if encoding is Encoding.SMILES:
        raise MalformedReaction("cannot reconstruct structures from formulas")

    def conv(bag: StoichBag) -> StoichBag:
        return StoichBag(StoichEntry(e.coefficient, to_formula_molecule(e.mol))
                         for e in bag)

    return StoichReaction(conv(reaction.reactants), conv(reaction.reagents),
                          conv(reaction.products), encoding)
