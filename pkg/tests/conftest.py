"""Shared corpus fixtures and random reaction synthesizers."""

from __future__ import annotations

import random
from typing import List, Optional

import pytest

from chemalgebra.formula import AtomBag, ChemicalFormula
from chemalgebra.reaction import Encoding, StoichBag, StoichEntry, StoichReaction

# balanced reactions built from molecules of the ChemAlgebra sample data
CORPUS_LINES = [
    "O=C=O.[HH].[HH].[HH].[HH]>[Ni]>C.O.O",
    "CN.O=C(O)c1ccc(Cl)c([N+](=O)[O-])c1.O>>CNc1ccc(C(=O)O)cc1[N+](=O)[O-].Cl.O",
    "NCc1ccc(Cl)c(Cl)c1.Clc1cc2c(Cl)nc(-c3ccncc3)nc2s1"
    ">>Cl.Clc1cc2c(NCc3ccc(Cl)c(Cl)c3)nc(-c3ccncc3)nc2s1",
    "CCCCC1CO1.Cc1cccc(C)c1.Cl.[Cl-]>>CCCCC(CO)c1ccc(C)cc1C.Cl.[Cl-]",
    "O=c1cc(O)c(Cl)c[nH]1.Cl.O=C(Cl)c1cccnc1.c1ccncc1"
    ">>O=C(Oc1cc(=O)[nH]cc1Cl)c1cccnc1.Cl.c1ccncc1.Cl",
    "Cc1c(Cl)nnc(C(C#N)c2ccc(F)c(C#N)c2)c1C.Cl.O.CC(=O)O.[H]"
    ">>O.Cl.Cc1c(Cl)nnc(Cc2ccc(F)c(C#N)c2)c1C.[C][N].CC(=O)O",
]

SABATIER = CORPUS_LINES[0]

ELEMENT_POOL = ["C", "H", "N", "O", "S", "Cl", "Br", "F", "Na", "B", "P", "I"]


def random_bag(rng: random.Random, max_elements: int = 3, max_count: int = 4) -> AtomBag:
    n = rng.randint(1, max_elements)
    symbols = rng.sample(ELEMENT_POOL, n)
    return AtomBag({s: rng.randint(1, max_count) for s in symbols})


def split_bag(rng: random.Random, total: AtomBag, pieces: int) -> Optional[List[AtomBag]]:
    """Partition a bag into `pieces` non-empty sub-bags, or None if impossible."""
    if total.total_atoms() < pieces:
        return None
    remaining = dict(total.as_dict())
    out: List[AtomBag] = []
    for i in range(pieces - 1):
        left_pieces = pieces - i - 1
        # keep enough atoms behind for the remaining pieces
        budget = sum(remaining.values()) - left_pieces
        if budget < 1:
            return None
        take = {}
        for sym, avail in list(remaining.items()):
            k = rng.randint(0, min(avail, budget))
            budget -= k
            if k:
                take[sym] = k
        if not take:
            sym = rng.choice([s for s, v in remaining.items() if v > 0])
            take[sym] = 1
        for sym, k in take.items():
            remaining[sym] -= k
            if remaining[sym] == 0:
                del remaining[sym]
        out.append(AtomBag(take))
    if not remaining:
        return None
    out.append(AtomBag(remaining))
    return out


def random_formula_reaction(rng: random.Random,
                            max_side: int = 6) -> StoichReaction:
    """Balanced FORMULA reaction: left entries are random, right re-partitions them."""
    while True:
        n_left = rng.randint(2, max_side)
        left = [StoichEntry(rng.randint(1, 3), ChemicalFormula.from_bag(random_bag(rng)))
                for _ in range(n_left)]
        total = StoichBag(left).total_bag()
        pieces = rng.randint(2, max_side)
        parts = split_bag(rng, total, pieces)
        if parts is None:
            continue
        right = [StoichEntry(1, ChemicalFormula.from_bag(b)) for b in parts]
        reagents = []
        for _ in range(rng.randint(0, 2)):
            reagents.append(StoichEntry(rng.randint(1, 3),
                                        ChemicalFormula.from_bag(random_bag(rng))))
        return StoichReaction(StoichBag(left), StoichBag(reagents),
                              StoichBag(right), Encoding.FORMULA)


@pytest.fixture(scope="session")
def corpus_reactions():
    from chemalgebra.benchgen import reaction_from_corpus_line
    return [reaction_from_corpus_line(line) for line in CORPUS_LINES]


@pytest.fixture()
def corpus_files(tmp_path):
    """Small train/valid/test corpus files on disk."""
    train = tmp_path / "train.txt"
    valid = tmp_path / "valid.txt"
    test = tmp_path / "test.txt"
    train.write_text("\n".join(CORPUS_LINES[:4]) + "\n", encoding="utf-8")
    valid.write_text(CORPUS_LINES[4] + "\n", encoding="utf-8")
    test.write_text(CORPUS_LINES[5] + "\n", encoding="utf-8")
    return {"train": str(train), "valid": str(valid), "test": str(test)}


class ScriptedStream:
    """Stand-in RNG yielding a fixed sequence of randint results."""

    def __init__(self, draws):
        self._draws = list(draws)
        self._pos = 0

    def randint(self, lo: int, hi: int) -> int:
        value = self._draws[self._pos]
        self._pos += 1
        assert lo <= value <= hi, f"scripted draw {value} outside [{lo}, {hi}]"
        return value

    def shuffle(self, items):
        return list(items)


class ConstantStream(ScriptedStream):
    def __init__(self, value: int):
        self.value = value

    def randint(self, lo: int, hi: int) -> int:
        assert lo <= self.value <= hi
        return self.value
