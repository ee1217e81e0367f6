"""Toolkit for stoichiometrically balanced reaction benchmarks.

Parses molecules (SMILES and raw formulas), verifies and restores mass
balance, solves stoichiometric systems exactly, generates the eight
ChemAlgebra dataset variants deterministically, and scores predictions with
the full multiset metric suite.
"""

from .balance import (
    BalanceReport,
    BalanceStatus,
    StoichSolution,
    StoichSystem,
    account,
    build_system,
    check_balance,
    default_lexicon,
    infer_byproducts,
    solve_reaction,
    solve_stoichiometry,
)
from .benchgen import (
    DistributionConfig,
    VariantConfig,
    VARIANT_NAMES,
    ingest_split,
    make_cross_split,
    make_dataset,
    parse_variant_name,
    type1_instance,
    type2_instance,
)
from .formula import (
    AtomBag,
    ChemicalFormula,
    Element,
    bag_add,
    bag_diff,
    bag_scale,
    element,
    format_formula,
    parse_formula,
)
from .reaction import (
    Encoding,
    StoichBag,
    StoichEntry,
    StoichReaction,
    parse_reaction,
    parse_reaction_smiles,
    parse_stoich_line,
    print_reaction,
    print_stoich_line,
)
from .scoring import (
    MatchCounts,
    Report,
    SampleScore,
    identity_baseline,
    match_bags,
    match_molecules_only,
    score_dataset,
    score_lines,
)
from .smiles import (
    MolGraph,
    assign_hydrogens,
    canonicalize,
    formula_of,
    kekulize,
    molecule_from_smiles,
    parse_smiles,
    write_smiles,
)

__version__ = "0.1.0"
