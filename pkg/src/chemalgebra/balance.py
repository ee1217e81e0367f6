"""Mass-balance accounting, byproduct inference and the exact integer solver.

Everything here runs on exact integer/rational arithmetic; there is no
floating point in this module, so balance verdicts and solver outputs are
bit-reproducible.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from math import gcd
from typing import Dict, List, Optional, Sequence, Tuple

from .errors import (
    AmbiguousCompletion,
    BothSidesDeficient,
    NoCompletion,
    NoPositiveSolution,
    SearchExhausted,
)
from .formula import AtomBag, ChemicalFormula, hill_key, parse_formula
from .reaction import (
    Encoding,
    StoichBag,
    StoichEntry,
    StoichReaction,
    molecule_bag,
)


class BalanceStatus(Enum):
    BALANCED = "balanced"
    DEFICITARY = "deficitary"
    EXCEEDING = "exceeding"
    DEFICITARY_AND_EXCEEDING = "deficitary_and_exceeding"


@dataclass(frozen=True)
class BalanceReport:
    """Element accounting of one reaction: left vs right totals.

    ``deficit`` holds elements the right side is missing, ``excess`` elements
    the right side has that the left does not cover. ``status`` is element
    based only; the charge delta is always reported and participates in
    ``is_balanced`` when the check was run with ``include_charge``.
    """

    left_total: AtomBag
    right_total: AtomBag
    deficit: Dict[str, int]
    excess: Dict[str, int]
    status: BalanceStatus
    charge_delta: int
    is_balanced: bool


def account(side: StoichBag) -> AtomBag:
    """Sum coefficient-weighted atom bags over one side."""
    return side.total_bag()


def check_balance(reaction: StoichReaction, include_charge: bool = False) -> BalanceReport:
    left = reaction.left_total()
    right = reaction.right_total()
    return compare_totals(left, right, include_charge)


def compare_totals(left: AtomBag, right: AtomBag,
                   include_charge: bool = False) -> BalanceReport:
    delta, charge_delta = left.diff(right)
    deficit = {sym: d for sym, d in delta.items() if d > 0}
    excess = {sym: -d for sym, d in delta.items() if d < 0}
    if deficit and excess:
        status = BalanceStatus.DEFICITARY_AND_EXCEEDING
    elif deficit:
        status = BalanceStatus.DEFICITARY
    elif excess:
        status = BalanceStatus.EXCEEDING
    else:
        status = BalanceStatus.BALANCED
    balanced = status is BalanceStatus.BALANCED and (not include_charge or charge_delta == 0)
    return BalanceReport(left, right, deficit, excess, status, charge_delta, balanced)


# --- byproduct inference ---

DEFAULT_LEXICON_TEXT = (
    "H2O HCl HBr HI HF NH3 CO2 N2 H2 O2 CH3OH CH3CH2OH CO H2S SO2 "
    "NaCl KCl LiCl NaBr CH2O CH3COOH"
)


def default_lexicon() -> List[ChemicalFormula]:
    return list(_default_lexicon_cached())


def _default_lexicon_cached() -> Tuple[ChemicalFormula, ...]:
    global _LEXICON_CACHE
    if _LEXICON_CACHE is None:
        _LEXICON_CACHE = tuple(parse_formula(tok) for tok in DEFAULT_LEXICON_TEXT.split())
    return _LEXICON_CACHE


_LEXICON_CACHE: Optional[Tuple[ChemicalFormula, ...]] = None


def load_lexicon(path: str) -> List[ChemicalFormula]:
    """Read a lexicon file: one formula per line, '#' comments allowed."""
    out = []
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            line = line.split("#", 1)[0].strip()
            if line:
                out.append(parse_formula(line))
    return out


def _completions(deficit: Dict[str, int], lexicon: Sequence[ChemicalFormula],
                 max_molecules: int, limit: int = 2) -> List[Tuple[Tuple[int, ...], ...]]:
    """Distinct lexicon multisets whose element sums equal the deficit exactly.

    Returns at most ``limit`` solutions, each as a tuple of (lexicon index,
    count) pairs. The search is a depth-first walk over non-decreasing
    lexicon indices, so each multiset is produced exactly once.
    """
    usable = []
    for i, f in enumerate(lexicon):
        items = f.bag.items()
        if all(sym in deficit for sym, _ in items):
            usable.append((i, dict(items)))
    solutions: List[Tuple[Tuple[int, ...], ...]] = []

    def walk(start: int, remaining: Dict[str, int], budget: int,
             chosen: List[Tuple[int, int]]) -> None:
        if len(solutions) >= limit:
            return
        if not remaining:
            solutions.append(tuple(chosen))
            return
        if budget == 0:
            return
        for pos in range(start, len(usable)):
            idx, counts = usable[pos]
            if any(remaining.get(sym, 0) < n for sym, n in counts.items()):
                continue
            nxt = dict(remaining)
            for sym, n in counts.items():
                nxt[sym] -= n
                if nxt[sym] == 0:
                    del nxt[sym]
            if chosen and chosen[-1][0] == idx:
                chosen[-1] = (idx, chosen[-1][1] + 1)
                walk(pos, nxt, budget - 1, chosen)
                chosen[-1] = (idx, chosen[-1][1] - 1)
            else:
                chosen.append((idx, 1))
                walk(pos, nxt, budget - 1, chosen)
                chosen.pop()
            if len(solutions) >= limit:
                return

    walk(0, dict(deficit), max_molecules, [])
    return solutions


def infer_byproducts(reaction: StoichReaction,
                     lexicon: Optional[Sequence[ChemicalFormula]] = None,
                     max_molecules: int = 6) -> StoichReaction:
    """Append the unique lexicon completion to the deficient side.

    The one-sided atom deficit must be matched exactly by exactly one
    multiset of lexicon molecules (up to reordering); anything else raises
    NoCompletion, AmbiguousCompletion or BothSidesDeficient. Charge is not
    part of the deficit. Already-balanced reactions pass through unchanged.
    """
    if lexicon is None:
        lexicon = default_lexicon()
    report = check_balance(reaction)
    if report.status is BalanceStatus.BALANCED:
        return reaction
    if report.status is BalanceStatus.DEFICITARY_AND_EXCEEDING:
        raise BothSidesDeficient(
            f"missing on right: {report.deficit}, missing on left: {report.excess}")
    if report.status is BalanceStatus.DEFICITARY:
        deficit, target = report.deficit, "products"
    else:
        deficit, target = report.excess, "reactants"

    found = _completions(deficit, lexicon, max_molecules)
    if not found:
        raise NoCompletion(f"no lexicon multiset sums to {deficit}")
    if len(found) > 1:
        raise AmbiguousCompletion(f"multiple lexicon multisets sum to {deficit}")
    extra = []
    for idx, count in found[0]:
        mol = lexicon[idx]
        if reaction.encoding is Encoding.SMILES:
            from .smiles import molecule_from_smiles
            mol = molecule_from_smiles(_formula_to_smiles(lexicon[idx]))
        extra.append(StoichEntry(count, mol))
    if target == "products":
        fixed = StoichReaction(reaction.reactants, reaction.reagents,
                               reaction.products.extended(extra), reaction.encoding)
    else:
        fixed = StoichReaction(reaction.reactants.extended(extra), reaction.reagents,
                               reaction.products, reaction.encoding)
    assert check_balance(fixed).status is BalanceStatus.BALANCED
    return fixed


_LEXICON_SMILES = {
    "H2O": "O", "HCl": "Cl", "HBr": "Br", "HI": "I", "HF": "F",
    "H3N": "N", "CO2": "O=C=O", "N2": "N#N", "H2": "[HH]", "O2": "O=O",
    "CH4O": "CO", "C2H6O": "CCO", "CO": "[C-]#[O+]", "H2S": "S",
    "O2S": "O=S=O", "CH2O": "C=O", "C2H4O2": "CC(=O)O",
    "ClNa": "Cl[Na]", "ClK": "Cl[K]", "ClLi": "Cl[Li]", "BrNa": "Br[Na]",
}


def _formula_to_smiles(formula: ChemicalFormula) -> str:
    smi = _LEXICON_SMILES.get(formula.text)
    if smi is None:
        raise NoCompletion(
            f"no structural template for byproduct {formula.text}; "
            "use a FORMULA-encoded reaction or extend the template table")
    return smi


# --- exact stoichiometric solver ---

@dataclass(frozen=True)
class StoichSystem:
    """Element-by-molecule matrices plus reagent tie constraints.

    ``lhs_matrix[i][j]`` counts element ``element_index[i]`` in the j-th left
    molecule; ties are (left column, right column) pairs forced equal.
    """

    element_index: Tuple[str, ...]
    lhs_matrix: Tuple[Tuple[int, ...], ...]
    rhs_matrix: Tuple[Tuple[int, ...], ...]
    tie_constraints: Tuple[Tuple[int, int], ...]


@dataclass(frozen=True)
class StoichSolution:
    r: Tuple[int, ...]
    p: Tuple[int, ...]

    @property
    def norm(self) -> int:
        return sum(x * x for x in self.r) + sum(x * x for x in self.p)


def build_system(reaction: StoichReaction) -> StoichSystem:
    """Column-per-molecule matrices over the union of elements, plus ties.

    Existing coefficients are deliberately ignored; solving recovers them.
    """
    left = reaction.left_entries()
    right = reaction.right_entries()
    elements = set()
    for e in left + right:
        for sym, _ in molecule_bag(e.mol).items():
            elements.add(sym)
    index = tuple(sorted(elements, key=hill_key))
    row_of = {sym: i for i, sym in enumerate(index)}

    def matrix(entries: List[StoichEntry]) -> Tuple[Tuple[int, ...], ...]:
        cols = len(entries)
        rows = [[0] * cols for _ in index]
        for j, e in enumerate(entries):
            for sym, n in molecule_bag(e.mol).items():
                rows[row_of[sym]][j] = n
        return tuple(tuple(r) for r in rows)

    n_react = len(reaction.reactants.entries)
    n_prod = len(reaction.products.entries)
    ties = tuple((n_react + t, n_prod + t) for t in range(len(reaction.reagents.entries)))
    return StoichSystem(index, matrix(left), matrix(right), ties)


def _rref(rows: List[List[Fraction]], ncols: int) -> Tuple[List[List[Fraction]], List[int]]:
    """Fraction-exact reduced row echelon form; returns (matrix, pivot columns)."""
    m = [row[:] for row in rows]
    pivot_cols: List[int] = []
    r = 0
    for c in range(ncols):
        pivot = next((i for i in range(r, len(m)) if m[i][c] != 0), None)
        if pivot is None:
            continue
        m[r], m[pivot] = m[pivot], m[r]
        inv = Fraction(1, 1) / m[r][c]
        m[r] = [x * inv for x in m[r]]
        for i in range(len(m)):
            if i != r and m[i][c] != 0:
                f = m[i][c]
                m[i] = [a - f * b for a, b in zip(m[i], m[r])]
        pivot_cols.append(c)
        r += 1
        if r == len(m):
            break
    return m, pivot_cols


def _nullspace_basis(m: List[List[Fraction]], pivot_cols: List[int],
                     ncols: int) -> List[List[Fraction]]:
    free_cols = [c for c in range(ncols) if c not in pivot_cols]
    basis = []
    for f in free_cols:
        vec = [Fraction(0)] * ncols
        vec[f] = Fraction(1)
        for row_i, c in enumerate(pivot_cols):
            vec[c] = -m[row_i][f]
        basis.append(vec)
    return basis


def _constraint_rows(system: StoichSystem) -> Tuple[List[List[Fraction]], int, int]:
    nl = len(system.lhs_matrix[0]) if system.lhs_matrix else 0
    nr = len(system.rhs_matrix[0]) if system.rhs_matrix else 0
    rows: List[List[Fraction]] = []
    for a_row, b_row in zip(system.lhs_matrix, system.rhs_matrix):
        rows.append([Fraction(x) for x in a_row] + [Fraction(-x) for x in b_row])
    for li, ri in system.tie_constraints:
        row = [Fraction(0)] * (nl + nr)
        row[li] = Fraction(1)
        row[nl + ri] = Fraction(-1)
        rows.append(row)
    return rows, nl, nr


def _verify(system: StoichSystem, r: Sequence[int], p: Sequence[int]) -> bool:
    for a_row, b_row in zip(system.lhs_matrix, system.rhs_matrix):
        if sum(a * x for a, x in zip(a_row, r)) != sum(b * x for b, x in zip(b_row, p)):
            return False
    return all(r[li] == p[ri] for li, ri in system.tie_constraints)


_SEARCH_BUDGET = 5_000_000


def solve_stoichiometry(system: StoichSystem, max_coeff: int = 50) -> StoichSolution:
    """Smallest positive integer coefficients satisfying the balance system.

    A one-dimensional nullspace is scaled to the smallest all-positive
    integer vector (gcd 1). Otherwise all-positive integer solutions with
    entries up to ``max_coeff`` are enumerated over the free columns and the
    minimum squared-norm solution wins, ties broken by lexicographic order.
    The winner is re-verified by exact multiplication before returning.
    """
    rows, nl, nr = _constraint_rows(system)
    n = nl + nr
    if n == 0:
        raise NoPositiveSolution("system has no molecules")
    m, pivot_cols = _rref(rows, n)
    basis = _nullspace_basis(m, pivot_cols, n)
    if not basis:
        raise NoPositiveSolution("only the zero solution satisfies the system")

    if len(basis) == 1:
        vec = basis[0]
        if any(x == 0 for x in vec):
            raise NoPositiveSolution("nullspace vector has a zero coefficient")
        denom_lcm = 1
        for x in vec:
            denom_lcm = denom_lcm * x.denominator // gcd(denom_lcm, x.denominator)
        ints = [int(x * denom_lcm) for x in vec]
        if ints[0] < 0:
            ints = [-x for x in ints]
        if any(x <= 0 for x in ints):
            raise NoPositiveSolution("no strictly positive scaling of the solution ray")
        g = 0
        for x in ints:
            g = gcd(g, x)
        ints = [x // g for x in ints]
        solution = StoichSolution(tuple(ints[:nl]), tuple(ints[nl:]))
        assert _verify(system, solution.r, solution.p)
        return solution

    # multi-dimensional nullspace: branch-and-bound over the free columns
    free_cols = [c for c in range(n) if c not in pivot_cols]
    d = len(free_cols)
    if max_coeff ** d > _SEARCH_BUDGET:
        raise SearchExhausted(
            f"free-variable search space {max_coeff}^{d} exceeds budget")

    # pivot value = (sum of int coefficients * free values) / denominator
    pivot_forms: List[Tuple[int, List[int], int]] = []
    for row_i, c in enumerate(pivot_cols):
        denom = 1
        for f in free_cols:
            q = m[row_i][f].denominator
            denom = denom * q // gcd(denom, q)
        coeffs = [int(-m[row_i][f] * denom) for f in free_cols]
        pivot_forms.append((c, coeffs, denom))

    best: Optional[Tuple[int, Tuple[int, ...]]] = None
    values = [0] * d

    def leaf() -> None:
        nonlocal best
        full = [0] * n
        norm = 0
        for f, v in zip(free_cols, values):
            full[f] = v
            norm += v * v
        for c, coeffs, denom in pivot_forms:
            acc = sum(a * v for a, v in zip(coeffs, values))
            v, rem = divmod(acc, denom)
            if rem or v < 1 or v > max_coeff:
                return
            full[c] = v
            norm += v * v
        key = (norm, tuple(full))
        if best is None or key < best:
            best = key

    def assign(pos: int, partial_sq: int) -> None:
        if pos == d:
            leaf()
            return
        # every unassigned column still contributes at least 1 to the norm
        floor_rest = (d - pos - 1) + len(pivot_forms)
        for v in range(1, max_coeff + 1):
            sq = partial_sq + v * v
            if best is not None and sq + floor_rest > best[0]:
                break
            values[pos] = v
            assign(pos + 1, sq)

    assign(0, 0)
    if best is None:
        raise SearchExhausted(
            f"no all-positive solution with coefficients <= {max_coeff}")
    vec = best[1]
    solution = StoichSolution(tuple(vec[:nl]), tuple(vec[nl:]))
    assert _verify(system, solution.r, solution.p)
    return solution


def solve_reaction(reaction: StoichReaction, max_coeff: int = 50) -> StoichSolution:
    """Convenience wrapper: build the system from a reaction and solve it."""
    return solve_stoichiometry(build_system(reaction), max_coeff)
