"""SMILES parsing, kekulization, hydrogen assignment and canonical certificates.

The pipeline for one molecule is::

    parse_smiles -> kekulize -> assign_hydrogens -> canonicalize

``molecule_from_smiles`` runs all four stages and returns a finalized
:class:`MolGraph` whose ``formula``, ``certificate`` and ``canonical_smiles``
are populated. Two graphs describe the same molecule exactly when their
certificates are byte-equal.

Stereo tags (``@``, ``@@``, ``/``, ``\\``) are parsed, stored and embedded in
certificates verbatim but never interpreted geometrically, so molecules that
differ only in stereo annotations compare unequal. Atom-class labels
(``:n``) are parsed and discarded from certificates.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Dict, List, Optional, Tuple

from .errors import (
    DanglingBondSymbol,
    KekulizationFailure,
    UnbalancedParenthesis,
    UnknownAtomToken,
    UnmatchedRingClosure,
    ValenceExceeded,
)
from .formula import AtomBag, ChemicalFormula, PERIODIC_TABLE

ORGANIC_SUBSET = {"B", "C", "N", "O", "P", "S", "F", "Cl", "Br", "I"}
AROMATIC_ELEMENTS = {"B", "C", "N", "O", "P", "S", "Se", "As"}

# allowed total valences for unbracketed organic-subset atoms, smallest first
VALENCES = {
    "B": (3,),
    "C": (4,),
    "N": (3, 5),
    "O": (2,),
    "P": (3, 5),
    "S": (2, 4, 6),
    "F": (1,),
    "Cl": (1,),
    "Br": (1,),
    "I": (1,),
}

_BOND_ORDERS = {"-": 1, "=": 2, "#": 3}
_ORDER_SYMBOLS = {1: "-", 2: "=", 3: "#"}


@dataclass
class Atom:
    element: str
    aromatic: bool = False
    charge: int = 0
    explicit_h: Optional[int] = None  # set only for bracket atoms
    isotope: Optional[int] = None
    stereo: Optional[str] = None  # "@" or "@@"
    atom_class: Optional[int] = None
    h: int = 0  # final hydrogen count, set by assign_hydrogens

    @property
    def bracket(self) -> bool:
        return self.explicit_h is not None

    def signature(self) -> tuple:
        """Attributes that participate in the canonical certificate."""
        return (
            self.element,
            self.aromatic,
            self.charge,
            self.h,
            self.isotope or 0,
            self.stereo or "",
        )


@dataclass
class Bond:
    a: int
    b: int
    order: Optional[int]  # None while aromatic and not yet kekulized
    aromatic: bool = False
    direction: Optional[str] = None  # "/" or "\\", oriented low index -> high

    def other(self, idx: int) -> int:
        return self.b if idx == self.a else self.a

    def kind(self) -> tuple:
        """Bond identity for certificates: aromatic flag wins over kekulized order."""
        if self.aromatic:
            return ("a", self.direction or "")
        return (str(self.order), self.direction or "")

    def refine_kind(self) -> tuple:
        """Orientation-free bond identity, safe for canonical refinement."""
        return ("a" if self.aromatic else str(self.order), self.direction is not None)


class MolGraph:
    """A parsed molecular graph. Treat as immutable once finalized."""

    def __init__(self) -> None:
        self.atoms: List[Atom] = []
        self.bonds: List[Bond] = []
        self._adj: Dict[int, List[Bond]] = {}
        self.formula: Optional[ChemicalFormula] = None
        self.certificate: Optional[bytes] = None
        self.canonical_smiles: Optional[str] = None
        self._canonical_rank: Optional[List[int]] = None

    def add_atom(self, atom: Atom) -> int:
        idx = len(self.atoms)
        self.atoms.append(atom)
        self._adj[idx] = []
        return idx

    def add_bond(self, a: int, b: int, order: Optional[int], aromatic: bool,
                 direction: Optional[str] = None) -> Bond:
        if a == b:
            raise UnmatchedRingClosure("ring bond closing on its own atom")
        lo, hi = (a, b) if a < b else (b, a)
        if direction is not None and a > b:
            direction = "/" if direction == "\\" else "\\"
        for bond in self._adj[lo]:
            if bond.other(lo) == hi:
                raise UnmatchedRingClosure(
                    f"duplicate bond between atoms {lo} and {hi}")
        bond = Bond(lo, hi, order, aromatic, direction)
        self.bonds.append(bond)
        self._adj[lo].append(bond)
        self._adj[hi].append(bond)
        return bond

    def neighbors(self, idx: int) -> List[Tuple[int, Bond]]:
        return [(bond.other(idx), bond) for bond in self._adj[idx]]

    def __len__(self) -> int:
        return len(self.atoms)


_BRACKET = re.compile(
    r"""\[
        (?P<isotope>\d+)?
        (?P<symbol>[A-Z][a-z]?|as|se|[bcnops])
        (?P<stereo>@@|@)?
        (?P<hcount>H\d*)?
        (?P<charge>\+\d+|-\d+|\++|-+)?
        (?::(?P<cls>\d+))?
    \]""",
    re.VERBOSE,
)


def _parse_bracket(token: str, text: str) -> Atom:
    m = _BRACKET.fullmatch(token)
    if not m:
        raise UnknownAtomToken(f"cannot read bracket atom {token!r} in {text!r}")
    raw = m.group("symbol")
    aromatic = raw[0].islower()
    symbol = raw.capitalize()
    if symbol not in PERIODIC_TABLE:
        raise UnknownAtomToken(f"unknown element {raw!r} in {token!r}")
    if aromatic and symbol not in AROMATIC_ELEMENTS:
        raise UnknownAtomToken(f"element {symbol} cannot be aromatic")
    hcount = m.group("hcount")
    if hcount is None:
        explicit_h = 0
    elif hcount == "H":
        explicit_h = 1
    else:
        explicit_h = int(hcount[1:])
    charge_str = m.group("charge")
    if charge_str is None:
        charge = 0
    elif charge_str[0] == "+" and charge_str[1:].isdigit():
        charge = int(charge_str[1:])
    elif charge_str[0] == "-" and charge_str[1:].isdigit():
        charge = -int(charge_str[1:])
    else:
        charge = len(charge_str) if charge_str[0] == "+" else -len(charge_str)
    cls = m.group("cls")
    return Atom(
        element=symbol,
        aromatic=aromatic,
        charge=charge,
        explicit_h=explicit_h,
        isotope=int(m.group("isotope")) if m.group("isotope") else None,
        stereo=m.group("stereo"),
        atom_class=int(cls) if cls is not None else None,
    )


def parse_smiles(text: str) -> MolGraph:
    """Parse one molecule SMILES (no ``.``, no ``>``) into a raw MolGraph.

    Ring closures (including ``%nn``), branches and bond symbols are resolved;
    implicit hydrogens are not yet assigned.
    """
    if not text:
        raise UnknownAtomToken("empty SMILES string")
    g = MolGraph()
    prev: Optional[int] = None
    pending_bond: Optional[str] = None
    stack: List[int] = []
    open_rings: Dict[int, Tuple[int, Optional[str]]] = {}

    def connect(a: int, b: int, symbol: Optional[str]) -> None:
        ar_a = g.atoms[a].aromatic
        ar_b = g.atoms[b].aromatic
        if symbol is None:
            if ar_a and ar_b:
                g.add_bond(a, b, None, aromatic=True)
            else:
                g.add_bond(a, b, 1, aromatic=False)
        elif symbol == ":":
            if not (ar_a and ar_b):
                raise DanglingBondSymbol(
                    f"aromatic bond between non-aromatic atoms in {text!r}")
            g.add_bond(a, b, None, aromatic=True)
        elif symbol in ("/", "\\"):
            g.add_bond(a, b, 1, aromatic=False, direction=symbol)
        else:
            g.add_bond(a, b, _BOND_ORDERS[symbol], aromatic=False)

    def close_ring(number: int, atom: int, symbol: Optional[str]) -> None:
        if number in open_rings:
            other, open_symbol = open_rings.pop(number)
            if symbol is not None and open_symbol is not None:
                # each end describes the same bond from its own side
                same = symbol == open_symbol
                if symbol in ("/", "\\") or open_symbol in ("/", "\\"):
                    same = {"/": "\\", "\\": "/"}.get(symbol) == open_symbol
                if not same:
                    raise DanglingBondSymbol(
                        f"conflicting ring-bond symbols for closure {number}")
            use = open_symbol
            if use is None and symbol is not None:
                # a closing-side symbol reads closing atom -> opening atom
                use = {"/": "\\", "\\": "/"}.get(symbol, symbol)
            connect(other, atom, use)
        else:
            open_rings[number] = (atom, symbol)

    i = 0
    n = len(text)
    while i < n:
        ch = text[i]
        if ch in ".>":
            raise UnknownAtomToken(
                f"{ch!r} is a reaction-level separator, not molecule content")
        if ch == "[":
            end = text.find("]", i)
            if end < 0:
                raise UnknownAtomToken(f"unterminated bracket atom in {text!r}")
            atom = _parse_bracket(text[i:end + 1], text)
            idx = g.add_atom(atom)
            if prev is not None:
                connect(prev, idx, pending_bond)
            pending_bond = None
            prev = idx
            i = end + 1
        elif ch.isalpha() or ch == "*":
            if ch == "*":
                raise UnknownAtomToken("wildcard atoms are not supported")
            two = text[i:i + 2]
            if two in ("Cl", "Br"):
                symbol, aromatic, i = two, False, i + 2
            elif ch in "BCNOPSFI":
                symbol, aromatic, i = ch, False, i + 1
            elif ch in "bcnops":
                symbol, aromatic, i = ch.upper(), True, i + 1
            else:
                raise UnknownAtomToken(f"unknown atom token {ch!r} in {text!r}")
            idx = g.add_atom(Atom(element=symbol, aromatic=aromatic))
            if prev is not None:
                connect(prev, idx, pending_bond)
            pending_bond = None
            prev = idx
        elif ch.isdigit() or ch == "%":
            if prev is None:
                raise UnmatchedRingClosure("ring closure before any atom")
            if ch == "%":
                if i + 3 > n or not text[i + 1:i + 3].isdigit():
                    raise UnmatchedRingClosure(f"bad %nn ring closure in {text!r}")
                number = int(text[i + 1:i + 3])
                i += 3
            else:
                number = int(ch)
                i += 1
            close_ring(number, prev, pending_bond)
            pending_bond = None
        elif ch in "-=#:/\\":
            if pending_bond is not None or prev is None:
                raise DanglingBondSymbol(f"misplaced bond symbol {ch!r} in {text!r}")
            pending_bond = ch
            i += 1
        elif ch == "(":
            if prev is None:
                raise UnbalancedParenthesis("branch opened before any atom")
            if pending_bond is not None:
                raise DanglingBondSymbol("bond symbol before branch opening")
            stack.append(prev)
            i += 1
        elif ch == ")":
            if not stack:
                raise UnbalancedParenthesis(f"unexpected ')' in {text!r}")
            if pending_bond is not None:
                raise DanglingBondSymbol("bond symbol before branch closing")
            prev = stack.pop()
            i += 1
        else:
            raise UnknownAtomToken(f"unexpected character {ch!r} in {text!r}")

    if pending_bond is not None:
        raise DanglingBondSymbol(f"trailing bond symbol in {text!r}")
    if stack:
        raise UnbalancedParenthesis(f"unclosed branch in {text!r}")
    if open_rings:
        raise UnmatchedRingClosure(
            f"unclosed ring numbers {sorted(open_rings)} in {text!r}")
    if not g.atoms:
        raise UnknownAtomToken(f"no atoms in {text!r}")
    return g


def _pi_target(symbol: str, charge: int) -> int:
    if symbol == "C":
        return 4 - abs(charge)
    if symbol == "B":
        return 3 - charge
    if symbol in ("N", "P", "As"):
        return 3 + charge
    if symbol in ("O", "S", "Se"):
        return 2 + charge
    raise KekulizationFailure(f"element {symbol} cannot be aromatic")


def _connection_count(g: MolGraph, idx: int) -> Tuple[int, bool]:
    """Bond-order sum (aromatic bonds count 1) and an explicit-multiple flag."""
    conn = 0
    multiple = False
    for _, bond in g.neighbors(idx):
        if not bond.aromatic and bond.order is not None and bond.order >= 2:
            multiple = True
        conn += 1 if bond.aromatic or bond.order is None else bond.order
    return conn, multiple


def _unbracketed_needs_double(g: MolGraph, idx: int) -> bool:
    """Double-bond requirement for an aromatic atom written without brackets."""
    atom = g.atoms[idx]
    conn, multiple = _connection_count(g, idx)
    if multiple:
        return False  # pi electrons already used by an explicit multiple bond
    if atom.element == "C":
        return True
    if atom.element in ("N", "P", "B"):
        return conn == 2
    return False  # O, S contribute a lone pair


def _needs_double_bond(g: MolGraph, idx: int) -> bool:
    """Decide whether an aromatic atom must receive one double bond."""
    atom = g.atoms[idx]
    if not atom.bracket:
        return _unbracketed_needs_double(g, idx)
    conn, multiple = _connection_count(g, idx)
    if multiple:
        return False
    conn += atom.explicit_h or 0
    target = _pi_target(atom.element, atom.charge)
    if conn == target:
        return False
    if conn == target - 1:
        return True
    raise KekulizationFailure(
        f"aromatic atom {atom.element}{idx} with {conn} connections "
        f"cannot fit valence {target}")


def _perfect_matching(nodes: List[int], edges: Dict[int, List[int]]) -> Optional[Dict[int, int]]:
    """Backtracking perfect matching; returns mate map or None."""
    mate: Dict[int, int] = {}

    def extend() -> bool:
        free = [v for v in nodes if v not in mate]
        if not free:
            return True
        u = free[0]
        for v in edges.get(u, ()):
            if v in mate or v == u:
                continue
            mate[u] = v
            mate[v] = u
            if extend():
                return True
            del mate[u]
            del mate[v]
        return False

    return mate if extend() else None


def kekulize(g: MolGraph) -> MolGraph:
    """Rewrite aromatic bonds as alternating single/double bonds in place.

    Every aromatic atom that needs a double bond gets exactly one (a perfect
    matching on the eligible aromatic subgraph); aromatic flags stay set for
    canonicalization.
    """
    needing = [i for i, a in enumerate(g.atoms)
               if a.aromatic and _needs_double_bond(g, i)]
    need_set = set(needing)
    edges: Dict[int, List[int]] = {i: [] for i in needing}
    for bond in g.bonds:
        if bond.aromatic and bond.a in need_set and bond.b in need_set:
            edges[bond.a].append(bond.b)
            edges[bond.b].append(bond.a)
    mate = _perfect_matching(needing, edges)
    if mate is None:
        raise KekulizationFailure(
            "no alternating single/double assignment exists for an aromatic system")
    for bond in g.bonds:
        if bond.aromatic:
            paired = mate.get(bond.a) == bond.b
            bond.order = 2 if paired else 1
    return g


def assign_hydrogens(g: MolGraph) -> MolGraph:
    """Fill implicit hydrogen counts and derive the molecular formula.

    Bracket atoms take their explicit H count verbatim. Unbracketed atoms get
    the smallest allowed valence that covers their explicit bond order sum
    (S promotes to 4/6, N and P to 5).
    """
    counts: Dict[str, int] = {}
    charge = 0
    for idx, atom in enumerate(g.atoms):
        if atom.bracket:
            atom.h = atom.explicit_h or 0
        else:
            bond_sum = 0
            for _, bond in g.neighbors(idx):
                if bond.order is None:
                    raise KekulizationFailure(
                        "aromatic bonds must be kekulized before hydrogen assignment")
                bond_sum += bond.order
            for valence in VALENCES[atom.element]:
                if bond_sum <= valence:
                    atom.h = valence - bond_sum
                    break
            else:
                raise ValenceExceeded(
                    f"atom {atom.element}{idx} has bond order sum {bond_sum}, "
                    f"above every allowed valence {VALENCES[atom.element]}")
        counts[atom.element] = counts.get(atom.element, 0) + 1
        if atom.h:
            counts["H"] = counts.get("H", 0) + atom.h
        charge += atom.charge
    g.formula = ChemicalFormula.from_bag(AtomBag(counts, charge))
    return g


# --- canonicalization ---

def _ring_membership(g: MolGraph) -> List[bool]:
    """True for atoms on at least one cycle (bridge edges never count)."""
    n = len(g.atoms)
    disc = [-1] * n
    low = [0] * n
    in_ring_edge = [False] * len(g.bonds)
    bond_index = {id(b): i for i, b in enumerate(g.bonds)}
    timer = 0
    for start in range(n):
        if disc[start] != -1:
            continue
        stack = [(start, -1, iter(g.neighbors(start)))]
        disc[start] = low[start] = timer
        timer += 1
        while stack:
            u, parent_bond, it = stack[-1]
            advanced = False
            for v, bond in it:
                bi = bond_index[id(bond)]
                if bi == parent_bond:
                    continue
                if disc[v] == -1:
                    disc[v] = low[v] = timer
                    timer += 1
                    stack.append((v, bi, iter(g.neighbors(v))))
                    advanced = True
                    break
                low[u] = min(low[u], disc[v])
                in_ring_edge[bi] = True  # back edge is always on a cycle
            if advanced:
                continue
            stack.pop()
            if stack:
                pu = stack[-1][0]
                low[pu] = min(low[pu], low[u])
                if low[u] > disc[pu]:
                    pass  # bridge: parent_bond stays out of every ring
                else:
                    in_ring_edge[parent_bond] = True
    member = [False] * n
    for bond, flag in zip(g.bonds, in_ring_edge):
        if flag:
            member[bond.a] = True
            member[bond.b] = True
    return member


def _refine(g: MolGraph, colors: List[int]) -> List[int]:
    n = len(g.atoms)
    while True:
        sigs = []
        for i in range(n):
            neigh = sorted((bond.refine_kind(), colors[j]) for j, bond in g.neighbors(i))
            sigs.append((colors[i], tuple(neigh)))
        ranking = {sig: rank for rank, sig in enumerate(sorted(set(sigs)))}
        new_colors = [ranking[sig] for sig in sigs]
        if len(set(new_colors)) == len(set(colors)):
            return new_colors
        colors = new_colors


def _certificate_for_order(g: MolGraph, order: List[int]) -> bytes:
    pos = {atom: rank for rank, atom in enumerate(order)}
    atoms = tuple(g.atoms[a].signature() for a in order)
    edges = []
    for bond in g.bonds:
        x, y = pos[bond.a], pos[bond.b]
        base, direction = bond.kind()
        if x > y:
            x, y = y, x
            direction = {"/": "\\", "\\": "/"}.get(direction, direction)
        edges.append((x, y, base, direction))
    return repr((atoms, tuple(sorted(edges)))).encode("ascii")


def canonicalize(g: MolGraph) -> MolGraph:
    """Compute the canonical certificate and canonical SMILES string.

    Uses iterative neighborhood refinement seeded with local invariants
    (element, charge, H count, ring membership, degree) and breaks remaining
    ties by exploring the lexicographically smallest certificate.
    """
    n = len(g.atoms)
    ring = _ring_membership(g)
    init = [(g.atoms[i].signature(), ring[i], len(g._adj[i])) for i in range(n)]
    ranking = {sig: rank for rank, sig in enumerate(sorted(set(init)))}
    colors = _refine(g, [ranking[sig] for sig in init])

    best: Optional[Tuple[bytes, List[int]]] = None

    def explore(colors: List[int]) -> None:
        nonlocal best
        cells: Dict[int, List[int]] = {}
        for i, c in enumerate(colors):
            cells.setdefault(c, []).append(i)
        split = None
        for c in sorted(cells):
            if len(cells[c]) > 1:
                split = cells[c]
                break
        if split is None:
            order = sorted(range(n), key=lambda i: colors[i])
            cert = _certificate_for_order(g, order)
            if best is None or cert < best[0]:
                best = (cert, order)
            return
        for chosen in split:
            tweaked = [(c, 1 if i != chosen else 0) for i, c in enumerate(colors)]
            ranking = {sig: rank for rank, sig in enumerate(sorted(set(tweaked)))}
            explore(_refine(g, [ranking[sig] for sig in tweaked]))

    explore(colors)
    assert best is not None
    cert, order = best
    g.certificate = cert
    rank = [0] * n
    for r, atom in enumerate(order):
        rank[atom] = r
    g._canonical_rank = rank
    g.canonical_smiles = write_smiles(g)
    return g


# --- SMILES output ---

def _implicit_h_matches(g: MolGraph, idx: int) -> bool:
    atom = g.atoms[idx]
    bond_sum = 0
    for _, bond in g.neighbors(idx):
        bond_sum += bond.order if bond.order is not None else 1
    for valence in VALENCES[atom.element]:
        if bond_sum <= valence:
            return valence - bond_sum == atom.h
    return False


def _aromatic_roundtrip_ok(g: MolGraph, idx: int) -> bool:
    """True when an unbracketed emission re-kekulizes to the same H count."""
    has_double = any(b.aromatic and b.order == 2 for _, b in g.neighbors(idx))
    return _unbracketed_needs_double(g, idx) == has_double


def _atom_token(g: MolGraph, idx: int) -> str:
    atom = g.atoms[idx]
    symbol = atom.element.lower() if atom.aromatic else atom.element
    plain_ok = (
        atom.element in ORGANIC_SUBSET
        and atom.charge == 0
        and atom.isotope is None
        and atom.stereo is None
        and (not atom.aromatic or _aromatic_roundtrip_ok(g, idx))
        and _implicit_h_matches(g, idx)
    )
    if plain_ok:
        return symbol
    parts = ["["]
    if atom.isotope is not None:
        parts.append(str(atom.isotope))
    parts.append(symbol)
    if atom.stereo:
        parts.append(atom.stereo)
    if atom.h == 1:
        parts.append("H")
    elif atom.h > 1:
        parts.append(f"H{atom.h}")
    if atom.charge == 1:
        parts.append("+")
    elif atom.charge == -1:
        parts.append("-")
    elif atom.charge > 1:
        parts.append(f"+{atom.charge}")
    elif atom.charge < -1:
        parts.append(f"-{-atom.charge}")
    parts.append("]")
    return "".join(parts)


def _bond_token(g: MolGraph, bond: Bond, source: int) -> str:
    if bond.aromatic:
        return ""
    if bond.direction is not None:
        if source == min(bond.a, bond.b):
            return bond.direction
        return "/" if bond.direction == "\\" else "\\"
    if bond.order == 1:
        a, b = g.atoms[bond.a], g.atoms[bond.b]
        return "-" if (a.aromatic and b.aromatic) else ""
    return _ORDER_SYMBOLS[bond.order]


def write_smiles(g: MolGraph, root: Optional[int] = None) -> str:
    """Emit a SMILES string, starting from ``root`` (canonical root by default).

    Neighbor order follows canonical ranks when available, else atom indices;
    re-parsing the output yields a graph with an identical certificate.
    """
    rank = g._canonical_rank or list(range(len(g.atoms)))
    if root is None:
        root = min(range(len(g.atoms)), key=lambda i: rank[i])

    # first pass: DFS spanning tree + ring-closure numbering in discovery order
    visited = {root}
    children: Dict[int, List[Tuple[int, Bond]]] = {i: [] for i in range(len(g.atoms))}
    closures: Dict[int, List[Tuple[int, Bond, int]]] = {i: [] for i in range(len(g.atoms))}
    seen_bonds = set()
    counter = 1

    def discover(u: int) -> None:
        nonlocal counter
        for v, bond in sorted(g.neighbors(u), key=lambda nb: rank[nb[0]]):
            if id(bond) in seen_bonds:
                continue
            seen_bonds.add(id(bond))
            if v in visited:
                # closing atom u is emitted after v, so u carries the bond symbol
                closures[u].append((counter, bond, u))
                closures[v].append((counter, bond, u))
                counter += 1
            else:
                visited.add(v)
                children[u].append((v, bond))
                discover(v)

    discover(root)

    def digit(number: int) -> str:
        return str(number) if number < 10 else f"%{number:02d}"

    out: List[str] = []

    def emit(u: int) -> None:
        out.append(_atom_token(g, u))
        for number, bond, opener in sorted(closures[u]):
            if u == opener:
                out.append(_bond_token(g, bond, u))
            out.append(digit(number))
        kids = children[u]
        for i, (v, bond) in enumerate(kids):
            last = i == len(kids) - 1
            if not last:
                out.append("(")
            out.append(_bond_token(g, bond, u))
            emit(v)
            if not last:
                out.append(")")

    emit(root)
    return "".join(out)


def molecule_from_smiles(text: str) -> MolGraph:
    """Full pipeline: parse, kekulize, assign hydrogens, canonicalize."""
    g = parse_smiles(text)
    kekulize(g)
    assign_hydrogens(g)
    canonicalize(g)
    return g


def formula_of(text: str) -> ChemicalFormula:
    """Derive the molecular formula of a SMILES string."""
    g = parse_smiles(text)
    kekulize(g)
    assign_hydrogens(g)
    assert g.formula is not None
    return g.formula
