"""Element identities, exact atom-multiset algebra and the raw formula dialect.

An :class:`AtomBag` is an exact multiset of chemical elements plus a net
formal charge; it is the currency of all balance arithmetic in this package.
Formula text uses a Hill-style ordering: carbon first, hydrogen next (or
first when there is no carbon), remaining symbols alphabetically, followed
by the charge as repeated trailing signs (``Na+``, ``O3-``).
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Dict, Iterable, Mapping, Tuple

from .errors import EmptyBag, MalformedFormula, UnknownElement

_SYMBOLS = (
    "H He Li Be B C N O F Ne Na Mg Al Si P S Cl Ar K Ca "
    "Sc Ti V Cr Mn Fe Co Ni Cu Zn Ga Ge As Se Br Kr Rb Sr Y Zr "
    "Nb Mo Tc Ru Rh Pd Ag Cd In Sn Sb Te I Xe Cs Ba La Ce Pr Nd "
    "Pm Sm Eu Gd Tb Dy Ho Er Tm Yb Lu Hf Ta W Re Os Ir Pt Au Hg "
    "Tl Pb Bi Po At Rn Fr Ra Ac Th Pa U Np Pu Am Cm Bk Cf Es Fm "
    "Md No Lr Rf Db Sg Bh Hs Mt Ds Rg Cn Nh Fl Mc Lv Ts Og"
).split()

#: symbol -> atomic number, elements 1..118
PERIODIC_TABLE: Dict[str, int] = {sym: z for z, sym in enumerate(_SYMBOLS, start=1)}


@dataclass(frozen=True)
class Element:
    symbol: str
    atomic_number: int


_ELEMENT_CACHE: Dict[str, Element] = {}


def element(symbol: str) -> Element:
    """Look up an element by symbol; raises UnknownElement for anything else."""
    try:
        return _ELEMENT_CACHE[symbol]
    except KeyError:
        z = PERIODIC_TABLE.get(symbol)
        if z is None:
            raise UnknownElement(f"unknown element symbol: {symbol!r}") from None
        el = Element(symbol, z)
        _ELEMENT_CACHE[symbol] = el
        return el


def hill_key(symbol: str) -> Tuple[int, str]:
    """Sort key for Hill ordering: C, then H, then alphabetical."""
    if symbol == "C":
        return (0, "")
    if symbol == "H":
        return (1, "")
    return (2, symbol)


class AtomBag:
    """Immutable element multiset with a signed net charge.

    Counts are strictly positive; absent means zero. Python integers are
    arbitrary precision, so counts and scale factors never wrap.
    """

    __slots__ = ("_counts", "_charge", "_key")

    def __init__(self, counts: Mapping[str, int] | None = None, charge: int = 0):
        cleaned: Dict[str, int] = {}
        if counts:
            for sym, n in counts.items():
                if sym not in PERIODIC_TABLE:
                    raise UnknownElement(f"unknown element symbol: {sym!r}")
                if n < 0:
                    raise ValueError(f"negative count for {sym}: {n}")
                if n:
                    cleaned[sym] = n
        object.__setattr__(self, "_counts", cleaned)
        object.__setattr__(self, "_charge", int(charge))
        key = tuple(sorted(cleaned.items())) + (("+", self._charge),)
        object.__setattr__(self, "_key", key)

    def __setattr__(self, name, value):  # pragma: no cover - guard rail
        raise AttributeError("AtomBag is immutable")

    def __reduce__(self):
        # the setattr guard breaks default pickling; rebuild from scratch
        return (AtomBag, (self._counts, self._charge))

    @property
    def charge(self) -> int:
        return self._charge

    def count(self, symbol: str) -> int:
        return self._counts.get(symbol, 0)

    def elements(self) -> Tuple[str, ...]:
        return tuple(sorted(self._counts, key=hill_key))

    def items(self) -> Tuple[Tuple[str, int], ...]:
        """(symbol, count) pairs in Hill order."""
        return tuple((s, self._counts[s]) for s in self.elements())

    def as_dict(self) -> Dict[str, int]:
        return dict(self._counts)

    @property
    def is_empty(self) -> bool:
        return not self._counts and self._charge == 0

    def total_atoms(self) -> int:
        return sum(self._counts.values())

    def add(self, other: "AtomBag") -> "AtomBag":
        merged = dict(self._counts)
        for sym, n in other._counts.items():
            merged[sym] = merged.get(sym, 0) + n
        return AtomBag(merged, self._charge + other._charge)

    def scale(self, k: int) -> "AtomBag":
        if k < 1:
            raise ValueError(f"scale factor must be >= 1, got {k}")
        return AtomBag({s: n * k for s, n in self._counts.items()}, self._charge * k)

    def diff(self, other: "AtomBag") -> Tuple[Dict[str, int], int]:
        """Signed per-element difference self - other, plus the charge delta."""
        out: Dict[str, int] = {}
        for sym in set(self._counts) | set(other._counts):
            d = self._counts.get(sym, 0) - other._counts.get(sym, 0)
            if d:
                out[sym] = d
        return out, self._charge - other._charge

    def __eq__(self, other) -> bool:
        if isinstance(other, AtomBag):
            return self._key == other._key
        return NotImplemented

    def __hash__(self) -> int:
        return hash(self._key)

    def __repr__(self) -> str:
        if self.is_empty:
            return "AtomBag()"
        return f"AtomBag({self._counts!r}, charge={self._charge})"


EMPTY_BAG = AtomBag()


def bag_add(a: AtomBag, b: AtomBag) -> AtomBag:
    return a.add(b)


def bag_scale(k: int, a: AtomBag) -> AtomBag:
    return a.scale(k)


def bag_diff(a: AtomBag, b: AtomBag) -> Tuple[Dict[str, int], int]:
    return a.diff(b)


@dataclass(frozen=True)
class ChemicalFormula:
    """An atom bag together with its canonical Hill-ordered rendering."""

    bag: AtomBag
    text: str

    @property
    def certificate(self) -> str:
        return self.text

    @classmethod
    def from_bag(cls, bag: AtomBag) -> "ChemicalFormula":
        return cls(bag, format_formula(bag))

    def __str__(self) -> str:
        return self.text


_TOKEN = re.compile(r"([A-Z][a-z]?)(\d*)")


def parse_formula(text: str) -> ChemicalFormula:
    """Parse formula text like ``C7H4ClNO4`` or ``Cl-`` into a ChemicalFormula.

    Grammar: one or more (element symbol, optional count >= 1) pairs, then an
    optional charge suffix of repeated ``+`` or ``-`` signs whose length is
    the charge magnitude. Digits never denote charge.
    """
    if not text:
        raise MalformedFormula("empty formula")
    body = text
    charge = 0
    m = re.search(r"[+-]+$", body)
    if m:
        signs = m.group(0)
        if signs != signs[0] * len(signs):
            raise MalformedFormula(f"mixed charge signs in {text!r}")
        charge = len(signs) if signs[0] == "+" else -len(signs)
        body = body[: m.start()]
    if not body:
        raise MalformedFormula(f"charge without atoms in {text!r}")

    counts: Dict[str, int] = {}
    pos = 0
    while pos < len(body):
        m = _TOKEN.match(body, pos)
        if not m:
            raise MalformedFormula(f"unexpected character {body[pos]!r} in {text!r}")
        sym, digits = m.group(1), m.group(2)
        if sym not in PERIODIC_TABLE:
            raise UnknownElement(f"unknown element {sym!r} in {text!r}")
        n = int(digits) if digits else 1
        if n == 0:
            raise MalformedFormula(f"zero count for {sym} in {text!r}")
        counts[sym] = counts.get(sym, 0) + n
        pos = m.end()
    bag = AtomBag(counts, charge)
    return ChemicalFormula(bag, format_formula(bag))


def format_formula(bag: AtomBag) -> str:
    """Render a bag in Hill order; counts of 1 omitted, charge as trailing signs."""
    if not bag.items():
        raise EmptyBag("cannot format a bag with no atoms")
    parts = []
    for sym, n in bag.items():
        parts.append(sym if n == 1 else f"{sym}{n}")
    if bag.charge > 0:
        parts.append("+" * bag.charge)
    elif bag.charge < 0:
        parts.append("-" * -bag.charge)
    return "".join(parts)


def sum_bags(bags: Iterable[AtomBag]) -> AtomBag:
    total = EMPTY_BAG
    for b in bags:
        total = total.add(b)
    return total
