"""Exception hierarchy shared by all chemalgebra modules."""


class ChemError(Exception):
    """Base class for every data error raised by this package."""


# --- formula layer ---

class UnknownElement(ChemError):
    """An element symbol is not in the periodic table."""


class MalformedFormula(ChemError):
    """A formula string does not match the formula grammar."""


class EmptyBag(ChemError):
    """An operation that needs atoms was given an empty bag."""


# --- SMILES layer ---

class SmilesError(ChemError):
    """Base class for SMILES parsing and perception errors."""


class UnknownAtomToken(SmilesError):
    """An atom token could not be interpreted."""


class UnbalancedParenthesis(SmilesError):
    """Branch parentheses do not match."""


class UnmatchedRingClosure(SmilesError):
    """A ring-closure digit was opened but never closed (or misused)."""


class DanglingBondSymbol(SmilesError):
    """A bond symbol appears where no bond can be formed."""


class KekulizationFailure(SmilesError):
    """No alternating single/double assignment exists for an aromatic system."""


class ValenceExceeded(SmilesError):
    """An unbracketed atom has more explicit bonds than any allowed valence."""


# --- reaction layer ---

class MalformedReaction(ChemError):
    """Reaction text does not split into the expected segments."""


class BadCoefficient(ChemError):
    """A stoichiometric coefficient is missing, non-positive or out of range."""


# --- balance layer ---

class NoCompletion(ChemError):
    """No multiset of lexicon molecules matches the atom deficit."""


class AmbiguousCompletion(ChemError):
    """Two or more distinct lexicon multisets match the atom deficit."""


class BothSidesDeficient(ChemError):
    """The deficit has mixed signs; no single-side completion can fix it."""


class NoPositiveSolution(ChemError):
    """The stoichiometric system has no strictly positive solution."""


class SearchExhausted(ChemError):
    """The bounded coefficient search ended without a positive solution."""


# --- evaluation layer ---

class LineCountMismatch(ChemError):
    """src/tgt/pred files do not have the same number of lines."""
