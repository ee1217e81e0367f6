"""Deterministic generation of the eight benchmark variants plus corpus ingestion.

Variant layout (one directory per variant, UTF-8, LF line endings)::

    ChemAlgebra_{F|S}_T{1|2}_x{1|5}/
        src-train.txt        tgt-train.txt
        src-valid.txt        tgt-valid.txt
        src-test_in.txt      tgt-test_in.txt
        src-test_out.txt     tgt-test_out.txt
        src-train_cross.txt  tgt-train_cross.txt
        src-valid_cross.txt  tgt-valid_cross.txt
        src-test_cross.txt   tgt-test_cross.txt

Every line pair is balanced by construction. Coefficient draws come from
per-line streams derived from (seed, variant, file tag, line index,
augmentation index), so single lines are reproducible in isolation and
generation is byte-identical across runs and platforms.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from typing import Callable, Dict, Iterable, List, Optional, Sequence, Tuple

from .balance import BalanceStatus, check_balance, infer_byproducts
from .errors import ChemError, MalformedReaction
from .formula import ChemicalFormula
from .reaction import (
    Encoding,
    StoichBag,
    StoichReaction,
    convert_encoding,
    parse_reaction,
    print_reaction,
    print_stoich_line,
)
from .rng import SplitMix64, derive_stream


@dataclass(frozen=True)
class DistributionConfig:
    """Coefficient draw intervals and the master seed."""

    s_in: Tuple[int, int] = (1, 5)
    s_out: Tuple[int, int] = (6, 10)
    seed: int = 0

    def __post_init__(self):
        lo_in, hi_in = self.s_in
        lo_out, hi_out = self.s_out
        if lo_in < 1 or lo_in > hi_in or lo_out < 1 or lo_out > hi_out:
            raise ValueError("draw intervals must be non-empty with values >= 1")
        if not (hi_in < lo_out or hi_out < lo_in):
            raise ValueError("s_in and s_out must be disjoint")


@dataclass(frozen=True)
class VariantConfig:
    encoding: Encoding
    task: str  # "T1" or "T2"
    augmentation: int  # 1 or 5
    distribution: DistributionConfig = field(default_factory=DistributionConfig)

    @property
    def name(self) -> str:
        letter = "F" if self.encoding is Encoding.FORMULA else "S"
        return f"ChemAlgebra_{letter}_{self.task}_x{self.augmentation}"


VARIANT_NAMES = tuple(
    f"ChemAlgebra_{letter}_{task}_x{aug}"
    for letter in "FS" for task in ("T1", "T2") for aug in (1, 5)
)


def parse_variant_name(name: str,
                       distribution: Optional[DistributionConfig] = None) -> VariantConfig:
    """Accepts ``F_T1_x1`` or the full ``ChemAlgebra_F_T1_x1`` form."""
    short = name[len("ChemAlgebra_"):] if name.startswith("ChemAlgebra_") else name
    parts = short.split("_")
    if (len(parts) != 3 or parts[0] not in ("F", "S") or parts[1] not in ("T1", "T2")
            or parts[2] not in ("x1", "x5")):
        raise ValueError(f"unknown variant name {name!r}; expected e.g. F_T1_x1")
    return VariantConfig(
        encoding=Encoding.FORMULA if parts[0] == "F" else Encoding.SMILES,
        task=parts[1],
        augmentation=int(parts[2][1:]),
        distribution=distribution or DistributionConfig(),
    )


def type1_instance(base: StoichReaction, k: int) -> StoichReaction:
    """Multiply every coefficient on both sides by ``k``."""
    return StoichReaction(base.reactants.scaled(k), base.reagents.scaled(k),
                          base.products.scaled(k), base.encoding)


def type2_instance(base: StoichReaction, rng: SplitMix64,
                   interval: Tuple[int, int] = (1, 5)) -> StoichReaction:
    """Per-molecule coefficient draws with the min-subtraction crossover rule.

    One coefficient ``k`` is drawn per entry, in order reactants, reagents,
    products. With the minimum draw ``k_min``: the left side gets reactants
    and reagents at their draws and each product as a confounder at
    ``k - k_min`` (omitted when zero); the right side mirrors this with
    reactants and products swapped. Reagents keep one draw on both sides.
    Draws multiply the base coefficients, so the output is balanced whenever
    the base is; with all draws equal this degenerates to ``type1_instance``.
    """
    lo, hi = interval
    k_react = [rng.randint(lo, hi) for _ in base.reactants]
    k_reag = [rng.randint(lo, hi) for _ in base.reagents]
    k_prod = [rng.randint(lo, hi) for _ in base.products]
    k_min = min(k_react + k_reag + k_prod)

    left = [e.scaled(k) for e, k in zip(base.reactants, k_react)]
    right = [e.scaled(k) for e, k in zip(base.products, k_prod)]
    left += [e.scaled(k - k_min) for e, k in zip(base.products, k_prod) if k > k_min]
    right += [e.scaled(k - k_min) for e, k in zip(base.reactants, k_react) if k > k_min]
    reagents = [e.scaled(k) for e, k in zip(base.reagents, k_reag)]
    return StoichReaction(StoichBag(left), StoichBag(reagents),
                          StoichBag(right), base.encoding)


def emit_pair(base: StoichReaction, cfg: VariantConfig, interval: Tuple[int, int],
              stream: SplitMix64) -> Tuple[str, str]:
    """Instantiate one reaction and render the shuffled src/tgt line pair."""
    if cfg.task == "T1":
        instance = type1_instance(base, stream.randint(*interval))
    else:
        instance = type2_instance(base, stream, interval)
    src = print_stoich_line(instance.left_bag(), cfg.encoding, stream)
    tgt = print_stoich_line(instance.right_bag(), cfg.encoding, stream)
    return src, tgt


def _write_pair(out_dir: str, tag: str, pairs: Iterable[Tuple[str, str]]) -> None:
    src_path = os.path.join(out_dir, f"src-{tag}.txt")
    tgt_path = os.path.join(out_dir, f"tgt-{tag}.txt")
    with open(src_path, "w", encoding="utf-8", newline="\n") as src_fh, \
            open(tgt_path, "w", encoding="utf-8", newline="\n") as tgt_fh:
        for src, tgt in pairs:
            src_fh.write(src + "\n")
            tgt_fh.write(tgt + "\n")


def _emit_file(corpus: Sequence[StoichReaction], cfg: VariantConfig, tag: str,
               interval_for_line: Callable[[int], Tuple[int, int]],
               copies: int) -> Iterable[Tuple[str, str]]:
    for line_index, base in enumerate(corpus):
        for aug in range(copies):
            stream = derive_stream(cfg.distribution.seed, cfg.name, tag,
                                   line_index, aug)
            yield emit_pair(base, cfg, interval_for_line(line_index), stream)


def first_half_size(n: int) -> int:
    """Cross-distribution halves split at ceil(n / 2)."""
    return (n + 1) // 2


def make_cross_split(train: Sequence[StoichReaction], valid: Sequence[StoichReaction],
                     cfg: VariantConfig, out_dir: str) -> None:
    """Emit the three ``_cross`` file pairs.

    Training and validation reactions draw from s_in in their first half and
    s_out in their second; the cross test set repeats the training reactions
    with the two sources swapped.
    """
    dist = cfg.distribution

    def straight(n: int) -> Callable[[int], Tuple[int, int]]:
        half = first_half_size(n)
        return lambda i: dist.s_in if i < half else dist.s_out

    def swapped(n: int) -> Callable[[int], Tuple[int, int]]:
        half = first_half_size(n)
        return lambda i: dist.s_out if i < half else dist.s_in

    _write_pair(out_dir, "train_cross",
                _emit_file(train, cfg, "train_cross", straight(len(train)), cfg.augmentation))
    _write_pair(out_dir, "valid_cross",
                _emit_file(valid, cfg, "valid_cross", straight(len(valid)), 1))
    _write_pair(out_dir, "test_cross",
                _emit_file(train, cfg, "test_cross", swapped(len(train)), 1))


def make_dataset(train: Sequence[StoichReaction], valid: Sequence[StoichReaction],
                 test: Sequence[StoichReaction], cfg: VariantConfig,
                 out_root: str) -> str:
    """Generate one full variant directory; returns its path.

    The x5 augmentation quintuples the training files only; validation and
    test files always hold one instantiation per reaction. The test split is
    emitted twice, with coefficients from s_in and from s_out.
    """
    corpora = {"train": train, "valid": valid, "test": test}
    for name, corpus in corpora.items():
        for i, rxn in enumerate(corpus):
            report = check_balance(rxn)
            if report.status is not BalanceStatus.BALANCED:
                raise MalformedReaction(
                    f"{name} reaction {i} is not balanced: deficit "
                    f"{report.deficit}, excess {report.excess}")
    out_dir = os.path.join(out_root, cfg.name)
    os.makedirs(out_dir, exist_ok=True)
    dist = cfg.distribution
    s_in = lambda _i: dist.s_in  # noqa: E731
    s_out = lambda _i: dist.s_out  # noqa: E731
    _write_pair(out_dir, "train", _emit_file(train, cfg, "train", s_in, cfg.augmentation))
    _write_pair(out_dir, "valid", _emit_file(valid, cfg, "valid", s_in, 1))
    _write_pair(out_dir, "test_in", _emit_file(test, cfg, "test_in", s_in, 1))
    _write_pair(out_dir, "test_out", _emit_file(test, cfg, "test_out", s_out, 1))
    make_cross_split(train, valid, cfg, out_dir)
    return out_dir


# --- corpus loading and USPTO ingestion ---

def reaction_from_corpus_line(line: str, encoding: Encoding = Encoding.SMILES) -> StoichReaction:
    """Parse one corpus line; tolerates trailing annotation fields."""
    stripped = line.strip()
    if not stripped:
        raise MalformedReaction("empty corpus line")
    first = stripped.split()[0] if " " in stripped or "\t" in stripped else stripped
    if first.count(">") == 2:
        text = first
    else:
        text = stripped  # tokenized corpora put spaces inside the reaction
    return parse_reaction(text, encoding)


def load_corpus(path: str, encoding: Encoding = Encoding.SMILES) -> List[StoichReaction]:
    out = []
    with open(path, "r", encoding="utf-8") as fh:
        for number, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                out.append(reaction_from_corpus_line(line, encoding))
            except ChemError as exc:
                raise MalformedReaction(f"{path}:{number}: {exc}") from exc
    return out


def convert_corpus(corpus: Sequence[StoichReaction], encoding: Encoding) -> List[StoichReaction]:
    return [convert_encoding(r, encoding) for r in corpus]


def compact_corpus(corpus: Sequence[StoichReaction]) -> List[StoichReaction]:
    """Replace molecule graphs with interned (canonical text, bag) records.

    Keeps corpus-scale generation memory proportional to the set of distinct
    molecules instead of the sum of all parsed graphs; repeated molecules
    (solvents, small byproducts) collapse to one shared object.
    """
    from .reaction import RenderedMolecule, molecule_bag, render_molecule

    interned: Dict[str, RenderedMolecule] = {}

    def compact_mol(mol) -> RenderedMolecule:
        if isinstance(mol, RenderedMolecule):
            return mol
        text = render_molecule(mol, Encoding.SMILES)
        got = interned.get(text)
        if got is None:
            got = RenderedMolecule(text, molecule_bag(mol))
            interned[text] = got
        return got

    def compact_bag(bag: StoichBag) -> StoichBag:
        from .reaction import StoichEntry
        return StoichBag((StoichEntry(e.coefficient, compact_mol(e.mol)) for e in bag),
                         normalize=False)

    return [StoichReaction(compact_bag(r.reactants), compact_bag(r.reagents),
                           compact_bag(r.products), r.encoding) for r in corpus]


#: per-line ingestion outcomes
LINE_PARSE_ERROR = "parse_error"
LINE_BALANCED = "balanced"
LINE_REBALANCED = "rebalanced"
LINE_AMBIGUOUS = "ambiguous"
LINE_NO_COMPLETION = "no_completion"
LINE_BOTH_SIDES = "both_sides_deficient"

_OUTCOMES = (LINE_BALANCED, LINE_REBALANCED, LINE_AMBIGUOUS,
             LINE_NO_COMPLETION, LINE_BOTH_SIDES, LINE_PARSE_ERROR)


@dataclass
class IngestStats:
    """Per-split ingestion tallies, mirroring the corpus summary table."""

    split: str
    total: int = 0
    counts: Dict[str, int] = field(default_factory=lambda: {k: 0 for k in _OUTCOMES})

    @property
    def balanced(self) -> int:
        return self.counts[LINE_BALANCED]

    @property
    def rebalanced(self) -> int:
        return self.counts[LINE_REBALANCED]

    @property
    def kept(self) -> int:
        return self.balanced + self.rebalanced

    def rate(self, key: str) -> float:
        return self.counts[key] / self.total if self.total else 0.0


def ingest_line(line: str,
                lexicon: Optional[Sequence[ChemicalFormula]] = None) -> Tuple[str, Optional[str]]:
    """Classify and possibly rebalance one corpus line.

    Returns (outcome, output line). Balanced lines pass through reprinted
    canonically; rebalanced lines carry the inferred byproducts; everything
    else yields no output line.
    """
    from .errors import AmbiguousCompletion, BothSidesDeficient, NoCompletion

    try:
        rxn = reaction_from_corpus_line(line)
    except ChemError:
        return LINE_PARSE_ERROR, None
    if check_balance(rxn).status is BalanceStatus.BALANCED:
        return LINE_BALANCED, print_reaction(rxn, with_coefficients=False)
    try:
        fixed = infer_byproducts(rxn, lexicon)
    except AmbiguousCompletion:
        return LINE_AMBIGUOUS, None
    except BothSidesDeficient:
        return LINE_BOTH_SIDES, None
    except (NoCompletion, ChemError):
        return LINE_NO_COMPLETION, None
    return LINE_REBALANCED, print_reaction(fixed, with_coefficients=False)


def iter_corpus_lines(path: str, paired: bool = False) -> Iterable[str]:
    """Yield reaction lines from a corpus file.

    With ``paired=True`` the path is a ``src-*`` file and the matching
    ``tgt-*`` file (same directory, src replaced by tgt in the name) holds
    the product side; the two are joined into full reaction lines.
    """
    if not paired:
        with open(path, "r", encoding="utf-8") as fh:
            yield from fh
        return
    base = os.path.basename(path)
    if "src" not in base:
        raise MalformedReaction(f"paired ingestion needs a src-* file, got {path!r}")
    tgt_path = os.path.join(os.path.dirname(path), base.replace("src", "tgt", 1))
    with open(path, "r", encoding="utf-8") as src_fh, \
            open(tgt_path, "r", encoding="utf-8") as tgt_fh:
        for src_line, tgt_line in zip(src_fh, tgt_fh):
            src_text = "".join(src_line.split())
            tgt_text = "".join(tgt_line.split())
            sep = ">" if src_text.count(">") == 1 else ">>"
            yield f"{src_text}{sep}{tgt_text}"


def ingest_split(split: str, lines: Iterable[str],
                 lexicon: Optional[Sequence[ChemicalFormula]] = None,
                 jobs: int = 1) -> Tuple[IngestStats, List[str]]:
    """Run ingestion over one split; returns stats plus the kept corpus lines."""
    stats = IngestStats(split)
    kept: List[str] = []
    work = [line for line in lines if line.strip()]
    if jobs > 1:
        from functools import partial
        from multiprocessing import Pool
        with Pool(jobs) as pool:
            results = pool.map(partial(ingest_line, lexicon=lexicon), work, chunksize=256)
    else:
        results = [ingest_line(line, lexicon) for line in work]
    for outcome, out_line in results:
        stats.total += 1
        stats.counts[outcome] += 1
        if out_line is not None:
            kept.append(out_line)
    return stats, kept
