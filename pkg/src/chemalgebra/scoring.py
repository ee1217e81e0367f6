"""Score prediction files against targets: multiset metrics plus chemistry checks.

Per sample the harness computes exact match, coefficient-aware true/false
positives/negatives, their molecule-only variants, the at-least-one flag,
prediction validity and the balance classification of the prediction against
the source line. Aggregates are exact rationals (mean over samples) rendered
as percentages with two decimals.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from math import floor
from typing import Dict, Iterable, List, Sequence, Tuple

from .balance import BalanceStatus, compare_totals
from .errors import ChemError, LineCountMismatch
from .formula import EMPTY_BAG
from .reaction import Encoding, StoichBag, StoichEntry, _parse_item, parse_stoich_line

REPORT_FIELDS = ("n", "em", "jac", "f1", "mol_jac", "mol_f1", "alo", "val",
                 "bal", "def", "exc", "d_e")


@dataclass(frozen=True)
class MatchCounts:
    tp: int = 0
    fp: int = 0
    fn: int = 0

    def __add__(self, other: "MatchCounts") -> "MatchCounts":
        return MatchCounts(self.tp + other.tp, self.fp + other.fp, self.fn + other.fn)

    @property
    def jaccard(self) -> Fraction:
        denom = self.tp + self.fp + self.fn
        return Fraction(self.tp, denom) if denom else Fraction(1)

    @property
    def f1(self) -> Fraction:
        denom = 2 * self.tp + self.fp + self.fn
        return Fraction(2 * self.tp, denom) if denom else Fraction(1)


def match_bags(pred: StoichBag, truth: StoichBag) -> MatchCounts:
    """Coefficient-aware multiset matching over canonical molecule identities."""
    pred_m = pred.as_multiset()
    truth_m = truth.as_multiset()
    tp = fp = fn = 0
    for key in set(pred_m) | set(truth_m):
        p = pred_m.get(key, 0)
        t = truth_m.get(key, 0)
        tp += min(p, t)
        fp += max(p - t, 0)
        fn += max(t - p, 0)
    return MatchCounts(tp, fp, fn)


def match_molecules_only(pred: StoichBag, truth: StoichBag) -> MatchCounts:
    """Presence-only matching: every coefficient collapses to one."""
    pred_set = set(pred.as_multiset())
    truth_set = set(truth.as_multiset())
    return MatchCounts(
        tp=len(pred_set & truth_set),
        fp=len(pred_set - truth_set),
        fn=len(truth_set - pred_set),
    )


@dataclass(frozen=True)
class SampleScore:
    exact: bool
    counts: MatchCounts
    mol_counts: MatchCounts
    alo: bool
    valid: bool
    balance_status: BalanceStatus


def _parse_prediction(line: str, encoding: Encoding) -> Tuple[StoichBag, bool]:
    """Parse a prediction line molecule by molecule.

    Unparseable items are dropped (the line then scores valid=False); the
    parseable remainder still participates in the counts.
    """
    text = re.sub(r"\s+", "", line)
    entries: List[StoichEntry] = []
    valid = bool(text)
    for item in text.split("."):
        try:
            entries.append(_parse_item(item, encoding))
        except ChemError:
            valid = False
    return StoichBag(entries), valid


def score_sample(src_line: str, tgt_line: str, pred_line: str,
                 encoding: Encoding) -> SampleScore:
    src = parse_stoich_line(src_line, encoding)
    truth = parse_stoich_line(tgt_line, encoding)
    pred, valid = _parse_prediction(pred_line, encoding)

    counts = match_bags(pred, truth)
    mol_counts = match_molecules_only(pred, truth)
    exact = pred.as_multiset() == truth.as_multiset()
    alo = set(truth.as_multiset()) <= set(pred.as_multiset())
    pred_total = pred.total_bag() if pred else EMPTY_BAG
    status = compare_totals(src.total_bag(), pred_total).status
    return SampleScore(exact, counts, mol_counts, alo, valid, status)


@dataclass(frozen=True)
class Report:
    """Aggregate rates over one scored dataset, all exact rationals in [0, 1]."""

    n: int
    em: Fraction
    jac: Fraction
    f1: Fraction
    mol_jac: Fraction
    mol_f1: Fraction
    alo: Fraction
    val: Fraction
    bal: Fraction
    deficitary: Fraction
    exceeding: Fraction
    d_e: Fraction

    def values(self) -> Dict[str, object]:
        return {
            "n": self.n,
            "em": self.em, "jac": self.jac, "f1": self.f1,
            "mol_jac": self.mol_jac, "mol_f1": self.mol_f1,
            "alo": self.alo, "val": self.val,
            "bal": self.bal, "def": self.deficitary,
            "exc": self.exceeding, "d_e": self.d_e,
        }

    def percent(self, name: str) -> str:
        value = self.values()[name]
        assert isinstance(value, Fraction)
        # round the exact rational, not a float approximation (ties go up)
        hundredths = floor(value * 10_000 + Fraction(1, 2))
        return f"{hundredths // 100}.{hundredths % 100:02d}"

    def to_delimited(self) -> str:
        """Two tab-separated rows: field names, then n and percentages."""
        header = "\t".join(REPORT_FIELDS)
        row = "\t".join([str(self.n)] + [self.percent(f) for f in REPORT_FIELDS[1:]])
        return header + "\n" + row + "\n"

    def to_table(self) -> str:
        lines = [f"samples scored: {self.n}"]
        for name in REPORT_FIELDS[1:]:
            lines.append(f"  {name:<8s} {self.percent(name):>7s} %")
        return "\n".join(lines)


def aggregate(scores: Sequence[SampleScore]) -> Report:
    n = len(scores)
    if n == 0:
        raise LineCountMismatch("no samples to score")

    def mean(values: Iterable[Fraction]) -> Fraction:
        return sum(values, Fraction(0)) / n

    status_rate = {
        "bal": BalanceStatus.BALANCED,
        "exc": BalanceStatus.EXCEEDING,
        "d_e": BalanceStatus.DEFICITARY_AND_EXCEEDING,
    }
    rates = {}
    for name, wanted in status_rate.items():
        rates[name] = Fraction(sum(1 for s in scores if s.balance_status is wanted), n)
    deficitary = Fraction(
        sum(1 for s in scores if s.balance_status is BalanceStatus.DEFICITARY), n)
    return Report(
        n=n,
        em=Fraction(sum(1 for s in scores if s.exact), n),
        jac=mean(s.counts.jaccard for s in scores),
        f1=mean(s.counts.f1 for s in scores),
        mol_jac=mean(s.mol_counts.jaccard for s in scores),
        mol_f1=mean(s.mol_counts.f1 for s in scores),
        alo=Fraction(sum(1 for s in scores if s.alo), n),
        val=Fraction(sum(1 for s in scores if s.valid), n),
        bal=rates["bal"],
        deficitary=deficitary,
        exceeding=rates["exc"],
        d_e=rates["d_e"],
    )


def _score_triple(args: Tuple[str, str, str, str]) -> SampleScore:
    src, tgt, pred, enc = args
    return score_sample(src, tgt, pred, Encoding(enc))


def score_lines(src_lines: Sequence[str], tgt_lines: Sequence[str],
                pred_lines: Sequence[str], encoding: Encoding,
                jobs: int = 1) -> Report:
    if not (len(src_lines) == len(tgt_lines) == len(pred_lines)):
        raise LineCountMismatch(
            f"line counts differ: src={len(src_lines)} tgt={len(tgt_lines)} "
            f"pred={len(pred_lines)}")
    triples = [(s, t, p, encoding.value)
               for s, t, p in zip(src_lines, tgt_lines, pred_lines)]
    if jobs > 1:
        from multiprocessing import Pool
        with Pool(jobs) as pool:
            scores = pool.map(_score_triple, triples, chunksize=64)
    else:
        scores = [_score_triple(t) for t in triples]
    return aggregate(scores)


def _read_lines(path: str) -> List[str]:
    with open(path, "r", encoding="utf-8") as fh:
        return [line.rstrip("\n") for line in fh if line.strip()]


def score_dataset(src_path: str, tgt_path: str, pred_path: str,
                  encoding: Encoding, jobs: int = 1) -> Report:
    return score_lines(_read_lines(src_path), _read_lines(tgt_path),
                       _read_lines(pred_path), encoding, jobs)


def identity_baseline(src_lines: Iterable[str], encoding: Encoding) -> List[str]:
    """Trivial predictor: reprint each source bag canonically."""
    from .reaction import print_stoich_line

    out = []
    for line in src_lines:
        bag = parse_stoich_line(line, encoding)
        out.append(print_stoich_line(bag, encoding))
    return out
