"""Command-line entry point.

Exit codes: 0 success, 1 data errors (per-line diagnostics on stderr),
2 usage errors. The only randomized subcommand is ``generate`` and it
requires an explicit ``--seed``; no environment variables are consulted.
"""

from __future__ import annotations

import argparse
import os
import sys
from typing import List, Optional

from .balance import (
    BalanceStatus,
    check_balance,
    default_lexicon,
    infer_byproducts,
    load_lexicon,
    solve_reaction,
)
from .benchgen import (
    DistributionConfig,
    VARIANT_NAMES,
    convert_corpus,
    ingest_split,
    load_corpus,
    make_dataset,
    parse_variant_name,
    reaction_from_corpus_line,
)
from .errors import ChemError
from .reaction import Encoding, parse_reaction, print_reaction
from .scoring import identity_baseline, score_dataset
from .smiles import molecule_from_smiles


def _encoding(value: str) -> Encoding:
    return Encoding(value)


def _interval(text: str) -> tuple:
    try:
        lo, hi = text.replace("-", ":").split(":")
        return (int(lo), int(hi))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected LO:HI, got {text!r}")


def _variant(name: str) -> str:
    if name == "all":
        return name
    try:
        parse_variant_name(name)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc))
    return name


def _add_encoding(parser, default=Encoding.SMILES, required=False,
                  help_text="molecule dialect of the input"):
    kwargs = {"type": _encoding, "choices": list(Encoding),
              "metavar": "{smiles,formula}", "help": help_text}
    if required:
        kwargs["required"] = True
    else:
        kwargs["default"] = default
    parser.add_argument("--encoding", **kwargs)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="chemalgebra",
        description="Stoichiometry toolkit: balance checking, exact coefficient "
                    "solving, benchmark generation and prediction scoring.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("canon", help="canonical SMILES of one molecule")
    p.add_argument("smiles")

    p = sub.add_parser("formula", help="Hill formula of one SMILES molecule")
    p.add_argument("smiles")

    p = sub.add_parser("check", help="mass-balance check of reactions")
    p.add_argument("reaction", nargs="?", help="one reaction text (R>G>P or LEFT>>RIGHT)")
    p.add_argument("--file", help="check every line of a reaction file instead")
    _add_encoding(p, default=Encoding.SMILES)
    p.add_argument("--charge", action="store_true",
                   help="require charge equality as well")

    p = sub.add_parser("solve", help="solve exact stoichiometric coefficients")
    p.add_argument("reaction")
    _add_encoding(p, default=None,
                  help_text="force one dialect; default tries SMILES per molecule, "
                            "then raw formula")
    p.add_argument("--max-coeff", type=int, default=50)

    p = sub.add_parser("rebalance", help="append inferred byproducts to unbalanced reactions")
    p.add_argument("reaction", nargs="?")
    p.add_argument("--file", help="rebalance every line of a reaction file")
    p.add_argument("--out", help="output file for --file mode")
    _add_encoding(p, default=Encoding.SMILES)
    p.add_argument("--lexicon", help="byproduct lexicon file, one formula per line")

    p = sub.add_parser("ingest", help="build a balanced corpus from raw reaction files")
    p.add_argument("--train", help="raw corpus for the training split")
    p.add_argument("--valid", help="raw corpus for the validation split")
    p.add_argument("--test", help="raw corpus for the test split")
    p.add_argument("--input", help="single unsplit corpus file")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--lexicon")
    p.add_argument("--paired", action="store_true",
                   help="inputs are src-* files with matching tgt-* files")
    p.add_argument("--no-figure", action="store_true",
                   help="skip the PNG next to the report")
    p.add_argument("--jobs", type=int, default=1,
                   help="parallel workers; output order stays by line index")

    p = sub.add_parser("generate", help="generate benchmark variant directories")
    p.add_argument("--train", required=True, help="balanced training corpus")
    p.add_argument("--valid", required=True, help="balanced validation corpus")
    p.add_argument("--test", required=True, help="balanced test corpus")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--seed", type=int, required=True,
                   help="master seed; generation is fully deterministic")
    p.add_argument("--variant", action="append", default=None, type=_variant,
                   help="variant name like F_T1_x1; repeatable; default all eight")
    p.add_argument("--s-in", type=_interval, default=(1, 5))
    p.add_argument("--s-out", type=_interval, default=(6, 10))

    p = sub.add_parser("evaluate", help="score a prediction file against a target file")
    p.add_argument("--src", required=True, help="source lines the model saw")
    p.add_argument("--tgt", required=True, help="ground-truth target lines")
    p.add_argument("--pred", required=True, help="one prediction line per target")
    _add_encoding(p, required=True)
    p.add_argument("--report", help="write a tab-delimited report here")
    p.add_argument("--no-figure", action="store_true",
                   help="skip the PNG next to the report")
    p.add_argument("--jobs", type=int, default=1,
                   help="parallel workers; output order stays by line index")

    p = sub.add_parser("baseline", help="identity predictor: reprint src canonically")
    p.add_argument("--src", required=True, help="source lines to reprint")
    p.add_argument("--out", required=True, help="prediction file to write")
    _add_encoding(p, required=True)

    p = sub.add_parser("stats", help="balance statistics over a reaction corpus")
    p.add_argument("--input", required=True, help="reaction corpus file")
    p.add_argument("--report", help="write a tab-delimited report here")
    p.add_argument("--no-figure", action="store_true",
                   help="skip the PNG next to the report")
    return parser


def _figure_path(report_path: str) -> str:
    stem, _ = os.path.splitext(report_path)
    return stem + ".png"


def _cmd_canon(args) -> int:
    print(molecule_from_smiles(args.smiles).canonical_smiles)
    return 0


def _cmd_formula(args) -> int:
    from .smiles import formula_of
    print(formula_of(args.smiles).text)
    return 0


def _describe(report) -> str:
    parts = [report.status.value]
    if report.deficit:
        parts.append(f"missing on right: {report.deficit}")
    if report.excess:
        parts.append(f"missing on left: {report.excess}")
    parts.append(f"charge delta: {report.charge_delta:+d}")
    return "; ".join(parts)


def _cmd_check(args) -> int:
    if args.file:
        tally = {}
        failures = 0
        with open(args.file, "r", encoding="utf-8") as fh:
            for number, line in enumerate(fh, start=1):
                if not line.strip():
                    continue
                try:
                    rxn = reaction_from_corpus_line(line, args.encoding)
                except ChemError as exc:
                    print(f"{args.file}:{number}: {exc}", file=sys.stderr)
                    failures += 1
                    continue
                status = check_balance(rxn, include_charge=args.charge).status
                tally[status.value] = tally.get(status.value, 0) + 1
        for status, count in sorted(tally.items()):
            print(f"{status}\t{count}")
        if failures:
            print(f"parse failures\t{failures}", file=sys.stderr)
            return 1
        return 0
    if not args.reaction:
        print("error: provide a reaction or --file", file=sys.stderr)
        return 2
    rxn = parse_reaction(args.reaction, args.encoding)
    report = check_balance(rxn, include_charge=args.charge)
    print(_describe(report))
    return 0


def _cmd_solve(args) -> int:
    if args.encoding is None:
        from .reaction import parse_reaction_lenient
        rxn = parse_reaction_lenient(args.reaction)
    else:
        rxn = parse_reaction(args.reaction, args.encoding)
    sol = solve_reaction(rxn, max_coeff=args.max_coeff)
    r = ",".join(str(x) for x in sol.r)
    p = ",".join(str(x) for x in sol.p)
    print(f"r=[{r}] p=[{p}]")
    return 0


def _cmd_rebalance(args) -> int:
    lexicon = load_lexicon(args.lexicon) if args.lexicon else default_lexicon()
    if args.file:
        if not args.out:
            print("error: --file mode needs --out", file=sys.stderr)
            return 2
        failures = 0
        with open(args.file, "r", encoding="utf-8") as fh, \
                open(args.out, "w", encoding="utf-8", newline="\n") as out:
            for number, line in enumerate(fh, start=1):
                if not line.strip():
                    continue
                try:
                    rxn = reaction_from_corpus_line(line, args.encoding)
                    fixed = infer_byproducts(rxn, lexicon)
                except ChemError as exc:
                    print(f"{args.file}:{number}: {exc}", file=sys.stderr)
                    failures += 1
                    continue
                out.write(print_reaction(fixed) + "\n")
        return 1 if failures else 0
    if not args.reaction:
        print("error: provide a reaction or --file", file=sys.stderr)
        return 2
    rxn = parse_reaction(args.reaction, args.encoding)
    print(print_reaction(infer_byproducts(rxn, lexicon)))
    return 0


def _cmd_ingest(args) -> int:
    lexicon = load_lexicon(args.lexicon) if args.lexicon else default_lexicon()
    splits = []
    for name, path in (("train", args.train), ("valid", args.valid),
                       ("test", args.test), ("corpus", args.input)):
        if path:
            splits.append((name, path))
    if not splits:
        print("error: provide --train/--valid/--test or --input", file=sys.stderr)
        return 2
    os.makedirs(args.out, exist_ok=True)
    all_stats = []
    for name, path in splits:
        from .benchgen import iter_corpus_lines
        stats, kept = ingest_split(name, iter_corpus_lines(path, args.paired),
                                   lexicon, jobs=args.jobs)
        all_stats.append(stats)
        out_path = os.path.join(args.out, f"uspto_bal-{name}.txt")
        with open(out_path, "w", encoding="utf-8", newline="\n") as out:
            out.writelines(line + "\n" for line in kept)
    header = ["split", "total", "balanced", "balanced_pct", "rebalanced",
              "rebalanced_pct", "kept", "kept_pct", "parse_error", "ambiguous",
              "no_completion", "both_sides_deficient"]
    rows = ["\t".join(header)]
    for s in all_stats:
        rows.append("\t".join(str(x) for x in (
            s.split, s.total, s.balanced, f"{100 * s.rate('balanced'):.2f}",
            s.rebalanced, f"{100 * s.rate('rebalanced'):.2f}",
            s.kept, f"{100 * (s.kept / s.total if s.total else 0):.2f}",
            s.counts["parse_error"], s.counts["ambiguous"],
            s.counts["no_completion"], s.counts["both_sides_deficient"])))
    report_text = "\n".join(rows) + "\n"
    report_path = os.path.join(args.out, "ingest-report.tsv")
    with open(report_path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(report_text)
    print(report_text, end="")
    if not args.no_figure:
        from .figures import render_ingest_figure
        render_ingest_figure(all_stats, _figure_path(report_path))
    return 0


def _cmd_generate(args) -> int:
    dist = DistributionConfig(s_in=args.s_in, s_out=args.s_out, seed=args.seed)
    names = args.variant or list(VARIANT_NAMES)
    if any(n == "all" for n in names):
        names = list(VARIANT_NAMES)
    configs = [parse_variant_name(n, dist) for n in names]
    from .benchgen import compact_corpus
    corpus = {}
    formula_corpus = {}
    for name, path in (("train", args.train), ("valid", args.valid),
                       ("test", args.test)):
        loaded = load_corpus(path)
        formula_corpus[name] = convert_corpus(loaded, Encoding.FORMULA)
        corpus[name] = compact_corpus(loaded)  # drops the heavyweight graphs
    os.makedirs(args.out, exist_ok=True)
    for cfg in configs:
        source = formula_corpus if cfg.encoding is Encoding.FORMULA else corpus
        out_dir = make_dataset(source["train"], source["valid"], source["test"],
                               cfg, args.out)
        print(f"wrote {out_dir}")
    return 0


def _cmd_evaluate(args) -> int:
    report = score_dataset(args.src, args.tgt, args.pred, args.encoding,
                           jobs=args.jobs)
    print(report.to_table())
    if args.report:
        with open(args.report, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(report.to_delimited())
        if not args.no_figure:
            from .figures import render_report_figure
            render_report_figure(report, _figure_path(args.report))
    return 0


def _cmd_baseline(args) -> int:
    with open(args.src, "r", encoding="utf-8") as fh:
        src_lines = [line.rstrip("\n") for line in fh if line.strip()]
    pred = identity_baseline(src_lines, args.encoding)
    with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
        fh.writelines(line + "\n" for line in pred)
    print(f"wrote {len(pred)} predictions to {args.out}")
    return 0


def _cmd_stats(args) -> int:
    tally = {s.value: 0 for s in BalanceStatus}
    tally["parse_error"] = 0
    total = 0
    charged = 0
    with open(args.input, "r", encoding="utf-8") as fh:
        for line in fh:
            if not line.strip():
                continue
            total += 1
            try:
                rxn = reaction_from_corpus_line(line)
            except ChemError:
                tally["parse_error"] += 1
                continue
            report = check_balance(rxn)
            tally[report.status.value] += 1
            if report.charge_delta != 0:
                charged += 1
    rows = ["metric\tvalue", f"total\t{total}"]
    rows += [f"{k}\t{v}" for k, v in tally.items()]
    rows.append(f"charge_delta_nonzero\t{charged}")
    text = "\n".join(rows) + "\n"
    print(text, end="")
    if args.report:
        with open(args.report, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        if not args.no_figure:
            from .figures import render_status_figure
            render_status_figure(tally, _figure_path(args.report),
                                 title=os.path.basename(args.input))
    return 0


_HANDLERS = {
    "canon": _cmd_canon,
    "formula": _cmd_formula,
    "check": _cmd_check,
    "solve": _cmd_solve,
    "rebalance": _cmd_rebalance,
    "ingest": _cmd_ingest,
    "generate": _cmd_generate,
    "evaluate": _cmd_evaluate,
    "baseline": _cmd_baseline,
    "stats": _cmd_stats,
}


def run(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return _HANDLERS[args.command](args)
    except ChemError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
