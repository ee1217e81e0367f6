import glob
import hashlib
import os

import pytest

from chemalgebra.cli import run

from conftest import CORPUS_LINES


def tree_digest(root):
    h = hashlib.sha256()
    for path in sorted(glob.glob(os.path.join(root, "**", "*.txt"), recursive=True)):
        h.update(os.path.relpath(path, root).encode())
        with open(path, "rb") as fh:
            h.update(fh.read())
    return h.hexdigest()


def test_canon_is_stable(capsys):
    assert run(["canon", "C(=O)=O"]) == 0
    first = capsys.readouterr().out.strip()
    assert run(["canon", "O=C=O"]) == 0
    assert capsys.readouterr().out.strip() == first


def test_formula_command(capsys):
    assert run(["formula", "Cc1cccc(C)c1"]) == 0
    assert capsys.readouterr().out.strip() == "C8H10"


def test_solve_command(capsys):
    assert run(["solve", "CO2.[HH]>[Ni]>C.O"]) == 0
    assert capsys.readouterr().out.strip() == "r=[1,4,1] p=[1,2,1]"


def test_check_single(capsys):
    assert run(["check", CORPUS_LINES[0]]) == 0
    out = capsys.readouterr().out
    assert "balanced" in out and "charge delta: +0" in out


def test_check_file(tmp_path, capsys):
    path = tmp_path / "rxns.txt"
    path.write_text("\n".join(CORPUS_LINES) + "\n", encoding="utf-8")
    assert run(["check", "--file", str(path)]) == 0
    assert "balanced\t6" in capsys.readouterr().out


def test_check_file_with_bad_line_exits_1(tmp_path, capsys):
    path = tmp_path / "rxns.txt"
    path.write_text(CORPUS_LINES[0] + "\nnot-a-reaction\n", encoding="utf-8")
    assert run(["check", "--file", str(path)]) == 1
    assert "not-a-reaction" not in capsys.readouterr().out  # diagnostics go to stderr


def test_rebalance_single(capsys):
    assert run(["rebalance", "{1}C14H22O>>{1}C14H20", "--encoding", "formula"]) == 0
    assert capsys.readouterr().out.strip() == "{1}C14H22O>>{1}C14H20.{1}H2O"


def test_data_error_exit_code(capsys):
    assert run(["canon", "C1CC"]) == 1
    assert "error:" in capsys.readouterr().err


def test_usage_error_exit_code():
    with pytest.raises(SystemExit) as exc:
        run(["generate", "--train", "x"])  # missing required flags incl. --seed
    assert exc.value.code == 2


def _write_corpus(tmp_path):
    train = tmp_path / "train.txt"
    valid = tmp_path / "valid.txt"
    test = tmp_path / "test.txt"
    train.write_text("\n".join(CORPUS_LINES[:4]) + "\n", encoding="utf-8")
    valid.write_text(CORPUS_LINES[4] + "\n", encoding="utf-8")
    test.write_text(CORPUS_LINES[5] + "\n", encoding="utf-8")
    return str(train), str(valid), str(test)


def test_generate_evaluate_baseline_round_trip(tmp_path, capsys):
    train, valid, test = _write_corpus(tmp_path)
    out = str(tmp_path / "data")
    assert run(["generate", "--train", train, "--valid", valid, "--test", test,
                "--out", out, "--seed", "3", "--variant", "F_T1_x1"]) == 0
    capsys.readouterr()
    variant = os.path.join(out, "ChemAlgebra_F_T1_x1")
    assert sorted(os.listdir(out)) == ["ChemAlgebra_F_T1_x1"]

    pred = str(tmp_path / "pred.txt")
    assert run(["baseline", "--src", os.path.join(variant, "src-test_in.txt"),
                "--out", pred, "--encoding", "formula"]) == 0
    capsys.readouterr()

    report_path = str(tmp_path / "report.tsv")
    assert run(["evaluate", "--src", os.path.join(variant, "src-test_in.txt"),
                "--tgt", os.path.join(variant, "src-test_in.txt"),
                "--pred", pred, "--encoding", "formula",
                "--report", report_path]) == 0
    out_text = capsys.readouterr().out
    assert "em        100.00" in out_text
    assert os.path.exists(report_path)
    assert os.path.exists(str(tmp_path / "report.png"))


def test_generate_writes_only_inside_out_dir(tmp_path):
    train, valid, test = _write_corpus(tmp_path)
    out = tmp_path / "only"
    before = set(os.listdir(tmp_path))
    assert run(["generate", "--train", train, "--valid", valid, "--test", test,
                "--out", str(out), "--seed", "1", "--variant", "S_T1_x1"]) == 0
    after = set(os.listdir(tmp_path))
    assert after - before == {"only"}


def test_generate_determinism_across_runs(tmp_path, capsys):
    train, valid, test = _write_corpus(tmp_path)
    digests = []
    for sub in ("a", "b"):
        out = str(tmp_path / sub)
        assert run(["generate", "--train", train, "--valid", valid, "--test", test,
                    "--out", out, "--seed", "42", "--variant", "F_T2_x1",
                    "--variant", "S_T2_x1"]) == 0
        capsys.readouterr()
        digests.append(tree_digest(out))
    assert digests[0] == digests[1]


def test_ingest_command(tmp_path, capsys):
    raw = tmp_path / "raw.txt"
    raw.write_text("\n".join([
        CORPUS_LINES[0],
        "O=C=O.[HH].[HH].[HH].[HH]>[Ni]>C.O",  # fixable: one water missing
        "O=C=O>>[Ni]",                          # hopeless
    ]) + "\n", encoding="utf-8")
    out = str(tmp_path / "bal")
    assert run(["ingest", "--input", str(raw), "--out", out]) == 0
    text = capsys.readouterr().out
    assert "corpus\t3" in text
    corpus_path = os.path.join(out, "uspto_bal-corpus.txt")
    with open(corpus_path) as fh:
        lines = fh.read().splitlines()
    assert len(lines) == 2
    assert os.path.exists(os.path.join(out, "ingest-report.tsv"))
    assert os.path.exists(os.path.join(out, "ingest-report.png"))


def test_stats_command(tmp_path, capsys):
    path = tmp_path / "rxns.txt"
    path.write_text("\n".join(CORPUS_LINES[:3]) + "\n", encoding="utf-8")
    report = str(tmp_path / "stats.tsv")
    assert run(["stats", "--input", str(path), "--report", report]) == 0
    out = capsys.readouterr().out
    assert "total\t3" in out and "balanced\t3" in out
    assert os.path.exists(report)
    assert os.path.exists(str(tmp_path / "stats.png"))


def test_evaluate_with_jobs(tmp_path, capsys):
    train, valid, test = _write_corpus(tmp_path)
    out = str(tmp_path / "data")
    run(["generate", "--train", train, "--valid", valid, "--test", test,
         "--out", out, "--seed", "3", "--variant", "F_T1_x5"])
    capsys.readouterr()
    variant = os.path.join(out, "ChemAlgebra_F_T1_x5")
    pred = str(tmp_path / "pred.txt")
    run(["baseline", "--src", os.path.join(variant, "src-train.txt"),
         "--out", pred, "--encoding", "formula"])
    capsys.readouterr()
    results = []
    for jobs in ("1", "2"):
        assert run(["evaluate", "--src", os.path.join(variant, "src-train.txt"),
                    "--tgt", os.path.join(variant, "tgt-train.txt"),
                    "--pred", pred, "--encoding", "formula", "--jobs", jobs]) == 0
        results.append(capsys.readouterr().out)
    assert results[0] == results[1]
    assert "bal       100.00" in results[0]


def test_check_with_charge_flag(capsys):
    assert run(["check", "{1}Na+>>{1}Na", "--encoding", "formula", "--charge"]) == 0
    out = capsys.readouterr().out
    assert "charge delta: +1" in out


def test_rebalance_file_mode(tmp_path, capsys):
    src = tmp_path / "in.txt"
    src.write_text("{1}C14H22O>>{1}C14H20\n{1}CH4.{1}Ni>>{1}CH4\n", encoding="utf-8")
    out = tmp_path / "out.txt"
    code = run(["rebalance", "--file", str(src), "--out", str(out),
                "--encoding", "formula"])
    assert code == 1  # the Ni line is unfixable and reported on stderr
    err = capsys.readouterr().err
    assert "in.txt:2" in err
    assert out.read_text().strip() == "{1}C14H22O>>{1}C14H20.{1}H2O"


def test_generate_variant_all(tmp_path, capsys):
    train, valid, test = _write_corpus(tmp_path)
    out = str(tmp_path / "all")
    assert run(["generate", "--train", train, "--valid", valid, "--test", test,
                "--out", out, "--seed", "11", "--variant", "all"]) == 0
    capsys.readouterr()
    assert len(os.listdir(out)) == 8


def test_bad_variant_is_a_usage_error(tmp_path, capsys):
    train, valid, test = _write_corpus(tmp_path)
    with pytest.raises(SystemExit) as exc:
        run(["generate", "--train", train, "--valid", valid, "--test", test,
             "--out", str(tmp_path / "x"), "--seed", "1", "--variant", "F_T9_x1"])
    assert exc.value.code == 2
    assert "unknown variant" in capsys.readouterr().err
