"""Command-line interface: subcommand wiring, report format, exit codes,
and artifact determinism."""

import pytest

from bimodal.cli import main
from bimodal import formula as fm
from bimodal.semantics import load_model
from bimodal import atm as am


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def report_dict(out):
    pairs = {}
    for line in out.strip().splitlines():
        key, _, value = line.partition(": ")
        pairs.setdefault(key, value)
    return pairs


def test_gen_counter_to_stdout(capsys):
    code, out, _ = run(capsys, "gen", "counter-ssl", "--n", "1")
    assert code == 0
    report = report_dict(out)
    assert report["result"] == "pass"
    fm.parse(report["formula"])  # well-formed output


def test_gen_writes_artifacts(tmp_path, capsys):
    out_file = tmp_path / "f.txt"
    cat_file = tmp_path / "cat.txt"
    code, out, _ = run(capsys, "gen", "counter-s4s5", "--n", "2",
                       "--out", str(out_file), "--catalog", str(cat_file))
    assert code == 0
    first = out_file.read_bytes()
    run(capsys, "gen", "counter-s4s5", "--n", "2", "--out", str(out_file),
        "--catalog", str(cat_file))
    assert out_file.read_bytes() == first  # byte-identical regeneration
    fm.parse(out_file.read_text())


def test_gen_f_requires_machine_arguments(capsys):
    code, _, err = run(capsys, "gen", "f-ssl", "--n", "1")
    assert code == 1
    assert "requires" in err


def test_build_and_check_round_trip(tmp_path, capsys, m1_path):
    model_file = tmp_path / "model.txt"
    formula_file = tmp_path / "f.txt"
    code, out, _ = run(capsys, "build", "model", "--logic", "ssl",
                       "--atm", m1_path, "--w", "a", "--poly", "2,1",
                       "--out", str(model_file))
    assert code == 0
    assert report_dict(out)["formula-holds"] == "pass"
    run(capsys, "gen", "f-ssl", "--atm", m1_path, "--w", "a",
        "--poly", "2,1", "--out", str(formula_file))
    model = load_model(model_file.read_text())
    code, out, _ = run(capsys, "check", "--model", str(model_file),
                       "--formula", str(formula_file),
                       "--point", model.designated,
                       "--class", "cross-axiom")
    assert code == 0
    assert report_dict(out)["result"] == "pass"


def test_check_failure_exits_one(tmp_path, capsys):
    model_file = tmp_path / "model.txt"
    formula_file = tmp_path / "f.txt"
    run(capsys, "sat", "--formula", "/dev/null", "--class", "cross-axiom")
    # build a tiny model and check a false formula against it
    formula_file.write_text("x0\n")
    model_file.write_text("class cross-axiom\ndesignated w\nworld w\n"
                          "d w w\nl w w\n")
    code, out, err = run(capsys, "check", "--model", str(model_file),
                         "--formula", str(formula_file))
    assert code == 1
    assert report_dict(out)["holds"] == "fail"
    assert "error:" in err


def test_usage_error_exits_two(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["gen", "nonsense"])
    assert exc.value.code == 2


def test_sat_reports_verdict(tmp_path, capsys):
    formula_file = tmp_path / "f.txt"
    formula_file.write_text("(x0 & !x0)\n")
    code, out, _ = run(capsys, "sat", "--formula", str(formula_file),
                       "--class", "s4s5-product", "--bound", "2")
    assert code == 0
    assert report_dict(out)["verdict"] == "unsat-within-bound"


def test_atm_run_and_extract_tree(tmp_path, capsys, m1_path):
    tree_file = tmp_path / "tree.txt"
    code, out, _ = run(capsys, "atm", "run", "--atm", m1_path, "--w", "ab",
                       "--fuel", "7", "--out", str(tree_file))
    assert code == 0
    assert report_dict(out)["accepts"] == "pass"
    am.load_tree(tree_file.read_text())

    model_file = tmp_path / "model.txt"
    run(capsys, "build", "model", "--logic", "s4s5", "--atm", m1_path,
        "--w", "ab", "--poly", "2,1", "--out", str(model_file))
    out_tree = tmp_path / "extracted.txt"
    code, out, _ = run(capsys, "extract", "tree", "--logic", "s4s5",
                       "--model", str(model_file), "--atm", m1_path,
                       "--w", "ab", "--poly", "2,1", "--out", str(out_tree))
    assert code == 0
    extracted = am.load_tree(out_tree.read_text())
    reference = am.load_tree(tree_file.read_text())
    assert am.trees_label_equal(extracted, reference)


def test_extract_trace(tmp_path, capsys):
    model_file = tmp_path / "model.txt"
    from bimodal.red_ssl import build_counter_ssl_model
    from bimodal.semantics import save_model
    model, _ = build_counter_ssl_model(1)
    model_file.write_text(save_model(model))
    code, out, _ = run(capsys, "extract", "trace", "--logic", "ssl",
                       "--model", str(model_file), "--n", "1")
    assert code == 0
    report = report_dict(out)
    assert report["steps"] == "2"


def test_translate_and_lift_restrict(tmp_path, capsys):
    formula_file = tmp_path / "f.txt"
    from bimodal.red_ssl import gen_counter_ssl, build_counter_ssl_model
    from bimodal.semantics import save_model
    f, _ = gen_counter_ssl(1)
    formula_file.write_text(fm.render(f) + "\n")
    code, out, _ = run(capsys, "translate", "ssl-s4s5",
                       "--formula", str(formula_file))
    assert code == 0
    assert "main-atom" in report_dict(out)

    model_file = tmp_path / "model.txt"
    lifted_file = tmp_path / "lifted.txt"
    model, _ = build_counter_ssl_model(1)
    model_file.write_text(save_model(model))
    code, out, _ = run(capsys, "lift", "--model", str(model_file),
                       "--formula", str(formula_file),
                       "--out", str(lifted_file))
    assert code == 0
    assert report_dict(out)["translated-holds"] == "pass"
    code, out, _ = run(capsys, "restrict", "--model", str(lifted_file),
                       "--formula", str(formula_file))
    assert code == 0
    assert report_dict(out)["formula-holds"] == "pass"


def test_verify_pipeline(capsys, m1_path):
    code, out, _ = run(capsys, "verify", "pipeline", "--atm", m1_path,
                       "--w", "a", "--poly", "2,1")
    assert code == 0
    report = report_dict(out)
    assert report["result"] == "pass"
    assert report["extractions-agree"] == "pass"


def test_missing_file_exits_one(capsys):
    code, _, err = run(capsys, "check", "--model", "/nonexistent",
                       "--formula", "/nonexistent")
    assert code == 1
    assert "error:" in err
