import csv
import io
from importlib import resources

import pytest
import yaml

from crgc.cli import main

EXAMPLE3 = str(resources.files("crgc").joinpath("data/example3.scenario"))


def run_cli(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_tradeoff_two_points(capsys):
    code, out, _ = run_cli(capsys, "tradeoff", "--n", "14", "--k", "6", "--d", "10",
                           "--t", "3", "--B", "18", "--points", "2")
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    assert [(r["gamma"], r["alpha"], r["regime"]) for r in rows] == [
        ("90/7", "3", "MS"), ("180/17", "60/17", "MB")]


def test_tradeoff_float_and_text(capsys):
    code, out, _ = run_cli(capsys, "tradeoff", "--n", "7", "--k", "4", "--d", "5", "--t", "2",
                           "--B", "12", "--points", "3", "--float", "--format", "text")
    assert code == 0
    doc = yaml.safe_load(out)
    assert len(doc) == 3 and doc[0]["gamma_float"] == "10"


def test_tradeoff_bad_points(capsys):
    code, _, err = run_cli(capsys, "tradeoff", "--n", "14", "--k", "6", "--d", "10",
                           "--t", "3", "--B", "18", "--points", "1")
    assert code == 2 and "--points" in err


def test_invalid_params_exit_2(capsys):
    code, _, err = run_cli(capsys, "tradeoff", "--n", "5", "--k", "6", "--d", "10", "--B", "1")
    assert code == 2 and "error" in err


@pytest.mark.parametrize("alpha,expected", [("2", "12"), ("3", "16"), ("4", "17")])
def test_capacity_k6_regimes(capsys, alpha, expected):
    code, out, _ = run_cli(capsys, "capacity", "--n", "14", "--k", "6", "--d", "10", "--t", "3",
                           "--alpha", alpha, "--beta", "1", "--brute")
    doc = yaml.safe_load(out)
    assert code == 0 and doc["capacity"] == expected and doc["agree"] is True


def test_capacity_k7(capsys):
    code, out, _ = run_cli(capsys, "capacity", "--n", "14", "--k", "7", "--d", "10", "--t", "3",
                           "--alpha", "2", "--beta", "1")
    assert code == 0 and yaml.safe_load(out)["capacity"] == "14"


def test_capacity_rejects_nonpositive(capsys):
    code, _, _ = run_cli(capsys, "capacity", "--n", "14", "--k", "7", "--d", "10", "--t", "3",
                         "--alpha", "0", "--beta", "1")
    assert code == 2


def test_compare(capsys):
    code, out, _ = run_cli(capsys, "compare", "--n", "7", "--k", "4", "--d", "5", "--t", "2",
                           "--B", "12")
    rows = {r["mechanism"]: r for r in csv.DictReader(io.StringIO(out))}
    assert code == 0
    assert rows["concurrent MS"]["gamma"] == "10" and rows["concurrent MS"]["links"] == "5"
    assert rows["MFR"]["gamma"] == "27/2"


def test_simulate_bundled(capsys, tmp_path):
    out_file = tmp_path / "report.yaml"
    code, _, _ = run_cli(capsys, "simulate", EXAMPLE3, "--out", str(out_file))
    doc = yaml.safe_load(out_file.read_text())
    assert code == 0
    assert [l["helper_to_engine"] for l in doc["ledger"]] == [10, 6, 10]


def test_simulate_seed_override(capsys):
    _, out_a, _ = run_cli(capsys, "simulate", EXAMPLE3)
    _, out_b, _ = run_cli(capsys, "simulate", EXAMPLE3, "--seed", "3")
    a, b = yaml.safe_load(out_a), yaml.safe_load(out_b)
    assert a["digest"] != b["digest"] and a["ledger"] == b["ledger"]


def test_simulate_corrupted_file(capsys, tmp_path):
    bad = tmp_path / "bad.scenario"
    bad.write_text("schema: 1\nparams: {B: 12, n: 7\n")
    code, _, err = run_cli(capsys, "simulate", str(bad))
    assert code == 2 and "line 3" in err


def test_simulate_missing_file(capsys, tmp_path):
    code, _, _ = run_cli(capsys, "simulate", str(tmp_path / "nope"))
    assert code == 2


def test_simulate_abort_exit_1(capsys, tmp_path):
    f = tmp_path / "abort.scenario"
    f.write_text("schema: 1\nparams: {B: 12, n: 7, k: 4, d: 5, t: 2}\n"
                 "events:\n  - fail: [1, 2, 3, 4, 5]\n  - repair: {helpers: [6, 7]}\n")
    code, out, err = run_cli(capsys, "simulate", str(f))
    assert code == 1 and "aborted" in err
    assert yaml.safe_load(out)["status"] == "aborted"


def test_verify_command(capsys):
    code, out, _ = run_cli(capsys, "verify-paper")
    assert code == 0
    assert "[FAIL]" not in out
    assert "44 compositions" in out and "matrix A" in out and "12.8%" in out
