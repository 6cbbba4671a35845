import csv
import io
import json
import subprocess
import sys

import pytest

from arakelov_pn.cli import main


def run(argv, capsys):
    code = main(argv)
    out, err = capsys.readouterr()
    return code, out, err


def run_json(argv, capsys):
    code, out, _ = run(argv, capsys)
    assert code == 0
    doc = json.loads(out)
    assert doc["schema"] == 1
    return doc


def test_classify(capsys):
    doc = run_json(["classify", "--a", "2,2"], capsys)
    assert doc["ample"] is True and doc["label"] == "Ample" and doc["a"] == ["2/1", "2/1"]


def test_decimals_parse_exactly(capsys):
    doc = run_json(["classify", "--a", "0.3,0.7"], capsys)
    assert doc["label"] == "PseudoEffectiveNotBig" and doc["a"] == ["3/10", "7/10"]


def test_volume_and_degree(capsys):
    doc = run_json(["volume", "--a", "2,2"], capsys)
    assert doc["value"] == pytest.approx(0.5 + 0.6931471805599453, abs=1e-8)
    assert set(doc) >= {"a", "value", "tol", "method"}
    doc = run_json(["degree", "--a", "1,1", "--tol", "1e-10"], capsys)
    assert doc["value"] == pytest.approx(0.5, abs=1e-9) and doc["tol"] == 1e-10


def test_monte_carlo_seed(capsys):
    code, _, err = run(["volume", "--a", "1,1,1,1"], capsys)
    assert code == 2 and "seed" in err
    doc = run_json(["volume", "--a", "1,1,1,1", "--seed", "3"], capsys)
    assert doc["method"] == "monte-carlo" and doc["seed"] == 3


def test_zariski_domain_error(capsys):
    code, out, err = run(["zariski", "--a", "0.4,0.4"], capsys)
    assert code == 2 and out == "" and "NotPseudoEffective" in err


def test_zariski_json_and_csv(capsys):
    doc = run_json(["zariski", "--a0", "2", "--a1", "1/2"], capsys)
    assert doc["theta"] == pytest.approx(0.829464339149698951, abs=1e-12)
    assert doc["mu"][1] == pytest.approx(0.0, abs=1e-12)
    code, out, _ = run(["zariski", "--a", "1,1", "--samples", "50", "--format", "csv"], capsys)
    rows = list(csv.reader(io.StringIO(out)))
    assert code == 0 and rows[0] == ["r", "g_a", "p_a", "negative"] and len(rows) == 51


def test_zariski_needs_coefficients(capsys):
    code, _, _ = run(["zariski", "--a0", "2"], capsys)
    assert code == 1


def test_fujita(capsys):
    doc = run_json(["fujita", "--a", "1,1", "--epsilon", "0.05", "--delta"], capsys)
    assert doc["integral"] > 0.45 and doc["delta"] >= 2**-20
    assert all(isinstance(c, str) for p in doc["points"] for c in p)


def test_sections_and_count(capsys):
    doc = run_json(["sections", "--a", "1,1", "--l", "1"], capsys)
    assert len(doc["sections"]) == 5 and doc["h0_nonzero"] is True
    doc = run_json(["count", "--a", "1,1", "--l", "1", "--mode", "exact", "--domain", "full"], capsys)
    assert doc["records"][0]["count"] == "9"
    code, out, _ = run(["count", "--a", "2,2", "--l", "50,100", "--format", "csv"], capsys)
    rows = list(csv.reader(io.StringIO(out)))
    assert code == 0 and rows[0][0] == "l" and [r[0] for r in rows[1:]] == ["50", "100"]


def test_chi(capsys):
    doc = run_json(["chi", "--a", "1,1", "--l", "1,2"], capsys)
    assert [r["l"] for r in doc["records"]] == [1, 2]


def test_geography_csv(capsys, tmp_path):
    out_file = tmp_path / "geo.csv"
    code, out, _ = run(["geography", "--resolution", "8", "--out", str(out_file)], capsys)
    assert code == 0 and out == ""
    rows = list(csv.reader(out_file.open()))
    assert rows[0] == ["a0", "a1", "ample", "nef", "big", "pseudo_effective", "label"]
    assert len(rows) == 65


def test_theta_and_construct(capsys):
    code, out, _ = run(["theta", "--a", "2,1/2", "--samples", "11"], capsys)
    assert code == 0 and out.splitlines()[0] == "x,phi_tilde"
    doc = run_json(["construct", "--n", "1", "--l", "2"], capsys)
    num, den = map(int, doc["total"].split("/"))
    assert num > den


def test_output_options_before_or_after_subcommand(capsys):
    a = run(["--format", "csv", "classify", "--a", "2,2"], capsys)
    b = run(["classify", "--a", "2,2", "--format", "csv"], capsys)
    assert a == b and a[0] == 0


@pytest.mark.parametrize(
    "argv",
    [["classify", "--a", "x,2"], ["classify"], ["nosuch"], ["volume", "--a", "1,1", "--tol", "-1"], []],
)
def test_parse_errors_exit_one(argv, capsys):
    assert run(argv, capsys)[0] == 1


def test_budget_error_exit_three(capsys):
    code, _, err = run(["sections", "--a", "1,1", "--l", "20"], capsys)
    assert code == 3 and "BudgetExceeded" in err
    code, _, _ = run(["count", "--a", "1,1", "--l", "9", "--mode", "exact", "--domain", "full"], capsys)
    assert code == 3


def test_output_is_deterministic(capsys):
    for argv in (["fujita", "--a", "2,2", "--epsilon", "0.1"], ["volume", "--a", "1,1,1,1", "--seed", "9"]):
        first = run(argv, capsys)
        second = run(argv, capsys)
        assert first == second


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "arakelov_pn", "classify", "--a", "1/2,1/2"], capture_output=True, text=True, check=False
    )
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["label"] == "PseudoEffectiveNotBig"
