import csv
import io
import json
import subprocess
import sys

import pytest

from halfspace.cli import EXIT_CRITERION, EXIT_OK, EXIT_USAGE, main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def rows(text):
    return list(csv.DictReader(io.StringIO(text)))


def test_constants_dim5(capsys):
    code, out, _ = run(capsys, "constants", "--dim", "5")
    assert code == EXIT_OK
    r = {x["quantity"]: x for x in rows(out)}
    assert float(r["K1-K2-K3"]["rel_delta"]) < 1e-6
    assert r["gamma_hat_N"]["passed"] == "true"


def test_constants_dim7_alpha_hat(capsys):
    code, out, _ = run(capsys, "constants", "--dim", "7", "--format", "json")
    rec = {x["quantity"]: x for x in json.loads(out)}["alpha_hat_N"]
    assert rec["alt_value"] == pytest.approx(0.753624, abs=1e-6)
    assert rec["rel_delta"] < 1e-6


@pytest.mark.parametrize("argv", [
    ["constants", "--dim", "2"],
    ["thresholds", "--dim-range", "4..3"],
    ["thresholds", "--dim-range", "2..5"],
    ["region", "--dim", "4", "--a", "1", "--q", "3", "--lambda-range", "0:1:0.5", "--mu-range", "0:1:0.5"],
    ["region", "--dim", "4", "--a", "1", "--q", "2.5", "--lambda-range", "0:1:0.3", "--mu-range", "0:1:0.5"],
    ["eigen", "--dim", "4", "--basis-size", "0"],
    ["fiber", "--dim", "4", "--a", "2", "--lambda", "1"],
    ["nonsense"],
])
def test_usage_errors(capsys, argv):
    with pytest.raises(SystemExit) as exc:
        code = main(argv)
        raise SystemExit(code)
    assert exc.value.code == EXIT_USAGE


def test_thresholds(capsys):
    code, out, _ = run(capsys, "thresholds", "--dim-range", "3..7")
    assert code == EXIT_OK
    r = rows(out)
    assert float(r[0]["lambda_bar"]) == pytest.approx(1.3090170, abs=1e-7)
    assert float(r[1]["lambda_bar"]) == 1.0 == float(r[1]["lambda_hat"])
    for x in r[2:]:
        assert float(x["lower_bound"]) < float(x["lambda_star"]) < float(x["upper_bound"])
        assert x["all_satisfied"] == "true"


def test_asymptotics_n5_P(capsys):
    code, out, _ = run(capsys, "asymptotics", "--dim", "5", "--family", "u", "--quantity", "P")
    fit = [x for x in rows(out) if x["item"].startswith("fit")][0]
    assert code == EXIT_OK and fit["passed"] == "true"
    assert float(fit["rel_dev"]) < 0.05


def test_asymptotics_n3_bounds(capsys):
    code, out, _ = run(capsys, "asymptotics", "--dim", "3", "--family", "v", "--quantity", "E")
    items = {x["item"] for x in rows(out)}
    assert {"E<upper_bound", "P>=lower_bound", "d1", "d2"} <= items
    assert code == EXIT_OK


def test_fiber_a0_n7(capsys):
    code, out, _ = run(capsys, "fiber", "--dim", "7", "--a", "0", "--lambda", "2.2", "--mu", "0", "--q", "2")
    r = rows(out)
    assert code == EXIT_OK
    assert all(x["passes"] == "true" for x in r)


def test_fiber_reports_failure_with_exit_zero(capsys):
    code, out, _ = run(capsys, "fiber", "--dim", "6", "--a", "1", "--lambda", "1.5", "--eps", "0.05,0.02")
    assert code == EXIT_OK
    assert rows(out)[-1]["passes"] == "false"


def test_eigen(capsys):
    code, out, _ = run(capsys, "eigen", "--dim", "4", "--basis-size", "8")
    r = rows(out)
    assert code == EXIT_OK
    assert float(r[0]["value"]) == pytest.approx(2.0, abs=1e-8)
    vals = [float(x["value"]) for x in r[1:]]
    assert len(vals) == 8 and all(b <= a for a, b in zip(vals, vals[1:]))


REGION = ["region", "--dim", "4", "--a", "1", "--q", "2.5", "--lambda-range", "0:2.5:0.1",
          "--mu-range", "0:1:0.1", "--mu1-lower", "0", "--mu1-upper", "1"]


def test_region_csv_deterministic(capsys):
    _, first, _ = run(capsys, *REGION)
    _, second, _ = run(capsys, *REGION, "--threads", "3")
    assert first == second
    r = rows(first)
    assert len(r) == 26 * 11
    assert list(r[0]) == ["N", "a", "q", "lambda", "mu", "verdict", "clause"]


def test_region_negative_mu_range(capsys):
    code, out, _ = run(
        capsys, "region", "--dim", "4", "--a", "1", "--q", "2.5",
        "--lambda-range", "0:4:0.5", "--mu-range", "-1:1:0.5",
    )
    assert code == EXIT_OK
    mus = sorted({float(r["mu"]) for r in rows(out)})
    assert mus == [-1.0, -0.5, 0.0, 0.5, 1.0]
    axis = [r for r in rows(out) if float(r["mu"]) < 0 and float(r["lambda"]) <= 1.0]
    assert axis and all(r["verdict"] == "NoPositive" for r in axis)


def test_region_out_file(tmp_path, capsys):
    path = tmp_path / "grid.json"
    code, out, _ = run(capsys, *REGION, "--format", "json", "--out", str(path))
    assert code == EXIT_OK and out == ""
    data = json.loads(path.read_text())
    assert len(data) == 286 and set(data[0]) == {"N", "a", "q", "lambda", "mu", "verdict", "clause"}


def test_same_fields_in_both_formats(capsys):
    _, c, _ = run(capsys, "eigen", "--dim", "3", "--basis-size", "2")
    _, j, _ = run(capsys, "eigen", "--dim", "3", "--basis-size", "2", "--format", "json")
    assert list(rows(c)[0]) == list(json.loads(j)[0])


def test_env_tolerance(monkeypatch, capsys):
    monkeypatch.setenv("HALFSPACE_TOL_REL", "1e-9")
    code, out, _ = run(capsys, "constants", "--dim", "4")
    assert code == EXIT_OK
    monkeypatch.setenv("HALFSPACE_TOL_REL", "-3")
    code, _, err = run(capsys, "constants", "--dim", "4")
    assert code == EXIT_USAGE and "HALFSPACE_TOL_REL" in err


def test_quadrature_failure_exit_code(capsys):
    code, _, err = run(capsys, "constants", "--dim", "9", "--tol-rel", "1e-15", "--tol-abs", "1e-300")
    assert code == 3, err


def test_verify_all_subset(capsys):
    code, out, err = run(capsys, "verify-all", "--criteria", "1,2,5")
    summary = [x for x in rows(out) if x["check"] == "(all)"]
    assert [x["criterion"] for x in summary] == ["1", "2", "5"]
    assert code == EXIT_OK
    assert "criterion  1 PASS" in err


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "halfspace", "thresholds", "--dim-range", "5..5"],
                         capture_output=True, text=True)
    assert res.returncode == 0
    assert res.stdout.startswith("N,lambda_bar")


def test_criterion_exit_code(capsys):
    code, _, _ = run(capsys, "verify-all", "--criteria", "9")
    assert code == EXIT_CRITERION
