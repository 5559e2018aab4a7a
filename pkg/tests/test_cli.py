"""Command-line interface: exit codes, report schemas, file emission."""
import csv
import io
import json
import os

import pytest

from ghostcft.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr().out
    return code, out


def test_residual_bpz_example(capsys):
    code, out = run(
        capsys, "residual", "--op", "bpz", "--ell", "2",
        "--charges", "0.3,0.4,1/2,0.8",
    )
    assert code == 0
    payload = json.loads(out)
    assert isinstance(payload, list) and len(payload) == 2
    for rep in payload:
        assert set(rep) == {"operator", "tolerance", "max_residual", "pass", "samples"}
        assert rep["pass"] is True
        assert rep["max_residual"] < 1e-8


def test_residual_ward_and_kz(capsys):
    code, out = run(
        capsys, "residual", "--op", "ward", "--ell", "1",
        "--charges", "0.3,0.45,0.27,-0.02",
    )
    assert code == 0
    code, out = run(
        capsys, "residual", "--op", "kz-m2", "--ell", "2",
        "--charges", "0.3,0.45,1.25",
    )
    assert code == 0
    payload = json.loads(out)
    assert payload["max_residual"] < 1e-10


def test_scan_emits_csv_columns(capsys, tmp_path):
    out_path = tmp_path / "scan.csv"
    code, _ = run(
        capsys, "scan", "--ell", "2", "--charges", "0.35,0.8",
        "--j4", "0.5001", "--eta-grid", "1e-6,0.5,50",
        "--output", str(out_path),
    )
    assert code == 0
    rows = list(csv.reader(out_path.read_text().splitlines()))
    assert rows[0] == [
        "eta_re", "eta_im", "block1_re", "block1_im", "block2_re", "block2_im",
    ]
    assert len(rows) == 51
    # near-log growth: (block1-block2)/(eta * eps) ~ log(eta) at j4 = 1/2+eps
    first = rows[1]
    eta0, b1, b2 = float(first[0]), float(first[2]), float(first[4])
    import math

    ratio = (b1 - b2) / (eta0 * 1e-4)
    assert abs(ratio - math.log(eta0)) < 0.1 * abs(math.log(eta0))


def test_scan_log_regime_exact_half(capsys, tmp_path):
    out_path = tmp_path / "scan_log.csv"
    code, _ = run(
        capsys, "scan", "--ell", "2", "--charges", "0.35,0.8",
        "--j4", "1/2", "--eta-grid", "1e-5,0.4,20",
        "--output", str(out_path),
    )
    assert code == 0
    rows = list(csv.reader(out_path.read_text().splitlines()))
    assert len(rows) == 21


def test_recurse_exact_output(capsys):
    code, out = run(
        capsys, "recurse", "--ell", "1", "--charges", "3/10,2/5,1/2,-1/5",
        "--k", "3",
    )
    assert code == 0
    payload = json.loads(out)
    assert payload["exact"] is True
    assert payload["block"] == "(1)*e^(7/2)*(1-e)^(0)"
    assert payload["final_charges"][2] == "7/2"


def test_identity_check_passes(capsys):
    code, out = run(capsys, "identity-check", "--k", "4", "--draws", "8")
    assert code == 0
    payload = json.loads(out)
    assert payload["pass"] is True
    assert any("blocksum_k" in row for row in payload["rows"])


def test_eval_selection(capsys):
    code, out = run(
        capsys, "eval", "--op", "selection", "--ell", "5",
        "--charges", "0.1,0.2,0.3,4.4",
    )
    assert code == 0
    payload = json.loads(out)
    assert payload["zero"] is True and payload["reason"] == "ell-window"


def test_eval_two_point(capsys):
    code, out = run(
        capsys, "eval", "--op", "two-point", "--ell", "1",
        "--charges", "1/2,1/2", "--w1", "4", "--w2", "0",
    )
    assert code == 0
    payload = json.loads(out)
    assert abs(complex(payload["value"]) - 2) < 1e-12


def test_modealg_verify(capsys):
    code, out = run(
        capsys, "modealg-verify", "--level", "3", "--states", "3",
        "--index-range", "2",
    )
    assert code == 0
    payload = json.loads(out)
    assert payload["pass"] is True
    assert payload["results"]["null_vector"]["vanishes_on_charge_half"] is True


def test_usage_error_exit_code(capsys):
    with pytest.raises(SystemExit) as err:
        main(["residual", "--op", "nonsense", "--charges", "1"])
    assert err.value.code == 2


def test_configuration_error_exit_code(capsys):
    # 4-point kz family needs flow 1
    code = main(["residual", "--op", "kz-m2", "--ell", "2",
                 "--charges", "0.3,0.4,0.5,0.8"])
    assert code == 2


def test_atomic_output_file(capsys, tmp_path):
    out_path = tmp_path / "report.json"
    code, _ = run(
        capsys, "residual", "--op", "kz-m2", "--charges", "0.37,0.63",
        "--output", str(out_path),
    )
    assert code == 0
    assert out_path.exists()
    assert not (tmp_path / "report.json.tmp").exists()
    payload = json.loads(out_path.read_text())
    assert payload["pass"] is True


def test_deterministic_outputs_for_fixed_seed(capsys):
    code1, out1 = run(
        capsys, "residual", "--op", "bpz", "--ell", "2",
        "--charges", "0.3,0.4,1/2,0.8", "--seed", "7",
    )
    code2, out2 = run(
        capsys, "residual", "--op", "bpz", "--ell", "2",
        "--charges", "0.3,0.4,1/2,0.8", "--seed", "7",
    )
    assert (code1, out1) == (code2, out2)
