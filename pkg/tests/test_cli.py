import json
from pathlib import Path

import numpy as np
import pytest

from geac.cli import main

CORPUS = Path(__file__).parent.parent / "scenarios"


def test_assess_table(capsys):
    assert main(["assess", "--scenario", str(CORPUS / "smib_cubic_desk2.json")]) == 0
    out = capsys.readouterr().out.splitlines()
    assert out[0] == "swing_index,direction,a_acc,a_dec,a_sur,margin,verdict"
    assert len(out) == 9


def test_assess_fail_on_unstable(capsys):
    args = ["assess", "--scenario", str(CORPUS / "smib_cubic_case1.json")]
    assert main(args) == 0
    assert main(args + ["--fail-on-unstable"]) == 1


def test_kappa_override(capsys):
    args = ["assess", "--scenario", str(CORPUS / "smib_cubic_case1.json"), "--kappa", "100", "--max-swings", "4"]
    assert main(args + ["--fail-on-unstable"]) == 0


def test_input_error_exit_code(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text('{"model": 1}')
    assert main(["assess", "--scenario", str(bad)]) == 2
    assert main(["assess", "--scenario", str(tmp_path / "missing.json")]) == 2
    assert main(["assess", "--scenario", str(CORPUS / "smib_cubic_desk1.json"), "--rtol", "-1"]) == 2


def test_critical_command(tmp_path, capsys):
    doc = {
        "model": {"polynomial": {"damping": 0.0, "coeffs": [0.2649, -0.0503, -0.04414]}},
        "start": {"initial_state": {"delta": 0.0, "omega": -1.0}},
    }
    p = tmp_path / "c.json"
    p.write_text(json.dumps(doc))
    rc = main(["critical", "--scenario", str(p), "--interval", "1.0", "1.5", "--swing-horizon", "1"])
    assert rc == 0
    assert "c_star 1.22744" in capsys.readouterr().out


def test_structured_output_files(tmp_path, capsys):
    prefix = tmp_path / "o" / "run"
    rc = main(["assess", "--scenario", str(CORPUS / "smib_cubic_desk1.json"), "--format", "structured",
               "--out", str(prefix)])
    assert rc == 0
    doc = json.loads((tmp_path / "o" / "run.json").read_text())
    assert doc["overall"] == "Stable" and len(doc["records"]) == 8
    assert (tmp_path / "o" / "run_trajectory.dat").exists()


def test_batch_command(tmp_path, capsys):
    files = [str(p) for p in sorted(CORPUS.glob("smib_cubic_desk*.json"))]
    assert main(["batch", *files, "--out", str(tmp_path / "b"), "--parallel", "2"]) == 0
    assert len(list(tmp_path.glob("b-*.csv"))) == 4
    bad = tmp_path / "bad.json"
    bad.write_text("[")
    assert main(["batch", files[0], str(bad)]) == 2


def test_oracle_command(capsys):
    assert main(["oracle", "--scenario", str(CORPUS / "smib_cubic_desk1.json")]) == 0
    assert capsys.readouterr().out.startswith("Stable")
    assert main(["oracle", "--scenario", str(CORPUS / "smib_cubic_case4.json"), "--fail-on-unstable"]) == 1


def test_eac_classical_command(capsys):
    rc = main(["eac-classical", "--Pm", "1", "--pmax-pre", "2", "--pmax-fault", "0.8", "--pmax-post", "1.5",
               "--delta-c", "1.0"])
    assert rc == 0
    out = dict(line.split() for line in capsys.readouterr().out.splitlines())
    assert float(out["critical_angle"]) == pytest.approx(1.4600, abs=1e-4)
    assert abs(float(out["geac_margin_N9"]) - float(out["margin"])) < 5e-2


def test_eac_classical_domain_error(capsys):
    rc = main(["eac-classical", "--Pm", "1", "--pmax-pre", "2", "--pmax-fault", "0.8", "--pmax-post", "1.5",
               "--delta-c", "3.0"])
    assert rc == 2


def test_reproduce_command(tmp_path, capsys):
    assert main(["reproduce-paper", "--kappa", "1", "--out", str(tmp_path / "r")]) == 0
    text = (tmp_path / "r_reproduction.csv").read_text()
    assert text.startswith("model,case,swing,direction,reference,ours,delta")
    assert "smib,1,1,B,3.6701" in text


def test_vector_field_command(tmp_path, capsys):
    assert main(["vector-field", "--out", str(tmp_path / "v")]) == 0
    assert np.loadtxt(tmp_path / "v_field.dat").shape == (625, 4)


def test_usage_error_exit_code(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["assess"])
    assert exc.value.code == 2


def test_numerical_failure_exit_code(monkeypatch, capsys):
    import geac.cli
    from geac.errors import StepSizeUnderflow

    def boom(*a, **k):
        raise StepSizeUnderflow("step size underflow")

    monkeypatch.setattr(geac.cli, "assess_post_fault", boom)
    assert main(["assess", "--scenario", str(CORPUS / "smib_cubic_desk1.json")]) == 3
