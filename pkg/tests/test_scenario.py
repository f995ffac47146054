import json
import math

import pytest

from geac.errors import ParseError, ScenarioValidationError
from geac.scenario import load_scenario, scenario_from_dict

CASE1 = {
    "name": "case1",
    "model": {"polynomial": {"damping": 4.42e-4, "coeffs": [0.2649, -0.0503, -0.04414]}},
    "start": {"initial_state": {"delta": 0.13, "omega": -5.2779}},
}


def _write(tmp_path, doc, name="s.json"):
    p = tmp_path / name
    p.write_text(doc if isinstance(doc, str) else json.dumps(doc, indent=2))
    return p


def test_polynomial_case(tmp_path):
    sc = load_scenario(_write(tmp_path, CASE1))
    assert sc.name == "case1"
    assert sc.model.a0 == 4.42e-4
    assert sc.model.coeffs == (0.2649, -0.0503, -0.04414)
    assert (sc.init.delta, sc.init.omega) == (0.13, -5.2779)
    assert sc.analysis.max_swings == 50


def test_options_are_carried(tmp_path):
    doc = dict(CASE1, integrator={"rtol": 1e-8, "max_time": 50}, analysis={"max_swings": 8})
    sc = load_scenario(_write(tmp_path, doc))
    assert sc.analysis.integrator.rtol == 1e-8 and sc.analysis.integrator.max_time == 50
    assert sc.analysis.max_swings == 8


def test_smib_pm_above_pmax_rejected(tmp_path):
    doc = {
        "model": {"smib": {"H": 5, "omega_s": 377, "Pm": 1.6, "Pmax": 1.5}},
        "start": {"initial_state": {"delta": 0.1, "omega": 0.0}},
    }
    with pytest.raises(ScenarioValidationError, match="Pm"):
        load_scenario(_write(tmp_path, doc))


def test_two_models_rejected(tmp_path):
    doc = dict(CASE1)
    doc["model"] = dict(CASE1["model"], smib={"H": 5, "omega_s": 377, "Pm": 1.0, "Pmax": 1.5})
    with pytest.raises(ScenarioValidationError, match="exactly one"):
        load_scenario(_write(tmp_path, doc))


def test_unknown_field_rejected(tmp_path):
    doc = dict(CASE1, colour="blue")
    with pytest.raises(ScenarioValidationError, match="colour"):
        load_scenario(_write(tmp_path, doc))


def test_model_invariant_reported(tmp_path):
    doc = dict(CASE1, model={"polynomial": {"damping": 0.0, "coeffs": [-1.0, 0.5]}})
    with pytest.raises(ScenarioValidationError, match="a1"):
        load_scenario(_write(tmp_path, doc))


def test_parse_error_has_position(tmp_path):
    p = _write(tmp_path, '{\n  "name": "x",\n  "model": oops\n}')
    with pytest.raises(ParseError) as exc:
        load_scenario(p)
    assert exc.value.line == 3 and exc.value.column is not None
    assert f"{p}:3:" in str(exc.value)


def test_missing_file(tmp_path):
    with pytest.raises(ParseError):
        load_scenario(tmp_path / "nope.json")


def test_fault_timeline_needs_smib():
    doc = dict(CASE1, start={"fault": {"tc": 0.2, "pmax_pre": 2.0, "pmax_fault": 0.8}})
    with pytest.raises(ScenarioValidationError, match="smib"):
        scenario_from_dict(doc)


def test_fault_timeline_maps_to_taylor_coordinates():
    doc = {
        "model": {"smib": {"H": 5.0, "omega_s": 2 * math.pi * 60, "Pm": 1.0, "Pmax": 1.5, "order": 5}},
        "start": {"fault": {"t0": 0.0, "tc": 0.2, "pmax_pre": 2.0, "pmax_fault": 0.8}},
    }
    sc = scenario_from_dict(doc)
    assert sc.model.order == 5
    # clearing angle minus the post-fault SEP
    assert sc.init.delta + math.asin(1 / 1.5) > math.asin(0.5)
    assert sc.init.omega > 0


def test_shipped_corpus_loads():
    from pathlib import Path

    files = sorted((Path(__file__).parent.parent / "scenarios").glob("*.json"))
    assert files
    for f in files:
        load_scenario(f)
