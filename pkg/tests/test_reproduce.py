import pytest

from geac.reproduce import CASES, REFERENCE, format_study, reference_models, run_study
from geac.swing import Overall


def test_literal_models_all_unstable_first_swing():
    study = run_study(1.0)
    for key in ("smib", "der"):
        for rep in study.reports[key]:
            assert rep.overall is Overall.UNSTABLE
            assert len(rep.records) == 1 and not rep.records[0].swing.direction.is_forward


def test_energy_mismatch_factor():
    from geac.equilibria import find_equilibria
    from geac.oscillator import kinetic_energy, potential_energy

    m = reference_models()["smib"]
    eq = find_equilibria(m)
    barrier = max(potential_energy(m, eq.left_uep.location), potential_energy(m, eq.right_uep.location))
    assert min(kinetic_energy(c.omega) for c in CASES) / barrier > 18


def test_report_has_every_cell():
    text = format_study(run_study(1.0))
    lines = [l for l in text.splitlines() if not l.startswith("#")]
    assert len(lines) == 1 + 2 * 4 * 8
    assert "# kappa = 1.0" in text


def test_reference_table_shape():
    for key in ("smib", "der"):
        assert len(REFERENCE[key]) == 4
        assert all(len(row) == 8 for row in REFERENCE[key])
    assert REFERENCE["smib"][0][0] == 3.6701 and REFERENCE["der"][3][1] == -0.2172


def test_scaled_study_case1_is_stable():
    study = run_study(100.0)
    assert study.reports["smib"][0].overall is Overall.STABLE
    assert study.reports["der"][0].overall is Overall.STABLE
    cell = next(c for c in study.cells if c.model == "smib" and c.case == 1 and c.swing == 1)
    assert cell.delta == pytest.approx(cell.ours - 3.6701)
