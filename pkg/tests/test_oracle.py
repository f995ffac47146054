import math

import pytest

from conftest import CUBIC, V1, V3
from geac.errors import SameVerdictAtEndpoints
from geac.integrator import EventKind
from geac.oracle import bisect_critical, oracle_classify
from geac.oscillator import PolynomialOscillator, State
from geac.swing import Overall


def test_small_energy_is_stable(cubic):
    assert oracle_classify(cubic, State(0, 0.13, 0.0)).classification is Overall.STABLE


def test_backward_excess_energy_is_unstable(cubic_undamped):
    w0 = -math.sqrt(2 * V1) * 1.01
    v = oracle_classify(cubic_undamped, State(0, 0, w0))
    assert v.classification is Overall.UNSTABLE
    assert v.first_escape_event is not None
    assert v.first_escape_event.kind is EventKind.UEP_CROSS
    assert v.first_escape_event.state.delta < 0


def test_sep_is_stable(cubic):
    v = oracle_classify(cubic, State(0, 0, 0))
    assert v.classification is Overall.STABLE and v.first_escape_event is None


def test_unstable_always_has_event(cubic_undamped):
    for w0 in (-1.3, -1.0, 0.7, 0.9):
        v = oracle_classify(cubic_undamped, State(0, 0.0, w0))
        if v.classification is Overall.UNSTABLE:
            assert v.first_escape_event is not None


def test_bisect_backward_barrier(cubic_undamped):
    res = bisect_critical(cubic_undamped, lambda c: State(0, 0, -c), (1.0, 1.5), swing_horizon=1)
    assert res.c_star == pytest.approx(math.sqrt(2 * V1), abs=1e-5)
    assert res.cross_validated and abs(res.geac_margin) <= 1e-3
    assert (res.verdict_lo, res.verdict_hi) == (Overall.STABLE, Overall.UNSTABLE)


def test_bisect_forward_barrier(cubic_undamped):
    res = bisect_critical(cubic_undamped, lambda c: State(0, 0, c), (0.5, 0.8))
    assert res.c_star == pytest.approx(math.sqrt(2 * V3), abs=1e-5)
    assert res.cross_validated


def test_same_verdict_at_endpoints(cubic_undamped):
    with pytest.raises(SameVerdictAtEndpoints):
        bisect_critical(cubic_undamped, lambda c: State(0, 0, c), (0.1, 0.3))


def test_corpus_agreement():
    from pathlib import Path

    from geac.scenario import load_scenario
    from geac.swing import assess_post_fault

    for path in sorted((Path(__file__).parent.parent / "scenarios").glob("*.json")):
        sc = load_scenario(path)
        geac = assess_post_fault(sc.model, sc.init, sc.analysis).overall
        oracle = oracle_classify(sc.model, sc.init, sc.analysis.integrator).classification
        assert geac is oracle, path.name
