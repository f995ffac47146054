import math

import numpy as np
import pytest

from conftest import CUBIC
from geac.errors import ModelMissing, NonMonotoneTime
from geac.integrator import IntegratorOptions, integrate_with_events, interpolate_state
from geac.online import OnlineAssessor, push_sample
from geac.oscillator import PolynomialOscillator, State
from geac.swing import AnalysisOptions, Verdict, assess_post_fault


def _stream(model, init, rate, n_swings):
    opts = AnalysisOptions(max_swings=n_swings)
    offline = assess_post_fault(model, init, opts)
    end = offline.records[-1].swing.end.state.t
    tr = integrate_with_events(model, init, IntegratorOptions(max_time=end + 0.5))
    ts = np.arange(0.0, tr.t[-1], 1.0 / rate)
    online = OnlineAssessor(model)
    out = []
    for t in ts:
        s = interpolate_state(tr, float(t))
        rec = online.push_sample(s.t, s.delta, s.omega)
        if rec is not None:
            out.append(rec)
    return offline.records, out


def _worst_rel(offline, online):
    n = min(len(offline), len(online))
    return max(abs(a.margin - b.margin) / abs(a.margin) for a, b in zip(offline[:n], online[:n]))


def test_online_matches_offline_at_100hz(cubic):
    offline, online = _stream(cubic, State(0, 0.13, -0.5), 100.0, 6)
    assert len(online) >= 6
    for a, b in zip(offline, online):
        assert a.swing.direction is b.swing.direction
        assert b.margin == pytest.approx(a.margin, rel=1e-3)


def test_online_error_shrinks_with_rate(cubic):
    errs = [_worst_rel(*_stream(cubic, State(0, 0.13, -0.5), r, 4)) for r in (5.0, 20.0, 100.0)]
    assert errs[2] < errs[0]
    assert errs[2] <= errs[1] * 1.01


def test_sep_stream_emits_nothing(cubic):
    a = OnlineAssessor(cubic)
    assert all(a.push_sample(0.01 * i, 0.0, 0.0) is None for i in range(200))
    assert a.records == []


def test_crossing_is_interpolated(cubic):
    a = OnlineAssessor(cubic)
    d3 = a.equilibria.right_uep.location
    push_sample(a, 0.0, 1.8, 0.8)
    rec = push_sample(a, 0.1, 2.0, 0.7)
    assert rec is not None and rec.verdict is Verdict.UNSTABLE
    x = rec.swing.end.state
    frac = (d3 - 1.8) / 0.2
    assert x.delta == d3
    assert x.omega == pytest.approx(0.8 - 0.1 * frac, rel=1e-12)
    assert x.t == pytest.approx(0.1 * frac, rel=1e-12)
    assert a.finished and push_sample(a, 0.2, 2.1, 0.6) is None


def test_errors(cubic):
    with pytest.raises(ModelMissing):
        OnlineAssessor(None).push_sample(0.0, 0.1, 0.0)
    a = OnlineAssessor(cubic)
    a.push_sample(1.0, 0.1, 0.0)
    with pytest.raises(NonMonotoneTime):
        a.push_sample(1.0, 0.1, 0.0)
