import math
import time

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conftest import CUBIC, D1, D1_VARIANT, D3, D3_VARIANT, DF1, DF3
from geac.equilibria import Kind, escape_possible, find_equilibria
from geac.errors import DegenerateEquilibrium
from geac.oscillator import PolynomialOscillator, eval_df, eval_f


def test_cubic_roots_and_kinds(cubic):
    eq = find_equilibria(cubic)
    locs = [e.location for e in eq.all]
    assert locs == pytest.approx([D1, 0.0, D3], abs=1e-9)
    assert [e.kind for e in eq.all] == [Kind.UEP, Kind.SEP, Kind.UEP]
    assert eq.sep.location == 0.0
    assert eq.left_uep.location == pytest.approx(-3.0849, abs=1e-4)
    assert eq.right_uep.location == pytest.approx(1.9454, abs=1e-4)
    for e in eq.all:
        assert abs(eval_f(cubic, e.location)) < 1e-12


def test_variant_roots(cubic_variant):
    eq = find_equilibria(cubic_variant)
    assert [e.location for e in eq.all] == pytest.approx([D1_VARIANT, 0.0, D3_VARIANT], abs=1e-9)


def test_linear_oscillator_has_only_sep():
    eq = find_equilibria(PolynomialOscillator(0.0, (1.0,)))
    assert len(eq.all) == 1 and eq.sep.kind is Kind.SEP
    assert eq.left_uep is None and eq.right_uep is None


def test_escape_possible_at_cubic_ueps(cubic):
    eq = find_equilibria(cubic)
    assert eq.right_uep.slope == pytest.approx(DF3, rel=1e-9)
    assert eq.left_uep.slope == pytest.approx(DF1, rel=1e-9)
    assert -eq.right_uep.slope == pytest.approx(0.4320, abs=1e-4)
    assert escape_possible(cubic, eq.right_uep)
    assert escape_possible(cubic, eq.left_uep)


def test_double_root_is_degenerate():
    # f = d (d - 2)^2 / 4: a flat root at 2 that f does not cross
    m = PolynomialOscillator(0.0, (1.0, -1.0, 0.25))
    eq = find_equilibria(m)
    flat = [e for e in eq.all if e.location > 0]
    assert len(flat) == 1 and flat[0].kind is Kind.DEGENERATE
    assert flat[0].location == pytest.approx(2.0, abs=1e-6)
    assert eq.right_uep is None
    with pytest.raises(DegenerateEquilibrium):
        escape_possible(m, flat[0])


def test_triple_root_bounds_the_well():
    # f = -d (d - 1)^3: f changes sign at the flat root, which still acts as a barrier
    m = PolynomialOscillator(0.0, (1.0, -3.0, 3.0, -1.0))
    eq = find_equilibria(m)
    assert eq.right_uep is not None
    assert eq.right_uep.kind is Kind.DEGENERATE
    assert eq.right_uep.location == pytest.approx(1.0, abs=1e-4)


def test_nearest_uep_bounds():
    # roots at 0, 1, 2, 3: slopes -, +, - for 1, 2, 3
    r = (1.0, 2.0, 3.0)
    poly = np.poly1d([1.0, 0.0])
    for x in r:
        poly = poly * np.poly1d([1.0, -x])
    c = poly.coeffs[::-1][1:]
    c = c / c[0]
    m = PolynomialOscillator(0.0, tuple(c))
    eq = find_equilibria(m)
    assert eq.right_uep.location == pytest.approx(1.0, abs=1e-9)
    assert [e.kind for e in eq.all] == [Kind.SEP, Kind.UEP, Kind.SEP, Kind.UEP]


def _model_from_roots(roots, a1=1.0):
    # f(d) = a1 * d * prod(1 - d / r)
    poly = np.poly1d([1.0])
    for r in roots:
        poly = poly * np.poly1d([-1.0 / r, 1.0])
    c = a1 * poly.coeffs[::-1]
    return PolynomialOscillator(0.0, tuple(c))


roots_strategy = st.lists(
    st.floats(0.2, 6.0).map(lambda x: round(x, 3)) | st.floats(-6.0, -0.2).map(lambda x: round(x, 3)),
    min_size=1,
    max_size=5,
    unique=True,
).filter(lambda rs: all(abs(a - b) > 0.05 for i, a in enumerate(rs) for b in rs[i + 1 :]))


@settings(max_examples=80, deadline=None)
@given(roots=roots_strategy, a1=st.floats(0.05, 20))
def test_root_completeness(roots, a1):
    m = _model_from_roots(roots, a1)
    eq = find_equilibria(m)
    found = sorted(e.location for e in eq.all)
    expected = sorted([0.0, *roots])
    assert len(found) == len(expected)
    for f, r in zip(found, expected):
        assert f == pytest.approx(r, rel=1e-9, abs=1e-12)


@settings(max_examples=80, deadline=None)
@given(roots=roots_strategy, a1=st.floats(0.05, 20))
def test_classification_consistency(roots, a1):
    eq = find_equilibria(_model_from_roots(roots, a1))
    kinds = [e.kind for e in eq.all]
    for e in eq.all:
        assert (e.kind is Kind.SEP) == (e.slope > 0)
    # simple roots alternate slope sign
    for a, b in zip(kinds, kinds[1:]):
        assert not (a is Kind.SEP and b is Kind.SEP)
    if eq.right_uep:
        assert eq.right_uep.location == min(e.location for e in eq.all if e.location > 0)
    if eq.left_uep:
        assert eq.left_uep.location == max(e.location for e in eq.all if e.location < 0)
