"""Brute-force time-domain classification and critical-parameter bisection.

The oracle never looks at areas or margins: it integrates the trajectory
and asks whether delta left the well. It is the reference the swing
analysis is checked against.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Callable, Optional

from .equilibria import EquilibriumSet, find_equilibria
from .errors import SameVerdictAtEndpoints
from .integrator import Event, EventKind, IntegratorOptions, converged_tolerance, integrate_with_events
from .oscillator import PolynomialOscillator, State, kinetic_energy, potential_energy, total_energy
from .swing import AnalysisOptions, Overall, assess_post_fault


@dataclass(frozen=True)
class OracleVerdict:
    classification: Overall
    first_escape_event: Optional[Event] = None
    critical_parameter: Optional[float] = None


def oracle_classify(
    model: PolynomialOscillator,
    init: State,
    options: Optional[IntegratorOptions] = None,
    swing_horizon: Optional[int] = None,
    equilibria: Optional[EquilibriumSet] = None,
) -> OracleVerdict:
    """Classify by simulation over the whole time horizon.

    Unstable: delta crosses a bounding UEP with kinetic energy above the
    convergence tolerance, or reaches the escape bound. Stable: the
    energy decays below the convergence tolerance, or the horizon ends with
    the state confined and its energy under the lowest barrier (with
    ``a0 >= 0`` energy never increases, so it stays confined). With
    ``swing_horizon`` the observation stops after that many turning points
    and "Stable" means no escape within those swings.
    """
    eq = equilibria or find_equilibria(model)
    e_tol = converged_tolerance(model, eq)
    opts = replace(options or IntegratorOptions(), terminal_uep_cross=False, max_turns=swing_horizon)
    if total_energy(model, init) < e_tol and eq.in_well(init.delta):
        return OracleVerdict(Overall.STABLE)
    traj = integrate_with_events(model, init, opts, equilibria=eq)

    for ev in traj.events:
        if ev.kind is EventKind.UEP_CROSS and kinetic_energy(ev.state.omega) > e_tol:
            return OracleVerdict(Overall.UNSTABLE, ev)
        if ev.kind is EventKind.ESCAPE:
            return OracleVerdict(Overall.UNSTABLE, ev)

    end = traj.termination
    if end.kind is EventKind.CONVERGED:
        return OracleVerdict(Overall.STABLE)
    if end.kind is EventKind.SWING_LIMIT:
        return OracleVerdict(Overall.STABLE)
    barriers = [potential_energy(model, u.location) for u in (eq.left_uep, eq.right_uep) if u]
    lowest = min(barriers) if barriers else math.inf
    if eq.in_well(end.state.delta) and total_energy(model, end.state) < lowest:
        return OracleVerdict(Overall.STABLE)
    return OracleVerdict(Overall.UNDECIDED)


@dataclass(frozen=True)
class CriticalResult:
    c_star: float
    lo: float
    hi: float
    verdict_lo: Overall
    verdict_hi: Overall
    geac_margin: float
    cross_validated: bool


def bisect_critical(
    model: PolynomialOscillator,
    init_family: Callable[[float], State],
    interval: tuple[float, float],
    options: Optional[IntegratorOptions] = None,
    swing_horizon: Optional[int] = None,
    rel_tol: float = 1e-6,
    margin_tol: float = 1e-3,
) -> CriticalResult:
    """Locate the parameter where the oracle verdict flips.

    The GEAC minimum margin at the returned midpoint is computed as a cross
    check; ``cross_validated`` reports whether it lies within ``margin_tol``
    of zero.
    """
    eq = find_equilibria(model)
    lo, hi = float(interval[0]), float(interval[1])
    scale = max(abs(lo), abs(hi), 1e-300)

    def verdict(c):
        return oracle_classify(model, init_family(c), options, swing_horizon, eq).classification

    v_lo, v_hi = verdict(lo), verdict(hi)
    if v_lo is v_hi:
        raise SameVerdictAtEndpoints(f"oracle says {v_lo.value} at both ends of [{lo}, {hi}]")
    while hi - lo > rel_tol * scale:
        mid = 0.5 * (lo + hi)
        if verdict(mid) is v_lo:
            lo = mid
        else:
            hi = mid
    c_star = 0.5 * (lo + hi)

    analysis = AnalysisOptions(
        max_swings=swing_horizon or AnalysisOptions().max_swings,
        integrator=options or IntegratorOptions(),
    )
    report = assess_post_fault(model, init_family(c_star), analysis, equilibria=eq)
    margin = report.min_margin
    return CriticalResult(c_star, lo, hi, v_lo, v_hi, margin, abs(margin) <= margin_tol)
