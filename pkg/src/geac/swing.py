"""Swing-by-swing stability assessment with equal-area margins.

A swing is the motion between two consecutive turning points. Each swing is
scored against the UEP that bounds the well in its direction of motion:

* turns back at ``delta_r`` before the UEP: stable,
  ``margin = (V(uep) - V(delta_r)) / A_acc``
* crosses the UEP with residual speed ``omega_x``: unstable,
  ``margin = -(omega_x**2 / 2) / A_acc``

``A_acc`` is the kinetic energy the swing has to shed: the peak kinetic
energy inside the swing, or for the first swing the kinetic energy at
fault clearance.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field, replace
from typing import Optional

from .equilibria import EquilibriumSet, escape_possible, find_equilibria
from .errors import DegenerateEquilibrium, InvalidOptions, UnresolvedSwing
from .integrator import (
    BACKWARD,
    FORWARD,
    Event,
    EventKind,
    IntegratorOptions,
    Trajectory,
    _direction,
    converged_tolerance,
    integrate_with_events,
)
from .oscillator import PolynomialOscillator, State, eval_f, kinetic_energy, potential_energy, total_energy

INF = math.inf


class Direction(str, enum.Enum):
    FORWARD = "F"
    BACKWARD = "B"

    @property
    def is_forward(self) -> bool:
        return self is Direction.FORWARD

    def flipped(self) -> "Direction":
        return Direction.BACKWARD if self.is_forward else Direction.FORWARD


class Verdict(str, enum.Enum):
    STABLE = "Stable"
    UNSTABLE = "Unstable"
    NEVER_UNSTABLE = "NeverUnstableThisDirection"


class Overall(str, enum.Enum):
    STABLE = "Stable"
    UNSTABLE = "Unstable"
    UNDECIDED = "Undecided"


@dataclass(frozen=True)
class Swing:
    index: int
    direction: Direction
    start: Event
    end: Event
    peak_ke_state: State


@dataclass(frozen=True)
class SwingRecord:
    swing: Swing
    a_acc: float
    a_dec: float
    a_sur: Optional[float]
    margin: float
    verdict: Verdict


@dataclass(frozen=True)
class AnalysisOptions:
    max_swings: int = 50
    # "clearance": first-swing A_acc is the kinetic energy at the initial
    # state (falls back to the peak when starting at rest);
    # "peak": max of that and the peak kinetic energy of the first swing
    first_swing_acc: str = "clearance"
    integrator: IntegratorOptions = field(default_factory=IntegratorOptions)

    def validate(self):
        if self.max_swings < 1:
            raise InvalidOptions("max_swings must be >= 1")
        if self.first_swing_acc not in ("clearance", "peak"):
            raise InvalidOptions(f"unknown first_swing_acc {self.first_swing_acc!r}")
        self.integrator.validate()


@dataclass(frozen=True)
class AssessmentReport:
    records: tuple[SwingRecord, ...]
    overall: Overall
    min_margin: float
    terminating_event: EventKind
    initial_state: Optional[State] = None


def first_acc_area(omega_tc: float) -> float:
    """Acceleration area of the first swing from the speed at clearance."""
    return kinetic_energy(omega_tc)


def _dir_of(event_direction: str) -> Direction:
    return Direction.FORWARD if event_direction == FORWARD else Direction.BACKWARD


def segment_swings(traj: Trajectory) -> list[Swing]:
    s0 = traj.state_at(0)
    acc0 = -traj.model.a0 * s0.omega - eval_f(traj.model, s0.delta)
    if s0.omega == 0.0 and acc0 == 0.0:
        return []
    direction = _dir_of(_direction(s0.omega, acc0))
    start = Event(EventKind.INITIAL, s0, FORWARD if direction.is_forward else BACKWARD)
    peak = s0
    swings: list[Swing] = []

    def close(end: Event):
        nonlocal start, peak
        if end.state.t > start.state.t or end.kind is EventKind.UEP_CROSS:
            swings.append(Swing(len(swings) + 1, direction, start, end, peak))

    for ev in traj.events:
        k = ev.kind
        if k is EventKind.ACCEL_ZERO:
            if abs(ev.state.omega) > abs(peak.omega):
                peak = ev.state
        elif k is EventKind.TURNING_POINT:
            close(ev)
            direction = direction.flipped()
            start, peak = ev, ev.state
        elif k is EventKind.UEP_CROSS:
            outward = (ev.level > 0) == direction.is_forward and _dir_of(ev.direction) is direction
            if outward:
                close(ev)
                return swings
        elif k in (EventKind.ESCAPE, EventKind.CONVERGED, EventKind.TIME_LIMIT, EventKind.SWING_LIMIT):
            close(ev)
            return swings
    return swings


def swing_margin(
    model: PolynomialOscillator,
    eq: EquilibriumSet,
    swing: Swing,
    a_acc: Optional[float] = None,
    energy_tol: Optional[float] = None,
) -> SwingRecord:
    end = swing.end
    if end.kind in (EventKind.TIME_LIMIT, EventKind.SWING_LIMIT, EventKind.INITIAL):
        raise UnresolvedSwing(f"swing {swing.index} ends at {end.kind.value}")
    if a_acc is None:
        a_acc = kinetic_energy(swing.peak_ke_state.omega)
    if energy_tol is None:
        energy_tol = converged_tolerance(model, eq)

    bound = eq.bounding(swing.direction.is_forward)
    can_escape = bound is not None
    if bound is not None:
        try:
            can_escape = escape_possible(model, bound)
        except DegenerateEquilibrium:
            # find_equilibria only keeps flat roots as bounds when f changes sign
            can_escape = True

    if end.kind is EventKind.UEP_CROSS:
        residual = kinetic_energy(end.state.omega)
        a_dec = max(a_acc - residual, 0.0)
        margin = (a_dec - a_acc) / a_acc if a_acc > 0 else -1.0
        verdict = Verdict.UNSTABLE if residual > 0 else Verdict.STABLE
        return SwingRecord(swing, a_acc, a_dec, None, margin, verdict)
    if end.kind is EventKind.ESCAPE:
        # left the well without a recorded crossing: nothing decelerated it
        return SwingRecord(swing, a_acc, 0.0, None, -1.0, Verdict.UNSTABLE)

    if not can_escape:
        return SwingRecord(swing, a_acc, a_acc, None, INF, Verdict.NEVER_UNSTABLE)
    a_sur = potential_energy(model, bound.location) - potential_energy(model, end.state.delta)
    if a_acc <= energy_tol:
        return SwingRecord(swing, a_acc, a_acc, a_sur, INF, Verdict.STABLE)
    return SwingRecord(swing, a_acc, a_acc, a_sur, a_sur / a_acc, Verdict.STABLE)


def _trapped(records) -> bool:
    """A certified turn in both directions with non-increasing energy never escapes."""
    done = {r.swing.direction for r in records if r.verdict is not Verdict.UNSTABLE}
    return len(done) == 2


def summarize(records, termination: EventKind, max_swings: int, initial_state=None) -> AssessmentReport:
    records = tuple(records)
    if any(r.verdict is Verdict.UNSTABLE for r in records):
        overall = Overall.UNSTABLE
        termination = records[-1].swing.end.kind
    elif termination is EventKind.CONVERGED or len(records) >= max_swings or _trapped(records):
        overall = Overall.STABLE
    else:
        overall = Overall.UNDECIDED
    min_margin = min((r.margin for r in records), default=INF)
    return AssessmentReport(records, overall, min_margin, termination, initial_state)


def assess_post_fault(
    model: PolynomialOscillator,
    init: State,
    options: Optional[AnalysisOptions] = None,
    equilibria: Optional[EquilibriumSet] = None,
) -> AssessmentReport:
    opts = options or AnalysisOptions()
    opts.validate()
    eq = equilibria or find_equilibria(model)
    e_tol = converged_tolerance(model, eq)

    if total_energy(model, init) < e_tol and eq.in_well(init.delta):
        return AssessmentReport((), Overall.STABLE, INF, EventKind.CONVERGED, init)

    integ = replace(opts.integrator, max_turns=opts.max_swings, terminal_uep_cross=True)
    traj = integrate_with_events(model, init, integ, equilibria=eq)
    swings = segment_swings(traj)

    ke0 = first_acc_area(init.omega)
    records = []
    for sw in swings:
        if sw.end.kind in (EventKind.TIME_LIMIT, EventKind.SWING_LIMIT):
            break
        a_acc = None
        if sw.index == 1:
            peak_ke = kinetic_energy(sw.peak_ke_state.omega)
            if opts.first_swing_acc == "peak":
                a_acc = max(ke0, peak_ke)
            elif ke0 > e_tol:
                a_acc = ke0
        rec = swing_margin(model, eq, sw, a_acc=a_acc, energy_tol=e_tol)
        records.append(rec)
        if rec.verdict is Verdict.UNSTABLE:
            break
    return summarize(records, traj.termination.kind, opts.max_swings, init)
