"""Sample-driven stability assessment for measured (delta, omega) streams."""

from __future__ import annotations

import math
from typing import Optional

from .equilibria import EquilibriumSet, find_equilibria
from .errors import ModelMissing, NonMonotoneTime
from .integrator import BACKWARD, FORWARD, Event, EventKind, _direction, converged_tolerance
from .oscillator import PolynomialOscillator, State, eval_f, kinetic_energy
from .swing import Direction, Swing, SwingRecord, Verdict, swing_margin


class OnlineAssessor:
    """Single-writer state machine; feed it with :meth:`push_sample`.

    Turning points are detected from sign changes of omega and located by
    linear interpolation between the two bracketing samples; UEP crossings
    likewise from the delta level. The first swing uses the kinetic energy
    of the first sample as its acceleration area.
    """

    def __init__(self, model: Optional[PolynomialOscillator], equilibria: Optional[EquilibriumSet] = None):
        self.model = model
        self.equilibria = equilibria if equilibria is not None or model is None else find_equilibria(model)
        self.energy_tol = converged_tolerance(model, self.equilibria) if model is not None else 0.0
        self.records: list[SwingRecord] = []
        self.finished = False
        self._prev: Optional[State] = None
        self._direction: Optional[Direction] = None
        self._start: Optional[Event] = None
        self._peak: Optional[State] = None
        self._first_ke = 0.0
        self._index = 0

    def _begin(self, ev: Event, direction: Direction):
        self._direction = direction
        self._start = ev
        self._peak = ev.state
        self._index += 1

    def _close(self, end: Event) -> SwingRecord:
        swing = Swing(self._index, self._direction, self._start, end, self._peak)
        a_acc = None
        if self._index == 1 and self._first_ke > self.energy_tol:
            a_acc = self._first_ke
        rec = swing_margin(self.model, self.equilibria, swing, a_acc=a_acc, energy_tol=self.energy_tol)
        self.records.append(rec)
        if rec.verdict is Verdict.UNSTABLE:
            self.finished = True
        return rec

    def push_sample(self, t: float, delta: float, omega: float) -> Optional[SwingRecord]:
        if self.model is None:
            raise ModelMissing("the post-fault model must be supplied before streaming samples")
        cur = State(t, delta, omega)
        prev = self._prev
        if prev is not None and not t > prev.t:
            raise NonMonotoneTime(f"sample time {t!r} does not exceed previous {prev.t!r}")
        self._prev = cur
        if self.finished:
            return None

        if self._direction is None:
            acc = -self.model.a0 * omega - eval_f(self.model, delta)
            if omega == 0.0 and acc == 0.0:
                return None
            d = Direction.FORWARD if _direction(omega, acc) == FORWARD else Direction.BACKWARD
            if self._index == 0:
                self._first_ke = kinetic_energy(omega)
            self._begin(Event(EventKind.INITIAL, cur, FORWARD if d.is_forward else BACKWARD), d)
            return None

        record = None
        forward = self._direction.is_forward
        bound = self.equilibria.bounding(forward)
        if bound is not None:
            lv = bound.location
            crossed = prev.delta < lv <= delta if forward else delta <= lv < prev.delta
            if crossed:
                frac = (lv - prev.delta) / (delta - prev.delta)
                x = State(prev.t + frac * (t - prev.t), lv, prev.omega + frac * (omega - prev.omega))
                ev = Event(EventKind.UEP_CROSS, x, FORWARD if forward else BACKWARD, level=lv)
                return self._close(ev)

        turned = (prev.omega > 0 and omega <= 0) if forward else (prev.omega < 0 and omega >= 0)
        if turned:
            frac = prev.omega / (prev.omega - omega)
            x = State(prev.t + frac * (t - prev.t), prev.delta + frac * (delta - prev.delta), 0.0)
            ev = Event(EventKind.TURNING_POINT, x, FORWARD if forward else BACKWARD)
            record = self._close(ev)
            self._begin(ev, self._direction.flipped())

        if kinetic_energy(omega) > kinetic_energy(self._peak.omega):
            self._peak = cur
        return record


def push_sample(assessor: OnlineAssessor, t: float, delta: float, omega: float) -> Optional[SwingRecord]:
    return assessor.push_sample(t, delta, omega)
