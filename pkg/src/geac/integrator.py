"""Adaptive Dormand-Prince 5(4) integration with dense output and events.

The state is two-dimensional, so the stepper works on plain floats; numpy
overhead per step would dominate otherwise. Events are sign changes of

* ``omega``                     -> TurningPoint
* ``delta - level``             -> UepCross (one per watched UEP)
* ``-a0*omega - f(delta)``      -> AccelZero
* ``delta -/+ escape bound``    -> Escape (terminal)

located on the continuous extension with Brent's method.
"""

from __future__ import annotations

import bisect
import enum
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
from scipy.optimize import brentq

from .equilibria import EquilibriumSet, find_equilibria
from .errors import InvalidOptions, OutOfSpan, StepSizeUnderflow
from .oscillator import PolynomialOscillator, State, potential_energy

# Dormand-Prince tableau
_C = (0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0)
_A = (
    (),
    (1 / 5,),
    (3 / 40, 9 / 40),
    (44 / 45, -56 / 15, 32 / 9),
    (19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729),
    (9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656),
)
_B = (35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84)
_E = (-71 / 57600, 0.0, 71 / 16695, -71 / 1920, 17253 / 339200, -22 / 525, 1 / 40)
# continuous extension, y(t + th*h) = y + h * sum_j Q_j th**(j+1), Q = K^T P
_P = (
    (1.0, -8048581381 / 2820520608, 8663915743 / 2820520608, -12715105075 / 11282082432),
    (0.0, 0.0, 0.0, 0.0),
    (0.0, 131558114200 / 32700410799, -68118460800 / 10900136933, 87487479700 / 32700410799),
    (0.0, -1754552775 / 470086768, 14199869525 / 1410260304, -10690763975 / 1880347072),
    (0.0, 127303824393 / 49829197408, -318862633887 / 49829197408, 701980252875 / 199316789632),
    (0.0, -282668133 / 205662961, 2019193451 / 616988883, -1453857185 / 822651844),
    (0.0, 40617522 / 29380423, -110615467 / 29380423, 69997945 / 29380423),
)

SAFETY = 0.9
MIN_FACTOR = 0.2
MAX_FACTOR = 10.0
PI_BETA = 0.04
PI_ALPHA = 0.2 - 0.75 * PI_BETA
EVENT_GTOL = 1e-10


class EventKind(str, enum.Enum):
    INITIAL = "Initial"
    TURNING_POINT = "TurningPoint"
    UEP_CROSS = "UepCross"
    ACCEL_ZERO = "AccelZero"
    ESCAPE = "Escape"
    CONVERGED = "Converged"
    TIME_LIMIT = "TimeLimit"
    SWING_LIMIT = "SwingLimit"


FORWARD = "forward"
BACKWARD = "backward"


@dataclass(frozen=True)
class Event:
    kind: EventKind
    state: State
    # direction of motion of delta at the event (for a turning point: before it)
    direction: str
    # UEP or escape level for UepCross / Escape
    level: Optional[float] = None


@dataclass(frozen=True)
class IntegratorOptions:
    rtol: float = 1e-10
    atol: float = 1e-12
    max_time: float = 200.0
    # symmetric |delta| bound; None derives per-side bounds from the UEPs
    escape_bound: Optional[float] = None
    # None watches the bounding UEPs of find_equilibria
    uep_levels: Optional[tuple[float, ...]] = None
    # stop after this many turning points (None: unlimited)
    max_turns: Optional[int] = None
    terminal_uep_cross: bool = False
    max_step: Optional[float] = None
    first_step: Optional[float] = None

    def validate(self):
        if not (self.rtol > 0 and self.atol > 0):
            raise InvalidOptions("rtol and atol must be positive")
        if self.rtol < 100 * np.finfo(float).eps:
            raise InvalidOptions(f"rtol={self.rtol} is below the attainable precision")
        if not (self.max_time > 0 and math.isfinite(self.max_time)):
            raise InvalidOptions("max_time must be positive and finite")
        if self.escape_bound is not None and not self.escape_bound > 0:
            raise InvalidOptions("escape_bound must be positive")
        if self.max_turns is not None and self.max_turns < 1:
            raise InvalidOptions("max_turns must be >= 1")
        if self.max_step is not None and not self.max_step > 0:
            raise InvalidOptions("max_step must be positive")


@dataclass
class Trajectory:
    model: PolynomialOscillator
    t: np.ndarray
    y: np.ndarray  # (n, 2): delta, omega
    dense: np.ndarray  # (n-1, 2, 4) continuous-extension coefficients
    events: list[Event]
    termination: Event
    escape_bounds: tuple[float, float] = (-math.inf, math.inf)
    energy_tol: float = 0.0

    @property
    def span(self) -> tuple[float, float]:
        return float(self.t[0]), float(self.t[-1])

    def events_of(self, kind: EventKind) -> list[Event]:
        return [e for e in self.events if e.kind is kind]

    def state_at(self, i: int) -> State:
        return State(float(self.t[i]), float(self.y[i, 0]), float(self.y[i, 1]))


def energy_scale(model: PolynomialOscillator, eq: EquilibriumSet, bounds: tuple[float, float]) -> float:
    barriers = [potential_energy(model, u.location) for u in (eq.left_uep, eq.right_uep) if u]
    if barriers:
        return max(barriers)
    return max(abs(potential_energy(model, b)) for b in bounds)


def converged_tolerance(model: PolynomialOscillator, eq: EquilibriumSet, bounds=None) -> float:
    """Energy below which the oscillator is considered settled at the SEP."""
    if bounds is None:
        bounds = escape_bounds(eq, None)
    return 1e-9 * energy_scale(model, eq, bounds)


def escape_bounds(eq: EquilibriumSet, symmetric: Optional[float]) -> tuple[float, float]:
    if symmetric is not None:
        return -symmetric, symmetric
    ueps = [abs(u.location) for u in (eq.left_uep, eq.right_uep) if u]
    outer = 1.5 * max(ueps) if ueps else 10.0
    lo = 1.5 * eq.left_uep.location if eq.left_uep else -max(10.0, outer)
    hi = 1.5 * eq.right_uep.location if eq.right_uep else max(10.0, outer)
    return lo, hi


def _initial_step(fun, y0, f0, rtol, atol):
    # Hairer, Norsett & Wanner, starting step size heuristic
    sc = [atol + abs(v) * rtol for v in y0]
    d0 = math.sqrt(sum((v / s) ** 2 for v, s in zip(y0, sc)) / 2)
    d1 = math.sqrt(sum((v / s) ** 2 for v, s in zip(f0, sc)) / 2)
    h0 = 1e-6 if d0 < 1e-5 or d1 < 1e-5 else 0.01 * d0 / d1
    y1 = [v + h0 * d for v, d in zip(y0, f0)]
    f1 = fun(*y1)
    d2 = math.sqrt(sum(((a - b) / s) ** 2 for a, b, s in zip(f1, f0, sc)) / 2) / h0
    if max(d1, d2) <= 1e-15:
        h1 = max(1e-6, h0 * 1e-3)
    else:
        h1 = (0.01 / max(d1, d2)) ** (1 / 5)
    return min(100 * h0, h1)


def integrate_with_events(
    model: PolynomialOscillator,
    init: State,
    options: Optional[IntegratorOptions] = None,
    equilibria: Optional[EquilibriumSet] = None,
) -> Trajectory:
    opts = options or IntegratorOptions()
    opts.validate()
    eq = equilibria if equilibria is not None else find_equilibria(model)

    a0 = model.a0
    coefs = tuple(reversed(model.restoring))

    def accel(d, w):
        acc = 0.0
        for c in coefs:
            acc = acc * d + c
        return -a0 * w - acc * d

    def fun(d, w):
        return (w, accel(d, w))

    if opts.uep_levels is None:
        levels = tuple(u.location for u in (eq.left_uep, eq.right_uep) if u)
    else:
        levels = tuple(opts.uep_levels)
    lo_b, hi_b = escape_bounds(eq, opts.escape_bound)
    e_tol = converged_tolerance(model, eq, (lo_b, hi_b))
    rtol, atol = opts.rtol, opts.atol
    t_end = init.t + opts.max_time
    max_step = opts.max_step
    if max_step is None:
        # a twentieth of the small-signal period keeps every oscillation resolved
        max_step = 0.05 * 2 * math.pi / math.sqrt(model.restoring[0])
    g_scale = max(1.0, abs(lo_b), abs(hi_b))

    def in_well(d):
        return eq.in_well(d)

    # event functions of (delta, omega); index layout is fixed below
    def g_values(d, w):
        vals = [w, accel(d, w), d - lo_b, d - hi_b]
        vals.extend(d - lv for lv in levels)
        return vals

    n_fixed = 4
    t = init.t
    d, w = init.delta, init.omega
    ts = [t]
    ys = [(d, w)]
    dense: list[tuple] = []
    events: list[Event] = []
    termination: Optional[Event] = None
    turns = 0

    e0 = 0.5 * w * w + potential_energy(model, d)
    # only a decay into the tolerance counts as convergence
    may_converge = e0 >= e_tol

    if not (lo_b < d < hi_b):
        termination = Event(EventKind.ESCAPE, init, _direction(w, accel(d, w)), level=d)

    k1 = fun(d, w)
    h = opts.first_step or _initial_step(fun, (d, w), k1, rtol, atol)
    h = min(h, max_step)
    err_prev = 1e-4
    g_prev = g_values(d, w)
    # last non-zero sign of each event function
    sign_prev = [math.copysign(1.0, g) if g != 0.0 else 0.0 for g in g_prev]

    while termination is None:
        if t >= t_end:
            termination = Event(EventKind.TIME_LIMIT, State(t, d, w), _direction(w, accel(d, w)))
            break
        h = min(h, max_step)
        # absorb a rounding-sized remainder into this step
        reaches_end = t + h >= t_end - 1e-12 * max(1.0, abs(t_end))
        if reaches_end:
            h = t_end - t
        if h < 1e-14 * max(1.0, abs(t)):
            raise StepSizeUnderflow(f"step size {h!r} underflow at t={t!r}")

        d_new, w_new, kd, kw = _dp_step(accel, d, w, k1[0], k1[1], h)
        k7 = (kd[6], kw[6])
        if not (math.isfinite(d_new) and math.isfinite(w_new)):
            h *= MIN_FACTOR
            continue
        ed = h * (_E[0] * kd[0] + _E[2] * kd[2] + _E[3] * kd[3] + _E[4] * kd[4] + _E[5] * kd[5] + _E[6] * kd[6])
        ew = h * (_E[0] * kw[0] + _E[2] * kw[2] + _E[3] * kw[3] + _E[4] * kw[4] + _E[5] * kw[5] + _E[6] * kw[6])
        sd = atol + rtol * max(abs(d), abs(d_new))
        sw = atol + rtol * max(abs(w), abs(w_new))
        err = math.sqrt(((ed / sd) ** 2 + (ew / sw) ** 2) / 2)

        if err > 1.0:
            h *= max(MIN_FACTOR, SAFETY * err ** (-1 / 5))
            continue

        t_old, d_old, w_old = t, d, w
        t_new = t_end if reaches_end else t + h
        h_acc = h
        q_cache = []

        def interp(th, d_old=d_old, w_old=w_old, kd=kd, kw=kw, h_acc=h_acc, q_cache=q_cache):
            if not q_cache:
                q_cache.extend((_dense_coefficients(kd), _dense_coefficients(kw)))
            qd, qw = q_cache
            p = th
            sd_ = 0.0
            sw_ = 0.0
            for j in range(4):
                sd_ += qd[j] * p
                sw_ += qw[j] * p
                p *= th
            return d_old + h_acc * sd_, w_old + h_acc * sw_

        g_new = g_values(d_new, w_new)
        found = _locate_events(interp, g_values, sign_prev, g_prev, g_new)

        # next step size (PI control)
        if err == 0.0:
            fac = MAX_FACTOR
        else:
            fac = min(MAX_FACTOR, max(MIN_FACTOR, SAFETY * err ** (-PI_ALPHA) * err_prev ** PI_BETA))
        err_prev = max(err, 1e-4)
        h_next = h * fac

        cut = None  # theta at which a terminal event truncates the step
        for th, idx, crossing_up in found:
            dd, ww = interp(th)
            te = t_old + th * h_acc
            acc = accel(dd, ww)
            if idx == 0:
                kind, level = EventKind.TURNING_POINT, None
                # direction before the reversal
                direction = BACKWARD if crossing_up else FORWARD
                ww = 0.0
            elif idx == 1:
                kind, level = EventKind.ACCEL_ZERO, None
                direction = _direction(ww, 0.0)
            elif idx in (2, 3):
                kind, level = EventKind.ESCAPE, (lo_b if idx == 2 else hi_b)
                direction = _direction(ww, acc)
                dd = level
            else:
                kind, level = EventKind.UEP_CROSS, levels[idx - n_fixed]
                direction = _direction(ww, acc)
                dd = level
            ev = Event(kind, State(te, dd, ww), direction, level)
            events.append(ev)
            terminal = kind is EventKind.ESCAPE
            if kind is EventKind.TURNING_POINT:
                turns += 1
                if opts.max_turns is not None and turns >= opts.max_turns:
                    terminal = True
                    ev = Event(EventKind.SWING_LIMIT, ev.state, ev.direction)
            if kind is EventKind.UEP_CROSS and opts.terminal_uep_cross:
                outward = (level > 0) == (direction == FORWARD)
                terminal = outward
            if terminal:
                termination = ev
                cut = th
                break

        step_cut = 1.0
        if cut is not None and cut < 1.0:
            # shrink the last step to end at the terminal event
            step_cut = cut
            t_new = t_old + cut * h_acc
            d_new, w_new = termination.state.delta, termination.state.omega
            if termination.kind in (EventKind.TURNING_POINT, EventKind.SWING_LIMIT):
                w_new = 0.0
            h_acc = cut * h_acc
        t, d, w = t_new, d_new, w_new
        ts.append(t)
        ys.append((d, w))
        dense.append((kd, kw, step_cut))
        if termination is not None:
            break

        for i, g in enumerate(g_new):
            if g != 0.0:
                sign_prev[i] = math.copysign(1.0, g)
        g_prev = g_new
        k1 = k7
        h = h_next

        if may_converge:
            energy = 0.5 * w * w + potential_energy(model, d)
            if energy < e_tol and in_well(d):
                termination = Event(EventKind.CONVERGED, State(t, d, w), _direction(w, accel(d, w)))

    if termination.kind in (EventKind.CONVERGED, EventKind.TIME_LIMIT, EventKind.SWING_LIMIT):
        events.append(termination)

    if dense:
        stages = np.array([(kd, kw) for kd, kw, _ in dense])  # (n, 2, 7)
        dense_arr = stages @ np.array(_P)
        # a truncated step of fraction c: theta' = theta / c rescales Q_j by c**j
        cuts = np.array([c for _, _, c in dense])
        dense_arr *= cuts[:, None, None] ** np.arange(4)[None, None, :]
    else:
        dense_arr = np.zeros((0, 2, 4))
    traj = Trajectory(
        model=model,
        t=np.asarray(ts, dtype=float),
        y=np.asarray(ys, dtype=float).reshape(-1, 2),
        dense=dense_arr,
        events=events,
        termination=termination,
        escape_bounds=(lo_b, hi_b),
        energy_tol=e_tol,
    )
    return traj


def _dp_step(accel, d, w, kd1, kw1, h):
    """One Dormand-Prince step, unrolled; returns the new state and all seven stages."""
    a = _A
    d2 = d + h * a[1][0] * kd1
    w2 = w + h * a[1][0] * kw1
    kd2, kw2 = w2, accel(d2, w2)
    d3 = d + h * (a[2][0] * kd1 + a[2][1] * kd2)
    w3 = w + h * (a[2][0] * kw1 + a[2][1] * kw2)
    kd3, kw3 = w3, accel(d3, w3)
    d4 = d + h * (a[3][0] * kd1 + a[3][1] * kd2 + a[3][2] * kd3)
    w4 = w + h * (a[3][0] * kw1 + a[3][1] * kw2 + a[3][2] * kw3)
    kd4, kw4 = w4, accel(d4, w4)
    d5 = d + h * (a[4][0] * kd1 + a[4][1] * kd2 + a[4][2] * kd3 + a[4][3] * kd4)
    w5 = w + h * (a[4][0] * kw1 + a[4][1] * kw2 + a[4][2] * kw3 + a[4][3] * kw4)
    kd5, kw5 = w5, accel(d5, w5)
    d6 = d + h * (a[5][0] * kd1 + a[5][1] * kd2 + a[5][2] * kd3 + a[5][3] * kd4 + a[5][4] * kd5)
    w6 = w + h * (a[5][0] * kw1 + a[5][1] * kw2 + a[5][2] * kw3 + a[5][3] * kw4 + a[5][4] * kw5)
    kd6, kw6 = w6, accel(d6, w6)
    b = _B
    d_new = d + h * (b[0] * kd1 + b[2] * kd3 + b[3] * kd4 + b[4] * kd5 + b[5] * kd6)
    w_new = w + h * (b[0] * kw1 + b[2] * kw3 + b[3] * kw4 + b[4] * kw5 + b[5] * kw6)
    kd7, kw7 = w_new, accel(d_new, w_new)
    return d_new, w_new, (kd1, kd2, kd3, kd4, kd5, kd6, kd7), (kw1, kw2, kw3, kw4, kw5, kw6, kw7)


def _dense_coefficients(k):
    p = _P
    return tuple(
        k[0] * p[0][j] + k[2] * p[2][j] + k[3] * p[3][j] + k[4] * p[4][j] + k[5] * p[5][j] + k[6] * p[6][j]
        for j in range(4)
    )


def _direction(w: float, acc: float) -> str:
    if w > 0 or (w == 0 and acc > 0):
        return FORWARD
    return BACKWARD


def _locate_events(interp, g_values, sign_prev, g_old, g_new):
    """Roots of the event functions inside one step, sorted by theta.

    Each function is also probed at the step midpoint so a double crossing
    inside one step (a graze through zero and back) is resolved rather than
    silently missed.
    """
    found = []
    mid_vals = None
    for i, g1 in enumerate(g_new):
        s0 = sign_prev[i]
        if s0 == 0.0:
            continue
        s1 = math.copysign(1.0, g1) if g1 != 0.0 else s0
        brackets = []
        if s1 != s0:
            brackets.append((0.0, 1.0))
        elif min(abs(g_old[i]), abs(g1)) < abs(g1 - g_old[i]):
            # close enough to zero that a touch-and-return may hide in the step
            if mid_vals is None:
                mid_vals = g_values(*interp(0.5))
            gm = mid_vals[i]
            if gm != 0.0 and math.copysign(1.0, gm) != s0:
                brackets.extend([(0.0, 0.5), (0.5, 1.0)])
        for a, b in brackets:
            fa_sign = s0 if a == 0.0 else math.copysign(1.0, mid_vals[i])

            def g(th, i=i):
                return g_values(*interp(th))[i]

            ga, gb = g(a), g(b)
            if a == 0.0 and ga != 0.0 and math.copysign(1.0, ga) != fa_sign:
                # value at the step start is a rounding-level zero of the wrong sign
                ga = 0.0
            if ga == 0.0:
                th = a
            elif gb == 0.0:
                th = b
            elif ga * gb > 0:
                continue
            else:
                th = brentq(g, a, b, xtol=1e-15, rtol=4 * np.finfo(float).eps, maxiter=200)
            found.append((th, i, fa_sign < 0))
    found.sort(key=lambda x: x[0])
    return found


def interpolate_state(traj: Trajectory, t: float) -> State:
    t0, t1 = traj.span
    if not (t0 <= t <= t1):
        raise OutOfSpan(f"t={t!r} outside [{t0!r}, {t1!r}]")
    ts = traj.t
    i = bisect.bisect_right(ts, t) - 1
    if ts[i] == t or i >= len(traj.dense):
        return traj.state_at(min(i, len(ts) - 1))
    qd, qw = traj.dense[i]
    h = ts[i + 1] - ts[i]
    th = (t - ts[i]) / h
    powers = np.array([th, th * th, th ** 3, th ** 4])
    d = traj.y[i, 0] + h * float(qd @ powers)
    w = traj.y[i, 1] + h * float(qw @ powers)
    return State(float(t), d, w)
