"""Classical equal area criterion for the sinusoidal SMIB system.

Three phases share H, D, omega_s and Pm and differ only in the transfer
limit Pmax: pre-fault (1), fault-on (2) and post-fault (3). Damping is
ignored by the closed forms. The time-domain helpers integrate the full
sinusoidal swing equation with scipy and serve as an independent check.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.integrate import solve_ivp

from .errors import DomainError, ModelError, NoCriticalAngle
from .oscillator import PolynomialOscillator, SmibParams, State, from_smib_taylor


def canonical_angle(x: float) -> float:
    """Map an angle to (-pi, pi]."""
    if -math.pi < x <= math.pi:
        return x
    y = math.fmod(x + math.pi, 2 * math.pi)
    if y <= 0:
        y += 2 * math.pi
    return y - math.pi


@dataclass(frozen=True)
class SmibEquilibria:
    delta_s: float
    delta_u1: float
    delta_u2: float


@dataclass(frozen=True)
class SmibScenario:
    pre: SmibParams
    fault: SmibParams
    post: SmibParams
    t0: float = 0.0
    tc: Optional[float] = None

    def __post_init__(self):
        shared = lambda p: (p.H, p.D, p.omega_s, p.Pm)
        if not shared(self.pre) == shared(self.fault) == shared(self.post):
            raise ModelError("fault phases may differ only in Pmax")
        self.pre.require_sep()
        self.post.require_sep()
        if self.tc is not None and not self.tc > self.t0:
            raise ModelError(f"clearing time tc={self.tc} must exceed t0={self.t0}")

    @classmethod
    def from_limits(cls, Pm, pmax_pre, pmax_fault, pmax_post, H=5.0, D=0.0, omega_s=2 * math.pi * 60, t0=0.0, tc=None):
        mk = lambda pmax: SmibParams(H=H, D=D, omega_s=omega_s, Pm=Pm, Pmax=pmax)
        return cls(mk(pmax_pre), mk(pmax_fault), mk(pmax_post), t0, tc)

    @property
    def Pm(self) -> float:
        return self.post.Pm

    def standing_assumption(self) -> bool:
        """Pmax2 < Pm < Pmax3 < Pmax1."""
        return self.fault.Pmax < self.Pm < self.post.Pmax < self.pre.Pmax


def smib_equilibria(p: SmibParams) -> SmibEquilibria:
    ds = p.require_sep()
    return SmibEquilibria(ds, math.pi - ds, -math.pi - ds)


def classical_areas(s: SmibScenario, delta_c: float) -> tuple[float, float]:
    Pm = s.Pm
    d1 = smib_equilibria(s.pre).delta_s
    du = smib_equilibria(s.post).delta_u1
    a_acc = Pm * (delta_c - d1) + s.fault.Pmax * (math.cos(delta_c) - math.cos(d1))
    a_dec = s.post.Pmax * (math.cos(delta_c) - math.cos(du)) - Pm * (du - delta_c)
    return a_acc, a_dec


def classical_margin(s: SmibScenario, delta_c: float) -> tuple[float, float, float]:
    """(A_acc, A_dec, margin) for clearing at rotor angle ``delta_c``."""
    delta_c = canonical_angle(delta_c)
    d1 = smib_equilibria(s.pre).delta_s
    du = smib_equilibria(s.post).delta_u1
    if not d1 <= delta_c < du:
        raise DomainError(f"delta_c={delta_c!r} outside [{d1!r}, {du!r})")
    a_acc, a_dec = classical_areas(s, delta_c)
    if a_acc <= 0.0:
        return a_acc, a_dec, math.inf
    return a_acc, a_dec, (a_dec - a_acc) / a_acc


def critical_clearing_angle(s: SmibScenario) -> float:
    Pm = s.Pm
    d1 = smib_equilibria(s.pre).delta_s
    du = smib_equilibria(s.post).delta_u1
    p2, p3 = s.fault.Pmax, s.post.Pmax
    denom = p3 - p2
    if denom <= 0:
        raise NoCriticalAngle("post-fault transfer limit does not exceed the fault-on limit")
    arg = (Pm * (du - d1) + p3 * math.cos(du) - p2 * math.cos(d1)) / denom
    if not -1.0 <= arg <= 1.0:
        raise NoCriticalAngle(f"arccos argument {arg!r} outside [-1, 1]")
    return canonical_angle(math.acos(arg))


# -- time domain -----------------------------------------------------------


def _swing_rhs(p: SmibParams):
    k = p.scale

    def rhs(t, y):
        return [y[1], k * (p.Pm - p.Pmax * math.sin(y[0])) - p.D / (2 * p.H) * y[1]]

    return rhs


def fault_on_speed(s: SmibScenario, delta_c: float, rtol: float = 1e-12, atol: float = 1e-12) -> tuple[float, float]:
    """Time and speed at which the fault-on trajectory reaches ``delta_c``."""
    d1 = smib_equilibria(s.pre).delta_s
    if delta_c == d1:
        return s.t0, 0.0
    if delta_c < d1:
        raise DomainError(f"delta_c={delta_c!r} precedes the pre-fault SEP {d1!r}")

    def reach(t, y):
        return y[0] - delta_c

    reach.terminal = True
    reach.direction = 1
    sol = solve_ivp(_swing_rhs(s.fault), (s.t0, s.t0 + 1e3), [d1, 0.0], method="DOP853",
                    rtol=rtol, atol=atol, events=reach)
    if sol.t_events[0].size == 0:
        raise DomainError(f"fault-on trajectory never reaches delta_c={delta_c!r}")
    return float(sol.t_events[0][0]), float(sol.y_events[0][0][1])


def clearing_state(s: SmibScenario, rtol: float = 1e-12, atol: float = 1e-12) -> tuple[float, float]:
    """Absolute (delta, omega) at the clearing time ``tc``."""
    if s.tc is None:
        raise DomainError("scenario has no clearing time")
    d1 = smib_equilibria(s.pre).delta_s
    sol = solve_ivp(_swing_rhs(s.fault), (s.t0, s.tc), [d1, 0.0], method="DOP853", rtol=rtol, atol=atol)
    return float(sol.y[0, -1]), float(sol.y[1, -1])


def post_fault_stable(s: SmibScenario, delta_c: float, max_time: float = 100.0) -> bool:
    """Time-domain verdict of the first forward swing after clearing at ``delta_c``."""
    _, w_c = fault_on_speed(s, delta_c)
    du = smib_equilibria(s.post).delta_u1

    def turn(t, y):
        return y[1]

    turn.terminal = True
    turn.direction = -1

    def cross(t, y):
        return y[0] - du

    cross.terminal = True
    cross.direction = 1
    sol = solve_ivp(_swing_rhs(s.post), (0.0, max_time), [delta_c, w_c], method="DOP853",
                    rtol=1e-12, atol=1e-12, events=(turn, cross))
    if sol.t_events[1].size:
        return False
    return bool(sol.t_events[0].size)


def critical_angle_by_simulation(s: SmibScenario, tol: float = 1e-7) -> float:
    """Bisection on the clearing angle using the sinusoidal swing equations."""
    lo = smib_equilibria(s.pre).delta_s + 1e-9
    hi = smib_equilibria(s.post).delta_u1 - 1e-9
    if post_fault_stable(s, hi) or not post_fault_stable(s, lo):
        raise NoCriticalAngle("verdict does not change over the clearing-angle range")
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if post_fault_stable(s, mid):
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def geac_bridge(s: SmibScenario, delta_c: float, order: int) -> tuple[PolynomialOscillator, State]:
    """Taylor model of the post-fault phase and the clearing state in its coordinates."""
    model = from_smib_taylor(s.post, order)
    _, w_c = fault_on_speed(s, delta_c)
    ds3 = smib_equilibria(s.post).delta_s
    return model, State(0.0, delta_c - ds3, w_c)
