"""Generalized 1-DOF polynomial oscillator.

The post-fault system is written in coordinates centred on its stable
equilibrium::

    d(delta)/dt = omega
    d(omega)/dt = -a0 * omega - kappa * f(delta)

    f(delta) = a1*delta + a2*delta**2 + ... + aN*delta**N

``P_f = -f`` is the restoring "power" curve drawn on the P-delta plane and
``P_domega = a0 * omega`` is the damping curve. The potential
``V(delta) = integral_0^delta f`` together with ``omega**2 / 2`` forms the
energy function used by the swing analysis.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import ConstantTermError, ModelError, NoSepError

# Relative size of a constant term still treated as zero.
CONSTANT_TERM_RTOL = 1e-12


@dataclass(frozen=True)
class State:
    t: float
    delta: float
    omega: float

    def __post_init__(self):
        if not (math.isfinite(self.t) and math.isfinite(self.delta) and math.isfinite(self.omega)):
            raise ValueError(f"non-finite state: {self}")


@dataclass(frozen=True)
class PolynomialOscillator:
    """Damped oscillator with polynomial restoring term.

    Args:
        a0: linear damping coefficient (1/s), >= 0.
        coeffs: restoring coefficients ``(a1, ..., aN)``; no constant term.
        kappa: global multiplier applied to every restoring coefficient.
    """

    a0: float
    coeffs: tuple[float, ...]
    kappa: float = 1.0
    # effective coefficients kappa * a_k, filled in __post_init__
    restoring: tuple[float, ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        coeffs = tuple(float(c) for c in self.coeffs)
        object.__setattr__(self, "coeffs", coeffs)
        object.__setattr__(self, "a0", float(self.a0))
        object.__setattr__(self, "kappa", float(self.kappa))
        if not coeffs:
            raise ModelError("at least one restoring coefficient (a1) is required")
        if not all(math.isfinite(c) for c in coeffs + (self.a0, self.kappa)):
            raise ModelError("coefficients must be finite")
        if self.a0 < 0:
            raise ModelError(f"damping a0 must be >= 0, got {self.a0}")
        if self.kappa <= 0:
            raise ModelError(f"kappa must be > 0, got {self.kappa}")
        if coeffs[-1] == 0.0:
            raise ModelError("leading coefficient aN must be non-zero")
        if coeffs[0] <= 0:
            raise ModelError(f"a1 must be > 0 for the origin to be a SEP, got {coeffs[0]}")
        object.__setattr__(self, "restoring", tuple(self.kappa * c for c in coeffs))

    @property
    def order(self) -> int:
        return len(self.coeffs)

    @classmethod
    def from_full_coefficients(cls, a0: float, full: Sequence[float], kappa: float = 1.0):
        """Build from ``(a_const, a1, ..., aN)``; the constant term must vanish."""
        full = [float(c) for c in full]
        if len(full) < 2:
            raise ModelError("need a constant term and at least a1")
        scale = max(abs(c) for c in full)
        if abs(full[0]) > CONSTANT_TERM_RTOL * scale:
            raise ConstantTermError(
                f"constant term {full[0]!r} is not zero; shift coordinates to the SEP first"
            )
        return cls(a0=a0, coeffs=tuple(full[1:]), kappa=kappa)

    def with_damping(self, a0: float) -> "PolynomialOscillator":
        return PolynomialOscillator(a0=a0, coeffs=self.coeffs, kappa=self.kappa)

    def with_kappa(self, kappa: float) -> "PolynomialOscillator":
        return PolynomialOscillator(a0=self.a0, coeffs=self.coeffs, kappa=kappa)


@dataclass(frozen=True)
class SmibParams:
    """Single-machine-infinite-bus swing equation parameters.

    ``Pm < Pmax`` is only required by operations that need a stable
    equilibrium, so a fault-on phase (``Pmax < Pm``) is representable.
    """

    H: float
    D: float
    omega_s: float
    Pm: float
    Pmax: float

    def __post_init__(self):
        vals = (self.H, self.D, self.omega_s, self.Pm, self.Pmax)
        if not all(math.isfinite(v) for v in vals):
            raise ModelError("SMIB parameters must be finite")
        if self.H <= 0:
            raise ModelError(f"H must be > 0, got {self.H}")
        if self.omega_s <= 0:
            raise ModelError(f"omega_s must be > 0, got {self.omega_s}")
        if self.D < 0:
            raise ModelError(f"D must be >= 0, got {self.D}")
        if self.Pm < 0:
            raise ModelError(f"Pm must be >= 0, got {self.Pm}")
        if self.Pmax <= 0:
            raise ModelError(f"Pmax must be > 0, got {self.Pmax}")

    @property
    def scale(self) -> float:
        """omega_s / 2H, converts power mismatch to angular acceleration."""
        return self.omega_s / (2.0 * self.H)

    def require_sep(self) -> float:
        if self.Pm >= self.Pmax:
            raise NoSepError(f"no stable equilibrium: Pm={self.Pm} >= Pmax={self.Pmax}")
        return math.asin(self.Pm / self.Pmax)


def eval_f(model: PolynomialOscillator, delta):
    """Restoring term ``kappa * f(delta)`` by Horner's scheme (scalar or array)."""
    acc = 0.0
    for c in reversed(model.restoring):
        acc = acc * delta + c
    return acc * delta


def eval_df(model: PolynomialOscillator, delta):
    acc = 0.0
    n = len(model.restoring)
    for k in range(n, 0, -1):
        acc = acc * delta + k * model.restoring[k - 1]
    return acc


def p_f(model: PolynomialOscillator, delta):
    return -eval_f(model, delta)


def vector_field(model: PolynomialOscillator, s: State) -> tuple[float, float]:
    return s.omega, -model.a0 * s.omega - eval_f(model, s.delta)


def potential_energy(model: PolynomialOscillator, delta):
    """Closed-form antiderivative of f with V(0) = 0."""
    acc = 0.0
    n = len(model.restoring)
    for k in range(n, 0, -1):
        acc = acc * delta + model.restoring[k - 1] / (k + 1)
    return acc * delta * delta


def kinetic_energy(omega):
    return 0.5 * omega * omega


def total_energy(model: PolynomialOscillator, s: State) -> float:
    return kinetic_energy(s.omega) + potential_energy(model, s.delta)


def _sin_derivative(k: int, x: float) -> float:
    return (math.sin(x), math.cos(x), -math.sin(x), -math.cos(x))[k % 4]


def from_smib_taylor(p: SmibParams, order: int, sep_shift: bool = True) -> PolynomialOscillator:
    """Truncated Taylor model of the sinusoidal swing equation.

    With ``sep_shift`` the expansion point is the SEP ``asin(Pm/Pmax)`` and
    the constant term cancels. Without it the expansion is about delta = 0,
    which is only SEP-centred when ``Pm == 0``.
    """
    if order < 1:
        raise ModelError(f"Taylor order must be >= 1, got {order}")
    delta_s = p.require_sep()
    x0 = delta_s if sep_shift else 0.0
    s = p.scale
    full = [s * (p.Pmax * math.sin(x0) - p.Pm)]
    for k in range(1, order + 1):
        full.append(s * p.Pmax * _sin_derivative(k, x0) / math.factorial(k))
    # sin(delta_s) * Pmax - Pm cancels only to rounding
    if sep_shift:
        full[0] = 0.0
    # drop exact trailing zeros (e.g. even terms when delta_s == 0)
    while len(full) > 2 and full[-1] == 0.0:
        full.pop()
    return PolynomialOscillator.from_full_coefficients(p.D / (2.0 * p.H), full)


def smib_taylor_residual(p: SmibParams, order: int, deltas) -> np.ndarray:
    """Difference between the Taylor model and the exact sinusoidal restoring term."""
    model = from_smib_taylor(p, order)
    deltas = np.asarray(deltas, dtype=float)
    delta_s = p.require_sep()
    exact = p.scale * (p.Pmax * np.sin(delta_s + deltas) - p.Pm)
    return eval_f(model, deltas) - exact
