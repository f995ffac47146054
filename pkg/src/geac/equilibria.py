"""Real equilibria of the polynomial oscillator and their classification."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import DegenerateEquilibrium, RootFindingFailure
from .oscillator import PolynomialOscillator, eval_df, eval_f

IMAG_RTOL = 1e-9
# eigenvalues of a multiple root scatter by ~eps**(1/m); probe these too
NEAR_REAL_RTOL = 1e-4
SLOPE_RTOL = 1e-9
ROOT_RESIDUAL_RTOL = 1e-10
MERGE_RTOL = 1e-4


class Kind(str, enum.Enum):
    SEP = "SEP"
    UEP = "UEP"
    DEGENERATE = "Degenerate"


@dataclass(frozen=True)
class Equilibrium:
    location: float
    kind: Kind
    slope: float
    # defined for UEPs only
    escape_possible: Optional[bool] = None


@dataclass(frozen=True)
class EquilibriumSet:
    all: tuple[Equilibrium, ...]
    sep: Equilibrium
    # nearest barrier on each side: a strict UEP, or a flat root where f
    # changes sign (odd multiplicity) which bounds the well the same way
    left_uep: Optional[Equilibrium]
    right_uep: Optional[Equilibrium]

    def bounding(self, forward: bool) -> Optional[Equilibrium]:
        return self.right_uep if forward else self.left_uep

    def in_well(self, delta: float) -> bool:
        lo = self.left_uep.location if self.left_uep else -math.inf
        hi = self.right_uep.location if self.right_uep else math.inf
        return lo < delta < hi


def _coef_scale(model: PolynomialOscillator) -> float:
    return max(abs(c) for c in model.restoring)


def _newton(fun, dfun, x: float, iters: int = 8) -> float:
    for _ in range(iters):
        d = dfun(x)
        if d == 0.0 or not math.isfinite(d):
            break
        step = fun(x) / d
        x_new = x - step
        if not math.isfinite(x_new):
            break
        if abs(step) <= 4 * np.finfo(float).eps * max(1.0, abs(x)):
            return x_new
        x = x_new
    return x


def _quotient_roots(model: PolynomialOscillator) -> np.ndarray:
    """Eigenvalues of the companion matrix of f(delta)/delta."""
    g = np.asarray(model.restoring, dtype=float)  # g(d) = a1 + a2 d + ... + aN d^(N-1)
    n = g.size - 1
    if n == 0:
        return np.empty(0, dtype=complex)
    monic = g[:-1] / g[-1]
    comp = np.zeros((n, n))
    comp[1:, :-1] = np.eye(n - 1)
    comp[:, -1] = -monic
    try:
        # LAPACK geev balances the matrix before the QR iteration
        lam = np.linalg.eigvals(comp)
    except np.linalg.LinAlgError as exc:
        raise RootFindingFailure(str(exc)) from exc
    if not np.all(np.isfinite(lam)):
        raise RootFindingFailure("companion eigenvalues are not finite")
    return lam


def _classify(model: PolynomialOscillator, x: float) -> Equilibrium:
    slope = eval_df(model, x)
    tol = SLOPE_RTOL * _coef_scale(model)
    if abs(slope) <= tol:
        return Equilibrium(x, Kind.DEGENERATE, slope, escape_possible=None)
    if slope > 0:
        return Equilibrium(x, Kind.SEP, slope)
    return Equilibrium(x, Kind.UEP, slope, escape_possible=True)


def _is_barrier(model: PolynomialOscillator, eq: Equilibrium) -> bool:
    """Strict UEP, or a flat root across which f changes sign (odd multiplicity)."""
    if eq.kind is Kind.UEP:
        return True
    if eq.kind is Kind.SEP:
        return False
    h = 1e-3 * (1.0 + abs(eq.location))
    inner = eval_f(model, eq.location - math.copysign(h, eq.location))
    outer = eval_f(model, eq.location + math.copysign(h, eq.location))
    # potential maximum: f points back toward the SEP inside, outward beyond
    return inner * math.copysign(1.0, eq.location) > 0 > outer * math.copysign(1.0, eq.location)


def find_equilibria(model: PolynomialOscillator) -> EquilibriumSet:
    f = lambda x: eval_f(model, x)
    df = lambda x: eval_df(model, x)
    scale = _coef_scale(model)

    candidates = []
    for lam in _quotient_roots(model):
        re, im = float(lam.real), float(lam.imag)
        if abs(im) <= IMAG_RTOL * (1.0 + abs(re)):
            candidates.append(re)
        elif abs(im) <= NEAR_REAL_RTOL * (1.0 + abs(re)):
            # a multiple real root may split into a complex pair; keep the
            # real part when f nearly vanishes there
            if abs(f(re)) <= NEAR_REAL_RTOL * scale * max(1.0, abs(re)) ** len(model.restoring):
                candidates.append(re)

    candidates.sort()
    merged: list[list[float]] = []
    for x in candidates:
        prev = merged[-1][-1] if merged else None
        if prev is not None and abs(x - prev) <= MERGE_RTOL * (1.0 + abs(x)):
            merged[-1].append(x)
        else:
            merged.append([x])

    roots = [0.0]
    for group in merged:
        if len(group) == 1:
            x = _newton(f, df, group[0])
        else:
            # first-order perturbations of a multiple root cancel in the mean
            x = sum(group) / len(group)
        roots.append(x)
    roots.sort()

    eqs = []
    for x in roots:
        tol = ROOT_RESIDUAL_RTOL * scale * max(1.0, abs(x)) ** len(model.restoring)
        if abs(f(x)) > tol:
            raise RootFindingFailure(f"root {x!r} did not converge (residual {f(x)!r})")
        eqs.append(_classify(model, x))

    sep = next(e for e in eqs if e.location == 0.0)
    left = [e for e in eqs if e.location < 0 and _is_barrier(model, e)]
    right = [e for e in eqs if e.location > 0 and _is_barrier(model, e)]
    return EquilibriumSet(
        all=tuple(eqs),
        sep=sep,
        left_uep=max(left, key=lambda e: e.location) if left else None,
        right_uep=min(right, key=lambda e: e.location) if right else None,
    )


def escape_possible(model: PolynomialOscillator, uep: Equilibrium) -> bool:
    """Whether a swing reaching this equilibrium can leave the well.

    P_f = -f rises through the axis at a strict UEP, so past it the restoring
    power accelerates the motion outward. Only a flat crossing is undecidable.
    """
    slope = eval_df(model, uep.location)
    if abs(slope) <= SLOPE_RTOL * _coef_scale(model):
        raise DegenerateEquilibrium(f"f'({uep.location!r}) = {slope!r} is within tolerance of zero")
    return slope < 0
