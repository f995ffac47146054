"""Scenario files: strict JSON schema to validated domain objects.

A scenario names exactly one model and exactly one starting condition::

    {
      "name": "eq10-case1",
      "model": {"polynomial": {"damping": 4.42e-4,
                               "coeffs": [0.2649, -0.0503, -0.04414]}},
      "start": {"initial_state": {"delta": 0.13, "omega": -5.2779}},
      "integrator": {"rtol": 1e-10},
      "analysis": {"max_swings": 50}
    }

``coeffs`` are the restoring terms a1..aN of f, where
``d(omega)/dt = -damping*omega - kappa*f(delta)``. An SMIB model
(``{"smib": {"H", "D", "omega_s", "Pm", "Pmax", "order"}}``) is expanded to
a Taylor polynomial about its post-fault SEP; with it, ``start`` may give a
fault timeline ``{"fault": {"t0", "tc", "pmax_pre", "pmax_fault"}}``
instead of the clearing state.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Literal, Optional

from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from .classical import SmibScenario, clearing_state, smib_equilibria
from .errors import GeacError, ParseError, ScenarioValidationError
from .integrator import IntegratorOptions
from .oscillator import PolynomialOscillator, SmibParams, State, from_smib_taylor
from .swing import AnalysisOptions


class _Strict(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)


class PolynomialSpec(_Strict):
    damping: float = Field(ge=0)
    coeffs: list[float] = Field(min_length=1)
    kappa: float = Field(default=1.0, gt=0)


class SmibSpec(_Strict):
    H: float = Field(gt=0)
    D: float = Field(default=0.0, ge=0)
    omega_s: float = Field(gt=0)
    Pm: float = Field(ge=0)
    Pmax: float = Field(gt=0)
    order: int = Field(default=3, ge=1)

    @model_validator(mode="after")
    def _sep_exists(self):
        if self.Pm >= self.Pmax:
            raise ValueError(f"Pm={self.Pm} >= Pmax={self.Pmax}: post-fault system has no SEP")
        return self


class ModelSpec(_Strict):
    polynomial: Optional[PolynomialSpec] = None
    smib: Optional[SmibSpec] = None

    @model_validator(mode="after")
    def _exactly_one(self):
        if (self.polynomial is None) == (self.smib is None):
            raise ValueError("exactly one of 'polynomial' or 'smib' must be given")
        return self


class InitialStateSpec(_Strict):
    delta: float
    omega: float


class FaultSpec(_Strict):
    t0: float = 0.0
    tc: float
    pmax_pre: float = Field(gt=0)
    pmax_fault: float = Field(ge=0)

    @model_validator(mode="after")
    def _ordered(self):
        if not self.tc > self.t0:
            raise ValueError(f"tc={self.tc} must exceed t0={self.t0}")
        return self


class StartSpec(_Strict):
    initial_state: Optional[InitialStateSpec] = None
    fault: Optional[FaultSpec] = None

    @model_validator(mode="after")
    def _exactly_one(self):
        if (self.initial_state is None) == (self.fault is None):
            raise ValueError("exactly one of 'initial_state' or 'fault' must be given")
        return self


class IntegratorSpec(_Strict):
    rtol: float = Field(default=1e-10, gt=0)
    atol: float = Field(default=1e-12, gt=0)
    max_time: float = Field(default=200.0, gt=0)
    escape_bound: Optional[float] = Field(default=None, gt=0)


class AnalysisSpec(_Strict):
    max_swings: int = Field(default=50, ge=1)
    first_swing_acc: Literal["clearance", "peak"] = "clearance"


class ScenarioSpec(_Strict):
    name: Optional[str] = None
    model: ModelSpec
    start: StartSpec
    integrator: IntegratorSpec = IntegratorSpec()
    analysis: AnalysisSpec = AnalysisSpec()

    @model_validator(mode="after")
    def _fault_needs_smib(self):
        if self.start.fault is not None and self.model.smib is None:
            raise ValueError("a fault timeline requires an 'smib' model")
        return self


@dataclass(frozen=True)
class Scenario:
    name: str
    model: PolynomialOscillator
    init: State
    analysis: AnalysisOptions = field(default_factory=AnalysisOptions)
    spec: Optional[ScenarioSpec] = field(default=None, compare=False, repr=False)

    def with_kappa(self, kappa: float) -> "Scenario":
        return Scenario(self.name, self.model.with_kappa(kappa), self.init, self.analysis, self.spec)


def _fmt_loc(loc) -> str:
    return ".".join(str(p) for p in loc) or "<root>"


def scenario_from_spec(spec: ScenarioSpec, name: str = "scenario") -> Scenario:
    try:
        if spec.model.polynomial is not None:
            p = spec.model.polynomial
            model = PolynomialOscillator(p.damping, tuple(p.coeffs), p.kappa)
            smib = None
        else:
            m = spec.model.smib
            smib = SmibParams(H=m.H, D=m.D, omega_s=m.omega_s, Pm=m.Pm, Pmax=m.Pmax)
            model = from_smib_taylor(smib, m.order)

        if spec.start.initial_state is not None:
            s = spec.start.initial_state
            init = State(0.0, s.delta, s.omega)
        else:
            f = spec.start.fault
            mk = lambda pmax: SmibParams(H=smib.H, D=smib.D, omega_s=smib.omega_s, Pm=smib.Pm, Pmax=pmax)
            sc = SmibScenario(mk(f.pmax_pre), mk(f.pmax_fault), smib, f.t0, f.tc)
            d_c, w_c = clearing_state(sc)
            init = State(0.0, d_c - smib_equilibria(smib).delta_s, w_c)
    except GeacError as exc:
        raise ScenarioValidationError(f"{name}: {exc}") from exc
    except ValueError as exc:
        raise ScenarioValidationError(f"{name}: {exc}") from exc

    i = spec.integrator
    analysis = AnalysisOptions(
        max_swings=spec.analysis.max_swings,
        first_swing_acc=spec.analysis.first_swing_acc,
        integrator=IntegratorOptions(rtol=i.rtol, atol=i.atol, max_time=i.max_time, escape_bound=i.escape_bound),
    )
    return Scenario(spec.name or name, model, init, analysis, spec)


def scenario_from_dict(data: dict, name: str = "scenario") -> Scenario:
    try:
        spec = ScenarioSpec.model_validate(data)
    except ValidationError as exc:
        msgs = [f"{_fmt_loc(e['loc'])}: {e['msg']}" for e in exc.errors()]
        raise ScenarioValidationError(f"{name}: " + "; ".join(msgs)) from exc
    return scenario_from_spec(spec, name)


def load_scenario(path) -> Scenario:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ParseError(str(exc), path=path) from exc
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, path=path, line=exc.lineno, column=exc.colno) from exc
    if not isinstance(data, dict):
        raise ParseError("top level must be an object", path=path, line=1)
    return scenario_from_dict(data, name=path.stem)
