"""Reproduction study for the reference cubic SMIB approximant and its variant.

Four clearing states at ``delta = 0.13`` are assessed on two cubic models
that differ only in the quadratic coefficient. Reference per-swing margins
are kept here as data and compared cell by cell with ours. Taken literally
the clearing speeds carry far more kinetic energy than either well can
hold, so ``kappa`` (a multiplier on the restoring polynomial) is exposed
as a knob; no value of it is claimed to be the intended one.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from typing import Optional

from .oscillator import PolynomialOscillator, State
from .swing import AnalysisOptions, AssessmentReport, Verdict, assess_post_fault

DAMPING = 4.42e-4
SMIB_COEFFS = (0.2649, -0.0503, -0.04414)
DER_COEFFS = (0.2649, -0.0603, -0.04414)

CASES = (
    State(0.0, 0.13, -5.2779),
    State(0.0, 0.13, -8.3299),
    State(0.0, 0.13, -8.3315),
    State(0.0, 0.13, -9.4248),
)

# reference per-swing margins, swings 1..8 alternating B/F; None = not reached
REFERENCE = {
    "smib": (
        (3.6701, 0.2631, 3.4372, 0.4065, 3.9569, 0.5666, 4.5369, 0.7446),
        (3.3313, 0.00005, 2.4860, 0.1192, 2.9172, 0.2490, 3.3871, 0.3924),
        (3.3311, -0.0600, None, None, None, None, None, None),
        (3.1698, -0.1499, None, None, None, None, None, None),
    ),
    "der": (
        (4.6069, 0.1798, 4.2444, 0.3142, 4.8655, 0.4643, 5.5558, 0.6305),
        (4.2489, -0.1351, None, None, None, None, None, None),
        (4.2534, -0.1326, None, None, None, None, None, None),
        (4.0862, -0.2172, None, None, None, None, None, None),
    ),
}
REFERENCE_VERDICT = {
    "smib": ("Stable", "Stable", "Unstable", "Unstable"),
    "der": ("Stable", "Unstable", "Unstable", "Unstable"),
}


def reference_models(kappa: float = 1.0) -> dict[str, PolynomialOscillator]:
    return {
        "smib": PolynomialOscillator(DAMPING, SMIB_COEFFS, kappa),
        "der": PolynomialOscillator(DAMPING, DER_COEFFS, kappa),
    }


@dataclass(frozen=True)
class Cell:
    model: str
    case: int
    swing: int
    direction: str
    reference: Optional[float]
    ours: Optional[float]

    @property
    def delta(self) -> Optional[float]:
        if self.reference is None or self.ours is None or not math.isfinite(self.ours):
            return None
        return self.ours - self.reference


@dataclass(frozen=True)
class Study:
    kappa: float
    reports: dict[str, tuple[AssessmentReport, ...]]
    cells: tuple[Cell, ...]

    def verdicts(self, model: str) -> tuple[str, ...]:
        return tuple(r.overall.value for r in self.reports[model])

    def der_effect_on_case1(self) -> dict[str, Optional[bool]]:
        """Does the variant lower forward margins and raise backward ones (case 1)?"""
        a = self.reports["smib"][0].records
        b = self.reports["der"][0].records
        n = min(len(a), len(b))
        fwd = [(x.margin, y.margin) for x, y in zip(a[:n], b[:n]) if x.swing.direction.is_forward]
        bwd = [(x.margin, y.margin) for x, y in zip(a[:n], b[:n]) if not x.swing.direction.is_forward]
        stable = lambda pairs: pairs and all(math.isfinite(m) for p in pairs for m in p)
        return {
            "forward_decreases": all(y < x for x, y in fwd) if stable(fwd) else None,
            "backward_increases": all(y > x for x, y in bwd) if stable(bwd) else None,
        }


def run_study(kappa: float = 1.0, options: Optional[AnalysisOptions] = None, swings: int = 8) -> Study:
    opts = options or AnalysisOptions(max_swings=swings)
    reports = {}
    cells = []
    for key, model in reference_models(kappa).items():
        reps = tuple(assess_post_fault(model, init, opts) for init in CASES)
        reports[key] = reps
        for ci, rep in enumerate(reps):
            for si in range(swings):
                rec = rep.records[si] if si < len(rep.records) else None
                ours = rec.margin if rec is not None else None
                cells.append(Cell(key, ci + 1, si + 1, "B" if si % 2 == 0 else "F", REFERENCE[key][ci][si], ours))
    return Study(kappa, reports, tuple(cells))


def _cell(x: Optional[float]) -> str:
    if x is None:
        return "-"
    if not math.isfinite(x):
        return "inf" if x > 0 else "-inf"
    return f"{x:.4f}"


def format_study(study: Study) -> str:
    """CSV of per-cell deltas followed by ``#``-prefixed verdict summaries."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(("model", "case", "swing", "direction", "reference", "ours", "delta"))
    for c in study.cells:
        w.writerow((c.model, c.case, c.swing, c.direction, _cell(c.reference), _cell(c.ours), _cell(c.delta)))
    buf.write(f"# kappa = {study.kappa!r}\n")
    for key in ("smib", "der"):
        ours = ",".join(study.verdicts(key))
        pub = ",".join(REFERENCE_VERDICT[key])
        buf.write(f"# {key} verdicts: ours {ours}; reference {pub}\n")
    eff = study.der_effect_on_case1()
    buf.write(
        "# variant vs smib, case 1: forward margins lower: {}; backward margins higher: {}\n".format(
            eff["forward_decreases"], eff["backward_increases"]
        )
    )
    return buf.getvalue()


def unstable_swing(rep: AssessmentReport) -> Optional[int]:
    for r in rep.records:
        if r.verdict is Verdict.UNSTABLE:
            return r.swing.index
    return None
