"""Report and plot-data emission.

Three kinds of files:

* ``<prefix>.csv``: one row per swing, values rounded to 4 decimals.
* ``<prefix>.json``: the full :class:`AssessmentReport`; floats are written
  with their shortest round-trip representation, so reading it back
  reproduces every field bit for bit. Non-finite numbers are the strings
  ``"inf"``, ``"-inf"`` and ``"nan"``.
* ``<prefix>_*.dat``: whitespace-separated numeric columns with a ``#``
  header line, readable by gnuplot or ``numpy.loadtxt``.
"""

from __future__ import annotations

import csv
import io
import json
import math
from pathlib import Path
from typing import Optional, Sequence, Union

import numpy as np

from .equilibria import EquilibriumSet, find_equilibria
from .errors import IoError, ParseError
from .integrator import Event, EventKind, Trajectory
from .oscillator import PolynomialOscillator, State, eval_f, p_f
from .swing import AssessmentReport, Direction, Overall, Swing, SwingRecord, Verdict

TABLE_HEADER = ("swing_index", "direction", "a_acc", "a_dec", "a_sur", "margin", "verdict")
REPORT_FORMAT_VERSION = 1


# -- tabular -----------------------------------------------------------------


def _fixed(x: Optional[float]) -> str:
    if x is None:
        return ""
    if not math.isfinite(x):
        return "nan" if math.isnan(x) else ("inf" if x > 0 else "-inf")
    s = f"{x:.4f}"
    return "0.0000" if s == "-0.0000" else s


def table_rows(report: AssessmentReport) -> list[tuple[str, ...]]:
    return [
        (
            str(r.swing.index),
            r.swing.direction.value,
            _fixed(r.a_acc),
            _fixed(r.a_dec),
            _fixed(r.a_sur),
            _fixed(r.margin),
            r.verdict.value,
        )
        for r in report.records
    ]


def format_table(report: AssessmentReport) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(TABLE_HEADER)
    w.writerows(table_rows(report))
    return buf.getvalue()


# -- structured --------------------------------------------------------------


def _num(x: Optional[float]):
    if x is None:
        return None
    x = float(x)
    if math.isfinite(x):
        return x
    return "nan" if math.isnan(x) else ("inf" if x > 0 else "-inf")


def _unnum(v) -> Optional[float]:
    return None if v is None else float(v)


def _state_doc(s: Optional[State]):
    return None if s is None else {"t": _num(s.t), "delta": _num(s.delta), "omega": _num(s.omega)}


def _state_of(d) -> Optional[State]:
    return None if d is None else State(_unnum(d["t"]), _unnum(d["delta"]), _unnum(d["omega"]))


def _event_doc(e: Event):
    return {"kind": e.kind.value, "direction": e.direction, "level": _num(e.level), "state": _state_doc(e.state)}


def _event_of(d) -> Event:
    return Event(EventKind(d["kind"]), _state_of(d["state"]), d["direction"], _unnum(d["level"]))


def report_to_dict(report: AssessmentReport, name: Optional[str] = None) -> dict:
    records = []
    for r in report.records:
        sw = r.swing
        records.append(
            {
                "swing_index": sw.index,
                "direction": sw.direction.value,
                "a_acc": _num(r.a_acc),
                "a_dec": _num(r.a_dec),
                "a_sur": _num(r.a_sur),
                "margin": _num(r.margin),
                "verdict": r.verdict.value,
                "start": _event_doc(sw.start),
                "end": _event_doc(sw.end),
                "peak_ke_state": _state_doc(sw.peak_ke_state),
            }
        )
    doc = {
        "format_version": REPORT_FORMAT_VERSION,
        "overall": report.overall.value,
        "min_margin": _num(report.min_margin),
        "terminating_event": report.terminating_event.value,
        "initial_state": _state_doc(report.initial_state),
        "records": records,
    }
    if name is not None:
        doc = {"name": name, **doc}
    return doc


def report_from_dict(doc: dict) -> AssessmentReport:
    try:
        records = []
        for d in doc["records"]:
            swing = Swing(
                d["swing_index"],
                Direction(d["direction"]),
                _event_of(d["start"]),
                _event_of(d["end"]),
                _state_of(d["peak_ke_state"]),
            )
            records.append(
                SwingRecord(
                    swing,
                    _unnum(d["a_acc"]),
                    _unnum(d["a_dec"]),
                    _unnum(d["a_sur"]),
                    _unnum(d["margin"]),
                    Verdict(d["verdict"]),
                )
            )
        return AssessmentReport(
            tuple(records),
            Overall(doc["overall"]),
            _unnum(doc["min_margin"]),
            EventKind(doc["terminating_event"]),
            _state_of(doc.get("initial_state")),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"malformed report: {exc!r}") from exc


def dumps_report(report: AssessmentReport, name: Optional[str] = None) -> str:
    return json.dumps(report_to_dict(report, name), indent=2, allow_nan=False) + "\n"


def read_report(path) -> AssessmentReport:
    path = Path(path)
    try:
        doc = json.loads(path.read_text())
    except OSError as exc:
        raise ParseError(str(exc), path=path) from exc
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, path=path, line=exc.lineno, column=exc.colno) from exc
    return report_from_dict(doc)


# -- plot data ---------------------------------------------------------------


def _plot_range(eq: EquilibriumSet, pad: float = 0.25) -> tuple[float, float]:
    lo = eq.left_uep.location if eq.left_uep else -2.0
    hi = eq.right_uep.location if eq.right_uep else 2.0
    span = hi - lo
    return lo - pad * span, hi + pad * span


def pf_curve(model: PolynomialOscillator, delta_range: Optional[tuple[float, float]] = None, n: int = 401) -> np.ndarray:
    """Columns: delta, P_f(delta)."""
    lo, hi = delta_range or _plot_range(find_equilibria(model))
    d = np.linspace(lo, hi, n)
    return np.column_stack([d, p_f(model, d)])


def equilibria_markers(eq: EquilibriumSet) -> np.ndarray:
    """Columns: delta, P_f (zero), kind code (0 SEP, 1 UEP, 2 degenerate)."""
    codes = {"SEP": 0, "UEP": 1, "Degenerate": 2}
    return np.array([[e.location, 0.0, codes[e.kind.value]] for e in eq.all], dtype=float).reshape(-1, 3)


def trajectory_samples(traj: Trajectory) -> np.ndarray:
    """Columns: t, delta, omega, P_domega (= a0*omega)."""
    w = traj.y[:, 1]
    return np.column_stack([traj.t, traj.y[:, 0], w, traj.model.a0 * w])


def vector_field_grid(
    model: PolynomialOscillator,
    delta_range: tuple[float, float] = (-4.0, 3.0),
    omega_range: tuple[float, float] = (-1.0, 1.0),
    n: Union[int, tuple[int, int]] = 25,
) -> np.ndarray:
    """Columns: delta, omega, d(delta)/dt, d(omega)/dt over a regular grid."""
    nd, nw = (n, n) if isinstance(n, int) else n
    d, w = np.meshgrid(np.linspace(*delta_range, nd), np.linspace(*omega_range, nw), indexing="ij")
    d, w = d.ravel(), w.ravel()
    return np.column_stack([d, w, w, -model.a0 * w - eval_f(model, d)])


def _write_dat(path: Path, header: str, data: np.ndarray):
    np.savetxt(path, data, fmt="%.17g", header=header)


# -- entry point -------------------------------------------------------------


def _write(path: Path, text: str):
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text)
    except OSError as exc:
        raise IoError(f"cannot write {path}: {exc}") from exc


def emit_outputs(
    reports: Union[AssessmentReport, Sequence[AssessmentReport]],
    fmt: str,
    path_prefix,
    model: Optional[PolynomialOscillator] = None,
    trajectory: Optional[Trajectory] = None,
    names: Optional[Sequence[str]] = None,
) -> list[Path]:
    """Write reports as ``table`` (CSV) or ``structured`` (JSON) files.

    A single report goes to ``<prefix>.csv|json``; a batch to
    ``<prefix>-<i>.csv|json`` in input order. With a ``model`` the plot
    files ``_pf.dat``, ``_equilibria.dat`` and ``_field.dat`` are added, and
    ``_trajectory.dat`` when a trajectory is given.
    """
    if fmt not in ("table", "structured"):
        raise ValueError(f"unknown format {fmt!r}")
    prefix = Path(path_prefix)
    single = isinstance(reports, AssessmentReport)
    items = [reports] if single else list(reports)
    names = list(names) if names is not None else [None] * len(items)
    ext = ".csv" if fmt == "table" else ".json"
    written = []
    for i, (rep, name) in enumerate(zip(items, names)):
        stem = prefix if single else prefix.with_name(f"{prefix.name}-{i:03d}")
        path = stem.with_name(stem.name + ext)
        _write(path, format_table(rep) if fmt == "table" else dumps_report(rep, name))
        written.append(path)

    if model is not None:
        eq = find_equilibria(model)
        plots = [
            ("_pf.dat", "delta P_f", pf_curve(model, _plot_range(eq))),
            ("_equilibria.dat", "delta P_f kind(0=SEP,1=UEP,2=degenerate)", equilibria_markers(eq)),
            ("_field.dat", "delta omega ddelta domega", vector_field_grid(model)),
        ]
        if trajectory is not None:
            plots.append(("_trajectory.dat", "t delta omega P_domega", trajectory_samples(trajectory)))
        for suffix, header, data in plots:
            path = prefix.with_name(prefix.name + suffix)
            try:
                path.parent.mkdir(parents=True, exist_ok=True)
                _write_dat(path, header, data)
            except OSError as exc:
                raise IoError(f"cannot write {path}: {exc}") from exc
            written.append(path)
    return written
