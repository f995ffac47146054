"""Command-line front end: ``geac <command> [options]``.

Exit codes: 0 success, 1 unstable verdict with ``--fail-on-unstable``,
2 input error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import math
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from .batch import run_batch
from .classical import (
    SmibScenario,
    classical_margin,
    critical_angle_by_simulation,
    critical_clearing_angle,
    geac_bridge,
    smib_equilibria,
)
from .errors import (
    DomainError,
    GeacError,
    InvalidOptions,
    IoError,
    ModelError,
    NoCriticalAngle,
    ParseError,
    SameVerdictAtEndpoints,
    ScenarioValidationError,
)
from .integrator import integrate_with_events
from .oracle import bisect_critical, oracle_classify
from .oscillator import PolynomialOscillator, State
from .output import emit_outputs, format_table, dumps_report, vector_field_grid
from .reproduce import format_study, run_study
from .scenario import Scenario, load_scenario
from .swing import AnalysisOptions, Overall, assess_post_fault

EXIT_OK, EXIT_UNSTABLE, EXIT_INPUT, EXIT_NUMERIC = 0, 1, 2, 3

INPUT_ERRORS = (ParseError, ScenarioValidationError, InvalidOptions, ModelError, DomainError,
                SameVerdictAtEndpoints, NoCriticalAngle, IoError, ValueError, OSError)


def _add_common(p: argparse.ArgumentParser):
    p.add_argument("--scenario", required=True, help="scenario JSON file")
    p.add_argument("--kappa", type=float, help="override the restoring-term multiplier")
    p.add_argument("--rtol", type=float)
    p.add_argument("--atol", type=float)
    p.add_argument("--max-swings", type=int)


def _add_output(p: argparse.ArgumentParser):
    p.add_argument("--out", help="path prefix for report and plot-data files")
    p.add_argument("--format", choices=("table", "structured"), default="table")
    p.add_argument("--fail-on-unstable", action="store_true")


def _apply_overrides(sc: Scenario, args) -> Scenario:
    if args.kappa is not None:
        sc = sc.with_kappa(args.kappa)
    integ = sc.analysis.integrator
    if args.rtol is not None:
        integ = replace(integ, rtol=args.rtol)
    if args.atol is not None:
        integ = replace(integ, atol=args.atol)
    analysis = replace(sc.analysis, integrator=integ)
    if args.max_swings is not None:
        analysis = replace(analysis, max_swings=args.max_swings)
    analysis.validate()
    return Scenario(sc.name, sc.model, sc.init, analysis, sc.spec)


def _scenario(args) -> Scenario:
    return _apply_overrides(load_scenario(args.scenario), args)


def _render(report, fmt, name=None) -> str:
    return format_table(report) if fmt == "table" else dumps_report(report, name)


def cmd_assess(args) -> int:
    sc = _scenario(args)
    report = assess_post_fault(sc.model, sc.init, sc.analysis)
    sys.stdout.write(_render(report, args.format, sc.name))
    if args.out:
        integ = replace(sc.analysis.integrator, max_turns=sc.analysis.max_swings, terminal_uep_cross=True)
        traj = integrate_with_events(sc.model, sc.init, integ)
        emit_outputs(report, args.format, args.out, model=sc.model, trajectory=traj, names=[sc.name])
    print(f"# overall: {report.overall.value}; min margin: {report.min_margin!r}", file=sys.stderr)
    if args.fail_on_unstable and report.overall is Overall.UNSTABLE:
        return EXIT_UNSTABLE
    return EXIT_OK


def cmd_batch(args) -> int:
    items = []
    for path in args.scenarios:
        try:
            items.append(_apply_overrides(load_scenario(path), args))
        except (ParseError, ScenarioValidationError, InvalidOptions):
            items.append(path)  # the worker reports the load error in order
    results = run_batch(items, args.parallel)
    unstable = False
    for res in results:
        if res.ok:
            print(f"{res.name}: {res.report.overall.value} (min margin {res.report.min_margin:.4f})")
            unstable |= res.report.overall is Overall.UNSTABLE
        else:
            print(f"{res.name}: ERROR {res.error_type}: {res.error}")
    if args.out:
        good = [r for r in results if r.ok]
        emit_outputs([r.report for r in good], args.format, args.out, names=[r.name for r in good])
    if any(not r.ok for r in results):
        return EXIT_INPUT
    if args.fail_on_unstable and unstable:
        return EXIT_UNSTABLE
    return EXIT_OK


def cmd_oracle(args) -> int:
    sc = _scenario(args)
    v = oracle_classify(sc.model, sc.init, sc.analysis.integrator, swing_horizon=args.swing_horizon)
    print(v.classification.value)
    if v.first_escape_event is not None:
        e = v.first_escape_event
        print(f"# first escape: {e.kind.value} at t={e.state.t!r} delta={e.state.delta!r} omega={e.state.omega!r}")
    if args.fail_on_unstable and v.classification is Overall.UNSTABLE:
        return EXIT_UNSTABLE
    return EXIT_OK


def cmd_critical(args) -> int:
    sc = _scenario(args)
    d0, w0 = sc.init.delta, sc.init.omega
    if args.family == "omega":
        sign = -1.0 if w0 < 0 else 1.0
        family = lambda c: State(0.0, d0, sign * c)
    else:
        family = lambda c: State(0.0, c, w0)
    res = bisect_critical(sc.model, family, tuple(args.interval), sc.analysis.integrator,
                          swing_horizon=args.swing_horizon, rel_tol=args.rel_tol)
    print(f"c_star {res.c_star!r}")
    print(f"bracket {res.lo!r} {res.hi!r}")
    print(f"verdicts {res.verdict_lo.value} {res.verdict_hi.value}")
    print(f"geac_margin {res.geac_margin!r}")
    print(f"cross_validated {res.cross_validated}")
    return EXIT_OK if res.cross_validated else EXIT_NUMERIC


def cmd_eac_classical(args) -> int:
    s = SmibScenario.from_limits(args.Pm, args.pmax_pre, args.pmax_fault, args.pmax_post,
                                 H=args.H, D=0.0, omega_s=args.omega_s)
    eq1, eq3 = smib_equilibria(s.pre), smib_equilibria(s.post)
    print(f"delta_s1 {eq1.delta_s!r}")
    print(f"delta_s3 {eq3.delta_s!r}")
    print(f"delta_u3 {eq3.delta_u1!r}")
    dc_closed = critical_clearing_angle(s)
    print(f"critical_angle {dc_closed!r}")
    if args.simulate:
        print(f"critical_angle_simulated {critical_angle_by_simulation(s)!r}")
    if args.delta_c is not None:
        a_acc, a_dec, m = classical_margin(s, args.delta_c)
        print(f"a_acc {a_acc!r}")
        print(f"a_dec {a_dec!r}")
        print(f"margin {m!r}")
        for n in args.orders:
            model, init = geac_bridge(s, args.delta_c, n)
            rep = assess_post_fault(model, init, AnalysisOptions(max_swings=1))
            first_fwd = next((r.margin for r in rep.records if r.swing.direction.is_forward), math.nan)
            print(f"geac_margin_N{n} {first_fwd!r}")
    return EXIT_OK


def cmd_reproduce(args) -> int:
    study = run_study(args.kappa)
    text = format_study(study)
    sys.stdout.write(text)
    if args.out:
        path = Path(args.out + "_reproduction.csv")
        try:
            path.parent.mkdir(parents=True, exist_ok=True)
            path.write_text(text)
        except OSError as exc:
            raise IoError(f"cannot write {path}: {exc}") from exc
    return EXIT_OK


def cmd_vector_field(args) -> int:
    if args.scenario:
        model = load_scenario(args.scenario).model
    else:
        model = PolynomialOscillator(args.damping, tuple(args.coeffs))
    if args.kappa is not None:
        model = model.with_kappa(args.kappa)
    grid = vector_field_grid(model, tuple(args.delta_range), tuple(args.omega_range), args.n)
    target = args.out + "_field.dat" if args.out else sys.stdout
    np.savetxt(target, grid, fmt="%.17g", header="delta omega ddelta domega")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="geac", description="Swing-by-swing equal-area stability assessment")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("assess", help="assess one scenario")
    _add_common(p)
    _add_output(p)
    p.set_defaults(func=cmd_assess)

    p = sub.add_parser("batch", help="assess many scenarios")
    p.add_argument("scenarios", nargs="+", help="scenario JSON files")
    p.add_argument("--kappa", type=float)
    p.add_argument("--rtol", type=float)
    p.add_argument("--atol", type=float)
    p.add_argument("--max-swings", type=int)
    p.add_argument("--parallel", type=int, default=1)
    _add_output(p)
    p.set_defaults(func=cmd_batch)

    p = sub.add_parser("oracle", help="classify by direct simulation")
    _add_common(p)
    p.add_argument("--swing-horizon", type=int)
    p.add_argument("--fail-on-unstable", action="store_true")
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("critical", help="bisect the stability boundary along a family of initial states")
    _add_common(p)
    p.add_argument("--family", choices=("omega", "delta"), default="omega",
                   help="omega: (delta0, sign(omega0)*c); delta: (c, omega0)")
    p.add_argument("--interval", type=float, nargs=2, required=True, metavar=("LO", "HI"))
    p.add_argument("--swing-horizon", type=int)
    p.add_argument("--rel-tol", type=float, default=1e-6)
    p.set_defaults(func=cmd_critical)

    p = sub.add_parser("eac-classical", help="classical SMIB closed forms")
    p.add_argument("--Pm", type=float, required=True)
    p.add_argument("--pmax-pre", type=float, required=True)
    p.add_argument("--pmax-fault", type=float, required=True)
    p.add_argument("--pmax-post", type=float, required=True)
    p.add_argument("--H", type=float, default=5.0)
    p.add_argument("--omega-s", type=float, default=2 * math.pi * 60)
    p.add_argument("--delta-c", type=float, help="clearing angle for margin evaluation")
    p.add_argument("--orders", type=int, nargs="*", default=[3, 5, 7, 9], help="Taylor orders for the GEAC bridge")
    p.add_argument("--simulate", action="store_true", help="also bisect the critical angle in the time domain")
    p.set_defaults(func=cmd_eac_classical)

    p = sub.add_parser("reproduce-paper", help="reference four-case study with per-cell deltas")
    p.add_argument("--kappa", type=float, default=1.0)
    p.add_argument("--out")
    p.set_defaults(func=cmd_reproduce)

    p = sub.add_parser("vector-field", help="phase-plane vector-field grid")
    p.add_argument("--scenario")
    p.add_argument("--coeffs", type=float, nargs="+", default=[0.2649, -0.0503, -0.04414])
    p.add_argument("--damping", type=float, default=4.42e-4)
    p.add_argument("--kappa", type=float)
    p.add_argument("--delta-range", type=float, nargs=2, default=[-4.0, 3.0])
    p.add_argument("--omega-range", type=float, nargs=2, default=[-1.0, 1.0])
    p.add_argument("--n", type=int, default=25)
    p.add_argument("--out")
    p.set_defaults(func=cmd_vector_field)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except INPUT_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except GeacError as exc:
        print(f"numerical failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (ArithmeticError, np.linalg.LinAlgError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
