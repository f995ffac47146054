"""Generalized equal-area stability assessment for polynomial 1-DOF oscillators."""

from .classical import (
    SmibScenario,
    classical_margin,
    critical_angle_by_simulation,
    critical_clearing_angle,
    geac_bridge,
    smib_equilibria,
)
from .equilibria import Equilibrium, EquilibriumSet, Kind, escape_possible, find_equilibria
from .integrator import Event, EventKind, IntegratorOptions, Trajectory, integrate_with_events, interpolate_state
from .online import OnlineAssessor, push_sample
from .oracle import CriticalResult, OracleVerdict, bisect_critical, oracle_classify
from .oscillator import (
    PolynomialOscillator,
    SmibParams,
    State,
    eval_df,
    eval_f,
    from_smib_taylor,
    kinetic_energy,
    p_f,
    potential_energy,
    total_energy,
    vector_field,
)
from .swing import (
    AnalysisOptions,
    AssessmentReport,
    Direction,
    Overall,
    Swing,
    SwingRecord,
    Verdict,
    assess_post_fault,
    segment_swings,
    swing_margin,
)
from .batch import BatchResult, run_batch
from .output import emit_outputs, read_report, vector_field_grid
from .scenario import Scenario, load_scenario

__version__ = "0.1.0"
