"""Verification and synthesis of stable joint plans for two-agent systems."""

from .crash import CrashScenario, crash_run, verify_crash_stability
from .errors import StablePlanError
from .generators import (
    Cnf,
    RandomSizes,
    assignment_to_plan,
    gen_grid,
    gen_random,
    reduce_3sat,
    sat_brute,
)
from .incomplete import (
    ConditionalPlan,
    decode_cplan,
    detection_monitor,
    encode_cplan,
    execute_conditional,
    lift_joint,
    verify_ii_efficiency,
    verify_ii_stability,
)
from .io import Instance, parse_plan, parse_system, serialize_plan, serialize_system
from .kstable import build_window_graph, sjpa, verify_kstable, window_deviation_check
from .model import (
    NULL,
    Configuration,
    GoalSet,
    JointOpenPlan,
    SystemModel,
    check_efficient,
    execute_open,
    is_goal,
    step,
    validate_system,
)
from .stability import brute_force_verify, mark_good, verify_detection, verify_stable
from .synth import SynthBudget, sjpp_solve

__version__ = "0.1.0"

__all__ = [
    "assignment_to_plan",
    "brute_force_verify",
    "build_window_graph",
    "check_efficient",
    "Cnf",
    "ConditionalPlan",
    "Configuration",
    "crash_run",
    "CrashScenario",
    "decode_cplan",
    "detection_monitor",
    "encode_cplan",
    "execute_conditional",
    "execute_open",
    "gen_grid",
    "gen_random",
    "GoalSet",
    "Instance",
    "is_goal",
    "JointOpenPlan",
    "lift_joint",
    "mark_good",
    "NULL",
    "parse_plan",
    "parse_system",
    "RandomSizes",
    "reduce_3sat",
    "sat_brute",
    "serialize_plan",
    "serialize_system",
    "sjpa",
    "sjpp_solve",
    "StablePlanError",
    "step",
    "SynthBudget",
    "SystemModel",
    "validate_system",
    "verify_crash_stability",
    "verify_detection",
    "verify_ii_efficiency",
    "verify_ii_stability",
    "verify_kstable",
    "verify_stable",
    "window_deviation_check",
]
