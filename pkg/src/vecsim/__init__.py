"""Deterministic simulator of risk-sensitive task fetching and offloading in
a vehicular edge computing network: distributed no-regret learners at the
vehicles, a convex risk-sensitive power allocator at the edge server, and a
delay-distribution statistics pipeline."""

__version__ = "0.1.0"

from .channel import ChannelVector, FadingQuantizer, Geometry, path_loss_linear, state_index
from .delays import DecisionProfile, DelayBreakdown, PhysicalParams
from .engine import (
    BestResponse,
    IterationRecord,
    RunResult,
    Scenario,
    SchemeKind,
    brute_force_best_response,
    evaluate_profile,
    run,
)
from .learning import AgentPopulation, AgentTables, LearningRates, RiskConfig, UtilityKind
from .metrics import CcdfCurve, RiskSummary, ccdf, entropic_risk, summarize, tail_crossing
from .power import (
    AllocationKind,
    AllocationProblem,
    PowerAllocation,
    objective_value,
    solve_allocation,
    stationarity_lhs,
)

__all__ = [
    "__version__",
    "AgentPopulation", "AgentTables", "AllocationKind", "AllocationProblem",
    "BestResponse", "CcdfCurve", "ChannelVector", "DecisionProfile",
    "DelayBreakdown", "FadingQuantizer", "Geometry", "IterationRecord",
    "LearningRates", "PhysicalParams", "PowerAllocation", "RiskConfig",
    "RiskSummary", "RunResult", "Scenario", "SchemeKind", "UtilityKind",
    "brute_force_best_response", "ccdf", "entropic_risk", "evaluate_profile",
    "objective_value", "path_loss_linear", "run", "solve_allocation",
    "state_index", "stationarity_lhs", "summarize", "tail_crossing",
]
