"""Probability accrual and conflict resolution over leveled hypothesis spaces.

Evidence sits at level 0 with prior probabilities; hypotheses above claim
support from the level below.  The package builds such spaces, keeps their
conflict structure explicit and closed, accrues probabilities upward,
enumerates and ranks the maximal consistent interpretations of any level, and
bounds how much probability an interpretation can leave on the table.
"""

from .accrual import AccrualResult, accrue_all, accrue_level, accrue_one
from .bound import (
    BoundReport,
    MonteCarloEstimate,
    limit_check,
    monte_carlo_region_rate,
    simplex_volume,
    suboptimality_bound,
    with_monte_carlo,
    worst_case_bound,
)
from .errors import (
    AccrualError,
    BoundError,
    HypergridError,
    InternalError,
    PipelineError,
    ResolutionError,
    ScenarioError,
    SpaceError,
)
from .pipeline import RunReport, build_space, emit_report, prepare_space, run_pipeline
from .resolution import (
    HypothesisTree,
    Interpretation,
    RankedInterpretations,
    StrategyComparison,
    compare_strategies,
    enumerate_interpretations,
    extract_best_tree,
    greedy_strongest_first,
    rank_interpretations,
)
from .scenario import (
    EvidenceItem,
    HypothesisItem,
    Scenario,
    ScenarioOptions,
    bundled_scenario_names,
    generate_random_scenario,
    load_bundled_scenario,
    load_scenario,
    parse_scenario,
    serialize_scenario,
)
from .space import (
    ConflictEdge,
    Hypothesis,
    HypothesisSpace,
    RuleViolation,
    ValidationReport,
    validate_space,
)

__version__ = "0.1.0"

__all__ = [
    "AccrualError",
    "AccrualResult",
    "BoundError",
    "BoundReport",
    "ConflictEdge",
    "EvidenceItem",
    "Hypothesis",
    "HypothesisItem",
    "HypothesisSpace",
    "HypothesisTree",
    "HypergridError",
    "InternalError",
    "Interpretation",
    "MonteCarloEstimate",
    "PipelineError",
    "RankedInterpretations",
    "ResolutionError",
    "RuleViolation",
    "RunReport",
    "Scenario",
    "ScenarioError",
    "ScenarioOptions",
    "SpaceError",
    "StrategyComparison",
    "ValidationReport",
    "accrue_all",
    "accrue_level",
    "accrue_one",
    "build_space",
    "bundled_scenario_names",
    "compare_strategies",
    "emit_report",
    "enumerate_interpretations",
    "extract_best_tree",
    "generate_random_scenario",
    "greedy_strongest_first",
    "limit_check",
    "load_bundled_scenario",
    "load_scenario",
    "monte_carlo_region_rate",
    "parse_scenario",
    "prepare_space",
    "rank_interpretations",
    "run_pipeline",
    "serialize_scenario",
    "simplex_volume",
    "suboptimality_bound",
    "validate_space",
    "with_monte_carlo",
    "worst_case_bound",
]
