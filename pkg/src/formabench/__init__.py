"""Evaluation harness for vision-language models as PDDL formalizers."""

from .pddl import (
    CompilationResult,
    Domain,
    GroundAtom,
    PDDLSyntaxError,
    Problem,
    SemanticError,
    TypedName,
    UnsupportedFeature,
    check_compilation,
    parse_domain,
    parse_problem,
    render_problem,
)
from .grounder import GroundAction, GroundingConfig, enumerate_actions, enumerate_atoms
from .validator import Plan, SimulationResult, evaluate_goal, simulate
from .planner import PlanResult, SearchConfig, solve, solve_external
from .metrics import (
    EvalRecord,
    SceneScores,
    TaskOutcome,
    TokenUsage,
    aggregate,
    scene_scores,
    success_per_token,
    task_outcome,
)
from .pipelines import PIPELINES, PipelineOutput, PromptCatalog, run_pipeline
from .task import TaskInstance

__all__ = [
    "CompilationResult",
    "Domain",
    "EvalRecord",
    "GroundAction",
    "GroundAtom",
    "GroundingConfig",
    "PDDLSyntaxError",
    "PIPELINES",
    "PipelineOutput",
    "Plan",
    "PlanResult",
    "Problem",
    "PromptCatalog",
    "SceneScores",
    "SearchConfig",
    "SemanticError",
    "SimulationResult",
    "TaskInstance",
    "TaskOutcome",
    "TokenUsage",
    "TypedName",
    "UnsupportedFeature",
    "aggregate",
    "check_compilation",
    "enumerate_actions",
    "enumerate_atoms",
    "evaluate_goal",
    "parse_domain",
    "parse_problem",
    "render_problem",
    "run_pipeline",
    "scene_scores",
    "simulate",
    "solve",
    "solve_external",
    "success_per_token",
    "task_outcome",
]

__version__ = "0.1.0"
