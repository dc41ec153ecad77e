"""Task-level success, scene-level precision/recall/F1 and aggregation."""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field
from statistics import fmean
from typing import TYPE_CHECKING, Iterable, Mapping, NamedTuple, Optional

from .pddl import Domain, GroundAtom, Problem, TypedName, check_compilation
from .planner import FOUND, RESOURCE_LIMIT, SearchConfig, solve
from .grounder import GroundAction
from .validator import Plan, simulate

if TYPE_CHECKING:
    from .pipelines import PipelineOutput


class EmptyInput(ValueError):
    pass


class ZeroTokens(ZeroDivisionError):
    pass


class PRF(NamedTuple):
    precision: float
    recall: float
    f1: float


@dataclass(frozen=True)
class SceneScores:
    objects: PRF
    init: PRF
    goal: PRF

    def flat(self) -> dict[str, float]:
        out = {}
        for part in ("objects", "init", "goal"):
            p, r, f = getattr(self, part)
            out.update({f"{part}_precision": p, f"{part}_recall": r, f"{part}_f1": f})
        return out


@dataclass(frozen=True)
class TaskOutcome:
    compilation_success: bool
    planner_success: Optional[bool]
    simulation_success: bool
    resource_limited: bool = False

    def __post_init__(self) -> None:
        if self.simulation_success and self.planner_success is False:
            raise ValueError("simulation success requires planner success")
        if self.planner_success and not self.compilation_success:
            raise ValueError("planner success requires compilation success")


@dataclass(frozen=True)
class TokenUsage:
    prompt_tokens: int = 0
    response_tokens: int = 0
    calls: int = 0
    estimated: bool = False

    def __post_init__(self) -> None:
        if min(self.prompt_tokens, self.response_tokens, self.calls) < 0:
            raise ValueError("token counts must be nonnegative")

    @property
    def total(self) -> int:
        return self.prompt_tokens + self.response_tokens

    def __add__(self, other: "TokenUsage") -> "TokenUsage":
        return TokenUsage(self.prompt_tokens + other.prompt_tokens,
                          self.response_tokens + other.response_tokens,
                          self.calls + other.calls,
                          self.estimated or other.estimated)


@dataclass(frozen=True)
class EvalRecord:
    task_id: str
    pipeline: str
    outcome: TaskOutcome
    scene: Optional[SceneScores] = None
    tokens: TokenUsage = field(default_factory=TokenUsage)
    plan_length: Optional[int] = None
    error: Optional[str] = None


# ── scene level ──────────────────────────────────────────────────────────────


def prf(predicted: Iterable, truth: Iterable) -> PRF:
    """Set precision/recall/F1 with the empty-set conventions.

    Both empty gives 1/1/1; exactly one side empty gives 0/0/0.
    """
    pred, gt = set(predicted), set(truth)
    if not pred and not gt:
        return PRF(1.0, 1.0, 1.0)
    if not pred or not gt:
        return PRF(0.0, 0.0, 0.0)
    hits = len(pred & gt)
    p, r = hits / len(pred), hits / len(gt)
    return PRF(p, r, 2 * p * r / (p + r) if p + r > 0 else 0.0)


def _rename(atom: GroundAtom, aliases: Mapping[str, str]) -> GroundAtom:
    return GroundAtom(atom.predicate, tuple(aliases.get(a, a) for a in atom.args))


def scene_scores(pred: Problem, gt: Problem, aliases: Optional[Mapping[str, str]] = None,
                 match_types: bool = True) -> SceneScores:
    """Compare objects, init and goal of a predicted problem with ground truth.

    ``aliases`` maps predicted object names to ground-truth names. With
    ``match_types=False`` objects are compared by name only.
    """
    aliases = {k.lower(): v.lower() for k, v in (aliases or {}).items()}

    def obj_key(o: TypedName):
        return (aliases.get(o.name, o.name), o.type) if match_types else aliases.get(o.name, o.name)

    def gt_key(o: TypedName):
        return (o.name, o.type) if match_types else o.name

    return SceneScores(
        objects=prf(map(obj_key, pred.objects), map(gt_key, gt.objects)),
        init=prf((_rename(a, aliases) for a in pred.init), gt.init),
        goal=prf((_rename(a, aliases) for a in pred.goal), gt.goal),
    )


# ── task level ───────────────────────────────────────────────────────────────


@dataclass(frozen=True)
class Evaluation:
    outcome: TaskOutcome
    predicted: Optional[Problem] = None
    plan: Optional[Plan] = None


def evaluate_output(output: "PipelineOutput", domain: Domain, gt_problem: Problem,
                    planner_config: SearchConfig = SearchConfig(),
                    aliases: Optional[Mapping[str, str]] = None,
                    goal_source: str = "gt") -> Evaluation:
    """Score one pipeline output; also returns the parsed problem and plan."""
    aliases = {k.lower(): v.lower() for k, v in (aliases or {}).items()}

    if output.kind == "plan":
        if output.plan is None:
            return Evaluation(TaskOutcome(False, None, False))
        sim = simulate(domain, gt_problem, _alias_plan(output.plan, aliases))
        return Evaluation(TaskOutcome(True, None, sim.success), plan=output.plan)

    if output.problem_text is None:
        return Evaluation(TaskOutcome(False, False, False))
    compiled = check_compilation(output.problem_text, domain)
    if not compiled.ok:
        return Evaluation(TaskOutcome(False, False, False))
    predicted = compiled.problem
    result = solve(domain, predicted, planner_config)
    if result.outcome != FOUND:
        return Evaluation(TaskOutcome(True, False, False,
                                      resource_limited=result.outcome == RESOURCE_LIMIT),
                          predicted)
    goal = None
    if goal_source == "pred":
        goal = frozenset(_rename(a, aliases) for a in predicted.goal)
    sim = simulate(domain, gt_problem, _alias_plan(result.plan, aliases), goal=goal)
    return Evaluation(TaskOutcome(True, True, sim.success), predicted, result.plan)


def _alias_plan(plan: Plan, aliases: Mapping[str, str]) -> Plan:
    if not aliases:
        return plan
    return Plan(tuple(GroundAction(s.action, tuple(aliases.get(a, a) for a in s.args))
                      for s in plan))


def task_outcome(output: "PipelineOutput", domain: Domain, gt_problem: Problem,
                 planner_config: SearchConfig = SearchConfig(),
                 aliases: Optional[Mapping[str, str]] = None) -> TaskOutcome:
    return evaluate_output(output, domain, gt_problem, planner_config, aliases).outcome


# ── aggregation ──────────────────────────────────────────────────────────────


def success_per_token(records: list[EvalRecord]) -> float:
    """Mean simulation success rate divided by mean total tokens per task."""
    if not records:
        raise EmptyInput("no records")
    rate = fmean(float(r.outcome.simulation_success) for r in records)
    tokens = fmean(r.tokens.total for r in records)
    if tokens == 0:
        raise ZeroTokens("records carry no token usage")
    return rate / tokens


def _mean_or_none(values: list[float]) -> Optional[float]:
    return fmean(values) if values else None


def summarize(records: list[EvalRecord]) -> dict:
    """Means for one group of records (normally a single pipeline)."""
    records = sorted(records, key=lambda r: (r.task_id, r.pipeline))
    planner = [float(r.outcome.planner_success) for r in records
               if r.outcome.planner_success is not None]
    scenes = [r.scene.flat() for r in records if r.scene is not None]
    summary = {
        "tasks": len(records),
        "compilation_success": fmean(float(r.outcome.compilation_success) for r in records),
        "planner_success": _mean_or_none(planner),
        "simulation_success": fmean(float(r.outcome.simulation_success) for r in records),
        "resource_limited": sum(r.outcome.resource_limited for r in records),
        "errors": sum(r.error is not None for r in records),
        "scene_scored": len(scenes),
    }
    for key in SceneScores(PRF(0, 0, 0), PRF(0, 0, 0), PRF(0, 0, 0)).flat():
        summary[key] = _mean_or_none([s[key] for s in scenes])
    summary["prompt_tokens"] = fmean(r.tokens.prompt_tokens for r in records)
    summary["response_tokens"] = fmean(r.tokens.response_tokens for r in records)
    summary["total_tokens"] = fmean(r.tokens.total for r in records)
    summary["calls"] = fmean(r.tokens.calls for r in records)
    try:
        summary["success_per_token"] = success_per_token(records)
    except ZeroTokens:
        summary["success_per_token"] = None
    return summary


def aggregate(records: list[EvalRecord]) -> dict[str, dict]:
    """Per-pipeline means, keyed by pipeline tag in sorted order."""
    if not records:
        raise EmptyInput("no records to aggregate")
    groups: dict[str, list[EvalRecord]] = defaultdict(list)
    for r in records:
        groups[r.pipeline].append(r)
    return {tag: summarize(groups[tag]) for tag in sorted(groups)}
