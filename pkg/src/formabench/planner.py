"""Forward state-space search over grounded STRIPS, plus an external adapter.

States are encoded as integer bitmasks over the sorted list of reachable
atoms, so duplicate detection is a set lookup on a canonical key.
"""

from __future__ import annotations

import heapq
import logging
import os
import re
import shlex
import shutil
import subprocess
import tempfile
import time
from collections import deque
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from .grounder import GroundAction, GroundingConfig, ResourceLimit, enumerate_actions
from .pddl import Domain, GroundAtom, Problem, parse_domain, parse_problem, render_problem
from .validator import Plan, bind, simulate

log = logging.getLogger(__name__)

FOUND = "found"
UNSOLVABLE = "unsolvable"
RESOURCE_LIMIT = "resource_limit"


class ExternalPlannerUnavailable(Exception):
    pass


class ExternalPlannerFailure(Exception):
    pass


class PlanParseError(ValueError):
    pass


@dataclass(frozen=True)
class SearchConfig:
    mode: str = "optimal"  # "optimal" | "satisficing"
    max_nodes: int = 2_000_000
    max_seconds: float = 60.0
    allow_repeated_args: bool = False
    max_groundings: int = 200_000
    external_command: Optional[str] = None

    def __post_init__(self) -> None:
        if self.mode not in ("optimal", "satisficing"):
            raise ValueError(f"unknown search mode {self.mode!r}")
        if self.max_nodes <= 0 or self.max_seconds <= 0:
            raise ValueError("search limits must be positive")


@dataclass(frozen=True)
class PlanResult:
    outcome: str
    plan: Optional[Plan] = None
    cost: Optional[int] = None
    nodes_expanded: int = 0
    limit_kind: Optional[str] = None

    @property
    def found(self) -> bool:
        return self.outcome == FOUND


@dataclass
class _Task:
    actions: list[GroundAction]
    pre: list[int]
    neg: list[int]
    add: list[int]
    dele: list[int]
    init: int
    goal: int
    atoms: list[GroundAtom] = field(default_factory=list)


def _compile(domain: Domain, problem: Problem, config: SearchConfig) -> _Task:
    grounding = GroundingConfig(config.allow_repeated_args, config.max_groundings)
    ground_actions = enumerate_actions(domain, problem.objects, grounding)
    bound = [(ga, bind(domain, domain.action(ga.action), ga.args)) for ga in ground_actions]

    universe: set[GroundAtom] = set(problem.init) | set(problem.goal)
    for _, step in bound:
        universe |= step.preconditions | step.negative_preconditions | step.add | step.delete
    atoms = sorted(universe)
    index = {a: i for i, a in enumerate(atoms)}

    def mask(items) -> int:
        m = 0
        for a in items:
            m |= 1 << index[a]
        return m

    task = _Task([], [], [], [], [], mask(problem.init), mask(problem.goal), atoms)
    for ga, step in bound:
        task.actions.append(ga)
        task.pre.append(mask(step.preconditions))
        task.neg.append(mask(step.negative_preconditions))
        task.add.append(mask(step.add))
        task.dele.append(mask(step.delete))
    return task


def _extract(parents: dict[int, tuple[int, int]], state: int, task: _Task) -> Plan:
    steps = []
    while True:
        parent = parents[state]
        if parent[0] < 0:
            break
        steps.append(task.actions[parent[1]])
        state = parent[0]
    return Plan(tuple(reversed(steps)))


def _successors(task: _Task, state: int):
    for i in range(len(task.actions)):
        if state & task.pre[i] == task.pre[i] and not state & task.neg[i]:
            yield i, (state & ~task.dele[i]) | task.add[i]


def solve(domain: Domain, problem: Problem,
          config: SearchConfig = SearchConfig()) -> PlanResult:
    """Find a plan with the built-in engine.

    Optimal mode is breadth-first search (unit action costs) and returns a
    shortest plan; satisficing mode is greedy best-first on the number of
    unsatisfied goal atoms. Ties break in canonical action order.
    """
    if config.external_command:
        return solve_external(domain.source, render_problem(problem),
                              config.external_command, config.max_seconds)
    try:
        task = _compile(domain, problem, config)
    except ResourceLimit as exc:
        return PlanResult(RESOURCE_LIMIT, limit_kind=exc.kind)
    if config.mode == "optimal":
        return _bfs(task, config)
    return _gbfs(task, config)


def _bfs(task: _Task, config: SearchConfig) -> PlanResult:
    deadline = time.monotonic() + config.max_seconds
    goal = task.goal
    parents: dict[int, tuple[int, int]] = {task.init: (-1, -1)}
    if task.init & goal == goal:
        return PlanResult(FOUND, Plan(), 0, 0)
    frontier = deque([task.init])
    expanded = 0
    while frontier:
        if expanded >= config.max_nodes:
            return PlanResult(RESOURCE_LIMIT, nodes_expanded=expanded, limit_kind="nodes")
        if expanded & 1023 == 0 and time.monotonic() > deadline:
            return PlanResult(RESOURCE_LIMIT, nodes_expanded=expanded, limit_kind="time")
        state = frontier.popleft()
        expanded += 1
        for i, nxt in _successors(task, state):
            if nxt in parents:
                continue
            parents[nxt] = (state, i)
            if nxt & goal == goal:
                plan = _extract(parents, nxt, task)
                return PlanResult(FOUND, plan, len(plan), expanded)
            frontier.append(nxt)
    return PlanResult(UNSOLVABLE, nodes_expanded=expanded)


def _gbfs(task: _Task, config: SearchConfig) -> PlanResult:
    deadline = time.monotonic() + config.max_seconds
    goal = task.goal

    def h(state: int) -> int:
        return bin(goal & ~state).count("1")

    parents: dict[int, tuple[int, int]] = {task.init: (-1, -1)}
    counter = 0
    heap = [(h(task.init), counter, task.init)]
    expanded = 0
    while heap:
        if expanded >= config.max_nodes:
            return PlanResult(RESOURCE_LIMIT, nodes_expanded=expanded, limit_kind="nodes")
        if expanded & 1023 == 0 and time.monotonic() > deadline:
            return PlanResult(RESOURCE_LIMIT, nodes_expanded=expanded, limit_kind="time")
        _, _, state = heapq.heappop(heap)
        if state & goal == goal:
            plan = _extract(parents, state, task)
            return PlanResult(FOUND, plan, len(plan), expanded)
        expanded += 1
        for i, nxt in _successors(task, state):
            if nxt in parents:
                continue
            parents[nxt] = (state, i)
            counter += 1
            heapq.heappush(heap, (h(nxt), counter, nxt))
    return PlanResult(UNSOLVABLE, nodes_expanded=expanded)


# ── external planners ────────────────────────────────────────────────────────

# Fast Downward reports proven unsolvability with these exit codes.
UNSOLVABLE_EXIT_CODES = (11, 12)

_PLAN_LINE = re.compile(r"^\(\s*([^\s()]+)((?:\s+[^\s()]+)*)\s*\)$")


def parse_plan_text(text: str) -> Plan:
    """Parse a plan file: one ``(action args)`` per line, ``;`` comments."""
    steps = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith(";"):
            continue
        m = _PLAN_LINE.match(line)
        if not m:
            raise PlanParseError(f"line {lineno}: cannot parse plan step {raw!r}")
        steps.append(GroundAction(m.group(1), tuple(m.group(2).split())))
    return Plan(tuple(steps))


def solve_external(domain_text: str, problem_text: str, planner_command: str,
                   timeout: float = 60.0) -> PlanResult:
    """Run ``<command> <domain> <problem> <plan-out>`` and verify its plan."""
    argv = shlex.split(planner_command)
    if not argv or (shutil.which(argv[0]) is None and not os.access(argv[0], os.X_OK)):
        raise ExternalPlannerUnavailable(f"planner executable not found: {planner_command!r}")
    domain = parse_domain(domain_text)
    problem = parse_problem(problem_text, domain)
    with tempfile.TemporaryDirectory(prefix="formabench-") as tmp:
        tmpdir = Path(tmp)
        domain_path = tmpdir / "domain.pddl"
        problem_path = tmpdir / "problem.pddl"
        plan_path = tmpdir / "plan.txt"
        domain_path.write_text(domain_text, encoding="utf-8")
        problem_path.write_text(problem_text, encoding="utf-8")
        try:
            proc = subprocess.run(
                [*argv, str(domain_path), str(problem_path), str(plan_path)],
                cwd=tmpdir, capture_output=True, text=True, timeout=timeout)
        except subprocess.TimeoutExpired:
            return PlanResult(RESOURCE_LIMIT, limit_kind="time")
        except OSError as exc:
            raise ExternalPlannerUnavailable(str(exc)) from exc
        if not plan_path.exists():
            if proc.returncode in UNSOLVABLE_EXIT_CODES:
                return PlanResult(UNSOLVABLE)
            if proc.returncode != 0:
                raise ExternalPlannerFailure(
                    f"planner exited with {proc.returncode}: {proc.stderr[-500:]}")
            return PlanResult(UNSOLVABLE)
        plan = parse_plan_text(plan_path.read_text(encoding="utf-8"))
    result = simulate(domain, problem, plan)
    if not result.success:
        raise ExternalPlannerFailure(
            f"external plan does not validate: step {result.failed_step}, "
            f"{result.failure_reason}")
    return PlanResult(FOUND, plan, len(plan))
