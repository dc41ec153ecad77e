"""STRIPS plan execution and goal checking."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Optional

from .grounder import GroundAction
from .pddl import ActionSchema, Domain, GroundAtom, Problem

State = frozenset  # frozenset[GroundAtom]

PRECONDITION_VIOLATED = "PreconditionViolated"
UNKNOWN_ACTION = "UnknownAction"
TYPE_MISMATCH = "TypeMismatch"
GOAL_NOT_SATISFIED = "GoalNotSatisfied"


@dataclass(frozen=True)
class Plan:
    steps: tuple[GroundAction, ...] = ()

    def __len__(self) -> int:
        return len(self.steps)

    def __iter__(self):
        return iter(self.steps)

    def to_text(self) -> str:
        return "".join(f"{step}\n" for step in self.steps)


@dataclass(frozen=True)
class FailureReason:
    kind: str
    atom: Optional[GroundAtom] = None
    detail: str = ""

    def __str__(self) -> str:
        if self.atom is not None:
            return f"{self.kind}({self.atom})"
        return f"{self.kind}({self.detail})" if self.detail else self.kind


@dataclass(frozen=True)
class SimulationResult:
    success: bool
    failed_step: Optional[int] = None
    failure_reason: Optional[FailureReason] = None
    trace: tuple[State, ...] = field(default=(), repr=False)


@dataclass(frozen=True)
class GroundedStep:
    preconditions: frozenset[GroundAtom]
    negative_preconditions: frozenset[GroundAtom]
    add: frozenset[GroundAtom]
    delete: frozenset[GroundAtom]


def bind(domain: Domain, schema: ActionSchema, args: tuple[str, ...]) -> GroundedStep:
    """Substitute ``args`` for the schema's parameters."""
    binding = {p.name: a for p, a in zip(schema.params, args)}

    def ground(lits) -> frozenset[GroundAtom]:
        return frozenset(GroundAtom(l.predicate, tuple(binding.get(t, t) for t in l.args))
                         for l in lits)

    return GroundedStep(
        preconditions=ground(l for l in schema.preconditions if l.positive),
        negative_preconditions=ground(l for l in schema.preconditions if not l.positive),
        add=ground(schema.add_effects),
        delete=ground(schema.del_effects),
    )


def evaluate_goal(problem: Problem, state: Iterable[GroundAtom]) -> bool:
    state = state if isinstance(state, (set, frozenset)) else set(state)
    return problem.goal <= state


def _type_error(domain: Domain, problem: Problem, schema: ActionSchema,
                step: GroundAction) -> Optional[str]:
    if len(step.args) != len(schema.params):
        return (f"{schema.name} takes {len(schema.params)} arguments, "
                f"got {len(step.args)}")
    types = {c.name: c.type for c in domain.constants}
    types.update(problem.object_types())
    for arg, param in zip(step.args, schema.params):
        if arg not in types:
            return f"unknown object {arg!r}"
        if types[arg] not in domain.types.declared() or \
                not domain.types.is_subtype(types[arg], param.type):
            return f"{arg!r} is not a {param.type}"
    return None


def simulate(domain: Domain, problem: Problem, plan: Plan | Iterable[GroundAction],
             goal: Optional[frozenset[GroundAtom]] = None) -> SimulationResult:
    """Run ``plan`` from ``problem.init`` and test the goal on the last state.

    ``goal`` overrides ``problem.goal`` (e.g. to check a predicted goal).
    """
    target = problem.goal if goal is None else frozenset(goal)
    state: frozenset[GroundAtom] = frozenset(problem.init)
    trace = [state]
    for index, step in enumerate(plan):
        schema = domain.action(step.action)
        if schema is None:
            return SimulationResult(False, index,
                                    FailureReason(UNKNOWN_ACTION, detail=step.action),
                                    tuple(trace))
        problem_msg = _type_error(domain, problem, schema, step)
        if problem_msg:
            return SimulationResult(False, index,
                                    FailureReason(TYPE_MISMATCH, detail=problem_msg),
                                    tuple(trace))
        grounded = bind(domain, schema, step.args)
        for atom in sorted(grounded.preconditions):
            if atom not in state:
                return SimulationResult(
                    False, index, FailureReason(PRECONDITION_VIOLATED, atom), tuple(trace))
        for atom in sorted(grounded.negative_preconditions):
            if atom in state:
                return SimulationResult(
                    False, index,
                    FailureReason(PRECONDITION_VIOLATED, atom, detail="must be false"),
                    tuple(trace))
        state = (state - grounded.delete) | grounded.add
        trace.append(state)
    if target <= state:
        return SimulationResult(True, None, None, tuple(trace))
    missing = min(target - state)
    return SimulationResult(False, None,
                            FailureReason(GOAL_NOT_SATISFIED, missing), tuple(trace))


def dump_trace(result: SimulationResult) -> str:
    """One canonical state per line."""
    return "".join(" ".join(sorted(map(str, s))) + "\n" for s in result.trace)
