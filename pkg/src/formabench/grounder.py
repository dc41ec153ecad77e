"""Exhaustive, type-respecting grounding of predicates and actions."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Sequence

from .pddl import Domain, GroundAtom, TypedName

DEFAULT_MAX_GROUNDINGS = 10_000


class ResourceLimit(Exception):
    """Raised when grounding would exceed the configured cap."""

    def __init__(self, kind: str, message: str = ""):
        self.kind = kind
        super().__init__(message or f"resource limit reached: {kind}")


@dataclass(frozen=True)
class GroundingConfig:
    allow_repeated_args: bool = False
    max_groundings: int = DEFAULT_MAX_GROUNDINGS


@dataclass(frozen=True, order=True)
class GroundAction:
    action: str
    args: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "action", self.action.lower())
        object.__setattr__(self, "args", tuple(a.lower() for a in self.args))

    def __str__(self) -> str:
        return "(" + " ".join((self.action, *self.args)) + ")"


def _universe(domain: Domain, objects: Iterable[TypedName]) -> list[TypedName]:
    return sorted({*objects, *domain.constants})


def _candidates(domain: Domain, universe: Sequence[TypedName], type_name: str) -> list[str]:
    return [o.name for o in universe if domain.types.is_subtype(o.type, type_name)]


def _instantiate(domain: Domain, universe: Sequence[TypedName],
                 params: Sequence[TypedName], allow_repeats: bool):
    pools = [_candidates(domain, universe, p.type) for p in params]
    for combo in itertools.product(*pools):
        if not allow_repeats and len(set(combo)) < len(combo):
            continue
        yield combo


def enumerate_atoms(domain: Domain, objects: Iterable[TypedName],
                    config: GroundingConfig = GroundingConfig()) -> list[GroundAtom]:
    """Every type-compatible instantiation of every predicate, sorted.

    Tuples that repeat an object are skipped unless
    ``config.allow_repeated_args`` is set.
    """
    universe = _universe(domain, objects)
    atoms: set[GroundAtom] = set()
    for schema in domain.predicates:
        for combo in _instantiate(domain, universe, schema.params,
                                  config.allow_repeated_args):
            atoms.add(GroundAtom(schema.name, combo))
            if len(atoms) > config.max_groundings:
                raise ResourceLimit(
                    "groundings", f"more than {config.max_groundings} grounded atoms")
    return sorted(atoms)


def enumerate_actions(domain: Domain, objects: Iterable[TypedName],
                      config: GroundingConfig = GroundingConfig()) -> list[GroundAction]:
    universe = _universe(domain, objects)
    actions: set[GroundAction] = set()
    for schema in domain.actions:
        for combo in _instantiate(domain, universe, schema.params,
                                  config.allow_repeated_args):
            actions.add(GroundAction(schema.name, combo))
            if len(actions) > config.max_groundings:
                raise ResourceLimit(
                    "groundings", f"more than {config.max_groundings} ground actions")
    return sorted(actions)
