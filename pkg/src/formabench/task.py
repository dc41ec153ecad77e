from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import Mapping

from .pddl import Domain, Problem, parse_domain, parse_problem


@dataclass(frozen=True)
class TaskInstance:
    """One benchmark task: images, instruction, domain and ground truth."""

    task_id: str
    images: tuple[Path, ...]
    instruction: str
    domain_text: str
    gt_problem_text: str
    aliases: Mapping[str, str] = field(default_factory=dict)

    @cached_property
    def domain(self) -> Domain:
        return parse_domain(self.domain_text)

    @cached_property
    def gt_problem(self) -> Problem:
        return parse_problem(self.gt_problem_text, self.domain)
