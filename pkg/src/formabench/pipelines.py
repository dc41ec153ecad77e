"""The six prompting strategies, from direct problem generation to direct plans."""

from __future__ import annotations

import re
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from string import Template
from typing import Mapping, Optional, Protocol, Union

from .client import CallKey, ImagePart, Message, ModelRequest, ModelResponse, TextPart
from .grounder import GroundAction, GroundingConfig, enumerate_atoms
from .metrics import TokenUsage
from .pddl import Domain, GroundAtom, PDDLError, TypedName
from .task import TaskInstance
from .validator import Plan

PIPELINES = ("direct-p", "caption-p", "sg-p", "ap-sg-p", "ep-sg-p", "direct-plan")

# Templates whose prompt carries the task images; translation steps are text-only.
_VISUAL_TEMPLATES = {
    "direct-p.problem", "caption-p.caption", "sg-p.scene-graph", "ap-sg-p.objects",
    "ap-sg-p.verify", "ep-sg-p.objects", "ep-sg-p.verify", "direct-plan.plan",
}


class ExtractionError(ValueError):
    pass


class ModelClient(Protocol):
    max_in_flight: int

    def complete(self, request: ModelRequest) -> ModelResponse: ...


# ── prompt catalog ───────────────────────────────────────────────────────────


def default_catalog_dir() -> Path:
    return Path(str(resources.files("formabench") / "prompts" / "v1"))


def _bundled(name: str) -> str:
    return (resources.files("formabench") / "data" / name).read_text(encoding="utf-8")


class PromptCatalog:
    """Plain-text templates named ``<pipeline>.<step>.txt`` with ``$slot`` fields."""

    def __init__(self, directory: Union[Path, str, None] = None):
        self.directory = Path(directory) if directory else default_catalog_dir()
        version_file = self.directory / "VERSION"
        self.version = version_file.read_text().strip() if version_file.exists() else "unversioned"
        self.templates = {p.stem: p.read_text(encoding="utf-8")
                          for p in sorted(self.directory.glob("*.txt"))}
        self.problem_example = _bundled("hanoi_problem.pddl")
        self.plan_example = _bundled("hanoi_plan.txt")

    def render(self, name: str, slots: Mapping[str, object]) -> str:
        if name not in self.templates:
            raise KeyError(f"prompt catalog {self.directory} has no template {name!r}")
        return Template(self.templates[name]).substitute(slots)


# ── outputs ──────────────────────────────────────────────────────────────────


@dataclass(frozen=True)
class TranscriptEntry:
    step: str
    template: str
    slots: Mapping[str, object]
    prompt: str
    images: tuple[str, ...]
    response: str
    usage: TokenUsage

    def to_json(self) -> dict:
        return {
            "step": self.step,
            "template": self.template,
            "slots": dict(self.slots),
            "prompt": self.prompt,
            "images": list(self.images),
            "response": self.response,
            "usage": {"prompt_tokens": self.usage.prompt_tokens,
                      "response_tokens": self.usage.response_tokens,
                      "estimated": self.usage.estimated},
        }


@dataclass(frozen=True)
class SceneGraph:
    objects: frozenset[TypedName]
    atoms: frozenset[GroundAtom]

    def to_text(self) -> str:
        return "".join([f"obj {o}\n" for o in sorted(self.objects)]
                       + [f"atom {a}\n" for a in sorted(self.atoms)])


@dataclass(frozen=True)
class PipelineOutput:
    pipeline: str
    kind: str  # "problem" | "plan"
    problem_text: Optional[str] = None
    plan: Optional[Plan] = None
    transcript: tuple[TranscriptEntry, ...] = ()
    tokens: TokenUsage = field(default_factory=TokenUsage)
    intermediate: Optional[str] = None
    error: Optional[str] = None


# ── extraction ───────────────────────────────────────────────────────────────

_FENCE = re.compile(r"```[^\n`]*\n(.*?)```", re.DOTALL)
_PROBLEM_START = re.compile(r"\(\s*define\s*\(\s*problem", re.IGNORECASE)


def extract_pddl(text: str) -> str:
    """Pull the problem file out of a model response.

    Prefers the last fenced block containing ``(define (problem``; otherwise
    takes the balanced expression starting at the last such occurrence.
    """
    blocks = [b for b in _FENCE.findall(text) if _PROBLEM_START.search(b)]
    if blocks:
        return blocks[-1].strip() + "\n"
    starts = list(_PROBLEM_START.finditer(text))
    if not starts:
        raise ExtractionError("no (define (problem ...)) in response")
    start = starts[-1].start()
    depth = 0
    for i in range(start, len(text)):
        if text[i] == "(":
            depth += 1
        elif text[i] == ")":
            depth -= 1
            if depth == 0:
                return text[start:i + 1] + "\n"
    raise ExtractionError("unbalanced parentheses in problem definition")


_ACTION_LINE = re.compile(
    r"^\s*(?:(?:step\s*)?\d+\s*[.):]\s*|[-*]\s*)?\(\s*([^\s()]+)((?:\s+[^\s()]+)*)\s*\)",
    re.IGNORECASE)


def extract_plan(text: str, domain: Domain) -> Plan:
    """Collect ``(action args)`` lines naming domain actions, in order."""
    names = {a.name for a in domain.actions}
    steps = []
    for line in text.splitlines():
        if line.lstrip().startswith(";"):
            continue
        m = _ACTION_LINE.match(line)
        if m and m.group(1).lower() in names:
            steps.append(GroundAction(m.group(1), tuple(m.group(2).split())))
    if not steps:
        raise ExtractionError("no action lines in response")
    return Plan(tuple(steps))


_OBJ_LINE = re.compile(r"^\s*obj\s+([^\s()]+)\s+-\s+([^\s()]+)\s*$", re.IGNORECASE)
_ATOM_LINE = re.compile(r"^\s*atom\s+(\(.*\))\s*$", re.IGNORECASE)
_LABEL_LINE = re.compile(r"^\s*(\([^()]*\))\s*:\s*(\S+)", re.IGNORECASE)


def parse_objects(text: str, domain: Domain) -> list[TypedName]:
    declared = domain.types.declared()
    found = {}
    for line in text.splitlines():
        m = _OBJ_LINE.match(line)
        if m and m.group(2).lower() in declared:
            found.setdefault(m.group(1).lower(), TypedName(m.group(1).lower(), m.group(2).lower()))
    return sorted(found.values())


def parse_scene_graph(text: str, domain: Domain) -> SceneGraph:
    """Read ``obj``/``atom`` lines, dropping atoms that do not fit the domain."""
    objects = parse_objects(text, domain)
    names = {o.name for o in objects}
    atoms = set()
    for line in text.splitlines():
        m = _ATOM_LINE.match(line)
        if not m:
            continue
        try:
            atom = GroundAtom.parse(m.group(1))
        except PDDLError:
            continue
        if domain.predicate(atom.predicate, len(atom.args)) and set(atom.args) <= names:
            atoms.add(atom)
    return SceneGraph(frozenset(objects), frozenset(atoms))


def parse_labels(text: str) -> dict[GroundAtom, bool]:
    """``(pred args): True|False`` lines; anything but True counts as False."""
    labels = {}
    for line in text.splitlines():
        m = _LABEL_LINE.match(line)
        if not m:
            continue
        try:
            atom = GroundAtom.parse(m.group(1))
        except PDDLError:
            continue
        labels[atom] = m.group(2).strip(".,").lower() == "true"
    return labels


# ── orchestration ────────────────────────────────────────────────────────────


class _Run:
    def __init__(self, tag: str, task: TaskInstance, client: ModelClient,
                 catalog: PromptCatalog, temperature: float,
                 max_tokens: Mapping[str, int], default_max_tokens: int):
        self.tag = tag
        self.task = task
        self.client = client
        self.catalog = catalog
        self.temperature = temperature
        self.max_tokens = max_tokens
        self.default_max_tokens = default_max_tokens
        self.base_slots = {
            "domain": task.domain_text,
            "instruction": task.instruction,
            "image_count": len(task.images),
        }

    def prepare(self, step: str, extra: Mapping[str, object], template_step: Optional[str] = None,
                annotations: Optional[Mapping[str, object]] = None):
        template = f"{self.tag}.{template_step or step}"
        slots = {**self.base_slots, **extra}
        prompt = self.catalog.render(template, slots)
        kind = (template_step or step)
        images = self.task.images if template in _VISUAL_TEMPLATES else ()
        parts = (TextPart(prompt), *(ImagePart(path=Path(p)) for p in images))
        request = ModelRequest(
            messages=(Message("user", parts),),
            temperature=self.temperature,
            max_tokens=self.max_tokens.get(kind, self.default_max_tokens),
            key=CallKey(self.task.task_id, self.tag, step),
            annotations=dict(annotations or {}),
        )
        return template, slots, prompt, tuple(str(p) for p in images), request

    def call(self, step: str, extra: Mapping[str, object] = {},
             template_step: Optional[str] = None,
             annotations: Optional[Mapping[str, object]] = None) -> TranscriptEntry:
        template, slots, prompt, images, request = self.prepare(
            step, extra, template_step, annotations)
        response = self.client.complete(request)
        return TranscriptEntry(step, template, slots, prompt, images,
                               response.text, response.usage)


def _total(entries) -> TokenUsage:
    total = TokenUsage()
    for e in entries:
        total = total + e.usage
    return total


def run_pipeline(tag: str, task: TaskInstance, client: ModelClient,
                 catalog: Optional[PromptCatalog] = None, *,
                 grounding: GroundingConfig = GroundingConfig(),
                 temperature: float = 0.7, max_tokens: int = 1024,
                 step_max_tokens: Optional[Mapping[str, int]] = None) -> PipelineOutput:
    """Run one strategy on one task.

    Client errors propagate. A final response with no extractable payload
    yields an output with ``error`` set and no problem text or plan.
    """
    if tag not in PIPELINES:
        raise ValueError(f"unknown pipeline {tag!r}; expected one of {', '.join(PIPELINES)}")
    catalog = catalog or PromptCatalog()
    run = _Run(tag, task, client, catalog, temperature, step_max_tokens or {}, max_tokens)
    example = {"example": catalog.problem_example}
    entries: list[TranscriptEntry] = []
    intermediate = None

    if tag == "direct-plan":
        entries.append(run.call("plan", {"example": catalog.plan_example}))
        try:
            plan = extract_plan(entries[-1].response, task.domain)
        except ExtractionError as exc:
            return PipelineOutput(tag, "plan", transcript=tuple(entries),
                                  tokens=_total(entries), error=str(exc))
        return PipelineOutput(tag, "plan", plan=plan, transcript=tuple(entries),
                              tokens=_total(entries))

    if tag == "direct-p":
        entries.append(run.call("problem", example))
    elif tag == "caption-p":
        entries.append(run.call("caption"))
        intermediate = entries[-1].response
        entries.append(run.call("problem", {**example, "caption": intermediate}))
    elif tag == "sg-p":
        entries.append(run.call("scene-graph"))
        intermediate = entries[-1].response
        entries.append(run.call("problem", {**example, "scene_graph": intermediate}))
    else:
        entries.append(run.call("objects"))
        objects = parse_objects(entries[-1].response, task.domain)
        candidates = enumerate_atoms(task.domain, objects, grounding)
        if tag == "ap-sg-p":
            listing = "".join(f"{c}\n" for c in candidates)
            entries.append(run.call("verify", {"candidates": listing},
                                    annotations={"candidates": [str(c) for c in candidates]}))
            labels = parse_labels(entries[-1].response)
        else:
            verified = _verify_each(run, candidates)
            entries.extend(verified)
            labels = {}
            for cand, entry in zip(candidates, verified):
                labels[cand] = parse_labels(entry.response).get(cand, False)
        init = [c for c in candidates if labels.get(c, False)]
        intermediate = SceneGraph(frozenset(objects), frozenset(init)).to_text()
        entries.append(run.call("goal", {
            **example,
            "objects": "".join(f"{o}\n" for o in objects),
            "init": "".join(f"{a}\n" for a in init),
        }))

    try:
        problem_text = extract_pddl(entries[-1].response)
    except ExtractionError as exc:
        return PipelineOutput(tag, "problem", transcript=tuple(entries), tokens=_total(entries),
                              intermediate=intermediate, error=str(exc))
    return PipelineOutput(tag, "problem", problem_text=problem_text, transcript=tuple(entries),
                          tokens=_total(entries), intermediate=intermediate)


def _verify_each(run: _Run, candidates: list[GroundAtom]) -> list[TranscriptEntry]:
    def one(item):
        i, cand = item
        return run.call(f"verify-{i:04d}", {"candidates": f"{cand}\n"}, template_step="verify",
                        annotations={"candidates": [str(cand)]})

    workers = max(1, int(getattr(run.client, "max_in_flight", 1)))
    with ThreadPoolExecutor(max_workers=workers) as pool:
        # map() yields in submission order, independent of completion order
        return list(pool.map(one, enumerate(candidates)))
