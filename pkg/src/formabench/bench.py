"""Datasets, the Blocksworld task generator, evaluation runs and reports."""

from __future__ import annotations

import csv
import io
import json
import logging
import random
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Optional, Sequence

import jsonschema

from .client import ClientError
from .metrics import EvalRecord, TaskOutcome, aggregate, evaluate_output, scene_scores
from .pddl import GroundAtom, PDDLError, Problem, TypedName, render_problem
from .pipelines import PipelineOutput, PromptCatalog, run_pipeline
from .planner import FOUND, SearchConfig, solve
from .task import TaskInstance

log = logging.getLogger(__name__)

MANIFEST = "manifest.json"


class ManifestMissing(FileNotFoundError):
    pass


class ManifestInvalid(ValueError):
    pass


class GtUnsolvable(ValueError):
    def __init__(self, task_id: str, detail: str = ""):
        self.task_id = task_id
        super().__init__(f"ground truth of task {task_id!r} is not solvable {detail}".strip())


class RejectionExhausted(RuntimeError):
    pass


def bundled_domain() -> str:
    return (resources.files("formabench") / "data" / "blocksworld.pddl").read_text(encoding="utf-8")


# ── dataset format ───────────────────────────────────────────────────────────

MANIFEST_SCHEMA = {
    "type": "object",
    "required": ["name", "version", "tasks"],
    "properties": {
        "name": {"type": "string"},
        "version": {"type": "string"},
        "tasks": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["task_id", "instruction", "domain", "problem"],
                "properties": {
                    "task_id": {"type": "string", "minLength": 1},
                    "images": {"type": "array", "items": {"type": "string"}},
                    "instruction": {"type": "string"},
                    "domain": {"type": "string"},
                    "problem": {"type": "string"},
                    "aliases": {"type": "string"},
                },
                "additionalProperties": False,
            },
        },
    },
}


@dataclass(frozen=True)
class DatasetManifest:
    name: str
    version: str
    tasks: tuple[dict, ...]


def read_manifest(directory: Path) -> DatasetManifest:
    path = Path(directory) / MANIFEST
    if not path.is_file():
        raise ManifestMissing(f"no {MANIFEST} in {directory}")
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
        jsonschema.validate(data, MANIFEST_SCHEMA)
    except json.JSONDecodeError as exc:
        raise ManifestInvalid(f"{path}: {exc}") from exc
    except jsonschema.ValidationError as exc:
        raise ManifestInvalid(f"{path}: {exc.message} at {list(exc.absolute_path)}") from exc
    ids = [t["task_id"] for t in data["tasks"]]
    dupes = sorted({i for i in ids if ids.count(i) > 1})
    if dupes:
        raise ManifestInvalid(f"{path}: duplicate task ids {dupes}")
    return DatasetManifest(data["name"], data["version"], tuple(data["tasks"]))


def load_dataset(directory: Path | str, strict: bool = True,
                 planner_config: SearchConfig = SearchConfig()) -> list[TaskInstance]:
    """Load tasks in manifest order.

    Strict mode requires every gt problem to compile and be solvable;
    lenient mode logs those violations instead. Missing files are always fatal.
    """
    root = Path(directory)
    manifest = read_manifest(root)
    tasks = []
    for entry in manifest.tasks:
        def resolve(rel: str) -> Path:
            path = root / rel
            if not path.is_file():
                raise ManifestInvalid(f"task {entry['task_id']!r}: missing file {path}")
            return path

        images = tuple(resolve(p) for p in entry.get("images", []))
        aliases = {}
        if "aliases" in entry:
            raw = json.loads(resolve(entry["aliases"]).read_text(encoding="utf-8"))
            if not isinstance(raw, dict) or not all(isinstance(v, str) for v in raw.values()):
                raise ManifestInvalid(f"task {entry['task_id']!r}: aliases must map names to names")
            aliases = {k.lower(): v.lower() for k, v in raw.items()}
        task = TaskInstance(
            task_id=entry["task_id"],
            images=images,
            instruction=resolve(entry["instruction"]).read_text(encoding="utf-8").strip(),
            domain_text=resolve(entry["domain"]).read_text(encoding="utf-8"),
            gt_problem_text=resolve(entry["problem"]).read_text(encoding="utf-8"),
            aliases=aliases,
        )
        try:
            _check_task(task, planner_config)
        except (PDDLError, GtUnsolvable) as exc:
            if strict:
                if isinstance(exc, GtUnsolvable):
                    raise
                raise GtUnsolvable(task.task_id, f"({exc})") from exc
            log.warning("task %s: %s", task.task_id, exc)
        tasks.append(task)
    return tasks


def _check_task(task: TaskInstance, planner_config: SearchConfig) -> None:
    result = solve(task.domain, task.gt_problem, planner_config)
    if result.outcome != FOUND:
        raise GtUnsolvable(task.task_id, f"(planner: {result.outcome})")


def write_dataset(tasks: Sequence[TaskInstance], directory: Path | str,
                  name: str = "generated", version: str = "1") -> Path:
    """Write tasks in the on-disk layout read by :func:`load_dataset`."""
    root = Path(directory)
    root.mkdir(parents=True, exist_ok=True)
    entries = []
    for task in tasks:
        tdir = root / task.task_id
        (tdir / "images").mkdir(parents=True, exist_ok=True)
        (tdir / "instruction.txt").write_text(task.instruction + "\n", encoding="utf-8")
        (tdir / "domain.pddl").write_text(task.domain_text, encoding="utf-8")
        (tdir / "problem.pddl").write_text(task.gt_problem_text, encoding="utf-8")
        entry = {
            "task_id": task.task_id,
            "images": [],
            "instruction": f"{task.task_id}/instruction.txt",
            "domain": f"{task.task_id}/domain.pddl",
            "problem": f"{task.task_id}/problem.pddl",
        }
        for img in task.images:
            target = tdir / "images" / Path(img).name
            if Path(img).resolve() != target.resolve():
                target.write_bytes(Path(img).read_bytes())
            entry["images"].append(f"{task.task_id}/images/{target.name}")
        if task.aliases:
            (tdir / "aliases.json").write_text(
                json.dumps(dict(sorted(task.aliases.items())), indent=2) + "\n", encoding="utf-8")
            entry["aliases"] = f"{task.task_id}/aliases.json"
        entries.append(entry)
    manifest = {"name": name, "version": version, "tasks": entries}
    (root / MANIFEST).write_text(json.dumps(manifest, indent=2) + "\n", encoding="utf-8")
    return root


# ── Blocksworld generator ────────────────────────────────────────────────────

COLORS = ("red", "blue", "green", "yellow", "orange", "purple",
          "white", "black", "pink", "brown", "gray", "cyan")


@dataclass(frozen=True)
class GeneratorConfig:
    num_blocks: int
    rng_seed: int = 0
    min_plan_length: Optional[int] = None
    max_attempts: int = 1000

    def __post_init__(self) -> None:
        if self.num_blocks < 1:
            raise ValueError("num_blocks must be >= 1")


def block_names(n: int) -> list[str]:
    names = [f"{c}_block" for c in COLORS[:n]]
    names += [f"block{i}" for i in range(len(COLORS) + 1, n + 1)]
    return names


def sample_towers(blocks: Sequence[str], rng: random.Random) -> list[list[str]]:
    """Place blocks one at a time on the table or on a current tower top."""
    towers: list[list[str]] = []
    for block in blocks:
        choice = rng.randrange(len(towers) + 1)
        if choice == len(towers):
            towers.append([block])
        else:
            towers[choice].append(block)
    return towers


def tower_atoms(towers: Sequence[Sequence[str]]) -> set[GroundAtom]:
    atoms = set()
    for tower in towers:
        atoms.add(GroundAtom("ontable", (tower[0],)))
        for below, above in zip(tower, tower[1:]):
            atoms.add(GroundAtom("on", (above, below)))
    return atoms


def _phrase(name: str) -> str:
    return "the " + name.replace("_", " ")


def describe_goal(goal: Sequence[GroundAtom]) -> str:
    """Instruction text listing ``on`` relations, then ``ontable`` ones."""
    ordered = sorted(goal, key=lambda a: (a.predicate != "on", a.args))
    clauses = []
    for atom in ordered:
        if atom.predicate == "on":
            clauses.append(f"{_phrase(atom.args[0])} is on {_phrase(atom.args[1])}")
        elif atom.predicate == "ontable":
            clauses.append(f"{_phrase(atom.args[0])} is on the table")
        else:
            raise ValueError(f"cannot describe goal atom {atom}")
    return "Stack the blocks so that " + "; ".join(clauses) + "."


def generate_blocksworld(config: GeneratorConfig,
                         planner_config: SearchConfig = SearchConfig()) -> TaskInstance:
    rng = random.Random(config.rng_seed)
    blocks = block_names(config.num_blocks)
    domain_text = bundled_domain()
    task_id = f"bw-n{config.num_blocks}-s{config.rng_seed}"
    for _ in range(config.max_attempts):
        init_towers = sample_towers(blocks, rng)
        goal_towers = sample_towers(blocks, rng)
        init = tower_atoms(init_towers)
        init |= {GroundAtom("clear", (t[-1],)) for t in init_towers}
        init.add(GroundAtom("handempty"))
        goal = tower_atoms(goal_towers)
        problem = Problem(
            name=task_id,
            domain_name="blocksworld",
            objects=frozenset(TypedName(b, "block") for b in blocks),
            init=frozenset(init),
            goal=frozenset(goal),
        )
        task = TaskInstance(task_id, (), describe_goal(sorted(goal)), domain_text,
                            render_problem(problem))
        if config.min_plan_length:
            result = solve(task.domain, task.gt_problem, planner_config)
            if not result.found or result.cost < config.min_plan_length:
                continue
        return task
    raise RejectionExhausted(
        f"no instance with {config.num_blocks} blocks met the constraints after "
        f"{config.max_attempts} attempts")


# ── evaluation ───────────────────────────────────────────────────────────────


@dataclass(frozen=True)
class RunResult:
    record: EvalRecord
    output: Optional[PipelineOutput]


def evaluate_task(task: TaskInstance, tag: str, client, catalog: PromptCatalog,
                  planner_config: SearchConfig = SearchConfig(),
                  **pipeline_kwargs) -> RunResult:
    """Run one pipeline on one task and score it; client errors become records."""
    try:
        output = run_pipeline(tag, task, client, catalog, **pipeline_kwargs)
    except ClientError as exc:
        failed = TaskOutcome(False, None if tag == "direct-plan" else False, False)
        return RunResult(EvalRecord(task.task_id, tag, failed,
                                    error=f"ClientError: {type(exc).__name__}: {exc}"), None)
    evaluation = evaluate_output(output, task.domain, task.gt_problem, planner_config,
                                 task.aliases)
    scene = None
    if evaluation.predicted is not None:
        scene = scene_scores(evaluation.predicted, task.gt_problem, task.aliases)
    plan_length = len(evaluation.plan) if evaluation.plan is not None else None
    record = EvalRecord(task.task_id, tag, evaluation.outcome, scene, output.tokens,
                        plan_length, output.error)
    return RunResult(record, output)


def run_eval(tasks: Sequence[TaskInstance], tags: Sequence[str], client,
             planner_config: SearchConfig = SearchConfig(), out: Path | str | None = None,
             catalog: Optional[PromptCatalog] = None, workers: Optional[int] = None,
             **pipeline_kwargs) -> tuple[dict, list[EvalRecord]]:
    """Evaluate every (task, pipeline) pair and optionally write the report."""
    catalog = catalog or PromptCatalog()
    jobs = [(task, tag) for task in tasks for tag in tags]
    workers = workers or max(1, int(getattr(client, "max_in_flight", 1)))

    def job(item):
        task, tag = item
        return evaluate_task(task, tag, client, catalog, planner_config, **pipeline_kwargs)

    with ThreadPoolExecutor(max_workers=workers) as pool:
        results = list(pool.map(job, jobs))
    records = [r.record for r in results]
    summary = aggregate(records)
    if out is not None:
        write_report(summary, records, out,
                     transcripts={(r.record.task_id, r.record.pipeline): r.output
                                  for r in results if r.output is not None},
                     meta={"catalog_version": catalog.version})
    return summary, records


# ── reports ──────────────────────────────────────────────────────────────────

RECORD_COLUMNS = (
    "task_id", "pipeline", "compilation_success", "planner_success", "simulation_success",
    "resource_limited", "objects_precision", "objects_recall", "objects_f1",
    "init_precision", "init_recall", "init_f1", "goal_precision", "goal_recall", "goal_f1",
    "prompt_tokens", "response_tokens", "total_tokens", "calls", "tokens_estimated",
    "plan_length", "error",
)


def _cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def record_row(r: EvalRecord) -> dict[str, str]:
    row = {
        "task_id": r.task_id,
        "pipeline": r.pipeline,
        "compilation_success": r.outcome.compilation_success,
        "planner_success": r.outcome.planner_success,
        "simulation_success": r.outcome.simulation_success,
        "resource_limited": r.outcome.resource_limited,
        "prompt_tokens": r.tokens.prompt_tokens,
        "response_tokens": r.tokens.response_tokens,
        "total_tokens": r.tokens.total,
        "calls": r.tokens.calls,
        "tokens_estimated": r.tokens.estimated,
        "plan_length": r.plan_length,
        "error": r.error,
    }
    if r.scene is not None:
        row.update(r.scene.flat())
    return {k: _cell(row.get(k)) for k in RECORD_COLUMNS}


def write_report(summary: dict, records: Sequence[EvalRecord], path: Path | str,
                 transcripts: Optional[dict] = None, meta: Optional[dict] = None) -> list[Path]:
    """Write ``summary.json``, ``records.csv`` and per-task transcript logs."""
    if not records:
        raise ValueError("no records to report")
    out = Path(path)
    out.mkdir(parents=True, exist_ok=True)
    ordered = sorted(records, key=lambda r: (r.task_id, r.pipeline))
    document = {"meta": dict(meta or {}), "pipelines": summary}
    summary_path = out / "summary.json"
    summary_path.write_text(json.dumps(document, indent=2, sort_keys=True) + "\n", encoding="utf-8")

    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=RECORD_COLUMNS, lineterminator="\n")
    writer.writeheader()
    for r in ordered:
        writer.writerow(record_row(r))
    records_path = out / "records.csv"
    records_path.write_text(buf.getvalue(), encoding="utf-8")

    written = [summary_path, records_path]
    if transcripts:
        tdir = out / "transcripts"
        tdir.mkdir(exist_ok=True)
        for (task_id, tag), output in sorted(transcripts.items()):
            log_path = tdir / f"{task_id}__{tag}.json"
            payload = {
                "task_id": task_id,
                "pipeline": tag,
                "error": output.error,
                "intermediate": output.intermediate,
                "problem_text": output.problem_text,
                "plan": output.plan.to_text() if output.plan is not None else None,
                "calls": [e.to_json() for e in output.transcript],
            }
            log_path.write_text(json.dumps(payload, indent=2) + "\n", encoding="utf-8")
            written.append(log_path)
    return written
