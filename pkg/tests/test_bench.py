import csv
import json
import random
import shutil

import pytest
from hypothesis import given, settings, strategies as st

from formabench.bench import (
    GeneratorConfig,
    GtUnsolvable,
    ManifestInvalid,
    ManifestMissing,
    RECORD_COLUMNS,
    RejectionExhausted,
    block_names,
    describe_goal,
    generate_blocksworld,
    load_dataset,
    run_eval,
    sample_towers,
    write_dataset,
    write_report,
)
from formabench.client import ClientError, OracleClient, OracleConfig
from formabench.metrics import aggregate, success_per_token
from formabench.pddl import GroundAtom
from formabench.planner import solve
from formabench.task import TaskInstance

import bw_oracle
from conftest import FIXTURES


def _towers_from_atoms(atoms):
    """Rebuild towers (bottom first) from on/ontable atoms."""
    above = {a.args[1]: a.args[0] for a in atoms if a.predicate == "on"}
    towers = []
    for base in sorted(a.args[0] for a in atoms if a.predicate == "ontable"):
        tower = [base]
        while tower[-1] in above:
            tower.append(above[tower[-1]])
        towers.append(tower)
    return towers


# ── loader ────────────────────────────────────────────────────────────────────


def test_load_fixture_in_manifest_order():
    tasks = load_dataset(FIXTURES / "dataset")
    assert [t.task_id for t in tasks] == ["t1", "t2"]
    assert [p.name for p in tasks[0].images] == ["front.png", "side.jpg"]
    assert tasks[1].images == () and tasks[1].aliases
    assert tasks[0].instruction and tasks[0].gt_problem.goal


def test_missing_manifest(tmp_path):
    with pytest.raises(ManifestMissing):
        load_dataset(tmp_path)


def _copy(tmp_path):
    target = tmp_path / "ds"
    shutil.copytree(FIXTURES / "dataset", target)
    return target


def test_missing_image_is_fatal_even_when_lenient(tmp_path):
    root = _copy(tmp_path)
    (root / "t1" / "images" / "side.jpg").unlink()
    for strict in (True, False):
        with pytest.raises(ManifestInvalid, match="side.jpg"):
            load_dataset(root, strict=strict)


@pytest.mark.parametrize("mutate", [
    lambda m: m["tasks"][0].pop("problem"),
    lambda m: m["tasks"][1].update(task_id="t1"),
    lambda m: m.update(tasks="nope"),
    lambda m: m["tasks"][0].update(extra=1),
])
def test_invalid_manifests(tmp_path, mutate):
    root = _copy(tmp_path)
    manifest = json.loads((root / "manifest.json").read_text())
    mutate(manifest)
    (root / "manifest.json").write_text(json.dumps(manifest))
    with pytest.raises(ManifestInvalid):
        load_dataset(root)


def test_malformed_json(tmp_path):
    root = _copy(tmp_path)
    (root / "manifest.json").write_text("{")
    with pytest.raises(ManifestInvalid):
        load_dataset(root)


def test_unsolvable_gt(tmp_path, caplog):
    root = _copy(tmp_path)
    path = root / "t2" / "problem.pddl"
    text = path.read_text()
    start = text.index("(:goal")
    path.write_text(text[:start] + "(:goal (and (on a a))))\n")
    with pytest.raises(GtUnsolvable) as info:
        load_dataset(root)
    assert info.value.task_id == "t2"
    tasks = load_dataset(root, strict=False)
    assert len(tasks) == 2 and "t2" in caplog.text


def test_uncompilable_gt_strict(tmp_path):
    root = _copy(tmp_path)
    (root / "t1" / "problem.pddl").write_text("(define (problem x) (:domain blocksworld)")
    with pytest.raises(GtUnsolvable):
        load_dataset(root)
    assert len(load_dataset(root, strict=False)) == 2


def test_write_then_load_round_trips(tmp_path):
    original = load_dataset(FIXTURES / "dataset") + [generate_blocksworld(GeneratorConfig(4, 1))]
    write_dataset(original, tmp_path / "copy", name="copy")
    loaded = load_dataset(tmp_path / "copy")
    assert [t.task_id for t in loaded] == [t.task_id for t in original]
    for a, b in zip(original, loaded):
        assert a.gt_problem == b.gt_problem and a.instruction == b.instruction
        assert dict(a.aliases) == dict(b.aliases)
        assert [p.read_bytes() for p in a.images] == [p.read_bytes() for p in b.images]


# ── generator ─────────────────────────────────────────────────────────────────


def test_block_names():
    assert block_names(3) == ["red_block", "blue_block", "green_block"]
    assert len(set(block_names(30))) == 30


@given(st.integers(1, 9), st.integers(0, 10**6))
def test_sample_towers_partitions_blocks(n, seed):
    blocks = block_names(n)
    towers = sample_towers(blocks, random.Random(seed))
    assert sorted(b for t in towers for b in t) == sorted(blocks)
    assert all(towers)


def test_same_seed_same_text():
    a = generate_blocksworld(GeneratorConfig(5, 42))
    b = generate_blocksworld(GeneratorConfig(5, 42))
    assert (a.gt_problem_text, a.instruction) == (b.gt_problem_text, b.instruction)
    assert a.gt_problem_text != generate_blocksworld(GeneratorConfig(5, 43)).gt_problem_text


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 6), st.integers(0, 10**6))
def test_generated_instances_are_well_formed(n, seed):
    task = generate_blocksworld(GeneratorConfig(n, seed))
    problem = task.gt_problem
    assert len(problem.objects) == n
    init_towers = _towers_from_atoms(problem.init)
    assert sorted(b for t in init_towers for b in t) == sorted(block_names(n))
    assert GroundAtom("handempty") in problem.init
    assert {GroundAtom("clear", (t[-1],)) for t in init_towers} == {
        a for a in problem.init if a.predicate == "clear"}
    goal_towers = _towers_from_atoms(problem.goal)
    assert sorted(b for t in goal_towers for b in t) == sorted(block_names(n))


def _goal_from_instruction(text):
    body = text.split("so that", 1)[1].rstrip(".")
    atoms = set()
    for clause in body.split(";"):
        words = clause.strip().split()
        first = words[1] + "_block"
        if clause.strip().endswith("on the table"):
            atoms.add(GroundAtom("ontable", (first,)))
        else:
            atoms.add(GroundAtom("on", (first, words[-2] + "_block")))
    return atoms


@pytest.mark.parametrize("seed", range(25))
def test_instruction_matches_goal(seed):
    task = generate_blocksworld(GeneratorConfig(2 + seed % 5, seed))
    assert _goal_from_instruction(task.instruction) == set(task.gt_problem.goal)


def test_describe_goal_orders_on_first():
    text = describe_goal([GroundAtom("ontable", ("red_block",)),
                          GroundAtom("on", ("blue_block", "red_block"))])
    assert text == ("Stack the blocks so that the blue block is on the red block; "
                    "the red block is on the table.")


def test_generated_instances_solvable():
    for seed in range(500):
        task = generate_blocksworld(GeneratorConfig(2 + seed % 6, seed))
        assert solve(task.domain, task.gt_problem).found, task.task_id


def test_min_plan_length():
    for seed in range(3):
        task = generate_blocksworld(GeneratorConfig(7, seed, min_plan_length=12))
        assert solve(task.domain, task.gt_problem).cost >= 12


@pytest.mark.parametrize("n", [2, 3, 4])
def test_generated_plan_matches_oracle(n):
    for seed in range(10):
        task = generate_blocksworld(GeneratorConfig(n, seed))
        p = task.gt_problem
        expected = bw_oracle.shortest_plan_length(map(str, p.init), map(str, p.goal))
        assert solve(task.domain, p).cost == expected


def test_rejection_exhausted():
    with pytest.raises(RejectionExhausted):
        generate_blocksworld(GeneratorConfig(2, 0, min_plan_length=50, max_attempts=5))


def test_generator_config_validation():
    with pytest.raises(ValueError):
        GeneratorConfig(0, 1)


# ── evaluation harness ───────────────────────────────────────────────────────


@pytest.fixture(scope="module")
def ten_tasks():
    return [generate_blocksworld(GeneratorConfig(3 + i % 3, 100 + i)) for i in range(10)]


def test_oracle_direct_p_perfect(ten_tasks):
    summary, records = run_eval(ten_tasks, ["direct-p"], OracleClient(ten_tasks))
    assert len(records) == 10
    assert summary["direct-p"]["simulation_success"] == 1.0
    assert summary["direct-p"]["init_f1"] == 1.0


def test_drop_all_init(ten_tasks):
    client = OracleClient(ten_tasks, OracleConfig(drop_init_rate=1.0))
    summary, records = run_eval(ten_tasks, ["direct-p"], client)
    assert summary["direct-p"]["compilation_success"] == 1.0
    # Without handempty no action is applicable, so only already-met goals succeed.
    for task, r in zip(ten_tasks, records):
        trivially_met = task.gt_problem.goal <= set()
        assert r.outcome.planner_success is trivially_met
    assert summary["direct-p"]["planner_success"] == 0.0


def test_client_failure_becomes_error_record(ten_tasks):
    class Flaky(OracleClient):
        def complete(self, request):
            if request.key.task_id == ten_tasks[2].task_id:
                raise ClientError("boom")
            return super().complete(request)

    tasks = ten_tasks[:5]
    summary, records = run_eval(tasks, ["direct-p"], Flaky(tasks))
    assert [r.task_id for r in records] == [t.task_id for t in tasks]
    bad = records[2]
    assert bad.error.startswith("ClientError") and not bad.outcome.simulation_success
    assert all(r.error is None and r.outcome.simulation_success
               for i, r in enumerate(records) if i != 2)
    assert summary["direct-p"]["simulation_success"] == pytest.approx(0.8)
    assert summary["direct-p"]["errors"] == 1


def test_direct_plan_planner_success_is_na(ten_tasks):
    summary, records = run_eval(ten_tasks[:3], ["direct-plan"], OracleClient(ten_tasks))
    assert all(r.outcome.planner_success is None for r in records)
    assert summary["direct-plan"]["planner_success"] is None
    assert summary["direct-plan"]["simulation_success"] == 1.0


def test_aliases_map_predictions_to_gt():
    # The oracle renames every object to *_obj; aliasing back restores perfect scores.
    task = generate_blocksworld(GeneratorConfig(3, 5))
    aliased = TaskInstance(task.task_id, (), task.instruction, task.domain_text,
                           task.gt_problem_text, {f"{b}_obj": b for b in block_names(3)})
    client = OracleClient([aliased], OracleConfig(rename_rate=1.0))
    summary, _ = run_eval([aliased], ["direct-p", "direct-plan"], client)
    for tag in ("direct-p", "direct-plan"):
        assert summary[tag]["simulation_success"] == 1.0
    assert summary["direct-p"]["objects_f1"] == 1.0


def test_report_layout_and_determinism(tmp_path, ten_tasks):
    client = OracleClient(ten_tasks, OracleConfig(drop_init_rate=0.3, rng_seed=4))
    tags = ["direct-p", "sg-p"]
    summary, records = run_eval(ten_tasks, tags, client, out=tmp_path / "a")
    shuffled = records[:]
    random.Random(0).shuffle(shuffled)
    write_report(aggregate(shuffled), shuffled, tmp_path / "b", meta={"catalog_version": "v1"})
    for name in ("summary.json", "records.csv"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()

    doc = json.loads((tmp_path / "a" / "summary.json").read_text())
    assert doc["meta"]["catalog_version"] == "v1"
    for tag in tags:
        group = [r for r in records if r.pipeline == tag]
        assert doc["pipelines"][tag]["success_per_token"] == success_per_token(group)

    rows = list(csv.DictReader((tmp_path / "a" / "records.csv").open()))
    assert tuple(rows[0]) == RECORD_COLUMNS
    assert [(r["task_id"], r["pipeline"]) for r in rows] == sorted(
        (r.task_id, r.pipeline) for r in records)
    logs = sorted(p.name for p in (tmp_path / "a" / "transcripts").iterdir())
    assert len(logs) == 20 and logs[0].endswith("__direct-p.json")
    log = json.loads((tmp_path / "a" / "transcripts" / logs[0]).read_text())
    assert log["calls"][0]["prompt"] and log["calls"][0]["response"]


def test_report_needs_records(tmp_path):
    with pytest.raises(ValueError):
        write_report({}, [], tmp_path)
