import random
import sys
from pathlib import Path

import pytest

from formabench.bench import GeneratorConfig, bundled_domain, generate_blocksworld
from formabench.pddl import parse_problem
from formabench.planner import (
    FOUND,
    RESOURCE_LIMIT,
    UNSOLVABLE,
    ExternalPlannerFailure,
    ExternalPlannerUnavailable,
    PlanParseError,
    SearchConfig,
    parse_plan_text,
    solve,
    solve_external,
)
from formabench.validator import GOAL_NOT_SATISFIED, simulate

from bw_oracle import shortest_plan_length
from conftest import SUSSMAN_PLAN

FAKE = f"{sys.executable} {Path(__file__).parent / 'fake_planner.py'}"

ONE_BLOCK = """(define (problem one) (:domain blocksworld) (:objects a - block)
  (:init (ontable a) (clear a) (handempty)) (:goal (on a a)))"""


def test_goal_in_init(domain):
    p = parse_problem(ONE_BLOCK.replace("(on a a)", "(ontable a)"), domain)
    r = solve(domain, p)
    assert r.outcome == FOUND and r.cost == 0 and len(r.plan) == 0


def test_sussman_optimal(domain, sussman):
    r = solve(domain, sussman)
    assert r.outcome == FOUND and r.cost == 6
    assert [str(s) for s in r.plan] == SUSSMAN_PLAN
    assert simulate(domain, sussman, r.plan).success


def test_sussman_oracle_agrees(sussman):
    assert shortest_plan_length(map(str, sussman.init), map(str, sussman.goal)) == 6


@pytest.mark.parametrize("repeats", [False, True])
def test_unsolvable_one_block(domain, repeats):
    p = parse_problem(ONE_BLOCK, domain)
    r = solve(domain, p, SearchConfig(allow_repeated_args=repeats))
    assert r.outcome == UNSOLVABLE
    assert r.nodes_expanded == 2  # {ontable a}, {holding a}


def test_satisficing_finds_valid_plan(domain, sussman):
    r = solve(domain, sussman, SearchConfig(mode="satisficing"))
    assert r.found and r.cost >= 6
    assert simulate(domain, sussman, r.plan).success


def test_node_limit(domain):
    task = generate_blocksworld(GeneratorConfig(6, 4))
    r = solve(task.domain, task.gt_problem, SearchConfig(max_nodes=5))
    assert r.outcome == RESOURCE_LIMIT and r.limit_kind == "nodes"


def test_time_limit(domain):
    task = generate_blocksworld(GeneratorConfig(8, 2, min_plan_length=10))
    r = solve(task.domain, task.gt_problem, SearchConfig(max_seconds=1e-9))
    assert r.outcome == RESOURCE_LIMIT and r.limit_kind == "time"


def test_invalid_config():
    with pytest.raises(ValueError):
        SearchConfig(mode="anytime")
    with pytest.raises(ValueError):
        SearchConfig(max_nodes=0)


def test_deterministic(domain, sussman):
    assert solve(domain, sussman) == solve(domain, sussman)


@pytest.mark.parametrize("seed", range(40))
def test_optimal_matches_oracle_and_validates(seed):
    rng = random.Random(seed)
    task = generate_blocksworld(GeneratorConfig(rng.randint(1, 5), seed))
    problem = task.gt_problem
    r = solve(task.domain, problem)
    assert r.found
    assert r.cost == shortest_plan_length(map(str, problem.init), map(str, problem.goal))
    assert simulate(task.domain, problem, r.plan).success
    if len(r.plan) > 0:
        truncated = simulate(task.domain, problem, r.plan.steps[:-1])
        assert truncated.failure_reason.kind == GOAL_NOT_SATISFIED


# ── external adapter ──────────────────────────────────────────────────────────


def test_external_sussman(domain, sussman_text):
    r = solve_external(bundled_domain(), sussman_text, FAKE, timeout=60)
    assert r.found and r.cost == 6


def test_external_via_search_config(domain, sussman):
    r = solve(domain, sussman, SearchConfig(external_command=FAKE))
    assert r.found and r.cost == solve(domain, sussman).cost


def test_external_unavailable(sussman_text):
    with pytest.raises(ExternalPlannerUnavailable):
        solve_external(bundled_domain(), sussman_text, "/nonexistent/downward", timeout=5)


def test_external_crash(sussman_text):
    with pytest.raises(ExternalPlannerFailure):
        solve_external(bundled_domain(), sussman_text, FAKE + " --mode=crash", timeout=60)


def test_external_garbage(sussman_text):
    with pytest.raises(PlanParseError):
        solve_external(bundled_domain(), sussman_text, FAKE + " --mode=garbage", timeout=60)


def test_external_invalid_plan_rejected(sussman_text):
    with pytest.raises(ExternalPlannerFailure, match="does not validate"):
        solve_external(bundled_domain(), sussman_text, FAKE + " --mode=invalid", timeout=60)


def test_external_unsolvable(domain):
    r = solve_external(bundled_domain(), ONE_BLOCK, FAKE, timeout=60)
    assert r.outcome == UNSOLVABLE


def test_plan_comment_line():
    assert len(parse_plan_text("(pick-up a)\n; cost = 6 (unit cost)\n")) == 1
