from itertools import product

import pytest
from hypothesis import given, settings, strategies as st

from formabench.grounder import (
    GroundingConfig,
    ResourceLimit,
    enumerate_actions,
    enumerate_atoms,
)
from formabench.pddl import Problem, TypedName, parse_domain, parse_problem, render_problem


def blocks(*names):
    return [TypedName(n, "block") for n in names]


def brute_force_atoms(domain, objects, repeats):
    """Nested iteration over every slot, filtered by type and repetition."""
    out = set()
    for pred in domain.predicates:
        slots = [[o.name for o in objects if domain.types.is_subtype(o.type, p.type)]
                 for p in pred.params]
        for combo in product(*slots):
            if repeats or len(set(combo)) == len(combo):
                out.add("(" + " ".join((pred.name, *combo)) + ")")
    return out


def test_three_blocks(domain):
    atoms = enumerate_atoms(domain, blocks("a", "b", "c"))
    assert len(atoms) == 16
    by_pred = {}
    for a in atoms:
        by_pred[a.predicate] = by_pred.get(a.predicate, 0) + 1
    assert by_pred == {"on": 6, "ontable": 3, "clear": 3, "holding": 3, "handempty": 1}


def test_three_blocks_with_repeats(domain):
    atoms = enumerate_atoms(domain, blocks("a", "b", "c"), GroundingConfig(allow_repeated_args=True))
    assert len(atoms) == 19
    assert sum(a.predicate == "on" for a in atoms) == 9


def test_no_objects(domain):
    assert [str(a) for a in enumerate_atoms(domain, [])] == ["(handempty)"]
    assert enumerate_actions(domain, []) == []


def test_actions_three_blocks(domain):
    acts = enumerate_actions(domain, blocks("a", "b", "c"))
    counts = {}
    for a in acts:
        counts[a.action] = counts.get(a.action, 0) + 1
    assert len(acts) == 18
    assert counts == {"pick-up": 3, "put-down": 3, "stack": 6, "unstack": 6}


def test_actions_one_block(domain):
    # stack/unstack need two distinct blocks, so only pick-up and put-down remain
    acts = enumerate_actions(domain, blocks("a"))
    assert [str(a) for a in acts] == ["(pick-up a)", "(put-down a)"]
    brute = [(s.name, c) for s in domain.actions
             for c in product(["a"], repeat=len(s.params)) if len(set(c)) == len(c)]
    assert len(brute) == 2


def test_canonical_order(domain):
    atoms = enumerate_atoms(domain, blocks("c", "a", "b"))
    keys = [(a.predicate, a.args) for a in atoms]
    assert keys == sorted(keys)
    assert atoms == enumerate_atoms(domain, blocks("b", "c", "a"))


def test_type_filtering():
    d = parse_domain("""(define (domain d) (:types cube - block block table)
      (:predicates (on ?x - block ?y - block) (under ?t - table) (shiny ?c - cube)))""")
    objs = [TypedName("a", "cube"), TypedName("b", "block"), TypedName("t", "table")]
    atoms = {str(a) for a in enumerate_atoms(d, objs)}
    assert atoms == {"(on a b)", "(on b a)", "(under t)", "(shiny a)"}


def test_cap(domain):
    with pytest.raises(ResourceLimit):
        enumerate_atoms(domain, blocks(*"abcdefgh"), GroundingConfig(max_groundings=20))


@settings(max_examples=60, deadline=None)
@given(n=st.integers(0, 4), repeats=st.booleans())
def test_matches_brute_force(domain, n, repeats):
    objs = blocks(*"abcd"[:n])
    atoms = enumerate_atoms(domain, objs, GroundingConfig(allow_repeated_args=repeats))
    assert {str(a) for a in atoms} == brute_force_atoms(domain, objs, repeats)
    falling = n * (n - 1) if not repeats else n * n
    assert len(atoms) == falling + 3 * n + 1
    assert len(atoms) == len(set(atoms))


def test_atoms_type_check_in_init(domain):
    objs = blocks("a", "b", "c")
    atoms = enumerate_atoms(domain, objs)
    problem = Problem("p", "blocksworld", frozenset(objs), frozenset(atoms), frozenset(atoms[:1]))
    assert parse_problem(render_problem(problem), domain) == problem
