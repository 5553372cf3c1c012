import pytest

from meettree.amalg import (
    amalgamate_total,
    brute_force_amalgam_k1,
    check_amalgam,
    down_close_triple,
    joint_embed,
    nonap_instance,
    nonap_witness,
    problem_from_sides,
)
from meettree.corpus import random_amalg_problems
from meettree.errors import PreconditionError
from meettree.pautomorph import PartialAutomorphism
from meettree.tree import MeetTree, arity, chain


def _fixed(parents):
    tree = MeetTree.from_parents(parents)
    return PartialAutomorphism(tree, {x: x for x in tree.labels})


def test_total_amalgam_keeps_sides_apart():
    base = _fixed({"b": None})
    left = _fixed({"b": None, "x": "b"})
    right = _fixed({"b": None, "x": "b"})
    problem = problem_from_sides(base, left, right)
    solution = amalgamate_total(problem)
    assert len(solution.tree) == 3
    assert dict(solution.right_map)["x"] == "x'"
    assert check_amalgam(problem, solution) == []


def test_total_amalgam_needs_total_maps():
    base = _fixed({"b": None})
    left = PartialAutomorphism(chain("b", "x"), {"b": "b"})
    right = _fixed({"b": None, "y": "b"})
    with pytest.raises(PreconditionError):
        amalgamate_total(problem_from_sides(base, left, right))


def test_agreement_is_checked_against_the_base():
    base = PartialAutomorphism(MeetTree.from_parents({"r": None, "a": "r", "b": "r"}), {"r": "r", "a": "b", "b": "a"})
    left = PartialAutomorphism(base.tree, {"r": "r", "a": "a", "b": "b"})
    with pytest.raises(PreconditionError):
        amalgamate_total(problem_from_sides(base, left, base))


def test_down_closure_grows_the_base():
    base = _fixed({"b": None})
    left = _fixed({"z": None, "b": "z"})
    right = _fixed({"b": None, "y": "b"})
    closed = down_close_triple(problem_from_sides(base, left, right))
    assert set(closed.base.tree.labels) == {"b", "z"}
    assert closed.base.tree.parent("b") == "z"


def test_joint_embedding_adds_a_common_minimum():
    solution = joint_embed(_fixed({"a": None}), _fixed({"a": None}))
    assert len(solution.tree) == 3
    assert len(solution.tree.children(solution.tree.root)) == 2


def test_seeded_total_problems_amalgamate():
    for problem in random_amalg_problems(6, seed=17, max_size=5):
        solution = amalgamate_total(problem)
        assert check_amalgam(problem, solution) == []


def test_arity_bound_blocks_the_amalgam():
    problem, bounded = nonap_witness(2, max_size=5)
    assert not bounded.found
    assert bounded.report.nodes > 0
    _, free = nonap_witness(2, max_size=5, arity_bounded=False)
    assert free.found
    assert arity(free.solution.tree) == 3
    assert check_amalgam(problem, free.solution) == []


def test_failure_instance_needs_k_at_least_two():
    with pytest.raises(PreconditionError):
        nonap_instance(1)


def test_brute_force_digest_is_reproducible():
    problem = nonap_instance(2)
    first = brute_force_amalgam_k1(problem, 4, 2)
    second = brute_force_amalgam_k1(problem, 4, 2)
    assert first.report.frontier_digest == second.report.frontier_digest
    assert first.report.elapsed is None


@pytest.mark.slow
def test_thousand_seeded_problems_amalgamate():
    failures = []
    for index, problem in enumerate(random_amalg_problems(1000, seed=17, max_size=5)):
        if check_amalgam(problem, amalgamate_total(problem)):
            failures.append(index)
    assert failures == []


@pytest.mark.slow
def test_arity_two_blocks_the_amalgam_up_to_eight_points():
    problem, bounded = nonap_witness(2, max_size=8)
    assert not bounded.found
    _, free = nonap_witness(2, max_size=8, arity_bounded=False)
    assert free.found
    assert check_amalgam(problem, free.solution) == []
