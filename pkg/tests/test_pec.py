import pytest

from meettree.corpus import mixed_orbits_example, pauto_corpus, quasicycle_example
from meettree.errors import PreconditionError
from meettree.pautomorph import PartialAutomorphism
from meettree.pec import (
    check_determined_step,
    check_pec,
    consequences_check,
    cross_check_unique_extension,
    determinism_certificate,
    immediate_extension_stays_pec,
    pec_close,
    quasicycle_retention,
    replay_certificate,
    triple_type,
)
from meettree.tree import MeetTree, chain


def _swap():
    tree = MeetTree.from_parents({"r": None, "a": "r", "b": "r"})
    return PartialAutomorphism(tree, {"r": "r", "a": "b", "b": "a"})


def test_cycles_only_pass_trivially():
    result = check_pec(_swap(), depth=2)
    assert result.passed
    assert result.frontier_size == 0
    assert result.counterexample is None


def test_pec_depth_must_be_positive():
    with pytest.raises(PreconditionError):
        check_pec(_swap(), depth=0)


def test_closure_of_a_closed_map_is_itself():
    closed = pec_close(_swap(), depth=1)
    assert closed.mapping == _swap().mapping
    assert check_pec(closed, 1).passed


def test_spiral_steps_are_determined():
    p = PartialAutomorphism(chain("x0", "x1"), {"x0": "x1"})
    step = check_determined_step(p)
    assert step.count == 1
    assert step.endpoint == "x1"
    cert = determinism_certificate(p, 2)
    assert cert.succeeded
    assert cert.counts == (1, 1)
    assert len(cert.per_step) == 2
    assert replay_certificate(cert)
    assert cross_check_unique_extension(p)


def test_branching_step_is_not_determined():
    tree = MeetTree.from_parents({"r": None, "a": "r", "b": "r"})
    p = PartialAutomorphism(tree, {"a": "b"})
    cert = determinism_certificate(p, 1)
    assert not cert.succeeded
    assert cert.failure_step == 0
    assert cert.counts[0] > 1
    assert replay_certificate(cert)


def test_tampered_certificate_does_not_replay():
    p = PartialAutomorphism(chain("x0", "x1"), {"x0": "x1"})
    cert = determinism_certificate(p, 1)
    other = determinism_certificate(PartialAutomorphism(chain("x0", "x1"), {"x1": "x0"}), 1)
    forged = type(cert)(p, cert.depth, other.per_step, cert.counts)
    assert not replay_certificate(forged)


def test_consequences_hold_for_the_map_itself():
    p = mixed_orbits_example()
    assert consequences_check(p, p).clean
    with pytest.raises(PreconditionError):
        consequences_check(p, PartialAutomorphism(p.tree, {"root": "root"}))


def test_quasicycle_retention_counts_outputs():
    assert quasicycle_retention([quasicycle_example(), _swap()]) == {"outputs": 2, "with_quasi_cycles": 1}


def test_triple_type_marks_positions():
    tree = chain("x0", "x1", "x2")
    assert triple_type(tree, "x0", "x1", "x2") != triple_type(tree, "x2", "x1", "x0")
    assert triple_type(tree, "x0", "x1", "x2") == triple_type(chain("y0", "y1", "y2"), "y0", "y1", "y2")


def test_immediate_extension_of_a_cyclic_map_stays_pec():
    assert immediate_extension_stays_pec(_swap(), 2)
    with pytest.raises(PreconditionError):
        immediate_extension_stays_pec(_swap(), 1)


def test_fixed_point_beside_a_descending_orbit():
    p = PartialAutomorphism(chain("r", "a", "b"), {"r": "r", "b": "a"})
    result = check_pec(p, 2)
    assert result.frontier_size > 0
    closed = pec_close(p, 2)
    assert closed.extends(p)
    assert check_pec(closed, 2).passed


def test_closed_descending_map_is_determined():
    p = PartialAutomorphism(chain("b", "a"), {"a": "b"})
    closed = pec_close(p, 2)
    cert = determinism_certificate(closed, 3)
    assert cert.succeeded
    assert cert.counts == (1, 1, 1)
    assert replay_certificate(cert)


@pytest.mark.slow
def test_every_small_map_closes_and_certifies():
    for p in pauto_corpus(4):
        closed = pec_close(p, 2)
        assert check_pec(closed, 2).passed, p.pairs
        assert determinism_certificate(closed, 3).succeeded, p.pairs


@pytest.mark.slow
def test_closing_a_branching_map_makes_it_determined():
    p = PartialAutomorphism(MeetTree.from_parents({"r": None, "a": "r", "b": "r"}), {"a": "b"})
    assert determinism_certificate(p, 3).counts[0] >= 2
    cert = determinism_certificate(pec_close(p, 2), 3)
    assert cert.succeeded
    assert set(cert.counts) == {1}
