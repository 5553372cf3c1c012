import pytest

from meettree.errors import InputError, PreconditionError
from meettree.laws import type_coherence_failures, type_completeness_failures, type_round_trip_failures
from meettree.qftypes import enumerate_one_types, qf_type_of, realize_type
from meettree.tree import MeetTree, chain, enumerate_trees
from meettree.tree_types import OneTypeDescriptor


def test_singleton_has_four_types():
    types = enumerate_one_types(chain("a"))
    assert len(types) == 4
    assert {(t.strict_above, t.realized_at) for t in types} == {(False, "a"), (True, "a"), (False, None), (True, None)}


def test_type_of_a_point_above_the_base():
    t = MeetTree.from_parents({"r": None, "a": "r", "b": "r", "x": "a"})
    d = qf_type_of(t, "x", ["r", "b"])
    # anchor is the least label meeting x at r
    assert d == OneTypeDescriptor(anchor="b", strict_above=True, base_cut=("r",), realized_at="r")
    assert qf_type_of(t, "b", ["r", "b"]).realized_at == "b"


def test_type_base_must_be_meet_closed():
    t = MeetTree.from_parents({"r": None, "a": "r", "b": "r"})
    with pytest.raises(PreconditionError):
        qf_type_of(t, "r", ["a", "b"])
    with pytest.raises(PreconditionError):
        enumerate_one_types(MeetTree.from_parents({}))


def test_realize_edge_type_inserts_meet_point():
    base = chain("a", "b")
    edge = OneTypeDescriptor("b", True, ("a",), None)
    ext = realize_type(base, edge)
    assert ext.new_meet_point is not None
    assert ext.tree.parent(ext.new_point) == ext.new_meet_point
    assert ext.tree.parent("b") == ext.new_meet_point
    assert qf_type_of(ext.tree, ext.new_point, base.labels) == edge


def test_realize_rejects_inconsistent_descriptor():
    with pytest.raises(InputError):
        realize_type(chain("a"), OneTypeDescriptor("a", True, ("a", "zz"), "a"))


def test_round_trip_and_completeness_on_small_trees():
    for tree in enumerate_trees(4):
        assert type_round_trip_failures(tree) == []
        assert type_completeness_failures(tree) == []
        assert type_coherence_failures(tree) == []
