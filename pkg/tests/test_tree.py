import pytest

from meettree.errors import InputError, PreconditionError, TreeValidationError
from meettree.tree import (
    MeetTree,
    arity,
    canonical_form,
    chain,
    check_embedding,
    completion,
    enumerate_trees,
    fresh_label,
    generated_substructure,
    order_arity,
    tree_violations,
    validate_tree,
)


def _forked():
    # r < a < c, r < b
    return MeetTree.from_parents({"r": None, "a": "r", "b": "r", "c": "a"})


def test_basic_order_and_meets():
    t = _forked()
    assert t.root == "r"
    assert t.lt("r", "c") and t.leq("a", "a")
    assert not t.comparable("b", "c")
    assert t.meet("b", "c") == "r"
    assert t.meet("a", "c") == "a"
    assert t.down("c") == ["r", "a", "c"]
    assert sorted(t.children("r")) == ["a", "b"]
    assert t.depth("c") == 2


def test_validate_tree_accepts_and_reports_meets():
    t = validate_tree(["r", "a", "b"], [("r", "a"), ("r", "b")], {("a", "b"): "r"})
    assert t.meet("a", "b") == "r"
    with pytest.raises(TreeValidationError) as err:
        validate_tree(["r", "a", "b"], [("r", "a"), ("r", "b")], {("a", "b"): "a"})
    assert err.value.violations[0].kind == "wrong-meet"


def test_tree_violations_names_the_failed_axiom():
    # two incomparable elements below a common top: not semilinear
    violations, _ = tree_violations(["a", "b", "c"], [("a", "c"), ("b", "c")])
    kinds = {v.kind for v in violations}
    assert "non-semilinear" in kinds
    assert "missing-meet" in kinds

    violations, order = tree_violations(["a", "b"], [("a", "b"), ("b", "a")])
    assert order is None
    assert violations[0].kind == "non-order"


def test_unknown_labels_are_input_errors():
    with pytest.raises(InputError):
        tree_violations(["a"], [("a", "z")])
    with pytest.raises(InputError):
        MeetTree.from_parents({"a": None, "b": None})


def test_enumeration_counts_rooted_trees():
    trees = enumerate_trees(5)
    counts = [sum(1 for t in trees if len(t) == n) for n in range(1, 6)]
    assert counts == [1, 1, 2, 4, 9]
    codes = [canonical_form(t) for t in trees]
    assert len(set(codes)) == len(codes)


def test_canonical_form_ignores_labels():
    t = _forked()
    other = MeetTree.from_parents({"x": None, "y": "x", "z": "y", "w": "x"})
    assert canonical_form(t) == canonical_form(other)
    assert canonical_form(chain("x")) == "(())"
    assert canonical_form(t) != canonical_form(chain("p", "q", "r", "s"))


def test_generated_substructure_adds_meets():
    t = _forked()
    sub = generated_substructure(t, ["b", "c"])
    assert set(sub.labels) == {"r", "b", "c"}
    assert sub.parent("c") == "r"
    with pytest.raises(PreconditionError):
        t.restrict(["b", "c"])


def test_arity_matches_order_definition():
    star = MeetTree.from_parents({"r": None, "a": "r", "b": "r", "c": "r"})
    assert arity(star) == 3
    assert order_arity(star) == 3
    assert arity(chain("a", "b", "c")) == 1
    assert order_arity(_forked()) == arity(_forked()) == 2


def test_completion_adds_a_new_bottom():
    t = _forked()
    done = completion(t)
    assert done.tree.root == done.bottom
    assert len(done.tree) == len(t) + 1
    assert check_embedding(t, done.tree, done.embedding.mapping) == []
    with pytest.raises(PreconditionError):
        completion(t, bottom_label="r")


def test_check_embedding_reports_order_breaks():
    t = _forked()
    swapped = {"r": "r", "a": "b", "b": "a", "c": "c"}
    kinds = {v.kind for v in check_embedding(t, t, swapped)}
    assert "order" in kinds
    assert check_embedding(t, t, {"r": "r"})[0].kind == "not-total"


def test_fresh_label_skips_taken():
    assert fresh_label(["x0", "x1"], "x") == "x2"
    assert fresh_label([], "m") == "m0"
