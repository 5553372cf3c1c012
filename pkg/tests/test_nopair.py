from fractions import Fraction

import pytest

from meettree.errors import PreconditionError
from meettree.nopair import (
    LinearOrder,
    _graft_rationals,
    cost,
    evaluate_certificate,
    evaluate_word,
    extend_linear_both_ways,
    lift_to_tree,
    linear_violation,
    minimize_pair,
    nopair_demo,
    nopair_exhaust,
)
from meettree.pautomorph import PartialAutomorphism
from meettree.tree import chain
from meettree.tree_types import AutPair

F = Fraction


def test_fresh_points_fall_inside_gaps():
    order = LinearOrder.of(0, 1)
    assert order.fresh_above(F(0)) == F(1, 2)
    assert order.fresh_above(F(1)) == F(2)
    assert order.fresh_below(F(0)) == F(-1)
    assert order.lowest_fresh_in(None, F(1)) == F(-1)


def test_linear_violation_finds_out_of_order_images():
    assert linear_violation({F(0): F(1), F(1): F(0)}) == (F(0), F(1))
    assert linear_violation({F(0): F(-1), F(-1): F(-2)}) is None


def test_two_sided_extension():
    order = LinearOrder.of(0, -1)
    d1, d2, extended, grown = extend_linear_both_ways(order, {F(0): F(-1)}, F(0), F(-1))
    assert d1 == F(0)
    assert d2 == F(-2)
    assert extended == {F(0): F(-1), F(-1): F(-2)}
    assert F(-2) in grown.points
    with pytest.raises(PreconditionError):
        extend_linear_both_ways(order, {F(0): F(-1)}, F(0), F(1))


def test_cost_counts_points_at_or_below():
    assert cost(F(-1), {F(0): F(-1)}) == 1
    assert cost(F(-2), {F(0): F(-1), F(-1): F(-2)}) == 1


def test_demo_pair_from_the_seed():
    seed, minimal, result = nopair_demo()
    assert seed.g1 == seed.g2 == ((F(0), F(-1)),)
    assert dict(minimal.g1) == {F(0): F(-1), F(-1): F(-2)}
    assert dict(minimal.g2) == {F(0): F(-1)}
    assert result.extended_map == 2
    assert dict(result.first.g2)[F(-2)] == F(-3, 2)
    assert dict(result.second.g2)[F(-2)] == F(-3)
    assert result.certificate.word == ("g1", "g1")
    assert len(result.certificate) == 3
    assert evaluate_certificate(result.first, result.certificate) is True
    assert evaluate_certificate(result.second, result.certificate) is False
    assert evaluate_word(result.first, ("g1", "g1", "g2")) == F(-3, 2)


def test_minimize_needs_a_descending_anchor():
    pair = AutPair(LinearOrder.of(0, 1), ((F(0), F(1)),), ((F(0), F(1)),), F(0))
    with pytest.raises(PreconditionError):
        minimize_pair(pair)


def test_no_common_extension_within_bound():
    _, _, result = nopair_demo()
    report = nopair_exhaust(result.first, result.second, max_size=9)
    assert report.nodes > 0
    assert report.solutions == 0
    assert nopair_exhaust(result.first, result.first, max_size=9).solutions >= 1


def test_lift_onto_a_branch():
    tree = chain("c0", "c1", "c2")
    p = PartialAutomorphism(tree, {"c2": "c1"})
    result = lift_to_tree(tree, p, p, "c2")
    assert len(result.first.order) == 6
    assert result.first.order == result.second.order
    assert evaluate_certificate(result.first, result.certificate) is True
    assert evaluate_certificate(result.second, result.certificate) is False
    with pytest.raises(PreconditionError):
        lift_to_tree(tree, p, PartialAutomorphism(tree, {"c2": "c0"}), "c2")


def test_grafted_rationals_may_sit_above_the_branch():
    tree = chain("c0", "c1")
    from_q = {F(-1): "c0", F(0): "c1"}
    grown = _graft_rationals(tree, from_q, [F(-1, 2), F(1, 2)])
    assert from_q[F(-1, 2)] == "q0" and from_q[F(1, 2)] == "q1"
    assert grown.parent("c1") == "q0"
    assert grown.parent("q1") == "c1"
    assert grown.lt("c0", "q0")
