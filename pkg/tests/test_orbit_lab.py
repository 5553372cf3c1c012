import pytest

from meettree.config import SearchConfig
from meettree.corpus import quasicycle_example
from meettree.errors import BudgetExceeded, PreconditionError
from meettree.orbit_lab import (
    complete_quasicycle_to_cycle,
    enumerate_orbit_extensions,
    extension_menu_findings,
    frontier,
)
from meettree.pautomorph import PartialAutomorphism, classify_orbit, orbit_decomposition, pauto_violation
from meettree.tree import MeetTree, chain
from meettree.tree_types import Orbit


def _eta_orbit():
    p = quasicycle_example()
    return p.tree, next(o for o in orbit_decomposition(p) if o.points[0] == "eta0")


def test_quasicycle_closes_into_multiple_of_pseudo_period():
    tree, orbit = _eta_orbit()
    grown, cycle = complete_quasicycle_to_cycle(tree, orbit)
    assert cycle.cyclic
    assert len(cycle.points) == 9
    assert cycle.points[: len(orbit.points)] == orbit.points
    mapping = dict(zip(cycle.sequence(), cycle.sequence()[1:]))
    assert pauto_violation(grown, mapping) is None


def test_completion_needs_a_quasi_cycle():
    with pytest.raises(PreconditionError):
        complete_quasicycle_to_cycle(chain("x0", "x1"), Orbit(("x0", "x1")))


def test_orbit_extensions_are_validated_and_deduplicated():
    tree = MeetTree.from_parents({"r": None, "a": "r", "b": "r"})
    items = enumerate_orbit_extensions(tree, Orbit(("a", "b")), budget=1)
    assert items
    for item in items:
        assert item.plan.added_points == 1
        assert item.plan.guard == "validate_pauto"
        assert classify_orbit(item.tree, item.orbit) == item.orbit_class
    # closing a -> b -> a is one of the options
    assert any(item.orbit.cyclic for item in items)


def test_extension_budget_is_capped():
    tree = chain("x0", "x1")
    with pytest.raises(BudgetExceeded):
        enumerate_orbit_extensions(tree, Orbit(("x0", "x1")), budget=7)
    with pytest.raises(BudgetExceeded):
        enumerate_orbit_extensions(tree, Orbit(("x0", "x1")), budget=2, config=SearchConfig(max_extension_budget=1))


def test_quasi_cycle_extensions_stay_on_the_menu():
    tree, orbit = _eta_orbit()
    items = enumerate_orbit_extensions(tree, orbit, budget=1)
    assert items
    assert extension_menu_findings(tree, orbit, items) == []


def test_frontier_grows_with_depth():
    p = PartialAutomorphism(chain("x0", "x1"), {"x0": "x1"})
    one = frontier(p, 1)
    two = frontier(p, 2)
    assert len(one) == 1
    assert len(two) == 2
    assert [len(trace) for _, trace in two] == [1, 2]
