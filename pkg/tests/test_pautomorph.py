import pytest

from meettree.corpus import mixed_orbits_example, quasicycle_example
from meettree.errors import PautoValidationError, PreconditionError
from meettree.pautomorph import (
    PartialAutomorphism,
    classify_orbit,
    endpoint_extensions,
    immediate_extensions,
    initial_points,
    is_immediate_extension,
    is_positively_strict_extension,
    is_strict_extension,
    linear_union,
    orbit_decomposition,
    pauto_violation,
    pseudo_period,
    time_reverse,
)
from meettree.tree import MeetTree, chain
from meettree.tree_types import Orbit, OrbitClass


def _cherry():
    return MeetTree.from_parents({"r": None, "a": "r", "b": "r"})


def test_swap_is_a_two_cycle():
    p = PartialAutomorphism(_cherry(), {"a": "b", "b": "a"})
    (orbit,) = orbit_decomposition(p)
    assert orbit.cyclic and orbit.points == ("a", "b")
    assert classify_orbit(p.tree, orbit) == OrbitClass("cycle", 2)
    assert initial_points(p) == frozenset({"a", "b"})


def test_order_reversal_is_rejected():
    t = chain("x0", "x1", "x2")
    assert pauto_violation(t, {"x0": "x1", "x1": "x0"}).kind == "order-violation"
    with pytest.raises(PautoValidationError):
        PartialAutomorphism(t, {"x0": "x1", "x1": "x0"})
    # single points are always fine
    assert pauto_violation(t, {"x2": "x0"}) is None


def test_meet_images_must_agree():
    t = MeetTree.from_parents({"r": None, "s": "r", "a": "s", "b": "s", "c": "r"})
    # a^b = s is fixed but would have to go to a^c = r
    assert pauto_violation(t, {"a": "a", "b": "c", "s": "s"}) is not None


def test_spirals_in_both_directions():
    t = chain("x0", "x1", "x2")
    up = PartialAutomorphism(t, {"x0": "x1", "x1": "x2"})
    (orbit,) = orbit_decomposition(up)
    assert orbit == Orbit(("x0", "x1", "x2"))
    assert classify_orbit(t, orbit) == OrbitClass("ascending-spiral", 1)
    assert classify_orbit(t, time_reverse(orbit)) == OrbitClass("descending-spiral", 1)
    assert initial_points(up) == frozenset({"x0"})


def test_mixed_orbits_example_orbit_classes():
    p = mixed_orbits_example()
    classes = {o.points[0]: classify_orbit(p.tree, o) for o in orbit_decomposition(p)}
    assert classes == {
        "eta0": OrbitClass("ascending-spiral", 4),
        "mu0": OrbitClass("ascending-comb", 4),
        "root": OrbitClass("cycle", 1),
        "zeta0": OrbitClass("cycle", 2),
    }


def test_quasicycle_example_is_a_quasi_cycle():
    p = quasicycle_example()
    eta = next(o for o in orbit_decomposition(p) if o.points[0] == "eta0")
    assert pseudo_period(p.tree, eta) == 3
    assert classify_orbit(p.tree, eta) == OrbitClass("quasi-cycle", 3)
    mu = next(o for o in orbit_decomposition(p) if o.points[0] == "mu0")
    assert classify_orbit(p.tree, mu) == OrbitClass("cycle", 3)


def test_spiral_endpoint_has_one_extension():
    p = PartialAutomorphism(chain("x0", "x1"), {"x0": "x1"})
    options = endpoint_extensions(p, "x1")
    assert len(options) == 1
    q, descriptor = options[0]
    assert descriptor.strict_above and descriptor.realized_at == "x1"
    assert q.tree.lt("x1", q("x1"))
    assert is_immediate_extension(p, q)
    with pytest.raises(PreconditionError):
        endpoint_extensions(p, "x0")


def test_linear_union_joins_agreeing_maps():
    t = chain("x0", "x1", "x2", "x3")
    f = PartialAutomorphism(t, {"x3": "x2", "x2": "x1"})
    g = PartialAutomorphism(t, {"x3": "x2"})
    union = linear_union(f, g, lambda _eta: "x3")
    assert union.mapping == {"x3": "x2", "x2": "x1"}
    bad = PartialAutomorphism(t, {"x3": "x1"})
    with pytest.raises(PreconditionError):
        linear_union(f, bad, lambda _eta: "x3")


def test_immediate_extensions_use_the_shortest_orbit():
    p = PartialAutomorphism(chain("x0", "x1"), {"x0": "x1"})
    assert [d for _, d in immediate_extensions(p)] == [d for _, d in endpoint_extensions(p, "x1")]
    with pytest.raises(PreconditionError):
        immediate_extensions(PartialAutomorphism(_cherry(), {"a": "b", "b": "a"}))


def test_strict_extensions_are_generated_by_orbits():
    p = PartialAutomorphism(_cherry(), {"a": "b"})
    closed = PartialAutomorphism(_cherry(), {"r": "r", "a": "b", "b": "a"})
    assert is_strict_extension(p, closed)
    assert is_positively_strict_extension(p, closed)
    assert not is_strict_extension(p, p)
    assert not is_positively_strict_extension(p, p)
    # dom is not meet-closed without the root
    assert not is_strict_extension(p, PartialAutomorphism(_cherry(), {"a": "b", "b": "a"}))


def test_extensions_keep_points_outside_the_support():
    tree = MeetTree.from_parents({"x0": None, "x1": "x0", "y": "x0"})
    p = PartialAutomorphism(tree, {"x0": "x1"})
    assert "y" not in p.support()
    options = endpoint_extensions(p, "x1")
    assert options
    for q, _ in options:
        assert "y" in q.tree
        assert q.tree.lt("x0", "y")
