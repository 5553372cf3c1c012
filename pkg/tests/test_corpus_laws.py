import pytest

from meettree.corpus import (
    canonical_pauto_key,
    isomorphisms,
    mixed_orbits_example,
    orbit_corpus,
    pauto_corpus,
    quasicycle_example,
    random_amalg_problems,
    tree_automorphisms,
)
from meettree.laws import (
    ORBIT_LAWS,
    arity_failures,
    canonical_form_failures,
    completion_failures,
    grown_orbits,
    meet_law_failures,
    run_battery,
    singleton_type_count_failures,
    substructure_failures,
    validation_oracle_failures,
)
from meettree.pautomorph import PartialAutomorphism, orbit_decomposition
from meettree.tree import MeetTree, enumerate_trees


def test_star_has_six_automorphisms():
    star = MeetTree.from_parents({"r": None, "a": "r", "b": "r", "c": "r"})
    assert len(tree_automorphisms(star)) == 6
    other = MeetTree.from_parents({"s": None, "x": "s", "y": "s", "z": "x"})
    assert list(isomorphisms(star, other)) == []


def test_pauto_key_is_isomorphism_invariant():
    tree = MeetTree.from_parents({"r": None, "a": "r", "b": "r"})
    assert canonical_pauto_key(PartialAutomorphism(tree, {"a": "b"})) == canonical_pauto_key(
        PartialAutomorphism(tree, {"b": "a"})
    )
    assert canonical_pauto_key(PartialAutomorphism(tree, {"a": "b"})) != canonical_pauto_key(
        PartialAutomorphism(tree, {"a": "a"})
    )


def test_small_corpus_size():
    # one point: {v0 -> v0}; two-chain: four single pairs and the identity
    assert len(pauto_corpus(2)) == 6
    # identity on the two-chain splits into two fixed points
    assert len(list(orbit_corpus(2))) == 7


def test_seeded_problems_are_reproducible():
    assert random_amalg_problems(3, seed=17) == random_amalg_problems(3, seed=17)


def test_tree_laws_on_small_trees():
    trees = enumerate_trees(5)
    for tree in trees:
        assert meet_law_failures(tree) == []
        assert substructure_failures(tree) == []
        assert completion_failures(tree) == []
        assert arity_failures(tree) == []
    assert canonical_form_failures([t for t in trees if len(t) <= 4]) == []
    assert singleton_type_count_failures() == []


def test_validation_agrees_with_isomorphism_oracle():
    for tree in enumerate_trees(4):
        assert validation_oracle_failures(tree) == []


def test_orbit_laws_on_the_worked_examples():
    for p in (mixed_orbits_example(), quasicycle_example()):
        for orbit in orbit_decomposition(p):
            for name, law in ORBIT_LAWS:
                assert law(p.tree, orbit) == [], name


def test_grown_orbits_are_seeded():
    first = grown_orbits(17, count=3, length=5)
    again = grown_orbits(17, count=3, length=5)
    assert [o.points for _, o in first] == [o.points for _, o in again]
    assert all(len(o) <= 5 for _, o in first)


@pytest.mark.slow
def test_full_battery_holds():
    results = run_battery(4)
    assert {r.name for r in results} >= {"meet laws", "type round trip", "time reversal"}
    assert [r.name for r in results if not r.held] == []
