"""
=============================================================================
MODULE NAME: laws.py
=============================================================================

INPUT FILES:
- None; every law runs over enumerated or seeded corpora.

OUTPUT FILES:
- None; `run_battery` returns LawResult records for the check-laws report.

VERSION HISTORY:
- v1.0: Meet laws, substructure and completion checks, canonical-form and
  validation oracles, type round-trip/completeness/coherence, orbit laws for
  spirals, combs, quasi-cycles and cycles, time reversal, sub-orbit stability.

NOTES:
- Each checker returns a list of human-readable failure strings. An empty
  list means the law held on everything it looked at.
=============================================================================
"""

from __future__ import annotations

import itertools
import logging
import random
from dataclasses import dataclass
from typing import Callable, Iterable, List, Optional, Sequence, Tuple

from .config import NodeCounter, ProgressCallback, SearchConfig
from .corpus import isomorphisms, pauto_corpus
from .pautomorph import (
    classify_orbit,
    endpoint_extensions,
    orbit_automorphism,
    orbit_decomposition,
    pauto_violation,
    time_reverse,
)
from .qftypes import enumerate_one_types, qf_type_of, realize_type
from .tree import (
    MeetTree,
    arity,
    brute_force_isomorphic,
    canonical_form,
    chain,
    check_embedding,
    completion,
    enumerate_trees,
    generated_substructure,
    is_meet_closed,
    order_arity,
)
from .tree_types import Label, Orbit

logger = logging.getLogger(__name__)

MAX_ORBIT_LENGTH = 10


@dataclass(frozen=True, slots=True)
class LawResult:
    name: str
    checked: int
    failures: Tuple[str, ...] = ()

    @property
    def held(self) -> bool:
        return not self.failures


def _otp(tree: MeetTree, x: Label, y: Label) -> str:
    if x == y:
        return "="
    if tree.lt(x, y):
        return "<"
    if tree.lt(y, x):
        return ">"
    return "|"


def _int_otp(i: int, j: int) -> str:
    return "=" if i == j else ("<" if i < j else ">")


# -- core tree ------------------------------------------------------------------------------


def meet_law_failures(tree: MeetTree) -> List[str]:
    failures = []
    m, lt, leq = tree.meet, tree.lt, tree.leq
    for a, b, c in itertools.product(tree.labels, repeat=3):
        ab, ac, bc = m(a, b), m(a, c), m(b, c)
        abc = m(ab, c)
        if abc not in (ab, ac):
            failures.append(f"a^b^c is neither a^b nor a^c at {(a, b, c)}")
        if lt(ac, ab) and ac != bc:
            failures.append(f"a^b > a^c but a^c != b^c at {(a, b, c)}")
        if leq(ac, ab) and not leq(ac, bc):
            failures.append(f"a^b >= a^c but a^c > b^c at {(a, b, c)}")
    return failures


def substructure_failures(tree: MeetTree, max_subset: int = 3) -> List[str]:
    failures = []
    for size in range(1, min(max_subset, len(tree)) + 1):
        for subset in itertools.combinations(tree.labels, size):
            expected = set(subset) | {tree.meet(x, y) for x, y in itertools.combinations(subset, 2)}
            got = set(generated_substructure(tree, subset).labels)
            if got != expected or not is_meet_closed(tree, got):
                failures.append(f"generated substructure of {subset} is {sorted(got)}, expected {sorted(expected)}")
    return failures


def completion_failures(tree: MeetTree) -> List[str]:
    done = completion(tree)
    failures = []
    if len(done.tree) != len(tree) + 1 or done.tree.root != done.bottom:
        failures.append(f"completion does not add exactly one new minimum: root {done.tree.root}")
    problems = check_embedding(tree, done.tree, done.embedding.mapping)
    failures.extend(f"principal-cut embedding: {v.kind} at {v.witness}" for v in problems)
    for label in done.tree.labels:
        below = done.tree.down(label)
        if any(not done.tree.comparable(x, y) for x, y in itertools.combinations(below, 2)):
            failures.append(f"cut below {label} is not a chain")
    return failures


def _relabelled(tree: MeetTree) -> MeetTree:
    names = {label: f"w{len(tree) - i}" for i, label in enumerate(tree.labels)}
    parents = {names[x]: (None if p is None else names[p]) for x, p in tree.parents_map().items()}
    return MeetTree.from_parents(parents, sorted(parents))


def canonical_form_failures(trees: Sequence[MeetTree]) -> List[str]:
    failures = []
    for tree in trees:
        copy = _relabelled(tree)
        if canonical_form(copy) != canonical_form(tree) or not brute_force_isomorphic(tree, copy):
            failures.append(f"relabelled copy disagrees for {canonical_form(tree)}")
    for first, second in itertools.combinations(trees, 2):
        if len(first) != len(second):
            continue
        same_code = canonical_form(first) == canonical_form(second)
        if same_code != brute_force_isomorphic(first, second):
            failures.append(f"code/oracle mismatch: {canonical_form(first)} vs {canonical_form(second)}")
    return failures


def arity_failures(tree: MeetTree) -> List[str]:
    a, b = arity(tree), order_arity(tree)
    return [] if a == b else [f"arity {a} != order arity {b} for {canonical_form(tree)}"]


# -- types ----------------------------------------------------------------------------------


def _meet_closed_subsets(tree: MeetTree, max_size: Optional[int] = None) -> Iterable[Tuple[Label, ...]]:
    top = len(tree) if max_size is None else min(max_size, len(tree))
    for size in range(1, top + 1):
        for subset in itertools.combinations(tree.labels, size):
            if is_meet_closed(tree, subset):
                yield subset


def type_round_trip_failures(base: MeetTree) -> List[str]:
    failures = []
    for descriptor in enumerate_one_types(base):
        ext = realize_type(base, descriptor)
        back = qf_type_of(ext.tree, ext.new_point, base.labels)
        if back != descriptor:
            failures.append(f"{descriptor} realizes as {back}")
    return failures


def type_completeness_failures(tree: MeetTree, max_base: int = 4) -> List[str]:
    failures = []
    for subset in _meet_closed_subsets(tree, max_base):
        if len(tree) - len(subset) > 2:
            continue
        menu = set(enumerate_one_types(tree.restrict(subset)))
        for x in tree.labels:
            if x in subset:
                continue
            t = qf_type_of(tree, x, subset)
            if t not in menu:
                failures.append(f"type of {x} over {subset} missing from the enumeration: {t}")
    return failures


def type_coherence_failures(tree: MeetTree) -> List[str]:
    """Two points meeting above everything the base sees of them have one type."""
    failures = []
    for subset in _meet_closed_subsets(tree):
        for a1, a2 in itertools.permutations(tree.labels, 2):
            seen = max((tree.meet(b, a1) for b in subset), key=tree.depth)
            if tree.lt(seen, tree.meet(a1, a2)):
                if qf_type_of(tree, a1, subset) != qf_type_of(tree, a2, subset):
                    failures.append(f"{a1}, {a2} over {subset} differ")
    return failures


def singleton_type_count_failures() -> List[str]:
    count = len(enumerate_one_types(chain("a")))
    return [] if count == 4 else [f"singleton has {count} types"]


# -- orbits ---------------------------------------------------------------------------------


def spiral_law_failures(tree: MeetTree, orbit: Orbit) -> List[str]:
    cls = classify_orbit(tree, orbit)
    if not cls.kind.endswith("spiral"):
        return []
    seq, k = orbit.points, cls.parameter
    n = len(seq) - 1
    failures = []
    for i, j in itertools.combinations(range(n + 1), 2):
        if tree.comparable(seq[i], seq[j]) != (i % k == j % k):
            failures.append(f"comparability of {i},{j} in a {k}-spiral")
    for i, j, m in itertools.product(range(n + 1), repeat=3):
        if i % k == j % k != m % k and tree.meet(seq[i], seq[m]) != tree.meet(seq[j], seq[m]):
            failures.append(f"meets with {m} differ for {i}~{j} in a {k}-spiral")
    for m in range(1, n // 2 + 1):
        if tree.meet(seq[0], seq[m]) != tree.meet(seq[m], seq[2 * m]) and m % k:
            failures.append(f"meet drift at step {m} not a multiple of {k}")
    return failures


def comb_law_failures(tree: MeetTree, orbit: Orbit) -> List[str]:
    if orbit.cyclic:
        return []
    seq = orbit.points
    n = len(seq) - 1
    m = tree.meet
    failures = []
    for k in range(1, n // 2 + 1):
        lower, upper = m(seq[0], seq[k]), m(seq[k], seq[2 * k])
        if lower == upper:
            continue
        ascending = tree.lt(lower, upper)
        for r in range(k):
            idx = list(range(r, n + 1, k))
            pairs = list(itertools.combinations(idx, 2))
            for i1, i2 in pairs:
                expected = m(seq[i1], seq[i1 + k]) if ascending else m(seq[i2 - k], seq[i2])
                if m(seq[i1], seq[i2]) != expected:
                    failures.append(f"k={k}: meet of {i1},{i2} is not the adjacent meet")
            for (i1, i2), (j1, j2) in itertools.product(pairs, repeat=2):
                got = _otp(tree, m(seq[i1], seq[i2]), m(seq[j1], seq[j2]))
                want = _int_otp(i1, j1) if ascending else _int_otp(j2, i2)
                if got != want:
                    failures.append(f"k={k}: order of meets ({i1},{i2}) vs ({j1},{j2}) is {got}, expected {want}")
    return failures


def quasi_cycle_law_failures(tree: MeetTree, orbit: Orbit) -> List[str]:
    cls = classify_orbit(tree, orbit)
    if cls.kind != "quasi-cycle":
        return []
    seq, u = orbit.points, cls.parameter
    failures = []
    for i, j, k in itertools.product(range(len(seq)), repeat=3):
        if i % u == j % u and k not in (i, j) and tree.meet(seq[i], seq[k]) != tree.meet(seq[j], seq[k]):
            failures.append(f"u={u}: meets of {i} and {j} with {k} differ")
    return failures


def meet_identity_failures(tree: MeetTree, orbit: Orbit) -> List[str]:
    cls = classify_orbit(tree, orbit)
    if cls.kind not in ("cycle", "quasi-cycle"):
        return []
    if orbit.cyclic:
        seq = tuple(orbit.points[i % len(orbit.points)] for i in range(2 * len(orbit.points) + 1))
    else:
        seq = orbit.points
    n = len(seq) - 1
    return [
        f"{cls.kind}: step {k} meet identity fails"
        for k in range(1, n // 2 + 1)
        if tree.meet(seq[0], seq[k]) != tree.meet(seq[k], seq[2 * k])
    ]


_MIRROR = {"ascending": "descending", "descending": "ascending"}


def time_reversal_failures(tree: MeetTree, orbit: Orbit) -> List[str]:
    cls = classify_orbit(tree, orbit)
    back = classify_orbit(tree, time_reverse(orbit))
    direction, _, family = cls.kind.partition("-")
    kind = f"{_MIRROR[direction]}-{family}" if direction in _MIRROR else cls.kind
    if (back.kind, back.parameter) != (kind, cls.parameter):
        return [f"{cls.kind}/{cls.parameter} reverses to {back.kind}/{back.parameter}"]
    return []


def suborbit_failures(tree: MeetTree, orbit: Orbit) -> List[str]:
    """Fixed classes survive one-step extensions; pieces of quasi-cycles stay quasi-cycles."""
    if orbit.cyclic:
        return []
    cls = classify_orbit(tree, orbit)
    failures = []
    if cls.kind == "quasi-cycle":
        seq = orbit.points
        for i, j in itertools.combinations(range(len(seq) + 1), 2):
            piece = Orbit(seq[i:j])
            if classify_orbit(tree, piece).kind != "quasi-cycle":
                failures.append(f"piece {i}:{j} of a quasi-cycle is {classify_orbit(tree, piece).kind}")
        return failures
    p = orbit_automorphism(tree, orbit).on_support()
    for q, _ in endpoint_extensions(p, orbit.points[-1]):
        image = q(orbit.points[-1])
        grown = Orbit(orbit.points, cyclic=True) if image == orbit.points[0] else Orbit(orbit.points + (image,))
        if classify_orbit(q.tree, grown) != cls:
            failures.append(f"{cls.kind}/{cls.parameter} extends to {classify_orbit(q.tree, grown)}")
    return failures


ORBIT_LAWS: Tuple[Tuple[str, Callable[[MeetTree, Orbit], List[str]]], ...] = (
    ("spiral laws", spiral_law_failures),
    ("comb laws", comb_law_failures),
    ("quasi-cycle law", quasi_cycle_law_failures),
    ("cycle meet identity", meet_identity_failures),
    ("time reversal", time_reversal_failures),
    ("sub-orbit stability", suborbit_failures),
)


def grown_orbits(
    seed: int = 17, count: int = 12, length: int = MAX_ORBIT_LENGTH, config: Optional[SearchConfig] = None
) -> List[Tuple[MeetTree, Orbit]]:
    """Orbits grown one random valid step at a time from the three two-point shapes."""
    rng = random.Random(seed)
    counter = NodeCounter.for_config(config, "grown_orbits")
    starts = [
        (chain("b", "a"), Orbit(("a", "b"))),
        (chain("a", "b"), Orbit(("a", "b"))),
        (MeetTree.from_parents({"r": None, "a": "r", "b": "r"}), Orbit(("a", "b"))),
    ]
    found: List[Tuple[MeetTree, Orbit]] = []
    for index in range(count):
        tree, orbit = starts[index % len(starts)]
        p = orbit_automorphism(tree, orbit)
        points = orbit.points
        while len(points) < length:
            options = [(q, q(points[-1])) for q, _ in endpoint_extensions(p.on_support(), points[-1])]
            options = [(q, image) for q, image in options if image != points[0]]
            counter.charge(len(options) + 1)
            if not options:
                break
            p, image = rng.choice(options)
            points = points + (image,)
            found.append((p.tree, Orbit(points)))
    logger.debug("grew %d orbits from seed %d", len(found), seed)
    return found


# -- partial automorphisms ------------------------------------------------------------------


def validation_oracle_failures(tree: MeetTree) -> List[str]:
    """pauto_violation agrees with a search for an isomorphism of generated substructures."""
    failures = []
    labels = sorted(tree.labels)
    for size in range(1, len(labels) + 1):
        for domain in itertools.combinations(labels, size):
            source = generated_substructure(tree, domain)
            for image in itertools.permutations(labels, size):
                mapping = dict(zip(domain, image))
                target = generated_substructure(tree, image)
                oracle = any(
                    all(sigma[x] == y for x, y in mapping.items()) for sigma in isomorphisms(source, target)
                )
                if oracle != (pauto_violation(tree, mapping) is None):
                    failures.append(f"validation disagrees with the oracle on {mapping}")
    return failures


# -- battery --------------------------------------------------------------------------------


def _collect(name: str, items: Iterable, check: Callable) -> LawResult:
    checked = 0
    failures: List[str] = []
    for item in items:
        checked += 1
        failures.extend(check(*item) if isinstance(item, tuple) else check(item))
    if failures:
        logger.warning("%s: %d failure(s), first: %s", name, len(failures), failures[0])
    return LawResult(name, checked, tuple(failures))


def run_battery(
    max_size: int = 5,
    config: Optional[SearchConfig] = None,
    progress: Optional[ProgressCallback] = None,
) -> List[LawResult]:
    """Every law over trees up to `max_size`; the expensive families are capped at smaller sizes."""
    config = config or SearchConfig()
    counter = NodeCounter.for_config(config, "run_battery")
    trees = enumerate_trees(max_size, config, counter)

    def upto(n: int) -> List[MeetTree]:
        return [t for t in trees if len(t) <= n]

    steps: List[Tuple[str, Callable[[], LawResult]]] = [
        ("meet laws", lambda: _collect("meet laws", trees, meet_law_failures)),
        ("generated substructure", lambda: _collect("generated substructure", trees, substructure_failures)),
        ("completion", lambda: _collect("completion", trees, completion_failures)),
        ("canonical form", lambda: LawResult("canonical form", len(upto(5)), tuple(canonical_form_failures(upto(5))))),
        ("arity", lambda: _collect("arity", trees, arity_failures)),
        ("type round trip", lambda: _collect("type round trip", upto(5), type_round_trip_failures)),
        ("type completeness", lambda: _collect("type completeness", upto(6), type_completeness_failures)),
        ("type coherence", lambda: _collect("type coherence", upto(6), type_coherence_failures)),
        ("singleton types", lambda: LawResult("singleton types", 1, tuple(singleton_type_count_failures()))),
        ("validation oracle", lambda: _collect("validation oracle", upto(6), validation_oracle_failures)),
    ]
    orbit_pool: List[Tuple[MeetTree, Orbit]] = []

    def pool() -> List[Tuple[MeetTree, Orbit]]:
        if not orbit_pool:
            for p in pauto_corpus(min(max_size, 6), config):
                orbit_pool.extend((p.tree, o) for o in orbit_decomposition(p) if len(o) <= MAX_ORBIT_LENGTH)
            orbit_pool.extend(grown_orbits(config.seed, config=config))
        return orbit_pool

    for name, law in ORBIT_LAWS:
        steps.append((name, lambda name=name, law=law: _collect(name, pool(), law)))

    results: List[LawResult] = []
    for done, (name, run) in enumerate(steps, start=1):
        results.append(run())
        if progress:
            progress(name, done * 100 // len(steps))
    logger.info("law battery up to size %d: %d/%d families held", max_size, sum(r.held for r in results), len(results))
    return results


__all__ = [
    "LawResult",
    "meet_law_failures",
    "substructure_failures",
    "completion_failures",
    "canonical_form_failures",
    "arity_failures",
    "type_round_trip_failures",
    "type_completeness_failures",
    "type_coherence_failures",
    "singleton_type_count_failures",
    "spiral_law_failures",
    "comb_law_failures",
    "quasi_cycle_law_failures",
    "meet_identity_failures",
    "time_reversal_failures",
    "suborbit_failures",
    "ORBIT_LAWS",
    "grown_orbits",
    "validation_oracle_failures",
    "run_battery",
]
