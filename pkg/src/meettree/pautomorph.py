"""
=============================================================================
MODULE NAME: pautomorph.py
=============================================================================

INPUT FILES:
- None. Maps arrive as label dictionaries (see io.py for the JSON form).

OUTPUT FILES:
- None written directly.

VERSION HISTORY:
- v1.0: Validation through the meet closure, orbit decomposition and
  classification, pseudo-periods, one-step extensions, union of maps that
  agree below witnesses.

NOTES:
- A map is valid when its closure x^y -> p(x)^p(y) over the generated
  substructure of its domain is a well defined order isomorphism.
- Extensions are realized over the substructure generated by dom and range;
  elements of the ambient tree outside that substructure are not carried
  into the extended tree.
=============================================================================
"""

from __future__ import annotations

import itertools
import logging
from typing import Callable, Dict, FrozenSet, Iterable, List, Mapping, Optional, Tuple, Union

from .errors import Finding, InputError, PautoValidationError, PreconditionError
from .qftypes import enumerate_one_types, realize_type
from .tree import MeetTree, generated_substructure, is_meet_closed, meet_closure
from .tree_types import ExtensionStep, Label, OneTypeDescriptor, Orbit, OrbitClass, Pairs, PautoViolation

logger = logging.getLogger(__name__)


def _closure_pairs(tree: MeetTree, mapping: Mapping[Label, Label]) -> Tuple[Dict[Label, Label], Optional[PautoViolation]]:
    forward: Dict[Label, Label] = {}
    backward: Dict[Label, Label] = {}

    def add(source: Label, target: Label, witness: Tuple[Label, ...]) -> Optional[PautoViolation]:
        if forward.get(source, target) != target:
            return PautoViolation("meet-image-mismatch", witness + (source,))
        if backward.get(target, source) != source:
            return PautoViolation("injectivity-clash", witness + (target,))
        forward[source] = target
        backward[target] = source
        return None

    items = sorted(mapping.items())
    for x, px in items:
        violation = add(x, px, (x,))
        if violation:
            return forward, violation
    for (x, px), (y, py) in itertools.combinations(items, 2):
        violation = add(tree.meet(x, y), tree.meet(px, py), (x, y))
        if violation:
            return forward, violation
    return forward, None


def pauto_violation(tree: MeetTree, mapping: Mapping[Label, Label]) -> Optional[PautoViolation]:
    """First reason `mapping` is not a partial automorphism of `tree`, or None."""
    for x, px in mapping.items():
        if x not in tree or px not in tree:
            raise InputError(f"map pair ({x!r}, {px!r}) mentions an unknown element")
    closure, violation = _closure_pairs(tree, mapping)
    if violation:
        return violation
    for a, b in itertools.combinations(sorted(closure), 2):
        if tree.leq(a, b) != tree.leq(closure[a], closure[b]) or tree.leq(b, a) != tree.leq(closure[b], closure[a]):
            return PautoViolation("order-violation", (a, b))
    return None


class PartialAutomorphism:
    """A finite partial automorphism of a meet-tree."""

    __slots__ = ("tree", "_map")

    def __init__(self, tree: MeetTree, mapping: Mapping[Label, Label], validate: bool = True) -> None:
        self.tree = tree
        self._map: Dict[Label, Label] = dict(mapping)
        if validate:
            violation = pauto_violation(tree, self._map)
            if violation:
                raise PautoValidationError(violation)

    @property
    def pairs(self) -> Pairs:
        return tuple(sorted(self._map.items()))

    @property
    def mapping(self) -> Dict[Label, Label]:
        return dict(self._map)

    @property
    def domain(self) -> FrozenSet[Label]:
        return frozenset(self._map)

    @property
    def range(self) -> FrozenSet[Label]:
        return frozenset(self._map.values())

    def __len__(self) -> int:
        return len(self._map)

    def __call__(self, label: Label) -> Label:
        return self._map[label]

    def get(self, label: Label, default: Optional[Label] = None) -> Optional[Label]:
        return self._map.get(label, default)

    def apply_power(self, label: Label, power: int) -> Optional[Label]:
        step = self._map if power >= 0 else {v: k for k, v in self._map.items()}
        current: Optional[Label] = label
        for _ in range(abs(power)):
            current = step.get(current)
            if current is None:
                return None
        return current

    def inverse(self) -> "PartialAutomorphism":
        return PartialAutomorphism(self.tree, {v: k for k, v in self._map.items()}, validate=False)

    def restrict(self, labels: Iterable[Label]) -> "PartialAutomorphism":
        keep = set(labels)
        return PartialAutomorphism(self.tree, {k: v for k, v in self._map.items() if k in keep}, validate=False)

    def support(self) -> MeetTree:
        points = self.domain | self.range
        if not points:
            return self.tree
        return generated_substructure(self.tree, sorted(points))

    def on_support(self) -> "PartialAutomorphism":
        return PartialAutomorphism(self.support(), self._map, validate=False)

    def closure(self) -> Dict[Label, Label]:
        closure, violation = _closure_pairs(self.tree, self._map)
        if violation:
            raise PautoValidationError(violation)
        return closure

    def extends(self, other: "PartialAutomorphism") -> bool:
        return all(self._map.get(k) == v for k, v in other._map.items())

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, PartialAutomorphism):
            return NotImplemented
        return self.tree == other.tree and self._map == other._map

    def __hash__(self) -> int:
        return hash((self.tree, self.pairs))

    def __repr__(self) -> str:
        return f"PartialAutomorphism({dict(self.pairs)})"


def validate_pauto(tree: MeetTree, mapping: Mapping[Label, Label]) -> PartialAutomorphism:
    return PartialAutomorphism(tree, mapping)


# -- orbits -------------------------------------------------------------------------


def orbit_decomposition(p: PartialAutomorphism) -> List[Orbit]:
    mapping = p.mapping
    dom, rng = p.domain, p.range
    seen = set()
    orbits: List[Orbit] = []
    for start in sorted(dom - rng):
        points = [start]
        while points[-1] in mapping:
            points.append(mapping[points[-1]])
        seen.update(points)
        orbits.append(Orbit(tuple(points), cyclic=False))
    for start in sorted((dom | rng) - seen):
        if start in seen:
            continue
        points = [start]
        while mapping[points[-1]] != start:
            points.append(mapping[points[-1]])
        seen.update(points)
        orbits.append(Orbit(tuple(points), cyclic=True))
    return sorted(orbits, key=lambda o: o.points[0])


def orbit_of(p: PartialAutomorphism, label: Label) -> Orbit:
    for orbit in orbit_decomposition(p):
        if label in orbit.points:
            return orbit
    raise PreconditionError(f"{label!r} is not in the domain or range")


def orbit_automorphism(tree: MeetTree, orbit: Orbit) -> PartialAutomorphism:
    seq = orbit.sequence()
    return PartialAutomorphism(tree, dict(zip(seq, seq[1:])))


def _first_index(seq: Tuple[Label, ...], test: Callable[[int], bool], upper: Optional[int] = None) -> Optional[int]:
    for k in range(1, (len(seq) if upper is None else upper + 1)):
        if test(k):
            return k
    return None


def _matching_clauses(tree: MeetTree, orbit: Orbit) -> List[OrbitClass]:
    """Every classifying clause that holds, each with its least parameter."""
    seq = orbit.sequence()
    n = len(seq) - 1
    s0 = seq[0]
    found: List[OrbitClass] = []
    k = _first_index(seq, lambda k: seq[k] == s0)
    if k is not None:
        found.append(OrbitClass("cycle", k))
    k = _first_index(seq, lambda k: tree.lt(s0, seq[k]))
    if k is not None:
        found.append(OrbitClass("ascending-spiral", k))
    k = _first_index(seq, lambda k: tree.lt(seq[k], s0))
    if k is not None:
        found.append(OrbitClass("descending-spiral", k))
    k = _first_index(seq, lambda k: tree.lt(tree.meet(seq[k], s0), tree.meet(seq[2 * k], seq[k])), n // 2)
    if k is not None:
        found.append(OrbitClass("ascending-comb", k))
    k = _first_index(seq, lambda k: tree.lt(tree.meet(seq[2 * k], seq[k]), tree.meet(seq[k], s0)), n // 2)
    if k is not None:
        found.append(OrbitClass("descending-comb", k))
    return found


def pseudo_period(tree: MeetTree, orbit: Orbit) -> int:
    """Least u > 0 with seq[0]^seq[u] deepest among seq[0]^seq[i]."""
    seq = orbit.sequence()
    if len(seq) < 2:
        raise PreconditionError("pseudo-period needs at least two orbit points")
    depths = [tree.depth(tree.meet(seq[0], seq[i])) for i in range(1, len(seq))]
    return depths.index(max(depths)) + 1


def classify_orbit(tree: MeetTree, orbit: Orbit) -> OrbitClass:
    """First matching clause among cycle, spiral, comb; otherwise quasi-cycle."""
    clauses = _matching_clauses(tree, orbit)
    for family in ("cycle", "spiral", "comb"):
        hits = [c for c in clauses if c.kind.endswith(family)]
        if hits:
            if len(hits) > 1:
                logger.warning("orbit %s matches %s; taking the least parameter", orbit.points, hits)
            return min(hits, key=lambda c: c.parameter)
    if len(orbit.sequence()) < 2:
        return OrbitClass("quasi-cycle", 1)
    return OrbitClass("quasi-cycle", pseudo_period(tree, orbit))


def initial_points(p: PartialAutomorphism) -> FrozenSet[Label]:
    points = set(p.domain - p.range)
    for orbit in orbit_decomposition(p):
        if orbit.cyclic:
            points.update(orbit.points)
    return frozenset(points)


def time_reverse(orbit: Orbit) -> Orbit:
    if orbit.cyclic:
        return Orbit(orbit.points[:1] + tuple(reversed(orbit.points[1:])), cyclic=True)
    return Orbit(tuple(reversed(orbit.points)), cyclic=False)


# -- extensions ----------------------------------------------------------------------


def endpoint_extensions(
    p: PartialAutomorphism, endpoint: Label
) -> List[Tuple[PartialAutomorphism, OneTypeDescriptor]]:
    """All one-point extensions of the ambient tree sending `endpoint` to a point of some type."""
    if endpoint in p.domain:
        raise PreconditionError(f"{endpoint!r} is already in the domain")
    base = p.tree
    results: List[Tuple[PartialAutomorphism, OneTypeDescriptor]] = []
    for descriptor in enumerate_one_types(base):
        ext = realize_type(base, descriptor, taken=p.tree.labels)
        if ext.new_point in p.range:
            continue
        mapping = p.mapping
        mapping[endpoint] = ext.new_point
        if pauto_violation(ext.tree, mapping) is None:
            results.append((PartialAutomorphism(ext.tree, mapping, validate=False), descriptor))
    return results


def noncyclic_orbits(p: PartialAutomorphism) -> List[Orbit]:
    return [o for o in orbit_decomposition(p) if not o.cyclic]


def shortest_noncyclic_orbit(p: PartialAutomorphism) -> Orbit:
    candidates = noncyclic_orbits(p)
    if not candidates:
        raise PreconditionError("no non-cyclic orbit to extend")
    return min(candidates, key=lambda o: (len(o.points), o.points))


def immediate_extensions(p: PartialAutomorphism) -> List[Tuple[PartialAutomorphism, OneTypeDescriptor]]:
    orbit = shortest_noncyclic_orbit(p)
    return endpoint_extensions(p, orbit.points[-1])


def forward_steps(p: PartialAutomorphism) -> List[Tuple[PartialAutomorphism, ExtensionStep]]:
    """One-point extensions at the far end of every non-cyclic orbit."""
    steps: List[Tuple[PartialAutomorphism, ExtensionStep]] = []
    for orbit in noncyclic_orbits(p):
        endpoint = orbit.points[-1]
        for q, descriptor in endpoint_extensions(p, endpoint):
            steps.append((q, ExtensionStep(endpoint, descriptor, q(endpoint))))
    return steps


Witness = Union[Callable[[Label], Label], Mapping[Label, Label]]


def linear_union(f: PartialAutomorphism, g: PartialAutomorphism, witness: Witness) -> PartialAutomorphism:
    """Union of f and g when g agrees with f below a witness for each point of dom(f)."""
    tree = f.tree
    lookup = witness.get if isinstance(witness, Mapping) else witness
    for name, part in (("f", f), ("g", g)):
        if part.domain and not is_meet_closed(tree, part.domain):
            raise PreconditionError(f"dom({name}) is not closed under meets")
    g_map = g.mapping
    for eta in sorted(f.domain):
        a = lookup(eta)
        if a is None or a not in g_map:
            raise PreconditionError(f"witness for {eta!r} is not in dom(g)")
        if not tree.leq(eta, a):
            raise PreconditionError(f"witness {a!r} is not above {eta!r}")
        for x in sorted(g_map):
            if tree.leq(x, a) and f.get(x) != g_map[x]:
                raise PreconditionError(f"g and f disagree at {x!r} below witness {a!r} of {eta!r}")
    union = g.mapping
    for x, fx in f.mapping.items():
        if union.get(x, fx) != fx:
            raise PreconditionError(f"f and g disagree at {x!r}")
        union[x] = fx
    violation = pauto_violation(tree, union)
    if violation:
        raise Finding(f"union of compatible maps failed to validate: {violation}")
    return PartialAutomorphism(tree, union, validate=False)


def _positive_orbit(f: PartialAutomorphism, start: Label) -> List[Label]:
    points = [start]
    while points[-1] in f.domain:
        nxt = f(points[-1])
        if nxt in points:
            break
        points.append(nxt)
    return points


def _generated_by_orbits(p: PartialAutomorphism, f: PartialAutomorphism) -> bool:
    if not is_meet_closed(f.tree, f.domain):
        return False
    generators = set()
    for x in p.domain:
        generators.update(_positive_orbit(f, x))
    return meet_closure(f.tree, generators) == f.domain


def is_strict_extension(p: PartialAutomorphism, f: PartialAutomorphism) -> bool:
    """f extends p, permutes a substructure, and that substructure is generated by the f-orbits of dom(p)."""
    return f.extends(p) and f.domain == f.range and _generated_by_orbits(p, f)


def is_positively_strict_extension(p: PartialAutomorphism, f: PartialAutomorphism) -> bool:
    return f.extends(p) and f.range <= f.domain and _generated_by_orbits(p, f)


def is_immediate_extension(p: PartialAutomorphism, f: PartialAutomorphism) -> bool:
    """f adds exactly one domain point, the end of a shortest non-cyclic p-orbit."""
    if not f.extends(p):
        return False
    added = f.domain - p.domain
    if len(added) != 1:
        return False
    (a,) = added
    if a not in p.range:
        return False
    lengths = [len(o.points) for o in noncyclic_orbits(p)]
    return len(orbit_of(p, a).points) == min(lengths)


__all__ = [
    "PartialAutomorphism",
    "pauto_violation",
    "validate_pauto",
    "orbit_decomposition",
    "orbit_of",
    "orbit_automorphism",
    "classify_orbit",
    "pseudo_period",
    "initial_points",
    "time_reverse",
    "endpoint_extensions",
    "noncyclic_orbits",
    "shortest_noncyclic_orbit",
    "immediate_extensions",
    "forward_steps",
    "linear_union",
    "is_strict_extension",
    "is_positively_strict_extension",
    "is_immediate_extension",
]
