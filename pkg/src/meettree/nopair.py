"""
=============================================================================
MODULE NAME: nopair.py
=============================================================================

INPUT FILES:
- None.

OUTPUT FILES:
- None written directly; the CLI serializes pairs and certificates.

VERSION HISTORY:
- v1.0: Two-sided extension in dense linear orders, cost and minimal pairs,
  irreconcilable extensions with word certificates, the lift onto a branch
  of a meet-tree, and a bounded search for common extensions.

NOTES:
- A dense order unbounded below is a finite set of Fractions plus on-demand
  insertion: midpoints inside gaps, and min - 1 / max + 1 at the ends.
- Words are applied to the anchor from left to right. Letters are g1, g2,
  g1^-1 and g2^-1.
=============================================================================
"""

from __future__ import annotations

import hashlib
import itertools
import logging
from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, FrozenSet, Iterator, List, Optional, Sequence, Tuple

from .errors import Finding, PreconditionError
from .pautomorph import PartialAutomorphism, linear_union
from .tree import MeetTree, fresh_label
from .tree_types import Atom, AutPair, DistinguishingWord, ExhaustionReport, IrreconcilablePairs, Label, Point

logger = logging.getLogger(__name__)

LinearMap = Dict[Fraction, Fraction]
LETTERS = ("g1", "g2", "g1^-1", "g2^-1")


@dataclass(frozen=True, slots=True)
class LinearOrder:
    points: FrozenSet[Fraction] = frozenset()

    @classmethod
    def of(cls, *values) -> "LinearOrder":
        return cls(frozenset(Fraction(v) for v in values))

    def sorted(self) -> List[Fraction]:
        return sorted(self.points)

    def lt(self, x: Fraction, y: Fraction) -> bool:
        return x < y

    def insert(self, *values: Fraction) -> "LinearOrder":
        return LinearOrder(self.points | frozenset(values))

    def next_above(self, x: Fraction) -> Optional[Fraction]:
        above = [y for y in self.points if y > x]
        return min(above) if above else None

    def next_below(self, x: Fraction) -> Optional[Fraction]:
        below = [y for y in self.points if y < x]
        return max(below) if below else None

    def fresh_above(self, x: Fraction) -> Fraction:
        """Point in (x, next point above x) with nothing of the order in between."""
        nxt = self.next_above(x)
        return x + 1 if nxt is None else (x + nxt) / 2

    def fresh_below(self, x: Fraction) -> Fraction:
        prev = self.next_below(x)
        return x - 1 if prev is None else (prev + x) / 2

    def lowest_fresh_in(self, lo: Optional[Fraction], hi: Optional[Fraction]) -> Fraction:
        """Lowest insertion point of the open interval (lo, hi); None bounds are infinite."""
        if lo is None:
            floor = min(self.points) if self.points else (hi if hi is not None else Fraction(0))
            return floor - 1
        return self.fresh_above(lo)


def linear_violation(mapping: LinearMap) -> Optional[Tuple[Fraction, Fraction]]:
    """Pair of domain points whose images are out of order or equal."""
    items = sorted(mapping.items())
    for (x, fx), (y, fy) in zip(items, items[1:]):
        if not fx < fy:
            return (x, y)
    return None


def _gap_image(mapping: LinearMap, point: Fraction) -> Tuple[Optional[Fraction], Optional[Fraction]]:
    """Bounds for an image of `point` consistent with `mapping`."""
    lower = [x for x in mapping if x < point]
    upper = [x for x in mapping if x > point]
    lo = mapping[max(lower)] if lower else None
    hi = mapping[min(upper)] if upper else None
    return lo, hi


def _inverse(mapping: LinearMap) -> LinearMap:
    return {v: k for k, v in mapping.items()}


def _fresh_in(order: LinearOrder, lo: Optional[Fraction], hi: Optional[Fraction]) -> Fraction:
    # callers always have at least one bound
    return order.fresh_below(hi) if lo is None else order.fresh_above(lo)


def extend_linear_both_ways(
    order: LinearOrder, g: LinearMap, a: Fraction, b: Fraction
) -> Tuple[Fraction, Fraction, LinearMap, LinearOrder]:
    """Points d1, d2 with g + {d1 -> b, b -> d2} still order preserving.

    d1 is the existing preimage of b when there is one, otherwise a fresh
    point in the matching gap of the domain; d2 likewise on the image side.
    """
    if a not in g or not (b <= g[a] <= a):
        raise PreconditionError("extend_linear_both_ways needs b <= g(a) <= a")
    order = order.insert(a, b, *g.keys(), *g.values())
    extended = dict(g)
    inverse = _inverse(extended)
    if b in inverse:
        d1 = inverse[b]
    else:
        lo, hi = _gap_image(inverse, b)
        d1 = _fresh_in(order, lo, hi)
        order = order.insert(d1)
        extended[d1] = b
    if b in extended:
        d2 = extended[b]
    else:
        lo, hi = _gap_image(extended, b)
        d2 = _fresh_in(order, lo, hi)
        order = order.insert(d2)
        extended[b] = d2
    if linear_violation(extended) is not None:
        raise Finding(f"two-sided extension at b={b} is not order preserving")
    return d1, d2, extended, order


def cost(b0: Fraction, g: LinearMap) -> int:
    return sum(1 for x in g if x <= b0) + sum(1 for y in g.values() if y <= b0)


def _generators(pair: AutPair) -> Dict[str, LinearMap]:
    g1, g2 = pair.maps()
    return {"g1": g1, "g2": g2, "g1^-1": _inverse(g1), "g2^-1": _inverse(g2)}


def orbit_words(pair: AutPair) -> Dict[Point, Tuple[str, ...]]:
    """Shortest word reaching each point of the anchor's orbit, letters in fixed order."""
    gens = _generators(pair)
    words: Dict[Point, Tuple[str, ...]] = {pair.anchor: ()}
    queue = deque([pair.anchor])
    while queue:
        x = queue.popleft()
        for letter in LETTERS:
            y = gens[letter].get(x)
            if y is not None and y not in words:
                words[y] = words[x] + (letter,)
                queue.append(y)
    return words


def _below(order, x: Point, y: Point) -> bool:
    return order.lt(x, y)


def orbit_minimum(pair: AutPair) -> Point:
    points = list(orbit_words(pair))
    lowest = points[0]
    for x in points[1:]:
        if _below(pair.order, x, lowest):
            lowest = x
    return lowest


def cost_at_minimum(pair: AutPair) -> int:
    g1, g2 = pair.maps()
    m = orbit_minimum(pair)
    return cost(m, g1) + cost(m, g2)


def _with_map(pair: AutPair, index: int, mapping: LinearMap, order: LinearOrder) -> AutPair:
    pairs = tuple(sorted(mapping.items()))
    if index == 1:
        return AutPair(order, pairs, pair.g2, pair.anchor)
    return AutPair(order, pair.g1, pairs, pair.anchor)


def _reductions(pair: AutPair, c: Fraction) -> Iterator[AutPair]:
    order: LinearOrder = pair.order
    for index, mapping in enumerate(pair.maps(), start=1):
        if c not in mapping:
            lo, hi = _gap_image(mapping, c)
            d = order.lowest_fresh_in(lo, hi)
            grown = dict(mapping)
            grown[c] = d
            yield _with_map(pair, index, grown, order.insert(d))
        inverse = _inverse(mapping)
        if c not in inverse:
            lo, hi = _gap_image(inverse, c)
            d = order.lowest_fresh_in(lo, hi)
            grown = dict(mapping)
            grown[d] = c
            yield _with_map(pair, index, grown, order.insert(d))


def _membership(pair: AutPair, c: Point) -> List[str]:
    g1, g2 = pair.maps()
    sets = {"dom(g1)": g1.keys(), "dom(g2)": g2.keys(), "range(g1)": g1.values(), "range(g2)": g2.values()}
    return [name for name, members in sets.items() if c in members]


def minimize_pair(pair: AutPair) -> AutPair:
    """Extend the pair while one new point at the orbit minimum lowers the cost there."""
    g1, g2 = pair.maps()
    a = pair.anchor
    if a not in g1 or a not in g2 or not (g1[a] < a and g2[a] < a):
        raise PreconditionError("minimize_pair needs g1(a) < a and g2(a) < a")
    current = AutPair(pair.order.insert(*g1, *g1.values(), *g2, *g2.values()), pair.g1, pair.g2, a)
    score = cost_at_minimum(current)
    for _ in range(score + 1):
        c = orbit_minimum(current)
        for candidate in _reductions(current, c):
            first, second = candidate.maps()
            if linear_violation(first) or linear_violation(second):
                continue
            lowered = cost_at_minimum(candidate)
            if lowered < score:
                logger.debug("cost at minimum %d -> %d", score, lowered)
                current, score = candidate, lowered
                break
        else:
            break
    c = orbit_minimum(current)
    if len(_membership(current, c)) != 1:
        raise Finding(f"minimal pair has orbit minimum {c} in {_membership(current, c)}")
    return current


def evaluate_word(pair: AutPair, word: Sequence[str]) -> Optional[Point]:
    gens = _generators(pair)
    current: Optional[Point] = pair.anchor
    for letter in word:
        current = gens[letter].get(current)
        if current is None:
            return None
    return current


def evaluate_certificate(pair: AutPair, certificate: DistinguishingWord) -> Optional[bool]:
    """Truth value of the atom under `pair`, or None when a letter is undefined."""
    left = evaluate_word(pair, certificate.atom.left)
    right = evaluate_word(pair, certificate.atom.right)
    if left is None or right is None:
        return None
    if certificate.atom.relation == "<":
        return _below(pair.order, left, right)
    if certificate.atom.relation == "=":
        return left == right
    raise PreconditionError(f"unknown relation {certificate.atom.relation!r}")


def irreconcilable_extensions(pair: AutPair) -> IrreconcilablePairs:
    """Split the map missing the orbit minimum c into c -> c+ and c -> c-."""
    order: LinearOrder = pair.order
    words = orbit_words(pair)
    c = orbit_minimum(pair)
    owners = _membership(pair, c)
    if len(owners) != 1:
        raise PreconditionError(f"pair is not minimal: orbit minimum {c} lies in {owners}")
    j = 2 if owners[0].endswith("(g1)") else 1
    target = pair.maps()[j - 1]
    c_plus = order.fresh_above(c)
    c_minus = order.fresh_below(c)
    grown = order.insert(c_plus, c_minus)
    word = words[c]

    attempts = (
        ({c: c_plus}, {c: c_minus}, f"g{j}"),
        ({c_plus: c}, {c_minus: c}, f"g{j}^-1"),
    )
    for up, down, letter in attempts:
        first_map = {**target, **up}
        second_map = {**target, **down}
        if linear_violation(first_map) or linear_violation(second_map):
            logger.debug("extension %s of g%d fails, trying the inverse side", up, j)
            continue
        first = _with_map(pair, j, first_map, grown)
        second = _with_map(pair, j, second_map, grown)
        certificate = DistinguishingWord(word, Atom(word, "<", word + (letter,)))
        if evaluate_certificate(first, certificate) is not True or evaluate_certificate(second, certificate) is not False:
            raise Finding("distinguishing word does not separate the two extensions")
        return IrreconcilablePairs(first, second, certificate, j)
    raise Finding(f"neither side of g{j} extends at the orbit minimum {c}")


def nopair_demo(a: Fraction = Fraction(0), b: Fraction = Fraction(-1)) -> Tuple[AutPair, AutPair, IrreconcilablePairs]:
    """The seed pair g1 = g2 = {a -> b}, its minimization, and the two irreconcilable extensions."""
    seed = AutPair(LinearOrder.of(a, b), ((a, b),), ((a, b),), a)
    minimal = minimize_pair(seed)
    return seed, minimal, irreconcilable_extensions(minimal)


# -- bounded common-extension search -------------------------------------------------------------


def _merges(xs: Sequence, ys: Sequence) -> Iterator[Tuple[Tuple[Optional[object], Optional[object]], ...]]:
    """Every way to interleave two increasing chains, allowing identifications."""
    if not xs:
        yield tuple((None, y) for y in ys)
        return
    if not ys:
        yield tuple((x, None) for x in xs)
        return
    for rest in _merges(xs[1:], ys):
        yield ((xs[0], None),) + rest
    for rest in _merges(xs, ys[1:]):
        yield ((None, ys[0]),) + rest
    for rest in _merges(xs[1:], ys[1:]):
        yield ((xs[0], ys[0]),) + rest


def nopair_exhaust(first: AutPair, second: AutPair, max_size: int = 9) -> ExhaustionReport:
    """Search linear orders of at most `max_size` points that jointly extend both pairs over the anchor.

    Candidate orders are the interleavings (with identifications) of the two
    sides, separately below and above the shared anchor. A candidate is a
    solution when both merged maps are order-preserving partial functions.
    """
    a = first.anchor
    if second.anchor != a:
        raise PreconditionError("pairs must share the anchor")
    sides = []
    for pair in (first, second):
        g1, g2 = pair.maps()
        points = set(pair.order.points) | set(g1) | set(g1.values()) | set(g2) | set(g2.values()) | {a}
        sides.append((sorted(x for x in points if x < a), sorted(x for x in points if x > a), (g1, g2)))
    digest = hashlib.sha256()
    nodes = 0
    solutions = 0
    for below in _merges(sides[0][0], sides[1][0]):
        for above in _merges(sides[0][1], sides[1][1]):
            size = len(below) + len(above) + 1
            if size > max_size:
                continue
            nodes += 1
            merged = list(below) + [(a, a)] + list(above)
            digest.update(repr(merged).encode("utf-8"))
            position: List[Dict[Fraction, int]] = [{}, {}]
            for rank, slots in enumerate(merged):
                for side, point in enumerate(slots):
                    if point is not None:
                        position[side][point] = rank
            if all(_merged_map_ok(sides, position, index) for index in (0, 1)):
                solutions += 1
    logger.info("common-extension search up to %d points: %d candidates, %d solutions", max_size, nodes, solutions)
    return ExhaustionReport(max_size, None, nodes, solutions, digest.hexdigest())


def _merged_map_ok(sides, position: List[Dict[Fraction, int]], index: int) -> bool:
    merged: Dict[int, int] = {}
    for side in (0, 1):
        for x, y in sides[side][2][index].items():
            src, dst = position[side][x], position[side][y]
            if merged.get(src, dst) != dst:
                return False
            merged[src] = dst
    images = [merged[k] for k in sorted(merged)]
    return all(u < v for u, v in zip(images, images[1:]))


# -- lift to a branch of a meet-tree ------------------------------------------------------------


def _graft_rationals(tree: MeetTree, from_q: Dict[Fraction, Label], added: Sequence[Fraction]) -> MeetTree:
    """Insert a chain point for each new rational; `from_q` gains the new labels."""
    parents = tree.parents_map()
    chain_points = sorted(from_q)
    for q in added:
        label = fresh_label(parents, "q")
        lower = [r for r in chain_points if r < q]
        upper = [r for r in chain_points if r > q]
        parents[label] = from_q[max(lower)] if lower else None
        # a point above the whole branch becomes a new leaf
        if upper:
            parents[from_q[min(upper)]] = label
        from_q[q] = label
        chain_points.append(q)
        chain_points.sort()
    return MeetTree.from_parents(parents, list(tree.labels) + [from_q[q] for q in added])


def lift_to_tree(
    tree: MeetTree, p1: PartialAutomorphism, p2: PartialAutomorphism, anchor: Label
) -> IrreconcilablePairs:
    """Run the linear construction on the chain below `anchor` and glue it back.

    The branch is read as rationals with the anchor at 0 and one unit per
    level; new rationals become new chain points. Each side is then the union
    of the branch map with the closure of p_i, witnessed by the anchor.
    """
    if anchor not in p1.domain or anchor not in p2.domain:
        raise PreconditionError("both maps must be defined at the anchor")
    image = p1(anchor)
    if p2(anchor) != image or not tree.lt(image, anchor):
        raise PreconditionError("needs p1(a) = p2(a) < a")
    branch = tree.down(anchor)
    base_depth = tree.depth(anchor)
    to_q = {x: Fraction(tree.depth(x) - base_depth) for x in branch}
    from_q = {q: x for x, q in to_q.items()}
    closures = [p1.closure(), p2.closure()]
    linear = [
        tuple(sorted((to_q[x], to_q[y]) for x, y in closure.items() if x in to_q and y in to_q)) for closure in closures
    ]
    seed = AutPair(LinearOrder(frozenset(to_q.values())), linear[0], linear[1], Fraction(0))
    result = irreconcilable_extensions(minimize_pair(seed))

    added = sorted(
        (set(result.first.order.points) | set(result.second.order.points)) - set(from_q),
    )
    grown = _graft_rationals(tree, from_q, added)

    lifted = []
    for pair in (result.first, result.second):
        maps = []
        for index, linear_map in enumerate(pair.maps()):
            f = PartialAutomorphism(grown, {from_q[x]: from_q[y] for x, y in linear_map.items()})
            g = PartialAutomorphism(grown, closures[index])
            maps.append(linear_union(f, g, lambda _eta: anchor))
        lifted.append(AutPair(grown, maps[0].pairs, maps[1].pairs, anchor))
    certificate = result.certificate
    for pair, expected in zip(lifted, (True, False)):
        if evaluate_certificate(pair, certificate) is not expected:
            raise Finding("lifted pairs are not separated by the distinguishing word")
    return IrreconcilablePairs(lifted[0], lifted[1], certificate, result.extended_map)


__all__ = [
    "LinearOrder",
    "linear_violation",
    "extend_linear_both_ways",
    "cost",
    "orbit_words",
    "orbit_minimum",
    "cost_at_minimum",
    "minimize_pair",
    "evaluate_word",
    "evaluate_certificate",
    "irreconcilable_extensions",
    "nopair_demo",
    "nopair_exhaust",
    "lift_to_tree",
]
