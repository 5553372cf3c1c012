"""Enumerated and seeded corpora of partial automorphisms, plus the two worked examples."""

from __future__ import annotations

import itertools
import logging
import random
from typing import Dict, Iterator, List, Optional, Tuple

from .config import NodeCounter, SearchConfig
from .pautomorph import PartialAutomorphism, orbit_decomposition, pauto_violation
from .tree import MeetTree, canonical_form, enumerate_trees, tree_from_code
from .tree_types import AmalgProblem, Label, Orbit

logger = logging.getLogger(__name__)


def isomorphisms(source: MeetTree, target: MeetTree) -> Iterator[Dict[Label, Label]]:
    """Every isomorphism source -> target, parents before children."""
    if len(source) != len(target):
        return
    if not len(source):
        yield {}
        return
    order = sorted(source.labels, key=lambda x: (source.depth(x), x))
    image: Dict[Label, Label] = {}
    used = set()

    def extend(pos: int) -> Iterator[Dict[Label, Label]]:
        if pos == len(order):
            yield dict(image)
            return
        x = order[pos]
        parent = source.parent(x)
        candidates = [target.root] if parent is None else target.children(image[parent])
        for y in candidates:
            if y in used or len(target.children(y)) != len(source.children(x)):
                continue
            image[x] = y
            used.add(y)
            yield from extend(pos + 1)
            used.discard(y)
            del image[x]

    yield from extend(0)


def tree_automorphisms(tree: MeetTree) -> List[Dict[Label, Label]]:
    return list(isomorphisms(tree, tree))


def canonical_pauto_key(p: PartialAutomorphism) -> str:
    """Isomorphism-invariant key of (tree, map): the least map image over all canonical relabelings."""
    code = canonical_form(p.tree)
    # outer pair is the completion bottom
    reference = tree_from_code(code[1:-1]) if len(p.tree) else p.tree
    best: Optional[Tuple[Tuple[Label, Label], ...]] = None
    for sigma in isomorphisms(p.tree, reference):
        moved = tuple(sorted((sigma[x], sigma[y]) for x, y in p.pairs))
        if best is None or moved < best:
            best = moved
    return code + "|" + ";".join(f"{x}>{y}" for x, y in best or ())


def enumerate_partial_automorphisms(
    tree: MeetTree, include_empty: bool = False, counter: Optional[NodeCounter] = None
) -> List[PartialAutomorphism]:
    """Every valid partial automorphism of the tree, domains by size then label."""
    labels = sorted(tree.labels)
    found: List[PartialAutomorphism] = []
    for size in range(0 if include_empty else 1, len(labels) + 1):
        for domain in itertools.combinations(labels, size):
            for image in itertools.permutations(labels, size):
                if counter is not None:
                    counter.charge()
                mapping = dict(zip(domain, image))
                if pauto_violation(tree, mapping) is None:
                    found.append(PartialAutomorphism(tree, mapping, validate=False))
    return found


def pauto_corpus(
    max_size: int, config: Optional[SearchConfig] = None, include_empty: bool = False
) -> List[PartialAutomorphism]:
    """Partial automorphisms of all trees up to max_size, one per isomorphism class."""
    counter = NodeCounter.for_config(config, "pauto_corpus")
    corpus: List[PartialAutomorphism] = []
    for tree in enumerate_trees(max_size, config, counter):
        seen = set()
        for p in enumerate_partial_automorphisms(tree, include_empty, counter):
            key = canonical_pauto_key(p)
            if key not in seen:
                seen.add(key)
                corpus.append(p)
    logger.info("partial automorphism corpus up to size %d: %d classes", max_size, len(corpus))
    return corpus


def orbit_corpus(max_size: int, config: Optional[SearchConfig] = None) -> Iterator[Tuple[MeetTree, Orbit]]:
    """(tree, orbit) for every orbit of every corpus automorphism."""
    for p in pauto_corpus(max_size, config):
        for orbit in orbit_decomposition(p):
            yield p.tree, orbit


# -- seeded amalgamation problems -------------------------------------------------------------


class _Grower:
    """Tree with a total automorphism, grown by equivariant moves."""

    def __init__(self, parents: Dict[Label, Optional[Label]], sigma: Dict[Label, Label], prefix: str) -> None:
        self.parents = dict(parents)
        self.sigma = dict(sigma)
        self.prefix = prefix
        self.counter = 0

    def _fresh(self) -> Label:
        self.counter += 1
        return f"{self.prefix}{self.counter}"

    def _orbit(self, x: Label) -> List[Label]:
        points = [x]
        while self.sigma[points[-1]] != x:
            points.append(self.sigma[points[-1]])
        return points

    def leaves(self, x: Label, copies: int) -> int:
        """Hang `copies` new points above each point of x's orbit, rotating the copies once per lap."""
        orbit = self._orbit(x)
        new = [[self._fresh() for _ in range(copies)] for _ in orbit]
        for i, row in enumerate(new):
            for j, y in enumerate(row):
                self.parents[y] = orbit[i]
                if i + 1 < len(orbit):
                    self.sigma[y] = new[i + 1][j]
                else:
                    self.sigma[y] = new[0][(j + 1) % copies]
        return len(orbit) * copies

    def subdivide(self, x: Label) -> int:
        """Insert a new point below every point of x's orbit."""
        orbit = self._orbit(x)
        new = [self._fresh() for _ in orbit]
        for i, (y, z) in enumerate(zip(orbit, new)):
            self.parents[z] = self.parents[y]
            self.parents[y] = z
            self.sigma[z] = new[(i + 1) % len(orbit)]
        return len(orbit)

    def grow(self, rng: random.Random, max_size: int, steps: int) -> None:
        for _ in range(steps):
            x = rng.choice(sorted(self.parents))
            size = len(self._orbit(x))
            copies = rng.choice((1, 1, 2))
            if rng.random() < 0.7:
                if len(self.parents) + size * copies <= max_size:
                    self.leaves(x, copies)
            elif len(self.parents) + size <= max_size:
                self.subdivide(x)

    def automorphism(self) -> PartialAutomorphism:
        return PartialAutomorphism(MeetTree.from_parents(self.parents, sorted(self.parents)), self.sigma)


def random_amalg_problem(rng: random.Random, max_size: int = 5) -> AmalgProblem:
    """A base with a total automorphism and two independently grown extensions of it."""
    base = _Grower({"r": None}, {"r": "r"}, "b")
    base.grow(rng, max(1, max_size - 2), rng.randint(0, 3))
    sides = []
    for prefix in ("l", "m"):
        side = _Grower(base.parents, base.sigma, prefix)
        side.grow(rng, max_size, rng.randint(0, 4))
        sides.append(side.automorphism())
    identity = tuple((x, x) for x in sorted(base.parents))
    return AmalgProblem(base.automorphism(), sides[0], sides[1], identity, identity, ("seeded random problem",))


def random_amalg_problems(count: int, seed: int = 17, max_size: int = 5) -> List[AmalgProblem]:
    rng = random.Random(seed)
    return [random_amalg_problem(rng, max_size) for _ in range(count)]


# -- worked examples ---------------------------------------------------------------------------


def mixed_orbits_example() -> PartialAutomorphism:
    """Two cycled branches: zeta is a 2-cycle, eta an ascending 4-spiral, mu an ascending 4-comb."""
    parents: Dict[Label, Optional[Label]] = {"root": None, "zeta0": "root", "zeta1": "root"}
    parents.update({"eta0": "zeta0", "eta2": "zeta0", "eta1": "zeta1", "eta3": "zeta1"})
    for i in range(4, 10):
        parents[f"eta{i}"] = f"eta{i - 4}"
    for i in range(9):
        parents[f"mu{i}"] = f"eta{i}"
    mapping = {"root": "root", "zeta0": "zeta1", "zeta1": "zeta0"}
    mapping.update({f"eta{i}": f"eta{i + 1}" for i in range(9)})
    mapping.update({f"mu{i}": f"mu{i + 1}" for i in range(8)})
    return PartialAutomorphism(MeetTree.from_parents(parents), mapping)


def quasicycle_example() -> PartialAutomorphism:
    """Eight eta points over a 3-cycle of mu points: a quasi-cycle of pseudo-period 3."""
    parents: Dict[Label, Optional[Label]] = {"root": None}
    parents.update({f"mu{i}": "root" for i in range(3)})
    parents.update({f"eta{j}": f"mu{j % 3}" for j in range(8)})
    mapping = {"root": "root"}
    mapping.update({f"mu{i}": f"mu{(i + 1) % 3}" for i in range(3)})
    mapping.update({f"eta{i}": f"eta{i + 1}" for i in range(7)})
    return PartialAutomorphism(MeetTree.from_parents(parents), mapping)


__all__ = [
    "isomorphisms",
    "tree_automorphisms",
    "canonical_pauto_key",
    "enumerate_partial_automorphisms",
    "pauto_corpus",
    "orbit_corpus",
    "random_amalg_problem",
    "random_amalg_problems",
    "mixed_orbits_example",
    "quasicycle_example",
]
