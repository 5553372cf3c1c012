"""
=============================================================================
MODULE NAME: tree.py
=============================================================================

INPUT FILES:
- None. Trees arrive as element lists plus order generators (see io.py).

OUTPUT FILES:
- None written directly.

VERSION HISTORY:
- v1.0: Dense-matrix meet-trees, validation with axiom witnesses, arity,
  completion, down-closure, rooted-code canonical forms and isomorph-free
  enumeration.

NOTES:
- A finite meet-tree always has a least element, so every tree here is a
  rooted tree and can be rebuilt from its parent map.
- `leq` is a boolean n x n numpy matrix (leq[i, j] means i <= j) and `meet`
  an integer n x n matrix of indices. Both are read-only after construction.
=============================================================================
"""

from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass
from typing import Dict, FrozenSet, Iterable, Iterator, List, Mapping, Optional, Sequence, Tuple

import numpy as np

from .config import NodeCounter, SearchConfig
from .errors import InputError, PreconditionError, TreeValidationError
from .tree_types import Embedding, Label, Violation

logger = logging.getLogger(__name__)


def _meet_table(leq: np.ndarray) -> np.ndarray:
    n = leq.shape[0]
    if n == 0:
        return np.zeros((0, 0), dtype=np.int64)
    depth = leq.sum(axis=0)
    common = leq[:, :, None] & leq[:, None, :]
    score = np.where(common, depth[:, None, None], -1)
    return score.argmax(axis=0).astype(np.int64)


class MeetTree:
    """A finite meet-tree over string labels."""

    __slots__ = ("_labels", "_index", "_leq", "_meet", "_depth", "_parent", "_leq_rows", "_meet_rows")

    def __init__(self, labels: Sequence[Label], leq: np.ndarray, meet: Optional[np.ndarray] = None) -> None:
        self._labels: Tuple[Label, ...] = tuple(labels)
        self._index: Dict[Label, int] = {label: i for i, label in enumerate(self._labels)}
        if len(self._index) != len(self._labels):
            raise InputError("duplicate element labels")
        leq_arr = np.array(leq, dtype=bool).reshape(len(self._labels), len(self._labels))
        meet_arr = _meet_table(leq_arr) if meet is None else np.array(meet, dtype=np.int64)
        leq_arr.setflags(write=False)
        meet_arr.setflags(write=False)
        self._leq = leq_arr
        self._meet = meet_arr
        self._depth: Tuple[int, ...] = tuple(int(d) - 1 for d in leq_arr.sum(axis=0))
        self._leq_rows: List[List[bool]] = leq_arr.tolist()
        self._meet_rows: List[List[int]] = meet_arr.tolist()
        parents: List[Optional[int]] = []
        for j in range(len(self._labels)):
            below = [i for i in range(len(self._labels)) if i != j and self._leq_rows[i][j]]
            parents.append(max(below, key=lambda i: self._depth[i]) if below else None)
        self._parent = tuple(parents)

    @classmethod
    def from_parents(
        cls, parents: Mapping[Label, Optional[Label]], order: Optional[Sequence[Label]] = None
    ) -> "MeetTree":
        labels = list(order) if order is not None else list(parents)
        index = {label: i for i, label in enumerate(labels)}
        if set(index) != set(parents):
            raise InputError("parent map and label order disagree")
        n = len(labels)
        leq = np.zeros((n, n), dtype=bool)
        roots = [label for label in labels if parents[label] is None]
        if n and len(roots) != 1:
            raise InputError(f"expected exactly one root, found {roots}")
        for label in labels:
            j = index[label]
            seen = set()
            node: Optional[Label] = label
            while node is not None:
                if node in seen:
                    raise InputError(f"parent cycle through {label!r}")
                if node not in index:
                    raise InputError(f"unknown parent {node!r}")
                seen.add(node)
                leq[index[node], j] = True
                node = parents[node]
        return cls(labels, leq)

    # -- basic access -------------------------------------------------------

    @property
    def labels(self) -> Tuple[Label, ...]:
        return self._labels

    def __len__(self) -> int:
        return len(self._labels)

    def __iter__(self) -> Iterator[Label]:
        return iter(self._labels)

    def __contains__(self, label: object) -> bool:
        return label in self._index

    def index(self, label: Label) -> int:
        try:
            return self._index[label]
        except KeyError:
            raise InputError(f"unknown element {label!r}") from None

    def leq(self, a: Label, b: Label) -> bool:
        return self._leq_rows[self._index[a]][self._index[b]]

    def lt(self, a: Label, b: Label) -> bool:
        return a != b and self._leq_rows[self._index[a]][self._index[b]]

    def comparable(self, a: Label, b: Label) -> bool:
        i, j = self._index[a], self._index[b]
        return self._leq_rows[i][j] or self._leq_rows[j][i]

    def meet(self, a: Label, b: Label) -> Label:
        return self._labels[self._meet_rows[self._index[a]][self._index[b]]]

    def depth(self, label: Label) -> int:
        return self._depth[self._index[label]]

    def parent(self, label: Label) -> Optional[Label]:
        p = self._parent[self._index[label]]
        return None if p is None else self._labels[p]

    def children(self, label: Label) -> List[Label]:
        i = self._index[label]
        return [self._labels[j] for j, p in enumerate(self._parent) if p == i]

    @property
    def root(self) -> Optional[Label]:
        for label, p in zip(self._labels, self._parent):
            if p is None:
                return label
        return None

    def down(self, label: Label) -> List[Label]:
        """Elements below `label`, bottom-up."""
        j = self._index[label]
        below = [i for i in range(len(self._labels)) if self._leq_rows[i][j]]
        return [self._labels[i] for i in sorted(below, key=lambda i: self._depth[i])]

    def up(self, label: Label) -> List[Label]:
        i = self._index[label]
        return [self._labels[j] for j in range(len(self._labels)) if self._leq_rows[i][j]]

    def parents_map(self) -> Dict[Label, Optional[Label]]:
        return {label: self.parent(label) for label in self._labels}

    def cover_pairs(self) -> List[Tuple[Label, Label]]:
        return [(self._labels[p], label) for label, p in zip(self._labels, self._parent) if p is not None]

    # -- derived structures -------------------------------------------------

    def restrict(self, labels: Iterable[Label]) -> "MeetTree":
        keep = set(labels)
        for label in keep:
            self.index(label)
        idx = [i for i, label in enumerate(self._labels) if label in keep]
        pos = np.full(len(self._labels), -1, dtype=np.int64)
        pos[idx] = np.arange(len(idx))
        sub_leq = self._leq[np.ix_(idx, idx)]
        sub_meet = pos[self._meet[np.ix_(idx, idx)]] if idx else np.zeros((0, 0), dtype=np.int64)
        if (sub_meet < 0).any():
            raise PreconditionError("subset is not closed under meets")
        return MeetTree([self._labels[i] for i in idx], sub_leq, sub_meet)

    def with_parents(
        self, updates: Mapping[Label, Optional[Label]], order: Optional[Sequence[Label]] = None
    ) -> "MeetTree":
        parents = self.parents_map()
        parents.update(updates)
        if order is None:
            order = list(self._labels) + [label for label in updates if label not in self._index]
        return MeetTree.from_parents(parents, order)

    # -- comparisons ------------------------------------------------------------

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, MeetTree):
            return NotImplemented
        if set(self._labels) != set(other._labels):
            return False
        return self.parents_map() == other.parents_map()

    def __hash__(self) -> int:
        return hash(frozenset(self.parents_map().items()))

    def __repr__(self) -> str:
        return f"MeetTree({len(self)} elements, covers={self.cover_pairs()})"


def fresh_label(taken: Iterable[Label], prefix: str = "x") -> Label:
    used = set(taken)
    i = 0
    while f"{prefix}{i}" in used:
        i += 1
    return f"{prefix}{i}"


def chain(*labels: Label) -> MeetTree:
    """Chain labels[0] < labels[1] < ..."""
    parents: Dict[Label, Optional[Label]] = {}
    prev: Optional[Label] = None
    for label in labels:
        parents[label] = prev
        prev = label
    return MeetTree.from_parents(parents)


# -- validation -----------------------------------------------------------------


def tree_violations(
    elements: Sequence[Label],
    leq_pairs: Iterable[Tuple[Label, Label]],
    meet: Optional[Mapping[Tuple[Label, Label], Label]] = None,
) -> Tuple[List[Violation], Optional[np.ndarray]]:
    """Check the meet-tree axioms; returns the violations and the closed order."""
    labels = list(elements)
    index = {label: i for i, label in enumerate(labels)}
    if len(index) != len(labels):
        raise InputError("duplicate element labels")
    n = len(labels)
    order = np.eye(n, dtype=bool)
    for a, b in leq_pairs:
        if a not in index or b not in index:
            raise InputError(f"leq pair mentions unknown element: {a!r}, {b!r}")
        order[index[a], index[b]] = True
    for k in range(n):
        order |= order[:, k : k + 1] & order[k : k + 1, :]

    violations: List[Violation] = []
    for i, j in itertools.combinations(range(n), 2):
        if order[i, j] and order[j, i]:
            violations.append(Violation("non-order", (labels[i], labels[j]), "antisymmetry fails"))
    if violations:
        return violations, None

    reported = set()
    for c in range(n):
        below = np.flatnonzero(order[:, c])
        for i, j in itertools.combinations(below, 2):
            if not (order[i, j] or order[j, i]) and (i, j) not in reported:
                reported.add((i, j))
                violations.append(
                    Violation("non-semilinear", (labels[i], labels[j], labels[c]), "down-set is not a chain")
                )

    computed: Dict[Tuple[int, int], int] = {}
    for i, j in itertools.combinations_with_replacement(range(n), 2):
        common = np.flatnonzero(order[:, i] & order[:, j])
        top = [k for k in common if all(order[m, k] for m in common)]
        if not top:
            violations.append(Violation("missing-meet", (labels[i], labels[j]), "no greatest common lower bound"))
            continue
        computed[(i, j)] = computed[(j, i)] = int(top[0])

    for (a, b), given in (meet or {}).items():
        for label in (a, b, given):
            if label not in index:
                raise InputError(f"meet entry mentions unknown element: {label!r}")
        expected = computed.get((index[a], index[b]))
        if expected is not None and labels[expected] != given:
            violations.append(
                Violation("wrong-meet", (a, b, given), f"meet is {labels[expected]!r}")
            )
    return violations, order


def validate_tree(
    elements: Sequence[Label],
    leq_pairs: Iterable[Tuple[Label, Label]],
    meet: Optional[Mapping[Tuple[Label, Label], Label]] = None,
) -> MeetTree:
    violations, order = tree_violations(elements, leq_pairs, meet)
    if violations:
        raise TreeValidationError(violations)
    return MeetTree(elements, order)


# -- substructures ------------------------------------------------------------------


def meet_closure(tree: MeetTree, subset: Iterable[Label]) -> FrozenSet[Label]:
    items = list(dict.fromkeys(subset))
    closed = set(items)
    for a, b in itertools.combinations(items, 2):
        closed.add(tree.meet(a, b))
    return frozenset(closed)


def generated_substructure(tree: MeetTree, subset: Iterable[Label]) -> MeetTree:
    items = list(subset)
    if not items:
        raise PreconditionError("generated_substructure needs a nonempty subset")
    return tree.restrict(meet_closure(tree, items))


def downward_closure(tree: MeetTree, subset: Iterable[Label]) -> FrozenSet[Label]:
    closed = set()
    for label in subset:
        closed.update(tree.down(label))
    return frozenset(closed)


def is_meet_closed(tree: MeetTree, subset: Iterable[Label]) -> bool:
    items = set(subset)
    return all(tree.meet(a, b) in items for a, b in itertools.combinations(items, 2))


def arity(tree: MeetTree) -> int:
    """Size of the largest antichain whose pairwise meets are one common element.

    Elements strictly above b fall into branches at b (one per child of b);
    picking one element per branch gives such an antichain with meet b.
    """
    best = 1
    for label in tree.labels:
        best = max(best, len(tree.children(label)))
    return best


def order_arity(tree: MeetTree) -> int:
    """Arity via coherent antichains: any b below two members lies below the third."""
    labels = tree.labels
    best = 1 if labels else 0
    for size in range(2, len(labels) + 1):
        found = False
        for group in itertools.combinations(labels, size):
            if any(tree.comparable(a, b) for a, b in itertools.combinations(group, 2)):
                continue
            if all(
                tree.lt(b, z)
                for x, y, z in itertools.permutations(group, 3)
                for b in labels
                if tree.lt(b, x) and tree.lt(b, y)
            ):
                found = True
                break
        if not found:
            break
        best = size
    return best


@dataclass(frozen=True, slots=True)
class Completion:
    tree: MeetTree
    embedding: Embedding
    bottom: Label


def completion(tree: MeetTree, bottom_label: Optional[Label] = None) -> Completion:
    """Tree of all cuts ordered by inclusion; the empty cut becomes a new bottom."""
    bottom = bottom_label or fresh_label(tree.labels, "bot")
    if bottom in tree:
        raise PreconditionError(f"bottom label {bottom!r} already used")
    cuts: List[Tuple[Label, FrozenSet[Label]]] = [(bottom, frozenset())]
    cuts.extend((label, frozenset(tree.down(label))) for label in tree.labels)
    n = len(cuts)
    leq = np.zeros((n, n), dtype=bool)
    for (i, (_, ci)), (j, (_, cj)) in itertools.product(enumerate(cuts), repeat=2):
        leq[i, j] = ci <= cj
    completed = MeetTree([label for label, _ in cuts], leq)
    embedding = Embedding(tree, completed, tuple((label, label) for label in tree.labels))
    return Completion(completed, embedding, bottom)


def check_embedding(source: MeetTree, target: MeetTree, mapping: Mapping[Label, Label]) -> List[Violation]:
    problems: List[Violation] = []
    if set(mapping) != set(source.labels):
        problems.append(Violation("not-total", tuple(sorted(set(source.labels) - set(mapping)))))
        return problems
    images = list(mapping.values())
    if len(set(images)) != len(images):
        problems.append(Violation("not-injective", tuple(sorted(images))))
    for label in images:
        if label not in target:
            problems.append(Violation("unknown-target", (label,)))
            return problems
    for a, b in itertools.product(source.labels, repeat=2):
        if source.leq(a, b) != target.leq(mapping[a], mapping[b]):
            problems.append(Violation("order", (a, b)))
        elif mapping[source.meet(a, b)] != target.meet(mapping[a], mapping[b]):
            problems.append(Violation("meet", (a, b)))
    return problems


# -- canonical forms and enumeration ----------------------------------------------------


def _mark(marks: Optional[Mapping[Label, str]], label: Label) -> str:
    if not marks or label not in marks:
        return ""
    m = marks[label]
    return f"[{len(m)}:{m}]"


def _rooted_code(tree: MeetTree, node: Label, marks: Optional[Mapping[Label, str]]) -> str:
    kids = sorted(_rooted_code(tree, child, marks) for child in tree.children(node))
    return "(" + _mark(marks, node) + "".join(kids) + ")"


def canonical_form(tree: MeetTree, marks: Optional[Mapping[Label, str]] = None) -> str:
    """Rooted-tree code of the completion; children sorted by their own codes."""
    root = tree.root
    if root is None:
        return "()"
    return "(" + _rooted_code(tree, root, marks) + ")"


def brute_force_isomorphic(
    first: MeetTree,
    second: MeetTree,
    marks_first: Optional[Mapping[Label, str]] = None,
    marks_second: Optional[Mapping[Label, str]] = None,
) -> bool:
    if len(first) != len(second):
        return False
    marks_first = marks_first or {}
    marks_second = marks_second or {}
    src = first.labels
    for image in itertools.permutations(second.labels):
        mapping = dict(zip(src, image))
        if any(marks_first.get(x) != marks_second.get(mapping[x]) for x in src):
            continue
        if all(first.leq(a, b) == second.leq(mapping[a], mapping[b]) for a, b in itertools.product(src, repeat=2)):
            return True
    return False


def _parents_from_code(code: str) -> Dict[Label, Optional[Label]]:
    parents: Dict[Label, Optional[Label]] = {}
    stack: List[Label] = []
    for ch in code:
        if ch == "(":
            label = f"v{len(parents)}"
            parents[label] = stack[-1] if stack else None
            stack.append(label)
        elif ch == ")":
            stack.pop()
        else:
            raise InputError(f"bad tree code character {ch!r}")
    return parents


def tree_from_code(code: str) -> MeetTree:
    return MeetTree.from_parents(_parents_from_code(code))


def _code_of_parents(parents: Mapping[Label, Optional[Label]]) -> str:
    kids: Dict[Optional[Label], List[Label]] = {}
    for label, parent in parents.items():
        kids.setdefault(parent, []).append(label)

    def code(node: Label) -> str:
        return "(" + "".join(sorted(code(child) for child in kids.get(node, []))) + ")"

    (root,) = kids[None]
    return code(root)


def enumerate_trees(
    max_size: int, config: Optional[SearchConfig] = None, counter: Optional[NodeCounter] = None
) -> List[MeetTree]:
    """One meet-tree per isomorphism class with 1..max_size elements.

    Trees of size m are grown from trees of size m-1 by attaching one leaf in
    every position and deduplicating by rooted code. Output is ordered by size
    then code; labels are v0, v1, ... in preorder of the code.
    """
    if max_size < 1:
        raise PreconditionError("enumerate_trees needs max_size >= 1")
    counter = counter or NodeCounter.for_config(config, "enumerate_trees")
    levels: List[List[str]] = [["()"]]
    for size in range(2, max_size + 1):
        seen = set()
        for code in levels[-1]:
            parents = _parents_from_code(code)
            new_label = f"v{len(parents)}"
            for node in list(parents):
                counter.charge()
                grown = dict(parents)
                grown[new_label] = node
                seen.add(_code_of_parents(grown))
        levels.append(sorted(seen))
        logger.debug("enumerate_trees: %d classes of size %d", len(seen), size)
    return [tree_from_code(code) for level in levels for code in level]


__all__ = [
    "MeetTree",
    "Completion",
    "fresh_label",
    "chain",
    "tree_violations",
    "validate_tree",
    "meet_closure",
    "generated_substructure",
    "downward_closure",
    "is_meet_closed",
    "arity",
    "order_arity",
    "completion",
    "check_embedding",
    "canonical_form",
    "brute_force_isomorphic",
    "tree_from_code",
    "enumerate_trees",
]
