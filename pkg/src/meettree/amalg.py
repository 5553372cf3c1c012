"""
=============================================================================
MODULE NAME: amalg.py
=============================================================================

INPUT FILES:
- None. Problems are built in code or decoded by io.py.

OUTPUT FILES:
- None written directly. Exhaustion reports are serialized by io.py.

VERSION HISTORY:
- v1.0: Joint embedding, down-closure of a base in two extensions, union
  amalgamation for total automorphisms, bounded exhaustive amalgamation for
  partial automorphisms, the arity-bounded failure instance.

NOTES:
- Every problem is first normalized: base labels are shared by both sides and
  the remaining labels of the two sides are made disjoint with prime suffixes.
- Down-closure puts the points a side adds below a base element h into the
  edge just under h. When both sides add points under the same h they must be
  comparable (everything under h is a chain); the left side goes below the
  right side and the choice is recorded in the provenance.
=============================================================================
"""

from __future__ import annotations

import hashlib
import logging
import time
from typing import Dict, List, Optional, Sequence, Tuple

from .config import NodeCounter, ProgressCallback, SearchConfig
from .errors import Finding, InputError, PreconditionError
from .pautomorph import PartialAutomorphism, pauto_violation
from .qftypes import enumerate_one_types, realize_type
from .tree import MeetTree, arity, canonical_form, check_embedding, completion, downward_closure
from .tree_types import AmalgProblem, AmalgSearchResult, AmalgSolution, ExhaustionReport, Label, as_pairs

logger = logging.getLogger(__name__)


def _primed(label: Label, taken: set) -> Label:
    while label in taken:
        label = label + "'"
    return label


def relabel(p: PartialAutomorphism, names: Dict[Label, Label]) -> PartialAutomorphism:
    parents = {
        names[label]: (None if parent is None else names[parent]) for label, parent in p.tree.parents_map().items()
    }
    tree = MeetTree.from_parents(parents, [names[label] for label in p.tree.labels])
    return PartialAutomorphism(tree, {names[k]: names[v] for k, v in p.pairs}, validate=False)


def _check_inclusion(problem: AmalgProblem, side: str) -> Dict[Label, Label]:
    target: PartialAutomorphism = getattr(problem, side)
    inclusion = dict(getattr(problem, f"{side}_inclusion"))
    problems = check_embedding(problem.base.tree, target.tree, inclusion)
    if problems:
        raise InputError(f"{side} inclusion is not an embedding: {problems[0].kind} at {list(problems[0].witness)}")
    for b, fb in problem.base.pairs:
        if target.get(inclusion[b]) != inclusion[fb]:
            raise PreconditionError(f"agreement violation: {side} map disagrees with the base at {b!r}")
    return inclusion


def _normalize(
    problem: AmalgProblem,
) -> Tuple[PartialAutomorphism, PartialAutomorphism, Dict[Label, Label], Dict[Label, Label]]:
    """Relabel both sides so the base is shared and everything else is disjoint."""
    taken = set(problem.base.tree.labels)
    names: List[Dict[Label, Label]] = []
    for side in ("left", "right"):
        inclusion = _check_inclusion(problem, side)
        back = {image: b for b, image in inclusion.items()}
        side_names: Dict[Label, Label] = {}
        for label in getattr(problem, side).tree.labels:
            if label in back:
                side_names[label] = back[label]
            else:
                side_names[label] = _primed(label, taken)
                taken.add(side_names[label])
        names.append(side_names)
    left = relabel(problem.left, names[0])
    right = relabel(problem.right, names[1])
    return left, right, names[0], names[1]


def joint_embed(first: PartialAutomorphism, second: PartialAutomorphism) -> AmalgSolution:
    """Both structures side by side over a fresh common minimum v."""
    taken = set(first.tree.labels)
    second_names: Dict[Label, Label] = {}
    for label in second.tree.labels:
        second_names[label] = _primed(label, taken)
        taken.add(second_names[label])
    moved = relabel(second, second_names)
    v = _primed("v", taken)
    parents: Dict[Label, Optional[Label]] = {v: None}
    for part in (first, moved):
        for label, parent in part.tree.parents_map().items():
            parents[label] = v if parent is None else parent
    tree = MeetTree.from_parents(parents, [v] + list(first.tree.labels) + list(moved.tree.labels))
    mapping = first.mapping
    mapping.update(moved.mapping)
    automorphism = PartialAutomorphism(tree, mapping)
    return AmalgSolution(
        automorphism,
        tuple((label, label) for label in first.tree.labels),
        as_pairs(second_names),
        (f"joint embedding below fresh minimum {v}",),
    )


def _down_close(
    base_tree: MeetTree, left: PartialAutomorphism, right: PartialAutomorphism
) -> Tuple[PartialAutomorphism, PartialAutomorphism, PartialAutomorphism, Tuple[str, ...]]:
    base = set(base_tree.labels)
    added: List[Dict[Label, List[Label]]] = []
    for side in (left, right):
        per_top: Dict[Label, List[Label]] = {}
        for c in sorted(downward_closure(side.tree, base) - base, key=side.tree.depth):
            top = min((b for b in base if side.tree.leq(c, b)), key=side.tree.depth)
            per_top.setdefault(top, []).append(c)
        added.append(per_top)

    provenance: List[str] = []
    closed_parents: Dict[Label, Optional[Label]] = {}
    for h in base_tree.labels:
        run = added[0].get(h, []) + added[1].get(h, [])
        chain = [base_tree.parent(h)] + run + [h]
        for below, above in zip(chain, chain[1:]):
            closed_parents[above] = below
        if added[0].get(h) and added[1].get(h):
            provenance.append(f"equal cut under {h}: left {added[0][h]} placed below right {added[1][h]}")

    order = list(base_tree.labels) + [c for part in added for h in base_tree.labels for c in part.get(h, [])]
    closed_tree = MeetTree.from_parents(closed_parents, order)
    closed_map = {x: left(x) for x in order if x in left.domain and x in left.tree}
    closed_map.update({x: right(x) for x in order if x in right.domain and x in right.tree})
    closed_base = PartialAutomorphism(closed_tree, closed_map)

    sides = []
    for side in (left, right):
        parents = side.tree.parents_map()
        parents.update(closed_parents)
        tree = MeetTree.from_parents(parents, list(side.tree.labels) + [x for x in order if x not in side.tree])
        mapping = side.mapping
        mapping.update(closed_map)
        sides.append(PartialAutomorphism(tree, mapping))
    return closed_base, sides[0], sides[1], tuple(provenance)


def down_close_triple(problem: AmalgProblem) -> AmalgProblem:
    """Grow the base until it is downward closed in both sides."""
    left, right, _, _ = _normalize(problem)
    base_tree = problem.base.tree
    base = set(base_tree.labels)
    if downward_closure(left.tree, base) == base and downward_closure(right.tree, base) == base:
        return problem
    closed_base, new_left, new_right, provenance = _down_close(base_tree, left, right)
    identity = tuple((x, x) for x in sorted(closed_base.tree.labels))
    return AmalgProblem(closed_base, new_left, new_right, identity, identity, problem.provenance + provenance)


def amalgamate_total(problem: AmalgProblem) -> AmalgSolution:
    """Amalgamate two total automorphisms over a common base by gluing along the closed base."""
    for side in ("base", "left", "right"):
        p: PartialAutomorphism = getattr(problem, side)
        if p.domain != frozenset(p.tree.labels):
            raise PreconditionError(f"{side} automorphism is not total")
    left, right, left_names, right_names = _normalize(problem)
    if not len(problem.base.tree):
        solution = joint_embed(problem.left, problem.right)
        return solution
    closed_base, left, right, provenance = _down_close(problem.base.tree, left, right)

    bottom = completion(closed_base.tree).bottom
    while bottom in left.tree or bottom in right.tree:
        bottom = bottom + "'"
    parents: Dict[Label, Optional[Label]] = {bottom: None}
    for side in (left, right):
        for label, parent in side.tree.parents_map().items():
            parents[label] = bottom if parent is None else parent
    order = [bottom] + list(left.tree.labels) + [x for x in right.tree.labels if x not in left.tree]
    mapping = left.mapping
    mapping.update(right.mapping)
    if sum(1 for parent in parents.values() if parent == bottom) <= 1:
        del parents[bottom]
        order.remove(bottom)
        parents = {label: (None if parent == bottom else parent) for label, parent in parents.items()}
    else:
        mapping[bottom] = bottom
    tree = MeetTree.from_parents(parents, order)
    violation = pauto_violation(tree, mapping)
    if violation:
        raise Finding(f"amalgam map failed to validate: {violation}")
    solution = AmalgSolution(
        PartialAutomorphism(tree, mapping, validate=False), as_pairs(left_names), as_pairs(right_names), provenance
    )
    problems = check_amalgam(problem, solution)
    if problems:
        raise Finding(f"amalgam failed its own check: {problems[0]}")
    return solution


def check_amalgam(problem: AmalgProblem, solution: AmalgSolution) -> List[str]:
    """Independent check of an amalgam: valid map, two embeddings, commuting, agreeing on the base."""
    problems: List[str] = []
    h = solution.automorphism
    violation = pauto_violation(h.tree, h.mapping)
    if violation:
        problems.append(f"amalgam map invalid: {violation.kind} at {list(violation.witness)}")
    maps = {"left": dict(solution.left_map), "right": dict(solution.right_map)}
    for side, emb in maps.items():
        source: PartialAutomorphism = getattr(problem, side)
        for v in check_embedding(source.tree, h.tree, emb):
            problems.append(f"{side} map is not an embedding: {v.kind} at {list(v.witness)}")
            break
        for x, fx in source.pairs:
            if x in emb and h.get(emb[x]) != emb.get(fx):
                problems.append(f"{side} map does not commute at {x!r}")
    left_inc, right_inc = dict(problem.left_inclusion), dict(problem.right_inclusion)
    for b in problem.base.tree.labels:
        if maps["left"].get(left_inc.get(b)) != maps["right"].get(right_inc.get(b)):
            problems.append(f"embeddings disagree on base element {b!r}")
    return problems


# -- bounded exhaustive search ---------------------------------------------------------------


def brute_force_amalgam_k1(
    problem: AmalgProblem,
    max_size: int,
    arity_bound: Optional[int] = None,
    config: Optional[SearchConfig] = None,
    timings: bool = False,
    progress: Optional[ProgressCallback] = None,
) -> AmalgSearchResult:
    """Search amalgams of two partial automorphisms with at most `max_size` elements.

    The amalgam starts as the left tree; right elements outside the base are
    placed one at a time, shallowest first, at every position a one-point type
    over the current tree allows (identification with an unused point
    included). Branches are cut on size, on arity, and as soon as the partial
    embedding or the partial map fails. The smallest solution by
    (size, canonical form, map pairs) is returned.
    """
    started = time.perf_counter() if timings else None
    counter = NodeCounter.for_config(config, "brute_force_amalgam_k1")
    counter.progress = progress
    left, right, left_names, right_names = _normalize(problem)
    base = set(problem.base.tree.labels)
    pending = sorted((x for x in right.tree.labels if x not in base), key=lambda x: (right.tree.depth(x), x))
    digest = hashlib.sha256()
    solutions: List[Tuple[tuple, AmalgSolution]] = []
    best_size = [max_size]

    def consistent(tree: MeetTree, emb: Dict[Label, Label], placed: Label) -> bool:
        image = emb[placed]
        for other, other_image in emb.items():
            if other == placed:
                continue
            if right.tree.leq(placed, other) != tree.leq(image, other_image):
                return False
            if right.tree.leq(other, placed) != tree.leq(other_image, image):
                return False
            if emb.get(right.tree.meet(placed, other)) != tree.meet(image, other_image):
                return False
        return True

    def induced_map(emb: Dict[Label, Label]) -> Optional[Dict[Label, Label]]:
        mapping = left.mapping
        for x, fx in right.pairs:
            if x in emb and fx in emb:
                if mapping.get(emb[x], emb[fx]) != emb[fx]:
                    return None
                mapping[emb[x]] = emb[fx]
        return mapping

    def visit(tree: MeetTree, emb: Dict[Label, Label], index: int) -> None:
        counter.charge()
        digest.update(canonical_form(tree, {v: f"r:{k}" for k, v in emb.items()}).encode("utf-8"))
        if index == len(pending):
            mapping = induced_map(emb)
            h = PartialAutomorphism(tree, mapping, validate=False)
            solution = AmalgSolution(h, as_pairs(left_names), as_pairs({r: emb[right_names[r]] for r in right_names}))
            key = (len(tree), canonical_form(tree), h.pairs)
            solutions.append((key, solution))
            best_size[0] = min(best_size[0], len(tree))
            return
        r = pending[index]
        used = set(emb.values())
        for descriptor in enumerate_one_types(tree):
            if descriptor.realized_at is not None and not descriptor.strict_above:
                if descriptor.realized_at in used:
                    continue
            ext = realize_type(tree, descriptor, taken=right.tree.labels)
            if len(ext.tree) > best_size[0]:
                continue
            if arity_bound is not None and arity(ext.tree) > arity_bound:
                continue
            grown = dict(emb)
            grown[r] = ext.new_point
            if not consistent(ext.tree, grown, r):
                continue
            mapping = induced_map(grown)
            if mapping is None or pauto_violation(ext.tree, mapping) is not None:
                continue
            visit(ext.tree, grown, index + 1)

    if len(left.tree) > max_size or (arity_bound is not None and arity(left.tree) > arity_bound):
        logger.info("left side alone exceeds the search bounds")
    else:
        visit(left.tree, {b: b for b in base}, 0)

    elapsed = None if started is None else time.perf_counter() - started
    report = ExhaustionReport(
        max_size=max_size,
        arity_bound=arity_bound,
        nodes=counter.used,
        solutions=len(solutions),
        frontier_digest=digest.hexdigest(),
        elapsed=elapsed,
    )
    if not solutions:
        logger.info("no amalgam up to size %d (arity bound %s): %d nodes", max_size, arity_bound, counter.used)
        return AmalgSearchResult(None, report)
    _, best = min(solutions, key=lambda item: item[0])
    return AmalgSearchResult(best, report)


def nonap_instance(k: int) -> AmalgProblem:
    """Base {b} fixed; left cycles a k-star above b; right is b < c with the identity."""
    if k < 2:
        raise PreconditionError("the arity-bounded failure instance needs k >= 2")
    base = PartialAutomorphism(MeetTree.from_parents({"b": None}), {"b": "b"})
    star = [f"c{i}" for i in range(1, k + 1)]
    left_tree = MeetTree.from_parents({"b": None, **{c: "b" for c in star}})
    left_map = {"b": "b", **{c: star[(i + 1) % k] for i, c in enumerate(star)}}
    right_tree = MeetTree.from_parents({"b": None, "c": "b"})
    left = PartialAutomorphism(left_tree, left_map)
    right = PartialAutomorphism(right_tree, {"b": "b", "c": "c"})
    return AmalgProblem(base, left, right, (("b", "b"),), (("b", "b"),), (f"bounded-arity failure instance k={k}",))


def nonap_witness(
    k: int, max_size: int = 8, arity_bounded: bool = True, config: Optional[SearchConfig] = None, timings: bool = False
) -> Tuple[AmalgProblem, AmalgSearchResult]:
    problem = nonap_instance(k)
    result = brute_force_amalgam_k1(problem, max_size, k if arity_bounded else None, config, timings)
    return problem, result


def problem_from_sides(
    base: PartialAutomorphism,
    left: PartialAutomorphism,
    right: PartialAutomorphism,
    left_inclusion: Optional[Sequence[Tuple[Label, Label]]] = None,
    right_inclusion: Optional[Sequence[Tuple[Label, Label]]] = None,
) -> AmalgProblem:
    """Problem with identity inclusions unless given."""
    identity = tuple((x, x) for x in sorted(base.tree.labels))
    return AmalgProblem(
        base,
        left,
        right,
        tuple(left_inclusion) if left_inclusion is not None else identity,
        tuple(right_inclusion) if right_inclusion is not None else identity,
    )


__all__ = [
    "relabel",
    "joint_embed",
    "down_close_triple",
    "amalgamate_total",
    "check_amalgam",
    "brute_force_amalgam_k1",
    "nonap_instance",
    "nonap_witness",
    "problem_from_sides",
]
