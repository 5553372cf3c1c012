"""Quantifier-free 1-types over finite meet-closed subsets of a meet-tree.

A type over A is pinned down by b' (the deepest meet of the point with an
element of A), whether the point sits strictly above b', and where b' falls
relative to A: either on an element of A or inside the edge just below one.
"""

from __future__ import annotations

import logging
from typing import Iterable, List, Optional, Sequence

from .errors import InputError, PreconditionError
from .tree import MeetTree, fresh_label, is_meet_closed
from .tree_types import Label, OneTypeDescriptor, PointedExtension

logger = logging.getLogger(__name__)


def qf_type_of(tree: MeetTree, point: Label, base: Iterable[Label]) -> OneTypeDescriptor:
    """Type of `point` over the meet-closed subset `base` of `tree`."""
    members: Sequence[Label] = list(dict.fromkeys(base))
    if not members:
        raise PreconditionError("types need a nonempty base")
    tree.index(point)
    if not is_meet_closed(tree, members):
        raise PreconditionError("type base is not closed under meets")

    meets = {x: tree.meet(x, point) for x in members}
    lowest = max(meets.values(), key=tree.depth)
    anchor = min(x for x, m in meets.items() if m == lowest)
    base_cut = tuple(sorted((x for x in members if tree.leq(x, lowest)), key=tree.depth))
    realized_at = lowest if lowest in set(members) else None
    return OneTypeDescriptor(
        anchor=anchor,
        strict_above=point != lowest,
        base_cut=base_cut,
        realized_at=realized_at,
    )


def enumerate_one_types(base: MeetTree) -> List[OneTypeDescriptor]:
    """Every type over `base` realizable in a dense unrooted extension.

    Each element contributes four: the element itself, points strictly above
    it, and the two placements inside the open edge just below it (on the
    edge, or branching off it).
    """
    if not len(base):
        raise PreconditionError("types need a nonempty base")
    types: List[OneTypeDescriptor] = []
    for element in base.labels:
        anchor = min(base.up(element))
        cut = tuple(base.down(element))
        types.append(OneTypeDescriptor(anchor, False, cut, element))
        types.append(OneTypeDescriptor(anchor, True, cut, element))
        types.append(OneTypeDescriptor(anchor, False, cut[:-1], None))
        types.append(OneTypeDescriptor(anchor, True, cut[:-1], None))
    return sorted(types, key=OneTypeDescriptor.sort_key)


def realize_type(
    base: MeetTree, descriptor: OneTypeDescriptor, taken: Optional[Iterable[Label]] = None
) -> PointedExtension:
    """Extend `base` by a point of the given type.

    Fresh labels avoid both the base and `taken`. An unrealized cut gets its
    supremum materialized as the new meet point `m`.
    """
    if descriptor not in set(enumerate_one_types(base)):
        raise InputError(f"inconsistent type descriptor {descriptor}")
    used = set(base.labels) | set(taken or ())

    if descriptor.realized_at is not None:
        element = descriptor.realized_at
        if not descriptor.strict_above:
            return PointedExtension(base, element, None, ())
        x = fresh_label(used, "x")
        grown = base.with_parents({x: element})
        return PointedExtension(grown, x, None, (x,))

    edge_top = base.down(descriptor.anchor)[len(descriptor.base_cut)]
    m = fresh_label(used, "m")
    updates = {m: base.parent(edge_top), edge_top: m}
    if not descriptor.strict_above:
        grown = base.with_parents(updates, list(base.labels) + [m])
        return PointedExtension(grown, m, None, (m,))
    used.add(m)
    x = fresh_label(used, "x")
    updates[x] = m
    grown = base.with_parents(updates, list(base.labels) + [m, x])
    return PointedExtension(grown, x, m, (m, x))


__all__ = ["qf_type_of", "enumerate_one_types", "realize_type"]
