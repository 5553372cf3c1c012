"""Orbit surgery: closing quasi-cycles into cycles and bounded extension search.

Every extension reported here is produced by realizing a one-point type over
the current support and accepted only after the extended map validates.
"""

from __future__ import annotations

import logging
from collections import deque
from typing import Dict, List, Optional, Sequence, Tuple

from .config import NodeCounter, SearchConfig
from .errors import BudgetExceeded, Finding, PreconditionError
from .pautomorph import (
    PartialAutomorphism,
    classify_orbit,
    endpoint_extensions,
    forward_steps,
    orbit_automorphism,
    orbit_decomposition,
    pauto_violation,
)
from .tree import MeetTree, canonical_form
from .tree_types import ExtensionStep, Label, Orbit, OrbitClass, OrbitExtension, OrbitExtensionPlan

logger = logging.getLogger(__name__)

GUARD = "validate_pauto"


def _orbit_marks(points: Sequence[Label]) -> Dict[Label, str]:
    return {label: str(i) for i, label in enumerate(points)}


def complete_quasicycle_to_cycle(
    tree: MeetTree, orbit: Orbit, config: Optional[SearchConfig] = None
) -> Tuple[MeetTree, Orbit]:
    """Extend a quasi-cycle of pseudo-period u and close it into an N-cycle.

    N is 2u for short orbits and otherwise the least multiple of u beyond the
    last index. Every intermediate orbit is kept a quasi-cycle of pseudo-period u.
    """
    current = classify_orbit(tree, orbit)
    if current.kind != "quasi-cycle" or orbit.cyclic:
        raise PreconditionError(f"expected a quasi-cycle, got {current.kind}")
    u = current.parameter
    n = len(orbit.points) - 1
    target = (n // u + 1) * u
    counter = NodeCounter.for_config(config, "complete_quasicycle_to_cycle")
    logger.info("closing quasi-cycle of length %d, pseudo-period %d, into a %d-cycle", n + 1, u, target)

    def close(p: PartialAutomorphism, points: Tuple[Label, ...]) -> Optional[Tuple[MeetTree, Orbit]]:
        counter.charge()
        mapping = p.mapping
        mapping[points[-1]] = points[0]
        if pauto_violation(p.tree, mapping) is None:
            return p.tree, Orbit(points, cyclic=True)
        return None

    def search(p: PartialAutomorphism, points: Tuple[Label, ...]) -> Optional[Tuple[MeetTree, Orbit]]:
        if len(points) == target:
            return close(p, points)
        for q, _ in endpoint_extensions(p.on_support(), points[-1]):
            counter.charge()
            grown = points + (q(points[-1]),)
            if grown[-1] == points[0]:
                continue
            if classify_orbit(q.tree, Orbit(grown)) != OrbitClass("quasi-cycle", u):
                continue
            found = search(q, grown)
            if found is not None:
                return found
        return None

    start = orbit_automorphism(tree, orbit).on_support()
    result = search(start, orbit.points)
    if result is None:
        raise Finding(f"no {target}-cycle completion of quasi-cycle {orbit.points}")
    return result


def enumerate_orbit_extensions(
    tree: MeetTree, orbit: Orbit, budget: Optional[int] = None, config: Optional[SearchConfig] = None
) -> List[OrbitExtension]:
    """Validated extensions of a single orbit by up to `budget` added points."""
    config = config or SearchConfig()
    budget = config.extension_budget if budget is None else budget
    if budget > config.max_extension_budget:
        raise BudgetExceeded("orbit extension budget", config.max_extension_budget, budget)
    if orbit.cyclic:
        return []
    counter = NodeCounter.for_config(config, "enumerate_orbit_extensions")

    results: List[OrbitExtension] = []
    seen = set()
    level: List[Tuple[PartialAutomorphism, Tuple[Label, ...]]] = [
        (orbit_automorphism(tree, orbit).on_support(), orbit.points)
    ]
    for added in range(1, budget + 1):
        emitted: List[Tuple[str, OrbitExtension]] = []
        following: List[Tuple[PartialAutomorphism, Tuple[Label, ...]]] = []
        for p, points in level:
            for q, _ in endpoint_extensions(p.on_support(), points[-1]):
                counter.charge()
                image = q(points[-1])
                closed = image == points[0]
                new_orbit = Orbit(points, cyclic=True) if closed else Orbit(points + (image,))
                key = canonical_form(q.tree, _orbit_marks(new_orbit.points)) + ("@" if closed else "")
                if key in seen:
                    continue
                seen.add(key)
                orbit_class = classify_orbit(q.tree, new_orbit)
                plan = OrbitExtensionPlan(orbit_class, added, GUARD)
                emitted.append((key, OrbitExtension(q.tree, new_orbit, orbit_class, plan)))
                if not closed:
                    following.append((q, new_orbit.points))
        emitted.sort(key=lambda item: item[0])
        results.extend(item for _, item in emitted)
        level = following
        logger.debug("orbit extensions: %d new at %d added points", len(emitted), added)
    return results


def _marks_for(base: PartialAutomorphism, q: PartialAutomorphism) -> Dict[Label, str]:
    marks = {label: f"p:{label}" for label in base.support().labels if label in q.tree}
    for orbit in orbit_decomposition(q):
        for i, label in enumerate(orbit.points):
            if label not in marks:
                marks[label] = f"o:{orbit.points[0]}:{i}"
    return marks


def frontier(
    p: PartialAutomorphism, depth: int, config: Optional[SearchConfig] = None
) -> List[Tuple[PartialAutomorphism, Tuple[ExtensionStep, ...]]]:
    """Extensions of p reachable by 1..depth forward steps, each with its trace."""
    counter = NodeCounter.for_config(config, "frontier")
    seen = set()
    found: List[Tuple[PartialAutomorphism, Tuple[ExtensionStep, ...]]] = []
    queue = deque([(p.on_support(), ())])
    while queue:
        state, trace = queue.popleft()
        if len(trace) >= depth:
            continue
        for q, step in forward_steps(state.on_support()):
            counter.charge()
            key = canonical_form(q.tree, _marks_for(p, q))
            if key in seen:
                continue
            seen.add(key)
            item = (q, trace + (step,))
            found.append(item)
            queue.append(item)
    logger.debug("frontier of depth %d: %d extensions", depth, len(found))
    return found


def extension_menu_findings(tree: MeetTree, orbit: Orbit, items: Sequence[OrbitExtension]) -> List[str]:
    """Classes reached from a quasi-cycle that fall outside the expected menu."""
    base = classify_orbit(tree, orbit)
    if base.kind != "quasi-cycle":
        return []
    u = base.parameter
    n = len(orbit.points) - 1
    findings: List[str] = []
    for item in items:
        cls = item.orbit_class
        k = cls.parameter
        beyond = k % u == 0 and k > n
        if cls.kind == "quasi-cycle":
            allowed = k == u or beyond
        elif cls.kind.endswith("comb"):
            allowed = beyond or (n < 2 * u and k == u)
        else:
            allowed = beyond
        if not allowed:
            findings.append(f"{cls.kind} k={k} from quasi-cycle n={n} u={u}: {item.orbit.points}")
    return findings


__all__ = [
    "complete_quasicycle_to_cycle",
    "enumerate_orbit_extensions",
    "frontier",
    "extension_menu_findings",
]
