"""
=============================================================================
MODULE NAME: pec.py
=============================================================================

INPUT FILES:
- None.

OUTPUT FILES:
- None written directly. Results and certificates are serialized by io.py.

VERSION HISTORY:
- v1.0: Bounded PEC check over the forward-step frontier, closure rounds,
  consequence checks, determinism certificates with replay.

NOTES:
- Every verdict is relative to a search depth W: the extensions considered
  are those reachable from p by at most W forward steps.
- A query is only raised for triples that involve a point the extension
  added; triples living inside p are their own witnesses.
- Closure rounds first settle orbit classes (an orbit that can stop being a
  quasi-cycle within W steps is extended until it does), then adopt the
  extension behind the first failing query.
=============================================================================
"""

from __future__ import annotations

import itertools
import logging
from collections import deque
from typing import Dict, List, Optional, Sequence, Set, Tuple

from .config import NodeCounter, ProgressCallback, SearchConfig
from .errors import BudgetExceeded, PreconditionError
from .orbit_lab import frontier
from .pautomorph import (
    PartialAutomorphism,
    classify_orbit,
    endpoint_extensions,
    noncyclic_orbits,
    orbit_decomposition,
    pauto_violation,
    shortest_noncyclic_orbit,
)
from .qftypes import enumerate_one_types, realize_type
from .tree import MeetTree, canonical_form, generated_substructure
from .tree_types import (
    ConsequenceReport,
    DeterminedStepResult,
    DeterminismCertificate,
    DeterminismStep,
    Label,
    Orbit,
    PecResult,
    PecWitnessQuery,
    TripleType,
)

logger = logging.getLogger(__name__)


def triple_type(tree: MeetTree, a: Label, b: Label, c: Label) -> TripleType:
    """Marked canonical form of the substructure generated by (a, b, c)."""
    marks: Dict[Label, str] = {}
    for index, label in enumerate((a, b, c)):
        marks[label] = marks.get(label, "") + str(index)
    return TripleType(canonical_form(generated_substructure(tree, [a, b, c]), marks))


def _initial_runs(p: PartialAutomorphism) -> Dict[Label, Tuple[bool, int]]:
    """Initial point -> (cyclic, number of defined forward positions in p)."""
    runs: Dict[Label, Tuple[bool, int]] = {}
    for orbit in orbit_decomposition(p):
        if orbit.cyclic:
            for label in orbit.points:
                runs[label] = (True, len(orbit.points))
        else:
            runs[orbit.points[0]] = (False, len(orbit.points) - 1)
    return runs


def _forward_positions(q: PartialAutomorphism, start: Label, cyclic: bool, period: int) -> List[Tuple[int, Label]]:
    if cyclic:
        return [(m, q.apply_power(start, m)) for m in range(1, period + 1)]
    positions = []
    current = start
    m = 0
    while current in q.domain:
        current = q(current)
        m += 1
        positions.append((m, current))
    return positions


def _spiral_modulus(q: PartialAutomorphism, start: Label, cyclic: bool = False) -> Optional[int]:
    """Least k with start^q^k != q^k ^ q^2k, when q^2k(start) is defined.

    Cyclic starts have none: every power is defined and the meets repeat.
    """
    if cyclic:
        return None
    tree = q.tree
    for k in range(1, len(tree) + 1):
        far = q.apply_power(start, 2 * k)
        if far is None:
            return None
        near = q.apply_power(start, k)
        if tree.meet(start, near) != tree.meet(near, far):
            return k
    return None


def _witness_table(
    p: PartialAutomorphism, runs: Dict[Label, Tuple[bool, int]]
) -> Dict[Tuple[Label, Label, Label], Dict[TripleType, Set[int]]]:
    positions = {x: _forward_positions(p, x, cyclic, count) for x, (cyclic, count) in runs.items()}
    table: Dict[Tuple[Label, Label, Label], Dict[TripleType, Set[int]]] = {}
    for eta0, mu0, zeta0 in itertools.product(sorted(runs), repeat=3):
        entry: Dict[TripleType, Set[int]] = {}
        for (m1, mu), (_, zeta) in itertools.product(positions[mu0], positions[zeta0]):
            entry.setdefault(triple_type(p.tree, eta0, mu, zeta), set()).add(m1)
        table[(eta0, mu0, zeta0)] = entry
    return table


def check_pec(
    p: PartialAutomorphism,
    depth: Optional[int] = None,
    config: Optional[SearchConfig] = None,
) -> PecResult:
    """Check the PEC witness conditions against every extension within `depth` forward steps."""
    config = config or SearchConfig()
    depth = config.pec_depth if depth is None else depth
    if depth < 1:
        raise PreconditionError("check_pec needs depth >= 1")
    base = p.on_support()
    runs = _initial_runs(base)
    table = _witness_table(base, runs)
    extensions = frontier(base, depth, config)
    queries = 0
    for q, trace in extensions:
        positions = {x: _forward_positions(q, x, cyclic, count) for x, (cyclic, count) in runs.items()}
        moduli = {x: _spiral_modulus(q, x, cyclic) for x, (cyclic, _) in runs.items()}
        for eta0, mu0, zeta0 in itertools.product(sorted(runs), repeat=3):
            mu_known = runs[mu0][1]
            zeta_known = runs[zeta0][1]
            witnesses = table[(eta0, mu0, zeta0)]
            for (m1, mu), (m2, zeta) in itertools.product(positions[mu0], positions[zeta0]):
                mu_new = not runs[mu0][0] and m1 > mu_known
                zeta_new = not runs[zeta0][0] and m2 > zeta_known
                if not (mu_new or zeta_new):
                    continue
                queries += 1
                kind = triple_type(q.tree, eta0, mu, zeta)
                k = moduli[mu0]
                found = {m for m in witnesses.get(kind, ()) if k is None or m % k == m1 % k}
                if len(found) < (2 if mu_new else 1):
                    query = PecWitnessQuery(eta0, mu0, zeta0, m1, m2, kind, None if k is None else m1 % k, k)
                    logger.debug("PEC query fails at depth %d: %s", depth, query)
                    return PecResult(False, depth, len(extensions), queries, query, trace, q)
    return PecResult(True, depth, len(extensions), queries)


_FAMILY_RANK = {"spiral": 0, "comb": 1, "cycle": 2}


def _settle_orbit_classes(p: PartialAutomorphism, depth: int, counter: NodeCounter) -> PartialAutomorphism:
    """Extend each quasi-cycle orbit that can stop being one within `depth` steps."""
    for orbit in noncyclic_orbits(p):
        current = orbit_decomposition(p)
        live = next(o for o in current if o.points[0] == orbit.points[0])
        if live.cyclic or classify_orbit(p.tree, live).kind != "quasi-cycle":
            continue
        best: Optional[Tuple[tuple, PartialAutomorphism]] = None
        queue = deque([(p, live.points, ())])
        while queue:
            state, points, choices = queue.popleft()
            if len(choices) >= depth:
                continue
            for index, (q, _) in enumerate(endpoint_extensions(state.on_support(), points[-1])):
                counter.charge()
                image = q(points[-1])
                closed = image == points[0]
                grown = Orbit(points, cyclic=True) if closed else Orbit(points + (image,))
                kind = classify_orbit(q.tree, grown).kind
                path = choices + (index,)
                if kind != "quasi-cycle":
                    family = kind.rsplit("-", 1)[-1]
                    rank = (_FAMILY_RANK[family], len(path), path)
                    if best is None or rank < best[0]:
                        best = (rank, q)
                elif not closed:
                    queue.append((q, grown.points, path))
        if best is not None:
            logger.info("orbit from %s settles after %d step(s)", orbit.points[0], len(best[0][2]))
            p = best[1]
    return p


def pec_close(
    p: PartialAutomorphism,
    depth: Optional[int] = None,
    config: Optional[SearchConfig] = None,
    progress: Optional[ProgressCallback] = None,
) -> PartialAutomorphism:
    """Extend p until check_pec passes at `depth`; rounds are capped by the config."""
    config = config or SearchConfig()
    depth = config.pec_depth if depth is None else depth
    counter = NodeCounter.for_config(config, "pec_close")
    current = p.on_support()
    result: Optional[PecResult] = None
    for round_no in range(1, config.pec_iteration_cap + 1):
        current = _settle_orbit_classes(current, depth, counter)
        result = check_pec(current, depth, config)
        if progress:
            progress(f"pec_close round {round_no}", min(99, round_no * 100 // config.pec_iteration_cap))
        if result.passed:
            logger.info("PEC at depth %d after %d round(s), %d points", depth, round_no, len(current.tree))
            return current
        logger.info("round %d: adopting extension for %s", round_no, result.counterexample)
        current = result.extension.on_support()
    raise BudgetExceeded(
        f"pec_close rounds (last failing query {result.counterexample if result else None})",
        config.pec_iteration_cap,
    )


# -- consequences and determinism --------------------------------------------------------


def _forward_orbit(f: PartialAutomorphism, start: Label) -> Orbit:
    points = [start]
    while points[-1] in f.domain:
        nxt = f(points[-1])
        if nxt == start:
            return Orbit(tuple(points), cyclic=True)
        points.append(nxt)
    return Orbit(tuple(points))


def consequences_check(p: PartialAutomorphism, f: PartialAutomorphism) -> ConsequenceReport:
    """Orbit-level consequences that a PEC map must show in any extension f."""
    if not f.extends(p):
        raise PreconditionError("f does not extend p")
    violations: List[str] = []
    owners: Dict[frozenset, Label] = {}
    for orbit in orbit_decomposition(p):
        start = orbit.points[0]
        wide = _forward_orbit(f, start)
        wide_class = classify_orbit(f.tree, wide)
        narrow_class = classify_orbit(p.tree, orbit)
        if wide_class.kind not in ("quasi-cycle", "cycle"):
            seq = orbit.sequence()
            exhibited = any(
                p.tree.meet(seq[0], seq[k]) != p.tree.meet(seq[k], seq[2 * k]) for k in range(1, (len(seq) - 1) // 2 + 1)
            )
            if not exhibited:
                violations.append(f"clause 1: orbit from {start} becomes {wide_class.kind} without a witness in p")
        if wide_class != narrow_class:
            violations.append(
                f"clause 2: orbit from {start} is {narrow_class.kind}/{narrow_class.parameter} in p "
                f"but {wide_class.kind}/{wide_class.parameter} in f"
            )
        key = frozenset(_full_orbit_points(f, start))
        if key in owners:
            violations.append(f"clause 3: orbits from {owners[key]} and {start} merge in f")
        owners[key] = start
    return ConsequenceReport(tuple(violations))


def _full_orbit_points(f: PartialAutomorphism, start: Label) -> Set[Label]:
    points = {start}
    for step in (f.mapping, {v: k for k, v in f.mapping.items()}):
        current = start
        while current in step and step[current] not in points:
            current = step[current]
            points.add(current)
    return points


def check_determined_step(p: PartialAutomorphism) -> DeterminedStepResult:
    """Count the valid types for the next image of the canonical shortest non-cyclic orbit."""
    return _unique_step(p)[0]


def _unique_step(p: PartialAutomorphism) -> Tuple[DeterminedStepResult, Optional[PartialAutomorphism]]:
    p = p.on_support()
    orbit = shortest_noncyclic_orbit(p)
    extensions = endpoint_extensions(p, orbit.points[-1])
    descriptors = tuple(t for _, t in extensions)
    fragment = DeterminismStep(orbit.points[-1], descriptors[0]) if len(descriptors) == 1 else None
    result = DeterminedStepResult(len(descriptors), orbit.points[-1], descriptors, fragment)
    return result, (extensions[0][0] if len(extensions) == 1 else None)


def determinism_certificate(p: PartialAutomorphism, steps: int) -> DeterminismCertificate:
    """Follow unique immediate extensions for `steps` steps, stopping at the first ambiguity."""
    current = p
    per_step: List[DeterminismStep] = []
    counts: List[int] = []
    for step in range(steps):
        if not noncyclic_orbits(current):
            break
        result, following = _unique_step(current)
        counts.append(result.count)
        if following is None:
            logger.info("determinism fails at step %d with %d types", step, result.count)
            return DeterminismCertificate(p, step, tuple(per_step), tuple(counts), failure_step=step)
        per_step.append(result.fragment)
        current = following
    return DeterminismCertificate(p, len(per_step), tuple(per_step), tuple(counts))


def replay_certificate(certificate: DeterminismCertificate) -> bool:
    """Re-derive every recorded step from the certificate's own automorphism."""
    current = certificate.automorphism
    for index, recorded in enumerate(certificate.per_step):
        if not noncyclic_orbits(current):
            return False
        result, following = _unique_step(current)
        if following is None or result.fragment != recorded:
            return False
        if certificate.counts and certificate.counts[index] != 1:
            return False
        current = following
    if certificate.failure_step is not None:
        if not noncyclic_orbits(current):
            return False
        result, _ = _unique_step(current)
        return result.count != 1 and certificate.counts[certificate.failure_step] == result.count
    return True


def cross_check_unique_extension(p: PartialAutomorphism) -> bool:
    """Every valid image of the next endpoint, in every one-point superstructure, has one marked form."""
    base = p.support()
    endpoint = shortest_noncyclic_orbit(p).points[-1]
    trees = [base] + [realize_type(base, t).tree for t in enumerate_one_types(base)]
    forms = set()
    for tree in trees:
        for v in tree.labels:
            if v in p.range:
                continue
            mapping = p.mapping
            mapping[endpoint] = v
            if pauto_violation(tree, mapping) is not None:
                continue
            marks = {a: f"a:{a}" for a in base.labels}
            marks[v] = marks.get(v, "") + "*"
            forms.add(canonical_form(generated_substructure(tree, list(base.labels) + [v]), marks))
    return len(forms) <= 1


def quasicycle_retention(outputs: Sequence[PartialAutomorphism]) -> Dict[str, int]:
    """How many closure outputs still carry a quasi-cycle orbit."""
    retained = sum(
        1 for q in outputs if any(classify_orbit(q.tree, o).kind == "quasi-cycle" for o in noncyclic_orbits(q))
    )
    return {"outputs": len(outputs), "with_quasi_cycles": retained}


def immediate_extension_stays_pec(p: PartialAutomorphism, depth: int, config: Optional[SearchConfig] = None) -> bool:
    """Immediate extensions of a map passing at `depth` pass at depth - 1."""
    if depth < 2:
        raise PreconditionError("needs depth >= 2")
    if not noncyclic_orbits(p):
        return True
    result, following = _unique_step(p)
    candidates = [following] if following is not None else []
    return all(check_pec(q, depth - 1, config).passed for q in candidates)


__all__ = [
    "triple_type",
    "check_pec",
    "pec_close",
    "consequences_check",
    "check_determined_step",
    "determinism_certificate",
    "replay_certificate",
    "cross_check_unique_extension",
    "quasicycle_retention",
    "immediate_extension_stays_pec",
]
