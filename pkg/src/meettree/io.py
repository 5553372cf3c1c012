"""JSON codecs for trees, automorphisms, types and reports.

Every loader raises InputError with a location (file, JSON path, line and
column) on malformed input. Writers produce plain dicts; `report_json`
serializes a RunReport with sorted keys so identical runs give identical bytes.
"""

from __future__ import annotations

import dataclasses
import hashlib
import json
from fractions import Fraction
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple

from .errors import InputError
from .nopair import LinearOrder
from .pautomorph import PartialAutomorphism, classify_orbit
from .tree import MeetTree, validate_tree
from .tree_types import (
    AmalgSearchResult,
    AmalgSolution,
    AutPair,
    DeterminismCertificate,
    DeterminismStep,
    DistinguishingWord,
    ExhaustionReport,
    IrreconcilablePairs,
    OneTypeDescriptor,
    Orbit,
    PecResult,
    RunReport,
)


def read_json(path: str) -> Tuple[Any, str]:
    """Parsed JSON and the sha256 of the raw bytes."""
    try:
        raw = Path(path).read_bytes()
    except OSError as exc:
        raise InputError(f"cannot read input: {exc.strerror}", path) from exc
    digest = hashlib.sha256(raw).hexdigest()
    try:
        return json.loads(raw.decode("utf-8")), digest
    except UnicodeDecodeError as exc:
        raise InputError("input is not UTF-8", f"{path}:byte {exc.start}") from exc
    except json.JSONDecodeError as exc:
        raise InputError(f"malformed JSON: {exc.msg}", f"{path}:{exc.lineno}:{exc.colno}") from exc


def _expect(obj: Any, kind: type, where: str) -> Any:
    if not isinstance(obj, kind):
        raise InputError(f"expected {kind.__name__}, got {type(obj).__name__}", where)
    return obj


def _pair_list(obj: Any, where: str) -> List[Tuple[str, str]]:
    pairs = []
    for i, item in enumerate(_expect(obj, list, where)):
        if not (isinstance(item, list) and len(item) == 2 and all(isinstance(x, str) for x in item)):
            raise InputError("expected a [label, label] pair", f"{where}[{i}]")
        pairs.append((item[0], item[1]))
    return pairs


# -- trees and automorphisms --------------------------------------------------------------------


def tree_from_json(obj: Any, where: str = "$") -> MeetTree:
    obj = _expect(obj, dict, where)
    elements = _expect(obj.get("elements"), list, f"{where}.elements")
    if not all(isinstance(x, str) for x in elements):
        raise InputError("element labels must be strings", f"{where}.elements")
    leq = _pair_list(obj.get("leq", []), f"{where}.leq")
    meet: Dict[Tuple[str, str], str] = {}
    for key, value in _expect(obj.get("meet", {}), dict, f"{where}.meet").items():
        parts = key.split(",")
        if len(parts) != 2 or not isinstance(value, str):
            raise InputError(f"meet entries look like \"a,b\": \"c\", got {key!r}", f"{where}.meet")
        meet[(parts[0], parts[1])] = value
    return validate_tree(elements, leq, meet)


def tree_to_json(tree: MeetTree) -> Dict[str, Any]:
    meets = {}
    labels = tree.labels
    for i, a in enumerate(labels):
        for b in labels[i + 1 :]:
            if not tree.comparable(a, b):
                meets[f"{a},{b}"] = tree.meet(a, b)
    return {
        "elements": list(labels),
        "leq": [list(pair) for pair in tree.cover_pairs()],
        "meet": meets,
    }


def automorphism_from_json(obj: Any, where: str = "$") -> PartialAutomorphism:
    obj = _expect(obj, dict, where)
    tree = tree_from_json(obj.get("tree"), f"{where}.tree")
    pairs = _pair_list(obj.get("map", []), f"{where}.map")
    sources = [x for x, _ in pairs]
    if len(set(sources)) != len(sources):
        raise InputError("map lists an element twice", f"{where}.map")
    for x, y in pairs:
        for label in (x, y):
            if label not in tree:
                raise InputError(f"unknown label {label!r}", f"{where}.map")
    return PartialAutomorphism(tree, dict(pairs))


def automorphism_to_json(p: PartialAutomorphism) -> Dict[str, Any]:
    return {"tree": tree_to_json(p.tree), "map": [list(pair) for pair in p.pairs]}


def orbit_report(tree: MeetTree, orbit: Orbit) -> Dict[str, Any]:
    cls = classify_orbit(tree, orbit)
    return {"points": list(orbit.points), "cyclic": orbit.cyclic, "class": cls.kind, "parameter": cls.parameter}


def descriptor_to_json(t: OneTypeDescriptor) -> Dict[str, Any]:
    return {"anchor": t.anchor, "strict_above": t.strict_above, "cut": list(t.base_cut), "realized_at": t.realized_at}


def descriptor_from_json(obj: Any, where: str = "$") -> OneTypeDescriptor:
    obj = _expect(obj, dict, where)
    try:
        return OneTypeDescriptor(
            anchor=_expect(obj["anchor"], str, f"{where}.anchor"),
            strict_above=_expect(obj["strict_above"], bool, f"{where}.strict_above"),
            base_cut=tuple(_expect(obj["cut"], list, f"{where}.cut")),
            realized_at=obj.get("realized_at"),
        )
    except KeyError as exc:
        raise InputError(f"missing field {exc.args[0]!r}", where) from exc


# -- results ----------------------------------------------------------------------------------


def certificate_to_json(cert: DeterminismCertificate) -> Dict[str, Any]:
    return {
        "automorphism": automorphism_to_json(cert.automorphism),
        "depth": cert.depth,
        "succeeded": cert.succeeded,
        "failure_step": cert.failure_step,
        "counts": list(cert.counts),
        "per_step": [{"endpoint": s.endpoint, "type": descriptor_to_json(s.descriptor)} for s in cert.per_step],
    }


def certificate_from_json(obj: Any, where: str = "$") -> DeterminismCertificate:
    obj = _expect(obj, dict, where)
    steps = []
    for i, item in enumerate(_expect(obj.get("per_step", []), list, f"{where}.per_step")):
        item = _expect(item, dict, f"{where}.per_step[{i}]")
        steps.append(DeterminismStep(item["endpoint"], descriptor_from_json(item["type"], f"{where}.per_step[{i}].type")))
    return DeterminismCertificate(
        automorphism_from_json(obj.get("automorphism"), f"{where}.automorphism"),
        int(obj.get("depth", len(steps))),
        tuple(steps),
        tuple(obj.get("counts", ())),
        obj.get("failure_step"),
    )


def exhaustion_to_json(report: ExhaustionReport) -> Dict[str, Any]:
    return {
        "max_size": report.max_size,
        "arity_bound": report.arity_bound,
        "nodes": report.nodes,
        "solutions": report.solutions,
        "frontier_digest": report.frontier_digest,
        "elapsed": report.elapsed,
    }


def solution_to_json(solution: AmalgSolution) -> Dict[str, Any]:
    return {
        "automorphism": automorphism_to_json(solution.automorphism),
        "left_map": [list(pair) for pair in solution.left_map],
        "right_map": [list(pair) for pair in solution.right_map],
        "provenance": list(solution.provenance),
    }


def search_result_to_json(result: AmalgSearchResult) -> Dict[str, Any]:
    return {
        "verdict": "amalgam found" if result.found else "no amalgam",
        "solution": solution_to_json(result.solution) if result.solution else None,
        "report": exhaustion_to_json(result.report),
    }


def pec_result_to_json(result: PecResult) -> Dict[str, Any]:
    out: Dict[str, Any] = {
        "passed": result.passed,
        "depth": result.depth,
        "frontier_size": result.frontier_size,
        "queries": result.queries,
        "counterexample": None,
    }
    if result.counterexample is not None:
        query = dataclasses.asdict(result.counterexample)
        query["triple_type"] = result.counterexample.triple_type.label
        out["counterexample"] = query
        out["trace"] = [
            {"endpoint": s.endpoint, "image": s.image, "type": descriptor_to_json(s.descriptor)} for s in result.trace
        ]
    return out


def _point(x: Any) -> str:
    return str(x)


def aut_pair_to_json(pair: AutPair) -> Dict[str, Any]:
    if isinstance(pair.order, LinearOrder):
        order: Dict[str, Any] = {"rationals": [_point(x) for x in pair.order.sorted()]}
    else:
        order = {"tree": tree_to_json(pair.order)}
    return {
        **order,
        "anchor": _point(pair.anchor),
        "g1": [[_point(x), _point(y)] for x, y in pair.g1],
        "g2": [[_point(x), _point(y)] for x, y in pair.g2],
    }


def word_to_json(word: DistinguishingWord) -> Dict[str, Any]:
    return {
        "word": list(word.word),
        "atom": {"left": list(word.atom.left), "relation": word.atom.relation, "right": list(word.atom.right)},
        "length": len(word),
    }


def irreconcilable_to_json(result: IrreconcilablePairs, table: Optional[Dict[str, Any]] = None) -> Dict[str, Any]:
    out = {
        "first": aut_pair_to_json(result.first),
        "second": aut_pair_to_json(result.second),
        "certificate": word_to_json(result.certificate),
        "extended_map": f"g{result.extended_map}",
    }
    if table is not None:
        out["evaluation"] = table
    return out


def parse_rational(text: str, where: str = "$") -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise InputError(f"not a rational: {text!r}", where) from exc


# -- reports ----------------------------------------------------------------------------------


def report_json(report: RunReport) -> str:
    return json.dumps(dataclasses.asdict(report), sort_keys=True, ensure_ascii=False)


__all__ = [
    "read_json",
    "tree_from_json",
    "tree_to_json",
    "automorphism_from_json",
    "automorphism_to_json",
    "orbit_report",
    "descriptor_to_json",
    "descriptor_from_json",
    "certificate_to_json",
    "certificate_from_json",
    "exhaustion_to_json",
    "solution_to_json",
    "search_result_to_json",
    "pec_result_to_json",
    "aut_pair_to_json",
    "word_to_json",
    "irreconcilable_to_json",
    "parse_rational",
    "report_json",
]
