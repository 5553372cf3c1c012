"""
=============================================================================
MODULE NAME: tree_types.py
=============================================================================

INPUT FILES:
- None (value types only).

OUTPUT FILES:
- None written directly; instances are serialized by `meettree.io`.

VERSION HISTORY:
- v1.0: Shared value types for trees, types, orbits, amalgamation, closure
  and the linear-order pair construction.

NOTES:
- Everything here is immutable. Maps are stored as sorted tuples of pairs so
  values hash and compare structurally.
- Structures that carry behaviour (MeetTree, PartialAutomorphism,
  LinearOrder) live in their own modules and are only referenced here.
=============================================================================
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import TYPE_CHECKING, Dict, Mapping, Optional, Tuple, Union

if TYPE_CHECKING:  # pragma: no cover
    from .nopair import LinearOrder
    from .pautomorph import PartialAutomorphism
    from .tree import MeetTree

Label = str
Pairs = Tuple[Tuple[Label, Label], ...]

ORBIT_KINDS = (
    "cycle",
    "ascending-spiral",
    "descending-spiral",
    "ascending-comb",
    "descending-comb",
    "quasi-cycle",
)


def as_pairs(mapping: Mapping) -> tuple:
    return tuple(sorted(mapping.items()))


@dataclass(frozen=True, slots=True)
class Violation:
    """One failed meet-tree axiom with the elements that witness it."""

    kind: str
    witness: Tuple[Label, ...]
    detail: str = ""


@dataclass(frozen=True, slots=True)
class Cut:
    """Downward-closed chain, listed bottom-up."""

    members: Tuple[Label, ...] = ()

    @property
    def top(self) -> Optional[Label]:
        return self.members[-1] if self.members else None


@dataclass(frozen=True, slots=True)
class Embedding:
    source: "MeetTree"
    target: "MeetTree"
    pairs: Pairs

    @property
    def mapping(self) -> Dict[Label, Label]:
        return dict(self.pairs)

    def __call__(self, label: Label) -> Label:
        return self.mapping[label]


@dataclass(frozen=True, slots=True)
class OneTypeDescriptor:
    anchor: Label
    strict_above: bool
    base_cut: Tuple[Label, ...]
    realized_at: Optional[Label] = None

    def sort_key(self) -> tuple:
        return (
            len(self.base_cut),
            self.base_cut,
            self.realized_at is None,
            self.realized_at or "",
            self.anchor,
            self.strict_above,
        )


@dataclass(frozen=True, slots=True)
class PointedExtension:
    tree: "MeetTree"
    new_point: Label
    new_meet_point: Optional[Label] = None
    added: Tuple[Label, ...] = ()


@dataclass(frozen=True, slots=True)
class Orbit:
    """Orbit points in order; a cyclic orbit lists each point once."""

    points: Tuple[Label, ...]
    cyclic: bool = False

    def sequence(self) -> Tuple[Label, ...]:
        if self.cyclic:
            return self.points + self.points[:1]
        return self.points

    def __len__(self) -> int:
        return len(self.points)


@dataclass(frozen=True, slots=True)
class OrbitClass:
    kind: str
    parameter: int

    @property
    def ascending(self) -> bool:
        return self.kind.startswith("ascending")

    @property
    def descending(self) -> bool:
        return self.kind.startswith("descending")


@dataclass(frozen=True, slots=True)
class PautoViolation:
    kind: str
    witness: Tuple[Label, ...]


@dataclass(frozen=True, slots=True)
class OrbitExtensionPlan:
    target_kind: OrbitClass
    added_points: int
    guard: str


@dataclass(frozen=True, slots=True)
class OrbitExtension:
    tree: "MeetTree"
    orbit: Orbit
    orbit_class: OrbitClass
    plan: OrbitExtensionPlan


@dataclass(frozen=True, slots=True)
class AmalgProblem:
    base: "PartialAutomorphism"
    left: "PartialAutomorphism"
    right: "PartialAutomorphism"
    left_inclusion: Pairs
    right_inclusion: Pairs
    provenance: Tuple[str, ...] = ()


@dataclass(frozen=True, slots=True)
class AmalgSolution:
    automorphism: "PartialAutomorphism"
    left_map: Pairs
    right_map: Pairs
    provenance: Tuple[str, ...] = ()

    @property
    def tree(self) -> "MeetTree":
        return self.automorphism.tree


@dataclass(frozen=True, slots=True)
class ExhaustionReport:
    max_size: int
    arity_bound: Optional[int]
    nodes: int
    solutions: int
    frontier_digest: str
    elapsed: Optional[float] = None


@dataclass(frozen=True, slots=True)
class AmalgSearchResult:
    solution: Optional[AmalgSolution]
    report: ExhaustionReport

    @property
    def found(self) -> bool:
        return self.solution is not None


@dataclass(frozen=True, slots=True)
class TripleType:
    label: str


@dataclass(frozen=True, slots=True)
class ExtensionStep:
    endpoint: Label
    descriptor: OneTypeDescriptor
    image: Label


@dataclass(frozen=True, slots=True)
class PecWitnessQuery:
    eta0: Label
    mu0: Label
    zeta0: Label
    m1: int
    m2: int
    triple_type: TripleType
    residue: Optional[int] = None
    modulus: Optional[int] = None


@dataclass(frozen=True, slots=True)
class PecResult:
    passed: bool
    depth: int
    frontier_size: int
    queries: int
    counterexample: Optional[PecWitnessQuery] = None
    trace: Tuple[ExtensionStep, ...] = ()
    extension: Optional["PartialAutomorphism"] = None


@dataclass(frozen=True, slots=True)
class DeterminismStep:
    endpoint: Label
    descriptor: OneTypeDescriptor


@dataclass(frozen=True, slots=True)
class DeterminedStepResult:
    count: int
    endpoint: Label
    descriptors: Tuple[OneTypeDescriptor, ...]
    fragment: Optional[DeterminismStep] = None


@dataclass(frozen=True, slots=True)
class DeterminismCertificate:
    automorphism: "PartialAutomorphism"
    depth: int
    per_step: Tuple[DeterminismStep, ...]
    counts: Tuple[int, ...] = ()
    failure_step: Optional[int] = None

    @property
    def succeeded(self) -> bool:
        return self.failure_step is None


@dataclass(frozen=True, slots=True)
class ConsequenceReport:
    violations: Tuple[str, ...] = ()

    @property
    def clean(self) -> bool:
        return not self.violations


Point = Union[Fraction, Label]


@dataclass(frozen=True, slots=True)
class AutPair:
    order: Union["LinearOrder", "MeetTree"]
    g1: tuple
    g2: tuple
    anchor: Point

    def maps(self) -> Tuple[dict, dict]:
        return dict(self.g1), dict(self.g2)


@dataclass(frozen=True, slots=True)
class Atom:
    left: Tuple[str, ...]
    relation: str
    right: Tuple[str, ...]


@dataclass(frozen=True, slots=True)
class DistinguishingWord:
    """Letters are applied to the anchor from left to right."""

    word: Tuple[str, ...]
    atom: Atom

    def __len__(self) -> int:
        return max(len(self.atom.left), len(self.atom.right))


@dataclass(frozen=True, slots=True)
class IrreconcilablePairs:
    first: AutPair
    second: AutPair
    certificate: DistinguishingWord
    extended_map: int = 2


@dataclass(frozen=True, slots=True)
class RunReport:
    command: str
    inputs: Dict[str, str] = field(default_factory=dict)
    verdicts: Dict[str, object] = field(default_factory=dict)
    seed: Optional[int] = None
    elapsed: Optional[float] = None
    budget_used: Dict[str, int] = field(default_factory=dict)


__all__ = [
    "Label",
    "Pairs",
    "ORBIT_KINDS",
    "as_pairs",
    "Violation",
    "Cut",
    "Embedding",
    "OneTypeDescriptor",
    "PointedExtension",
    "Orbit",
    "OrbitClass",
    "PautoViolation",
    "OrbitExtensionPlan",
    "OrbitExtension",
    "AmalgProblem",
    "AmalgSolution",
    "ExhaustionReport",
    "AmalgSearchResult",
    "TripleType",
    "ExtensionStep",
    "PecWitnessQuery",
    "PecResult",
    "DeterminismStep",
    "DeterminedStepResult",
    "DeterminismCertificate",
    "ConsequenceReport",
    "Point",
    "AutPair",
    "Atom",
    "DistinguishingWord",
    "IrreconcilablePairs",
    "RunReport",
]
