from __future__ import annotations

from typing import TYPE_CHECKING, List, Optional, Sequence

if TYPE_CHECKING:  # pragma: no cover
    from .tree_types import PautoViolation, Violation


class MeetTreeError(Exception):
    """Base class for every error raised by the package."""


class InputError(MeetTreeError, ValueError):
    """Malformed or inconsistent input data."""

    def __init__(self, message: str, location: Optional[str] = None) -> None:
        self.location = location
        if location:
            message = f"{message} (at {location})"
        super().__init__(message)


class TreeValidationError(InputError):
    def __init__(self, violations: Sequence["Violation"]) -> None:
        self.violations: List["Violation"] = list(violations)
        listed = "; ".join(f"{v.kind} at {list(v.witness)}" for v in self.violations)
        super().__init__(f"not a meet-tree: {len(self.violations)} violation(s): {listed}")


class PautoValidationError(InputError):
    def __init__(self, violation: "PautoViolation") -> None:
        self.violation = violation
        super().__init__(f"not a partial automorphism: {violation.kind} at {list(violation.witness)}")


class PreconditionError(MeetTreeError, ValueError):
    """An operation was called outside its documented domain."""


class BudgetExceeded(MeetTreeError, RuntimeError):
    def __init__(self, what: str, budget: int, reached: Optional[int] = None) -> None:
        self.what = what
        self.budget = budget
        self.reached = reached if reached is not None else budget
        super().__init__(f"{what}: budget {budget} exceeded")


class Finding(MeetTreeError, RuntimeError):
    """A constructive step that should succeed did not validate.

    Raised instead of silently patching around the failure so the offending
    instance can be inspected.
    """
