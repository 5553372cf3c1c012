from __future__ import annotations

import os
from dataclasses import dataclass, field
from typing import Callable, Optional

from .errors import BudgetExceeded, InputError

BUDGET_ENV_VAR = "MEETTREE_BUDGET"
DEFAULT_NODE_BUDGET = 10_000_000

ProgressCallback = Callable[[str, int], None]


def _budget_from_env() -> int:
    raw = os.environ.get(BUDGET_ENV_VAR)
    if raw is None or raw.strip() == "":
        return DEFAULT_NODE_BUDGET
    try:
        value = int(raw)
    except ValueError as exc:
        raise InputError(f"{BUDGET_ENV_VAR} must be an integer, got {raw!r}") from exc
    if value <= 0:
        raise InputError(f"{BUDGET_ENV_VAR} must be positive, got {value}")
    return value


@dataclass(slots=True)
class SearchConfig:
    node_budget: int = DEFAULT_NODE_BUDGET
    extension_budget: int = 3
    max_extension_budget: int = 6
    pec_iteration_cap: int = 64
    pec_depth: int = 2
    max_enumeration_size: int = 8
    seed: int = 17

    @classmethod
    def from_env(cls, **overrides: int) -> "SearchConfig":
        config = cls(node_budget=_budget_from_env())
        for key, value in overrides.items():
            setattr(config, key, value)
        return config


@dataclass(slots=True)
class NodeCounter:
    """Charges explored search nodes against a budget."""

    budget: int
    what: str = "search"
    used: int = 0
    progress: Optional[ProgressCallback] = field(default=None, repr=False)

    @classmethod
    def for_config(cls, config: Optional[SearchConfig], what: str = "search") -> "NodeCounter":
        return cls(budget=(config or SearchConfig()).node_budget, what=what)

    def charge(self, amount: int = 1) -> None:
        self.used += amount
        if self.used > self.budget:
            raise BudgetExceeded(self.what, self.budget, self.used)
        if self.progress and self.used % 10_000 == 0:
            self.progress(f"{self.what}: {self.used} nodes", min(99, self.used * 100 // self.budget))
