from .config import SearchConfig
from .errors import BudgetExceeded, Finding, InputError, MeetTreeError, PreconditionError
from .pautomorph import PartialAutomorphism
from .tree import MeetTree

__version__ = "0.1.0"

__all__ = [
    "SearchConfig",
    "MeetTree",
    "PartialAutomorphism",
    "MeetTreeError",
    "InputError",
    "PreconditionError",
    "BudgetExceeded",
    "Finding",
]
