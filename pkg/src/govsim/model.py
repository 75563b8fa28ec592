"""Shared domain vocabulary: levels, capabilities, difficulties, sprawl patterns, agents."""
from __future__ import annotations

import enum
from dataclasses import dataclass

N_FUNCTIONS = 5
SLOTS_PER_FUNCTION = 6
N_CAPABILITIES = N_FUNCTIONS * SLOTS_PER_FUNCTION

FUNCTION_NAMES = ("Customer Service", "Finance", "Operations", "Sales & Marketing", "IT & Security")


class MaturityLevel(enum.IntEnum):
    L1 = 1
    L2 = 2
    L3 = 3
    L4 = 4
    L5 = 5

    @property
    def label(self) -> str:
        return _LEVEL_NAMES[self]

    @property
    def index(self) -> int:
        return int(self) - 1

    @classmethod
    def parse(cls, value: str | int) -> MaturityLevel:
        if isinstance(value, int):
            return cls(value)
        text = str(value).strip().upper()
        if text.startswith("L"):
            text = text[1:]
        return cls(int(text))


_LEVEL_NAMES = {
    MaturityLevel.L1: "Ad-hoc",
    MaturityLevel.L2: "Reactive",
    MaturityLevel.L3: "Defined",
    MaturityLevel.L4: "Managed",
    MaturityLevel.L5: "Optimized",
}

LEVELS = tuple(MaturityLevel)


@dataclass(frozen=True)
class BusinessFunction:
    id: int
    name: str


@dataclass(frozen=True, order=True)
class Capability:
    function: int
    slot: int

    @property
    def index(self) -> int:
        return self.function * SLOTS_PER_FUNCTION + self.slot

    @classmethod
    def from_index(cls, index: int) -> Capability:
        if not 0 <= index < N_CAPABILITIES:
            raise ValueError(f"capability index out of range: {index}")
        return cls(*divmod(index, SLOTS_PER_FUNCTION))


def business_functions() -> list[BusinessFunction]:
    return [BusinessFunction(i, name) for i, name in enumerate(FUNCTION_NAMES)]


def all_capabilities() -> list[Capability]:
    return [Capability.from_index(i) for i in range(N_CAPABILITIES)]


class TaskDifficulty(enum.IntEnum):
    SIMPLE = 0
    MODERATE = 1
    COMPLEX = 2
    CRITICAL = 3


DIFFICULTY_MIX = (0.40, 0.35, 0.20, 0.05)
_DIFFICULTY_EDGES = (0.40, 0.75, 0.95)


def sample_task_difficulty(u: float) -> TaskDifficulty:
    """Inverse-CDF lookup with left-closed bands."""
    if not 0.0 <= u < 1.0:
        raise ValueError(f"u must lie in [0, 1), got {u!r}")
    if u < _DIFFICULTY_EDGES[0]:
        return TaskDifficulty.SIMPLE
    if u < _DIFFICULTY_EDGES[1]:
        return TaskDifficulty.MODERATE
    if u < _DIFFICULTY_EDGES[2]:
        return TaskDifficulty.COMPLEX
    return TaskDifficulty.CRITICAL


class SprawlPattern(enum.Enum):
    SP01_FunctionalDuplication = "SP-01"
    SP02_ShadowAgent = "SP-02"
    SP03_OrphanedAgent = "SP-03"
    SP04_PermissionCreep = "SP-04"
    SP05_UnmonitoredDelegation = "SP-05"

    @property
    def title(self) -> str:
        return _PATTERN_TITLES[self]


_PATTERN_TITLES = {
    SprawlPattern.SP01_FunctionalDuplication: "Functional Duplication",
    SprawlPattern.SP02_ShadowAgent: "Shadow Agents",
    SprawlPattern.SP03_OrphanedAgent: "Orphaned Agents",
    SprawlPattern.SP04_PermissionCreep: "Permission Creep",
    SprawlPattern.SP05_UnmonitoredDelegation: "Unmonitored Delegation",
}


class TaskOutcome(enum.Enum):
    COMPLETED = "Completed"
    FAILED = "Failed"
    INVALIDATED = "Invalidated"
    UNASSIGNED = "Unassigned"


@dataclass
class Agent:
    """One simulated worker. Mutable: the engine updates flags in place."""

    id: int
    capability: Capability
    baseline_permissions: int
    granted_permissions: int = -1
    is_shadow: bool = False
    is_orphaned: bool = False
    is_retired: bool = False
    registered: bool = True
    unsafe_hops: int = 0

    def __post_init__(self) -> None:
        if self.granted_permissions < 0:
            self.granted_permissions = self.baseline_permissions
        if self.granted_permissions < self.baseline_permissions:
            raise ValueError("granted_permissions must be >= baseline_permissions")

    @property
    def live(self) -> bool:
        return not self.is_retired

    @property
    def extra_permissions(self) -> int:
        return self.granted_permissions - self.baseline_permissions


@dataclass
class Task:
    id: int
    difficulty: TaskDifficulty
    required_capability: Capability
    outcome: TaskOutcome = TaskOutcome.UNASSIGNED


@dataclass(frozen=True)
class DelegationHop:
    chain_id: int
    depth: int
    from_agent: int
    to_agent: int
    authorized: bool
    visible: bool

    @property
    def safe(self) -> bool:
        return self.authorized and self.visible
