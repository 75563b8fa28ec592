"""Executable sprawl taxonomy: pattern detection, Sprawl Index, and the sprawl cost model."""
from __future__ import annotations

import math
from collections import Counter
from collections.abc import Iterable, Mapping
from dataclasses import dataclass

from .governance import UnitCosts
from .model import N_CAPABILITIES, Agent, SprawlPattern

SP = SprawlPattern

# agent id -> patterns carried at end of run (agents without flags are absent)
PatternFlags = dict[int, frozenset[SprawlPattern]]


def staffing_plan(agents: int) -> int:
    """Agents per capability considered normal staffing."""
    return max(1, math.ceil(agents / N_CAPABILITIES))


def detect_patterns(agents: Iterable[Agent], plan: int) -> PatternFlags:
    """Flag every live agent according to the five sprawl definitions.

    Retired agents never carry flags. Orphaned agents no longer perform their
    function, so they do not count towards functional duplication.
    """
    agents = [a for a in agents if not a.is_retired]
    working = Counter(
        a.capability for a in agents if a.registered and not a.is_orphaned
    )
    flags: PatternFlags = {}
    for a in agents:
        found = set()
        if a.registered and not a.is_orphaned and working[a.capability] > plan:
            found.add(SP.SP01_FunctionalDuplication)
        if not a.registered:
            found.add(SP.SP02_ShadowAgent)
        if a.is_orphaned:
            found.add(SP.SP03_OrphanedAgent)
        if a.granted_permissions > a.baseline_permissions:
            found.add(SP.SP04_PermissionCreep)
        if a.unsafe_hops > 0:
            found.add(SP.SP05_UnmonitoredDelegation)
        if found:
            flags[a.id] = frozenset(found)
    return flags


def pattern_counts(flags: PatternFlags) -> dict[SprawlPattern, int]:
    counts = {p: 0 for p in SprawlPattern}
    for pats in flags.values():
        for p in pats:
            counts[p] += 1
    return counts


def sprawl_index(flags: PatternFlags, total_agents: int) -> float:
    """Share of all agents ever created that carry at least one flag."""
    if total_agents < 1:
        raise ValueError("total_agents must be >= 1")
    flagged = sum(1 for pats in flags.values() if pats)
    if flagged > total_agents:
        raise ValueError(f"{flagged} flagged agents exceed total {total_agents}")
    return flagged / total_agents


@dataclass(frozen=True)
class SprawlCostBreakdown:
    redundancy: float
    security: float
    compliance: float
    operational: float
    opportunity: float

    @property
    def total(self) -> float:
        return self.redundancy + self.security + self.compliance + self.operational + self.opportunity


_COUNT_KEYS = ("duplicate_agents", "shadow_agents", "creeped_permissions",
               "incidents", "orphaned_agents", "lost_tasks")


def sprawl_cost(counts: Mapping[str, float], rates: UnitCosts | None = None) -> SprawlCostBreakdown:
    """Five-component sprawl cost; each component is linear in its counts.

    ``counts`` needs the keys duplicate_agents, shadow_agents,
    creeped_permissions, incidents, orphaned_agents and lost_tasks.
    """
    rates = rates or UnitCosts()
    missing = [k for k in _COUNT_KEYS if k not in counts]
    if missing:
        raise KeyError(f"missing counts: {missing}")
    for k in _COUNT_KEYS:
        if counts[k] < 0:
            raise ValueError(f"count {k} must be >= 0, got {counts[k]}")
    return SprawlCostBreakdown(
        redundancy=rates.duplicate_agent * counts["duplicate_agents"],
        security=rates.shadow_agent * counts["shadow_agents"]
        + rates.creeped_permission * counts["creeped_permissions"],
        compliance=rates.incident * counts["incidents"],
        operational=rates.orphaned_agent * counts["orphaned_agents"],
        opportunity=rates.lost_task * counts["lost_tasks"],
    )
