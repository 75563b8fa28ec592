"""Single-run simulation engine.

One call to :func:`run_simulation` generates a fleet, streams the scenario's
tasks through it, and returns a :class:`RunRecord` of raw counters. Every
random decision is drawn from one :class:`~govsim.rng.RngState`, in a fixed
order, so a (scenario, config, seed) triple always yields the same record.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass

from .governance import EngineParams, GovernanceConfig, GovernanceControl, default_parameters
from .model import (
    N_CAPABILITIES,
    SLOTS_PER_FUNCTION,
    Agent,
    Capability,
    MaturityLevel,
    SprawlPattern,
    TaskDifficulty,
    sample_task_difficulty,
)
from .rng import RngState
from .scenarios import ScenarioSpec
from .sprawl import PatternFlags, detect_patterns, pattern_counts, staffing_plan

C = GovernanceControl
_CRITICAL = int(TaskDifficulty.CRITICAL)
_CAPS = [Capability.from_index(i) for i in range(N_CAPABILITIES)]


def baseline_permissions(capability: Capability) -> int:
    return 2 + capability.slot % 3


class Fleet:
    """Agents of one run plus an index of the agents that can take work.

    ``by_capability[i]`` lists ids of live, non-orphaned agents holding
    capability index ``i``.
    """

    def __init__(self, plan: int) -> None:
        self.agents: list[Agent] = []
        self.by_capability: list[list[int]] = [[] for _ in range(N_CAPABILITIES)]
        self.plan = plan

    def add(self, cap_index: int, shadow: bool) -> Agent:
        cap = _CAPS[cap_index]
        agent = Agent(
            id=len(self.agents),
            capability=cap,
            baseline_permissions=baseline_permissions(cap),
            is_shadow=shadow,
            registered=not shadow,
        )
        self.agents.append(agent)
        self.by_capability[cap_index].append(agent.id)
        return agent

    def orphan(self, agent: Agent) -> None:
        agent.is_orphaned = True
        self.by_capability[agent.capability.index].remove(agent.id)

    def retire(self, agent: Agent) -> None:
        if agent.is_retired:
            return
        if not agent.is_orphaned:
            self.by_capability[agent.capability.index].remove(agent.id)
        agent.is_retired = True

    def is_duplicate(self, agent: Agent) -> bool:
        """Registered worker on a capability staffed beyond the plan."""
        if agent.is_retired or agent.is_orphaned or not agent.registered:
            return False
        ids = self.by_capability[agent.capability.index]
        return sum(1 for i in ids if self.agents[i].registered) > self.plan

    def live(self) -> list[Agent]:
        return [a for a in self.agents if not a.is_retired]

    def working(self) -> list[Agent]:
        return [self.agents[i] for ids in self.by_capability for i in ids]

    def check_index(self) -> None:
        expected = [[] for _ in range(N_CAPABILITIES)]
        for a in self.agents:
            if not a.is_retired and not a.is_orphaned:
                expected[a.capability.index].append(a.id)
        if [sorted(x) for x in expected] != [sorted(x) for x in self.by_capability]:
            raise RuntimeError("capability index out of sync with agent flags")


def _shadow_probability(config: GovernanceConfig, eng: EngineParams) -> float:
    p = config.shadow_probability
    if C.PredictiveSprawl in config.controls:
        p *= 1.0 - eng.predictive_reduction
    return p


def generate_fleet(
    scenario: ScenarioSpec,
    config: GovernanceConfig,
    rng: RngState,
    engine: EngineParams | None = None,
) -> Fleet:
    if scenario.agents < 1:
        raise ValueError("scenario must have at least one agent")
    eng = engine or default_parameters().engine
    fleet = Fleet(staffing_plan(scenario.agents))
    p_shadow = _shadow_probability(config, eng)
    for i in range(scenario.agents):
        cap = i if i < N_CAPABILITIES else rng.below(N_CAPABILITIES)
        fleet.add(cap, rng.next_unit() < p_shadow)
    return fleet


@dataclass
class RunRecord:
    scenario_id: str
    level: MaturityLevel
    replicate: int
    seed: int
    agents_total: int = 0
    agents_shadow: int = 0
    agents_orphaned: int = 0
    agents_duplicate: int = 0
    agents_creeped: int = 0
    agents_unsafe_delegators: int = 0
    tasks_total: int = 0
    tasks_completed: int = 0
    tasks_effective: int = 0
    actions_total: int = 0
    incidents_total: int = 0
    hops_total: int = 0
    hops_safe: int = 0
    # Not part of the runs.csv contract.
    agents_flagged: int = 0
    permissions_creeped: int = 0
    chains_total: int = 0
    chains_safe: int = 0

    def check(self) -> None:
        problems = []
        if not self.tasks_effective <= self.tasks_completed <= self.tasks_total:
            problems.append("tasks_effective <= tasks_completed <= tasks_total")
        if not self.hops_safe <= self.hops_total:
            problems.append("hops_safe <= hops_total")
        if not self.incidents_total <= self.actions_total:
            problems.append("incidents_total <= actions_total")
        if self.actions_total < self.tasks_total:
            problems.append("actions_total >= tasks_total")
        per_pattern = (self.agents_shadow + self.agents_orphaned + self.agents_duplicate
                       + self.agents_creeped + self.agents_unsafe_delegators)
        if per_pattern < self.agents_flagged or self.agents_flagged > self.agents_total:
            problems.append("flag counts inconsistent with flagged union")
        if problems:
            raise RuntimeError(f"run record invariants violated: {problems}")

    def as_dict(self) -> dict:
        return asdict(self)


def record_flags(record: RunRecord, flags: PatternFlags, total_agents: int) -> None:
    counts = pattern_counts(flags)
    record.agents_total = total_agents
    record.agents_duplicate = counts[SprawlPattern.SP01_FunctionalDuplication]
    record.agents_shadow = counts[SprawlPattern.SP02_ShadowAgent]
    record.agents_orphaned = counts[SprawlPattern.SP03_OrphanedAgent]
    record.agents_creeped = counts[SprawlPattern.SP04_PermissionCreep]
    record.agents_unsafe_delegators = counts[SprawlPattern.SP05_UnmonitoredDelegation]
    record.agents_flagged = len(flags)


class _Run:
    """Mutable state of one run; methods are the loop phases."""

    def __init__(self, scenario: ScenarioSpec, config: GovernanceConfig, seed: int,
                 eng: EngineParams, replicate: int) -> None:
        self.scenario = scenario
        self.config = config
        self.eng = eng
        self.rng = RngState(seed)
        self.rec = RunRecord(scenario.id, config.level, replicate, seed)
        ctl = config.controls
        self.policy = C.PolicyEnforcement in ctl or C.AutoPolicy in ctl
        self.hitl = C.HITL in ctl
        self.iam = C.IAM in ctl
        self.incident_response = C.IncidentResponse in ctl
        self.scanning = C.SprawlDetection in ctl and config.scan_interval > 0
        self.p_shadow = _shadow_probability(config, eng)
        self.base_rate = config.base_violation_rate
        self.attack_rate = config.base_violation_rate * (scenario.adversarial_multiplier - 1.0)
        self.orphan_hazard = config.orphan_rate / eng.orphan_horizon_ticks
        self.proliferation = eng.proliferation_rate
        if C.PredictiveSprawl in ctl:
            self.proliferation *= 1.0 - eng.predictive_reduction
        self.incident_queue: list[int] = []
        self.ir_credit = 0.0
        self.fleet = generate_fleet(scenario, config, self.rng, eng)

    # -- per-action risk -------------------------------------------------
    def violation(self, agent: Agent, difficulty: int) -> bool:
        """One action by ``agent``; True when it produced an incident that invalidates work.

        The attempt probability is the clean-agent base rate plus flag-driven
        risk. Adversarial scenarios add external attacks on top of the base
        rate; an attack that lands is a breach and triggers an audit of the
        victim's business function at every maturity level.
        """
        eng = self.eng
        p = self.base_rate + self.attack_rate
        if not agent.registered:
            p += eng.unregistered_violation_risk
        if agent.is_orphaned:
            p += eng.orphan_violation_risk
        extra = agent.granted_permissions - agent.baseline_permissions
        if extra:
            p += eng.creep_violation_risk * extra
        rng = self.rng
        u = rng.next_unit()
        if u >= p:
            return False
        # unregistered agents sit outside the policy perimeter
        if self.policy and agent.registered and rng.next_unit() < self.config.violation_block_rate:
            return False
        if self.hitl and difficulty == _CRITICAL and rng.next_unit() < eng.hitl_block_rate:
            return False
        self.rec.incidents_total += 1
        self.incident_queue.append(agent.id)
        if u < self.attack_rate:
            self.breach_audit(agent)
        return rng.next_unit() < eng.incident_invalidation_prob

    def breach_audit(self, victim: Agent) -> None:
        function = victim.capability.function
        rng, eff = self.rng, self.eng.breach_audit_efficacy
        for agent in self.fleet.live():
            if agent.capability.function == function and rng.next_unit() < eff:
                self.resolve(agent)

    # -- task stream ------------------------------------------------------
    def task(self) -> None:
        rng, eng, rec, fleet = self.rng, self.eng, self.rec, self.fleet
        difficulty = int(sample_task_difficulty(rng.next_unit()))
        cap = rng.below(N_CAPABILITIES)
        pool = fleet.by_capability[cap]
        rec.tasks_total += 1
        rec.actions_total += 1
        if not pool:
            return
        agent = fleet.agents[pool[0] if len(pool) == 1 else pool[rng.below(len(pool))]]

        p = eng.success_by_difficulty[difficulty] + self.config.success_bonus
        if not agent.registered:
            p -= eng.unregistered_success_penalty
        extra = agent.granted_permissions - agent.baseline_permissions
        if extra:
            p -= eng.creep_success_penalty * extra
        if self.hitl and difficulty == _CRITICAL:
            p += eng.hitl_success_bonus
        completed = rng.next_unit() < p
        effective = completed
        if self.violation(agent, difficulty):
            effective = False

        spawn = eng.delegation_spawn[difficulty] * self.scenario.delegation_boost
        if rng.next_unit() < spawn:
            # chains are orchestrated by the coordinator of the task's business function
            coord = fleet.by_capability[cap - cap % SLOTS_PER_FUNCTION]
            if coord:
                origin = fleet.agents[coord[0] if len(coord) == 1 else coord[rng.below(len(coord))]]
            else:
                origin = agent
            if not self.delegate(origin, difficulty):
                effective = False

        if completed:
            rec.tasks_completed += 1
            if effective:
                rec.tasks_effective += 1

    def delegate(self, origin: Agent, difficulty: int) -> bool:
        """Run one delegation chain; False when it invalidated the task."""
        rng, eng, rec, fleet = self.rng, self.eng, self.rec, self.fleet
        ok = True
        chain_safe = True
        current = origin
        rec.chains_total += 1
        for depth in range(1, eng.max_chain_depth + 1):
            pool = fleet.by_capability[rng.below(N_CAPABILITIES)]
            if not pool:
                break
            target = fleet.agents[pool[0] if len(pool) == 1 else pool[rng.below(len(pool))]]
            rec.hops_total += 1
            rec.actions_total += 1
            if rng.next_unit() < self.config.hop_safety:
                rec.hops_safe += 1
            else:
                chain_safe = False
                current.unsafe_hops += 1
                if rng.next_unit() < eng.unsafe_hop_incident_prob:
                    rec.incidents_total += 1
                    self.incident_queue.append(current.id)
                    ok = False
            if self.violation(target, difficulty):
                ok = False
            if depth == eng.max_chain_depth or rng.next_unit() >= eng.delegation_continue:
                break
            current = target
        if chain_safe:
            rec.chains_safe += 1
        return ok

    # -- lifecycle --------------------------------------------------------
    def resolve(self, agent: Agent) -> None:
        """Fix whatever sprawl pattern ``agent`` shows; no-op for clean agents."""
        if agent.is_retired:
            return
        if self.fleet.is_duplicate(agent):
            self.fleet.retire(agent)
        elif _flagged(agent):
            self.remediate(agent)

    def remediate(self, agent: Agent) -> None:
        if agent.is_orphaned:
            self.fleet.retire(agent)
            return
        agent.registered = True
        agent.granted_permissions = agent.baseline_permissions
        agent.unsafe_hops = 0

    def tick(self, tick_no: int, total_ticks: int) -> None:
        rng, eng, rec, fleet = self.rng, self.eng, self.rec, self.fleet

        for agent in fleet.agents:
            if agent.is_orphaned and not agent.is_retired:
                for _ in range(eng.orphan_actions_per_tick):
                    rec.actions_total += 1
                    self.violation(agent, 0)

        for agent in fleet.working():
            if rng.next_unit() < self.orphan_hazard:
                fleet.orphan(agent)
                fleet.add(agent.capability.index, rng.next_unit() < self.p_shadow)

        # ad-hoc clones of working agents: proliferation compounds with fleet size
        for agent in fleet.working():
            if rng.next_unit() < self.proliferation:
                fleet.add(agent.capability.index, rng.next_unit() < self.p_shadow)

        for agent in fleet.live():
            if rng.next_unit() < eng.creep_rate:
                if self.iam and rng.next_unit() < eng.iam_creep_block:
                    continue
                agent.granted_permissions += 1

        # Reactive triage: work this window's incidents in arrival order up to
        # capacity. Agents that are already clean cost nothing; leftovers are
        # dropped and unused credit does not bank beyond one tick.
        if self.incident_response:
            self.ir_credit = min(self.ir_credit, 1.0) + eng.ir_capacity
            for agent_id in self.incident_queue:
                if self.ir_credit < 1.0:
                    break
                agent = fleet.agents[agent_id]
                if agent.is_retired or not (_flagged(agent) or fleet.is_duplicate(agent)):
                    continue
                self.ir_credit -= 1.0
                if rng.next_unit() < eng.ir_efficacy:
                    self.resolve(agent)
        self.incident_queue.clear()

        if self.scanning and tick_no % self.config.scan_interval == 0:
            self.scan(self.config.scan_efficacy)

        if self.scenario.optimization_wave and tick_no == total_ticks // 2:
            self.wave()

    def scan(self, efficacy: float) -> None:
        rng, fleet = self.rng, self.fleet
        live = fleet.live()
        self.rec.actions_total += math.ceil(len(live) / self.eng.scan_action_divisor)
        for agent in live:
            if _flagged(agent) and rng.next_unit() < efficacy:
                self.remediate(agent)
        # duplicates: retire registered workers beyond the staffing plan, newest first
        for ids in fleet.by_capability:
            registered = [i for i in ids if fleet.agents[i].registered]
            for i in reversed(registered[fleet.plan:]):
                if rng.next_unit() < efficacy:
                    fleet.retire(fleet.agents[i])

    def wave(self) -> None:
        """Portfolio clean-up wave: retire orphans, right-size permissions."""
        rng, fleet, w = self.rng, self.fleet, self.eng.wave_intensity
        for agent in fleet.live():
            if agent.is_orphaned:
                if rng.next_unit() < w:
                    fleet.retire(agent)
            elif agent.granted_permissions > agent.baseline_permissions and rng.next_unit() < w:
                agent.granted_permissions = agent.baseline_permissions

    def execute(self) -> RunRecord:
        stride = self.eng.tick_stride
        n = self.scenario.tasks
        total_ticks = n // stride
        tick_no = 0
        for t in range(1, n + 1):
            self.task()
            if t % stride == 0:
                tick_no += 1
                self.tick(tick_no, total_ticks)
        fleet = self.fleet
        flags = detect_patterns(fleet.agents, fleet.plan)
        record_flags(self.rec, flags, len(fleet.agents))
        self.rec.permissions_creeped = sum(
            a.granted_permissions - a.baseline_permissions for a in fleet.agents if not a.is_retired
        )
        self.rec.check()
        return self.rec


def _flagged(agent: Agent) -> bool:
    return (
        agent.is_orphaned
        or not agent.registered
        or agent.granted_permissions > agent.baseline_permissions
        or agent.unsafe_hops > 0
    )


def run_simulation(
    scenario: ScenarioSpec,
    config: GovernanceConfig,
    seed: int,
    engine: EngineParams | None = None,
    replicate: int = 0,
) -> RunRecord:
    eng = engine or default_parameters().engine
    return _Run(scenario, config, seed, eng, replicate).execute()


def run_with_fleet(
    scenario: ScenarioSpec,
    config: GovernanceConfig,
    seed: int,
    engine: EngineParams | None = None,
) -> tuple[RunRecord, Fleet]:
    """Like :func:`run_simulation` but also hands back the final fleet."""
    eng = engine or default_parameters().engine
    run = _Run(scenario, config, seed, eng, 0)
    return run.execute(), run.fleet
