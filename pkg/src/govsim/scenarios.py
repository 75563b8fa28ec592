"""The five experimental scenario presets."""
from __future__ import annotations

from dataclasses import dataclass

from .governance import Parameters, default_parameters


@dataclass(frozen=True)
class ScenarioSpec:
    id: str
    name: str
    agents: int
    tasks: int
    delegation_boost: float = 1.0
    adversarial_multiplier: float = 1.0
    optimization_wave: bool = False

    @property
    def index(self) -> int:
        return SCENARIO_IDS.index(self.id)


# id -> (name, agents, tasks, primary stress)
_TABLE = {
    "S1": ("Greenfield", 30, 1000, "Initial sprawl"),
    "S2": ("Scaling", 50, 2000, "Scalability"),
    "S3": ("Cross-Functional", 35, 1500, "Delegation chains"),
    "S4": ("Adversarial", 30, 1000, "Security"),
    "S5": ("Optimization", 40, 1500, "Portfolio mgmt."),
}
SCENARIO_IDS = tuple(_TABLE)


def primary_stress(scenario_id: str) -> str:
    return _TABLE[scenario_id][3]


def scenario_preset(scenario_id: str, params: Parameters | None = None) -> ScenarioSpec:
    if scenario_id not in _TABLE:
        raise ValueError(f"unknown scenario {scenario_id!r}; valid ids: {', '.join(SCENARIO_IDS)}")
    params = params or default_parameters()
    name, agents, tasks, _ = _TABLE[scenario_id]
    stress = params.scenarios.get(scenario_id)
    if stress is None:
        return ScenarioSpec(scenario_id, name, agents, tasks)
    return ScenarioSpec(
        scenario_id,
        name,
        agents,
        tasks,
        delegation_boost=stress.delegation_boost,
        adversarial_multiplier=stress.adversarial_multiplier,
        optimization_wave=stress.optimization_wave,
    )


def all_scenarios(params: Parameters | None = None) -> list[ScenarioSpec]:
    return [scenario_preset(sid, params) for sid in SCENARIO_IDS]
