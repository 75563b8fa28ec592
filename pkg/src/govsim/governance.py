"""Maturity-level control sets, the governance domain catalog, and per-level parameters.

All numeric behaviour lives in a YAML parameter file (``params/default.yaml``
ships with the package). :func:`load_parameters` parses and validates it.
"""
from __future__ import annotations

import enum
import hashlib
from dataclasses import dataclass, field, fields
from importlib import resources
from pathlib import Path
from typing import Any

import yaml

from .model import LEVELS, MaturityLevel, SprawlPattern


class GovernanceControl(enum.Enum):
    Registry = "registry"
    IncidentResponse = "incident_response"
    IAM = "iam"
    Observability = "observability"
    PolicyEnforcement = "policy_enforcement"
    HITL = "hitl"
    Audit = "audit"
    RiskClassification = "risk_classification"
    AutoPolicy = "auto_policy"
    SprawlDetection = "sprawl_detection"
    LifecycleManagement = "lifecycle_management"
    ContinuousImprovement = "continuous_improvement"
    PredictiveSprawl = "predictive_sprawl"
    GovernanceAsCode = "governance_as_code"


C = GovernanceControl

_ADDED_AT = {
    MaturityLevel.L1: frozenset(),
    MaturityLevel.L2: frozenset({C.Registry, C.IncidentResponse}),
    MaturityLevel.L3: frozenset(
        {C.IAM, C.Observability, C.PolicyEnforcement, C.HITL, C.Audit, C.RiskClassification}
    ),
    MaturityLevel.L4: frozenset({C.AutoPolicy, C.SprawlDetection, C.LifecycleManagement}),
    MaturityLevel.L5: frozenset({C.ContinuousImprovement, C.PredictiveSprawl, C.GovernanceAsCode}),
}


def active_controls(level: MaturityLevel) -> frozenset[GovernanceControl]:
    """Controls in force at ``level``; each level inherits everything below it."""
    level = MaturityLevel(level)
    out: frozenset[GovernanceControl] = frozenset()
    for lv in LEVELS:
        if lv > level:
            break
        out |= _ADDED_AT[lv]
    return out


@dataclass(frozen=True)
class GovernanceDomain:
    id: str
    name: str
    nist_refs: tuple[str, ...]
    iso_refs: tuple[str, ...]
    # None means the domain addresses every pattern ("All").
    sprawl_patterns: frozenset[SprawlPattern] | None

    @property
    def covers_all_patterns(self) -> bool:
        return self.sprawl_patterns is None


_SP = SprawlPattern
_DOMAINS = (
    ("GD-01", "Agent Lifecycle Mgmt.", ("GOV 1.1", "GOV 1.3"), ("6.1", "8.1"), {_SP.SP03_OrphanedAgent}),
    ("GD-02", "Identity & Access Ctrl.", ("GOV 1.5", "MNG 2.3"), ("9.2", "9.4"), {_SP.SP04_PermissionCreep}),
    ("GD-03", "Observability", ("MEA 2.1", "MEA 2.6"), ("9.1",),
     {_SP.SP02_ShadowAgent, _SP.SP05_UnmonitoredDelegation}),
    ("GD-04", "Policy Enforcement", ("GOV 1.2", "MNG 4.1"), ("5.2", "8.2"), None),
    ("GD-05", "Data Governance", ("MAP 3.1", "GOV 1.7"), ("A.8",), {_SP.SP04_PermissionCreep}),
    ("GD-06", "Human Oversight", ("GOV 1.4", "MNG 1.3"), ("6.2",), {_SP.SP05_UnmonitoredDelegation}),
    ("GD-07", "Sprawl Containment", ("GOV 6.1", "MAP 1.5"), ("8.1", "10.1"),
     {_SP.SP01_FunctionalDuplication, _SP.SP02_ShadowAgent}),
    ("GD-08", "Audit & Compliance", ("MEA 2.8", "MNG 4.2"), ("9.2", "10.2"), None),
    ("GD-09", "Inter-Agent Coord.", ("MAP 3.4", "MNG 2.1"), ("8.2",), {_SP.SP05_UnmonitoredDelegation}),
    ("GD-10", "Risk Classification", ("MAP 1.1", "MAP 1.2"), ("6.1.2",), {_SP.SP04_PermissionCreep}),
    ("GD-11", "Incident Response", ("MNG 3.1", "MNG 4.1"), ("A.6.2.5",), None),
    ("GD-12", "Continuous Improvement", ("MEA 3.1", "GOV 6.2"), ("10.1", "10.2"), None),
)


def domain_catalog() -> list[GovernanceDomain]:
    return [
        GovernanceDomain(gid, name, nist, iso, None if pats is None else frozenset(pats))
        for gid, name, nist, iso, pats in _DOMAINS
    ]


def domain(gid: str) -> GovernanceDomain:
    for d in domain_catalog():
        if d.id == gid:
            return d
    raise KeyError(f"unknown governance domain {gid!r}")


@dataclass(frozen=True)
class GovernanceConfig:
    level: MaturityLevel
    controls: frozenset[GovernanceControl]
    shadow_probability: float
    orphan_rate: float
    base_violation_rate: float
    violation_block_rate: float
    hop_safety: float
    scan_interval: int
    scan_efficacy: float
    success_bonus: float
    gcr: float

    def has(self, control: GovernanceControl) -> bool:
        return control in self.controls

    def without(self, *controls: GovernanceControl) -> GovernanceConfig:
        """Copy with some controls switched off (for ablation experiments)."""
        from dataclasses import replace

        return replace(self, controls=self.controls - frozenset(controls))


@dataclass(frozen=True)
class EngineParams:
    """Level-independent mechanics of the simulation loop."""

    tick_stride: int = 50
    orphan_horizon_ticks: int = 20
    max_chain_depth: int = 4
    success_by_difficulty: tuple[float, float, float, float] = (0.97, 0.9, 0.8, 0.65)
    unregistered_success_penalty: float = 0.05
    creep_success_penalty: float = 0.02
    delegation_spawn: tuple[float, float, float, float] = (0.01, 0.03, 0.09, 0.18)
    delegation_continue: float = 0.2
    unsafe_hop_incident_prob: float = 0.3
    unregistered_violation_risk: float = 0.1
    orphan_violation_risk: float = 0.1
    creep_violation_risk: float = 0.004
    incident_invalidation_prob: float = 0.8
    orphan_actions_per_tick: int = 1
    creep_rate: float = 0.006
    iam_creep_block: float = 0.9
    hitl_success_bonus: float = 0.1
    hitl_block_rate: float = 0.5
    ir_capacity: float = 1.3
    ir_efficacy: float = 0.8
    breach_audit_efficacy: float = 0.7
    proliferation_rate: float = 0.003
    predictive_reduction: float = 0.5
    scan_action_divisor: int = 10
    wave_intensity: float = 0.8


@dataclass(frozen=True)
class ScenarioStress:
    delegation_boost: float = 1.0
    adversarial_multiplier: float = 1.0
    optimization_wave: bool = False


@dataclass(frozen=True)
class UnitCosts:
    duplicate_agent: float = 1.0
    shadow_agent: float = 1.0
    creeped_permission: float = 1.0
    incident: float = 1.0
    orphaned_agent: float = 1.0
    lost_task: float = 1.0

    def __post_init__(self) -> None:
        for f in fields(self):
            if getattr(self, f.name) < 0:
                raise ValueError(f"unit cost {f.name} must be >= 0")


NBV_WEIGHTS = {"etcr": 0.30, "si": 0.20, "rir": 0.20, "dsr": 0.15, "gcr": 0.15}


@dataclass(frozen=True)
class Parameters:
    levels: dict[MaturityLevel, GovernanceConfig]
    engine: EngineParams
    scenarios: dict[str, ScenarioStress]
    unit_costs: UnitCosts
    nbv_weights: dict[str, float]
    digest: str
    source: str = field(default="<default>", compare=False)


class ParameterError(ValueError):
    """Raised for a malformed or inconsistent parameter file."""


_LEVEL_KEYS = (
    "shadow_probability",
    "orphan_rate",
    "base_violation_rate",
    "violation_block_rate",
    "hop_safety",
    "scan_interval",
    "scan_efficacy",
    "success_bonus",
    "gcr",
)
_PROBABILITY_KEYS = (
    "shadow_probability", "orphan_rate", "base_violation_rate",
    "violation_block_rate", "hop_safety", "scan_efficacy", "gcr",
)


def _build_engine(raw: dict[str, Any]) -> EngineParams:
    known = {f.name for f in fields(EngineParams)}
    unknown = set(raw) - known
    if unknown:
        raise ParameterError(f"unknown engine keys: {sorted(unknown)}")
    kw = {}
    for k, v in raw.items():
        kw[k] = tuple(float(x) for x in v) if isinstance(v, list) else v
    eng = EngineParams(**kw)
    if len(eng.success_by_difficulty) != 4 or len(eng.delegation_spawn) != 4:
        raise ParameterError("success_by_difficulty and delegation_spawn need 4 entries")
    if eng.tick_stride < 1 or eng.orphan_horizon_ticks < 1 or eng.max_chain_depth < 1:
        raise ParameterError("tick_stride, orphan_horizon_ticks, max_chain_depth must be >= 1")
    return eng


def _build_level(level: MaturityLevel, raw: dict[str, Any]) -> GovernanceConfig:
    missing = [k for k in _LEVEL_KEYS if k not in raw]
    if missing:
        raise ParameterError(f"{level.name}: missing keys {missing}")
    extra = set(raw) - set(_LEVEL_KEYS)
    if extra:
        raise ParameterError(f"{level.name}: unknown keys {sorted(extra)}")
    for k in _PROBABILITY_KEYS:
        v = raw[k]
        if not isinstance(v, (int, float)) or not 0.0 <= v <= 1.0:
            raise ParameterError(f"{level.name}.{k} must be a probability, got {v!r}")
    if int(raw["scan_interval"]) < 0:
        raise ParameterError(f"{level.name}.scan_interval must be >= 0")
    return GovernanceConfig(
        level=level,
        controls=active_controls(level),
        shadow_probability=float(raw["shadow_probability"]),
        orphan_rate=float(raw["orphan_rate"]),
        base_violation_rate=float(raw["base_violation_rate"]),
        violation_block_rate=float(raw["violation_block_rate"]),
        hop_safety=float(raw["hop_safety"]),
        scan_interval=int(raw["scan_interval"]),
        scan_efficacy=float(raw["scan_efficacy"]),
        success_bonus=float(raw["success_bonus"]),
        gcr=float(raw["gcr"]),
    )


def _check_monotone(levels: dict[MaturityLevel, GovernanceConfig], source: str) -> None:
    """More governance must never make the raw rates worse."""
    for lo, hi in zip(LEVELS, LEVELS[1:]):
        a, b = levels[lo], levels[hi]
        for key in ("shadow_probability", "orphan_rate", "base_violation_rate"):
            if getattr(b, key) > getattr(a, key):
                raise ParameterError(f"{source}: {key} rises from {lo.name} to {hi.name}")
        for key in ("hop_safety", "violation_block_rate"):
            if getattr(b, key) < getattr(a, key):
                raise ParameterError(f"{source}: {key} falls from {lo.name} to {hi.name}")


def parse_parameters(text: str, source: str = "<string>") -> Parameters:
    try:
        raw = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ParameterError(f"{source}: not valid YAML: {exc}") from exc
    if not isinstance(raw, dict):
        raise ParameterError(f"{source}: top level must be a mapping")
    for section in ("levels", "engine", "scenarios"):
        if not isinstance(raw.get(section), dict):
            raise ParameterError(f"{source}: missing section {section!r}")

    levels = {}
    for lv in LEVELS:
        entry = raw["levels"].get(lv.name)
        if not isinstance(entry, dict):
            raise ParameterError(f"{source}: levels.{lv.name} missing")
        levels[lv] = _build_level(lv, entry)

    scenarios = {}
    for sid, entry in raw["scenarios"].items():
        entry = entry or {}
        stress = ScenarioStress(
            delegation_boost=float(entry.get("delegation_boost", 1.0)),
            adversarial_multiplier=float(entry.get("adversarial_multiplier", 1.0)),
            optimization_wave=bool(entry.get("optimization_wave", False)),
        )
        if stress.delegation_boost < 1.0 or stress.adversarial_multiplier < 1.0:
            raise ParameterError(f"{source}: scenarios.{sid} multipliers must be >= 1")
        scenarios[str(sid)] = stress

    try:
        unit_costs = UnitCosts(**(raw.get("unit_costs") or {}))
    except TypeError as exc:
        raise ParameterError(f"{source}: unit_costs: {exc}") from exc

    weights = dict(NBV_WEIGHTS)
    weights.update(raw.get("nbv_weights") or {})
    if set(weights) != set(NBV_WEIGHTS):
        raise ParameterError(f"{source}: nbv_weights keys must be {sorted(NBV_WEIGHTS)}")

    _check_monotone(levels, source)

    return Parameters(
        levels=levels,
        engine=_build_engine(raw["engine"]),
        scenarios=scenarios,
        unit_costs=unit_costs,
        nbv_weights={k: float(v) for k, v in weights.items()},
        digest=hashlib.sha256(text.encode("utf-8")).hexdigest(),
        source=source,
    )


def default_parameter_text() -> str:
    return resources.files("govsim").joinpath("params/default.yaml").read_text(encoding="utf-8")


_DEFAULT: Parameters | None = None


def default_parameters() -> Parameters:
    global _DEFAULT
    if _DEFAULT is None:
        _DEFAULT = parse_parameters(default_parameter_text(), source="default.yaml")
    return _DEFAULT


def load_parameters(path: str | Path | None = None) -> Parameters:
    if path is None:
        return default_parameters()
    p = Path(path)
    try:
        text = p.read_text(encoding="utf-8")
    except OSError as exc:
        raise ParameterError(f"cannot read parameter file {p}: {exc}") from exc
    return parse_parameters(text, source=str(p))


def config_for_level(level: MaturityLevel, params: Parameters | None = None) -> GovernanceConfig:
    params = params or default_parameters()
    return params.levels[MaturityLevel(level)]
