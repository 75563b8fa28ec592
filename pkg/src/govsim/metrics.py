"""Outcome metrics of a run and the composite Net Business Value."""
from __future__ import annotations

from dataclasses import dataclass

from .governance import NBV_WEIGHTS, GovernanceConfig


@dataclass(frozen=True)
class MetricsBundle:
    si: float
    rir: float
    etcr: float
    dsr: float
    gcr: float
    nbv: float
    chain_dsr: float = 1.0  # auxiliary; not an NBV input


def nbv(si: float, rir: float, etcr: float, dsr: float, gcr: float,
        weights: dict[str, float] | None = None) -> float:
    """Weighted composite; the risk term is clamped at zero once rir exceeds 100."""
    w = weights or NBV_WEIGHTS
    risk_term = max(0.0, 1.0 - rir / 100.0)
    return (
        w["etcr"] * etcr
        + w["si"] * (1.0 - si)
        + w["rir"] * risk_term
        + w["dsr"] * dsr
        + w["gcr"] * (1.0 - gcr)
    )


def nbv_of(bundle: MetricsBundle, weights: dict[str, float] | None = None) -> float:
    return nbv(bundle.si, bundle.rir, bundle.etcr, bundle.dsr, bundle.gcr, weights)


def compute_metrics(record, config: GovernanceConfig | float,
                    weights: dict[str, float] | None = None) -> MetricsBundle:
    """Derive the metric bundle of one :class:`~govsim.engine.RunRecord`.

    ``config`` may be the run's :class:`GovernanceConfig` or just its GCR.
    """
    if record.tasks_total < 1:
        raise ValueError("record has no tasks")
    if record.actions_total < 1:
        raise ValueError("record has no actions")
    if record.agents_total < 1:
        raise ValueError("record has no agents")
    gcr = config if isinstance(config, float) else config.gcr
    si = record.agents_flagged / record.agents_total
    rir = 1000.0 * record.incidents_total / record.actions_total
    etcr = record.tasks_effective / record.tasks_total
    dsr = record.hops_safe / record.hops_total if record.hops_total else 1.0
    chain_dsr = record.chains_safe / record.chains_total if record.chains_total else 1.0
    return MetricsBundle(si, rir, etcr, dsr, gcr, nbv(si, rir, etcr, dsr, gcr, weights), chain_dsr)
