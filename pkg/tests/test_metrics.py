import pytest
from hypothesis import given, strategies as st

from govsim.engine import RunRecord
from govsim.governance import NBV_WEIGHTS, config_for_level
from govsim.metrics import MetricsBundle, compute_metrics, nbv, nbv_of
from govsim.model import MaturityLevel as L

# (si, rir, etcr, dsr, gcr, nbv) per level, as published
TABLE = {
    L.L1: (0.520, 59.08, 0.699, 0.602, 0.020, 0.625),
    L.L2: (0.378, 40.26, 0.729, 0.600, 0.060, 0.694),
    L.L3: (0.254, 13.42, 0.863, 0.902, 0.120, 0.849),
    L.L4: (0.065, 3.45, 0.890, 0.934, 0.180, 0.910),
    L.L5: (0.028, 2.05, 0.930, 0.992, 0.160, 0.944),
}


def test_weights_sum_to_one():
    assert sum(NBV_WEIGHTS.values()) == pytest.approx(1.0, abs=1e-15)


@pytest.mark.parametrize("level", list(TABLE))
def test_published_rows_round_trip(level):
    *inputs, expected = TABLE[level]
    assert abs(nbv(*inputs) - expected) <= 0.002


def test_hand_values():
    assert nbv(0.520, 59.08, 0.699, 0.602, 0.020) == pytest.approx(0.62484, abs=1e-9)
    assert nbv(0.028, 2.05, 0.930, 0.992, 0.160) == pytest.approx(0.94410, abs=1e-9)
    assert nbv(0, 0, 1, 1, 0) == pytest.approx(1.0)


def test_rir_term_clamped():
    assert nbv(0.5, 150.0, 0.7, 0.6, 0.02) == nbv(0.5, 100.0, 0.7, 0.6, 0.02)


unit = st.floats(0, 1)
rir = st.floats(0, 99)
step = st.floats(1e-6, 1e-2)


@given(unit, rir, unit, unit, unit, step)
def test_partial_monotonicity(si, r, etcr, dsr, gcr, h):
    base = nbv(si, r, etcr, dsr, gcr)
    assert nbv(si, r, etcr + h, dsr, gcr) > base
    assert nbv(si, r, etcr, dsr + h, gcr) > base
    assert nbv(si + h, r, etcr, dsr, gcr) < base
    assert nbv(si, r + h, etcr, dsr, gcr) < base
    assert nbv(si, r, etcr, dsr, gcr + h) < base


@given(unit, st.floats(0, 500), unit, unit, unit)
def test_nbv_in_unit_interval(si, r, etcr, dsr, gcr):
    assert -1e-12 <= nbv(si, r, etcr, dsr, gcr) <= 1 + 1e-12


def record(**kw):
    base = dict(scenario_id="S1", level=L.L1, replicate=0, seed=0, agents_total=30,
                tasks_total=1000, tasks_completed=950, tasks_effective=930,
                actions_total=2000, incidents_total=10, hops_total=0, hops_safe=0)
    base.update(kw)
    return RunRecord(**base)


def test_compute_metrics_hand():
    m = compute_metrics(record(agents_flagged=6), config_for_level(L.L5))
    assert m.rir == 5.0
    assert m.etcr == 0.930
    assert m.dsr == 1.0
    assert m.si == 0.2
    assert m.gcr == 0.160
    assert abs(m.nbv - nbv_of(m)) < 1e-12


def test_compute_metrics_gcr_only():
    m = compute_metrics(record(hops_total=10, hops_safe=6), 0.06)
    assert m.dsr == 0.6 and m.gcr == 0.06


@pytest.mark.parametrize("kw", [dict(tasks_total=0, tasks_completed=0, tasks_effective=0), dict(actions_total=0), dict(agents_total=0)])
def test_compute_metrics_rejects_empty(kw):
    with pytest.raises(ValueError):
        compute_metrics(record(**kw), 0.02)


def test_bundle_nbv_consistent():
    b = MetricsBundle(0.3, 20.0, 0.8, 0.9, 0.12, nbv(0.3, 20.0, 0.8, 0.9, 0.12))
    assert abs(nbv_of(b) - b.nbv) < 1e-12
