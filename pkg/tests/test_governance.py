import pytest

from govsim.governance import (
    EngineParams,
    GovernanceControl as C,
    ParameterError,
    active_controls,
    config_for_level,
    default_parameter_text,
    default_parameters,
    domain,
    domain_catalog,
    load_parameters,
    parse_parameters,
)
from govsim.model import LEVELS, MaturityLevel as L, SprawlPattern as SP


def test_fourteen_controls():
    assert len(C) == 14


def test_control_sets():
    assert active_controls(L.L1) == frozenset()
    assert active_controls(L.L2) == {C.Registry, C.IncidentResponse}
    l3 = active_controls(L.L3)
    assert len(l3) == 8 and {C.HITL, C.Audit} <= l3
    assert active_controls(L.L4) == l3 | {C.AutoPolicy, C.SprawlDetection, C.LifecycleManagement}
    assert {C.ContinuousImprovement, C.PredictiveSprawl, C.GovernanceAsCode} <= active_controls(L.L5)


def test_control_sets_strictly_nested():
    for lo, hi in zip(LEVELS, LEVELS[1:]):
        assert active_controls(lo) < active_controls(hi)


def test_endpoint_configs():
    l1, l5 = config_for_level(L.L1), config_for_level(L.L5)
    assert (l1.shadow_probability, l1.orphan_rate, l1.gcr) == (0.35, 0.15, 0.020)
    assert l1.controls == frozenset()
    assert (l5.shadow_probability, l5.orphan_rate, l5.gcr) == (0.02, 0.01, 0.160)


def test_gcr_sequence():
    gcr = [config_for_level(lv).gcr for lv in LEVELS]
    assert gcr == [0.020, 0.060, 0.120, 0.180, 0.160]
    assert max(gcr) == gcr[3]


def test_parameter_monotonicity():
    cfgs = [config_for_level(lv) for lv in LEVELS]
    for a, b in zip(cfgs, cfgs[1:]):
        assert b.shadow_probability <= a.shadow_probability
        assert b.orphan_rate <= a.orphan_rate
        assert b.base_violation_rate <= a.base_violation_rate
        assert b.hop_safety >= a.hop_safety
        assert b.violation_block_rate >= a.violation_block_rate


def test_scans_only_from_l4():
    assert [config_for_level(lv).scan_interval > 0 for lv in LEVELS] == [False, False, False, True, True]


def test_domain_catalog():
    cat = domain_catalog()
    assert [d.id for d in cat] == [f"GD-{i:02d}" for i in range(1, 13)]
    gd7 = domain("GD-07")
    assert gd7.name == "Sprawl Containment"
    assert gd7.sprawl_patterns == {SP.SP01_FunctionalDuplication, SP.SP02_ShadowAgent}
    gd2 = domain("GD-02")
    assert "GOV 1.5" in gd2.nist_refs and gd2.sprawl_patterns == {SP.SP04_PermissionCreep}
    assert {d.id for d in cat if d.covers_all_patterns} == {"GD-04", "GD-08", "GD-11", "GD-12"}
    with pytest.raises(KeyError):
        domain("GD-13")


def test_without_removes_controls():
    cfg = config_for_level(L.L4).without(C.SprawlDetection)
    assert C.SprawlDetection not in cfg.controls
    assert C.AutoPolicy in cfg.controls


def test_engine_defaults_match_shipped_file():
    assert default_parameters().engine == EngineParams()


def test_digest_tracks_text():
    text = default_parameter_text()
    a = parse_parameters(text)
    b = parse_parameters(text + "\n# comment\n")
    assert a.digest == default_parameters().digest
    assert a.digest != b.digest


def test_load_from_path(tmp_path):
    p = tmp_path / "p.yaml"
    p.write_text(default_parameter_text().replace("tick_stride: 50", "tick_stride: 25"))
    assert load_parameters(p).engine.tick_stride == 25


@pytest.mark.parametrize("old,new,match", [
    ("shadow_probability: 0.35", "shadow_probability: 1.35", "probability"),
    ("tick_stride: 50", "tick_strde: 50", "unknown engine keys"),
    ("gcr: 0.020}", "}", "missing keys"),
    ("hop_safety: 0.992", "hop_safety: 0.5", "hop_safety falls"),
    ("S4: {adversarial_multiplier: 9.0}", "S4: {adversarial_multiplier: 0.5}", "multipliers"),
])
def test_rejects_bad_files(old, new, match):
    text = default_parameter_text()
    assert old in text
    with pytest.raises(ParameterError, match=match):
        parse_parameters(text.replace(old, new, 1))


def test_rejects_unreadable_and_malformed(tmp_path):
    with pytest.raises(ParameterError):
        load_parameters(tmp_path / "missing.yaml")
    with pytest.raises(ParameterError):
        parse_parameters("levels: [1, 2")
    with pytest.raises(ParameterError):
        parse_parameters("- just a list\n")
