import pytest

from govsim.experiments import (
    PUBLISHED_PAIRS,
    GridResult,
    aggregate_levels,
    pairwise_nbv,
    run_grid,
    scenario_matrix,
)
from govsim.model import MaturityLevel as L
from govsim.scenarios import SCENARIO_IDS


@pytest.fixture(scope="module")
def small_grid():
    return run_grid(base_seed=5, replicates=2)


def test_grid_sizes(small_grid, default_grid):
    assert len(run_grid(base_seed=5, replicates=1)) == 25
    assert len(small_grid) == 50
    assert len(default_grid) == 750
    assert small_grid.levels == list(L)
    assert small_grid.scenarios == list(SCENARIO_IDS)


def test_grid_order_and_seeds_unique(default_grid):
    keys = [e.key for e in default_grid]
    assert keys == sorted(keys, key=lambda k: (SCENARIO_IDS.index(k[0]), int(k[1]), k[2]))
    assert len({e.record.seed for e in default_grid}) == 750


def test_parallel_matches_sequential(small_grid):
    par = run_grid(base_seed=5, replicates=2, parallel=2)
    assert [e.record for e in par] == [e.record for e in small_grid]
    assert [e.metrics for e in par] == [e.metrics for e in small_grid]


def test_subset_runs_match_full_grid(small_grid):
    sub = run_grid(base_seed=5, replicates=2, scenarios=["S3"], levels=[L.L4])
    assert [e.record for e in sub] == [e.record for e in small_grid.where(scenarios=["S3"], levels=[L.L4])]


def test_duplicate_keys_rejected(small_grid):
    with pytest.raises(ValueError, match="duplicate"):
        GridResult(list(small_grid) + [small_grid.entries[0]])


@pytest.mark.parametrize("kw", [dict(replicates=0), dict(parallel=0)])
def test_run_grid_rejects(kw):
    with pytest.raises(ValueError):
        run_grid(**{"replicates": 1, **kw})


def test_unknown_scenario():
    with pytest.raises(ValueError, match="unknown scenario"):
        run_grid(replicates=1, scenarios=["S9"])


def test_aggregate_pools_scenarios(small_grid):
    summaries = aggregate_levels(small_grid)
    assert [s.level for s in summaries] == list(L)
    assert all(s.n == 10 for s in summaries)
    l3 = [e.metrics.nbv for e in small_grid.where(levels=[L.L3])]
    assert summaries[2].nbv.mean == pytest.approx(sum(l3) / len(l3), abs=1e-12)
    assert [s.gcr for s in summaries] == [0.02, 0.06, 0.12, 0.18, 0.16]


def test_pairwise_order_and_signs(default_grid):
    comps = pairwise_nbv(default_grid)
    assert len(comps) == 10
    assert [(int(c.level_a), int(c.level_b)) for c in comps[:8]] == list(PUBLISHED_PAIRS)
    assert all(c.published for c in comps[:8]) and not any(c.published for c in comps[8:])
    assert comps[0].name == "L1 vs L2"
    for c in comps:
        assert c.delta_nbv > 0 and c.result.t > 0 and c.result.d > 0


def test_pairwise_needs_two_levels(small_grid):
    with pytest.raises(ValueError, match="nothing to compare"):
        pairwise_nbv(small_grid.where(levels=[L.L2]))


def test_matrix_cells(small_grid):
    m = scenario_matrix(small_grid)
    vals = [e.metrics.nbv for e in small_grid.where(scenarios=["S4"], levels=[L.L2])]
    assert m.cell("S4", L.L2) == pytest.approx(sum(vals) / 2, abs=1e-15)
    assert list(m.column(L.L5)) == list(SCENARIO_IDS)


def test_matrix_missing_cell(small_grid):
    with pytest.raises(ValueError, match="missing cell"):
        scenario_matrix(small_grid.where(levels=[L.L1, L.L2]))
