"""The scenario x level x replicate grid and its aggregates (level summaries,
pairwise NBV tests, scenario matrix)."""
from __future__ import annotations

import itertools
from collections.abc import Iterable, Sequence
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

from .engine import RunRecord, run_simulation
from .governance import Parameters, config_for_level, default_parameters
from .metrics import MetricsBundle, compute_metrics
from .model import LEVELS, MaturityLevel
from .rng import derive_run_seed
from .scenarios import SCENARIO_IDS, ScenarioSpec, all_scenarios, scenario_preset
from .stats import SampleSummary, TestResult, compare, summarize

__all__ = [
    "ScenarioSpec",
    "scenario_preset",
    "GridEntry",
    "GridResult",
    "LevelSummary",
    "Comparison",
    "ScenarioMatrix",
    "run_grid",
    "aggregate_levels",
    "pairwise_nbv",
    "scenario_matrix",
    "PUBLISHED_PAIRS",
]

Key = tuple[str, MaturityLevel, int]


@dataclass(frozen=True)
class GridEntry:
    record: RunRecord
    metrics: MetricsBundle

    @property
    def key(self) -> Key:
        r = self.record
        return (r.scenario_id, MaturityLevel(r.level), r.replicate)


class GridResult:
    """Completed runs, always held in (scenario, level, replicate) order."""

    def __init__(self, entries: Iterable[GridEntry]) -> None:
        entries = sorted(entries, key=_sort_key)
        keys = [e.key for e in entries]
        if len(set(keys)) != len(keys):
            dup = next(k for k, n in _counts(keys).items() if n > 1)
            raise ValueError(f"duplicate grid key {dup}")
        self.entries: list[GridEntry] = entries

    def __len__(self) -> int:
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)

    @property
    def levels(self) -> list[MaturityLevel]:
        return sorted({e.key[1] for e in self.entries})

    @property
    def scenarios(self) -> list[str]:
        return sorted({e.key[0] for e in self.entries}, key=_scenario_order)

    def where(self, *, levels: Iterable[MaturityLevel] | None = None,
              scenarios: Iterable[str] | None = None) -> GridResult:
        lv = None if levels is None else {MaturityLevel(x) for x in levels}
        sc = None if scenarios is None else set(scenarios)
        return GridResult(
            e for e in self.entries
            if (lv is None or e.key[1] in lv) and (sc is None or e.key[0] in sc)
        )

    def nbv_by_level(self) -> dict[MaturityLevel, list[float]]:
        out: dict[MaturityLevel, list[float]] = {}
        for e in self.entries:
            out.setdefault(e.key[1], []).append(e.metrics.nbv)
        return out


def _scenario_order(sid: str) -> tuple[int, str]:
    return (SCENARIO_IDS.index(sid), sid) if sid in SCENARIO_IDS else (len(SCENARIO_IDS), sid)


def _sort_key(e: GridEntry) -> tuple:
    sid, level, rep = e.key
    return (_scenario_order(sid), int(level), rep)


def _counts(keys: Sequence[Key]) -> dict[Key, int]:
    out: dict[Key, int] = {}
    for k in keys:
        out[k] = out.get(k, 0) + 1
    return out


def _run_one(job: tuple[ScenarioSpec, MaturityLevel, int, int, Parameters]) -> GridEntry:
    scenario, level, replicate, base_seed, params = job
    config = config_for_level(level, params)
    seed = derive_run_seed(base_seed, scenario.index, level.index, replicate)
    record = run_simulation(scenario, config, seed, params.engine, replicate)
    return GridEntry(record, compute_metrics(record, config, params.nbv_weights))


def run_grid(
    base_seed: int = 42,
    replicates: int = 30,
    params: Parameters | None = None,
    parallel: int = 1,
    scenarios: Sequence[str] | None = None,
    levels: Sequence[MaturityLevel] | None = None,
) -> GridResult:
    """Run every (scenario, level, replicate) cell.

    Each run's seed depends only on its own coordinates, so the result is the
    same for any ``parallel`` setting.
    """
    if replicates < 1:
        raise ValueError("replicates must be >= 1")
    if parallel < 1:
        raise ValueError("parallel must be >= 1")
    params = params or default_parameters()
    specs = all_scenarios(params) if scenarios is None else [scenario_preset(s, params) for s in scenarios]
    lvls = LEVELS if levels is None else tuple(MaturityLevel(x) for x in levels)
    jobs = [
        (spec, lv, r, base_seed, params)
        for spec, lv, r in itertools.product(specs, lvls, range(replicates))
    ]
    if parallel == 1:
        entries = [_run_one(j) for j in jobs]
    else:
        with ProcessPoolExecutor(max_workers=parallel) as pool:
            entries = list(pool.map(_run_one, jobs, chunksize=max(1, len(jobs) // (4 * parallel))))
    return GridResult(entries)


@dataclass(frozen=True)
class LevelSummary:
    level: MaturityLevel
    si: SampleSummary
    rir: SampleSummary
    etcr: SampleSummary
    dsr: SampleSummary
    nbv: SampleSummary
    gcr: float

    @property
    def n(self) -> int:
        return self.nbv.n


SUMMARY_METRICS = ("si", "rir", "etcr", "dsr", "nbv")


def aggregate_levels(grid: GridResult) -> list[LevelSummary]:
    """Pool all scenarios and replicates per level."""
    if not len(grid):
        raise ValueError("grid is empty")
    out = []
    for level in grid.levels:
        ms = [e.metrics for e in grid if e.key[1] == level]
        gcrs = {m.gcr for m in ms}
        if len(gcrs) != 1:
            raise ValueError(f"{level.name}: runs disagree on gcr {sorted(gcrs)}")
        out.append(LevelSummary(
            level,
            *(summarize([getattr(m, name) for m in ms]) for name in SUMMARY_METRICS),
            gcr=gcrs.pop(),
        ))
    return out


# Pairs shown in the published comparison table, in its order; the two
# remaining pairs follow as extra rows.
PUBLISHED_PAIRS = (
    (1, 2), (1, 3), (1, 4), (1, 5), (2, 3), (3, 4), (3, 5), (4, 5),
)
_EXTRA_PAIRS = ((2, 4), (2, 5))


@dataclass(frozen=True)
class Comparison:
    level_a: MaturityLevel
    level_b: MaturityLevel
    delta_nbv: float
    result: TestResult

    @property
    def published(self) -> bool:
        return (int(self.level_a), int(self.level_b)) in PUBLISHED_PAIRS

    @property
    def name(self) -> str:
        return f"{self.level_a.name} vs {self.level_b.name}"


def _pair_rank(a: MaturityLevel, b: MaturityLevel) -> int:
    order = PUBLISHED_PAIRS + _EXTRA_PAIRS
    return order.index((int(a), int(b)))


def pairwise_nbv(grid: GridResult) -> list[Comparison]:
    """Welch test and Cohen's d on per-run NBV for every pair of levels.

    Signs follow the "higher level minus lower level" convention, so a
    governance gain shows as positive delta, t and d.
    """
    by_level = grid.nbv_by_level()
    levels = sorted(by_level)
    if len(levels) < 2:
        raise ValueError("nothing to compare: the grid holds fewer than two levels")
    out = []
    for a, b in itertools.combinations(levels, 2):
        xa, xb = by_level[a], by_level[b]
        res = compare(xb, xa)
        delta = sum(xb) / len(xb) - sum(xa) / len(xa)
        out.append(Comparison(a, b, delta, res))
    out.sort(key=lambda c: _pair_rank(c.level_a, c.level_b))
    return out


@dataclass(frozen=True)
class ScenarioMatrix:
    scenarios: tuple[str, ...]
    levels: tuple[MaturityLevel, ...]
    values: tuple[tuple[float, ...], ...]  # rows = scenarios, columns = levels

    def cell(self, scenario: str, level: MaturityLevel) -> float:
        return self.values[self.scenarios.index(scenario)][self.levels.index(MaturityLevel(level))]

    def column(self, level: MaturityLevel) -> dict[str, float]:
        j = self.levels.index(MaturityLevel(level))
        return {s: row[j] for s, row in zip(self.scenarios, self.values)}


def scenario_matrix(
    grid: GridResult,
    scenarios: Sequence[str] = SCENARIO_IDS,
    levels: Sequence[MaturityLevel] = LEVELS,
) -> ScenarioMatrix:
    """Mean NBV per (scenario, level) cell."""
    cells: dict[tuple[str, MaturityLevel], list[float]] = {}
    for e in grid:
        sid, lv, _ = e.key
        cells.setdefault((sid, lv), []).append(e.metrics.nbv)
    rows = []
    for s in scenarios:
        row = []
        for lv in levels:
            vals = cells.get((s, MaturityLevel(lv)))
            if not vals:
                raise ValueError(f"scenario matrix is missing cell ({s}, {MaturityLevel(lv).name})")
            row.append(sum(vals) / len(vals))
        rows.append(tuple(row))
    return ScenarioMatrix(tuple(scenarios), tuple(MaturityLevel(x) for x in levels), tuple(rows))
