"""
Half-life sweep: tensors -> influence / centralities -> bill scores -> window
statistics, for every (half_life, aggregation, measure) configuration.

The decayed tensors of a half-life are streamed once and shared by all
measures; the monthly co-occurrence counts are shared by all half-lives.
"""
import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

import numpy as np
import pandas as pd
from tqdm import tqdm

from data.ingest import Chamber
from models.centrality import (DEFAULT_MAX_ITER, DEFAULT_TOL, MEASURES as CENTRALITY_MEASURES,
                               CentralitySeries, centrality_bill_scores, centrality_month)
from models.influence import (InfluenceSeries, PartyColumns, PartyInfluence, bill_scores,
                              party_influence_at)
from models.tempnet import DecayRate, LegislatorIndex, build_monthly, iter_decayed
from utils.metrics import (AGGREGATIONS, REL_DIFF_MODES, RelDiffSummary, WindowStat,
                           pooled_relative_difference, relative_difference_distribution, window_stats)
from utils.utils import ComputationError, ConfigError

logger = logging.getLogger(__name__)

MEASURES = ('influence',) + CENTRALITY_MEASURES


@dataclass
class SweepSettings:
    measures: Tuple[str, ...] = MEASURES
    aggregations: Tuple[str, ...] = AGGREGATIONS
    window_months: int = 4
    rel_diff_mode: str = 'window_averaged'
    closeness_distance: str = 'reciprocal'
    congress_reset: bool = False
    chamber: Chamber = Chamber.HOUSE
    tol: float = DEFAULT_TOL
    max_iter: int = DEFAULT_MAX_ITER
    bin_width: float = 0.05

    def validate(self):
        unknown = [m for m in self.measures if m not in MEASURES]
        if unknown or not self.measures:
            raise ConfigError(f"measures must be a nonempty subset of {MEASURES}, got {self.measures}")
        unknown = [a for a in self.aggregations if a not in AGGREGATIONS]
        if unknown or not self.aggregations:
            raise ConfigError(f"aggregations must be a nonempty subset of {AGGREGATIONS}, got {self.aggregations}")
        if self.rel_diff_mode not in REL_DIFF_MODES:
            raise ConfigError(f"rel_diff_mode must be one of {REL_DIFF_MODES}")
        if self.window_months < 1:
            raise ConfigError("window_months must be at least 1")
        return self


@dataclass
class ConfigResult:
    half_life: float
    aggregation: str
    measure: str
    stats: List[WindowStat]
    distribution: Optional[RelDiffSummary]
    mean_rel_diff: float
    se: float

    @property
    def label(self):
        return f"{self.measure}/{self.aggregation}/hl{self.half_life:g}"


@dataclass
class HalfLifeRun:
    half_life: float
    results: Dict[Tuple[str, str], ConfigResult]
    party: Optional[PartyInfluence] = None
    centrality: Optional[CentralitySeries] = None
    scores: Dict[str, list] = field(default_factory=dict)


@dataclass
class SweepResult:
    runs: Dict[float, HalfLifeRun]

    def __len__(self):
        return sum(len(run.results) for run in self.runs.values())

    def configurations(self):
        for half_life in sorted(self.runs):
            run = self.runs[half_life]
            for key in sorted(run.results, key=lambda k: (MEASURES.index(k[1]), AGGREGATIONS.index(k[0]))):
                yield run.results[key]

    def get(self, half_life, aggregation, measure):
        return self.runs[half_life].results[(aggregation, measure)]

    def summary_frame(self):
        return pd.DataFrame(
            [(r.measure, r.aggregation, r.half_life, r.mean_rel_diff, r.se) for r in self.configurations()],
            columns=['measure', 'aggregation', 'half_life', 'mean_rel_diff', 'se'],
        )


def _summarize(stats, scores, half_life, aggregation, measure, settings):
    label = f"[{measure}/{aggregation}/hl{half_life:g}]"
    try:
        defined = any(s.rel_diff is not None for s in stats)
        distribution = relative_difference_distribution(stats, settings.bin_width) if defined else None
        if settings.rel_diff_mode == 'pooled':
            mean_rel_diff, se = pooled_relative_difference(scores, aggregation)
        elif distribution is None:
            raise ComputationError("No window has a defined relative difference")
        else:
            mean_rel_diff, se = distribution.mean, distribution.se
    except ComputationError as e:
        raise ComputationError(f"{label} {e}") from e
    return ConfigResult(half_life, aggregation, measure, stats, distribution, mean_rel_diff, se)


def run_half_life(bills, roster, month_index, horizon, monthly, half_life, settings: SweepSettings,
                  keep_series=False) -> HalfLifeRun:
    """
    One pass over the decayed tensors at `half_life`.

    Each month's (C_pass, C_tot) is consumed as soon as it is produced: party
    influence and the centrality baselines are filled in place, then every
    requested measure scores the bills and each (aggregation, measure) pair is
    summarized over the analysis windows. The series themselves are dropped
    unless keep_series is set.
    """
    monthly_pass, monthly_tot = monthly
    index = monthly_tot[0].index
    rate = DecayRate(half_life)
    congress_of = month_index.congress_of if settings.congress_reset else None
    centrality_measures = tuple(m for m in settings.measures if m != 'influence')
    columns = PartyColumns(roster, index, settings.chamber)

    size = len(index)
    p_dems = np.zeros((horizon, size))
    p_reps = np.zeros((horizon, size))
    n_dems = np.zeros(horizon, dtype=np.int64)
    n_reps = np.zeros(horizon, dtype=np.int64)
    centrality = {m: np.zeros((horizon, size)) for m in centrality_measures}

    stream = iter_decayed(monthly_pass, monthly_tot, rate, congress_of=congress_of)
    for t, c_pass, c_tot in tqdm(stream, total=horizon, desc=f"Half-life {half_life:g}", leave=False):
        if 'influence' in settings.measures:
            p_dems[t - 1], p_reps[t - 1], n_dems[t - 1], n_reps[t - 1] = party_influence_at(
                c_pass, c_tot, t, columns, month_index)
        if centrality_measures:
            month = centrality_month(c_pass, c_tot, t, index.ids, centrality_measures, settings.closeness_distance,
                                     settings.tol, settings.max_iter,
                                     label=f"month {month_index.label(t)}, half-life {half_life:g}")
            for measure, vector in month.items():
                centrality[measure][t - 1] = vector

    party = PartyInfluence(index.ids, p_dems, p_reps, n_dems, n_reps)
    series = CentralitySeries(index.ids, centrality)
    scores = {}
    for measure in settings.measures:
        if measure == 'influence':
            scores[measure] = bill_scores(bills, InfluenceSeries(index.ids, p_dems + p_reps), month_index)
        else:
            scores[measure] = centrality_bill_scores(bills, series, measure, month_index)

    results = {}
    for measure in settings.measures:
        for aggregation in settings.aggregations:
            stats = window_stats(scores[measure], settings.window_months, aggregation, month_index, horizon)
            results[(aggregation, measure)] = _summarize(stats, scores[measure], half_life, aggregation,
                                                         measure, settings)
            logger.info("%s: mean relative difference %.4f (se %.4f)",
                        results[(aggregation, measure)].label, results[(aggregation, measure)].mean_rel_diff,
                        results[(aggregation, measure)].se)

    if not keep_series:
        return HalfLifeRun(half_life, results)
    return HalfLifeRun(half_life, results, party=party, centrality=series, scores=scores)


def legislator_index(bills, roster):
    return LegislatorIndex(set(roster.canonical_ids) | {p for b in bills for p in b.participants})


def half_life_sweep(bills, roster, month_index, half_lives, settings: Optional[SweepSettings] = None,
                    horizon=None, jobs=1, keep_series=False) -> SweepResult:
    settings = (settings or SweepSettings()).validate()
    half_lives = [float(h) for h in half_lives]
    if not half_lives:
        raise ConfigError("half_lives must be nonempty")
    for h in half_lives:
        DecayRate(h)
    if not bills:
        raise ComputationError("No bills to analyze")
    horizon = horizon or month_index.horizon(bills)

    monthly = build_monthly(bills, horizon, month_index, legislator_index(bills, roster))
    logger.info("Built monthly co-occurrence for %d bills over %d months", len(bills), horizon)

    args = [(bills, roster, month_index, horizon, monthly, h, settings, keep_series) for h in half_lives]
    if jobs > 1 and len(half_lives) > 1:
        with ProcessPoolExecutor(max_workers=min(jobs, len(half_lives))) as pool:
            runs = list(pool.map(run_half_life, *zip(*args)))
    else:
        runs = [run_half_life(*a) for a in tqdm(args, desc="Half-lives")]
    return SweepResult({run.half_life: run for run in runs})
