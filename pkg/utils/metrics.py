import logging
import math
from dataclasses import dataclass
from typing import List, Optional

import numpy as np
import pandas as pd

from utils.utils import ComputationError, ConfigError

logger = logging.getLogger(__name__)

AGGREGATIONS = ('mean', 'max')
REL_DIFF_MODES = ('window_averaged', 'pooled')


@dataclass(frozen=True)
class WindowStat:
    window: int               # 0-based window number
    t_start: int              # first month of the window
    window_start: str         # calendar month 'YYYY-MM'
    n_passed: int
    n_failed: int
    mean_passed: float
    mean_failed: float
    se_passed: float
    se_failed: float
    rel_diff: Optional[float]
    partial: bool = False     # trailing window shorter than window_months
    degenerate: bool = False  # no rel_diff (no passed or no failed bills, or mean_failed == 0)


@dataclass
class RelDiffSummary:
    mean: float
    se: float
    n_windows: int
    histogram: pd.DataFrame


def standard_error(values):
    """Sample standard deviation (n - 1) over sqrt(n); NaN below two values."""
    values = np.asarray(values, dtype=np.float64)
    if len(values) < 2:
        return float('nan')
    return float(np.std(values, ddof=1) / math.sqrt(len(values)))


def relative_difference(mean_passed, mean_failed):
    if mean_failed is None or not mean_failed > 0 or mean_passed is None or math.isnan(mean_passed):
        return None
    return (mean_passed - mean_failed) / mean_failed


def scores_frame(scores, aggregation):
    if aggregation not in AGGREGATIONS:
        raise ConfigError(f"Unknown aggregation '{aggregation}'")
    return pd.DataFrame({
        't': [s.t for s in scores],
        'score': [s.score_mean if aggregation == 'mean' else s.score_max for s in scores],
        'passed': [bool(s.passed_house) for s in scores],
    })


def window_stats(scores, window_months=4, aggregation='max', month_index=None, horizon=None) -> List[WindowStat]:
    """
    Bucket bill scores into nonoverlapping windows anchored at month 1 and
    compare passed against failed bills in each window.
    """
    if window_months < 1:
        raise ConfigError(f"window_months must be at least 1, got {window_months}")
    if not scores:
        return []

    frame = scores_frame(scores, aggregation)
    horizon = max(int(frame['t'].max()), horizon or 0)
    frame['window'] = (frame['t'] - 1) // window_months
    n_windows = (horizon + window_months - 1) // window_months

    grouped = {key: group['score'].to_numpy() for key, group in frame.groupby(['window', 'passed'])}
    stats = []
    for w in range(n_windows):
        passed = grouped.get((w, True), np.zeros(0))
        failed = grouped.get((w, False), np.zeros(0))
        mean_passed = float(passed.mean()) if len(passed) else float('nan')
        mean_failed = float(failed.mean()) if len(failed) else float('nan')
        rel_diff = relative_difference(mean_passed, mean_failed) if len(passed) and len(failed) else None
        t_start = w * window_months + 1
        stats.append(WindowStat(
            window=w,
            t_start=t_start,
            window_start=month_index.label(t_start) if month_index is not None else str(t_start),
            n_passed=len(passed),
            n_failed=len(failed),
            mean_passed=mean_passed,
            mean_failed=mean_failed,
            se_passed=standard_error(passed),
            se_failed=standard_error(failed),
            rel_diff=rel_diff,
            partial=t_start + window_months - 1 > horizon,
            degenerate=rel_diff is None,
        ))
    n_degenerate = sum(s.degenerate for s in stats)
    if n_degenerate:
        logger.warning("%d of %d window(s) have no relative difference (missing passed or failed bills)",
                       n_degenerate, len(stats))
    return stats


def histogram(values, bin_width=0.05):
    values = np.asarray(values, dtype=np.float64)
    if bin_width <= 0:
        raise ConfigError(f"bin_width must be positive, got {bin_width}")
    # bin k is [k * width, (k + 1) * width); the slack keeps exact multiples out of the bin below
    bins = np.floor(values / bin_width + 1e-9).astype(np.int64)
    first = int(bins.min())
    counts = np.bincount(bins - first)
    edges = np.round(np.arange(first, first + len(counts) + 1) * bin_width, 12)
    return pd.DataFrame({'bin_left': edges[:-1], 'bin_right': edges[1:], 'count': counts})


def relative_difference_distribution(stats: List[WindowStat], bin_width=0.05) -> RelDiffSummary:
    values = [s.rel_diff for s in stats if s.rel_diff is not None]
    if not values:
        raise ComputationError("No window has a defined relative difference")
    return RelDiffSummary(
        mean=float(np.mean(values)),
        se=standard_error(values),
        n_windows=len(values),
        histogram=histogram(values, bin_width),
    )


def pooled_relative_difference(scores, aggregation='max'):
    """
    (mean passed - mean failed) / mean failed over all bills at once; the
    standard error follows the delta method on the ratio of means.
    """
    frame = scores_frame(scores, aggregation)
    passed = frame.loc[frame['passed'], 'score'].to_numpy()
    failed = frame.loc[~frame['passed'], 'score'].to_numpy()
    if not len(passed) or not len(failed):
        raise ComputationError("Pooled relative difference needs both passed and failed bills")
    mean_passed, mean_failed = passed.mean(), failed.mean()
    rel_diff = relative_difference(mean_passed, mean_failed)
    if rel_diff is None:
        raise ComputationError("Pooled relative difference is undefined: failed bills score 0 on average")
    ratio = mean_passed / mean_failed
    se_p, se_f = standard_error(passed), standard_error(failed)
    terms = [(se / m) ** 2 for se, m in ((se_p, mean_passed), (se_f, mean_failed)) if m > 0 and not math.isnan(se)]
    se = abs(ratio) * math.sqrt(sum(terms)) if terms else float('nan')
    return float(rel_diff), float(se)


def window_frame(stats: List[WindowStat]):
    return pd.DataFrame([s.__dict__ for s in stats], columns=list(WindowStat.__dataclass_fields__))
