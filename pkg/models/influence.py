"""
Party-normalized legislator influence and bill-level scores.

For legislator i at month t:
    P_dems[t, i] = (1 / N_dems) * sum_d C_pass[t, i, d] / sum_d C_tot[t, i, d]
    P_reps[t, i] = (1 / N_reps) * sum_r C_pass[t, i, r] / sum_r C_tot[t, i, r]
    I[t, i]      = P_dems[t, i] + P_reps[t, i]
A party sum with zero denominator gives P = 0.
"""
import logging
from dataclasses import dataclass
from typing import Dict, Iterable, List, Tuple

import numpy as np
import pandas as pd

from data.ingest import Chamber, Party
from utils.utils import ConfigError

logger = logging.getLogger(__name__)


@dataclass
class PartyInfluence:
    ids: Tuple[str, ...]
    p_dems: np.ndarray   # shape (months, legislators)
    p_reps: np.ndarray
    n_dems: np.ndarray   # shape (months,)
    n_reps: np.ndarray


@dataclass
class InfluenceSeries:
    ids: Tuple[str, ...]
    values: np.ndarray   # shape (months, legislators)

    def __post_init__(self):
        self._position = {legislator: i for i, legislator in enumerate(self.ids)}

    @property
    def horizon(self):
        return self.values.shape[0]

    def value(self, t, legislator):
        """I[t, legislator]; legislators absent from the series score 0."""
        position = self._position.get(legislator)
        if position is None or not 1 <= t <= self.horizon:
            return 0.0
        return float(self.values[t - 1, position])


@dataclass(frozen=True)
class BillScore:
    bill_id: str
    t: int
    score_mean: float
    score_max: float
    n_cosponsors: int
    passed_house: bool


class PartyColumns:
    """Party masks and House party sizes per Congress, cached."""

    def __init__(self, roster, index, chamber=Chamber.HOUSE):
        self.roster = roster
        self.index = index
        self.chamber = chamber
        self.covered = set(roster.congresses)
        self._cache: Dict[int, Tuple[np.ndarray, np.ndarray, int, int]] = {}

    def congress_at(self, t, month_index):
        # a January that opens a Congress falls back to the outgoing roster
        for congress in month_index.congresses_of(t):
            if congress in self.covered:
                return congress
        raise ConfigError(f"Month {month_index.label(t)} (Congress {month_index.congress_of(t)}) "
                          f"is outside roster coverage")

    def __call__(self, congress):
        if congress not in self._cache:
            n_dems, n_reps = self.roster.party_sizes(congress, self.chamber)
            if n_dems == 0 or n_reps == 0:
                raise ConfigError(
                    f"Roster has no {self.chamber.value} Democrats or Republicans for Congress {congress}")
            parties = [self.roster.party_at(legislator, congress) for legislator in self.index.ids]
            dem_mask = np.array([p is Party.DEMOCRAT for p in parties], dtype=np.float64)
            rep_mask = np.array([p is Party.REPUBLICAN for p in parties], dtype=np.float64)
            self._cache[congress] = (dem_mask, rep_mask, n_dems, n_reps)
        return self._cache[congress]


def _ratio(numerator, denominator):
    out = np.zeros_like(denominator)
    np.divide(numerator, denominator, out=out, where=denominator > 0)
    return out


def party_influence_month(c_pass, c_tot, dem_mask, rep_mask, n_dems, n_reps):
    p_dems = _ratio(c_pass @ dem_mask, c_tot @ dem_mask) / n_dems
    p_reps = _ratio(c_pass @ rep_mask, c_tot @ rep_mask) / n_reps
    return p_dems, p_reps


def party_influence_at(c_pass, c_tot, t, columns: PartyColumns, month_index):
    """(P_dems, P_reps, N_dems, N_reps) at month t against that month's roster."""
    dem_mask, rep_mask, n_d, n_r = columns(columns.congress_at(t, month_index))
    p_dems, p_reps = party_influence_month(c_pass, c_tot, dem_mask, rep_mask, n_d, n_r)
    return p_dems, p_reps, n_d, n_r


def party_influence(tensor, roster, month_index, chamber=Chamber.HOUSE) -> PartyInfluence:
    columns = PartyColumns(roster, tensor.index, chamber)
    horizon = tensor.horizon
    size = len(tensor.index)
    p_dems = np.zeros((horizon, size))
    p_reps = np.zeros((horizon, size))
    n_dems = np.zeros(horizon, dtype=np.int64)
    n_reps = np.zeros(horizon, dtype=np.int64)
    for t in range(1, horizon + 1):
        c_pass, c_tot = tensor.at(t)
        p_dems[t - 1], p_reps[t - 1], n_dems[t - 1], n_reps[t - 1] = party_influence_at(
            c_pass, c_tot, t, columns, month_index)
    return PartyInfluence(tensor.index.ids, p_dems, p_reps, n_dems, n_reps)


def combine(p: PartyInfluence) -> InfluenceSeries:
    return InfluenceSeries(p.ids, p.p_dems + p.p_reps)


def score_bills(bills, month_index, lookup) -> List[BillScore]:
    """Mean and max of lookup(t, legislator) over each bill's participants."""
    scores = []
    skipped = 0
    for bill in bills:
        participants = sorted(bill.participants)
        if not participants:
            skipped += 1
            continue
        t = month_index.t_of(bill.introduced_date)
        values = np.array([lookup(t, legislator) for legislator in participants], dtype=np.float64)
        top = float(values.max())
        # rounding in the mean must not push it past the max
        mean = top if values.min() == top else min(float(values.mean()), top)
        scores.append(BillScore(
            bill_id=bill.bill_id,
            t=t,
            score_mean=mean,
            score_max=top,
            n_cosponsors=len(participants),
            passed_house=bill.passed_house,
        ))
    if skipped:
        logger.warning("Skipped %d bill(s) with no participants", skipped)
    return scores


def bill_scores(bills, inf: InfluenceSeries, month_index) -> List[BillScore]:
    return score_bills(bills, month_index, inf.value)


def influence_frame(p: PartyInfluence, month_index=None):
    horizon, size = p.p_dems.shape
    t = np.repeat(np.arange(1, horizon + 1), size)
    frame = pd.DataFrame({
        't': t,
        'canonical_id': np.tile(np.array(p.ids, dtype=object), horizon),
        'P_dems': p.p_dems.ravel(),
        'P_reps': p.p_reps.ravel(),
        'I': (p.p_dems + p.p_reps).ravel(),
    })
    if month_index is not None:
        frame.insert(1, 'month', [month_index.label(v) for v in t])
    return frame


def bill_scores_frame(scores: Iterable[BillScore]):
    return pd.DataFrame(
        [(s.bill_id, s.t, s.score_mean, s.score_max, s.n_cosponsors, s.passed_house) for s in scores],
        columns=['bill_id', 't', 'score_mean', 'score_max', 'n_cosponsors', 'passed_house'],
    )
