"""
Monthly cosponsorship co-occurrence tensors and their exponentially decayed
cumulative forms.

A[t] counts, for every unordered pair of legislators, the bills introduced in
month t that list both of them (A_pass: only bills that eventually pass in the
House). C[t] = sum_{n<=t} e^{k(t-n)} A[n], computed with the recurrence
C[t] = e^k C[t-1] + A[t].
"""
import logging
import math
import os
from dataclasses import dataclass
from typing import Dict, Iterator, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd
import scipy.sparse as sps

from utils.utils import ConfigError, DataError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class DecayRate:
    half_life_months: float

    def __post_init__(self):
        if not self.half_life_months > 0:
            raise ConfigError(f"half-life must be positive, got {self.half_life_months}")

    @property
    def k(self):
        return math.log(0.5) / self.half_life_months

    @property
    def factor(self):
        return math.exp(self.k)

    def weight(self, elapsed_months):
        return math.exp(self.k * elapsed_months)


class LegislatorIndex:
    """Stable mapping canonical id <-> matrix row."""

    def __init__(self, ids):
        self.ids = tuple(sorted(set(ids)))
        self._position = {legislator: i for i, legislator in enumerate(self.ids)}

    def __len__(self):
        return len(self.ids)

    def __contains__(self, legislator):
        return legislator in self._position

    def __getitem__(self, legislator):
        return self._position[legislator]

    def get(self, legislator, default=None):
        return self._position.get(legislator, default)

    def positions(self, legislators):
        return np.array(sorted(self._position[l] for l in legislators), dtype=np.int64)


@dataclass
class MonthlyCooccurrence:
    t: int
    matrix: sps.csr_matrix
    index: LegislatorIndex

    def to_pairs(self):
        """{(i, j): count} over unordered pairs with i < j."""
        upper = sps.triu(self.matrix, k=1).tocoo()
        return {
            (self.index.ids[r], self.index.ids[c]): v
            for r, c, v in zip(upper.row, upper.col, upper.data) if v != 0
        }


def _pair_matrix(participant_sets, size):
    rows, cols = [], []
    for positions in participant_sets:
        if len(positions) < 2:
            continue
        r = np.repeat(positions, len(positions))
        c = np.tile(positions, len(positions))
        off_diagonal = r != c
        rows.append(r[off_diagonal])
        cols.append(c[off_diagonal])
    if not rows:
        return sps.csr_matrix((size, size), dtype=np.float64)
    rows = np.concatenate(rows)
    cols = np.concatenate(cols)
    data = np.ones(len(rows), dtype=np.float64)
    # duplicate coordinates are summed on conversion
    return sps.coo_matrix((data, (rows, cols)), shape=(size, size)).tocsr()


def build_monthly(bills, horizon, month_index, index: Optional[LegislatorIndex] = None
                  ) -> Tuple[List[MonthlyCooccurrence], List[MonthlyCooccurrence]]:
    """
    Pair counts per introduction month for passed and all bills.

    Pass credit is booked at the introduction month regardless of when the
    bill passed. Bills with fewer than two participants add no pairs.
    """
    if index is None:
        index = LegislatorIndex(p for b in bills for p in b.participants)

    by_month: Dict[int, List] = {}
    for bill in bills:
        t = month_index.t_of(bill.introduced_date)
        if not 1 <= t <= horizon:
            raise DataError(f"Bill {bill.bill_id} introduced {bill.introduced_date} falls outside months 1..{horizon}")
        by_month.setdefault(t, []).append(bill)

    passed, total = [], []
    size = len(index)
    for t in range(1, horizon + 1):
        month_bills = by_month.get(t, [])
        all_sets = [index.positions(b.participants) for b in month_bills]
        pass_sets = [s for s, b in zip(all_sets, month_bills) if b.passed_house]
        passed.append(MonthlyCooccurrence(t, _pair_matrix(pass_sets, size), index))
        total.append(MonthlyCooccurrence(t, _pair_matrix(all_sets, size), index))
    return passed, total


def _check_contiguous(monthly: Sequence[MonthlyCooccurrence]):
    for expected, month in enumerate(monthly, start=1):
        if month.t != expected:
            raise ConfigError(f"Monthly sequence is not contiguous from 1: expected month {expected}, got {month.t}")


def iter_decayed(monthly_pass, monthly_tot, rate: DecayRate, congress_of=None
                 ) -> Iterator[Tuple[int, sps.csr_matrix, sps.csr_matrix]]:
    """
    Yield (t, C_pass[t], C_tot[t]) month by month.

    If `congress_of` (t -> Congress number) is given, accumulation restarts
    from zero at the first month of every Congress.
    """
    _check_contiguous(monthly_pass)
    _check_contiguous(monthly_tot)
    if len(monthly_pass) != len(monthly_tot):
        raise ConfigError("Pass and total monthly sequences differ in length")

    factor = rate.factor
    c_pass = c_tot = None
    previous_congress = None
    for a_pass, a_tot in zip(monthly_pass, monthly_tot):
        congress = congress_of(a_pass.t) if congress_of is not None else None
        if c_pass is None or congress != previous_congress:
            c_pass = a_pass.matrix.copy()
            c_tot = a_tot.matrix.copy()
        else:
            c_pass = (c_pass * factor + a_pass.matrix).tocsr()
            c_tot = (c_tot * factor + a_tot.matrix).tocsr()
        previous_congress = congress
        yield a_pass.t, c_pass, c_tot


@dataclass
class DecayedTensor:
    rate: DecayRate
    index: LegislatorIndex
    passed: List[sps.csr_matrix]
    total: List[sps.csr_matrix]

    @property
    def horizon(self):
        return len(self.passed)

    def at(self, t):
        return self.passed[t - 1], self.total[t - 1]

    def weight(self, t, i, j, variant='pass'):
        matrices = self.passed if variant == 'pass' else self.total
        return matrices[t - 1][self.index[i], self.index[j]]


def decay_accumulate(monthly_pass, monthly_tot, rate: DecayRate, congress_of=None) -> DecayedTensor:
    if not monthly_tot:
        raise ConfigError("Cannot accumulate an empty monthly sequence")
    passed, total = [], []
    for _, c_pass, c_tot in iter_decayed(monthly_pass, monthly_tot, rate, congress_of=congress_of):
        passed.append(c_pass)
        total.append(c_tot)
    return DecayedTensor(rate, monthly_tot[0].index, passed, total)


def closed_form(monthly: Sequence[MonthlyCooccurrence], rate: DecayRate, t: int):
    """Direct sum_{n=1..t} e^{k(t-n)} A[n]; used to cross-check the recurrence."""
    result = sps.csr_matrix(monthly[0].matrix.shape, dtype=np.float64)
    for month in monthly[:t]:
        result = result + rate.weight(t - month.t) * month.matrix
    return result.tocsr()


def _triples(t, matrix, index):
    upper = sps.triu(matrix, k=1).tocoo()
    order = np.lexsort((upper.col, upper.row))
    return pd.DataFrame({
        't': t,
        'i': [index.ids[r] for r in upper.row[order]],
        'j': [index.ids[c] for c in upper.col[order]],
        'weight': upper.data[order],
    })


def dump_tensors(tensor: DecayedTensor, output_dir, prefix='C'):
    """Write per-month (t, i, j, weight) triples, one file per variant."""
    os.makedirs(output_dir, exist_ok=True)
    paths = []
    for variant, matrices in (('pass', tensor.passed), ('tot', tensor.total)):
        frames = [_triples(t, m, tensor.index) for t, m in enumerate(matrices, start=1)]
        frame = pd.concat(frames, ignore_index=True) if frames else pd.DataFrame(columns=['t', 'i', 'j', 'weight'])
        path = os.path.join(output_dir, f"{prefix}_{variant}_hl{tensor.rate.half_life_months:g}.csv")
        frame.to_csv(path, index=False, float_format='%.12g')
        paths.append(path)
    logger.info("Tensor dump written to %s", output_dir)
    return paths
