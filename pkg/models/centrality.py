"""
Baseline centralities on the ratio network D[t, i, j] = C_pass[t, i, j] / C_tot[t, i, j].

Edges exist wherever C_tot > 0, including zero-ratio edges (shared bills, none
passed). Those count for connectivity but cannot be traversed by shortest
paths. All measures are computed on the largest connected component; nodes
outside it score 0.
"""
import logging
from dataclasses import dataclass
from typing import Dict, Iterable, Tuple

import numpy as np
import pandas as pd
import scipy.sparse as sps
from scipy.sparse.csgraph import connected_components, shortest_path
from tqdm import tqdm

from models.influence import score_bills
from utils.utils import ComputationError, ConfigError

logger = logging.getLogger(__name__)

MEASURES = ('eigenvector', 'closeness', 'strength')
DISTANCES = ('reciprocal', 'hops')

DEFAULT_TOL = 1e-10
DEFAULT_MAX_ITER = 10_000


class NoPositiveWeight(ComputationError):
    """The component carries no positive weight, so no leading eigenvector direction exists."""


@dataclass
class RatioNetwork:
    t: int
    ids: Tuple[str, ...]
    row: np.ndarray      # edge endpoints, row < col
    col: np.ndarray
    weight: np.ndarray

    @property
    def size(self):
        return len(self.ids)

    @property
    def n_edges(self):
        return len(self.weight)

    def edge_weight(self, i, j):
        a, b = sorted((self.ids.index(i), self.ids.index(j)))
        hits = np.flatnonzero((self.row == a) & (self.col == b))
        return float(self.weight[hits[0]]) if len(hits) else None

    def _symmetric(self, data, keep):
        rows = np.concatenate([self.row[keep], self.col[keep]])
        cols = np.concatenate([self.col[keep], self.row[keep]])
        values = np.concatenate([data[keep], data[keep]])
        return sps.csr_matrix((values, (rows, cols)), shape=(self.size, self.size))

    def structure(self):
        """0/1 adjacency over every edge, zero-ratio edges included."""
        keep = np.ones(self.n_edges, dtype=bool)
        return self._symmetric(np.ones(self.n_edges), keep)

    def weights(self):
        return self._symmetric(self.weight, self.weight > 0)


def ratio_network(c_pass, c_tot, t, ids) -> RatioNetwork:
    upper = sps.triu(sps.csr_matrix(c_tot), k=1).tocoo()
    keep = upper.data > 0
    row, col, denominator = upper.row[keep], upper.col[keep], upper.data[keep]
    order = np.lexsort((col, row))
    row, col, denominator = row[order], col[order], denominator[order]
    numerator = np.asarray(sps.csr_matrix(c_pass)[row, col]).ravel() if len(row) else np.zeros(0)
    # C_pass <= C_tot up to rounding
    weight = np.clip(numerator / denominator, 0.0, 1.0)
    return RatioNetwork(t, tuple(ids), row.astype(np.int64), col.astype(np.int64), weight)


@dataclass
class LccView:
    ids: Tuple[str, ...]          # member canonical ids, sorted
    positions: np.ndarray         # member rows in the parent network
    weights: sps.csr_matrix       # induced weighted adjacency, positive weights only

    @property
    def size(self):
        return len(self.ids)


def largest_component(net: RatioNetwork) -> LccView:
    """
    Connected components by edge presence. Ties on size go to the component
    holding the lexicographically smallest canonical id.
    """
    if net.n_edges == 0:
        empty = sps.csr_matrix((0, 0))
        return LccView((), np.zeros(0, dtype=np.int64), empty)

    structure = net.structure()
    _, labels = connected_components(structure, directed=False)
    nodes = np.unique(np.concatenate([net.row, net.col]))
    node_labels = labels[nodes]
    sizes = np.bincount(node_labels)
    # ids are sorted, so the first node seen per label holds the smallest id
    smallest = {}
    for position, label in zip(nodes, node_labels):
        smallest.setdefault(label, position)
    best = min(smallest, key=lambda label: (-sizes[label], smallest[label]))

    members = nodes[node_labels == best]
    weights = net.weights()[members][:, members].tocsr()
    weights.eliminate_zeros()
    return LccView(
        ids=tuple(net.ids[p] for p in members),
        positions=members,
        weights=weights,
    )


def eigenvector(lcc: LccView, tol=DEFAULT_TOL, max_iter=DEFAULT_MAX_ITER, label=None) -> np.ndarray:
    """
    Leading eigenvector by power iteration from the uniform vector, unit
    Euclidean norm, nonnegative entries.

    Iterates with W + sI, s = mean strength; the shift keeps the eigenvectors
    and breaks the +/- lambda tie of bipartite components.
    """
    where = f" ({label})" if label else ""
    n = lcc.size
    if n == 0:
        raise ComputationError(f"Eigenvector centrality needs a nonempty component{where}")
    weights = lcc.weights
    if weights.nnz == 0 or weights.data.max() <= 0:
        raise NoPositiveWeight(f"Component has no positive edge weight{where}")

    shift = weights.sum() / n
    x = np.full(n, 1.0 / np.sqrt(n))
    for _ in range(max_iter):
        y = weights @ x + shift * x
        y /= np.linalg.norm(y)
        if np.max(np.abs(y - x)) < tol:
            return y
        x = y
    raise ComputationError(f"Eigenvector centrality did not converge within {max_iter} iterations{where}")


def closeness(lcc: LccView, distance='reciprocal') -> np.ndarray:
    """
    Cl(i) = (reachable - 1) / sum_j d_ji over nodes j reachable through
    positive-weight edges. Edge length is 1/weight, or 1 with distance='hops'.
    """
    if distance not in DISTANCES:
        raise ConfigError(f"Unknown closeness distance '{distance}'")
    n = lcc.size
    if n < 2:
        return np.zeros(n)

    lengths = lcc.weights.copy()
    if distance == 'reciprocal':
        lengths.data = 1.0 / lengths.data
    else:
        lengths.data = np.ones_like(lengths.data)
    dist = shortest_path(lengths, method='auto', directed=False)

    reachable = np.isfinite(dist)
    np.fill_diagonal(reachable, False)
    n_reachable = reachable.sum(axis=0)
    total = np.where(reachable, dist, 0.0).sum(axis=0)
    out = np.zeros(n)
    np.divide(n_reachable, total, out=out, where=total > 0)
    return out


def strength(lcc: LccView) -> np.ndarray:
    if lcc.size == 0:
        return np.zeros(0)
    return np.asarray(lcc.weights.sum(axis=1)).ravel()


@dataclass
class CentralitySeries:
    ids: Tuple[str, ...]
    values: Dict[str, np.ndarray]    # measure -> (months, legislators)

    def __post_init__(self):
        self._position = {legislator: i for i, legislator in enumerate(self.ids)}

    def value(self, measure, t, legislator):
        series = self.values[measure]
        position = self._position.get(legislator)
        if position is None or not 1 <= t <= series.shape[0]:
            return 0.0
        return float(series[t - 1, position])


def centrality_month(c_pass, c_tot, t, ids, measures=MEASURES, closeness_distance='reciprocal',
                     tol=DEFAULT_TOL, max_iter=DEFAULT_MAX_ITER, label=None):
    """Full-length vectors (0 outside the LCC) for each requested measure at one month."""
    net = ratio_network(c_pass, c_tot, t, ids)
    lcc = largest_component(net)
    out = {}
    for measure in measures:
        vector = np.zeros(len(ids))
        if lcc.size:
            if measure == 'eigenvector':
                try:
                    vector[lcc.positions] = eigenvector(lcc, tol=tol, max_iter=max_iter, label=label or f"month {t}")
                except NoPositiveWeight as e:
                    logger.warning("%s; eigenvector centrality set to 0", e)
            elif measure == 'closeness':
                vector[lcc.positions] = closeness(lcc, closeness_distance)
            elif measure == 'strength':
                vector[lcc.positions] = strength(lcc)
            else:
                raise ConfigError(f"Unknown centrality measure '{measure}'")
        out[measure] = vector
    return out


def centrality_series(decayed: Iterable, ids, horizon, measures=MEASURES, closeness_distance='reciprocal',
                      tol=DEFAULT_TOL, max_iter=DEFAULT_MAX_ITER, month_index=None) -> CentralitySeries:
    """`decayed` yields (t, C_pass[t], C_tot[t]), e.g. models.tempnet.iter_decayed."""
    values = {measure: np.zeros((horizon, len(ids))) for measure in measures}
    for t, c_pass, c_tot in tqdm(decayed, total=horizon, desc="Centralities", leave=False):
        label = f"month {month_index.label(t)}" if month_index is not None else f"month {t}"
        month = centrality_month(c_pass, c_tot, t, ids, measures, closeness_distance, tol, max_iter, label)
        for measure, vector in month.items():
            values[measure][t - 1] = vector
    return CentralitySeries(tuple(ids), values)


def centrality_bill_scores(bills, series: CentralitySeries, measure, month_index):
    if measure not in series.values:
        raise ConfigError(f"Centrality series has no '{measure}' values")
    return score_bills(bills, month_index, lambda t, legislator: series.value(measure, t, legislator))


def centrality_frame(series: CentralitySeries, month_index=None):
    frames = []
    for measure in sorted(series.values):
        values = series.values[measure]
        horizon, size = values.shape
        frames.append(pd.DataFrame({
            't': np.repeat(np.arange(1, horizon + 1), size),
            'canonical_id': np.tile(np.array(series.ids, dtype=object), horizon),
            'measure': measure,
            'value': values.ravel(),
        }))
    frame = pd.concat(frames, ignore_index=True) if frames else pd.DataFrame(columns=['t', 'canonical_id', 'measure', 'value'])
    if month_index is not None and len(frame):
        frame.insert(1, 'month', [month_index.label(v) for v in frame['t']])
    return frame.sort_values(['t', 'canonical_id', 'measure'], kind='mergesort').reset_index(drop=True)
