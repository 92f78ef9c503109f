import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from models.influence import BillScore
from utils.metrics import (histogram, pooled_relative_difference, relative_difference_distribution,
                           standard_error, window_frame, window_stats)
from utils.utils import ComputationError, ConfigError


def score(t, value, passed, bill_id=None):
    return BillScore(bill_id or f"b{t}-{value}-{passed}", t, value, value, 1, passed)


def test_single_window_example():
    stats = window_stats([score(1, 1.0, True), score(2, 1.5, True), score(3, 1.0, False)], 4, 'max')
    assert len(stats) == 1
    w = stats[0]
    assert (w.n_passed, w.n_failed) == (2, 1)
    assert w.mean_passed == pytest.approx(1.25)
    assert w.mean_failed == pytest.approx(1.0)
    assert w.rel_diff == pytest.approx(0.25)
    assert w.se_passed == pytest.approx(np.std([1.0, 1.5], ddof=1) / math.sqrt(2))
    assert math.isnan(w.se_failed)
    assert not w.degenerate


def test_thirty_windows_over_ten_years(month_index):
    scores = [score(t, 0.5, t % 3 == 0) for t in range(1, 121)]
    stats = window_stats(scores, 4, 'mean', month_index)
    assert len(stats) == 30
    assert [s.t_start for s in stats[:3]] == [1, 5, 9]
    assert stats[1].window_start == '2009-05'
    assert not any(s.partial for s in stats)


def test_trailing_partial_window_is_flagged():
    stats = window_stats([score(t, 1.0, t % 2 == 0) for t in range(1, 11)], 4, 'max')
    assert len(stats) == 3
    assert [s.partial for s in stats] == [False, False, True]


def test_window_without_passed_bills_is_degenerate(caplog):
    stats = window_stats([score(1, 1.0, False), score(5, 1.0, True), score(6, 0.5, False)], 4, 'max')
    assert stats[0].rel_diff is None and stats[0].degenerate
    assert stats[1].rel_diff == pytest.approx(1.0)
    assert 'no relative difference' in caplog.text


def test_zero_failed_mean_is_degenerate():
    stats = window_stats([score(1, 1.0, True), score(1, 0.0, False)], 4, 'max')
    assert stats[0].rel_diff is None


def test_horizon_adds_empty_windows():
    stats = window_stats([score(1, 1.0, True), score(2, 0.5, False)], 4, 'max', horizon=12)
    assert len(stats) == 3
    assert stats[2].n_passed == stats[2].n_failed == 0


def test_empty_scores():
    assert window_stats([], 4, 'max') == []


def test_aggregation_selects_field():
    scores = [BillScore('p', 1, 0.2, 0.8, 3, True), BillScore('f', 1, 0.1, 0.4, 3, False)]
    assert window_stats(scores, 4, 'mean')[0].rel_diff == pytest.approx(1.0)
    assert window_stats(scores, 4, 'max')[0].rel_diff == pytest.approx(1.0)
    assert window_stats(scores, 4, 'max')[0].mean_passed == pytest.approx(0.8)
    with pytest.raises(ConfigError):
        window_stats(scores, 4, 'median')
    with pytest.raises(ConfigError):
        window_stats(scores, 0, 'max')


def test_distribution_mean():
    stats = window_stats([score(1, 1.2, True), score(1, 1.0, False), score(5, 1.3, True), score(5, 1.0, False)],
                         4, 'max')
    summary = relative_difference_distribution(stats)
    assert summary.mean == pytest.approx(0.25)
    assert summary.n_windows == 2
    assert summary.se == pytest.approx(standard_error([0.2, 0.3]))
    assert summary.histogram['count'].sum() == 2


def test_distribution_needs_a_defined_window():
    stats = window_stats([score(1, 1.0, False)], 4, 'max')
    with pytest.raises(ComputationError):
        relative_difference_distribution(stats)


def test_histogram_bins():
    table = histogram([0.2, 0.3, 0.31], bin_width=0.05)
    assert 0.15 - 1e-12 < table['bin_left'].iloc[0] <= 0.2
    assert table['count'].sum() == 3
    assert np.allclose(np.diff(table['bin_left']), 0.05)
    assert table['bin_right'].iloc[-1] >= 0.31
    with pytest.raises(ConfigError):
        histogram([0.1], bin_width=0)


@pytest.mark.parametrize('value', [k / 100 for k in range(-200, 201)])
def test_histogram_counts_every_value_once(value):
    table = histogram([value], bin_width=0.05)
    assert table['count'].sum() == 1
    row = table[table['count'] == 1].iloc[0]
    assert row['bin_left'] - 1e-9 <= value < row['bin_right'] - 1e-9


def test_multiples_of_the_width_open_their_own_bin():
    table = histogram([0.1, 0.85, 0.3], bin_width=0.05)
    counted = table[table['count'] > 0]
    assert counted['bin_left'].tolist() == [0.1, 0.3, 0.85]
    assert len(table) == 16


def test_pooled_mode():
    scores = [score(1, 2.0, True), score(1, 1.0, False), score(2, 1.0, False), score(6, 4.0, True)]
    rel_diff, se = pooled_relative_difference(scores, 'max')
    assert rel_diff == pytest.approx((3.0 - 1.0) / 1.0)
    assert se > 0
    with pytest.raises(ComputationError):
        pooled_relative_difference([score(1, 1.0, True)], 'max')


def test_window_frame_columns():
    frame = window_frame(window_stats([score(1, 1.0, True), score(1, 0.5, False)], 4, 'max'))
    assert list(frame.columns[:3]) == ['window', 't_start', 'window_start']
    assert frame['rel_diff'].iloc[0] == pytest.approx(1.0)


score_lists = st.lists(
    st.tuples(st.integers(1, 36), st.floats(0.01, 10.0), st.booleans()),
    min_size=1, max_size=60,
)


@given(score_lists, st.floats(0.1, 100.0))
def test_rel_diff_scale_invariant(raw, factor):
    scores = [score(t, v, p, f"b{k}") for k, (t, v, p) in enumerate(raw)]
    scaled = [score(t, v * factor, p, f"b{k}") for k, (t, v, p) in enumerate(raw)]
    for a, b in zip(window_stats(scores, 4, 'max'), window_stats(scaled, 4, 'max')):
        assert (a.rel_diff is None) == (b.rel_diff is None)
        if a.rel_diff is not None:
            assert b.rel_diff == pytest.approx(a.rel_diff, rel=1e-9, abs=1e-12)


@given(score_lists, st.integers(1, 6), st.randoms())
def test_every_bill_lands_in_one_window(raw, window_months, random):
    scores = [score(t, v, p, f"b{k}") for k, (t, v, p) in enumerate(raw)]
    stats = window_stats(scores, window_months, 'max')
    assert sum(s.n_passed + s.n_failed for s in stats) == len(scores)
    for s in stats:
        inside = [x for x in scores if s.t_start <= x.t < s.t_start + window_months]
        assert s.n_passed + s.n_failed == len(inside)
    shuffled = list(scores)
    random.shuffle(shuffled)
    again = window_stats(shuffled, window_months, 'max')
    assert [(s.t_start, s.n_passed, s.n_failed) for s in again] == [(s.t_start, s.n_passed, s.n_failed) for s in stats]
