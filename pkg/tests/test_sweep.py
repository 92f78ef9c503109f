import numpy as np
import pytest

from data.generate_dataset import SynthConfig, generate
from data.ingest import MonthIndex
from models.influence import party_influence
from models.tempnet import DecayRate, build_monthly, decay_accumulate
from run.sweep import MEASURES, SweepSettings, half_life_sweep, legislator_index
from utils.utils import ComputationError, ConfigError


@pytest.fixture(scope='module')
def synth():
    bills, roster = generate(SynthConfig(seed=21, n_months=24, bills_per_month=20))
    return bills, roster, MonthIndex.from_bills(bills)


def test_single_configuration(synth):
    bills, roster, month_index = synth
    sweep = half_life_sweep(bills, roster, month_index, [6],
                            SweepSettings(measures=('influence',), aggregations=('max',)))
    assert len(sweep) == 1
    result = sweep.get(6.0, 'max', 'influence')
    defined = [s.rel_diff for s in result.stats if s.rel_diff is not None]
    assert result.mean_rel_diff == pytest.approx(np.mean(defined))
    assert len(result.stats) == 6


def test_full_grid(synth):
    bills, roster, month_index = synth
    sweep = half_life_sweep(bills, roster, month_index, [6, 12, 24], keep_series=True)
    frame = sweep.summary_frame()
    assert len(sweep) == 24
    assert len(frame) == 24
    assert list(frame.columns) == ['measure', 'aggregation', 'half_life', 'mean_rel_diff', 'se']
    assert frame['measure'].iloc[0] == MEASURES[0]
    for half_life, run in sweep.runs.items():
        values = run.centrality.values['eigenvector']
        norms = np.linalg.norm(values, axis=1)
        assert np.all((np.abs(norms - 1) < 1e-8) | (norms == 0))
        assert np.all(run.party.p_dems >= 0)
        for scores in run.scores.values():
            assert all(s.score_max >= s.score_mean - 1e-12 and s.score_mean >= 0 for s in scores)


def test_every_bill_scored_per_measure(synth):
    bills, roster, month_index = synth
    sweep = half_life_sweep(bills, roster, month_index, [12], SweepSettings(measures=('influence', 'strength')),
                            keep_series=True)
    for scores in sweep.runs[12.0].scores.values():
        assert len(scores) == len(bills)


def test_streamed_influence_matches_party_influence(synth):
    bills, roster, month_index = synth
    sweep = half_life_sweep(bills, roster, month_index, [12], SweepSettings(measures=('influence',)),
                            keep_series=True)
    horizon = month_index.horizon(bills)
    monthly = build_monthly(bills, horizon, month_index, legislator_index(bills, roster))
    expected = party_influence(decay_accumulate(*monthly, DecayRate(12)), roster, month_index)
    streamed = sweep.runs[12.0].party
    assert streamed.ids == expected.ids
    np.testing.assert_allclose(streamed.p_dems, expected.p_dems, atol=1e-12)
    np.testing.assert_allclose(streamed.p_reps, expected.p_reps, atol=1e-12)
    np.testing.assert_array_equal(streamed.n_dems, expected.n_dems)

def test_pooled_mode(synth):
    bills, roster, month_index = synth
    settings = SweepSettings(measures=('influence',), aggregations=('max',), rel_diff_mode='pooled')
    result = half_life_sweep(bills, roster, month_index, [6], settings).get(6.0, 'max', 'influence')
    assert np.isfinite(result.mean_rel_diff)
    assert result.distribution is not None


def test_congress_reset_changes_second_congress():
    # months 1-24 fall in the 111th Congress, 25-30 in the 112th
    bills, roster = generate(SynthConfig(seed=21, n_months=30, bills_per_month=20))
    month_index = MonthIndex.from_bills(bills)
    full = half_life_sweep(bills, roster, month_index, [24],
                           SweepSettings(measures=('influence',), aggregations=('max',)), keep_series=True)
    reset = half_life_sweep(bills, roster, month_index, [24],
                            SweepSettings(measures=('influence',), aggregations=('max',), congress_reset=True),
                            keep_series=True)
    full_p, reset_p = full.runs[24.0].party, reset.runs[24.0].party
    np.testing.assert_array_equal(full_p.p_dems[:24], reset_p.p_dems[:24])
    assert not np.allclose(full_p.p_dems[24:], reset_p.p_dems[24:])


def test_bad_settings(synth):
    bills, roster, month_index = synth
    with pytest.raises(ConfigError):
        half_life_sweep(bills, roster, month_index, [6], SweepSettings(measures=('pagerank',)))
    with pytest.raises(ConfigError):
        half_life_sweep(bills, roster, month_index, [])
    with pytest.raises(ConfigError):
        half_life_sweep(bills, roster, month_index, [-1])
    with pytest.raises(ComputationError):
        half_life_sweep([], roster, month_index, [6])


def test_no_passed_bills_is_labeled_computation_error():
    bills, roster = generate(SynthConfig(seed=1, n_months=6, base_pass_prob=0.0, influence_boost=0.0))
    with pytest.raises(ComputationError, match=r'influence/max/hl6'):
        half_life_sweep(bills, roster, MonthIndex.from_bills(bills), [6],
                        SweepSettings(measures=('influence',), aggregations=('max',)))


@pytest.mark.slow
def test_parallel_matches_serial(synth):
    bills, roster, month_index = synth
    serial = half_life_sweep(bills, roster, month_index, [6, 12], jobs=1).summary_frame()
    parallel = half_life_sweep(bills, roster, month_index, [6, 12], jobs=2).summary_frame()
    assert serial.equals(parallel)
