import math
import os

import pytest

from data.generate_dataset import SynthConfig, generate, legislator_ids, write_dataset
from data.ingest import MonthIndex, load_roster, read_bills, reconcile_ids
from run.sweep import SweepSettings, half_life_sweep
from utils.utils import ConfigError


def read_bytes(directory):
    out = {}
    for name in sorted(os.listdir(directory)):
        with open(os.path.join(directory, name), 'rb') as f:
            out[name] = f.read()
    return out


def test_same_seed_same_bytes(tmp_path):
    config = SynthConfig(seed=11, n_months=12, bills_per_month=10)
    write_dataset(*generate(config), tmp_path / 'one')
    write_dataset(*generate(config), tmp_path / 'two')
    assert read_bytes(tmp_path / 'one') == read_bytes(tmp_path / 'two')


def test_other_seed_differs():
    a, _ = generate(SynthConfig(seed=1, n_months=6))
    b, _ = generate(SynthConfig(seed=2, n_months=6))
    assert a != b


def test_pass_rate_without_boost():
    config = SynthConfig(seed=3, influence_boost=0.0, n_months=40, bills_per_month=25)
    bills, _ = generate(config)
    assert len(bills) == 1000
    rate = sum(b.passed_house for b in bills) / len(bills)
    sd = math.sqrt(config.base_pass_prob * (1 - config.base_pass_prob) / len(bills))
    assert abs(rate - config.base_pass_prob) <= 3 * sd


def test_no_elite_equals_no_boost():
    without_elite = generate(SynthConfig(seed=5, elite_set_size=0, n_months=12))
    without_boost = generate(SynthConfig(seed=5, influence_boost=0.0, n_months=12))
    assert without_elite[0] == without_boost[0]
    assert without_elite[1].to_frame().equals(without_boost[1].to_frame())


@pytest.mark.parametrize('overrides', [
    {'max_cosponsors': 60},
    {'base_pass_prob': 0.8, 'influence_boost': 0.3},
    {'party_split': 1.5},
    {'min_cosponsors': 5, 'max_cosponsors': 3},
    {'elite_set_size': 51},
])
def test_infeasible_config(overrides):
    with pytest.raises(ConfigError):
        generate(SynthConfig(**overrides))


def test_output_matches_ingest_formats(tmp_path):
    bills, roster = generate(SynthConfig(seed=8, n_months=30, bills_per_month=8))
    paths = write_dataset(bills, roster, tmp_path)
    errors = []
    parsed = read_bills(paths['bills_path'], errors=errors)
    assert errors == []
    assert parsed == bills
    roster_records, aliases = load_roster(paths['roster_path'], paths['aliases_path'])
    reconciled, canonical, unresolved = reconcile_ids(parsed, roster_records, aliases)
    assert reconciled == parsed
    assert canonical.canonical_ids == legislator_ids(50)
    assert not unresolved
    # 30 months from January 2009 reach into the 112th Congress
    assert canonical.congresses == [111, 112]
    assert canonical.party_sizes(111) == (25, 25)


def test_bill_fields():
    config = SynthConfig(seed=4, n_months=3, bills_per_month=20)
    bills, _ = generate(config)
    assert len({b.bill_id for b in bills}) == len(bills)
    for bill in bills:
        assert config.min_cosponsors <= len(bill.participants) <= config.max_cosponsors
        assert bill.passed_house or bill.passed_house_date is None
        assert not bill.enacted or bill.passed_house
        assert bill.sponsor_id not in bill.cosponsor_ids


def recovery(seed, half_life=6.0):
    bills, roster = generate(SynthConfig(seed=seed))
    sweep = half_life_sweep(bills, roster, MonthIndex.from_bills(bills), [half_life],
                            SweepSettings(measures=('influence',), aggregations=('mean', 'max')))
    return sweep.get(half_life, 'max', 'influence').mean_rel_diff, sweep.get(half_life, 'mean', 'influence').mean_rel_diff


@pytest.mark.slow
def test_planted_elite_is_recovered():
    results = [recovery(seed) for seed in range(100)]
    assert sum(by_max > 0 for by_max, _ in results) >= 99
    assert sum(by_max > by_mean for by_max, by_mean in results) >= 95
