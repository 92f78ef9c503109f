"""
Deterministic synthetic Congress datasets with an optional planted elite.

Random draws come from numpy's Philox generator, a counter-based bit
generator keyed by the seed, and are consumed in a fixed order per bill
(size, participants, day, passage, enactment, passage delay) whatever the
outcomes, so two configs that differ only in planted influence share one
stream.
"""
import calendar
import datetime
import logging
import os
from dataclasses import dataclass

import numpy as np

from data.ingest import (BillRecord, BillType, Chamber, LegislatorRoster, Party,
                         congress_of_date, congress_start, write_bills)
from utils.utils import ConfigError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class SynthConfig:
    seed: int = 2024
    n_legislators: int = 50
    party_split: float = 0.5
    n_months: int = 60
    bills_per_month: int = 30
    min_cosponsors: int = 2
    max_cosponsors: int = 8
    base_pass_prob: float = 0.1
    influence_boost: float = 0.3
    elite_set_size: int = 5
    elite_weight: float = 2.0
    enact_prob: float = 0.3
    start_congress: int = 111

    def validate(self):
        for name in ('party_split', 'base_pass_prob', 'influence_boost', 'enact_prob'):
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0:
                raise ConfigError(f"{name} must lie in [0, 1], got {value}")
        if self.base_pass_prob + self.influence_boost > 1.0:
            raise ConfigError("base_pass_prob + influence_boost must not exceed 1")
        if self.n_legislators < 2 or self.n_months < 1 or self.bills_per_month < 0:
            raise ConfigError("n_legislators >= 2, n_months >= 1 and bills_per_month >= 0 are required")
        if not 1 <= self.min_cosponsors <= self.max_cosponsors:
            raise ConfigError("cosponsor bounds must satisfy 1 <= min_cosponsors <= max_cosponsors")
        if self.max_cosponsors > self.n_legislators:
            raise ConfigError(
                f"max_cosponsors ({self.max_cosponsors}) exceeds n_legislators ({self.n_legislators})")
        if not 0 <= self.elite_set_size <= self.n_legislators:
            raise ConfigError("elite_set_size must lie in [0, n_legislators]")
        if self.elite_weight <= 0:
            raise ConfigError("elite_weight must be positive")
        return self


def legislator_ids(n):
    width = max(3, len(str(n)))
    return [f"L{i:0{width}d}" for i in range(1, n + 1)]


def month_start(first_year, offset):
    return first_year + offset // 12, offset % 12 + 1


def generate(config: SynthConfig):
    """Return (bills, roster) for the configured synthetic House."""
    config.validate()
    rng = np.random.Generator(np.random.Philox(config.seed))

    ids = legislator_ids(config.n_legislators)
    n_dems = int(round(config.n_legislators * config.party_split))
    parties = [Party.DEMOCRAT if i < n_dems else Party.REPUBLICAN for i in range(config.n_legislators)]

    # drawn even when no elite is planted, to keep the stream aligned
    order = rng.permutation(config.n_legislators)
    planted = config.elite_set_size if config.influence_boost > 0 else 0
    elite = np.zeros(config.n_legislators, dtype=bool)
    elite[order[:planted]] = True
    weights = np.where(elite, config.elite_weight, 1.0)
    weights = weights / weights.sum()

    first_year = congress_start(config.start_congress).year
    bills = []
    numbers = {}
    for offset in range(config.n_months):
        year, month = month_start(first_year, offset)
        for _ in range(config.bills_per_month):
            size = int(rng.integers(config.min_cosponsors, config.max_cosponsors + 1))
            chosen = rng.choice(config.n_legislators, size=size, replace=False, p=weights)
            # days 3..28 exist in every month and never precede a Congress start
            day = int(rng.integers(3, 29))
            u_pass, u_enact = rng.random(2)
            delay = int(rng.integers(0, 150))

            pass_prob = config.base_pass_prob + (config.influence_boost if elite[chosen].any() else 0.0)
            passed = bool(u_pass < pass_prob)
            introduced = datetime.date(year, month, min(day, calendar.monthrange(year, month)[1]))
            congress = congress_of_date(introduced)
            numbers[congress] = numbers.get(congress, 0) + 1
            bills.append(BillRecord(
                bill_id=f"hr{numbers[congress]}-{congress}",
                congress=congress,
                chamber=Chamber.HOUSE,
                bill_type=BillType.BILL,
                introduced_date=introduced,
                sponsor_id=ids[chosen[0]],
                cosponsor_ids=frozenset(ids[i] for i in chosen[1:]),
                passed_house=passed,
                passed_house_date=introduced + datetime.timedelta(days=delay) if passed else None,
                enacted=passed and bool(u_enact < config.enact_prob),
            ))

    roster = LegislatorRoster()
    last_congress = max((b.congress for b in bills), default=config.start_congress)
    last_year, last_month = month_start(first_year, config.n_months - 1)
    last_congress = max(last_congress, congress_of_date(datetime.date(last_year, last_month, 28)))
    for congress in range(config.start_congress, last_congress + 1):
        for legislator, party in zip(ids, parties):
            roster.add(legislator, congress, Chamber.HOUSE, party)

    logger.info("Generated %d bills (%d passed) for %d legislators over %d months",
                len(bills), sum(b.passed_house for b in bills), config.n_legislators, config.n_months)
    return bills, roster


def write_dataset(bills, roster, output_dir):
    """Write bills.jsonl, roster.csv and an (empty) aliases.csv in the ingest formats."""
    os.makedirs(output_dir, exist_ok=True)
    paths = {
        'bills_path': os.path.join(output_dir, 'bills.jsonl'),
        'roster_path': os.path.join(output_dir, 'roster.csv'),
        'aliases_path': os.path.join(output_dir, 'aliases.csv'),
    }
    write_bills(bills, paths['bills_path'])
    roster.to_frame().to_csv(paths['roster_path'], index=False, lineterminator='\n')
    with open(paths['aliases_path'], 'w', encoding='utf-8', newline='\n') as f:
        f.write('alias_id,canonical_id\n')
    return paths
