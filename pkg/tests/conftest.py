import os
import sys
import datetime

import pytest

sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from data.ingest import BillRecord, BillType, Chamber, LegislatorRoster, MonthIndex, Party  # noqa: E402

# Congress 111 starts on 2009-01-03, so month t of the index is 2009-01 + (t - 1)
START = MonthIndex('2009-01')


def month_date(t, day=15):
    year, month = START.year_month(t)
    return datetime.date(year, month, day)


def _bill(bill_id, participants, t=1, passed=False, bill_type=BillType.BILL, chamber=Chamber.HOUSE,
          sponsor=None, day=15):
    participants = list(participants)
    introduced = month_date(t, day)
    if sponsor is None and participants:
        sponsor, participants = participants[0], participants[1:]
    congress = (introduced.year - 1789) // 2 + 1
    return BillRecord(
        bill_id=bill_id,
        congress=congress,
        chamber=chamber,
        bill_type=bill_type,
        introduced_date=introduced,
        sponsor_id=sponsor,
        cosponsor_ids=frozenset(participants),
        passed_house=passed,
        passed_house_date=introduced if passed else None,
        enacted=False,
    )


@pytest.fixture
def make_bill():
    """Factory: make_bill(bill_id, participants, t=1, passed=False, ...)."""
    return _bill


@pytest.fixture
def month_index():
    return START


@pytest.fixture
def make_roster():
    def build(parties, congresses=(111,), chamber=Chamber.HOUSE):
        roster = LegislatorRoster()
        for congress in congresses:
            for legislator, party in parties.items():
                roster.add(legislator, congress, chamber, party)
        return roster
    return build


@pytest.fixture
def two_party_roster(make_roster):
    return make_roster({'a': Party.DEMOCRAT, 'd': Party.DEMOCRAT, 'r': Party.REPUBLICAN})


def bill_json(bill_id='hr1-111', congress=111, chamber='House', bill_type='Bill', introduced='2009-02-10',
              sponsor='A000001', cosponsors=('B000002',), passed=False, passed_date=None, enacted=False):
    return {
        'bill_id': bill_id, 'congress': congress, 'chamber': chamber, 'bill_type': bill_type,
        'introduced_date': introduced, 'sponsor_id': sponsor, 'cosponsor_ids': list(cosponsors),
        'passed_house': passed, 'passed_house_date': passed_date, 'enacted': enacted,
    }


@pytest.fixture
def make_bill_json():
    return bill_json
