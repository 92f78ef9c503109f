"""
Bill and legislator ingestion.

Reads the line-delimited bills file and the tabular roster sources, reconciles
legislator identities across Congresses, keeps House bills and maps calendar
dates onto the monthly time axis used by the network tensors.
"""
import datetime
import json
import logging
from collections import Counter
from dataclasses import dataclass, replace
from enum import Enum
from typing import Dict, FrozenSet, Iterable, List, Optional, Tuple

import pandas as pd

from utils.utils import ConfigError, DataError

logger = logging.getLogger(__name__)

FIRST_CONGRESS_YEAR = 1789


class Chamber(str, Enum):
    HOUSE = "House"
    SENATE = "Senate"


class BillType(str, Enum):
    BILL = "Bill"
    SIMPLE_RESOLUTION = "SimpleResolution"
    CONCURRENT_RESOLUTION = "ConcurrentResolution"
    JOINT_RESOLUTION = "JointResolution"


class Party(str, Enum):
    DEMOCRAT = "Democrat"
    REPUBLICAN = "Republican"
    OTHER = "Other"


# ProPublica / congress.gov bill-type codes
BILL_TYPE_CODES = {
    'hr': (BillType.BILL, Chamber.HOUSE),
    's': (BillType.BILL, Chamber.SENATE),
    'hres': (BillType.SIMPLE_RESOLUTION, Chamber.HOUSE),
    'sres': (BillType.SIMPLE_RESOLUTION, Chamber.SENATE),
    'hconres': (BillType.CONCURRENT_RESOLUTION, Chamber.HOUSE),
    'sconres': (BillType.CONCURRENT_RESOLUTION, Chamber.SENATE),
    'hjres': (BillType.JOINT_RESOLUTION, Chamber.HOUSE),
    'sjres': (BillType.JOINT_RESOLUTION, Chamber.SENATE),
}

MANDATORY_FIELDS = (
    'bill_id', 'congress', 'chamber', 'bill_type', 'introduced_date',
    'sponsor_id', 'cosponsor_ids', 'passed_house', 'enacted',
)


def parse_chamber(value):
    if isinstance(value, Chamber):
        return value
    text = str(value).strip().lower()
    if text in ('house', 'h', 'hr'):
        return Chamber.HOUSE
    if text in ('senate', 's'):
        return Chamber.SENATE
    raise ValueError(f"unknown chamber '{value}'")


def parse_bill_type(value):
    if isinstance(value, BillType):
        return value
    text = str(value).strip()
    for bill_type in BillType:
        if text.lower() == bill_type.value.lower():
            return bill_type
    code = text.lower().replace('.', '').replace(' ', '')
    if code in BILL_TYPE_CODES:
        return BILL_TYPE_CODES[code][0]
    raise ValueError(f"unknown bill type '{value}'")


def parse_party(value):
    if isinstance(value, Party):
        return value
    text = str(value).strip().lower()
    if text in ('d', 'dem', 'democrat', 'democratic'):
        return Party.DEMOCRAT
    if text in ('r', 'rep', 'republican'):
        return Party.REPUBLICAN
    return Party.OTHER


def congress_start(congress):
    """Congress n convenes on 3 January of year 1789 + 2(n - 1)."""
    return datetime.date(FIRST_CONGRESS_YEAR + 2 * (congress - 1), 1, 3)


def congress_of_date(day):
    congress = (day.year - FIRST_CONGRESS_YEAR) // 2 + 1
    if day < congress_start(congress):
        congress -= 1
    return congress


@dataclass(frozen=True)
class BillRecord:
    bill_id: str
    congress: int
    chamber: Chamber
    bill_type: BillType
    introduced_date: datetime.date
    sponsor_id: Optional[str]
    cosponsor_ids: FrozenSet[str]
    passed_house: bool
    passed_house_date: Optional[datetime.date] = None
    enacted: bool = False

    @property
    def participants(self):
        """Sponsor and cosponsors on equal footing."""
        if self.sponsor_id is None:
            return frozenset(self.cosponsor_ids)
        return frozenset(self.cosponsor_ids) | {self.sponsor_id}

    def to_json(self):
        return {
            'bill_id': self.bill_id,
            'congress': self.congress,
            'chamber': self.chamber.value,
            'bill_type': self.bill_type.value,
            'introduced_date': self.introduced_date.isoformat(),
            'sponsor_id': self.sponsor_id,
            'cosponsor_ids': sorted(self.cosponsor_ids),
            'passed_house': self.passed_house,
            'passed_house_date': self.passed_house_date.isoformat() if self.passed_house_date else None,
            'enacted': self.enacted,
        }


def _parse_bool(value, name):
    if isinstance(value, bool):
        return value
    if isinstance(value, int) and value in (0, 1):
        return bool(value)
    if isinstance(value, str) and value.strip().lower() in ('true', 'false'):
        return value.strip().lower() == 'true'
    raise ValueError(f"field '{name}' is not a boolean: {value!r}")


def _parse_date(value, name):
    if isinstance(value, datetime.date):
        return value
    try:
        return datetime.date.fromisoformat(str(value)[:10])
    except ValueError:
        raise ValueError(f"field '{name}' is not an ISO-8601 date: {value!r}")


def bill_from_dict(raw):
    missing = [name for name in MANDATORY_FIELDS if name not in raw or (raw[name] is None and name != 'sponsor_id')]
    if missing:
        raise ValueError(f"missing mandatory field(s): {', '.join(missing)}")

    cosponsors = raw['cosponsor_ids']
    if isinstance(cosponsors, str) or not isinstance(cosponsors, (list, tuple, set, frozenset)):
        raise ValueError("field 'cosponsor_ids' must be an array")

    passed_house = _parse_bool(raw['passed_house'], 'passed_house')
    passed_house_date = raw.get('passed_house_date')
    passed_house_date = _parse_date(passed_house_date, 'passed_house_date') if passed_house_date else None
    if not passed_house and passed_house_date is not None:
        raise ValueError("passed_house_date given for a bill that did not pass the House")

    congress = int(raw['congress'])
    introduced = _parse_date(raw['introduced_date'], 'introduced_date')
    if congress_of_date(introduced) != congress:
        raise ValueError(f"introduced_date {introduced} lies outside Congress {congress}")

    sponsor = raw['sponsor_id']
    return BillRecord(
        bill_id=str(raw['bill_id']),
        congress=congress,
        chamber=parse_chamber(raw['chamber']),
        bill_type=parse_bill_type(raw['bill_type']),
        introduced_date=introduced,
        sponsor_id=str(sponsor) if sponsor is not None else None,
        cosponsor_ids=frozenset(str(c) for c in cosponsors),
        passed_house=passed_house,
        passed_house_date=passed_house_date,
        enacted=_parse_bool(raw['enacted'], 'enacted'),
    )


def parse_bills(raw_stream: Iterable, errors: Optional[list] = None) -> List[BillRecord]:
    """
    Parse one JSON record per line (str, or UTF-8 bytes). Bad lines are
    skipped, logged with their line number and, if `errors` is given, appended
    to it as (line_no, message).
    """
    bills = []
    n_errors = 0
    for line_no, line in enumerate(raw_stream, start=1):
        if not line.strip():
            continue
        try:
            if isinstance(line, bytes):
                line = line.decode('utf-8')
            raw = json.loads(line)
            if not isinstance(raw, dict):
                raise ValueError("record is not a JSON object")
            bills.append(bill_from_dict(raw))
        except (ValueError, TypeError) as e:
            n_errors += 1
            logger.warning("Skipping bill record on line %d: %s", line_no, e)
            if errors is not None:
                errors.append((line_no, str(e)))
    if n_errors:
        logger.warning("Skipped %d malformed bill record(s); parsed %d", n_errors, len(bills))
    return bills


def read_bills(bills_path, errors=None):
    try:
        with open(bills_path, 'rb') as f:
            return parse_bills(f, errors=errors)
    except OSError as e:
        raise DataError(f"Cannot read bills file {bills_path}: {e}")


def write_bills(bills, bills_path):
    with open(bills_path, 'w', encoding='utf-8', newline='\n') as f:
        for bill in bills:
            f.write(json.dumps(bill.to_json(), sort_keys=True) + '\n')


def filter_bills(bills: List[BillRecord], chamber=Chamber.HOUSE) -> List[BillRecord]:
    chamber = parse_chamber(chamber)
    return [b for b in bills if b.bill_type is BillType.BILL and b.chamber is chamber]


@dataclass(frozen=True)
class RosterEntry:
    congress: int
    chamber: Chamber
    party: Party


class LegislatorRoster:
    """Canonical legislators with one (chamber, party) entry per Congress."""

    def __init__(self):
        self._entries: Dict[str, Dict[int, RosterEntry]] = {}

    def add(self, canonical_id, congress, chamber, party):
        per_congress = self._entries.setdefault(canonical_id, {})
        entry = RosterEntry(int(congress), parse_chamber(chamber), parse_party(party))
        if entry.congress in per_congress:
            if per_congress[entry.congress] != entry:
                logger.warning("Conflicting roster entries for %s in Congress %d; keeping the first",
                               canonical_id, entry.congress)
            return False
        per_congress[entry.congress] = entry
        return True

    def __len__(self):
        return len(self._entries)

    def __contains__(self, canonical_id):
        return canonical_id in self._entries

    @property
    def canonical_ids(self):
        return sorted(self._entries)

    @property
    def congresses(self):
        return sorted({c for per_congress in self._entries.values() for c in per_congress})

    def entry(self, canonical_id, congress):
        return self._entries.get(canonical_id, {}).get(congress)

    def party_at(self, canonical_id, congress):
        """Party in `congress`, else the nearest earlier Congress, else the nearest later one."""
        per_congress = self._entries.get(canonical_id)
        if not per_congress:
            return None
        if congress in per_congress:
            return per_congress[congress].party
        earlier = [c for c in per_congress if c < congress]
        if earlier:
            return per_congress[max(earlier)].party
        return per_congress[min(per_congress)].party

    def members(self, congress, chamber=Chamber.HOUSE):
        chamber = parse_chamber(chamber)
        return sorted(
            (cid, per_congress[congress].party)
            for cid, per_congress in self._entries.items()
            if congress in per_congress and per_congress[congress].chamber is chamber
        )

    def party_sizes(self, congress, chamber=Chamber.HOUSE):
        counts = Counter(party for _, party in self.members(congress, chamber))
        return counts[Party.DEMOCRAT], counts[Party.REPUBLICAN]

    def to_frame(self):
        rows = [
            {'canonical_id': cid, 'congress': c, 'chamber': e.chamber.value, 'party': e.party.value}
            for cid in self.canonical_ids
            for c, e in sorted(self._entries[cid].items())
        ]
        return pd.DataFrame(rows, columns=['canonical_id', 'congress', 'chamber', 'party'])


ROSTER_COLUMNS = ['canonical_id', 'congress', 'chamber', 'party']
ALIAS_COLUMNS = ['alias_id', 'canonical_id']


def load_roster(roster_path, aliases_path=None):
    """Read the roster table and the optional alias map as raw DataFrames."""
    try:
        roster = pd.read_csv(roster_path, dtype={'canonical_id': str, 'chamber': str, 'party': str})
        aliases = (pd.read_csv(aliases_path, dtype=str) if aliases_path
                   else pd.DataFrame(columns=ALIAS_COLUMNS))
    except (OSError, pd.errors.ParserError, pd.errors.EmptyDataError) as e:
        raise DataError(f"Cannot read roster sources: {e}")
    for frame, columns, name in ((roster, ROSTER_COLUMNS, roster_path), (aliases, ALIAS_COLUMNS, aliases_path)):
        missing = [c for c in columns if c not in frame.columns]
        if missing:
            raise DataError(f"{name} is missing column(s): {', '.join(missing)}")
    return roster, aliases


def _alias_resolver(aliases):
    alias_map = {str(a): str(c) for a, c in zip(aliases['alias_id'], aliases['canonical_id']) if str(a) != str(c)}

    def follow(legislator_id):
        seen = set()
        while legislator_id in alias_map:
            if legislator_id in seen:
                raise DataError(f"Alias cycle through '{legislator_id}'")
            seen.add(legislator_id)
            legislator_id = alias_map[legislator_id]
        return legislator_id

    return follow


def reconcile_ids(bills: List[BillRecord], roster_records, aliases=None) -> Tuple[List[BillRecord], LegislatorRoster, Counter]:
    """
    Replace every sponsor/cosponsor id by its canonical id.

    Returns the rewritten bills, the canonical roster and a Counter of
    unresolved ids (occurrences). Unresolved participants are dropped; the
    bill itself is kept.
    """
    roster_records = pd.DataFrame(roster_records, columns=None)
    aliases = pd.DataFrame(aliases if aliases is not None else [], columns=None)
    if aliases.empty:
        aliases = pd.DataFrame(columns=ALIAS_COLUMNS)
    follow = _alias_resolver(aliases)

    roster = LegislatorRoster()
    for row_no, row in enumerate(roster_records.itertuples(index=False), start=1):
        try:
            roster.add(follow(str(row.canonical_id)), int(row.congress), row.chamber, row.party)
        except (TypeError, ValueError) as e:
            raise DataError(f"Roster row {row_no} ({row.canonical_id}, congress {row.congress}): {e}")

    unresolved = Counter()

    def resolve(legislator_id):
        if legislator_id is None:
            return None
        canonical = follow(legislator_id)
        if canonical in roster:
            return canonical
        unresolved[legislator_id] += 1
        return None

    reconciled = []
    for bill in bills:
        cosponsors = frozenset(c for c in (resolve(i) for i in bill.cosponsor_ids) if c is not None)
        reconciled.append(replace(bill, sponsor_id=resolve(bill.sponsor_id), cosponsor_ids=cosponsors))

    if unresolved:
        shown = ', '.join(sorted(unresolved)[:10])
        logger.warning("Dropped %d participant slot(s) from %d unresolved legislator id(s): %s%s",
                       sum(unresolved.values()), len(unresolved), shown,
                       ' ...' if len(unresolved) > 10 else '')
    return reconciled, roster, unresolved


SUMMARY_COLUMNS = [
    'congress', 'n_bills', 'pct_passed_house', 'pct_enacted', 'mean_cosponsors',
    'max_cosponsors', 'mean_bills_per_cosponsor', 'max_bills_per_cosponsor',
]


def summarize(bills: List[BillRecord]) -> pd.DataFrame:
    """Per-Congress bill statistics; cosponsor counts include the sponsor."""
    if not bills:
        return pd.DataFrame(columns=SUMMARY_COLUMNS)

    frame = pd.DataFrame({
        'congress': [b.congress for b in bills],
        'n_participants': [len(b.participants) for b in bills],
        'passed_house': [b.passed_house for b in bills],
        'enacted': [b.enacted for b in bills],
    })
    per_bill = frame.groupby('congress').agg(
        n_bills=('n_participants', 'size'),
        pct_passed_house=('passed_house', 'mean'),
        pct_enacted=('enacted', 'mean'),
        mean_cosponsors=('n_participants', 'mean'),
        max_cosponsors=('n_participants', 'max'),
    )
    per_bill[['pct_passed_house', 'pct_enacted']] *= 100.0

    memberships = pd.DataFrame(
        [(b.congress, legislator) for b in bills for legislator in b.participants],
        columns=['congress', 'legislator'],
    )
    bills_per_cosponsor = memberships.groupby(['congress', 'legislator']).size().groupby('congress').agg(['mean', 'max'])
    bills_per_cosponsor.columns = ['mean_bills_per_cosponsor', 'max_bills_per_cosponsor']

    table = per_bill.join(bills_per_cosponsor, how='left').reset_index()
    table['max_bills_per_cosponsor'] = table['max_bills_per_cosponsor'].fillna(0).astype(int)
    table['mean_bills_per_cosponsor'] = table['mean_bills_per_cosponsor'].fillna(0.0)
    return table[SUMMARY_COLUMNS]


class MonthIndex:
    """Calendar months numbered t = 1, 2, ... from an analysis start month."""

    def __init__(self, start):
        if isinstance(start, MonthIndex):
            start = (start.year, start.month)
        if isinstance(start, datetime.date):
            start = (start.year, start.month)
        if isinstance(start, str):
            try:
                year, month = (int(p) for p in start.strip()[:7].split('-'))
            except ValueError:
                raise ConfigError(f"start month must look like YYYY-MM, got '{start}'")
            start = (year, month)
        self.year, self.month = int(start[0]), int(start[1])
        if not 1 <= self.month <= 12:
            raise ConfigError(f"invalid start month {self.month}")

    @classmethod
    def from_congress(cls, congress):
        return cls((congress_start(congress).year, 1))

    @classmethod
    def from_bills(cls, bills):
        if not bills:
            raise DataError("Cannot anchor the month index on an empty bill list")
        return cls.from_congress(min(b.congress for b in bills))

    def t_of(self, day):
        return (day.year - self.year) * 12 + (day.month - self.month) + 1

    def year_month(self, t):
        offset = self.month - 1 + (t - 1)
        return self.year + offset // 12, offset % 12 + 1

    def label(self, t):
        year, month = self.year_month(t)
        return f"{year:04d}-{month:02d}"

    def congress_of(self, t):
        """Congress in session for most of month t (the incoming one in a January of an odd year)."""
        year, _ = self.year_month(t)
        return (year - FIRST_CONGRESS_YEAR) // 2 + 1

    def congresses_of(self, t):
        """Every Congress sitting during month t, congress_of(t) first."""
        year, month = self.year_month(t)
        outgoing = congress_of_date(datetime.date(year, month, 1))
        incoming = self.congress_of(t)
        return (incoming,) if outgoing == incoming else (incoming, outgoing)

    def horizon(self, bills):
        return max((self.t_of(b.introduced_date) for b in bills), default=0)

    def __eq__(self, other):
        return isinstance(other, MonthIndex) and (self.year, self.month) == (other.year, other.month)

    def __repr__(self):
        return f"MonthIndex('{self.year:04d}-{self.month:02d}')"
