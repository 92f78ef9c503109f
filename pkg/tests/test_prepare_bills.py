import datetime
import json

import pytest

from data.ingest import BillType, Chamber, read_bills
from data.prepare_bills import convert_bill, prepare_bills


def api_bill(bill_id='hr2-111', bill_type='hr', house_passage=None, enacted=None, **extra):
    bill = {
        'bill_id': bill_id, 'bill_type': bill_type, 'congress': '111', 'introduced_date': '2009-03-02',
        'sponsor_id': 'P000197', 'house_passage': house_passage, 'enacted': enacted,
    }
    bill.update(extra)
    return bill


def write_json(path, payload):
    with open(path, 'w', encoding='utf-8') as f:
        json.dump(payload, f)


def test_status_flags():
    bill = convert_bill(api_bill(house_passage='2009-05-01', enacted='2009-07-01'), ['B000574'])
    assert bill.passed_house and bill.enacted
    assert bill.passed_house_date == datetime.date(2009, 5, 1)
    assert (bill.chamber, bill.bill_type) == (Chamber.HOUSE, BillType.BILL)
    assert bill.participants == frozenset({'P000197', 'B000574'})

    pending = convert_bill(api_bill(), [])
    assert not pending.passed_house and not pending.enacted
    assert pending.passed_house_date is None


def test_bill_type_sets_chamber():
    bill = convert_bill(api_bill(bill_id='sres9-111', bill_type='sres'), [])
    assert (bill.chamber, bill.bill_type) == (Chamber.SENATE, BillType.SIMPLE_RESOLUTION)
    with pytest.raises(ValueError):
        convert_bill(api_bill(bill_type='xx'), [])


def test_folder_conversion(tmp_path):
    raw = tmp_path / 'raw'
    raw.mkdir()
    # wrapped API response, cosponsors in a sibling file
    write_json(raw / 'hr2-111.json', {'status': 'OK', 'results': [api_bill(house_passage='2009-04-01')]})
    write_json(raw / 'hr2-111_cosponsors.json',
               {'status': 'OK', 'results': [{'cosponsors': [{'cosponsor_id': 'B000574'}, {'cosponsor_id': 'C001037'}]}]})
    # inline cosponsor list
    write_json(raw / 'hr1-111.json', api_bill(bill_id='hr1-111', introduced_date='2009-01-06',
                                              cosponsor_ids=['C001037']))
    write_json(raw / 'broken.json', {'bill_id': 'hr3-111'})

    output = tmp_path / 'bills.jsonl'
    bills = prepare_bills(str(raw), str(output))
    assert [b.bill_id for b in bills] == ['hr1-111', 'hr2-111']
    assert bills[1].cosponsor_ids == frozenset({'B000574', 'C001037'})
    assert read_bills(str(output)) == bills
