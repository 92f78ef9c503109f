"""
Convert locally saved ProPublica Congress API bill responses into the bills
JSONL input.

Status -> flag mapping:
    passed_house      = house_passage is not null
    passed_house_date = house_passage
    enacted           = enacted is not null
Chamber and bill type come from the bill-type code (hr, hres, s, ...).
Cosponsors come from the bill's own `cosponsor_ids` list if present, otherwise
from `<bill_id>_cosponsors.json` next to it (cosponsors endpoint response).
"""
import os
import json
import argparse
import logging

from tqdm import tqdm

from data.ingest import BILL_TYPE_CODES, bill_from_dict, write_bills
from utils.log_utils import setup_logger

logger = logging.getLogger(__name__)


def _unwrap(payload):
    # API responses wrap the object as {"status": "OK", "results": [...]}
    if isinstance(payload, dict) and 'results' in payload:
        results = payload['results']
        if len(results) != 1:
            raise ValueError(f"expecting 1 result, got {len(results)}")
        return results[0]
    return payload


def load_cosponsors(path):
    with open(path, 'r', encoding='utf-8') as f:
        payload = _unwrap(json.load(f))
    return [c['cosponsor_id'] for c in payload.get('cosponsors', []) if c.get('cosponsor_id')]


def convert_bill(bill_json, cosponsor_ids):
    bill_type = str(bill_json['bill_type']).lower()
    if bill_type not in BILL_TYPE_CODES:
        raise ValueError(f"unknown bill type code '{bill_type}'")
    _, chamber = BILL_TYPE_CODES[bill_type]
    passage = bill_json.get('house_passage')
    return bill_from_dict({
        'bill_id': bill_json['bill_id'],
        'congress': int(bill_json['congress']),
        'chamber': chamber.value,
        'bill_type': bill_type,
        'introduced_date': bill_json['introduced_date'],
        'sponsor_id': bill_json.get('sponsor_id'),
        'cosponsor_ids': list(cosponsor_ids),
        'passed_house': passage is not None,
        'passed_house_date': passage,
        'enacted': bill_json.get('enacted') is not None,
    })


def prepare_bills(input_folder, output_path):
    files = sorted(f for f in os.listdir(input_folder) if f.endswith('.json') and not f.endswith('_cosponsors.json'))
    bills = []
    n_failed = 0
    for filename in tqdm(files, desc="Converting bills"):
        path = os.path.join(input_folder, filename)
        try:
            with open(path, 'r', encoding='utf-8') as f:
                bill_json = _unwrap(json.load(f))
            cosponsors = bill_json.get('cosponsor_ids')
            if cosponsors is None:
                sibling = os.path.join(input_folder, f"{bill_json['bill_id']}_cosponsors.json")
                cosponsors = load_cosponsors(sibling) if os.path.exists(sibling) else []
            bills.append(convert_bill(bill_json, cosponsors))
        except (OSError, ValueError, KeyError, TypeError) as e:
            n_failed += 1
            logger.warning("Skipping %s: %s", filename, e)

    bills.sort(key=lambda b: (b.congress, b.introduced_date, b.bill_id))
    write_bills(bills, output_path)
    logger.info("Wrote %d bills to %s (%d file(s) skipped)", len(bills), output_path, n_failed)
    return bills


def main(input_folder, output_path):
    setup_logger()
    prepare_bills(input_folder, output_path)


if __name__ == "__main__":
    parser = argparse.ArgumentParser(description="Convert ProPublica bill JSON files into the bills JSONL input")
    parser.add_argument('--input_folder', type=str, required=True, help='Folder of bill JSON files (and *_cosponsors.json)')
    parser.add_argument('--output_path', type=str, required=True, help='Destination bills .jsonl file')
    args = parser.parse_args()

    main(args.input_folder, args.output_path)
