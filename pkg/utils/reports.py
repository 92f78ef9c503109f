import os
import logging

import pandas as pd

logger = logging.getLogger(__name__)

FLOAT_FORMAT = '%.10g'
FOOTER_PREFIX = '# provenance:'


def provenance_line(config_hash, input_digests):
    """One footer line: config hash followed by name=sha256 for every input file."""
    parts = [f"config_sha256={config_hash}"]
    parts += [f"{name}={digest}" for name, digest in sorted(input_digests.items())]
    return f"{FOOTER_PREFIX} {' '.join(parts)}"


def save_table(frame: pd.DataFrame, path, provenance=None, sep=','):
    """Header row, data rows, then the provenance footer; output is byte-stable."""
    os.makedirs(os.path.dirname(path) or '.', exist_ok=True)
    body = frame.to_csv(index=False, sep=sep, float_format=FLOAT_FORMAT, lineterminator='\n', na_rep='')
    with open(path, 'w', encoding='utf-8', newline='\n') as f:
        f.write(body)
        if provenance:
            f.write(provenance + '\n')
    logger.info("Table saved to %s", path)
    return path


def read_table(path, sep=','):
    """Read a table written by save_table, ignoring the provenance footer."""
    return pd.read_csv(path, sep=sep, comment='#')


def read_provenance(path):
    with open(path, 'r', encoding='utf-8') as f:
        lines = [line.rstrip('\n') for line in f if line.startswith(FOOTER_PREFIX)]
    if not lines:
        return {}
    return dict(part.split('=', 1) for part in lines[-1][len(FOOTER_PREFIX):].split())
