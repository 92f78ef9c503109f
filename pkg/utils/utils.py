import os
import datetime
import hashlib
import json

import pytz
import yaml


class ConfigError(ValueError):
    """Invalid run configuration or inconsistent pipeline inputs."""


class DataError(ValueError):
    """Input data that cannot be read or violates the input schema."""


class ComputationError(RuntimeError):
    """A numerical stage failed (no convergence, nothing to summarize...)."""


def load_config(config_path):
    """YAML mapping, or plain `key = value` lines."""
    with open(config_path, 'r') as file:
        text = file.read()
    try:
        config = yaml.safe_load(text)
    except yaml.YAMLError:
        if '=' not in text:
            raise
        config = text
    if config is None or isinstance(config, dict):
        return config or {}
    return _parse_key_values(text, config_path)


def _parse_key_values(text, config_path):
    config = {}
    for line_no, line in enumerate(text.splitlines(), start=1):
        line = line.split('#', 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition('=')
        if not sep or not key.strip():
            raise ConfigError(f"{config_path}, line {line_no}: expected 'key = value', got '{line}'")
        try:
            config[key.strip()] = yaml.safe_load(value.strip())
        except yaml.YAMLError:
            config[key.strip()] = value.strip()
    return config


def flatten_config(config):
    """
    Collapse a sectioned config ({'data': {...}, 'model': {...}}) into one flat
    mapping. Flat configs pass through unchanged.
    """
    flat = {}
    for key, value in config.items():
        if isinstance(value, dict):
            for inner_key, inner_value in value.items():
                if inner_key in flat:
                    raise ConfigError(f"Config key '{inner_key}' appears in more than one section")
                flat[inner_key] = inner_value
        else:
            flat[key] = value
    return flat


def create_output_dirs(base_dir, timezone="UTC"):
    tz = pytz.timezone(timezone)
    timestamp = datetime.datetime.now(tz).strftime("%Y%m%d_%H%M%S")
    os.makedirs(os.path.join(base_dir, "logs"), exist_ok=True)
    return os.path.join(base_dir, "logs", f"run_{timestamp}.log")


def file_digest(path, chunk_size=1 << 20):
    digest = hashlib.sha256()
    with open(path, 'rb') as f:
        for chunk in iter(lambda: f.read(chunk_size), b''):
            digest.update(chunk)
    return digest.hexdigest()


def config_digest(config_dict):
    # sorted JSON keeps the hash independent of key order
    payload = json.dumps(config_dict, sort_keys=True, default=str)
    return hashlib.sha256(payload.encode('utf-8')).hexdigest()
