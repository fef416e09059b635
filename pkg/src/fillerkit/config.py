"""Flat key=value config files overlaying CLI defaults.

Lines look like ``epochs = 12`` or ``label_set = "coarse5"``; ``#`` starts
a comment. Values parse as JSON when possible (numbers, booleans, quoted
strings, lists) and fall back to the bare string.
"""

from __future__ import annotations

import json
from pathlib import Path


class ConfigError(ValueError):
    pass


def load_config(path) -> dict:
    items: dict[str, object] = {}
    for line_no, raw in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{line_no}: expected 'key = value'")
        key, _, value = line.partition("=")
        key = key.strip()
        value = value.strip()
        if not key:
            raise ConfigError(f"{path}:{line_no}: empty key")
        try:
            items[key] = json.loads(value)
        except json.JSONDecodeError:
            items[key] = value
    return items


def resolve(cli_value, config: dict, key: str, default):
    """CLI flag wins over config file wins over default."""
    if cli_value is not None:
        return cli_value
    if key in config:
        return config[key]
    return default
