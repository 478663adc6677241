"""Translation settings and their YAML file form.

Example file::

    package: cloud.ontology
    strategy: ledger          # or "hash" (default)
    group_gap: 10
    property_modes:
      ex:has: embed
      ex:hasMultiple: reference_plural
      ex:ownedBy: reference_singular
    plural_exceptions:
      person: people          # Person targets become people_ids
    field_name_overrides:
      ex:hasBackup: backup_storage

Property keys may be abbreviated with any prefix of the ontology or given
as absolute IRIs.
"""

from __future__ import annotations

from dataclasses import dataclass, field, fields
from typing import Dict

import yaml

from .model import MODES

HASH = "hash"
LEDGER = "ledger"
STRATEGIES = (HASH, LEDGER)


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class TranslateConfig:
    package: str = "owl.generated"
    syntax: str = "proto3"
    options_import: str = "owl/options.proto"
    strategy: str = HASH
    group_gap: int = 0
    property_modes: Dict[str, str] = field(default_factory=dict)
    plural_exceptions: Dict[str, str] = field(default_factory=dict)
    field_name_overrides: Dict[str, str] = field(default_factory=dict)

    def __post_init__(self):
        if self.strategy not in STRATEGIES:
            raise ConfigError(f"unknown numbering strategy {self.strategy!r}")
        if self.syntax != "proto3":
            raise ConfigError("only proto3 output is supported")
        if isinstance(self.group_gap, bool) or not isinstance(self.group_gap, int) or self.group_gap < 0:
            raise ConfigError("group_gap must be a non-negative integer")
        for prop, mode in self.property_modes.items():
            if mode not in MODES:
                raise ConfigError(f"property {prop}: mode must be one of {', '.join(MODES)}, not {mode!r}")


def load_config(path) -> TranslateConfig:
    """Read a YAML config; ``OSError`` propagates, bad content raises :class:`ConfigError`."""
    with open(path, encoding="utf-8") as fh:
        try:
            data = yaml.safe_load(fh) or {}
        except yaml.YAMLError as exc:
            raise ConfigError(f"{path}: {exc}") from None
    return config_from_mapping(data)


def config_from_mapping(data) -> TranslateConfig:
    if not isinstance(data, dict):
        raise ConfigError("configuration must be a mapping")
    known = {f.name for f in fields(TranslateConfig)}
    unknown = sorted(set(data) - known)
    if unknown:
        raise ConfigError(f"unknown configuration keys: {', '.join(unknown)}")
    for key in ("property_modes", "plural_exceptions", "field_name_overrides"):
        value = data.get(key)
        if value is not None and not isinstance(value, dict):
            raise ConfigError(f"{key} must be a mapping")
        if value is not None:
            data = {**data, key: {str(k): str(v) for k, v in value.items()}}
    return TranslateConfig(**{k: v for k, v in data.items() if v is not None})
