"""Flat `section.key = value` run configuration."""

from __future__ import annotations

import hashlib


class ConfigError(ValueError):
    pass


def _parse_value(raw: str):
    raw = raw.strip()
    if "," in raw:
        return [_parse_scalar(p) for p in raw.split(",") if p.strip()]
    return _parse_scalar(raw)


def _parse_scalar(raw: str):
    raw = raw.strip()
    for cast in (int, float):
        try:
            return cast(raw)
        except ValueError:
            pass
    return raw


def load_config(path: str) -> dict:
    cfg = {}
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc}") from exc
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'section.key = value'")
        key, raw = line.split("=", 1)
        key = key.strip()
        if "." not in key:
            raise ConfigError(f"line {lineno}: key must be 'section.key'")
        cfg[key] = _parse_value(raw)
    cfg["_hash"] = hashlib.sha256(text.encode()).hexdigest()[:16]
    return cfg


def as_floats(value) -> list:
    if isinstance(value, (int, float)):
        return [float(value)]
    return [float(v) for v in value]
