"""Parsing of ``name:key=value,key=value`` strings used on the command line."""

from __future__ import annotations


def split_spec(text: str) -> tuple[str, dict[str, str]]:
    name, _, rest = text.strip().partition(":")
    name = name.strip().lower()
    if not name:
        raise ValueError(f"empty specification: {text!r}")
    params: dict[str, str] = {}
    for item in filter(None, (s.strip() for s in rest.split(","))):
        key, sep, value = item.partition("=")
        if not sep or not key.strip() or not value.strip():
            raise ValueError(f"expected key=value in {text!r}, got {item!r}")
        key = key.strip()
        if key in params:
            raise ValueError(f"duplicate parameter {key!r} in {text!r}")
        params[key] = value.strip()
    return name, params
