"""Known standard-library / framework modules and named addresses.

Loaded from a versioned data file so the whitelist can evolve without code
changes. Unknown addresses are treated conservatively by the verifier.
"""

from __future__ import annotations

import json
from functools import lru_cache
from importlib import resources

from .ir.types import normalize_address


@lru_cache(maxsize=1)
def _table() -> dict:
    raw = resources.files("mad.data").joinpath("builtins.json").read_text("utf-8")
    return json.loads(raw)


@lru_cache(maxsize=1)
def named_addresses() -> dict[str, str]:
    """Named address aliases (e.g. 'sui') -> normalized 64-hex address."""
    return {name: normalize_address(addr) for name, addr in _table()["named_addresses"].items()}


@lru_cache(maxsize=1)
def builtin_modules() -> frozenset[tuple[str, str]]:
    """Set of (normalized address, module name) for whitelisted framework modules."""
    pairs = set()
    for addr, modules in _table()["modules"].items():
        norm = normalize_address(addr)
        for m in modules:
            pairs.add((norm, m))
    return frozenset(pairs)


@lru_cache(maxsize=1)
def builtin_macros() -> frozenset[str]:
    return frozenset(_table()["macros"])


def resolve_named_address(name: str) -> str | None:
    return named_addresses().get(name)
