"""Checksummed reference tables shipped with the package."""
from __future__ import annotations

import hashlib
import json
from fractions import Fraction
from functools import lru_cache
from importlib import resources
from typing import Dict, Tuple

from .lattice_core import Regime

CHECKSUMS = {
    "g2corr_small_s.json": "bf0aafc2cc4f460f9beb5ded51995f5350f3155f30aaabcdd8e05ad641402c92",
    "perk_auyang.json": "9407deb73872f2b1833564c005a3f1a9c30a1ff7c4ac727a9a955121ad516633",
}


class ChecksumError(RuntimeError):
    pass


def verify(name: str) -> bytes:
    """Raw bytes of a data file after checking its sha256."""
    raw = resources.files("diagising").joinpath("data", name).read_bytes()
    digest = hashlib.sha256(raw).hexdigest()
    if digest != CHECKSUMS[name]:
        raise ChecksumError(f"{name}: sha256 {digest} does not match the recorded checksum")
    return raw


@lru_cache(maxsize=None)
def load(name: str) -> dict:
    return json.loads(verify(name))


def g2corr_reference(regime) -> Dict[Tuple[int, int], Fraction]:
    """Reference normalized ``G^(2)`` body through ``s**15``: ``{(m, n): c}``."""
    data = load("g2corr_small_s.json")[Regime.parse(regime).value]
    return {(t["m"], t["n"]): Fraction(t["numerator"], t["denominator"]) for t in data["terms"]}


def perk_auyang_table(regime) -> Dict[int, Dict[int, Fraction]]:
    """``{j: {s: p_js}}``; the term is ``p_js x**(j - 2s) / N**j``."""
    data = load("perk_auyang.json")[Regime.parse(regime).value]["table"]
    return {int(j): {int(k): Fraction(*v) for k, v in row.items()} for j, row in data.items()}
