"""Frozen regression constants.

The values live in ``constants.json`` next to this module and are produced
by ``scripts/calibrate.py``.  Checks read them through :func:`load_constants`
so a run can point at an alternative file.
"""
from __future__ import annotations

import json
from importlib import resources
from pathlib import Path

__all__ = ["load_constants", "REQUIRED_KEYS"]

REQUIRED_KEYS = (
    "version",
    "length_product_window",
    "gap_k4_bound",
    "gap_growth_C_bound",
    "assumption_c_k4_bound",
    "oscillation",
)


def load_constants(path: str | Path | None = None) -> dict:
    if path is None:
        text = resources.files("slitflow").joinpath("constants.json").read_text()
    else:
        text = Path(path).read_text()
    data = json.loads(text)
    missing = [k for k in REQUIRED_KEYS if k not in data]
    if missing:
        raise ValueError(f"constants file lacks {', '.join(missing)}")
    return data
