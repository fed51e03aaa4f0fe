"""Frozen empirical tolerances for the experiment verdicts.

The quantitative claims being checked are asymptotic with unspecified
constants, so the regression anchors are measured once at small scale
(scripts/freeze_fixtures.py) and frozen here; verdicts assert against the
frozen brackets rather than inventing ground truth.
"""

from __future__ import annotations

import json
from importlib import resources

__all__ = ["load_fixtures", "FIXTURES_VERSION"]

FIXTURES_VERSION = 1


def load_fixtures() -> dict:
    with resources.files("signflow").joinpath("fixtures.json").open() as fh:
        data = json.load(fh)
    if data.get("version") != FIXTURES_VERSION:
        raise RuntimeError(
            f"fixtures version {data.get('version')} does not match code "
            f"version {FIXTURES_VERSION}"
        )
    return data
