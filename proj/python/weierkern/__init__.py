"""Kernels and differentials on intersection curves."""

import json

from _weierkern import (
    SpaceCurve,
    WeierkernError,
    genus_complete_intersection,
)

__all__ = [
    "SpaceCurve",
    "WeierkernError",
    "genus_complete_intersection",
    "load_curve",
]


def load_curve(path):
    """Build a SpaceCurve from a curve file (three-variable JSON)."""
    with open(path) as handle:
        data = json.load(handle)
    variables = data["variables"]
    if len(variables) != 3:
        raise ValueError("load_curve needs a three-variable curve file")
    return SpaceCurve(data["f"], data["g"], data.get("tolerance", 1e-9))
