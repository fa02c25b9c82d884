"""Strict-JSON conversion shared by the OA log and the CLI reports."""

import math

import numpy as np


def finite(v):
    """Non-finite floats become ``"inf"``/``"-inf"`` strings, NaN becomes None."""
    if isinstance(v, float) and not math.isfinite(v):
        return None if math.isnan(v) else ("inf" if v > 0 else "-inf")
    return v


def clean(obj):
    """Recursively convert numpy scalars/arrays and non-finite floats for json.dumps."""
    if isinstance(obj, dict):
        return {k: clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple, np.ndarray)):
        return [clean(v) for v in obj]
    if isinstance(obj, np.generic):
        return clean(obj.item())
    return finite(obj)
