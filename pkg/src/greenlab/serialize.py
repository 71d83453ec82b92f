"""JSON plumbing: non-finite floats, numpy scalars, stable digests."""

from __future__ import annotations

import hashlib
import json
import math

import numpy as np


def jsonable(obj):
    """Recursively convert to plain JSON types.

    Non-finite floats become the strings ``"inf"``, ``"-inf"``, ``"nan"``
    so reports stay valid strict JSON.
    """
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (np.floating, float)):
        x = float(obj)
        if math.isnan(x):
            return "nan"
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        return x
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    return obj


def from_jsonable(x):
    """Inverse of :func:`jsonable` for the non-finite string encoding."""
    if x == "inf":
        return float("inf")
    if x == "-inf":
        return float("-inf")
    if x == "nan":
        return float("nan")
    return x


def dumps(obj) -> str:
    return json.dumps(jsonable(obj), sort_keys=True, indent=2)


def digest(obj, length: int = 12) -> str:
    """Stable hex digest of a canonical JSON rendering of ``obj``."""
    payload = json.dumps(jsonable(obj), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(payload.encode("utf-8")).hexdigest()[:length]


def write_field_csv(path, values, sites=None) -> None:
    """Dump field samples as (site-or-cell index, value) rows."""
    import csv

    values = np.asarray(values)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["site", "value"])
        for i, v in enumerate(values):
            label = i if sites is None else jsonable(sites[i])
            writer.writerow([label, jsonable(float(v))])
