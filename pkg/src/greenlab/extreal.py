"""Extended-real arithmetic helpers.

Potentials and energies live on [0, +inf]; these helpers pin down the
conventions once so every module agrees:

* powers: ``inf**t = inf`` for t > 0, ``1`` for t = 0, ``0`` for t < 0,
  and symmetrically ``0**t = inf`` for t < 0;
* products inside integrals: ``0 * inf = 0`` (a null weight or a null
  kernel value contributes no mass, whatever the other factor is);
* summation: fixed-order pairwise summation (``np.sum``), so results do
  not depend on scheduling or BLAS threading.
"""

from __future__ import annotations

import numpy as np

INF = float("inf")

# guards residual denominators; avoids 0/0 without distorting any ratio
TINY = 1e-300


def ext_power(values, expo: float) -> np.ndarray:
    """Elementwise ``values**expo`` on [0, inf] with the conventions above."""
    values = np.asarray(values, dtype=float)
    with np.errstate(divide="ignore"):
        return np.power(values, expo)


def masked_mul(a, b) -> np.ndarray:
    """Elementwise product where ``0 * inf`` is 0 (integration convention)."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    with np.errstate(invalid="ignore"):
        out = a * b
    bad = np.isnan(out) & (np.isnan(a) == False) & (np.isnan(b) == False)  # noqa: E712
    if bad.any():
        out = np.where(bad, 0.0, out)
    return out


def weighted_sum(gram, weights) -> np.ndarray:
    """Sum ``gram * weights`` along the last axis with 0*inf masking.

    ``gram`` may contain +inf (singular kernel values) and ``weights`` may
    contain +inf (reweighted measures); a zero on either side kills the term.
    """
    contrib = masked_mul(gram, weights)
    return np.sum(contrib, axis=-1)


def sup_abs(values) -> float:
    values = np.asarray(values, dtype=float)
    if values.size == 0:
        return 0.0
    return float(np.max(np.abs(values)))
