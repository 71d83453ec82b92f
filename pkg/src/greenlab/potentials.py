"""Green potentials G(omega) and iterated potentials G((G omega)^(s-1) d omega).

Atomic sources are exact weighted sums.  Grid sources use the midpoint
rule; the interval kernel is bounded on (0,1)^2 so no diagonal correction
is needed there, while a Riesz kernel on a grid gets its singular cell
(target inside the source cell) integrated by 16-fold local subdivision.

Everything here is a pure function of its inputs; evaluation over targets
is order-independent and sums are fixed-order.
"""

from __future__ import annotations

from typing import Optional, Union

import numpy as np

from .extreal import ext_power, masked_mul, weighted_sum
from .kernels import MATRIX, RIESZ, Kernel
from .measures import GRID, Field, Measure

Targets = Union[Measure, np.ndarray, list, None]

_SUBDIV = 16  # singular-cell refinement for Riesz-on-grid


def _check_compat(kernel: Kernel, omega: Measure) -> None:
    if omega.variant == GRID and kernel.variant == MATRIX:
        raise ValueError("grid measures need an interval1d or riesz kernel")
    if omega.variant == GRID and kernel.variant == RIESZ and kernel.dim != 1:
        raise ValueError("riesz-on-grid requires dim == 1")


def _target_sites(kernel: Kernel, omega: Measure, targets: Targets):
    """Resolve targets to (sites, measure-or-None for the returned Field)."""
    if targets is None:
        return omega.support_sites, omega
    if isinstance(targets, Measure):
        return targets.support_sites, targets
    return np.asarray(targets), None


def quadrature_gram(kernel: Kernel, target_sites, omega: Measure) -> np.ndarray:
    """Effective kernel matrix against omega's integration weights.

    For grid sources with a Riesz kernel, entries whose target falls inside
    the source cell are replaced by the mean kernel value over a 16-fold
    subdivision of that cell, which keeps the quadrature error of the
    singular cell bounded while the smooth part stays O(N^-2).
    """
    _check_compat(kernel, omega)
    gram = kernel.gram(target_sites, omega.support_sites)
    if omega.variant == GRID and kernel.variant == RIESZ:
        xs = np.asarray(target_sites, dtype=float).reshape(-1)
        n = omega.n_cells
        width = omega.cell_width
        # nearest-midpoint cell; the slack keeps edge-exact targets covered
        cell = np.clip(np.round(xs * n - 0.5).astype(int), 0, n - 1)
        sub_offsets = (np.arange(_SUBDIV) + 0.5) / _SUBDIV  # within one cell
        for i, (x, j) in enumerate(zip(xs, cell)):
            if abs(x - (j + 0.5) * width) <= 0.5 * width * (1.0 + 1e-9):
                sub_mids = (j + sub_offsets) * width
                gram[i, j] = float(np.mean(kernel.gram([x], sub_mids)[0]))
    return gram


def potential_values(kernel: Kernel, omega: Measure, target_sites) -> np.ndarray:
    gram = quadrature_gram(kernel, target_sites, omega)
    return weighted_sum(gram, omega.integration_weights)


def potential(kernel: Kernel, omega: Measure, targets: Targets = None) -> Field:
    """The potential of omega evaluated at the given targets.

    ``targets`` may be another measure (evaluate on its support), an
    explicit site array, or None for omega's own support.  Values live in
    [0, +inf]; +inf appears only through singular Riesz diagonals.
    """
    sites, ref = _target_sites(kernel, omega, targets)
    vals = potential_values(kernel, omega, sites)
    return Field(ref, vals)


def iterated_potential(kernel: Kernel, omega: Measure, s: float,
                       targets: Targets = None) -> Field:
    """G((G omega)^(s-1) d omega) at the targets.

    The base potential is computed on omega's own support first; the
    reweighted measure may carry +inf weights (for s > 1 against a
    singular kernel), which propagate through extended-real sums instead
    of erroring.
    """
    if not s > 0:
        raise ValueError("s must be > 0")
    base = potential_values(kernel, omega, omega.support_sites)
    factor = ext_power(base, s - 1.0)
    reweights = masked_mul(omega.integration_weights, factor)
    sites, ref = _target_sites(kernel, omega, targets)
    gram = quadrature_gram(kernel, sites, omega)
    return Field(ref, weighted_sum(gram, reweights))


def domain_sites(kernel: Kernel, *meas: Optional[Measure]):
    """The natural evaluation set standing in for the whole domain.

    Matrix kernels: every matrix site.  Grid measures: the common grid's
    midpoints.  Coordinate atoms: the (sorted, deduplicated) union of all
    atom sites, the only points available.
    """
    if kernel.variant == MATRIX:
        return np.arange(kernel.n_sites)
    present = [m for m in meas if m is not None]
    if not present:
        raise ValueError("need at least one measure to infer the site set")
    grids = [m for m in present if m.variant == GRID]
    if grids:
        n = grids[0].n_cells
        if any(m.n_cells != n for m in grids) or len(grids) != len(present):
            raise ValueError("all measures must share one grid")
        return grids[0].midpoints
    sites = [np.asarray(m.sites, dtype=float) for m in present]
    stacked = np.concatenate(sites, axis=0)
    return np.unique(stacked, axis=0) if stacked.ndim > 1 else np.unique(stacked)


def site_positions(eval_sites, sites) -> np.ndarray:
    """Positions of ``sites`` inside ``eval_sites`` (exact matches)."""
    eval_sites = np.asarray(eval_sites)
    sites = np.asarray(sites)
    if eval_sites.ndim == 1:
        order = np.argsort(eval_sites, kind="stable")
        pos = order[np.searchsorted(eval_sites[order], sites)]
        if not np.array_equal(eval_sites[pos], sites):
            raise ValueError("some sites are missing from the evaluation set")
        return pos
    lookup = {tuple(row): i for i, row in enumerate(eval_sites)}
    try:
        return np.array([lookup[tuple(row)] for row in sites], dtype=int)
    except KeyError:
        raise ValueError("some sites are missing from the evaluation set") from None
