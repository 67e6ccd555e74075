"""Brute-force check of the exact conjugation engine against a sampled grid."""

import numpy as np

from ._checks import rng_from, scaled_tol
from .errors import UnsupportedVariantError
from .functions import GridOracle
from .reports import Tally

TOL = 1e-9


def grid_oracle_report(f, instance="fn", seed=0, points=8, step=0.01, lo=-5.0, hi=5.0,
                       expect="pass"):
    """Compare ``f*`` with the discrete conjugate of ``f`` on a grid.

    Dual test points are subgradients of ``f`` at grid points well inside the
    window and the domain, so a maximizer of ``<y, .> - f`` lies inside the
    window. For each test point the grid value must not exceed ``f*(y)`` and
    must fall short of it by at most ``2 step L``, with ``L`` the local
    finite-difference slope of ``<y, .> - f`` around the maximizer.
    """
    rng = rng_from(seed)
    t = Tally(TOL)
    grid = GridOracle.from_function(f, lo=lo, hi=hi, step=step)
    inner = grid.interior_points(margin=2)
    width = hi - lo
    keep = np.all((inner >= lo + 0.1 * width) & (inner <= hi - 0.1 * width), axis=1)
    inner = inner[keep] if np.any(keep) else inner
    if inner.shape[0] == 0:
        t.notes["skipped"] = "no interior grid points"
        return t.report("grid_oracle", instance, seed, expect)
    picks = inner[rng.choice(inner.shape[0], size=min(points, inner.shape[0]), replace=False)]
    for b0 in picks:
        try:
            y = f.subgradient(b0)
        except UnsupportedVariantError:
            t.notes["skipped"] = "no subgradient oracle"
            break
        exact = f.conjugate(y)
        approx = grid.conjugate(y)
        L = grid.lipschitz_bound(y, center=b0, radius=3 * step)
        tol = scaled_tol(TOL, exact, approx)
        t.add(approx - exact, tol=tol, where=y.tolist())
        t.add(exact - approx - 2 * step * L, tol=tol, where=y.tolist())
    t.notes["grid_points"] = int(grid.samples.shape[0])
    return t.report("grid_oracle", instance, seed, expect, min_trials=2)
