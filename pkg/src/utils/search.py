"""1-D minimization on an interval: grid prescan, then golden-section."""

from typing import Callable

import numpy as np
from scipy.optimize import minimize_scalar

PRESCAN_POINTS = 65


def golden_minimize(
    f: Callable[[float], float],
    lo: float,
    hi: float,
    points: int = PRESCAN_POINTS,
    open_interval: bool = False,
) -> tuple[float, float]:
    """(x, f(x)) near the global minimum of ``f`` on [lo, hi].

    The prescan picks the best grid point; when it is a strict interior
    minimum its neighbours bracket a golden-section refinement. Flat or
    boundary minima return the grid point itself. ``open_interval`` keeps
    the scan off both endpoints.
    """
    if open_interval:
        xs = np.linspace(lo, hi, points + 2)[1:-1]
    else:
        xs = np.linspace(lo, hi, points)
    fs = np.array([f(float(x)) for x in xs])
    i = int(np.argmin(fs))
    best_x, best_f = float(xs[i]), float(fs[i])
    if 0 < i < xs.size - 1 and fs[i] < fs[i - 1] and fs[i] < fs[i + 1]:
        res = minimize_scalar(f, bracket=(xs[i - 1], xs[i], xs[i + 1]), method="golden")
        if float(res.fun) <= best_f:
            best_x, best_f = float(res.x), float(res.fun)
    return best_x, best_f
