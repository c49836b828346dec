"""Composite Simpson integration with panel doubling."""

from __future__ import annotations

from collections.abc import Callable

import numpy as np


def simpson(f: Callable[[np.ndarray], np.ndarray], a: float, b: float, panels: int) -> float:
    """Composite Simpson rule on ``panels`` uniform panels.

    ``f`` must accept a numpy array. ``panels`` is rounded up to an even number.
    """
    if panels < 2:
        panels = 2
    if panels % 2:
        panels += 1
    if b == a:
        return 0.0
    x = np.linspace(a, b, panels + 1)
    y = np.asarray(f(x), dtype=float)
    h = (b - a) / panels
    return float(h / 3.0 * (y[0] + y[-1] + 4.0 * y[1:-1:2].sum() + 2.0 * y[2:-1:2].sum()))


def adaptive_simpson(
    f: Callable[[np.ndarray], np.ndarray],
    a: float,
    b: float,
    panels: int = 10_000,
    rtol: float = 1e-6,
    max_panels: int = 2_000_000,
) -> float:
    """Composite Simpson, doubling the panel count until successive estimates agree.

    Starts at ``panels`` and stops once the relative change drops below
    ``rtol`` or ``max_panels`` is reached.

    Returns
    -------
    float
        The last (finest) estimate.
    """
    prev = simpson(f, a, b, panels)
    while panels * 2 <= max_panels:
        panels *= 2
        cur = simpson(f, a, b, panels)
        if abs(cur - prev) <= rtol * abs(cur) or cur == prev:
            return cur
        prev = cur
    return prev
