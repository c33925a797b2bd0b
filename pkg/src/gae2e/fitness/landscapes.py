"""Analytic test landscapes mapped into ``[0, 1]`` (maximized).

Each landscape acts on the unit-normalized coordinates
``t = (v - lower) / (upper - lower)`` and peaks at the box centre ``t = 0.5``
with value exactly 1.0.
"""

from __future__ import annotations

import numpy as np

PLATEAU_LEVELS = 9  # odd so the centre cell is centred on t = 0.5
_RASTRIGIN_A = 10.0
_RASTRIGIN_HALF_WIDTH = 5.12
# per-coordinate upper bound of x^2 - A cos(2 pi x) + A on the box
_RASTRIGIN_CAP = _RASTRIGIN_HALF_WIDTH**2 + 2 * _RASTRIGIN_A


def sphere(t: np.ndarray) -> float:
    t = np.asarray(t, dtype=np.float64)
    return float(1.0 - 4.0 * np.mean((t - 0.5) ** 2))


def rastrigin(t: np.ndarray) -> float:
    x = _RASTRIGIN_HALF_WIDTH * (2.0 * np.asarray(t, dtype=np.float64) - 1.0)
    f = x**2 - _RASTRIGIN_A * np.cos(2.0 * np.pi * x) + _RASTRIGIN_A
    return float(1.0 - np.mean(f) / _RASTRIGIN_CAP)


def plateau(t: np.ndarray) -> float:
    """Sphere evaluated at the centre of the cell each coordinate falls in."""
    t = np.asarray(t, dtype=np.float64)
    cell = np.minimum(np.floor(t * PLATEAU_LEVELS), PLATEAU_LEVELS - 1)
    return sphere((cell + 0.5) / PLATEAU_LEVELS)


LANDSCAPES = {
    "sphere": sphere,
    "rastrigin": rastrigin,
    "rastrigin-like": rastrigin,
    "plateau": plateau,
}


def landscape_value(name: str, v, lower, upper) -> float:
    try:
        fn = LANDSCAPES[name]
    except KeyError:
        raise ValueError(f"unknown landscape {name!r}; choose from {sorted(LANDSCAPES)}") from None
    t = (np.asarray(v, dtype=np.float64) - lower) / (np.asarray(upper) - lower)
    return min(1.0, max(0.0, fn(t)))
