"""Seeded sampling of regular phase points.

Points are drawn with ``numpy.random.Generator(PCG64(seed))``: q uniform (by
area) in the annulus 0.5 <= r <= 3, p uniform in [-2, 2]^2, rejecting points
with |M12| < 0.1 or |H| < 0.05.  Draws happen in fixed-size blocks so the
accepted sequence depends only on the seed.
"""
from __future__ import annotations

import numpy as np

GENERATOR = "numpy.random.Generator(PCG64)"
R_MIN, R_MAX = 0.5, 3.0
P_MAX = 2.0
M_MARGIN = 0.1
H_MARGIN = 0.05
_BLOCK = 4096

_REGIMES = ("U", "so3", "so21")


def _draw_block(rng):
    rho = np.sqrt(rng.uniform(R_MIN**2, R_MAX**2, _BLOCK))
    theta = rng.uniform(0.0, 2.0 * np.pi, _BLOCK)
    p = rng.uniform(-P_MAX, P_MAX, (_BLOCK, 2))
    return np.column_stack([rho * np.cos(theta), rho * np.sin(theta), p])


def _energy(z):
    return 0.5 * (z[:, 2] ** 2 + z[:, 3] ** 2) - 1.0 / np.hypot(z[:, 0], z[:, 1])


def _angmom(z):
    return z[:, 0] * z[:, 3] - z[:, 1] * z[:, 2]


def sample_points(n: int, seed: int, regime: str = "U", accept=None) -> np.ndarray:
    """Return ``n`` accepted phase points as an ``(n, 4)`` array.

    ``regime`` is ``"U"`` (either sign of H), ``"so3"`` (H < 0) or ``"so21"``
    (H > 0).  ``accept`` is an optional extra vectorised predicate.
    """
    if regime not in _REGIMES:
        raise ValueError(f"regime must be one of {_REGIMES}")
    if n < 0:
        raise ValueError("n must be non-negative")
    rng = np.random.Generator(np.random.PCG64(seed))
    found = []
    total = 0
    while total < n:
        z = _draw_block(rng)
        h = _energy(z)
        ok = (np.abs(_angmom(z)) >= M_MARGIN) & (np.abs(h) >= H_MARGIN)
        if regime == "so3":
            ok &= h < 0
        elif regime == "so21":
            ok &= h > 0
        if accept is not None:
            ok &= accept(z)
        found.append(z[ok])
        total += int(ok.sum())
    return np.concatenate(found)[:n] if n else np.empty((0, 4))


def orbit_shape(z):
    """Semi-axis ``a``, eccentricity ``e`` and closest-approach radius for each row."""
    z = np.atleast_2d(z)
    h = _energy(z)
    m = _angmom(z)
    e = np.sqrt(np.maximum(1.0 + 2.0 * h * m * m, 0.0))
    a = 1.0 / (2.0 * np.abs(h))
    peri = np.where(h < 0, a * (1.0 - e), a * (e - 1.0))
    return a, e, peri


def sample_orbits(n: int, seed: int, regime: str, min_perihelion: float = 0.75,
                  max_eccentricity: float | None = None) -> np.ndarray:
    """Sample starting points whose orbits stay clear of the centre.

    Fixed-step Verlet accuracy is governed by the closest approach; orbits
    with perihelion below ``min_perihelion`` are rejected.
    """
    def accept(z):
        _, e, peri = orbit_shape(z)
        ok = peri >= min_perihelion
        if max_eccentricity is not None:
            ok &= e <= max_eccentricity
        return ok

    return sample_points(n, seed, regime, accept=accept)
