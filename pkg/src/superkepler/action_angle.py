"""Time-angle coordinates: Kepler equations, orbit elements and the chart from phase space.

Anomalies are handled in the dimensionless eccentric anomaly ``u``.  The
elliptic time since perihelion is ``a^{3/2} (u - e sin u)`` with period
``2 pi a^{3/2}``.  For hyperbolic orbits the formula ``a^{3/2} (u - e sinh u)``
is the default, ``HyperbolicTime.DECREASING``; it runs backwards relative to
physical time, and ``HyperbolicTime.INCREASING`` negates it.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import _kernels
from .kepler import Region, angular_momentum, classify_region, hamiltonian, runge_lenz
from .lie_poisson import casimir, darboux_forward, momentum_map
from .phase import DomainError, as_array
from .structure import Algebra

TWO_PI = 2.0 * math.pi
CIRCULAR_E = 1e-9


class HyperbolicTime(str, enum.Enum):
    DECREASING = "decreasing"  # tau = a^{3/2} (u - e sinh u)
    INCREASING = "increasing"  # tau = a^{3/2} (e sinh u - u)


def _scalar_or_array(x):
    return float(x) if np.ndim(x) == 0 else x


def solve_kepler_elliptic(mean_anomaly, e, tol: float = 1e-12):
    """Eccentric anomaly ``u`` with ``u - e sin u = mean_anomaly``, same 2 pi branch.

    Newton from ``u0 = mean_anomaly`` (reduced to [-pi, pi)), with bisection
    as a fallback.  Accepts scalars or arrays.
    """
    e_arr = np.asarray(e, dtype=float)
    if np.any((e_arr < 0) | (e_arr >= 1)) or not np.all(np.isfinite(e_arr)):
        raise ValueError("elliptic Kepler equation needs 0 <= e < 1")
    if tol <= 0:
        raise ValueError("tol must be positive")
    return _scalar_or_array(_kernels.kepler_elliptic(mean_anomaly, e_arr, tol))


def solve_kepler_hyperbolic(mean_anomaly, e, tol: float = 1e-12):
    """Root ``u`` of ``u - e sinh u = mean_anomaly`` (unique: the map is decreasing)."""
    e_arr = np.asarray(e, dtype=float)
    if np.any(e_arr <= 1) or not np.all(np.isfinite(e_arr)):
        raise ValueError("hyperbolic Kepler equation needs e > 1")
    if tol <= 0:
        raise ValueError("tol must be positive")
    return _scalar_or_array(_kernels.kepler_hyperbolic(mean_anomaly, e_arr, tol))


@dataclass(frozen=True)
class OrbitElements:
    algebra: Algebra
    I: float
    a: float
    e: float
    Msq: float

    @property
    def period(self) -> Optional[float]:
        return TWO_PI * self.a**1.5 if self.algebra is Algebra.SO3 else None

    @property
    def perihelion(self) -> float:
        return self.a * (1.0 - self.e) if self.algebra is Algebra.SO3 else self.a * (self.e - 1.0)


def orbit_elements(z) -> OrbitElements:
    z = as_array(z)
    region = classify_region(z)
    if region not in (Region.U_MINUS, Region.U_PLUS):
        raise DomainError(f"orbit elements undefined on {region.value}")
    h = float(hamiltonian()(z))
    msq = float(angular_momentum()(z)) ** 2
    # |A| instead of sqrt(1 + 2 H M^2): no cancellation near e = 0
    e = eccentricity_from_runge_lenz(z)
    if region is Region.U_MINUS:
        return OrbitElements(Algebra.SO3, h, -0.5 / h, e, msq)
    return OrbitElements(Algebra.SO21, h, 0.5 / h, e, msq)


def radius_at_anomaly(el: OrbitElements, u):
    if el.algebra is Algebra.SO3:
        return el.a * (1.0 - el.e * np.cos(u))
    return el.a * (el.e * np.cosh(u) - 1.0)


def hamiltonian_in_action(el: OrbitElements) -> float:
    # the energy is the action itself
    return el.I


@dataclass(frozen=True)
class ActionAngleState:
    """Generalised action-angle values of a phase point.

    ``time_angle`` is the elliptic time since perihelion reduced modulo the
    true period ``2 pi a^{3/2}`` or the hyperbolic ``tau`` under the chosen
    sign convention.  ``mean_anomaly`` is the same quantity in units of
    ``a^{3/2}`` (in [0, 2 pi) for ellipses) and ``literal_alpha`` is the time
    since perihelion reduced modulo 2 pi.  ``angle`` is ``None`` for
    hyperbolic points with ``|x2| <= |x3|``, which the lambda chart misses.
    """

    algebra: Algebra
    I: float
    x1: float
    angle: Optional[float]
    time_angle: float
    elements: OrbitElements
    anomaly: float
    mean_anomaly: float
    branch: int = 1
    literal_alpha: Optional[float] = None
    hyperbolic_time: Optional[HyperbolicTime] = None
    coalgebra: tuple = ()


def eccentric_anomaly(z, el: OrbitElements) -> float:
    """Recover ``u`` from ``e cos u = 1 - r/a`` (resp. ``e cosh u = 1 + r/a``).

    The radial velocity fixes the sign: ``e sin u = (p, q) / sqrt(a)`` and
    ``e sinh u = (p, q) / sqrt(a)``.  Circular orbits (``e < 1e-9``) use the
    polar angle of q, oriented along the motion.
    """
    z = as_array(z)
    q, p = z[:2], z[2:]
    r = math.hypot(q[0], q[1])
    pq = float(p @ q)
    if el.algebra is Algebra.SO3:
        if el.e < CIRCULAR_E:
            m12 = float(angular_momentum()(z))
            return math.copysign(1.0, m12) * math.atan2(q[1], q[0])
        return math.atan2(pq / math.sqrt(el.a), 1.0 - r / el.a)
    return math.asinh(pq / (math.sqrt(el.a) * el.e))


def chart_forward(z, hyperbolic_time=HyperbolicTime.DECREASING) -> ActionAngleState:
    """Map a regular phase point to (I, x1, gamma, alpha) or (I, x1, lambda, tau)."""
    z = as_array(z)
    el = orbit_elements(z)
    x = momentum_map(el.algebra, z)
    u = eccentric_anomaly(z, el)
    scale = el.a**1.5
    if el.algebra is Algebra.SO3:
        mean = u - el.e * math.sin(u)
        t_peri = scale * mean
        d = darboux_forward(el.algebra, x)
        return ActionAngleState(
            el.algebra, d.I, d.x1, d.angle,
            time_angle=t_peri % (TWO_PI * scale),
            elements=el, anomaly=u, mean_anomaly=mean % TWO_PI,
            literal_alpha=t_peri % TWO_PI,
            coalgebra=tuple(x.array),
        )
    hyperbolic_time = HyperbolicTime(hyperbolic_time)
    mean = u - el.e * math.sinh(u)
    tau = scale * mean
    if hyperbolic_time is HyperbolicTime.INCREASING:
        tau = -tau
    if x.x2 ** 2 > x.x3 ** 2:
        d = darboux_forward(el.algebra, x)
        angle, branch = d.angle, d.branch
    else:
        angle, branch = None, 1 if x.x2 >= 0 else -1
    return ActionAngleState(
        el.algebra, casimir(el.algebra, x.array), x.x1, angle, time_angle=tau, elements=el, anomaly=u,
        mean_anomaly=mean, branch=branch, hyperbolic_time=hyperbolic_time,
        coalgebra=tuple(x.array),
    )


def eccentricity_from_runge_lenz(z) -> float:
    z = as_array(z)
    return float(np.hypot(runge_lenz(1)(z), runge_lenz(2)(z)))
