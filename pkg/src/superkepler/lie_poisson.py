"""Lie-Poisson geometry of so(3)* and so(2,1)*: Casimirs, momentum maps and Darboux charts."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .kepler import angular_momentum, rescaled_integrals
from .phase import DomainError, Observable, as_array, coordinate, fd_gradient
from .structure import Algebra, StructureConstants

TWO_PI = 2.0 * math.pi
ANGLE_MARGIN = 0.05

x1 = coordinate(0, "x1", dim=3)
x2 = coordinate(1, "x2", dim=3)
x3 = coordinate(2, "x3", dim=3)


def _signature(algebra: Algebra) -> np.ndarray:
    return np.array([1.0, 1.0, 1.0 if algebra is Algebra.SO3 else -1.0])


@dataclass(frozen=True)
class CoalgebraPoint:
    algebra: Algebra
    x1: float
    x2: float
    x3: float

    def __post_init__(self):
        object.__setattr__(self, "algebra", Algebra(self.algebra))
        q = self.quadratic
        if self.algebra is Algebra.SO3 and q <= 0:
            raise DomainError("so(3)* point must be nonzero")
        if self.algebra is Algebra.SO21 and q <= 0:
            raise DomainError("so(2,1)* point needs x1^2 + x2^2 - x3^2 > 0")
        if self.x3 == 0.0:
            raise DomainError("x3 = 0 lies outside the base N")

    @classmethod
    def from_array(cls, algebra, x) -> "CoalgebraPoint":
        x = np.asarray(x, dtype=float)
        return cls(algebra, float(x[0]), float(x[1]), float(x[2]))

    @property
    def array(self) -> np.ndarray:
        return np.array([self.x1, self.x2, self.x3])

    @property
    def quadratic(self) -> float:
        return float(_signature(self.algebra) @ self.array**2)

    @property
    def component(self) -> int:
        """+1 or -1: which contractible piece (sign of x3) of N the point is on."""
        return 1 if self.x3 > 0 else -1


@dataclass(frozen=True)
class DarbouxPoint:
    """Chart values (I, x1, angle) on N; angle is gamma (so3) or lambda (so21)."""

    algebra: Algebra
    I: float
    x1: float
    angle: float
    branch: int = 1

    def __post_init__(self):
        object.__setattr__(self, "algebra", Algebra(self.algebra))
        if self.algebra is Algebra.SO3:
            if not self.I < 0:
                raise DomainError("so(3) chart needs I < 0")
            if -0.5 / self.I - self.x1**2 <= 0:
                raise DomainError("so(3) chart needs -1/(2I) - x1^2 > 0")
            g = self.angle % TWO_PI
            if min(angle_distance(g, math.pi / 2), angle_distance(g, 3 * math.pi / 2)) == 0.0:
                raise DomainError("gamma = pi/2, 3pi/2 are chart boundaries")
        else:
            if not self.I > 0:
                raise DomainError("so(2,1) chart needs I > 0")
            if 0.5 / self.I - self.x1**2 <= 0:
                raise DomainError("so(2,1) chart needs 1/(2I) - x1^2 > 0")
            if self.angle == 0.0:
                raise DomainError("lambda = 0 is a chart boundary")
            if self.branch not in (1, -1):
                raise ValueError("branch must be +1 or -1")


def angle_distance(a: float, b: float) -> float:
    d = abs(a - b) % TWO_PI
    return min(d, TWO_PI - d)


# -- brackets --------------------------------------------------------------------------

def lie_poisson_bracket(c: StructureConstants, f: Observable, g: Observable, x) -> np.ndarray:
    """w(df, dg) = sum_ij c_ij^h x_h df/dx_i dg/dx_j."""
    x = as_array(x)
    w = c.bivector(x)
    return np.einsum("...i,...ij,...j->...", f.gradient(x), w, g.gradient(x))


def quadratic_casimir(algebra) -> Observable:
    """C = x1^2 + x2^2 +- x3^2."""
    sig = _signature(Algebra(algebra))
    return Observable(
        "C",
        lambda x: np.einsum("...i,i->...", x * x, sig),
        lambda x: 2.0 * x * sig,
        lambda x: np.broadcast_to(np.diag(2.0 * sig), x.shape + (3,)).copy(),
    )


def casimir_observable(algebra) -> Observable:
    algebra = Algebra(algebra)
    sign = -1.0 if algebra is Algebra.SO3 else 1.0
    C = quadratic_casimir(algebra)
    return Observable(
        "h",
        lambda x: sign * 0.5 / C.value(x),
        lambda x: (-sign * 0.5 / C.value(x) ** 2)[..., None] * C.gradient(x),
    )


def casimir(algebra, x) -> float | np.ndarray:
    """-1/2 (x1^2+x2^2+x3^2)^-1 on so(3)*, +1/2 (x1^2+x2^2-x3^2)^-1 on so(2,1)*."""
    algebra = Algebra(algebra)
    x = as_array(x)
    q = quadratic_casimir(algebra).value(x)
    if np.any(q == 0.0):
        raise DomainError("Casimir is singular where the quadratic form vanishes")
    sign = -1.0 if algebra is Algebra.SO3 else 1.0
    out = sign * 0.5 / q
    return float(out) if np.ndim(out) == 0 else out


def coadjoint_fields(algebra, x) -> np.ndarray:
    """Rows are the coadjoint vector fields eps_1, eps_2, eps_3 at x."""
    algebra = Algebra(algebra)
    a, b, c = np.asarray(x, dtype=float)
    if algebra is Algebra.SO3:
        return np.array([[0.0, c, -b], [-c, 0.0, a], [b, -a, 0.0]])
    return np.array([[0.0, -c, -b], [c, 0.0, a], [b, -a, 0.0]])


# -- momentum map ---------------------------------------------------------------------------

def momentum_map_array(algebra, z) -> np.ndarray:
    """(-L1, -L2, -M12) on U_MINUS or (-K1, -K2, -M12) on U_PLUS, batched."""
    algebra = Algebra(algebra)
    z = as_array(z)
    b1, b2 = rescaled_integrals(algebra.region)
    return -np.stack([b1(z), b2(z), angular_momentum()(z)], axis=-1)


def momentum_map(algebra, z) -> CoalgebraPoint:
    return CoalgebraPoint.from_array(algebra, momentum_map_array(algebra, z))


# -- Darboux chart ---------------------------------------------------------------------------

def darboux_forward(algebra, x) -> DarbouxPoint:
    algebra = Algebra(algebra)
    if not isinstance(x, CoalgebraPoint):
        x = CoalgebraPoint.from_array(algebra, x)
    a, b, c = x.x1, x.x2, x.x3
    if algebra is Algebra.SO3:
        if b * b + c * c <= 0:
            raise DomainError("so(3) chart needs x2^2 + x3^2 > 0")
        gamma = math.atan2(b, c) % TWO_PI
        return DarbouxPoint(algebra, casimir(algebra, x.array), a, gamma)
    if abs(b) <= abs(c):
        raise DomainError("so(2,1) chart needs |x2| > |x3|")
    branch = 1 if b > 0 else -1
    return DarbouxPoint(algebra, casimir(algebra, x.array), a, hyperbolic_angle(b, c), branch)


def hyperbolic_angle(b: float, c: float) -> float:
    """lambda with x2 = +-rho cosh(lambda), x3 = +-rho sinh(lambda), i.e. atanh(x3/x2).

    Written as a log of (x2 + x3)/(x2 - x3) so that it stays accurate near |x2| = |x3|.
    """
    return 0.5 * math.log((b + c) / (b - c))


def darboux_inverse(d: DarbouxPoint) -> CoalgebraPoint:
    if d.algebra is Algebra.SO3:
        rho = math.sqrt(-0.5 / d.I - d.x1**2)
        return CoalgebraPoint(d.algebra, d.x1, rho * math.sin(d.angle), rho * math.cos(d.angle))
    rho = math.sqrt(0.5 / d.I - d.x1**2)
    return CoalgebraPoint(d.algebra, d.x1, d.branch * rho * math.cosh(d.angle),
                          d.branch * rho * math.sinh(d.angle))


def chart_functions(algebra, base):
    """Scalar chart functions (I, x1, angle) for finite differencing near ``base``.

    The angle is unwrapped relative to its value at ``base``.
    """
    algebra = Algebra(algebra)
    base = np.asarray(base, dtype=float)
    ref = darboux_forward(algebra, base).angle

    def action(x):
        return casimir(algebra, x)

    def first(x):
        return x[0]

    if algebra is Algebra.SO3:
        def angle(x):
            g = math.atan2(x[1], x[2])
            return ref + math.remainder(g - ref, TWO_PI)
    else:
        def angle(x):
            return hyperbolic_angle(x[1], x[2])

    return action, first, angle


@dataclass
class DarbouxReport:
    algebra: str
    residuals: dict
    tol: float

    @property
    def max_residual(self) -> float:
        return max(self.residuals.values())

    @property
    def passed(self) -> bool:
        return self.max_residual <= self.tol


def verify_darboux_bracket(algebra, x, tol: float = 1e-6, h: float = 1e-3) -> DarbouxReport:
    """Check {x1, gamma} = 1 (so3) or {lambda, x1} = 1 (so21) and that I brackets to zero.

    Gradients of the chart functions come from fourth-order central
    differences; each function's step is ``h`` times its distance to where
    it is singular (the x1 axis for gamma, the cone |x2| = |x3| for lambda,
    the null set of the quadratic Casimir for I).
    """
    algebra = Algebra(algebra)
    x = as_array(x.array if isinstance(x, CoalgebraPoint) else x)
    d = darboux_forward(algebra, x)
    if algebra is Algebra.SO3:
        g = d.angle
        if min(angle_distance(g, math.pi / 2), angle_distance(g, 3 * math.pi / 2)) < ANGLE_MARGIN:
            raise DomainError("too close to a chart boundary")
    elif abs(d.angle) < ANGLE_MARGIN:
        raise DomainError("too close to a chart boundary")
    if algebra is Algebra.SO3:
        reach = math.hypot(x[1], x[2])
    else:
        reach = abs(x[1]) - abs(x[2])
    q = quadratic_casimir(algebra).value(x)
    reach_I = abs(q) / (2.0 * np.linalg.norm(x))
    w = StructureConstants.of(algebra).bivector(x)
    action, first, angle = chart_functions(algebra, x)
    fI = fd_gradient(action, x, h * min(1.0, reach_I), order=4)
    fx = fd_gradient(first, x, h, order=4)
    fa = fd_gradient(angle, x, h * min(1.0, reach), order=4)

    def br(u, v):
        return float(u @ w @ v)

    if algebra is Algebra.SO3:
        res = {"{x1,gamma}=1": abs(br(fx, fa) - 1.0), "{I,x1}=0": abs(br(fI, fx)),
               "{I,gamma}=0": abs(br(fI, fa))}
    else:
        res = {"{lambda,x1}=1": abs(br(fa, fx) - 1.0), "{I,x1}=0": abs(br(fI, fx)),
               "{I,lambda}=0": abs(br(fI, fa))}
    return DarbouxReport(algebra.value, res, tol)
