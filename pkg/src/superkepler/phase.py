"""Canonical phase space R^4 = {(q1, q2, p1, p2)}, observables and the Poisson bracket.

All observables are vectorised: they accept an array of shape ``(..., 4)``
(or a :class:`PhasePoint`) and return values of shape ``(...)``, gradients
of shape ``(..., 4)`` and Hessians of shape ``(..., 4, 4)``.

Bracket convention
------------------
The coordinate bracket used throughout is::

    {f, g} = sum_i (df/dp_i * dg/dq_i - df/dq_i * dg/dp_i)

so that ``{q_i, p_j} = -delta_ij``.  This is the sign for which the
Kepler relations ``{M12, A2} = A1``, ``{M12, A1} = -A2`` and
``{A1, A2} = 2 H M12`` hold (see ``calibrate_bracket_sign``).
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np

class DomainError(ValueError):
    """Raised when a function is evaluated outside the region where it is defined."""


#: overall sign multiplying ``sum(df/dq dg/dp - df/dp dg/dq)``
BRACKET_SIGN = -1.0


@dataclass(frozen=True)
class PhasePoint:
    """A point of the punctured phase space ``Z = R^4 minus {r = 0}``."""

    q1: float
    q2: float
    p1: float
    p2: float

    def __post_init__(self):
        if not np.isfinite([self.q1, self.q2, self.p1, self.p2]).all():
            raise ValueError("phase point coordinates must be finite")
        if self.q1 == 0.0 and self.q2 == 0.0:
            raise DomainError("r = 0 is excluded from the phase space")

    @classmethod
    def from_array(cls, z) -> "PhasePoint":
        z = np.asarray(z, dtype=float)
        return cls(float(z[0]), float(z[1]), float(z[2]), float(z[3]))

    @property
    def array(self) -> np.ndarray:
        return np.array([self.q1, self.q2, self.p1, self.p2])

    @property
    def r(self) -> float:
        return float(np.hypot(self.q1, self.q2))


def as_array(z) -> np.ndarray:
    if isinstance(z, PhasePoint):
        return z.array
    return np.asarray(z, dtype=float)


ArrayFn = Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True)
class Observable:
    """A named smooth function with analytic first (and optionally second) derivatives.

    The class is dimension agnostic; phase-space observables take 4-vectors
    and coalgebra functions (see :mod:`superkepler.lie_poisson`) take 3-vectors.
    Arithmetic (``+ - * /`` with observables or scalars) propagates gradients
    and Hessians by the usual rules.
    """

    label: str
    value: ArrayFn
    gradient: ArrayFn
    hessian: Optional[ArrayFn] = None

    def __call__(self, z) -> np.ndarray:
        return self.value(as_array(z))

    def grad(self, z) -> np.ndarray:
        return self.gradient(as_array(z))

    def hess(self, z) -> np.ndarray:
        if self.hessian is None:
            raise NotImplementedError(f"observable {self.label!r} carries no Hessian")
        return self.hessian(as_array(z))

    def __repr__(self):
        return f"Observable({self.label!r})"

    # -- arithmetic ---------------------------------------------------------
    def __add__(self, other):
        other = _lift(other)
        hess = None
        if self.hessian is not None and other.hessian is not None:
            hess = lambda z: self.hessian(z) + other.hessian(z)
        return Observable(
            f"({self.label} + {other.label})",
            lambda z: self.value(z) + other.value(z),
            lambda z: self.gradient(z) + other.gradient(z),
            hess,
        )

    __radd__ = __add__

    def __neg__(self):
        return self.scaled(-1.0, f"-{self.label}")

    def __sub__(self, other):
        return self + (-_lift(other))

    def __rsub__(self, other):
        return _lift(other) + (-self)

    def __mul__(self, other):
        if np.isscalar(other):
            return self.scaled(float(other), f"{other}*{self.label}")
        return product(self, other)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if np.isscalar(other):
            return self.scaled(1.0 / float(other), f"{self.label}/{other}")
        return product(self, reciprocal(other))

    def scaled(self, c: float, label: Optional[str] = None) -> "Observable":
        hess = None
        if self.hessian is not None:
            hess = lambda z: c * self.hessian(z)
        return Observable(
            label or f"{c}*{self.label}",
            lambda z: c * self.value(z),
            lambda z: c * self.gradient(z),
            hess,
        )

    def renamed(self, label: str) -> "Observable":
        return Observable(label, self.value, self.gradient, self.hessian)


def _outer(a, b):
    return a[..., :, None] * b[..., None, :]


def constant(c: float) -> Observable:
    c = float(c)
    return Observable(
        repr(c),
        lambda z: np.full(np.shape(z)[:-1], c),
        lambda z: np.zeros(np.shape(z)),
        lambda z: np.zeros(np.shape(z) + np.shape(z)[-1:]),
    )


def _lift(x) -> Observable:
    if isinstance(x, Observable):
        return x
    return constant(x)


def product(f: Observable, g: Observable) -> Observable:
    """Pointwise product with Leibniz-rule gradient and Hessian."""

    def grad(z):
        return f.value(z)[..., None] * g.gradient(z) + g.value(z)[..., None] * f.gradient(z)

    hess = None
    if f.hessian is not None and g.hessian is not None:
        def hess(z):
            fv, gv = f.value(z)[..., None, None], g.value(z)[..., None, None]
            fg, gg = f.gradient(z), g.gradient(z)
            return fv * g.hessian(z) + gv * f.hessian(z) + _outer(fg, gg) + _outer(gg, fg)

    return Observable(f"{f.label}*{g.label}", lambda z: f.value(z) * g.value(z), grad, hess)


def compose(
    phi: Callable[[np.ndarray], np.ndarray],
    dphi: Callable[[np.ndarray], np.ndarray],
    d2phi: Callable[[np.ndarray], np.ndarray],
    f: Observable,
    label: str,
) -> Observable:
    """``phi(f)`` for a scalar function ``phi`` with known first and second derivatives."""

    def grad(z):
        return dphi(f.value(z))[..., None] * f.gradient(z)

    hess = None
    if f.hessian is not None:
        def hess(z):
            v, g = f.value(z), f.gradient(z)
            return d2phi(v)[..., None, None] * _outer(g, g) + dphi(v)[..., None, None] * f.hessian(z)

    return Observable(label, lambda z: phi(f.value(z)), grad, hess)


def reciprocal(f: Observable) -> Observable:
    return compose(lambda v: 1.0 / v, lambda v: -1.0 / v**2, lambda v: 2.0 / v**3, f, f"1/{f.label}")


def coordinate(index: int, label: str, dim: int = 4) -> Observable:
    """The linear coordinate function ``z -> z[index]``."""
    unit = np.zeros(dim)
    unit[index] = 1.0
    return Observable(
        label,
        lambda z: z[..., index],
        lambda z: np.broadcast_to(unit, np.shape(z)).copy(),
        lambda z: np.zeros(np.shape(z) + (dim,)),
    )


q1 = coordinate(0, "q1")
q2 = coordinate(1, "q2")
p1 = coordinate(2, "p1")
p2 = coordinate(3, "p2")


# ---------------------------------------------------------------------------
# Poisson bracket
# ---------------------------------------------------------------------------

def _poisson_matrix(sign: float) -> np.ndarray:
    # {f, g} = grad f . P . grad g
    P = np.zeros((4, 4))
    P[0, 2] = P[1, 3] = sign
    P[2, 0] = P[3, 1] = -sign
    return P


POISSON_MATRIX = _poisson_matrix(BRACKET_SIGN)


def _bracket_from_grads(gf, gg, sign=BRACKET_SIGN):
    # written as (a - b) so that swapping f and g flips the sign bit exactly
    a = gf[..., 0] * gg[..., 2] + gf[..., 1] * gg[..., 3]
    b = gf[..., 2] * gg[..., 0] + gf[..., 3] * gg[..., 1]
    return sign * (a - b)


def poisson_bracket(f: Observable, g: Observable, z) -> np.ndarray:
    """Canonical bracket ``{f, g}`` at ``z`` (scalar or batch)."""
    z = as_array(z)
    return _bracket_from_grads(f.gradient(z), g.gradient(z))


def bracket(f: Observable, g: Observable) -> Observable:
    """``{f, g}`` as an observable; its gradient uses the Hessians of ``f`` and ``g``.

    The result has no Hessian, so it can appear at most once more inside a
    bracket, which is what the Jacobi identity needs.  Without Hessians the
    value is still available and only the gradient raises.
    """

    def grad(z):
        if f.hessian is None or g.hessian is None:
            raise ValueError(f"gradient of {{{f.label},{g.label}}} needs both Hessians")
        gf, gg = f.gradient(z), g.gradient(z)
        Pg = gg @ POISSON_MATRIX.T
        Pf = gf @ POISSON_MATRIX.T
        return np.einsum("...ij,...j->...i", f.hessian(z), Pg) - np.einsum("...ij,...j->...i", g.hessian(z), Pf)

    return Observable(
        f"{{{f.label},{g.label}}}",
        lambda z: _bracket_from_grads(f.gradient(z), g.gradient(z)),
        grad,
    )


def calibrate_bracket_sign(reference=(1.3, -0.4, 0.2, 0.9)) -> float:
    """Return the sign for which ``{M12, A2} = +A1`` at a generic reference point."""
    from .kepler import angular_momentum, runge_lenz

    z = as_array(reference)
    m, a1, a2 = angular_momentum(), runge_lenz(1), runge_lenz(2)
    raw = _bracket_from_grads(m.gradient(z), a2.gradient(z), sign=1.0)
    return float(np.sign(raw * a1(z)))


# ---------------------------------------------------------------------------
# finite differences and rank
# ---------------------------------------------------------------------------

def fd_gradient(fun: ArrayFn, x, h: float = 1e-5, order: int = 2) -> np.ndarray:
    """Central-difference derivative at a single point (order 2 or 4).

    For a vector-valued ``fun`` the last axis of the result indexes the
    coordinate, i.e. the Jacobian ``d fun_k / d x_i`` has shape ``(k, i)``.
    """
    x = np.asarray(x, dtype=float)
    out = [None] * x.shape[-1]
    for i in range(x.shape[-1]):
        e = np.zeros_like(x)
        e[i] = h
        if order == 2:
            out[i] = (fun(x + e) - fun(x - e)) / (2.0 * h)
        elif order == 4:
            out[i] = (8.0 * (fun(x + e) - fun(x - e)) - (fun(x + 2 * e) - fun(x - 2 * e))) / (12.0 * h)
        else:
            raise ValueError("order must be 2 or 4")
    return np.moveaxis(np.asarray(out, dtype=float), 0, -1)


def gradient_check(f: Observable, z, h: float = 1e-5) -> float:
    """max_i |analytic_i - central_difference_i| / (1 + |analytic_i|)."""
    z = as_array(z)
    if h <= 0:
        raise ValueError("h must be positive")
    analytic = f.gradient(z)
    numeric = fd_gradient(f.value, z, h)
    return float(np.max(np.abs(analytic - numeric) / (1.0 + np.abs(analytic))))


def numerical_rank(a, tol: float = 1e-10) -> int:
    """Number of singular values above ``tol`` times the largest one."""
    s = np.linalg.svd(np.atleast_2d(np.asarray(a, dtype=float)), compute_uv=False)
    if s.size == 0 or s[0] == 0.0:
        return 0
    return int(np.count_nonzero(s > tol * s[0]))


def jacobian(fs: Sequence[Observable], z) -> np.ndarray:
    z = as_array(z)
    return np.stack([f.gradient(z) for f in fs], axis=-2)


def jacobian_rank(fs: Sequence[Observable], z, tol: float = 1e-10) -> int:
    if not 1 <= len(fs) <= 4:
        raise ValueError("between 1 and 4 observables expected")
    return numerical_rank(jacobian(fs, z), tol)
