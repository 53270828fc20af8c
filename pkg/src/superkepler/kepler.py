"""Observables of the planar Kepler problem and the regions of phase space they live on."""
from __future__ import annotations

import enum

import numpy as np

from .phase import DomainError, Observable, as_array, compose

DEFAULT_REGION_TOL = 1e-9


class Region(str, enum.Enum):
    U_MINUS = "U_MINUS"
    U_PLUS = "U_PLUS"
    Z0_EXCLUDED = "Z0_EXCLUDED"
    H_ZERO_SHELL = "H_ZERO_SHELL"


def _split(z):
    return z[..., 0], z[..., 1], z[..., 2], z[..., 3]


# -- Hamiltonian --------------------------------------------------------------

def _h_value(z):
    q1, q2, p1, p2 = _split(z)
    return 0.5 * (p1 * p1 + p2 * p2) - 1.0 / np.hypot(q1, q2)


def _h_grad(z):
    q1, q2, p1, p2 = _split(z)
    r3 = np.hypot(q1, q2) ** 3
    return np.stack([q1 / r3, q2 / r3, p1, p2], axis=-1)


def _h_hess(z):
    q = z[..., :2]
    r = np.hypot(q[..., 0], q[..., 1])[..., None, None]
    out = np.zeros(z.shape + (4,))
    out[..., :2, :2] = np.eye(2) / r**3 - 3.0 * q[..., :, None] * q[..., None, :] / r**5
    out[..., 2, 2] = out[..., 3, 3] = 1.0
    return out


def hamiltonian() -> Observable:
    """H = p^2/2 - 1/r."""
    return Observable("H", _h_value, _h_grad, _h_hess)


# -- angular momentum -----------------------------------------------------------

_M_HESS = np.zeros((4, 4))
_M_HESS[0, 3] = _M_HESS[3, 0] = 1.0
_M_HESS[1, 2] = _M_HESS[2, 1] = -1.0


def angular_momentum() -> Observable:
    """M12 = q1 p2 - q2 p1 (and M21 = -M12)."""
    return Observable(
        "M12",
        lambda z: z[..., 0] * z[..., 3] - z[..., 1] * z[..., 2],
        lambda z: np.stack([z[..., 3], -z[..., 2], -z[..., 1], z[..., 0]], axis=-1),
        lambda z: np.broadcast_to(_M_HESS, z.shape + (4,)).copy(),
    )


# -- Runge-Lenz vector ------------------------------------------------------------

def _runge_lenz_parts(i):
    def value(z):
        q, p = z[..., :2], z[..., 2:]
        r = np.hypot(q[..., 0], q[..., 1])
        pp = np.einsum("...j,...j->...", p, p)
        pq = np.einsum("...j,...j->...", p, q)
        return q[..., i] * pp - p[..., i] * pq - q[..., i] / r

    def grad(z):
        q, p = z[..., :2], z[..., 2:]
        r = np.hypot(q[..., 0], q[..., 1])[..., None]
        pp = np.einsum("...j,...j->...", p, p)[..., None]
        pq = np.einsum("...j,...j->...", p, q)[..., None]
        d = np.eye(2)[i]
        gq = d * pp - p[..., i : i + 1] * p - d / r + q[..., i : i + 1] * q / r**3
        gp = 2.0 * q[..., i : i + 1] * p - d * pq - p[..., i : i + 1] * q
        return np.concatenate([gq, gp], axis=-1)

    def hess(z):
        q, p = z[..., :2], z[..., 2:]
        r = np.hypot(q[..., 0], q[..., 1])[..., None, None]
        d = np.eye(2)[i]
        eye = np.eye(2)
        qi = q[..., i][..., None, None]
        pi = p[..., i][..., None, None]
        # (j, k) blocks; d[j] = delta_ij
        qq = (d[:, None] * q[..., None, :] + d[None, :] * q[..., :, None] + eye * qi) / r**3 \
            - 3.0 * qi * q[..., :, None] * q[..., None, :] / r**5
        qp = 2.0 * d[:, None] * p[..., None, :] - d[None, :] * p[..., :, None] - eye * pi
        pp = 2.0 * qi * eye - d[:, None] * q[..., None, :] - d[None, :] * q[..., :, None]
        out = np.empty(z.shape + (4,))
        out[..., :2, :2] = qq
        out[..., :2, 2:] = qp
        out[..., 2:, :2] = np.swapaxes(qp, -1, -2)
        out[..., 2:, 2:] = pp
        return out

    return value, grad, hess


def runge_lenz(i: int) -> Observable:
    """A_i = q_i p^2 - p_i (p, q) - q_i / r for i in {1, 2}."""
    if i not in (1, 2):
        raise ValueError("Runge-Lenz index must be 1 or 2")
    return Observable(f"A{i}", *_runge_lenz_parts(i - 1))


def runge_lenz_via_m(i: int) -> Observable:
    """Second displayed form, A_i = sum_j M_ij p_j - q_i / r, with M21 = -M12."""
    if i not in (1, 2):
        raise ValueError("Runge-Lenz index must be 1 or 2")

    def value(z):
        q1, q2, p1, p2 = _split(z)
        m12 = q1 * p2 - q2 * p1
        r = np.hypot(q1, q2)
        if i == 1:
            return m12 * p2 - q1 / r
        return -m12 * p1 - q2 / r

    return Observable(f"A{i}'", value, runge_lenz(i).gradient, runge_lenz(i).hessian)


# -- rescaled integrals -------------------------------------------------------------

def _check_sign(v, negative):
    bad = (v >= 0) if negative else (v <= 0)
    if np.any(bad):
        where = "H < 0 (U_MINUS)" if negative else "H > 0 (U_PLUS)"
        raise DomainError(f"rescaled integral evaluated outside {where}")


def _inv_sqrt_minus2h(v):
    _check_sign(v, negative=True)
    return (-2.0 * v) ** -0.5


def _inv_sqrt_plus2h(v):
    _check_sign(v, negative=False)
    return (2.0 * v) ** -0.5


def energy_scale(regime: Region) -> Observable:
    """(-2H)^(-1/2) on U_MINUS or (2H)^(-1/2) on U_PLUS."""
    h = hamiltonian()
    if regime is Region.U_MINUS:
        return compose(_inv_sqrt_minus2h, lambda v: (-2.0 * v) ** -1.5, lambda v: 3.0 * (-2.0 * v) ** -2.5,
                       h, "(-2H)^-1/2")
    if regime is Region.U_PLUS:
        return compose(_inv_sqrt_plus2h, lambda v: -((2.0 * v) ** -1.5), lambda v: 3.0 * (2.0 * v) ** -2.5,
                       h, "(2H)^-1/2")
    raise ValueError(f"no rescaled integrals on {regime}")


def rescaled_integrals(regime) -> tuple[Observable, Observable]:
    """(L1, L2) = A_i / sqrt(-2H) on U_MINUS, (K1, K2) = A_i / sqrt(2H) on U_PLUS."""
    regime = Region(regime)
    scale = energy_scale(regime)
    name = "L" if regime is Region.U_MINUS else "K"
    return tuple((runge_lenz(i) * scale).renamed(f"{name}{i}") for i in (1, 2))


# -- regions and identities ------------------------------------------------------------

def classify_region(z, tol: float = DEFAULT_REGION_TOL) -> Region:
    z = as_array(z)
    m = angular_momentum()(z)
    if abs(m) <= tol:
        return Region.Z0_EXCLUDED
    h = hamiltonian()(z)
    if abs(h) <= tol:
        return Region.H_ZERO_SHELL
    return Region.U_MINUS if h < 0 else Region.U_PLUS


def relative_residual(lhs, rhs):
    """|lhs - rhs| / (1 + max(|lhs|, |rhs|))."""
    lhs, rhs = np.asarray(lhs), np.asarray(rhs)
    return np.abs(lhs - rhs) / (1.0 + np.maximum(np.abs(lhs), np.abs(rhs)))


def identity_sides(z) -> dict[str, tuple[np.ndarray, np.ndarray]]:
    """Both sides of the algebraic identities valid at ``z`` (batched).

    The energy-rescaled identity is included only when every point shares
    the sign of H.
    """
    z = as_array(z)
    h = hamiltonian()(z)
    m = angular_momentum()(z)
    a1, a2 = runge_lenz(1)(z), runge_lenz(2)(z)
    asq = a1 * a1 + a2 * a2
    msq = m * m
    out = {
        "A2=2M2H+1": (asq, 2.0 * msq * h + 1.0),
        "H=(A2-1)/(2M2)": (h, (asq - 1.0) / (2.0 * msq)),
    }
    if np.all(h < 0):
        l1, l2 = rescaled_integrals(Region.U_MINUS)
        out["M2+L2=-1/(2H)"] = (msq + l1(z) ** 2 + l2(z) ** 2, -1.0 / (2.0 * h))
    elif np.all(h > 0):
        k1, k2 = rescaled_integrals(Region.U_PLUS)
        out["K2-M2=1/(2H)"] = (k1(z) ** 2 + k2(z) ** 2 - msq, 1.0 / (2.0 * h))
    return out


def identity_residuals(z, relative: bool = False) -> dict[str, float]:
    """Absolute (or relative) residuals of the Kepler identities at a single point."""
    out = {}
    for name, (lhs, rhs) in identity_sides(z).items():
        res = relative_residual(lhs, rhs) if relative else np.abs(lhs - rhs)
        out[name] = float(np.max(res))
    return out


def shipped_observables(regime=None) -> list[Observable]:
    """Every phase-space observable the package exposes, for gradient auditing."""
    from .phase import p1, p2, q1, q2

    obs = [q1, q2, p1, p2, hamiltonian(), angular_momentum(), runge_lenz(1), runge_lenz(2)]
    if regime is not None:
        obs.extend(rescaled_integrals(regime))
    return obs
