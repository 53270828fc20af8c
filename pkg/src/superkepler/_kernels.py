"""Hot numeric loops: Stoermer-Verlet propagation and Kepler-equation roots.

Every kernel exists twice, a numba ``@njit`` version and a pure numpy/math
version with identical arithmetic.  The module-level names dispatch to the
numba build unless ``SUPERKEPLER_DISABLE_NUMBA`` is set to a truthy value (or
numba cannot be imported).  ``benchmarks/bench_kernels.py`` times both.
"""
from __future__ import annotations

import math
import os

import numpy as np

try:
    import numba

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None
    HAVE_NUMBA = False

_DISABLED = os.environ.get("SUPERKEPLER_DISABLE_NUMBA", "").strip().lower() in {"1", "true", "yes", "on"}
USE_NUMBA = HAVE_NUMBA and not _DISABLED

# stop codes shared by the propagation kernels
RUNNING = 0
CLOSED = 1
ESCAPED = 2
COLLAPSED = 3

MAX_NEWTON = 50


def _maybe_njit(fn):
    if HAVE_NUMBA:
        return numba.njit(cache=True)(fn)
    return fn


# ---------------------------------------------------------------------------
# Stoermer-Verlet, single trajectory
# ---------------------------------------------------------------------------

def _verlet_path_py(z0, dt, steps, escape_radius, min_radius):
    out = np.empty((steps + 1, 4))
    q1, q2, p1, p2 = float(z0[0]), float(z0[1]), float(z0[2]), float(z0[3])
    out[0, 0] = q1
    out[0, 1] = q2
    out[0, 2] = p1
    out[0, 3] = p2
    h = 0.5 * dt
    status = RUNNING
    n = 0
    r = math.sqrt(q1 * q1 + q2 * q2)
    for k in range(steps):
        r3 = r * r * r
        p1 -= h * q1 / r3
        p2 -= h * q2 / r3
        q1 += dt * p1
        q2 += dt * p2
        r = math.sqrt(q1 * q1 + q2 * q2)
        if r < min_radius:
            status = COLLAPSED
            break
        r3 = r * r * r
        p1 -= h * q1 / r3
        p2 -= h * q2 / r3
        n = k + 1
        out[n, 0] = q1
        out[n, 1] = q2
        out[n, 2] = p1
        out[n, 3] = p2
        if r > escape_radius:
            status = ESCAPED
            break
    return out[: n + 1], status


_verlet_path_nb = _maybe_njit(_verlet_path_py)


def verlet_path_numba(z0, dt, steps, escape_radius=np.inf, min_radius=1e-6):
    """Kick-drift-kick path under the numba build; see :func:`verlet_path`."""
    if not HAVE_NUMBA:  # pragma: no cover
        raise RuntimeError("numba is not available")
    z0 = np.ascontiguousarray(z0, dtype=np.float64)
    return _verlet_path_nb(z0, float(dt), int(steps), float(escape_radius), float(min_radius))


def verlet_path_numpy(z0, dt, steps, escape_radius=np.inf, min_radius=1e-6):
    """Kick-drift-kick path in plain Python; see :func:`verlet_path`."""
    z0 = np.asarray(z0, dtype=np.float64)
    return _verlet_path_py(z0, float(dt), int(steps), float(escape_radius), float(min_radius))


def verlet_path(z0, dt, steps, escape_radius=np.inf, min_radius=1e-6):
    """Integrate ``H = p^2/2 - 1/r`` for up to ``steps`` Verlet steps.

    Returns ``(states, status)``: ``states`` has one row per accepted state
    (the initial one included) and ``status`` is ``RUNNING`` when all steps
    were taken, ``ESCAPED`` after the first state with ``r > escape_radius``
    or ``COLLAPSED`` when a drift landed inside ``min_radius`` (that state
    is dropped).
    """
    if USE_NUMBA:
        return verlet_path_numba(z0, dt, steps, escape_radius, min_radius)
    return verlet_path_numpy(z0, dt, steps, escape_radius, min_radius)


# ---------------------------------------------------------------------------
# Stoermer-Verlet, many orbits, streaming return/escape detection
# ---------------------------------------------------------------------------

def _batch_nb_impl(z0s, dt, max_steps, return_tol, escape_radius, min_radius, min_steps):
    n_orb = z0s.shape[0]
    status = np.zeros(n_orb, dtype=np.int64)
    event = np.zeros(n_orb, dtype=np.int64)
    dh = np.zeros(n_orb)
    dm = np.zeros(n_orb)
    h = 0.5 * dt
    for i in range(n_orb):
        a1, a2, b1, b2 = z0s[i, 0], z0s[i, 1], z0s[i, 2], z0s[i, 3]
        q1, q2, p1, p2 = a1, a2, b1, b2
        r = math.sqrt(q1 * q1 + q2 * q2)
        e0 = 0.5 * (p1 * p1 + p2 * p2) - 1.0 / r
        m0 = q1 * p2 - q2 * p1
        left = False
        best = np.inf
        best_k = -1
        for k in range(1, max_steps + 1):
            r3 = r * r * r
            p1 -= h * q1 / r3
            p2 -= h * q2 / r3
            q1 += dt * p1
            q2 += dt * p2
            r = math.sqrt(q1 * q1 + q2 * q2)
            if r < min_radius:
                status[i] = COLLAPSED
                event[i] = k
                break
            r3 = r * r * r
            p1 -= h * q1 / r3
            p2 -= h * q2 / r3
            de = abs(0.5 * (p1 * p1 + p2 * p2) - 1.0 / r - e0)
            if de > dh[i]:
                dh[i] = de
            dmk = abs(q1 * p2 - q2 * p1 - m0)
            if dmk > dm[i]:
                dm[i] = dmk
            dist = max(abs(q1 - a1), abs(q2 - a2), abs(p1 - b1), abs(p2 - b2))
            if not left:
                if dist > return_tol:
                    left = True
            elif k > min_steps and dist <= return_tol:
                if dist < best:
                    best = dist
                    best_k = k
                else:
                    break
            elif best_k >= 0:
                break
            if r > escape_radius:
                status[i] = ESCAPED
                event[i] = k
                break
        if best_k >= 0:
            status[i] = CLOSED
            event[i] = best_k
    return status, event, dh, dm


_batch_nb = _maybe_njit(_batch_nb_impl)


def _batch_np_impl(z0s, dt, max_steps, return_tol, escape_radius, min_radius, min_steps):
    z0s = np.asarray(z0s, dtype=np.float64)
    n_orb = z0s.shape[0]
    q = z0s[:, :2].copy()
    p = z0s[:, 2:].copy()
    start = z0s.copy()
    r = np.hypot(q[:, 0], q[:, 1])
    e0 = 0.5 * np.einsum("ij,ij->i", p, p) - 1.0 / r
    m0 = q[:, 0] * p[:, 1] - q[:, 1] * p[:, 0]
    status = np.zeros(n_orb, dtype=np.int64)
    event = np.zeros(n_orb, dtype=np.int64)
    dh = np.zeros(n_orb)
    dm = np.zeros(n_orb)
    left = np.zeros(n_orb, dtype=bool)
    best = np.full(n_orb, np.inf)
    best_k = np.full(n_orb, -1, dtype=np.int64)
    active = np.ones(n_orb, dtype=bool)
    h = 0.5 * dt
    for k in range(1, max_steps + 1):
        idx = np.flatnonzero(active)
        if idx.size == 0:
            break
        qa, pa, ra = q[idx], p[idx], r[idx]
        pa = pa - (h / ra**3)[:, None] * qa
        qa = qa + dt * pa
        ra = np.hypot(qa[:, 0], qa[:, 1])
        collapsed = ra < min_radius
        pa = pa - (h / ra**3)[:, None] * qa
        q[idx], p[idx], r[idx] = qa, pa, ra
        if collapsed.any():
            hit = idx[collapsed]
            status[hit] = COLLAPSED
            event[hit] = k
            active[hit] = False
            keep = ~collapsed
            idx, qa, pa, ra = idx[keep], qa[keep], pa[keep], ra[keep]
        de = np.abs(0.5 * np.einsum("ij,ij->i", pa, pa) - 1.0 / ra - e0[idx])
        dh[idx] = np.maximum(dh[idx], de)
        dmk = np.abs(qa[:, 0] * pa[:, 1] - qa[:, 1] * pa[:, 0] - m0[idx])
        dm[idx] = np.maximum(dm[idx], dmk)
        st = start[idx]
        dist = np.maximum(np.abs(qa - st[:, :2]).max(axis=1), np.abs(pa - st[:, 2:]).max(axis=1))
        was_left = left[idx]
        left[idx] = was_left | (dist > return_tol)
        near = was_left & (k > min_steps) & (dist <= return_tol)
        improving = near & (dist < best[idx])
        best[idx[improving]] = dist[improving]
        best_k[idx[improving]] = k
        # past the closest approach: either receding inside the ball or already out of it
        done = (near & ~improving) | (was_left & ~near & (best_k[idx] >= 0))
        active[idx[done]] = False
        esc = (ra > escape_radius) & ~done
        status[idx[esc]] = ESCAPED
        event[idx[esc]] = k
        active[idx[esc]] = False
    closed = best_k >= 0
    status[closed] = CLOSED
    event[closed] = best_k[closed]
    return status, event, dh, dm


def verlet_batch_numba(z0s, dt, max_steps, return_tol, escape_radius, min_radius=1e-6, min_steps=10):
    if not HAVE_NUMBA:  # pragma: no cover
        raise RuntimeError("numba is not available")
    z0s = np.ascontiguousarray(z0s, dtype=np.float64)
    return _batch_nb(z0s, float(dt), int(max_steps), float(return_tol), float(escape_radius),
                     float(min_radius), int(min_steps))


def verlet_batch_numpy(z0s, dt, max_steps, return_tol, escape_radius, min_radius=1e-6, min_steps=10):
    return _batch_np_impl(z0s, float(dt), int(max_steps), float(return_tol), float(escape_radius),
                          float(min_radius), int(min_steps))


def verlet_batch(z0s, dt, max_steps, return_tol, escape_radius, min_radius=1e-6, min_steps=10):
    """Propagate many orbits without storing them.

    For each row of ``z0s`` returns ``status`` (``CLOSED``, ``ESCAPED``,
    ``COLLAPSED`` or ``RUNNING``), ``event`` (step index of the closest
    return, escape or collapse), and the running maxima of ``|H - H0|`` and
    ``|M12 - M12_0|``.  A return counts only after the state has left the
    ``return_tol`` box around the start and ``min_steps`` have passed; the
    reported step is the closest approach inside the box.
    """
    if USE_NUMBA:
        return verlet_batch_numba(z0s, dt, max_steps, return_tol, escape_radius, min_radius, min_steps)
    return verlet_batch_numpy(z0s, dt, max_steps, return_tol, escape_radius, min_radius, min_steps)


# ---------------------------------------------------------------------------
# Kepler equations
# ---------------------------------------------------------------------------

def _elliptic_scalar(mean, e, tol):
    # reduce to [-pi, pi) and add the branch back at the end
    k = math.floor((mean + math.pi) / (2.0 * math.pi))
    m = mean - 2.0 * math.pi * k
    u = m
    ok = False
    for _ in range(MAX_NEWTON):
        f = u - e * math.sin(u) - m
        if abs(f) <= tol:
            ok = True
            break
        u -= f / (1.0 - e * math.cos(u))
        if u < -math.pi or u > math.pi:
            break
    if not ok:
        lo = -math.pi
        hi = math.pi
        for _ in range(200):
            u = 0.5 * (lo + hi)
            f = u - e * math.sin(u) - m
            if abs(f) <= tol or hi - lo < 1e-16:
                break
            if f > 0.0:
                hi = u
            else:
                lo = u
    # one more Newton step takes the residual to roundoff
    f = u - e * math.sin(u) - m
    v = u - f / (1.0 - e * math.cos(u))
    if abs(v - e * math.sin(v) - m) <= abs(f):
        u = v
    return u + 2.0 * math.pi * k


def _hyperbolic_scalar(mean, e, tol):
    # g(u) = u - e sinh u - mean is strictly decreasing
    u = math.asinh(-mean / e)
    ok = False
    for _ in range(MAX_NEWTON):
        f = u - e * math.sinh(u) - mean
        if abs(f) <= tol:
            ok = True
            break
        step = f / (1.0 - e * math.cosh(u))
        if not math.isfinite(step):
            break
        u -= step
    if not ok:
        lo = -1.0
        hi = 1.0
        while lo - e * math.sinh(lo) - mean < 0.0:
            lo *= 2.0
        while hi - e * math.sinh(hi) - mean > 0.0:
            hi *= 2.0
        for _ in range(400):
            u = 0.5 * (lo + hi)
            f = u - e * math.sinh(u) - mean
            if abs(f) <= tol or hi - lo < 1e-15 * max(1.0, abs(u)):
                break
            if f > 0.0:
                lo = u
            else:
                hi = u
    f = u - e * math.sinh(u) - mean
    v = u - f / (1.0 - e * math.cosh(u))
    if abs(v - e * math.sinh(v) - mean) <= abs(f):
        u = v
    return u


def _elliptic_loop(mean, e, tol):
    out = np.empty(mean.shape[0])
    for i in range(mean.shape[0]):
        out[i] = _elliptic_scalar(mean[i], e[i], tol)
    return out


def _hyperbolic_loop(mean, e, tol):
    out = np.empty(mean.shape[0])
    for i in range(mean.shape[0]):
        out[i] = _hyperbolic_scalar(mean[i], e[i], tol)
    return out


if HAVE_NUMBA:
    _elliptic_scalar_nb = numba.njit(cache=True)(_elliptic_scalar)
    _hyperbolic_scalar_nb = numba.njit(cache=True)(_hyperbolic_scalar)

    @numba.njit(cache=True)
    def _elliptic_loop_nb(mean, e, tol):
        out = np.empty(mean.shape[0])
        for i in range(mean.shape[0]):
            out[i] = _elliptic_scalar_nb(mean[i], e[i], tol)
        return out

    @numba.njit(cache=True)
    def _hyperbolic_loop_nb(mean, e, tol):
        out = np.empty(mean.shape[0])
        for i in range(mean.shape[0]):
            out[i] = _hyperbolic_scalar_nb(mean[i], e[i], tol)
        return out


def _elliptic_np(mean, e, tol):
    k = np.floor((mean + np.pi) / (2.0 * np.pi))
    m = mean - 2.0 * np.pi * k
    u = m.copy()
    for _ in range(MAX_NEWTON):
        f = u - e * np.sin(u) - m
        todo = np.abs(f) > tol
        if not todo.any():
            break
        u = np.where(todo, u - f / (1.0 - e * np.cos(u)), u)
        u = np.clip(u, -np.pi, np.pi)
    bad = np.flatnonzero(np.abs(u - e * np.sin(u) - m) > tol)
    for i in bad:
        u[i] = _elliptic_scalar(m[i], e[i], tol)
    f = u - e * np.sin(u) - m
    v = u - f / (1.0 - e * np.cos(u))
    u = np.where(np.abs(v - e * np.sin(v) - m) <= np.abs(f), v, u)
    return u + 2.0 * np.pi * k


def _hyperbolic_np(mean, e, tol):
    u = np.arcsinh(-mean / e)
    with np.errstate(over="ignore", invalid="ignore"):
        for _ in range(MAX_NEWTON):
            f = u - e * np.sinh(u) - mean
            todo = np.abs(f) > tol
            if not todo.any():
                break
            u = np.where(todo, u - f / (1.0 - e * np.cosh(u)), u)
    resid = np.abs(u - e * np.sinh(u) - mean)
    bad = np.flatnonzero(~(resid <= tol))
    for i in bad:
        u[i] = _hyperbolic_scalar(mean[i], e[i], tol)
    with np.errstate(over="ignore", invalid="ignore"):
        f = u - e * np.sinh(u) - mean
        v = u - f / (1.0 - e * np.cosh(u))
        u = np.where(np.abs(v - e * np.sinh(v) - mean) <= np.abs(f), v, u)
    return u


def _broadcast(mean, e):
    mean, e = np.broadcast_arrays(np.asarray(mean, dtype=np.float64), np.asarray(e, dtype=np.float64))
    shape = mean.shape
    return np.ascontiguousarray(mean.ravel()), np.ascontiguousarray(e.ravel()), shape


def kepler_elliptic_numba(mean, e, tol=1e-14):
    m, ee, shape = _broadcast(mean, e)
    return _elliptic_loop_nb(m, ee, float(tol)).reshape(shape)


def kepler_elliptic_numpy(mean, e, tol=1e-14):
    m, ee, shape = _broadcast(mean, e)
    return _elliptic_np(m, ee, float(tol)).reshape(shape)


def kepler_hyperbolic_numba(mean, e, tol=1e-14):
    m, ee, shape = _broadcast(mean, e)
    return _hyperbolic_loop_nb(m, ee, float(tol)).reshape(shape)


def kepler_hyperbolic_numpy(mean, e, tol=1e-14):
    m, ee, shape = _broadcast(mean, e)
    return _hyperbolic_np(m, ee, float(tol)).reshape(shape)


def kepler_elliptic(mean, e, tol=1e-14):
    """Solve ``u - e sin u = mean`` elementwise (0 <= e < 1)."""
    if USE_NUMBA:
        return kepler_elliptic_numba(mean, e, tol)
    return kepler_elliptic_numpy(mean, e, tol)


def kepler_hyperbolic(mean, e, tol=1e-14):
    """Solve ``u - e sinh u = mean`` elementwise (e > 1)."""
    if USE_NUMBA:
        return kepler_hyperbolic_numba(mean, e, tol)
    return kepler_hyperbolic_numpy(mean, e, tol)
