"""Independent reference implementations used only by the tests."""

import math

import numpy as np
import sympy as sp

q1, q2, p1, p2 = sp.symbols("q1 q2 p1 p2", real=True)
COORDS = (q1, q2, p1, p2)
_r = sp.sqrt(q1**2 + q2**2)
_psq = p1**2 + p2**2
_pq = p1 * q1 + p2 * q2

H = _psq / 2 - 1 / _r
M12 = q1 * p2 - q2 * p1
A1 = q1 * _psq - p1 * _pq - q1 / _r
A2 = q2 * _psq - p2 * _pq - q2 / _r


def sym_bracket(f, g):
    """{f, g} = sum_i (df/dp_i dg/dq_i - df/dq_i dg/dp_i)."""
    return sum(sp.diff(f, p) * sp.diff(g, q) - sp.diff(f, q) * sp.diff(g, p)
               for q, p in ((q1, p1), (q2, p2)))


def lambdify(expr):
    fn = sp.lambdify(COORDS, expr, "numpy")
    return lambda z: np.broadcast_to(fn(*np.moveaxis(np.asarray(z, float), -1, 0)), np.shape(z)[:-1])


def bisect(fun, lo, hi, iters=200):
    flo = fun(lo)
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        fm = fun(mid)
        if (fm > 0) == (flo > 0):
            lo, flo = mid, fm
        else:
            hi = mid
    return 0.5 * (lo + hi)


def kepler_elliptic_bisect(mean, e):
    return bisect(lambda u: u - e * math.sin(u) - mean, mean - 1.0 - e, mean + 1.0 + e)


def kepler_hyperbolic_bisect(mean, e):
    span = abs(mean) + 50.0
    return bisect(lambda u: u - e * math.sinh(u) - mean, -span, span) if e > 1 else None


def svd_rank(a, rel=1e-10):
    s = np.linalg.svd(np.asarray(a, float), compute_uv=False)
    return int((s > rel * s[0]).sum()) if s[0] > 0 else 0
