"""Verification suites and the JSON report they produce."""
from __future__ import annotations

import datetime as _dt
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import __version__
from .action_angle import HyperbolicTime
from .kepler import (angular_momentum, hamiltonian, identity_sides, relative_residual,
                     runge_lenz, shipped_observables)
from .lie_poisson import (ANGLE_MARGIN, angle_distance, casimir, casimir_observable,
                          coadjoint_fields, darboux_forward, darboux_inverse, lie_poisson_bracket,
                          momentum_map_array, quadratic_casimir, verify_darboux_bracket, x1, x2, x3)
from .phase import BRACKET_SIGN, Observable, poisson_bracket
from .sampling import GENERATOR, sample_points
from .structure import (Algebra, CheckTally, StructureConstants, generators, kepler_relation_residuals,
                        metric_form_residual, rescaled_relation_residuals, structure_residuals,
                        superintegrability_checks)

SUITE = "kepler-superintegrability"
FD_TOL = 1e-6
FD_STEP = 1e-5


@dataclass
class VerificationReport:
    suite: str
    seed: int
    samples: int
    regimes: list
    tol: float
    checks: list = field(default_factory=list)  # (regime, CheckTally) pairs
    conventions: dict = field(default_factory=dict)
    timestamp: Optional[str] = None

    @property
    def passed(self) -> bool:
        return all(c.ok for _, c in self.checks)

    def as_dict(self) -> dict:
        out = {
            "suite": self.suite,
            "tool_version": __version__,
            "seed": self.seed,
            "samples": self.samples,
            "generator": GENERATOR,
            "regimes": list(self.regimes),
            "tol": self.tol,
            "passed": self.passed,
            "conventions": self.conventions,
            "checks": [dict(c.as_dict(), regime=reg) for reg, c in self.checks],
            "residuals": {f"{reg}/{c.name}": c.max_residual for reg, c in self.checks},
        }
        if self.timestamp is not None:
            out["timestamp"] = self.timestamp
        return out


def batched_gradient_check(f: Observable, z: np.ndarray, h: float = FD_STEP) -> np.ndarray:
    """Per-point gradient_check over a batch of points."""
    analytic = f.gradient(z)
    numeric = np.empty_like(analytic)
    for i in range(z.shape[-1]):
        e = np.zeros(z.shape[-1])
        e[i] = h
        numeric[..., i] = (f.value(z + e) - f.value(z - e)) / (2.0 * h)
    return np.max(np.abs(analytic - numeric) / (1.0 + np.abs(analytic)), axis=-1)


def _tally(name, tol, residual):
    t = CheckTally(name, tol)
    residual = np.asarray(residual, dtype=float)
    t.add(residual <= tol, residual)
    return t


def _in_chart(algebra: Algebra):
    def accept(z):
        h = 0.5 * (z[:, 2] ** 2 + z[:, 3] ** 2) - 1.0 / np.hypot(z[:, 0], z[:, 1])
        ok = (h < 0) if algebra is Algebra.SO3 else (h > 0)
        out = np.zeros(len(z), dtype=bool)
        if not ok.any():
            return out
        x = momentum_map_array(algebra, z[ok])
        if algebra is Algebra.SO3:
            gamma = np.arctan2(x[:, 1], x[:, 2]) % (2 * np.pi)
            margin = np.minimum(np.abs(gamma - np.pi / 2), np.abs(gamma - 3 * np.pi / 2))
            good = margin >= ANGLE_MARGIN
        else:
            inside = np.abs(x[:, 1]) > np.abs(x[:, 2])
            with np.errstate(divide="ignore", invalid="ignore"):
                lam = np.arctanh(x[:, 2] / x[:, 1])
            good = inside & (np.abs(lam) >= ANGLE_MARGIN)
        out[np.flatnonzero(ok)[good]] = True
        return out
    return accept


def regime_checks(algebra, samples: int, seed: int, tol: float) -> list[CheckTally]:
    """Every pointwise identity of one regime, tallied over ``samples`` seeded points."""
    algebra = Algebra(algebra)
    z = sample_points(samples, seed, algebra.value)
    checks: list[CheckTally] = []

    # algebraic identities (relative)
    for name, (lhs, rhs) in identity_sides(z).items():
        checks.append(_tally(f"identity:{name}", tol, relative_residual(lhs, rhs)))
    asq = runge_lenz(1)(z) ** 2 + runge_lenz(2)(z) ** 2
    e_elem = np.sqrt(np.maximum(1.0 + 2.0 * hamiltonian()(z) * angular_momentum()(z) ** 2, 0.0))
    checks.append(_tally("identity:e=|A|", tol, relative_residual(e_elem, np.sqrt(asq))))

    # bracket relations (absolute)
    for name, res in kepler_relation_residuals(z).items():
        checks.append(_tally(f"relation:{name}", tol, res))
    for name, res in rescaled_relation_residuals(algebra, z).items():
        checks.append(_tally(f"relation:{name}", tol, res))
    checks.append(_tally("structure_constants", tol, structure_residuals(algebra, z).max(axis=(-1, -2))))
    checks.append(_tally("metric_form", tol, metric_form_residual(algebra, z)))
    checks.extend(superintegrability_checks(algebra, z, tol))

    # coalgebra layer
    c = StructureConstants.of(algebra)
    x = momentum_map_array(algebra, z)
    coords = (x1, x2, x3)
    h_obs = casimir_observable(algebra)
    cas = np.max(np.abs(np.stack([lie_poisson_bracket(c, h_obs, g, x) for g in coords], -1)), -1)
    checks.append(_tally("casimir_brackets_vanish", tol, cas))
    fs = generators(algebra)
    morph = np.zeros(len(z))
    for i in range(3):
        for j in range(3):
            lhs = poisson_bracket(fs[i], fs[j], z)
            rhs = lie_poisson_bracket(c, coords[i], coords[j], x)
            morph = np.maximum(morph, np.abs(lhs - rhs))
    checks.append(_tally("poisson_morphism", tol, morph))
    checks.append(_tally("casimir_pullback=H", tol, relative_residual(casimir(algebra, x), hamiltonian()(z))))
    C = quadratic_casimir(algebra)
    coad = np.array([np.abs(coadjoint_fields(algebra, xi) @ C.gradient(xi)).max() for xi in x])
    checks.append(_tally("coadjoint_fields_preserve_casimir", tol, coad))
    checks.append(_tally("gradient_check", FD_TOL, np.max(np.stack(
        [batched_gradient_check(f, z) for f in shipped_observables(algebra.region)], -1), -1)))

    # Darboux chart on a chart-covered sample
    zc = sample_points(samples, seed, algebra.value, accept=_in_chart(algebra))
    xc = momentum_map_array(algebra, zc)
    roundtrip = np.empty(len(xc))
    fd = np.empty(len(xc))
    for n, xi in enumerate(xc):
        d = darboux_forward(algebra, xi)
        back = darboux_inverse(d).array
        again = darboux_forward(algebra, back)
        roundtrip[n] = max(np.abs(back - xi).max(), abs(again.I - d.I), abs(again.x1 - d.x1),
                           angle_distance(again.angle, d.angle) if algebra is Algebra.SO3
                           else abs(again.angle - d.angle))
        fd[n] = verify_darboux_bracket(algebra, xi).max_residual
    checks.append(_tally("chart_roundtrip", tol, roundtrip))
    checks.append(_tally("darboux_brackets_fd", FD_TOL, fd))
    return checks


def hyperbolic_time_rate() -> float:
    """d tau / dt for the default hyperbolic time formula, measured on one orbit."""
    from .integrator import time_angle_rate

    return time_angle_rate([1.0, 0.0, 0.0, 2.0], duration=1.0, dt=1e-3, hyperbolic_time=HyperbolicTime.DECREASING)


def conventions() -> dict:
    rate = hyperbolic_time_rate()
    return {
        "bracket": "{f,g} = sum_i (df/dp_i dg/dq_i - df/dq_i dg/dp_i)",
        "bracket_sign": BRACKET_SIGN,
        "q1_p1_bracket": -1.0,
        "hyperbolic_time": HyperbolicTime.DECREASING.value,
        "hyperbolic_time_rate": rate,
        "hyperbolic_time_matches_flow": "increasing" if rate < 0 else "decreasing",
        "elliptic_time_angle": "time since perihelion mod 2*pi*a^1.5",
    }


def run_verification(regime: str = "both", samples: int = 1000, seed: int = 42, tol: float = 1e-8,
                     timestamp: bool = True) -> VerificationReport:
    if samples < 1:
        raise ValueError("samples must be positive")
    regimes = ["so3", "so21"] if regime == "both" else [Algebra(regime).value]
    rep = VerificationReport(SUITE, seed, samples, regimes, tol, conventions=conventions())
    for reg in regimes:
        rep.checks.extend((reg, c) for c in regime_checks(reg, samples, seed, tol))
    if timestamp:
        rep.timestamp = _dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds")
    return rep
