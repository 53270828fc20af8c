"""Acceptance criteria, one test each.

Every criterion records a single PASS/FAIL line (printed in the pytest
terminal summary, or on stdout when this file is run as a script).
Tolerances are the pinned acceptance values; nothing here is loosened to
make a criterion pass.
"""
import math
import subprocess
import sys
import time

import numpy as np
import pytest

from superkepler.action_angle import orbit_elements, solve_kepler_elliptic, solve_kepler_hyperbolic
from superkepler.integrator import Topology, classify_orbits, integrate, propagate
from superkepler.kepler import angular_momentum, hamiltonian, identity_sides, relative_residual, runge_lenz
from superkepler.kepler import shipped_observables
from superkepler.phase import gradient_check
from superkepler.report import regime_checks
from superkepler.sampling import sample_orbits, sample_points
from superkepler.structure import (Algebra, kepler_relation_residuals, rescaled_relation_residuals,
                                   structure_residuals, verify_superintegrability)

SEED = 42
SAMPLES = 1000
REGIMES = ("so3", "so21")
RESULTS: dict[int, str] = {}


def record(number, title, ok, detail):
    RESULTS[number] = f"ACCEPTANCE {number} {'PASS' if ok else 'FAIL'} {title}: {detail}"
    return ok


def criterion_1():
    start = time.perf_counter()
    raw, rescaled = 0.0, 0.0
    for regime in REGIMES:
        z = sample_points(SAMPLES, SEED, regime)
        raw = max(raw, max(float(np.max(r)) for r in kepler_relation_residuals(z).values()))
        rescaled = max(rescaled, max(float(np.max(r)) for r in rescaled_relation_residuals(regime, z).values()),
                       float(np.max(structure_residuals(regime, z))))
    elapsed = time.perf_counter() - start
    ok = raw <= 1e-10 and rescaled <= 1e-9 and elapsed < 10.0
    return record(1, "bracket tables", ok,
                  f"raw {raw:.2e} <= 1e-10, so(3)/so(2,1) {rescaled:.2e} <= 1e-9, {elapsed:.2f} s < 10 s")


def criterion_2():
    parts, ok = [], True
    for regime in REGIMES:
        rep = verify_superintegrability(regime, samples=SAMPLES, seed=SEED, tol=1e-10)
        ok &= rep.passed and all(c.passed == SAMPLES for c in rep.checks)
        inv = rep.check("involution_with_H")
        parts.append(f"{regime} {min(c.passed for c in rep.checks)}/{SAMPLES} (max {{H,F}} {inv.max_residual:.1e})")
    return record(2, "superintegrability", ok, ", ".join(parts))


def criterion_3():
    worst = {}
    h, m = hamiltonian(), angular_momentum()
    for regime in REGIMES:
        z = sample_points(SAMPLES, SEED, regime)
        for name, (lhs, rhs) in identity_sides(z).items():
            worst[name] = max(worst.get(name, 0.0), float(relative_residual(lhs, rhs).max()))
        a_len = np.hypot(runge_lenz(1)(z), runge_lenz(2)(z))
        e_formula = np.sqrt(np.maximum(1.0 + 2.0 * h(z) * m(z) ** 2, 0.0))
        worst["e=|A|"] = max(worst.get("e=|A|", 0.0), float(relative_residual(e_formula, a_len).max()))
        e_elements = np.array([orbit_elements(p).e for p in z])
        worst["e=|A|"] = max(worst["e=|A|"], float(relative_residual(e_elements, a_len).max()))
    ok = len(worst) == 5 and max(worst.values()) <= 1e-10
    return record(3, "algebraic identities", ok, ", ".join(f"{k} {v:.1e}" for k, v in worst.items()) + " <= 1e-10")


def criterion_4():
    limits = {"casimir_brackets_vanish": 1e-9, "poisson_morphism": 1e-9, "casimir_pullback=H": 1e-10,
              "darboux_brackets_fd": 1e-6, "chart_roundtrip": 1e-10}
    worst = dict.fromkeys(limits, 0.0)
    counts_ok = True
    for regime in REGIMES:
        for c in regime_checks(regime, SAMPLES, SEED, tol=1e-10):
            if c.name in limits:
                worst[c.name] = max(worst[c.name], c.max_residual)
                counts_ok &= c.passed + c.failed == SAMPLES
    ok = counts_ok and all(worst[k] <= limits[k] for k in limits)
    return record(4, "coalgebra layer", ok, ", ".join(f"{k} {worst[k]:.1e} <= {limits[k]:.0e}" for k in limits))


def criterion_5():
    rng = np.random.Generator(np.random.PCG64(SEED))
    n = 10_000
    mean = rng.uniform(-4 * math.pi, 4 * math.pi, n)
    e = rng.uniform(0.0, 0.99, n)
    u = solve_kepler_elliptic(mean, e)
    ell = float(np.abs(u - e * np.sin(u) - mean).max())
    mean_h = rng.uniform(-50.0, 50.0, n)
    e_h = 1.0 + rng.uniform(0.0, 9.0, n)
    e_h[e_h == 1.0] = 2.0
    uh = solve_kepler_hyperbolic(mean_h, e_h)
    hyp = float(np.abs(uh - e_h * np.sinh(uh) - mean_h).max())
    identity = bool(np.array_equal(solve_kepler_elliptic(mean, np.zeros(n)), mean))
    ok = ell <= 1e-12 and hyp <= 1e-12 and identity
    return record(5, "Kepler solvers", ok,
                  f"elliptic {ell:.1e}, hyperbolic {hyp:.1e} <= 1e-12 on 1e4 each, e=0 exact: {identity}")


def criterion_6():
    start = time.perf_counter()
    circle = np.array([1.0, 0.0, 0.0, 1.0])
    ret = float(np.abs(propagate(circle, 2 * math.pi, 1e-3) - circle).max())

    ellipses = sample_orbits(50, SEED, "so3")
    res = classify_orbits(ellipses)
    period_err = max(abs(v.period - orbit_elements(z).period) / orbit_elements(z).period
                     if v.period else math.inf for z, v in zip(ellipses, res.verdicts))

    long_runs = [circle, *sample_orbits(10, SEED, "so3", max_eccentricity=0.9)]
    dh = dm = 0.0
    for z in long_runs:
        drift = integrate(z, 1e-3, 100_000).drift()
        dh, dm = max(dh, drift[0]), max(dm, drift[1])

    tags = {}
    for regime, want in (("so3", Topology.CIRCLE), ("so21", Topology.LINE)):
        verdicts = classify_orbits(sample_orbits(100, SEED, regime)).verdicts
        tags[regime] = sum(v.tag is want for v in verdicts)
    elapsed = time.perf_counter() - start
    ok = (ret <= 1e-4 and period_err <= 1e-2 and dh <= 1e-6 and dm <= 1e-12
          and tags == {"so3": 100, "so21": 100} and elapsed < 60.0)
    return record(6, "dynamics", ok,
                  f"return {ret:.1e} <= 1e-4, period {period_err:.1e} <= 1e-2, dH {dh:.1e} <= 1e-6, "
                  f"dM12 {dm:.1e} <= 1e-12, CIRCLE {tags['so3']}/100, LINE {tags['so21']}/100, "
                  f"{elapsed:.1f} s < 60 s")


def criterion_7():
    worst, labels = 0.0, set()
    for regime, region in (("so3", Algebra.SO3.region), ("so21", Algebra.SO21.region)):
        z = sample_points(SAMPLES, SEED, regime)
        for f in shipped_observables(region):
            labels.add(f.label)
            worst = max(worst, max(gradient_check(f, p) for p in z))
    return record(7, "gradient oracle", worst <= 1e-6,
                  f"{len(labels)} observables x {SAMPLES} points per regime, max {worst:.1e} <= 1e-6")


def _cli(*args):
    return subprocess.run([sys.executable, "-m", "superkepler", *args], capture_output=True)


def criterion_8():
    a = _cli("verify", "--seed", "42", "--no-timestamp")
    b = _cli("verify", "--seed", "42", "--no-timestamp")
    full = _cli("verify", "--regime", "both")
    same = a.returncode == b.returncode == 0 and a.stdout == b.stdout and len(a.stdout) > 0
    ok = same and full.returncode == 0
    return record(8, "CLI determinism", ok,
                  f"byte-identical: {a.stdout == b.stdout} ({len(a.stdout)} bytes), "
                  f"verify --regime both exit {full.returncode}")


CRITERIA = [criterion_1, criterion_2, criterion_3, criterion_4, criterion_5, criterion_6, criterion_7,
            criterion_8]


@pytest.mark.parametrize("criterion", CRITERIA, ids=[f"criterion_{i}" for i in range(1, 9)])
def test_acceptance(criterion):
    ok = criterion()
    number = CRITERIA.index(criterion) + 1
    print(RESULTS[number])
    assert ok, RESULTS[number]


if __name__ == "__main__":
    failures = 0
    for fn in CRITERIA:
        failures += not fn()
        print(RESULTS[CRITERIA.index(fn) + 1], flush=True)
    sys.exit(1 if failures else 0)
