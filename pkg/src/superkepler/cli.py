"""Command-line driver: ``superkepler {verify,orbit,chart,kepler}``.

Exit codes: 0 success, 1 a verification check failed, 2 usage or domain
error in the inputs, 3 runtime failure (collision during integration).
"""
from __future__ import annotations

import argparse
import csv
import json
import logging
import math
import sys
from pathlib import Path

import numpy as np

from . import __version__

log = logging.getLogger("superkepler")

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_RUNTIME = 0, 1, 2, 3


def _pair(text: str) -> tuple[float, float]:
    try:
        a, b = (float(v) for v in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected two comma-separated numbers, got {text!r}")
    return a, b


def _positive_int(text: str) -> int:
    n = int(text)
    if n < 1:
        raise argparse.ArgumentTypeError("must be a positive integer")
    return n


def _positive_float(text: str) -> float:
    x = float(text)
    if not x > 0:
        raise argparse.ArgumentTypeError("must be positive")
    return x


def _dump(obj) -> str:
    return json.dumps(obj, indent=2, allow_nan=False)


# -- verify --------------------------------------------------------------------------

def cmd_verify(args) -> int:
    from .report import run_verification

    rep = run_verification(args.regime, args.samples, args.seed, args.tol, timestamp=not args.no_timestamp)
    text = _dump(rep.as_dict()) + "\n"
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    for reg, c in rep.checks:
        if not c.ok:
            log.warning("%s/%s failed at %d of %d points (max residual %.3g > %.3g)",
                        reg, c.name, c.failed, c.passed + c.failed, c.max_residual, c.tol)
    return EXIT_OK if rep.passed else EXIT_FAIL


# -- orbit -----------------------------------------------------------------------------

def cmd_orbit(args) -> int:
    from .integrator import CollisionError, StopReason, classify_topology, integrate
    from .kepler import Region, classify_region

    z0 = np.array([*args.q, *args.p])
    if math.hypot(*args.q) == 0.0 or classify_region(z0) is Region.Z0_EXCLUDED:
        log.error("starting point lies on M12 = 0 (or r = 0)")
        return EXIT_USAGE
    try:
        traj = integrate(z0, args.dt, args.steps, escape_radius=args.escape)
    except CollisionError as exc:
        log.error("%s", exc)
        return EXIT_RUNTIME
    if args.out:
        with open(args.out, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["t", "q1", "q2", "p1", "p2", "H", "M12", "A1", "A2"])
            for t, s, c in zip(traj.times, traj.states, traj.conserved):
                w.writerow([repr(float(v)) for v in (t, *s, *c)])
    verdict = classify_topology(traj, args.return_tol, args.escape)
    print(json.dumps(verdict.as_dict()))
    if traj.stop is StopReason.COLLAPSED:
        log.error("radius fell below the collision threshold at t = %g", traj.times[-1])
        return EXIT_RUNTIME
    return EXIT_OK


# -- chart -------------------------------------------------------------------------------

def cmd_chart(args) -> int:
    from .action_angle import chart_forward
    from .kepler import Region, classify_region

    z = np.array([*args.q, *args.p])
    if math.hypot(*args.q) == 0.0:
        log.error("r = 0 is excluded")
        return EXIT_USAGE
    region = classify_region(z, args.region_tol)
    if region not in (Region.U_MINUS, Region.U_PLUS):
        log.error("point lies on %s; no chart there", region.value)
        return EXIT_USAGE
    st = chart_forward(z, args.hyperbolic_time)
    el = st.elements
    out = {
        "regime": st.algebra.value,
        # "+ 0.0" turns -0.0 into 0.0
        "x": [float(v) + 0.0 for v in st.coalgebra],
        "I": st.I,
        "x1": st.x1 + 0.0,
        "angle": st.angle,
        "timeAngle": st.time_angle,
        "a": el.a,
        "e": el.e,
    }
    if el.period is not None:
        out["period"] = el.period
        out["literalAlpha"] = st.literal_alpha
    else:
        out["hyperbolicTime"] = st.hyperbolic_time.value
    print(json.dumps(out))
    return EXIT_OK


# -- kepler --------------------------------------------------------------------------------

def cmd_kepler(args) -> int:
    from .action_angle import solve_kepler_elliptic, solve_kepler_hyperbolic

    e, m = args.e, args.mean_anomaly
    if args.hyperbolic:
        if not e > 1:
            log.error("hyperbolic branch needs e > 1")
            return EXIT_USAGE
        u = solve_kepler_hyperbolic(m, e, args.tol)
        resid = abs(u - e * math.sinh(u) - m)
    else:
        if not 0 <= e < 1:
            log.error("elliptic branch needs 0 <= e < 1")
            return EXIT_USAGE
        u = solve_kepler_elliptic(m, e, args.tol)
        resid = abs(u - e * math.sin(u) - m)
    print(json.dumps({"u": u, "residual": resid}))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="superkepler", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("verify", help="run the sampled identity and bracket checks")
    p.add_argument("--regime", choices=["so3", "so21", "both"], default="both")
    p.add_argument("--samples", type=_positive_int, default=1000)
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--tol", type=_positive_float, default=1e-8)
    p.add_argument("--out", help="write the JSON report here instead of stdout")
    p.add_argument("--no-timestamp", action="store_true", help="omit the timestamp for reproducible output")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("orbit", help="integrate one orbit and classify its topology")
    p.add_argument("--q", type=_pair, required=True, metavar="Q1,Q2")
    p.add_argument("--p", type=_pair, required=True, metavar="P1,P2")
    p.add_argument("--dt", type=_positive_float, default=1e-3)
    p.add_argument("--steps", type=_positive_int, default=10000)
    p.add_argument("--out", help="CSV file for the trajectory")
    p.add_argument("--escape", type=_positive_float, default=50.0)
    p.add_argument("--return-tol", type=_positive_float, default=1e-3)
    p.set_defaults(func=cmd_orbit)

    p = sub.add_parser("chart", help="action-angle chart values of a phase point")
    p.add_argument("--q", type=_pair, required=True, metavar="Q1,Q2")
    p.add_argument("--p", type=_pair, required=True, metavar="P1,P2")
    p.add_argument("--hyperbolic-time", choices=["decreasing", "increasing"], default="decreasing")
    p.add_argument("--region-tol", type=_positive_float, default=1e-9)
    p.set_defaults(func=cmd_chart)

    p = sub.add_parser("kepler", help="solve the elliptic or hyperbolic Kepler equation")
    p.add_argument("--e", type=float, required=True)
    p.add_argument("--mean-anomaly", type=float, required=True)
    p.add_argument("--hyperbolic", action="store_true")
    p.add_argument("--tol", type=_positive_float, default=1e-12)
    p.set_defaults(func=cmd_kepler)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(name)s: %(levelname)s: %(message)s")
    return args.func(args)


if __name__ == "__main__":
    raise SystemExit(main())
