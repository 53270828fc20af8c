"""Stoermer-Verlet propagation of the Kepler flow and empirical orbit topology."""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import _kernels
from .kepler import angular_momentum, hamiltonian, runge_lenz
from .phase import PhasePoint, as_array

MIN_RADIUS = 1e-6


class CollisionError(RuntimeError):
    """The orbit came within ``MIN_RADIUS`` of the centre."""


class StopReason(str, enum.Enum):
    COMPLETED = "completed"
    ESCAPED = "escaped"
    COLLAPSED = "collapsed"


_STOP = {_kernels.RUNNING: StopReason.COMPLETED, _kernels.ESCAPED: StopReason.ESCAPED,
         _kernels.COLLAPSED: StopReason.COLLAPSED}


def verlet_step(z, dt: float) -> PhasePoint:
    """One kick-drift-kick step for H = p^2/2 - 1/r (same arithmetic as the path kernels)."""
    q1, q2, p1, p2 = (float(v) for v in as_array(z))
    r = math.sqrt(q1 * q1 + q2 * q2)
    if r < MIN_RADIUS:
        raise CollisionError("r below the collision threshold")
    h = 0.5 * dt
    r3 = r * r * r
    p1 -= h * q1 / r3
    p2 -= h * q2 / r3
    q1 += dt * p1
    q2 += dt * p2
    r = math.sqrt(q1 * q1 + q2 * q2)
    if r < MIN_RADIUS:
        raise CollisionError("r below the collision threshold")
    r3 = r * r * r
    p1 -= h * q1 / r3
    p2 -= h * q2 / r3
    return PhasePoint(q1, q2, p1, p2)


def conserved_quantities(states) -> np.ndarray:
    """Columns H, M12, A1, A2 for each row of ``states``."""
    states = np.atleast_2d(states)
    obs = (hamiltonian(), angular_momentum(), runge_lenz(1), runge_lenz(2))
    return np.column_stack([f(states) for f in obs])


@dataclass(frozen=True)
class Trajectory:
    dt: float
    states: np.ndarray = field(repr=False)
    conserved: np.ndarray = field(repr=False)
    stop: StopReason = StopReason.COMPLETED

    def __post_init__(self):
        if len(self.states) == 0:
            raise ValueError("a trajectory holds at least its initial state")
        self.states.setflags(write=False)
        self.conserved.setflags(write=False)

    @property
    def times(self) -> np.ndarray:
        return self.dt * np.arange(len(self.states))

    def drift(self) -> np.ndarray:
        """max |Q(t) - Q(0)| for Q = H, M12, A1, A2."""
        return np.abs(self.conserved - self.conserved[0]).max(axis=0)


def integrate(z0, dt: float, steps: int, escape_radius: float = math.inf) -> Trajectory:
    """Run ``steps`` Verlet steps, stopping early on escape or collision."""
    if steps < 1:
        raise ValueError("steps must be at least 1")
    z0 = as_array(z0)
    if math.hypot(z0[0], z0[1]) < MIN_RADIUS:
        raise CollisionError("initial point at the centre")
    states, status = _kernels.verlet_path(z0, dt, steps, escape_radius, MIN_RADIUS)
    return Trajectory(float(dt), states, conserved_quantities(states), _STOP[int(status)])


def propagate(z0, duration: float, dt: float) -> np.ndarray:
    """State after exactly ``duration``: whole steps of ``dt`` then one remainder step."""
    n = int(math.floor(duration / dt + 1e-12))
    z = as_array(z0)
    if n:
        states, status = _kernels.verlet_path(z, dt, n, math.inf, MIN_RADIUS)
        if status == _kernels.COLLAPSED:
            raise CollisionError("collision during propagation")
        z = states[-1]
    rest = duration - n * dt
    if rest > 0:
        z = verlet_step(z, rest).array
    return z


class Topology(str, enum.Enum):
    CIRCLE = "CIRCLE"
    LINE = "LINE"
    UNDECIDED = "UNDECIDED"


@dataclass(frozen=True)
class TopologyVerdict:
    tag: Topology
    period: Optional[float] = None
    escape_radius: Optional[float] = None

    def as_dict(self) -> dict:
        return {"tag": self.tag.value, "period": self.period, "escape_radius": self.escape_radius}


MIN_RETURN_STEP = 10


def classify_topology(traj: Trajectory, return_tol: float = 1e-3, escape_radius: float = 50.0) -> TopologyVerdict:
    """CIRCLE on a return to the starting state, LINE on escape with H > 0.

    A return needs the trajectory to leave the ``return_tol`` box around the
    start first and to come back after step 10; all four coordinates are
    compared.  The period is the step of closest approach during that visit.
    """
    s = traj.states
    dist = np.abs(s - s[0]).max(axis=1)
    outside = np.flatnonzero(dist > return_tol)
    if outside.size:
        back = np.flatnonzero((dist <= return_tol) & (np.arange(len(s)) > max(outside[0], MIN_RETURN_STEP)))
        if back.size:
            first = back[0]
            end = first
            while end + 1 < len(s) and dist[end + 1] <= return_tol:
                end += 1
            k = first + int(np.argmin(dist[first : end + 1]))
            return TopologyVerdict(Topology.CIRCLE, period=k * traj.dt)
    r = np.hypot(s[:, 0], s[:, 1])
    escaped = (r > escape_radius) & (traj.conserved[:, 0] > 0)
    if escaped.any():
        return TopologyVerdict(Topology.LINE, escape_radius=float(escape_radius))
    return TopologyVerdict(Topology.UNDECIDED)


@dataclass(frozen=True)
class BatchResult:
    verdicts: list
    energy_drift: np.ndarray
    angmom_drift: np.ndarray
    steps: np.ndarray


def classify_orbits(z0s, dt: float = 1e-3, max_steps: int = 300_000, return_tol: float = 1e-2,
                    escape_radius: float = 50.0) -> BatchResult:
    """Streaming version of :func:`integrate` + :func:`classify_topology` for many orbits."""
    z0s = np.atleast_2d(np.asarray(z0s, dtype=float))
    status, event, dh, dm = _kernels.verlet_batch(z0s, dt, max_steps, return_tol, escape_radius,
                                                  MIN_RADIUS, MIN_RETURN_STEP)
    h0 = hamiltonian()(z0s)
    verdicts = []
    for st, ev, h in zip(status, event, h0):
        if st == _kernels.CLOSED:
            verdicts.append(TopologyVerdict(Topology.CIRCLE, period=float(ev) * dt))
        elif st == _kernels.ESCAPED and h > 0:
            verdicts.append(TopologyVerdict(Topology.LINE, escape_radius=float(escape_radius)))
        else:
            verdicts.append(TopologyVerdict(Topology.UNDECIDED))
    return BatchResult(verdicts, dh, dm, event)


def time_angle_rate(z0, duration: float = 1.0, dt: float = 1e-3, hyperbolic_time="decreasing") -> float:
    """Finite-time rate d(time_angle)/dt measured along the integrated flow."""
    from .action_angle import chart_forward

    a = chart_forward(z0, hyperbolic_time)
    b = chart_forward(propagate(z0, duration, dt), hyperbolic_time)
    diff = b.time_angle - a.time_angle
    period = a.elements.period
    if period is not None:
        diff = math.remainder(diff, period)
    return diff / duration
