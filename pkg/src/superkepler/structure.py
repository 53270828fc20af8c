"""Pointwise certification of superintegrability and of the Lie-algebra bracket tables."""
from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .kepler import Region, angular_momentum, hamiltonian, rescaled_integrals, runge_lenz
from .phase import DomainError, Observable, as_array, jacobian, numerical_rank, poisson_bracket
from .sampling import sample_points

RANK_TOL = 1e-10


class Algebra(str, enum.Enum):
    SO3 = "so3"
    SO21 = "so21"

    @property
    def region(self) -> Region:
        return Region.U_MINUS if self is Algebra.SO3 else Region.U_PLUS


@dataclass(frozen=True)
class BracketTable:
    labels: tuple
    entries: np.ndarray

    @property
    def k(self) -> int:
        return len(self.labels)


@dataclass(frozen=True)
class StructureConstants:
    """``c[i, j, h]`` with ``{F_i, F_j} = sum_h c[i, j, h] F_h``."""

    algebra: Algebra
    c: np.ndarray

    @classmethod
    def of(cls, algebra) -> "StructureConstants":
        algebra = Algebra(algebra)
        c = np.zeros((3, 3, 3))
        # {F1,F2} = +-F3, {F2,F3} = F1, {F3,F1} = F2
        c[0, 1, 2] = 1.0 if algebra is Algebra.SO3 else -1.0
        c[1, 2, 0] = 1.0
        c[2, 0, 1] = 1.0
        c -= np.swapaxes(c, 0, 1)
        return cls(algebra, c)

    def bivector(self, x) -> np.ndarray:
        """Matrix ``w^{ij}(x) = c_ij^h x_h`` of the Lie-Poisson structure."""
        return np.einsum("ijh,...h->...ij", self.c, np.asarray(x, dtype=float))


def generators(algebra) -> tuple[Observable, Observable, Observable]:
    """(F1, F2, F3) = (-L1, -L2, -M12) for so(3); (S1, S2, S3) = (-K1, -K2, -M12) for so(2,1)."""
    algebra = Algebra(algebra)
    a, b = rescaled_integrals(algebra.region)
    name = "F" if algebra is Algebra.SO3 else "S"
    return (
        (-a).renamed(f"{name}1"),
        (-b).renamed(f"{name}2"),
        (-angular_momentum()).renamed(f"{name}3"),
    )


def bracket_table(fs: Sequence[Observable], z) -> BracketTable:
    z = as_array(z)
    k = len(fs)
    s = np.zeros((k, k))
    for i, j in itertools.combinations(range(k), 2):
        s[i, j] = poisson_bracket(fs[i], fs[j], z)
        s[j, i] = -s[i, j]
    return BracketTable(tuple(f.label for f in fs), s)


def corank(table: BracketTable, tol: float = RANK_TOL) -> int:
    return table.k - numerical_rank(table.entries, tol)


def _require_region(algebra: Algebra, z):
    h = hamiltonian()(z)
    want_negative = algebra is Algebra.SO3
    if np.any(h >= 0) if want_negative else np.any(h <= 0):
        raise DomainError(f"{algebra.value} relations need points in {algebra.region.value}")


def structure_residuals(algebra, z, fs: Optional[Sequence[Observable]] = None) -> np.ndarray:
    """|{F_i, F_j} - c_ij^h F_h| for all ordered pairs; shape ``(..., 3, 3)``."""
    algebra = Algebra(algebra)
    z = as_array(z)
    _require_region(algebra, z)
    fs = fs or generators(algebra)
    c = StructureConstants.of(algebra).c
    vals = np.stack([f(z) for f in fs], axis=-1)
    out = np.zeros(z.shape[:-1] + (3, 3))
    for i, j in itertools.product(range(3), repeat=2):
        lhs = poisson_bracket(fs[i], fs[j], z)
        out[..., i, j] = np.abs(lhs - vals @ c[i, j])
    return out


@dataclass
class StructureReport:
    algebra: str
    max_residual: float
    tol: float
    residuals: np.ndarray = field(repr=False)

    @property
    def passed(self) -> bool:
        return self.max_residual <= self.tol


def verify_structure_constants(algebra, z, tol: float = 1e-9) -> StructureReport:
    res = structure_residuals(algebra, z)
    return StructureReport(Algebra(algebra).value, float(res.max()), tol, res)


# -- raw Kepler relations --------------------------------------------------------------

def kepler_relation_residuals(z) -> dict[str, np.ndarray]:
    """Residuals of {M12, A_i} = eta_2i A1 - eta_1i A2 and {A1, A2} = 2 H M12."""
    z = as_array(z)
    m, a1, a2, h = angular_momentum(), runge_lenz(1), runge_lenz(2), hamiltonian()
    return {
        "{M12,A1}=-A2": np.abs(poisson_bracket(m, a1, z) + a2(z)),
        "{M12,A2}=A1": np.abs(poisson_bracket(m, a2, z) - a1(z)),
        "{A1,A2}=2HM12": np.abs(poisson_bracket(a1, a2, z) - 2.0 * h(z) * m(z)),
    }


def rescaled_relation_residuals(algebra, z) -> dict[str, np.ndarray]:
    """Residuals of the (M12, L_i) or (M12, K_i) relations."""
    algebra = Algebra(algebra)
    z = as_array(z)
    _require_region(algebra, z)
    m = angular_momentum()
    b1, b2 = rescaled_integrals(algebra.region)
    n = b1.label[0]
    top = -m(z) if algebra is Algebra.SO3 else m(z)
    return {
        f"{{M12,{n}1}}=-{n}2": np.abs(poisson_bracket(m, b1, z) + b2(z)),
        f"{{M12,{n}2}}={n}1": np.abs(poisson_bracket(m, b2, z) - b1(z)),
        f"{{{n}1,{n}2}}={'-' if algebra is Algebra.SO3 else ''}M12": np.abs(poisson_bracket(b1, b2, z) - top),
    }


def metric(algebra) -> np.ndarray:
    return np.diag([1.0, 1.0, 1.0 if Algebra(algebra) is Algebra.SO3 else -1.0])


def rotation_generators(algebra) -> list[list[Optional[Observable]]]:
    """Antisymmetric array M_{mu nu}: M_12 = M12, M_i3 = -L_i (or -K_i)."""
    algebra = Algebra(algebra)
    b1, b2 = rescaled_integrals(algebra.region)
    m = angular_momentum()
    grid: list[list[Optional[Observable]]] = [[None] * 3 for _ in range(3)]
    grid[0][1], grid[1][0] = m, -m
    grid[0][2], grid[2][0] = -b1, b1
    grid[1][2], grid[2][1] = -b2, b2
    return grid


def metric_form_residual(algebra, z) -> np.ndarray:
    """Max over all index quadruples of the metric-form bracket relation residual.

    {M_mn, M_ab} = g_mb M_na + g_na M_mb - g_ma M_nb - g_nb M_ma with the
    Euclidean (so3) or (+,+,-) (so21) metric g.
    """
    algebra = Algebra(algebra)
    z = as_array(z)
    _require_region(algebra, z)
    g = metric(algebra)
    grid = rotation_generators(algebra)
    vals = np.zeros(z.shape[:-1] + (3, 3))
    for a, b in itertools.product(range(3), repeat=2):
        if grid[a][b] is not None:
            vals[..., a, b] = grid[a][b](z)
    worst = np.zeros(z.shape[:-1])
    for mu, nu, al, be in itertools.product(range(3), repeat=4):
        if grid[mu][nu] is None or grid[al][be] is None:
            continue
        lhs = poisson_bracket(grid[mu][nu], grid[al][be], z)
        rhs = (g[mu, be] * vals[..., nu, al] + g[nu, al] * vals[..., mu, be]
               - g[mu, al] * vals[..., nu, be] - g[nu, be] * vals[..., mu, al])
        worst = np.maximum(worst, np.abs(lhs - rhs))
    return worst


# -- superintegrability checks (independence, dependence on H, corank, involution) ----

@dataclass
class CheckTally:
    name: str
    tol: float
    passed: int = 0
    failed: int = 0
    max_residual: float = 0.0

    def add(self, ok, residual=None) -> None:
        ok = np.atleast_1d(ok)
        self.passed += int(ok.sum())
        self.failed += int((~ok).sum())
        if residual is not None:
            r = np.atleast_1d(residual)
            if r.size:
                self.max_residual = max(self.max_residual, float(np.max(r)))

    def merge(self, other: "CheckTally") -> "CheckTally":
        return CheckTally(self.name, self.tol, self.passed + other.passed, self.failed + other.failed,
                          max(self.max_residual, other.max_residual))

    @property
    def ok(self) -> bool:
        return self.failed == 0

    def as_dict(self) -> dict:
        return {"name": self.name, "tol": self.tol, "passed": self.passed, "failed": self.failed,
                "max_residual": self.max_residual, "ok": self.ok}


def superintegrability_checks(algebra, z, tol: float = 1e-8, rank_tol: float = RANK_TOL,
                              fs: Optional[Sequence[Observable]] = None) -> list[CheckTally]:
    """Independence, dependence on H, corank and involution at a batch of points."""
    algebra = Algebra(algebra)
    z = np.atleast_2d(as_array(z))
    fs = list(fs or generators(algebra))
    h = hamiltonian()
    gen_jac = jacobian(fs, z)
    full_jac = np.concatenate([h.gradient(z)[:, None, :], gen_jac], axis=1)
    sv_gen = np.linalg.svd(gen_jac, compute_uv=False)
    sv_full = np.linalg.svd(full_jac, compute_uv=False)
    rank_gen = np.count_nonzero(sv_gen > rank_tol * sv_gen[:, :1], axis=1)
    rank_full = np.count_nonzero(sv_full > rank_tol * sv_full[:, :1], axis=1)

    coranks = np.empty(len(z), dtype=int)
    for n, point in enumerate(z):
        coranks[n] = corank(bracket_table(fs, point), rank_tol)
    inv = np.max(np.abs(np.stack([poisson_bracket(h, f, z) for f in fs], axis=-1)), axis=-1)

    checks = [
        CheckTally("generator_rank_3", rank_tol),
        CheckTally("hamiltonian_dependent_rank_3", rank_tol),
        CheckTally("bracket_corank_1", rank_tol),
        CheckTally("involution_with_H", tol),
    ]
    # rank checks report the integer miss |rank - expected|
    checks[0].add(rank_gen == 3, np.abs(rank_gen - 3).astype(float))
    checks[1].add(rank_full == 3, np.abs(rank_full - 3).astype(float))
    checks[2].add(coranks == 1, np.abs(coranks - 1).astype(float))
    checks[3].add(inv <= tol, inv)
    return checks


@dataclass
class SuperintegrabilityReport:
    algebra: str
    samples: int
    seed: int
    checks: list

    @property
    def passed(self) -> bool:
        return all(c.ok for c in self.checks)

    def check(self, name: str) -> CheckTally:
        return next(c for c in self.checks if c.name == name)


def verify_superintegrability(algebra, samples: int = 1000, seed: int = 42, tol: float = 1e-8,
                              rank_tol: float = RANK_TOL,
                              fs: Optional[Sequence[Observable]] = None) -> SuperintegrabilityReport:
    """Sample the regime and tally the superintegrability checks; failures are counted, not raised."""
    algebra = Algebra(algebra)
    z = sample_points(samples, seed, algebra.value)
    checks = superintegrability_checks(algebra, z, tol, rank_tol, fs)
    return SuperintegrabilityReport(algebra.value, samples, seed, checks)
