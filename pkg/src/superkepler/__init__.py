"""Numerical certification of the planar Kepler problem as two superintegrable systems.

On ``H < 0`` the integrals (M12, L1, L2) close into so(3), on ``H > 0`` the
integrals (M12, K1, K2) close into so(2,1).  The package evaluates the
corresponding bracket tables, Casimirs, momentum maps, Darboux and
action-angle charts at sampled phase points, and integrates the flow to
tell closed orbits from escaping ones.
"""

__version__ = "0.1.0"

from .phase import (BRACKET_SIGN, DomainError, Observable, PhasePoint, bracket, gradient_check,
                    jacobian_rank, poisson_bracket)
from .kepler import (Region, angular_momentum, classify_region, hamiltonian, identity_residuals,
                     rescaled_integrals, runge_lenz)
from .structure import (Algebra, BracketTable, StructureConstants, bracket_table, corank,
                        verify_structure_constants, verify_superintegrability)
from .lie_poisson import (CoalgebraPoint, DarbouxPoint, casimir, darboux_forward, darboux_inverse,
                          lie_poisson_bracket, momentum_map, verify_darboux_bracket)
from .action_angle import (ActionAngleState, HyperbolicTime, OrbitElements, chart_forward,
                           hamiltonian_in_action, orbit_elements, radius_at_anomaly,
                           solve_kepler_elliptic, solve_kepler_hyperbolic)
from .integrator import (Topology, TopologyVerdict, Trajectory, classify_orbits, classify_topology,
                         integrate, propagate, verlet_step)

__all__ = [
    "__version__", "BRACKET_SIGN", "DomainError", "Observable", "PhasePoint", "bracket",
    "gradient_check", "jacobian_rank", "poisson_bracket", "Region", "angular_momentum",
    "classify_region", "hamiltonian", "identity_residuals", "rescaled_integrals", "runge_lenz",
    "Algebra", "BracketTable", "StructureConstants", "bracket_table", "corank",
    "verify_structure_constants", "verify_superintegrability", "CoalgebraPoint", "DarbouxPoint",
    "casimir", "darboux_forward", "darboux_inverse", "lie_poisson_bracket", "momentum_map",
    "verify_darboux_bracket", "ActionAngleState", "HyperbolicTime", "OrbitElements",
    "chart_forward", "hamiltonian_in_action", "orbit_elements", "radius_at_anomaly",
    "solve_kepler_elliptic", "solve_kepler_hyperbolic", "Topology", "TopologyVerdict", "Trajectory",
    "classify_orbits", "classify_topology", "integrate", "propagate", "verlet_step",
]
