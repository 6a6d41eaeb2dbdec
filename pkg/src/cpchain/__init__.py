"""Collective Casimir-Polder forces for emitter chains near a half-space.

A numpy/scipy library computing surface-modified collective vacuum forces
and collective spontaneous emission for a linear chain of two-level
emitters above a planar Drude half-space: Green's-tensor quadrature,
master-equation coefficient assembly, Dicke-state algebra, fixed-step
Lindblad dynamics, and force maps.  See README.md for an overview and
the demos/ directory for worked examples.
"""

from .coeffs import (CouplingSet, EmitterParams, Geometry, coupling_set,
                     cooperativity_f, gamma, image_kernel_g,
                     nonretarded_closed_forms, omega_dd, omega_minus,
                     omega_res)
from .dicke import (QuantumState, SpinOps, dicke_state, pair_correlator,
                    subradiant_basis, subradiant_dimension)
from .dynamics import EvolutionSpec, ForceSeries, evolve, superradiant_boost
from .errors import (BranchAmbiguityError, ConfigError, CpchainError,
                     GeometryError, QuadratureError, ResonanceError,
                     SingularityError, StabilityError)
from .forces import (ForceMap, force_map, force_of_state,
                     special_state_forces, subradiant_force_spread,
                     superradiant_force_N)
from .greens import (DyadicTensor, greens_free, greens_scatter_dz,
                     greens_scatter_imag, greens_scatter_real)
from .media import FresnelPair, Medium, fresnel, image_factor, permittivity
from .quadrature import DEFAULT_QUAD, QuadratureSpec

__version__ = "0.1.0"
