"""Factorized time evolution for driven three-level systems.

The propagator of a time-dependent Hamiltonian is split into a coset
factor, determined by a point moving on a base manifold, and a
block-diagonal fiber factor.  For 3x3 Hamiltonians the base motion
becomes an exactly linear rotation of a complex unit vector, which this
package integrates alongside the fiber to recompose the full unitary;
an independent brute-force integrator cross-checks every pipeline.

Modules
-------
algebra
    Generator basis, coefficient vectors, Hermitian inverse square roots.
engine
    The generic block factorization, its flows, and the two integrators.
su3
    Three-level specifics: the unit-vector chart, polar angles, phases.
su4embed
    Three-level dynamics embedded in four-level systems, the two-spin
    correspondence, and the quadric-plane coordinates.
gphase
    Geometric (anholonomy) and dynamic phases over angle paths.
apps
    The transfer, trapping, and chirped two-field model systems.
cli
    The ``cosetflow`` command: evolve, gphase, sweep.
"""

from .algebra import (
    CoefficientVector,
    assemble_su3_hamiltonian,
    coefficients_of,
    gellmann_basis,
)
from .apps import (
    KanchevaParams,
    StirapParams,
    TrappingParams,
    bessel_j0_zero,
    kancheva_hamiltonian,
    populations,
    stirap_hamiltonian,
    trapping_hamiltonian,
)
from .engine import (
    BlockHamiltonian,
    FiberState,
    Trajectory,
    build_u1,
    evolve,
    oracle_evolve,
)
from .errors import (
    BaseSingularity,
    ConfigInvalid,
    CosetflowError,
    DimensionMismatch,
    IntegrationFailure,
    NonHermitianInput,
    NormalizationDrift,
    NotPositiveDefinite,
    OutOfRange,
    PathInvalid,
    SingularityEncountered,
    StepSizeUnderflow,
)
from .gphase import (
    AnglePath,
    connection_one_form,
    geometric_phase_from_states,
    su2_geometric_phase,
    su2_loop_integral_numeric,
    su3_geometric_phase,
)
from .su3 import PolarAngles, base_trajectory, m_flow, polar_from_z
from .su4embed import (
    DMParameters,
    PluckerVector,
    dm_coefficients,
    evolve_pair,
    plucker_flow,
)

__version__ = "0.1.0"

__all__ = [
    "AnglePath",
    "BaseSingularity",
    "BlockHamiltonian",
    "CoefficientVector",
    "ConfigInvalid",
    "CosetflowError",
    "DMParameters",
    "DimensionMismatch",
    "FiberState",
    "IntegrationFailure",
    "KanchevaParams",
    "NonHermitianInput",
    "NormalizationDrift",
    "NotPositiveDefinite",
    "OutOfRange",
    "PathInvalid",
    "PluckerVector",
    "PolarAngles",
    "SingularityEncountered",
    "StepSizeUnderflow",
    "StirapParams",
    "Trajectory",
    "TrappingParams",
    "assemble_su3_hamiltonian",
    "base_trajectory",
    "bessel_j0_zero",
    "build_u1",
    "coefficients_of",
    "connection_one_form",
    "dm_coefficients",
    "evolve",
    "evolve_pair",
    "gellmann_basis",
    "geometric_phase_from_states",
    "kancheva_hamiltonian",
    "m_flow",
    "oracle_evolve",
    "plucker_flow",
    "polar_from_z",
    "populations",
    "stirap_hamiltonian",
    "su2_geometric_phase",
    "su2_loop_integral_numeric",
    "su3_geometric_phase",
    "trapping_hamiltonian",
    "__version__",
]
