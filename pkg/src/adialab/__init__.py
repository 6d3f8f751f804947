"""Numerical laboratory for the discretized adiabatic theorem.

The package measures, instance by instance, whether the quantitative
runtime bound

    T >= (C / delta^2) * max(||H'||^3 / lambda^4, ||H'|| ||H''|| / lambda^3)

really carries the tracked eigenstate to within delta of its endpoint,
and verifies each intermediate inequality of the underlying
geometric-sum cancellation argument numerically.
"""

from .errors import (
    AdialabError,
    ConfigError,
    DomainError,
    FeasibilityError,
    GapCollapseError,
    IntegrityError,
    NonConvergenceError,
    NumericalError,
    NumericalInstabilityError,
    UnderResolvedGridError,
)
from .evolution import (
    EvolutionConfig,
    EvolutionResult,
    distance_l2,
    distance_phase_invariant,
    evolve_adaptive,
    evolve_discrete,
    step_unitary,
)
from .hamiltonians import (
    HermitianOperator,
    NormBundle,
    TimeDependentHamiltonian,
    derivative,
    eval_at,
    eval_batch,
    norm_bundle,
    operator_norm,
)
from .problems import (
    InstanceSpec,
    affine_hamiltonian,
    constant,
    grover,
    landau_zener,
    make_instance,
    random_interpolation,
    transverse_ising,
)
from .proofcheck import (
    CheckEntry,
    ProofCheckConfig,
    ProofReport,
    error_vector,
    error_vectors,
    geometric_sum_norm,
    geometric_sum_norm_detailed,
    run_proofcheck,
    total_error_vector,
)
from .spectral import (
    EigenPath,
    EigenSystem,
    GapReport,
    decompose,
    gauge_residual,
    path_derivatives,
    spectral_gap,
    track_eigenpath,
)
from .theorem import (
    TheoremInputs,
    TheoremVerdict,
    required_time_general,
    required_time_special,
    shift_to_zero_eigenvalue,
    verify,
)

__version__ = "0.1.0"
