"""Krylov-subspace diagnostics for Floquet quantum maps.

Builds Floquet unitaries of kicked torus maps, runs Arnoldi/Lanczos
iterations over state and operator spaces with full re-orthogonalization,
and derives Krylov-complexity, entropy, and quasi-energy level statistics
from them.
"""

__version__ = "0.1.0"

from .errors import (
    ConfigError,
    FloqrylovError,
    NumericalDegeneracyError,
    NumericalError,
    ParseError,
    UsageError,
    ValidationError,
)
from .maps import (
    FloquetParams,
    QuasiEnergySpectrum,
    UnitaryMatrix,
    build_kicked_harper,
    build_toral_qkr,
    dft_matrix,
    fold_phases,
    load_unitary,
    quasi_energies,
    save_unitary,
    unitarity_defect,
)
from .liouville import (
    KrylovVector,
    Liouvillian,
    apply,
    hermitian_commutator,
    hermitian_on_state,
    initial_vectors,
    inner,
    norm,
    normalized,
    operator_vector,
    state_vector,
    unitary_conjugation,
    unitary_on_state,
)
from .arnoldi import (
    KrylovBasis,
    arnoldi_iterate,
    krylov_dimension,
    max_krylov_dim,
    subdiagonal,
)
from .lanczos import LanczosData, effective_hamiltonian, lanczos_iterate
from .complexity import (
    AmplitudeSeries,
    ComplexityTrace,
    amplitudes_direct,
    amplitudes_recursive,
    complexity_trace,
    evolve_hermitian_amplitudes,
    k_complexity,
    k_entropy,
    saturation_stats,
)
from .spectral import (
    SpacingHistogram,
    SpectrumStats,
    gue_r_reference,
    gue_surmise,
    l1_to_gue,
    l1_to_poisson,
    level_spacings,
    poisson_density,
    r_statistic,
    spacing_histogram,
    spectrum_stats,
)
from .sweeps import (
    SweepResult,
    SweepRow,
    SweepSpec,
    dk_vs_coupling,
    fluctuation_vs_size,
    run_sweep,
)

__all__ = [name for name in dir() if not name.startswith("_")]
