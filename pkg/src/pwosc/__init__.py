"""Discrete oscillation Besov norms, Schatten quasinorms of band-limited
Toeplitz operators, and discrete Hilbert transform commutators."""

from .besov import (
    BesovResult,
    besov_norm,
    bmo_norm,
    interpolating_extension,
    oscillation,
    rational_besov_norm,
)
from .commutators import (
    ORDER1,
    ORDER2,
    RECTANGULAR,
    SQUARE,
    CommutatorSpec,
    commutator_matrix,
    commutator_schatten_adaptive,
    compact_commutator_singular_values,
    counterexample_symbol,
    hilbert_matrix,
    multiplication_schatten,
    multiplication_symbol,
    negative_band_symbol,
    rank_one_K,
    rank_one_kernel_matrix,
    rank_two_K_singular_values,
    rank_two_kernel_matrix,
    sampled_hankel_matrix,
)
from .decomposition import (
    PursuitResult,
    SnapResult,
    choose_eta,
    eta_sample_grid,
    kernel_besov_ratio,
    matching_pursuit_fit,
    rank_two_diff_schatten,
    snap_atoms,
    synthesize_from_atoms,
    toeplitz_residual_operator,
)
from .harness import (
    EXPERIMENT_NAMES,
    ExperimentConfig,
    cell_rng,
    config_from_json,
    negative_band_terms,
    resolve_config,
    run_band_symbol_lp,
    run_commutator_band,
    run_experiment,
    run_multiplication_growth,
    run_toeplitz_besov_band,
    twisted_symbol_terms,
    write_report,
)
from .kernels import (
    FULL_BAND,
    HALF_BAND,
    KernelSpec,
    LambdaPoint,
    LambdaWindow,
    StructuredPointSet,
    generate_lambda_set,
    gram_matrix,
    kernel_eval,
    kernel_norm_sq,
    sampling_embedding_check,
)
from .ladfit import certify_zero_fit, fit_row_exact, level_oscillations
from .lattice import (
    ZERO_TAIL,
    BesovParams,
    DyadicInterval,
    Lattice,
    LatticeFunction,
    TailModel,
    dyadic_positions,
    poly_degree_for,
)
from .operators import (
    AtomicSymbol,
    DenseOperator,
    FiniteRankOperator,
    SingularSpectrum,
    dense_toeplitz_sinc,
    rochberg_peller_functional,
    sample_symbol_sequence,
    schatten_quasinorm,
    singular_values,
    standard_symbol_eval,
    toeplitz_from_atoms,
)

__version__ = "0.1.0"
