"""Numerical laboratory for finite-band multi-diagonal ergodic operators."""
from .numerics import Perm, Poly, perm_compose, perm_cycle_type, poly_eval, poly_roots
from .ergodic_operator import (
    ErgodicSystem,
    OperatorSection,
    ValidationError,
    build_section,
    constant_system,
    jacobi_system,
    shift_commutation_residual,
    symbol_curve_residual,
    symbol_matrix,
)
from .floquet import (
    BandSet,
    PeriodicJacobi,
    bands_from_discriminant,
    bands_from_symbol,
    companion_matrix,
    discriminant,
    dos_band_check,
    floquet_multipliers,
    period_monodromy,
    spectrum_bands,
)
from .covering import (
    INF,
    HurwitzData,
    RationalMap,
    branching_divisor,
    fiber,
    genus,
    hurwitz_equivalent,
    lift_loop,
    monodromy,
)
from .inverse_spectral import (
    FitProblem,
    fit_discriminant,
    fit_residual,
    magic_formula_check,
    open_gaps,
    validate_target,
)
from .green_model import (
    TModel,
    TrivialModel,
    greens_function,
    joukowski_phi,
    separation_check,
    tmodel_eval,
    trivial_basis_matrix,
    trivial_eval,
    z_normalization_check,
)

__version__ = "0.1.0"
