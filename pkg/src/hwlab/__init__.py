"""Numerics for the Hardy operator H, the Volterra operator V = Mx H and Z = H - Mx."""

__version__ = "0.1.0"

from .errors import *  # noqa: F401,F403
from .quadrature import (
    CompositeGraded,
    GaussLegendre,
    GeometricGraded,
    GridFunction,
    PiecewiseGauss,
    QuadratureGrid,
    TanhSinh,
    inner_product,
    l2_norm,
    make_grid,
    norm_trajectory,
)
from .forms import (
    ExpChain,
    Indicator,
    Monomial,
    Order1Stick,
    PowerEigen,
    Spike,
    Upsilon,
    ZeroEigen,
    evaluate,
)
from .words import OperatorWord, parse_word
from .operators import OperatorId, apply, assemble, assemble_word, residual
from .eigen import (
    admissible,
    chain_numeric,
    chain_stick_order1,
    chain_zero,
    chain_zero_family,
    classify,
    derivative_functional,
    eigen_residual,
    eigenfunction,
    growth_bound_check,
    threshold,
)
from .hardy import U_integral, U_monomial, composition_matrix, hat_identity_residual, szego_vector
from .calkin import (
    Lollipop,
    SymbolPair,
    essential_spectrum,
    fredholm_index,
    mixed_defect,
    product_defect,
    spike_rows,
    symbol_of,
    upsilon_rows,
)
from .alglat import (
    KernelFunction,
    RankOnePair,
    block_diagonal_norm,
    dyadic_approximation,
    is_triangular,
    rank_one_defect,
    volterra_kernel,
)
from .scan import ScanGrid, lollipop_distance_profile, pseudospectrum, sigma_min, truncation_eigenvalues
