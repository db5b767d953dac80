"""Upper bounds on quantum evolution complexity via lattice optimization."""

__version__ = "0.1.0"

from .engine import (
    ComplexityMetric,
    ComplexityPipeline,
    ComplexityTrace,
    NonlocalityMatrix,
    PlateauStats,
    bi_invariant_complexity,
    bi_invariant_trace,
    complexity_bound_at,
    complexity_ceiling,
    embed_cvp,
    local_conservation_laws,
    nonlocality_matrix,
    plateau_stats,
    sweep,
)
from .lattice import (
    CvpInstance,
    GramSchmidtData,
    LatticeBasis,
    babai_nearest_plane,
    brute_force_cvp,
    covering_radius_bound,
    gram_schmidt,
    greedy_descent,
    lll_reduce,
    method_ladder,
    naive_round,
    plateau_estimate,
)
from .linalg import (
    HermitianMatrix,
    Spectrum,
    eigendecompose,
    load_matrix,
    normalize_energies,
    normalize_spectrum,
    save_matrix,
)
from .spectral import UnfoldedSpacings, ks_distance, poisson_density, unfold, wigner_surmise

__all__ = [name for name in dir() if not name.startswith("_")]
