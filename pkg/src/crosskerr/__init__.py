"""Cross-Kerr nonlinear coherent states and their interaction with a Lambda atom."""

from .algebra import (
    Convention,
    deformation_value,
    deformed_binomial,
    deformed_factorial,
    ladder_apply,
    spectrum_check,
    su2_generators,
)
from .dynamics import (
    AtomFieldState,
    CouplingConfig,
    atomic_occupations,
    evolve,
    evolve_grid,
    joint_distribution_at,
    marginals_at,
    revival_period,
    sector_amplitudes,
    time_statistics,
)
from .entropy import atomic_density_matrix, cubic_eigenvalues, entropy_trace, von_neumann_entropy
from .errors import IntegrityError, QuadratureError
from .quadratures import QuadratureReport, quadrature_report
from .states import (
    CKNCSParams,
    TwoModeAmplitudes,
    build_ckncs,
    identity_resolution_check,
    joint_distribution,
    marginal_distribution,
)
from .statistics import cross_correlation, mandel_parameter, mean_occupations

__version__ = "0.1.0"
