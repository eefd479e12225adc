"""Discrete WKB and transfer-matrix solvers for slowly varying three-term recurrences."""
from ._backend import BACKEND
from .closed_form import (
    ClosedFormVariant,
    WkbClosedForm,
    delta_p_estimate,
    delta_p_sum,
    wkb_expsum_direct,
    wkb_expsum_riccati,
    wkb_product,
)
from .dlw import (
    ModelConstants,
    PhaseProfile,
    WaveguideGeometry,
    coeffs_from_geometry,
    coeffs_from_phase,
    coupling_coeffs,
    geometry_from_phase,
    linear_ramp_profile,
    model_constants,
    p_polynomials,
    u_bar,
)
from .errors import *  # noqa: F401,F403
from .recurrence import (
    CoefficientSequence,
    RootPairSequence,
    ScatterBoundary,
    ScatterSolution,
    SolutionProfile,
    assign_branches,
    characteristic_roots,
    direct_scatter_solve,
    flux_series,
    iterate_recurrence,
    recurrence_residual,
)
from .scattering import (
    CumulativeScatter,
    cascade,
    cell_smatrices,
    cell_smatrix,
    cumulative_scatter,
    direct_transfer_solve,
    extract_RT,
    reconstruct_profile,
    scatter,
    smatrix_from_solutions,
)
from .wavesplit import (
    GaugeSequences,
    SplitProfile,
    SplitState,
    TransferSequence,
    Variant,
    build_transfer_general,
    propagate,
    riccati_approx_roots,
    riccati_quadratic_residual,
    riccati_residual,
    split_from_solution,
    transfer_exact,
    transfer_wkb_direct,
    transfer_wkb_riccati,
)

__version__ = "0.1.0"
