"""Convex roofs of polynomial entanglement measures on rank-2 multiqubit states."""
__version__ = "0.1.0"

from .errors import DegenerateError, PolyroofError, RangeError, RankError, RayError, StructureError
from .quantum import (
    DensityMatrix,
    PureState,
    Rank2Spectral,
    SloccOperator,
    apply_slocc,
    apply_slocc_density,
    ghz,
    partial_trace,
    partial_trace_pure,
    spectral_decompose_rank2,
    w_state,
)
from .measures import CONCURRENCE, SQRT_TANGLE, TANGLE, PolynomialMeasure, eval_measure, get_measure, register_measure
from .geometry import GeometrySummary, RootProfile, Structure, find_roots, root_profile, profile_of_density
from .roof import (
    Method,
    RoofResult,
    iso_curve_sample,
    roof_one_root,
    roof_orthogonal_roots,
    roof_separable_ray,
    roof_two_root,
)
from .ghzw import X_O, convexity_breakpoint, ghzw_flat_f, ghzw_tangle_on_axis, hull_tangent_point
from .oracle import DecompositionEnsemble, brute_force_roof, ensemble_from_isometry, wootters_concurrence
from .dispatch import roof_dispatch
from .atlas import FamilySpec, TABLE_I, classify_marginal, generating_state, reproduce_table, slocc_scaling_check
