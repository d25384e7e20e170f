"""Polytope-level machinery for the L^p Brunn-Minkowski inequality.

Centrally symmetric polytopes are stored as support vectors over a fixed
list of unit normals. The package enumerates their geometry (vertices,
facet and ridge measures, dihedral angles), forms L^p and log-Minkowski
combinations, computes mixed volumes through the strongly-isomorphic
formulas, evaluates the local inequality and its quadratic form, scans
interpolation paths for a-type changes, and runs batch verification
campaigns. See the command line entry point ``lpbm`` for the file-based
workflow.
"""

from .bodies import (
    SupportVector,
    box,
    dumps_canonical,
    from_json_dict,
    from_pairs,
    read_polytope,
    regular_polygon,
    require_same_normals,
    same_normal_list,
    to_json_dict,
    write_json_atomic,
    write_polytope,
)
from .combine import (
    LambdaPath,
    check_lambda,
    check_p,
    lp_combine,
    path_coeffs,
    path_from_bodies,
    wulff_shape,
)
from .errors import (
    BadParameter,
    DegenerateVertex,
    EigenFailure,
    EmptyFacet,
    FileFormatError,
    GenerationFailed,
    InvalidSupportVector,
    LpbmError,
    NearParallelFacets,
    NeighborhoodNotFound,
    NormalSetMismatch,
    NotSymmetric,
    TooManyEvents,
    Unbounded,
)
from .generate import (
    Campaign,
    campaign_from_dict,
    independent_merge_pair,
    merge_pair,
    random_symmetric_body,
    run_campaign,
    worker_count,
)
from .geometry import (
    ATypeSignature,
    PolytopeGeometry,
    atype_signature,
    enumerate_geometry,
    hausdorff_distance_upper,
    invariant_residuals,
    perturb_within_atype,
    strongly_isomorphic,
    volume,
)
from .localform import (
    LocalVerdict,
    PsiForm,
    bonnesen_2d,
    check_nsd,
    evaluate_pair,
    local_2d_via_bonnesen,
    local_lhs,
    psi_form,
    relative_radii,
)
from .mixed import (
    GammaMatrix,
    gamma_matrix,
    gamma_submatrix,
    mixed_volume_1,
    mixed_volume_2,
    mixed_volume_oracle,
    surface_measure,
    weighted_integral,
)
from .scan import (
    ScanReport,
    first_derivative,
    scan,
    second_derivative,
    v_second,
    write_scan_csv,
)

__version__ = "0.1.0"

__all__ = [
    "ATypeSignature",
    "BadParameter",
    "Campaign",
    "DegenerateVertex",
    "EigenFailure",
    "EmptyFacet",
    "FileFormatError",
    "GammaMatrix",
    "GenerationFailed",
    "InvalidSupportVector",
    "LambdaPath",
    "LocalVerdict",
    "LpbmError",
    "NearParallelFacets",
    "NeighborhoodNotFound",
    "NormalSetMismatch",
    "NotSymmetric",
    "PolytopeGeometry",
    "PsiForm",
    "ScanReport",
    "SupportVector",
    "TooManyEvents",
    "Unbounded",
    "atype_signature",
    "bonnesen_2d",
    "box",
    "campaign_from_dict",
    "check_lambda",
    "check_nsd",
    "check_p",
    "dumps_canonical",
    "enumerate_geometry",
    "evaluate_pair",
    "first_derivative",
    "from_json_dict",
    "from_pairs",
    "gamma_matrix",
    "gamma_submatrix",
    "hausdorff_distance_upper",
    "independent_merge_pair",
    "invariant_residuals",
    "local_2d_via_bonnesen",
    "local_lhs",
    "lp_combine",
    "merge_pair",
    "mixed_volume_1",
    "mixed_volume_2",
    "mixed_volume_oracle",
    "path_coeffs",
    "path_from_bodies",
    "perturb_within_atype",
    "psi_form",
    "random_symmetric_body",
    "read_polytope",
    "regular_polygon",
    "relative_radii",
    "require_same_normals",
    "run_campaign",
    "same_normal_list",
    "scan",
    "second_derivative",
    "strongly_isomorphic",
    "surface_measure",
    "to_json_dict",
    "v_second",
    "volume",
    "weighted_integral",
    "write_json_atomic",
    "write_polytope",
    "write_scan_csv",
    "wulff_shape",
]
