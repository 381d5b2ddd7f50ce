"""Weighted Fermat-Torricelli solvers: forward, inverse, and weight plasticity.

The package covers interior-point location for 3 to 5 weighted vertices in
the plane or in space, weight recovery from ray geometry (classical and
mixed, with a residual mass term), one-parameter weight families that keep
the minimizer pinned ("plasticity"), the matching angle algebra, and a
brute-force grid oracle used for cross-checking.
"""

from .angles import (
    AngleSystem5,
    AngleSystem7,
    RaySystem,
    cos_alpha_candidates,
    cos_alpha_extended,
    polar_offsets,
    projected_angle_from_angles,
    reconstruct_rays,
    resolve_root,
)
from .errors import (
    AtVertex,
    BudgetInconsistent,
    DegenerateEdge,
    DegeneratePlane,
    DegenerateProjection,
    DegenerateSegment,
    DocumentError,
    EmptyFeasibleInterval,
    EvaluationFailed,
    FloatingViolated,
    InfeasibleSplit,
    InvalidConfiguration,
    InvalidMassBudget,
    MaxIterationsExceeded,
    NoMatchingRoot,
    NonpositiveWeight,
    NotCoplanar,
    NotInterior,
    NumericalError,
    PointOnEdge,
    RootOutOfRange,
    SignDegenerate,
    Unrealizable,
    ValidationError,
    WFermatError,
)
from .forward import (
    Absorbed,
    BoundaryConfiguration,
    Floating,
    FTSolution,
    classify,
    kkt_residual,
    objective,
    solve,
)
from .geometry import (
    angle_at,
    dihedral_angles,
    height_to_plane,
    height_to_segment,
    PlaneFrame,
    plane_side_sign,
    projected_angle,
    unit_vector,
)
from .inverse import (
    FlowDecomposition,
    MixedWeightSet,
    check_absorbed_family,
    flow_decompose,
    inverse_tetrahedron,
    mixed_inverse_tetrahedron,
    mixed_inverse_triangle,
    partial_distance_derivatives,
    residual_for_unique_inverse_tetra,
    residual_for_unique_inverse_triangle,
)
from .oracle import OracleResult, brute_force_min, finite_diff
from .plasticity import (
    PlasticityState,
    SignConfiguration,
    feasible_b4_interval,
    feasible_b5_interval,
    geometric_plasticity_transport,
    hexahedron_plasticity,
    quadrilateral_plasticity,
)

__version__ = "0.1.0"

__all__ = [
    "AngleSystem5",
    "AngleSystem7",
    "RaySystem",
    "cos_alpha_candidates",
    "cos_alpha_extended",
    "polar_offsets",
    "projected_angle_from_angles",
    "reconstruct_rays",
    "resolve_root",
    "AtVertex",
    "BudgetInconsistent",
    "DegenerateEdge",
    "DegeneratePlane",
    "DegenerateProjection",
    "DegenerateSegment",
    "DocumentError",
    "EmptyFeasibleInterval",
    "EvaluationFailed",
    "FloatingViolated",
    "InfeasibleSplit",
    "InvalidConfiguration",
    "InvalidMassBudget",
    "MaxIterationsExceeded",
    "NoMatchingRoot",
    "NonpositiveWeight",
    "NotCoplanar",
    "NotInterior",
    "NumericalError",
    "PointOnEdge",
    "RootOutOfRange",
    "SignDegenerate",
    "Unrealizable",
    "ValidationError",
    "WFermatError",
    "Absorbed",
    "BoundaryConfiguration",
    "Floating",
    "FTSolution",
    "classify",
    "kkt_residual",
    "objective",
    "solve",
    "angle_at",
    "dihedral_angles",
    "height_to_plane",
    "height_to_segment",
    "PlaneFrame",
    "plane_side_sign",
    "projected_angle",
    "unit_vector",
    "FlowDecomposition",
    "MixedWeightSet",
    "check_absorbed_family",
    "flow_decompose",
    "inverse_tetrahedron",
    "mixed_inverse_tetrahedron",
    "mixed_inverse_triangle",
    "partial_distance_derivatives",
    "residual_for_unique_inverse_tetra",
    "residual_for_unique_inverse_triangle",
    "OracleResult",
    "brute_force_min",
    "finite_diff",
    "PlasticityState",
    "SignConfiguration",
    "feasible_b4_interval",
    "feasible_b5_interval",
    "geometric_plasticity_transport",
    "hexahedron_plasticity",
    "quadrilateral_plasticity",
    "__version__",
]
