"""Spatial bandwidth, DOF proxies and multiplexing regions for
line-of-sight links between a large linear source array and a linear
receiving array in 3D."""

from .geometry import (
    ArrayConfig,
    GroundScenario,
    Orientation,
    Placement,
    Validity,
    EX,
    EY,
    EZ,
    lcs_from_gcs,
    placement_from_ground,
    projection_direction,
    rotation_gcs_to_lcs,
    source_point,
    receive_point,
    spatial_frequency,
    validity_check,
)
from .bandwidth import (
    BandwidthSample,
    QuadratureError,
    k_number,
    k_number_const,
    local_bandwidth_exact,
    local_bandwidth_general,
    local_bandwidth_x,
    local_bandwidth_z,
)
from .asymptotics import (
    AsymptoteSegment,
    DegenerateOrientationError,
    PiecewiseBandwidthModel,
    build_model_general,
    build_model_x,
    build_model_z,
    critical_angle_x,
    critical_angle_z1,
    critical_angle_z2,
    critical_distance_general,
    critical_distances,
    eta,
    eval_model,
    intersect,
    orientation_strategy_threshold,
    sbe_x2,
    sbe_z2,
)
from .multiplexing import (
    EmpiricalCdf,
    OrientationDistribution,
    RegionBoundary,
    RegionSpec,
    cdf_simulation,
    k_approx,
    k_exp_2d,
    k_exp_3d,
    k_max_2d,
    k_max_3d,
    ks_distance,
    optimal_orientation_search,
    region_boundary,
    region_membership,
    sample_orientation,
    sample_orientations,
)
from .kernels import backend

__version__ = "0.1.0"
