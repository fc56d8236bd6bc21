"""tamevol: volumes of definable sets inside balls and their growth in the radius."""

from .cells import (
    Band,
    ChartCell,
    DefinableSet,
    Graph,
    LinearImage,
    POINT0,
    Point0,
    cell_dim,
    chart,
    membership_test,
    point_cell,
    rotated,
    scaled,
    set_dim,
    verify_disjoint,
)
from .errors import InputError, NumericalError, TamevolError
from .expr import Expression, parse_expr
from .grassmann import (
    EmbeddedPlane,
    Plane,
    PlaneNeighborhood,
    cover_grassmannian,
    gauss_map,
    graph_matrix,
    in_neighborhood,
    plane_distance,
    pluecker_embed,
    project,
    tau_max,
)
from .growth import (
    GrowthCurve,
    GrowthVerdict,
    StollVerdict,
    certify_tangents,
    check_growth_bound,
    fit_exponent,
    gauss_cover_decompose,
    gauss_cover_decompose_set,
    growth_curve,
    stoll_classify,
    verify_projection_bound,
)
from .hausdorff import (
    BallRestriction,
    MeasureEstimate,
    QuadratureConfig,
    cell_volume_in_ball,
    covering_measure,
    set_volume_in_ball,
    vol_normalization,
)
from .setfile import dump_set, load_set, set_from_dict, set_to_dict

__version__ = "0.1.0"
