"""Wedge-domain regulators, Pick-function oracles, Julia-inequality checks,
and certified power-series continuation."""

__version__ = "0.1.0"

from .geometry import (  # noqa: F401
    BoxUnionDomain,
    Wedge,
    directional_reach,
    inscribe_wedge,
    wedge_contains,
)
from .chebyshev import (  # noqa: F401
    NodeSet,
    chebyshev_nodes,
    gautschi_bound,
    growth_index,
    interpolation_growth_bound,
    vandermonde_inverse_inf_norm,
)
from .regulators import (  # noqa: F401
    Parallelogram,
    RegionSample,
    WedgeRegulator,
    asymptotic_root,
    parallelogram_region,
    regulated_set_iterate,
    wedge_regulator_bound_2d,
    wedge_regulator_bound_nd,
)
from .pick_oracles import (  # noqa: F401
    DiscreteMeasure,
    PickOracle,
    TaylorTable,
    TypeIRep,
    directional_derivatives,
    eval_measure_transform,
    eval_type1,
    moment_coefficients,
    named_oracle,
    taylor_table,
)
from .julia import (  # noqa: F401
    JuliaReport,
    check_julia_line,
    check_julia_point,
    check_julia_set,
    liouville_check,
)
from .continuation import (  # noqa: F401
    ContinuationResult,
    continue_eval,
    continue_path,
    series_region_scan,
)
