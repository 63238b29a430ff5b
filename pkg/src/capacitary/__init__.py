"""Hausdorff contents, Choquet integrals, capacitary maximal functions and
Muckenhoupt weight constants on dyadic grids of [0, 1)^n."""

__version__ = "0.1.0"

from .audit import AuditRecord, InequalityAudit
from .choquet import (
    NormParams,
    choquet_integral,
    choquet_over_set,
    duality_audit,
    duality_extremal,
    holder_audit,
    layer_cake,
    lp_norm,
)
from .content import (
    CoverWitness,
    cubic_content_1d,
    dyadic_content,
    dyadic_content_witness,
    exhaustive_dyadic_oracle,
    weighted_capacity,
    weighted_dyadic_content,
)
from .extrapolation import (
    SweepRow,
    audit_part_a,
    audit_part_b,
    build_rdf_weight,
    operator_norm_sweep,
)
from .grid import (
    ContentParams,
    DyadicCube,
    DyadicSet,
    GridFunction,
    GridSpec,
    Weight,
    ancestors,
    children,
    parse_grid_function,
    random_function,
    random_set,
    serialize_grid_function,
)
from .maximal import (
    OperatorPlugin,
    all_cube_integrals,
    dyadic_maximal,
    kolmogorov_audit,
    make_operator,
    weak11_constant,
)
from .weights import (
    ApReport,
    a1_constant,
    ap_constant,
    construct_a1,
    dual_weight,
    jones_compose,
    power_improvement_search,
    self_improvement_search,
)
