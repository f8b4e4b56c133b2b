"""equitrans: extremal node configurations for sums of translates.

Computes the common minimax / maximin / equioscillation point of
F(y, t) = J(t) + sum_j r_j K(t - y_j) on the axis, semiaxis, or a segment,
with certified truncation of the unbounded search, a brute-force grid
oracle for verification, and a weighted extremal-polynomial frontend.
"""

from .model import (
    NEG_INF,
    AdmissibilityError,
    AdmissibilityReport,
    EvalOptions,
    Field,
    Kernel,
    Multiplicities,
    NodeConfig,
    Problem,
    ProblemDomain,
    axis_domain,
    check_admissibility,
    make_constant_field,
    make_freud_field,
    make_gaussian_field,
    make_inverse_power_kernel,
    make_linear_decay_field,
    make_log_kernel,
    make_segment_field,
    make_table_field,
    make_table_kernel,
    segment_domain,
    semiaxis_domain,
    validate_field,
    validate_kernel,
)
from .evaluation import (
    MaximaVector,
    golden_section_max,
    grid_refine_max,
    interval_maximum,
    maxima_vector,
    oscillation_spread,
    sum_of_translates,
    sup_over_interval,
    translate_sum_function,
    weighted_node_average,
)
from .truncation import (
    TruncationCertificate,
    VerifyQReport,
    box_M_L,
    box_for_nodes,
    clamp_to_box,
    ensure_certificate,
    maximin_box_L,
    mrs_q,
    select_anchors,
    verify_q,
)
from .solver import (
    AffineMap,
    SolveOptions,
    SolveReport,
    reduce_to_unit,
    solve_equioscillation,
    solve_multistart,
    solve_semiaxis,
)
from .oracle import (
    GridSpec,
    IntertwiningReport,
    estimate_overline_lipschitz,
    grid_maximin,
    grid_minimax,
    intertwining_test,
)

__version__ = "0.1.0"
