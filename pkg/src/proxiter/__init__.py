"""Solver and verification toolkit for paired contraction iteration.

The package runs paired iterated sequences on two-region set pairs with an
auxiliary external set, certifies the driving contraction inequality on
samples, detects best-proximity limits and weakly fixed points, validates
the supporting convergence bounds on traces, and falsifies the underlying
convergence properties with budgeted counterexample searches.
"""

__version__ = "0.1.0"

from .errors import (
    DomainViolationError,
    EstimationFailureError,
    InvalidInputError,
    NotAnInfimumSequenceError,
    NotCertifiedError,
    NumericFailureError,
    ProxiterError,
    RefutedError,
)
from .spaces import (
    GEOMETRY_TOL,
    MetricSpace,
    Point,
    Region,
    SetPair,
    as_point,
    circle_region,
    compose_spaces,
    distance,
    format_point,
    interval,
    metric_axiom_violations,
    parse_point,
    product_region,
    product_space,
    real_line,
    sample_region,
    segment_region,
    set_distance,
    singleton_region,
    vector_space,
)
from .systems import (
    RESIDUAL_TOL,
    Atom,
    CElement,
    CPair,
    CUniverse,
    CertificationReport,
    ExternalFactor,
    ExternalFactorSystem,
    Quadruple,
    RelationP,
    SystemConstants,
    check_p_invariance,
    contraction_residual,
    estimate_min_lambda,
    factor_infimum,
    format_celement,
    resolve_constants,
    s_value,
    verify_contraction,
)
from .iteration import (
    CONFIRM_WINDOW,
    ConvergenceReport,
    InfimumSequence,
    IterationTrace,
    PairedTrace,
    Violation,
    detect_limit,
    iterate,
    limit_uniqueness_check,
    make_infimum_sequence,
    proximity_residual,
    run_paired,
    uniqueness_scan,
    weak_fixed_residuals,
    write_trace_csv,
)
from .validators import (
    BOUND_SLACK,
    BoundCertificate,
    CDCounterexample,
    TailSupTable,
    UCCounterexample,
    cd_falsify,
    check_l1_bound,
    check_l2_bound,
    split_limit_validate,
    tail_sup,
    tail_sup_table,
    uc_falsify,
)
from .instances import (
    ALIASES,
    CYCLIC,
    PAIRS,
    SYSTEMS,
    BestProximityResult,
    CyclicInstance,
    CyclicTriple,
    PairInstance,
    SystemInstance,
    affine_cyclic_example,
    alpha_parity,
    banach_affine_system,
    banach_half_system,
    banach_system,
    certify_cyclic,
    circle_origin_pair,
    cyclic3_reduce,
    cyclic3_solve,
    cyclic_residual,
    estimate_lipschitz,
    example1_T,
    example1_Tb,
    example1_fa,
    example1_fb,
    example1_pair,
    example1_product_system,
    example1_system,
    floor_log2,
    list_instances,
    load_instance_json,
    open_interval_pair,
    pair_cd_generator,
    pair_uc_generator,
    pow2_floor,
    product_system,
    rotate_cyclic,
    singleton_cyclic_example,
)
