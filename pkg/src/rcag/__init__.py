"""Randomness tests for circular data built on random circular arc graphs."""

from .calibration import (
    MissingThresholdError,
    ThresholdEntry,
    ThresholdTable,
    calibrate_threshold,
    default_table,
    paper_reference_table,
    percentile,
    threshold_store_load,
    threshold_store_save,
)
from .circular import (
    TWO_PI,
    InvalidInputError,
    RngSeed,
    normalize_angle,
    sample_circular_uniform,
    sample_von_mises,
    sample_wrapped_cauchy,
)
from .degree import empirical_degree_pmf, hellinger_distance, hellinger_statistic
from .graph import Arc, Rcag, arc_contains, arcs_intersect, build_rcag, graph_stats, make_arc
from .procgen import ProcessSpec, gen_car, gen_larma, generate, link, link_inverse, parse_process_spec
from .randomness import (
    TestOutcome,
    bh_adjust,
    dd_test,
    ep_exact_spec,
    ep_statistic,
    ep_test,
    ep_test_large,
    random_disjoint_pairing,
)
from .theory import (
    arc_length_cdf_uniform,
    fixed_arc_non_intersection_prob,
    ordering_oracle,
    theoretical_degree_cdf,
    theoretical_degree_pmf,
)

__version__ = "0.1.0"
