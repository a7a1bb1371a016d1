//! Finite metric geometry around the Ptolemy inequality.
//!
//! The crate works with explicit finite distance matrices and asks, and
//! answers, concrete questions about them: do the metric axioms hold, how
//! far is a quasi-metric from a metric, does the Ptolemy inequality hold
//! and where is it tight, how hyperbolic is the space, and how do boundary
//! metrics of the classical hyperbolic models look from inside. A second
//! group of modules runs constructive experiments: snowflake embeddings of
//! intervals and balls into Euclidean spheres, and Hamming-cube slices
//! whose diagonals certify that those embeddings cannot be improved.

pub mod cube;
pub mod embed;
pub mod error;
pub mod hyperbolicity;
pub mod matrix;
pub mod metrization;
pub mod models;
pub mod ptolemy;
pub mod spaces;
pub mod tolerances;

pub use cube::{
    euclidean_snowflake_target, find_short_diagonal, hamming_distance, n_schedule, phi,
    scaling_map, slice_elements, snowflake_obstruction_experiment, BitIndex, DiagonalWitness,
    MultiIndex, ObstructionRow, SearchStrategy,
};
pub use embed::{
    ball_snowflake, ball_snowflake_sq_dist, composite_embedding, cross_ratio_points,
    embedding_experiment, invert_about, line_snowflake, line_snowflake_sq_dist, mobius_defect,
    sample_l1_ball, stereographic_to_plane, stereographic_to_sphere, EmbeddingExperiment,
    ExtendedPoint,
};
pub use error::{Error, Result};
pub use hyperbolicity::{
    basepoint_change_max_defect, boundary_quasimetric, delta_at_basepoint, delta_global,
    gromov_product, triple_deficiency, BoundaryQuasiMetric, DeltaGlobalReport, GromovReport,
};
pub use matrix::{
    check_metric_axioms, quasi_metric_constant, DistanceMatrix, MetricAxiomsReport,
    QuasiMetricSpace,
};
pub use metrization::{
    chain_metric, default_s_grid, distortion_curve, estimate_critical_exponent,
    frink_bound_check, power_quasi_metric, ChainMetricResult, CriticalExponentEstimate,
    DistortionCurve, FrinkReport,
};
pub use models::{
    admissible_parameter_scan, ball_to_hyperboloid, bourdon_distance, bourdon_limit,
    bourdon_metric, circle_ideal_config, glued_quadrilateral, half_angle_comparison_slack,
    hamenstadt_metric, hyp_distance, hyperboloid_to_ball, ideal_triangle_height,
    mobius_translate, mobius_untranslate, orthogonal_frame_config, random_ideal_config,
    random_unit_vector, six_point_frame_metric, truncated_visual, BourdonLimitReport,
    BourdonMetric, IdealConfig, Model, ScanRow,
};
pub use ptolemy::{
    canonical_four_point, cross_ratio, involute, mobius_equivalent, ptolemy_check,
    ptolemy_check_with, snowflake, CanonicalFourPoint, MobiusReport, PtolemyOptions, PtolemyReport,
};
