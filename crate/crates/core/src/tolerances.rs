//! Central numeric tolerances.
//!
//! Everything here assumes inputs at unit scale (distances of order one).
//! Callers working at wildly different scales should rescale first; all
//! quantities we check (Ptolemy slack, triangle margins, cross ratios) are
//! either scale-invariant or homogeneous of low degree, so this is cheap.

/// Default tolerance for inequality checks (triangle, Ptolemy, Frink bound).
///
/// Slack down to `-VIOLATION_TOL` is still counted as a pass: products of
/// unit-scale distances accumulate a few ulps of rounding and we do not want
/// exact equality cases to flap.
pub const VIOLATION_TOL: f64 = 1e-9;

/// Threshold below which `|slack|` is recorded as an equality case.
///
/// Deliberately looser than [`VIOLATION_TOL`] composed with rounding noise:
/// equality detection feeds geometric conclusions (for instance "the four
/// points span an ideal quadrilateral") where configurations are constructed
/// to float accuracy, not assumed exact.
pub const EQUALITY_TOL: f64 = 1e-7;

/// Tolerance for identities that hold in exact arithmetic and are evaluated
/// in a handful of floating-point operations (basepoint-change defects,
/// model conversions, analytic cross-checks).
pub const EXACT_TOL: f64 = 1e-12;

/// Relative tolerance used when comparing cross ratios between two metrics.
pub const MOBIUS_TOL: f64 = 1e-9;
