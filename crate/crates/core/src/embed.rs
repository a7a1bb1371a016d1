//! Square-root snowflake embeddings of the ℓ¹ unit ball into Euclidean
//! spheres.
//!
//! The pipeline has three stages. A cell-profile map `h: [−1,1] → ℝ^N`
//! realizes `‖h(t)−h(s)‖² = |t−s|` exactly on an `N`-cell grid and within a
//! factor of 2 off it. Applying `h` coordinatewise embeds the ℓ¹ ball with
//! squared Euclidean distance comparable to the ℓ¹ distance — a ½-snowflake
//! `g`. Finally inverse stereographic projection `π`, a Möbius map, carries
//! the bounded image onto a unit sphere, where the chordal metric is
//! Ptolemaic because it is Euclidean. The module also ships the measurement
//! tools: snowflake-constant and log-log exponent fits, stereographic
//! round trips, inversion agreement, and cross-ratio defect of a sampled
//! map.

use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::matrix::DistanceMatrix;
use crate::ptolemy::{ptolemy_check, PtolemyReport};
use crate::tolerances;

// ---- the interval snowflake ---------------------------------------------------

/// Cell width of the `n_cells`-cell grid over `[−1, 1]`.
pub fn cell_width(n_cells: usize) -> f64 {
    2.0 / n_cells as f64
}

/// Coordinate `k` ramps linearly from 0 to `√w` across the `k`-th grid cell
/// and is constant outside it, so squared distances accumulate cell widths:
/// `‖h(t)−h(s)‖² = |t−s|` whenever `t, s` sit on the grid, and stays within
/// `[½|t−s|, |t−s|]` once `|t−s|` spans at least one cell.
pub fn line_snowflake(t: f64, n_cells: usize) -> Vec<f64> {
    assert!(n_cells >= 2, "the grid needs at least two cells");
    let w = cell_width(n_cells);
    let sqrt_w = w.sqrt();
    (0..n_cells)
        .map(|k| {
            let left = -1.0 + k as f64 * w;
            sqrt_w * ((t - left) / w).clamp(0.0, 1.0)
        })
        .collect()
}

/// `‖h(t)−h(s)‖²` evaluated directly, visiting only the cells that overlap
/// `[min(t,s), max(t,s)]` — O(span) instead of O(n_cells), which is what
/// makes slice-sized target matrices affordable.
pub fn line_snowflake_sq_dist(t: f64, s: f64, n_cells: usize) -> f64 {
    assert!(n_cells >= 2, "the grid needs at least two cells");
    if t == s {
        return 0.0;
    }
    let (lo, hi) = if t < s { (t, s) } else { (s, t) };
    let w = cell_width(n_cells);
    let first = (((lo + 1.0) / w).floor() as isize).clamp(0, n_cells as isize - 1) as usize;
    let last = (((hi + 1.0) / w).floor() as isize).clamp(0, n_cells as isize - 1) as usize;
    let mut total = 0.0;
    for k in first..=last {
        let left = -1.0 + k as f64 * w;
        let delta = ((hi - left) / w).clamp(0.0, 1.0) - ((lo - left) / w).clamp(0.0, 1.0);
        total += w * delta * delta;
    }
    total
}

// ---- the ball snowflake ---------------------------------------------------------

/// Coordinatewise interval snowflake: concatenates `h(z₁), …, h(z_d)`.
pub fn ball_snowflake(z: &[f64], n_cells: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(z.len() * n_cells);
    for &zi in z {
        out.extend(line_snowflake(zi, n_cells));
    }
    out
}

/// Squared distance between ball-snowflake images. Axis totals are summed
/// in sorted order, so the result depends only on the multiset of
/// coordinatewise differences — permuting the axes of both points gives a
/// bitwise identical value.
pub fn ball_snowflake_sq_dist(a: &[f64], b: &[f64], n_cells: usize) -> f64 {
    assert_eq!(a.len(), b.len(), "dimension mismatch");
    let mut per_axis: Vec<f64> = a
        .iter()
        .zip(b)
        .filter(|(x, y)| x != y)
        .map(|(&x, &y)| line_snowflake_sq_dist(x, y, n_cells))
        .collect();
    per_axis.sort_by(|x, y| x.partial_cmp(y).expect("axis totals are finite"));
    per_axis.iter().sum()
}

// ---- stereographic projection and inversion --------------------------------------

/// Point of ℝⁿ extended by the single point at infinity that stereographic
/// projection sends the north pole to.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum ExtendedPoint {
    Finite(Vec<f64>),
    Infinity,
}

impl ExtendedPoint {
    pub fn finite(coords: &[f64]) -> Self {
        ExtendedPoint::Finite(coords.to_vec())
    }
}

fn norm_sq(a: &[f64]) -> f64 {
    a.iter().map(|x| x * x).sum()
}

fn check_sphere_point(x: &[f64]) -> Result<()> {
    if x.len() < 2 || !x.iter().all(|v| v.is_finite()) {
        return Err(Error::ModelDomain("sphere points need at least two finite coordinates".into()));
    }
    let norm = norm_sq(x).sqrt();
    if (norm - 1.0).abs() > 1e-12 {
        return Err(Error::ModelDomain(format!("sphere points must have norm 1, got {norm}")));
    }
    Ok(())
}

/// Stereographic projection from the north pole `e₀ = (1, 0, …, 0)`:
/// `x ↦ (x₁, …, x_n)/(1 − x₀)`, with the pole itself going to infinity.
pub fn stereographic_to_plane(x: &[f64]) -> Result<ExtendedPoint> {
    check_sphere_point(x)?;
    let denom = 1.0 - x[0];
    if denom == 0.0 {
        return Ok(ExtendedPoint::Infinity);
    }
    Ok(ExtendedPoint::Finite(x[1..].iter().map(|v| v / denom).collect()))
}

/// Inverse stereographic projection onto the unit sphere of ℝ^{1+n}:
/// `y ↦ ((|y|²−1)/(|y|²+1), 2y/(|y|²+1))`; infinity goes to the pole.
pub fn stereographic_to_sphere(y: &ExtendedPoint, dim: usize) -> Result<Vec<f64>> {
    match y {
        ExtendedPoint::Infinity => {
            let mut pole = vec![0.0; dim + 1];
            pole[0] = 1.0;
            Ok(pole)
        }
        ExtendedPoint::Finite(y) => {
            if y.len() != dim || !y.iter().all(|v| v.is_finite()) {
                return Err(Error::ModelDomain(format!(
                    "expected a finite point of dimension {dim}"
                )));
            }
            let s = norm_sq(y);
            let denom = s + 1.0;
            let mut out = Vec::with_capacity(dim + 1);
            out.push((s - 1.0) / denom);
            out.extend(y.iter().map(|v| 2.0 * v / denom));
            Ok(out)
        }
    }
}

/// Inversion in the sphere of radius `r` about `center`:
/// `x ↦ center + r²(x − center)/‖x − center‖²`, swapping `center` and
/// infinity. Restricted to the unit sphere with `center = e₀`, `r = √2`
/// this is exactly stereographic projection into the hyperplane `x₀ = 0`.
pub fn invert_about(center: &[f64], r: f64, x: &ExtendedPoint) -> Result<ExtendedPoint> {
    if !(r > 0.0) || !r.is_finite() {
        return Err(Error::InvalidParameter(format!("inversion radius must be positive, got {r}")));
    }
    match x {
        ExtendedPoint::Infinity => Ok(ExtendedPoint::Finite(center.to_vec())),
        ExtendedPoint::Finite(x) => {
            if x.len() != center.len() {
                return Err(Error::ModelDomain("dimension mismatch".into()));
            }
            let diff: Vec<f64> = x.iter().zip(center).map(|(a, b)| a - b).collect();
            let d2 = norm_sq(&diff);
            if d2 == 0.0 {
                return Ok(ExtendedPoint::Infinity);
            }
            let scale = r * r / d2;
            Ok(ExtendedPoint::Finite(
                center.iter().zip(&diff).map(|(c, d)| c + scale * d).collect(),
            ))
        }
    }
}

fn extended_distance(a: &ExtendedPoint, b: &ExtendedPoint) -> Option<f64> {
    match (a, b) {
        (ExtendedPoint::Finite(a), ExtendedPoint::Finite(b)) => {
            if a.len() != b.len() {
                return None;
            }
            Some(norm_sq(&a.iter().zip(b).map(|(x, y)| x - y).collect::<Vec<f64>>()).sqrt())
        }
        _ => None, // an infinite factor; handled by cancellation
    }
}

/// Cross ratio `(|ac|·|bd|)/(|ad|·|bc|)` of four extended points. At most
/// one point may be infinite; the two factors containing it cancel.
pub fn cross_ratio_points(
    a: &ExtendedPoint,
    b: &ExtendedPoint,
    c: &ExtendedPoint,
    d: &ExtendedPoint,
) -> Result<f64> {
    let infinities = [a, b, c, d].iter().filter(|p| matches!(p, ExtendedPoint::Infinity)).count();
    if infinities > 1 {
        return Err(Error::InvalidParameter(
            "cross ratio of two infinite points is degenerate".into(),
        ));
    }
    // Factor pairs (numerator, denominator) sharing each point, so an
    // infinite point removes one factor from each side.
    let ac = extended_distance(a, c);
    let bd = extended_distance(b, d);
    let ad = extended_distance(a, d);
    let bc = extended_distance(b, c);
    let numerator: f64 = [ac, bd].iter().flatten().product();
    let denominator: f64 = [ad, bc].iter().flatten().product();
    if denominator == 0.0 || numerator == 0.0 {
        return Err(Error::InvalidParameter("degenerate quadruple: coincident points".into()));
    }
    Ok(numerator / denominator)
}

/// Worst relative cross-ratio defect `|cr(images)/cr(points) − 1|` over
/// sampled quadruples of the paired lists. Degenerate quadruples are
/// skipped. A Möbius map scores ≈ 0; a genuine snowflake scores large.
pub fn mobius_defect(
    points: &[ExtendedPoint],
    images: &[ExtendedPoint],
    quadruples: usize,
    seed: u64,
) -> Result<f64> {
    if points.len() != images.len() {
        return Err(Error::BadShape { rows: images.len(), labels: points.len() });
    }
    if points.len() < 4 {
        return Err(Error::WrongPointCount { expected: 4, got: points.len() });
    }
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0.0f64;
    for _ in 0..quadruples {
        let mut idx = [0usize; 4];
        loop {
            for slot in &mut idx {
                *slot = rng.gen_range(0..points.len());
            }
            if (0..4).all(|i| (i + 1..4).all(|j| idx[i] != idx[j])) {
                break;
            }
        }
        let source = cross_ratio_points(
            &points[idx[0]],
            &points[idx[1]],
            &points[idx[2]],
            &points[idx[3]],
        );
        let image = cross_ratio_points(
            &images[idx[0]],
            &images[idx[1]],
            &images[idx[2]],
            &images[idx[3]],
        );
        if let (Ok(source), Ok(image)) = (source, image) {
            worst = worst.max((image / source - 1.0).abs());
        }
    }
    Ok(worst)
}

// ---- the composite embedding and its measurement ----------------------------------

/// `π ∘ g`: ball snowflake followed by inverse stereographic projection —
/// a point of the unit sphere of ℝ^{1 + dim·n_cells}.
pub fn composite_embedding(z: &[f64], n_cells: usize) -> Result<Vec<f64>> {
    let g = ball_snowflake(z, n_cells);
    let dim = g.len();
    stereographic_to_sphere(&ExtendedPoint::Finite(g), dim)
}

/// Uniform sample of the closed ℓ¹ unit ball: exponential spacings give a
/// uniform simplex point, dropping the slack coordinate and flipping signs
/// fills the ball.
pub fn sample_l1_ball<R: Rng>(dim: usize, rng: &mut R) -> Vec<f64> {
    let spacings: Vec<f64> = (0..=dim).map(|_| -rng.gen_range(f64::EPSILON..1.0f64).ln()).collect();
    let total: f64 = spacings.iter().sum();
    spacings[..dim]
        .iter()
        .map(|e| {
            let magnitude = e / total;
            if rng.gen_bool(0.5) {
                magnitude
            } else {
                -magnitude
            }
        })
        .collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct EmbeddingExperiment {
    pub dim: usize,
    pub n_cells: usize,
    pub seed: u64,
    /// `(ℓ¹ distance, chordal image distance)` for every sampled pair.
    pub pairs: Vec<(f64, f64)>,
    /// Least-squares slope of `ln(image)` against `ln(ℓ¹)` over the pairs
    /// with ℓ¹ distance at least four grid cells.
    pub fitted_exponent: f64,
    pub fit_pairs_used: usize,
    /// Measured snowflake constant of the coordinatewise stage:
    /// max of `‖g(z)−g(z')‖²/δ` and its reciprocal over fitted pairs.
    pub snowflake_constant: f64,
    /// Ptolemy check of the chordal image matrix.
    pub image_ptolemy: PtolemyReport,
}

/// Samples the ℓ¹ ball, pushes the sample through `π ∘ g`, and measures
/// what the construction promises: a square-root distance law and a
/// Ptolemaic image.
pub fn embedding_experiment(
    dim: usize,
    samples: usize,
    n_cells: usize,
    seed: u64,
) -> Result<EmbeddingExperiment> {
    if dim == 0 || samples < 2 {
        return Err(Error::InvalidParameter(
            "need dimension >= 1 and at least two samples".into(),
        ));
    }
    if n_cells < 2 {
        return Err(Error::InvalidParameter("need at least two grid cells".into()));
    }
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let points: Vec<Vec<f64>> = (0..samples).map(|_| sample_l1_ball(dim, &mut rng)).collect();
    let images: Vec<Vec<f64>> =
        points.iter().map(|z| composite_embedding(z, n_cells)).collect::<Result<_>>()?;

    let l1 = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum::<f64>();
    let euclid = |a: &[f64], b: &[f64]| {
        a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
    };

    let mut pairs = Vec::with_capacity(samples * (samples - 1) / 2);
    for i in 0..samples {
        for j in i + 1..samples {
            pairs.push((l1(&points[i], &points[j]), euclid(&images[i], &images[j])));
        }
    }

    // Below a few grid cells the profile map is linear, not square-root, so
    // the fit only sees pairs the construction actually controls.
    let fit_threshold = 4.0 * cell_width(n_cells);
    let fitted: Vec<(f64, f64)> = pairs
        .iter()
        .filter(|(delta, image)| *delta >= fit_threshold && *image > 0.0)
        .map(|&(delta, image)| (delta.ln(), image.ln()))
        .collect();
    if fitted.len() < 2 {
        return Err(Error::InvalidParameter(
            "too few well-separated pairs to fit an exponent".into(),
        ));
    }
    let n = fitted.len() as f64;
    let mean_x = fitted.iter().map(|p| p.0).sum::<f64>() / n;
    let mean_y = fitted.iter().map(|p| p.1).sum::<f64>() / n;
    let covariance: f64 = fitted.iter().map(|p| (p.0 - mean_x) * (p.1 - mean_y)).sum();
    let variance: f64 = fitted.iter().map(|p| (p.0 - mean_x) * (p.0 - mean_x)).sum();
    let fitted_exponent = covariance / variance;

    let mut snowflake_constant = 1.0f64;
    for (i, zi) in points.iter().enumerate() {
        for zj in points.iter().skip(i + 1) {
            let delta = l1(zi, zj);
            if delta >= cell_width(n_cells) {
                let sq = ball_snowflake_sq_dist(zi, zj, n_cells);
                snowflake_constant = snowflake_constant.max(sq / delta).max(delta / sq);
            }
        }
    }

    let labels: Vec<String> = (0..samples).map(|i| format!("z{i}")).collect();
    let image_matrix = DistanceMatrix::from_fn(labels, |i, j| euclid(&images[i], &images[j]))?;
    let image_ptolemy = ptolemy_check(&image_matrix, tolerances::VIOLATION_TOL);

    Ok(EmbeddingExperiment {
        dim,
        n_cells,
        seed,
        pairs,
        fitted_exponent,
        fit_pairs_used: fitted.len(),
        snowflake_constant,
        image_ptolemy,
    })
}
