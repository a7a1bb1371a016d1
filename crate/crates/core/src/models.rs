//! Exact hyperbolic-space oracle: Poincaré-ball and hyperboloid distances,
//! Möbius translations, boundary (Bourdon) metrics of ideal-point
//! configurations, the law-of-cosines limit behind them, and two analytic
//! constructions — the glued quadrilateral and the six-point frame metric —
//! that realize interesting Ptolemy equality patterns.
//!
//! Conventions: the ball model lives in the open unit ball of ℝⁿ, ideal
//! points are unit vectors; the hyperboloid model uses coordinates
//! `(x₀, x⃗)` with `x₀ > 0` and Minkowski norm `⟨x,x⟩ = −1`. The boundary
//! metric at a basepoint `o` is `ρ_o(ξ,η) = sin(½θ_o(ξ,η))`, the sine of
//! half the visual angle, which for the ball model has the closed form
//! `(1−|o|²)·|ξ−η| / (2|ξ−o||η−o|)`.

use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::matrix::{check_metric_axioms, DistanceMatrix};
use crate::ptolemy::{involute, ptolemy_check};
use crate::tolerances;

// ---- small vector helpers ----------------------------------------------------

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm_sq(a: &[f64]) -> f64 {
    dot(a, a)
}

fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

/// `acosh(1 + z)` for `z ≥ 0` without cancellation near zero.
fn acosh1p(z: f64) -> f64 {
    (z + (z * (z + 2.0)).sqrt()).ln_1p()
}

// ---- model points and distances ------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Model {
    PoincareBall,
    Hyperboloid,
}

fn check_ball_point(x: &[f64]) -> Result<()> {
    if x.is_empty() || !x.iter().all(|v| v.is_finite()) || norm_sq(x) >= 1.0 {
        return Err(Error::ModelDomain(format!(
            "ball-model points must be finite with norm < 1, got {x:?}"
        )));
    }
    Ok(())
}

fn check_hyperboloid_point(x: &[f64]) -> Result<()> {
    let ok = x.len() >= 2
        && x.iter().all(|v| v.is_finite())
        && x[0] > 0.0
        && (minkowski_dot(x, x) + 1.0).abs() <= 1e-9 * x[0].max(1.0);
    if !ok {
        return Err(Error::ModelDomain(format!(
            "hyperboloid points need x0 > 0 and Minkowski norm -1, got {x:?}"
        )));
    }
    Ok(())
}

pub fn minkowski_dot(u: &[f64], v: &[f64]) -> f64 {
    -u[0] * v[0] + dot(&u[1..], &v[1..])
}

/// `(x₀, x⃗)` on the hyperboloid for a ball point `x`.
pub fn ball_to_hyperboloid(x: &[f64]) -> Result<Vec<f64>> {
    check_ball_point(x)?;
    let s = norm_sq(x);
    let lambda = 1.0 / (1.0 - s);
    let mut u = Vec::with_capacity(x.len() + 1);
    u.push((1.0 + s) * lambda);
    u.extend(x.iter().map(|v| 2.0 * v * lambda));
    Ok(u)
}

pub fn hyperboloid_to_ball(u: &[f64]) -> Result<Vec<f64>> {
    check_hyperboloid_point(u)?;
    Ok(u[1..].iter().map(|v| v / (1.0 + u[0])).collect())
}

/// Hyperbolic distance between two points of the given model.
pub fn hyp_distance(u: &[f64], v: &[f64], model: Model) -> Result<f64> {
    match model {
        Model::PoincareBall => {
            check_ball_point(u)?;
            check_ball_point(v)?;
            if u.len() != v.len() {
                return Err(Error::ModelDomain("dimension mismatch".into()));
            }
            let z = 2.0 * norm_sq(&sub(u, v)) / ((1.0 - norm_sq(u)) * (1.0 - norm_sq(v)));
            Ok(acosh1p(z))
        }
        Model::Hyperboloid => {
            check_hyperboloid_point(u)?;
            check_hyperboloid_point(v)?;
            if u.len() != v.len() {
                return Err(Error::ModelDomain("dimension mismatch".into()));
            }
            // cosh d = −⟨u,v⟩; clamp the tiny negative dust at u = v.
            Ok(acosh1p((-minkowski_dot(u, v) - 1.0).max(0.0)))
        }
    }
}

// ---- Möbius translations -------------------------------------------------------

/// The hyperbolic isometry of the ball taking `o` to the origin, evaluated
/// at `x` (which may be an ideal point, `|x| = 1`).
pub fn mobius_translate(o: &[f64], x: &[f64]) -> Vec<f64> {
    let ox = dot(o, x);
    let xx = norm_sq(x);
    let oo = norm_sq(o);
    let denom = 1.0 - 2.0 * ox + oo * xx;
    let co = -(1.0 - 2.0 * ox + xx) / denom;
    let cx = (1.0 - oo) / denom;
    o.iter().zip(x).map(|(a, b)| co * a + cx * b).collect()
}

/// Inverse of [`mobius_translate`], taking the origin back to `o`.
pub fn mobius_untranslate(o: &[f64], y: &[f64]) -> Vec<f64> {
    let oy = dot(o, y);
    let yy = norm_sq(y);
    let oo = norm_sq(o);
    let denom = 1.0 + 2.0 * oy + oo * yy;
    let co = (1.0 + 2.0 * oy + yy) / denom;
    let cy = (1.0 - oo) / denom;
    o.iter().zip(y).map(|(a, b)| co * a + cy * b).collect()
}

/// Boundary distance `sin(½θ_o(ξ,η))` between ideal points `ξ, η` seen from
/// the interior basepoint `o`, by the ball-model closed form.
pub fn bourdon_distance(o: &[f64], xi: &[f64], eta: &[f64]) -> f64 {
    let diff = norm_sq(&sub(xi, eta)).sqrt();
    let a = norm_sq(&sub(xi, o)).sqrt();
    let b = norm_sq(&sub(eta, o)).sqrt();
    (1.0 - norm_sq(o)) * diff / (2.0 * a * b)
}

// ---- ideal configurations and the boundary metric -------------------------------

/// A finite set of labeled ideal points of the ball model plus an interior
/// basepoint — the raw data for a boundary metric.
#[derive(Debug, Clone, Serialize)]
pub struct IdealConfig {
    pub dim: usize,
    pub basepoint: Vec<f64>,
    pub labels: Vec<String>,
    /// Unit vectors, renormalized at construction.
    pub ideal_points: Vec<Vec<f64>>,
}

impl IdealConfig {
    pub fn new(
        basepoint: Vec<f64>,
        labels: Vec<String>,
        ideal_points: Vec<Vec<f64>>,
    ) -> Result<Self> {
        let dim = basepoint.len();
        if dim < 2 {
            return Err(Error::ModelDomain("hyperbolic models need dimension >= 2".into()));
        }
        check_ball_point(&basepoint)?;
        if labels.len() != ideal_points.len() || labels.is_empty() {
            return Err(Error::BadShape { rows: ideal_points.len(), labels: labels.len() });
        }
        let mut normalized = Vec::with_capacity(ideal_points.len());
        for p in &ideal_points {
            if p.len() != dim {
                return Err(Error::ModelDomain("ideal point dimension mismatch".into()));
            }
            let norm = norm_sq(p).sqrt();
            if !norm.is_finite() || (norm - 1.0).abs() > 1e-9 {
                return Err(Error::ModelDomain(format!(
                    "ideal points must be unit vectors (|p| = {norm})"
                )));
            }
            normalized.push(p.iter().map(|v| v / norm).collect::<Vec<f64>>());
        }
        for i in 0..normalized.len() {
            for j in i + 1..normalized.len() {
                if norm_sq(&sub(&normalized[i], &normalized[j])).sqrt() <= 1e-12 {
                    return Err(Error::InvalidParameter(format!(
                        "duplicate ideal direction: {} and {}",
                        labels[i], labels[j]
                    )));
                }
            }
        }
        Ok(Self { dim, basepoint, labels, ideal_points: normalized })
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct BourdonMetric {
    pub matrix: DistanceMatrix,
    pub basepoint: Vec<f64>,
}

/// Boundary metric of the configuration at its basepoint. Entries are at
/// most 1, with 1 exactly when the basepoint lies on the geodesic joining
/// the two ideal points (visual angle π).
pub fn bourdon_metric(config: &IdealConfig) -> Result<BourdonMetric> {
    let o = &config.basepoint;
    let matrix = DistanceMatrix::from_fn(config.labels.clone(), |i, j| {
        bourdon_distance(o, &config.ideal_points[i], &config.ideal_points[j])
    })?;
    Ok(BourdonMetric { matrix, basepoint: o.clone() })
}

/// The six ideal points `±e₁, ±e₂, ±e₃` of the 3-ball seen from the origin.
/// Its boundary metric has opposite pairs at distance 1 and everything else
/// at `1/√2`.
pub fn orthogonal_frame_config() -> IdealConfig {
    let mut labels = Vec::new();
    let mut points = Vec::new();
    for axis in 0..3usize {
        for (sign, tag) in [(1.0, "+"), (-1.0, "-")] {
            labels.push(format!("e{}{}", axis + 1, tag));
            let mut p = vec![0.0; 3];
            p[axis] = sign;
            points.push(p);
        }
    }
    IdealConfig::new(vec![0.0; 3], labels, points).expect("frame configuration is valid")
}

// ---- the law-of-cosines limit ---------------------------------------------------

/// Distance `h_t` between the two points at parameter `t` on the legs of a
/// hyperbolic angle `θ`: `cosh h_t = cosh²t − sinh²t·cos θ`, evaluated in
/// the cancellation-free form `1 + 2·sinh²t·sin²(θ/2)`.
pub fn ideal_triangle_height(theta: f64, t: f64) -> Result<f64> {
    if !(theta > 0.0 && theta <= std::f64::consts::PI) {
        return Err(Error::InvalidParameter(format!("angle must lie in (0, pi], got {theta}")));
    }
    if !(t >= 0.0) || !t.is_finite() {
        return Err(Error::InvalidParameter(format!("leg parameter must be >= 0, got {t}")));
    }
    let s = t.sinh() * (theta / 2.0).sin();
    Ok(acosh1p(2.0 * s * s))
}

#[derive(Debug, Clone, Serialize)]
pub struct BourdonLimitReport {
    pub theta: f64,
    /// `(t, (e^{h_t} e^{−2t})^{1/2})` at integer parameters `t = 1..=t_max`.
    pub values: Vec<(f64, f64)>,
    /// The limit the sequence approaches: `sin(θ/2)`.
    pub limit: f64,
    /// Defect of the last sequence element against the limit.
    pub final_defect: f64,
}

/// The normalized leg-to-leg distance `(e^{h_t} e^{−2t})^{1/2}` converges
/// to `sin(θ/2)` as the legs extend to infinity — the computation that
/// makes `sin(½θ)` the natural boundary distance.
pub fn bourdon_limit(theta: f64, t_max: u32) -> Result<BourdonLimitReport> {
    if t_max == 0 {
        return Err(Error::InvalidParameter("need at least one sample, t_max >= 1".into()));
    }
    let limit = (theta / 2.0).sin();
    let mut values = Vec::with_capacity(t_max as usize);
    for k in 1..=t_max {
        let t = f64::from(k);
        let h = ideal_triangle_height(theta, t)?;
        values.push((t, ((h - 2.0 * t) / 2.0).exp()));
    }
    let final_defect = (values.last().expect("t_max >= 1").1 - limit).abs();
    Ok(BourdonLimitReport { theta, values, limit, final_defect })
}

/// Kernel `e^{−(x_t|y_t)_o}` where `x_t` sits at hyperbolic distance `t`
/// from the basepoint along the ray toward each ideal point. As `t` grows
/// this converges to the boundary metric of the configuration.
pub fn truncated_visual(config: &IdealConfig, t: f64) -> Result<DistanceMatrix> {
    if !(t > 0.0) || !t.is_finite() {
        return Err(Error::InvalidParameter(format!("ray parameter must be positive, got {t}")));
    }
    let o = &config.basepoint;
    let radius = (t / 2.0).tanh();
    let ray_points: Vec<Vec<f64>> = config
        .ideal_points
        .iter()
        .map(|xi| {
            let direction = mobius_translate(o, xi);
            let scaled: Vec<f64> = direction.iter().map(|v| radius * v).collect();
            mobius_untranslate(o, &scaled)
        })
        .collect();
    DistanceMatrix::from_fn(config.labels.clone(), |i, j| {
        let dox = hyp_distance(o, &ray_points[i], Model::PoincareBall).expect("interior point");
        let doy = hyp_distance(o, &ray_points[j], Model::PoincareBall).expect("interior point");
        let dxy = hyp_distance(&ray_points[i], &ray_points[j], Model::PoincareBall)
            .expect("interior point");
        (-0.5 * (dox + doy - dxy)).exp()
    })
}

/// Slack of the half-angle comparison for a four-point ideal configuration:
/// `sin(½θ_o(y₁,y₂))·sin(½θ_o(y₃,y₄)) ≤ |y₁y₂||y₃y₄| / (|y₁y₃||y₂y₄|)`,
/// where `|·|` is any boundary metric of the same four points (the right
/// side is a cross ratio, hence independent of that choice). Equality holds
/// exactly when `o` lies on both diagonal geodesics `y₁y₃` and `y₂y₄`.
pub fn half_angle_comparison_slack(config: &IdealConfig, reference: &DistanceMatrix) -> Result<f64> {
    if config.labels.len() != 4 {
        return Err(Error::WrongPointCount { expected: 4, got: config.labels.len() });
    }
    let idx: Vec<usize> = config
        .labels
        .iter()
        .map(|l| reference.require_index(l))
        .collect::<Result<_>>()?;
    let ratio = reference.get(idx[0], idx[1]) * reference.get(idx[2], idx[3])
        / (reference.get(idx[0], idx[2]) * reference.get(idx[1], idx[3]));
    let o = &config.basepoint;
    let lhs = bourdon_distance(o, &config.ideal_points[0], &config.ideal_points[1])
        * bourdon_distance(o, &config.ideal_points[2], &config.ideal_points[3]);
    Ok(ratio - lhs)
}

/// Boundary metric seen from a puncture: the involution of a Bourdon metric
/// at one of its points. A metric again exactly because Bourdon metrics are
/// Ptolemaic.
pub fn hamenstadt_metric(b: &BourdonMetric, omega: &str) -> Result<DistanceMatrix> {
    involute(&b.matrix, omega)
}

// ---- analytic example constructions ---------------------------------------------

/// Boundary metric of four ideal triangles with apex half-angles
/// `sin(½α) = a`, `sin(½β) = b` glued cyclically around a cone point: sides
/// alternate `a, b, a, b` and both diagonals have length 1 (the cone point
/// sees each diagonal pair at angle π). Requires `a² + b² ≥ 1`, which is
/// precisely the Ptolemy inequality of the resulting quadruple.
pub fn glued_quadrilateral(a: f64, b: f64) -> Result<DistanceMatrix> {
    for (name, v) in [("a", a), ("b", b)] {
        if !(v > 0.0 && v <= 1.0) {
            return Err(Error::InvalidParameter(format!(
                "side parameter {name} must lie in (0, 1], got {v}"
            )));
        }
    }
    if a * a + b * b < 1.0 {
        return Err(Error::InvalidParameter(format!(
            "sides need a^2 + b^2 >= 1 to satisfy the Ptolemy inequality, got {}",
            a * a + b * b
        )));
    }
    let labels: Vec<String> = (1..=4).map(|i| format!("y{i}")).collect();
    DistanceMatrix::from_fn(labels, |i, j| match (i, j) {
        (0, 2) | (1, 3) => 1.0,
        (0, 1) | (2, 3) => a,
        _ => b,
    })
}

/// The six-point deformation of the orthogonal-frame boundary metric:
/// opposite pairs stay at distance 1, and the distance from `eᵢ^±` to the
/// next axis scales by the parameter of that axis pair:
/// `|e₁⁺e₂^±| = a/√2`, `|e₁⁻e₂^±| = 1/(a√2)`, cyclically with `b` for
/// `e₂→e₃` and `c` for `e₃→e₁`. At `a = b = c = 1` this is exactly the
/// frame metric; parameters too far from 1 break the triangle inequality
/// and are rejected with the violating triple.
pub fn six_point_frame_metric(a: f64, b: f64, c: f64) -> Result<DistanceMatrix> {
    for (name, v) in [("a", a), ("b", b), ("c", c)] {
        if !(v > 0.0) || !v.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "frame parameter {name} must be positive, got {v}"
            )));
        }
    }
    let labels: Vec<String> =
        ["e1+", "e1-", "e2+", "e2-", "e3+", "e3-"].map(String::from).to_vec();
    let inv_sqrt2 = std::f64::consts::FRAC_1_SQRT_2;
    // Entry for the pair (axis i, sign si) — (axis j, sign sj), i < j.
    let entry = |i: usize, si: f64, j: usize, sj: f64| -> f64 {
        if i == j {
            return 1.0; // opposite pair e_i^+, e_i^-
        }
        match (i, j) {
            (0, 1) => if si > 0.0 { a * inv_sqrt2 } else { inv_sqrt2 / a },
            (1, 2) => if si > 0.0 { b * inv_sqrt2 } else { inv_sqrt2 / b },
            (0, 2) => if sj > 0.0 { c * inv_sqrt2 } else { inv_sqrt2 / c },
            _ => unreachable!("i < j within three axes"),
        }
    };
    let m = DistanceMatrix::from_fn(labels, |p, q| {
        let (i, si) = (p / 2, if p % 2 == 0 { 1.0 } else { -1.0 });
        let (j, sj) = (q / 2, if q % 2 == 0 { 1.0 } else { -1.0 });
        entry(i, si, j, sj)
    })?;
    let axioms = check_metric_axioms(&m, 0.0);
    if let Some(v) = axioms.violations.first() {
        return Err(Error::TriangleViolation {
            triple: v.triple.clone(),
            lhs: v.lhs,
            rhs: v.rhs,
        });
    }
    Ok(m)
}

#[derive(Debug, Clone, Serialize)]
pub struct ScanRow {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub is_metric: bool,
    pub is_ptolemaic: bool,
    /// First triangle violation when not a metric.
    pub triangle_witness: Option<[String; 3]>,
    /// Worst quadruple when the Ptolemy inequality fails.
    pub ptolemy_witness: Option<[String; 4]>,
}

/// Classifies every grid point `(a, b, c)` of the six-point construction.
/// Grid values must stay within `(0.5, 2)`; outside that window the
/// construction degenerates in uninteresting ways.
pub fn admissible_parameter_scan(grid: &[f64]) -> Result<Vec<ScanRow>> {
    if grid.is_empty() {
        return Err(Error::InvalidParameter("empty parameter grid".into()));
    }
    if grid.iter().any(|&v| !(v > 0.5 && v < 2.0)) {
        return Err(Error::InvalidParameter("grid values must lie strictly in (0.5, 2)".into()));
    }
    let mut rows = Vec::with_capacity(grid.len().pow(3));
    for &a in grid {
        for &b in grid {
            for &c in grid {
                let row = match six_point_frame_metric(a, b, c) {
                    Ok(m) => {
                        let report = ptolemy_check(&m, tolerances::VIOLATION_TOL);
                        ScanRow {
                            a,
                            b,
                            c,
                            is_metric: true,
                            is_ptolemaic: report.satisfied,
                            triangle_witness: None,
                            ptolemy_witness: if report.satisfied {
                                None
                            } else {
                                report.worst_quadruple
                            },
                        }
                    }
                    Err(Error::TriangleViolation { triple, .. }) => ScanRow {
                        a,
                        b,
                        c,
                        is_metric: false,
                        is_ptolemaic: false,
                        triangle_witness: Some(triple),
                        ptolemy_witness: None,
                    },
                    Err(e) => return Err(e),
                };
                rows.push(row);
            }
        }
    }
    Ok(rows)
}

// ---- random configuration builders ----------------------------------------------

/// Isotropic unit vector via normalized Gaussians (Box–Muller).
pub fn random_unit_vector<R: Rng>(dim: usize, rng: &mut R) -> Vec<f64> {
    loop {
        let mut v = Vec::with_capacity(dim);
        while v.len() < dim {
            let u1: f64 = rng.gen_range(f64::EPSILON..1.0);
            let u2: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
            let r = (-2.0 * u1.ln()).sqrt();
            v.push(r * u2.cos());
            if v.len() < dim {
                v.push(r * u2.sin());
            }
        }
        let norm = norm_sq(&v).sqrt();
        if norm > 1e-6 {
            return v.into_iter().map(|x| x / norm).collect();
        }
    }
}

/// Random configuration: `count` well-separated ideal directions and a
/// basepoint of norm at most `max_basepoint_norm`.
pub fn random_ideal_config<R: Rng>(
    dim: usize,
    count: usize,
    max_basepoint_norm: f64,
    rng: &mut R,
) -> Result<IdealConfig> {
    if !(0.0..1.0).contains(&max_basepoint_norm) {
        return Err(Error::InvalidParameter(
            "basepoint norm bound must lie in [0, 1)".into(),
        ));
    }
    let direction = random_unit_vector(dim, rng);
    let radius = max_basepoint_norm * rng.gen_range(0.0..1.0f64);
    let basepoint: Vec<f64> = direction.into_iter().map(|v| radius * v).collect();

    let mut points: Vec<Vec<f64>> = Vec::with_capacity(count);
    while points.len() < count {
        let p = random_unit_vector(dim, rng);
        // Keep directions separated so boundary distances stay positive.
        if points.iter().all(|q| norm_sq(&sub(&p, q)).sqrt() > 1e-6) {
            points.push(p);
        }
    }
    let labels = (0..count).map(|i| format!("y{}", i + 1)).collect();
    IdealConfig::new(basepoint, labels, points)
}

/// Ideal points of the 3-ball on the circle cut out by the plane
/// `⟨x, normal⟩ = offset`, at the given angle parameters — four of these
/// always bound an ideal quadrilateral inside a geodesic plane.
pub fn circle_ideal_config(
    normal: &[f64],
    offset: f64,
    angles: &[f64],
    basepoint: Vec<f64>,
) -> Result<IdealConfig> {
    if normal.len() != 3 {
        return Err(Error::ModelDomain("circle configurations live in dimension 3".into()));
    }
    if !(offset.abs() < 1.0) {
        return Err(Error::InvalidParameter("plane offset must satisfy |offset| < 1".into()));
    }
    let nn = norm_sq(normal).sqrt();
    if nn <= 1e-12 {
        return Err(Error::InvalidParameter("plane normal must be nonzero".into()));
    }
    let n: Vec<f64> = normal.iter().map(|v| v / nn).collect();
    // Orthonormal basis of the plane through the origin with normal n.
    let pick = if n[0].abs() < 0.9 { [1.0, 0.0, 0.0] } else { [0.0, 1.0, 0.0] };
    let mut u = [
        pick[1] * n[2] - pick[2] * n[1],
        pick[2] * n[0] - pick[0] * n[2],
        pick[0] * n[1] - pick[1] * n[0],
    ];
    let un = norm_sq(&u).sqrt();
    u.iter_mut().for_each(|x| *x /= un);
    let v = [
        n[1] * u[2] - n[2] * u[1],
        n[2] * u[0] - n[0] * u[2],
        n[0] * u[1] - n[1] * u[0],
    ];
    let r = (1.0 - offset * offset).sqrt();
    let points: Vec<Vec<f64>> = angles
        .iter()
        .map(|phi| {
            (0..3)
                .map(|k| offset * n[k] + r * (phi.cos() * u[k] + phi.sin() * v[k]))
                .collect()
        })
        .collect();
    let labels = (0..angles.len()).map(|i| format!("y{}", i + 1)).collect();
    IdealConfig::new(basepoint, labels, points)
}
