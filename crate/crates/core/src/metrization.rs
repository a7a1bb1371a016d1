//! Chain-approach metrization of quasi-metrics.
//!
//! A symmetric positive kernel `ρ` that only satisfies the weak triangle
//! inequality `ρ(x,z) ≤ K·max(ρ(x,y), ρ(y,z))` can be repaired into a true
//! metric by taking the infimum of chain sums. On a finite space that
//! infimum is the all-pairs shortest-path metric `ca` of the complete graph
//! weighted by `ρ`. This module computes `ca` exactly, the bi-Lipschitz
//! distortion `max ρ/ca`, distortion curves of the entrywise powers `ρ^s`,
//! and a heuristic bracket for the critical exponent of a family of spaces.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::matrix::{DistanceMatrix, QuasiMetricSpace};
use crate::ptolemy::snowflake;

#[derive(Debug, Clone, Serialize)]
pub struct ChainMetricResult {
    /// Shortest-path repair of the input kernel. Satisfies the triangle
    /// inequality exactly (tolerance zero): the relaxation below runs to a
    /// floating-point fixpoint, so no entry can be improved through any
    /// intermediate point.
    pub ca: DistanceMatrix,
    /// `max` over pairs of `ρ[i][j] / ca[i][j]`; 1 exactly when the input
    /// was already a metric.
    pub distortion: f64,
    /// Pair attaining the distortion (`None` only for 1-point spaces).
    pub witness_pair: Option<[String; 2]>,
}

/// Shortest-path metrization of a quasi-metric.
///
/// Floyd–Warshall relaxation sweeps repeat until a full sweep changes
/// nothing. A single pass is not enough under floating point: a relaxed
/// entry can expose a strictly shorter route through an earlier
/// intermediate point, and we promise an exact fixpoint. Each update
/// strictly decreases one entry within the finite set of chain sums, so
/// the loop terminates (two or three sweeps in practice).
pub fn chain_metric(q: &QuasiMetricSpace) -> ChainMetricResult {
    let m = &q.matrix;
    let n = m.n();
    let mut d: Vec<f64> = (0..n * n).map(|idx| m.get(idx / n, idx % n)).collect();

    loop {
        let mut changed = false;
        for k in 0..n {
            for i in 0..n {
                if i == k {
                    continue;
                }
                let dik = d[i * n + k];
                for j in i + 1..n {
                    if j == k {
                        continue;
                    }
                    let via = dik + d[k * n + j];
                    if via < d[i * n + j] {
                        d[i * n + j] = via;
                        d[j * n + i] = via;
                        changed = true;
                    }
                }
            }
        }
        if !changed {
            break;
        }
    }

    let mut distortion = 1.0f64;
    let mut witness = None;
    for i in 0..n {
        for j in i + 1..n {
            let ratio = m.get(i, j) / d[i * n + j];
            if ratio > distortion {
                distortion = ratio;
                witness = Some([m.label(i).to_string(), m.label(j).to_string()]);
            }
        }
    }
    if witness.is_none() && n >= 2 {
        witness = Some([m.label(0).to_string(), m.label(1).to_string()]);
    }

    let rows = m.labels().to_vec();
    let ca = DistanceMatrix::from_fn(rows, |i, j| d[i * n + j])
        .expect("shortest-path repair preserves matrix validity");
    ChainMetricResult { ca, distortion, witness_pair: witness }
}

#[derive(Debug, Clone, Serialize)]
pub struct FrinkReport {
    pub k: f64,
    pub distortion: f64,
    /// `true` ⇔ the repaired metric is within the guaranteed factor 4.
    pub within_bound: bool,
}

/// Distortion guarantee for 2-quasi-metrics: the chain metric of any kernel
/// with constant `K ≤ 2` is bi-Lipschitz with factor at most 4, so
/// `¼·ρ ≤ ca ≤ ρ` entrywise.
///
/// Inputs with `K > 2` are rejected — the guarantee, not the computation,
/// needs the hypothesis; use [`chain_metric`] directly for raw numbers.
pub fn frink_bound_check(q: &QuasiMetricSpace) -> Result<FrinkReport> {
    if q.k > 2.0 + 1e-12 {
        return Err(Error::InvalidParameter(format!(
            "the factor-4 guarantee needs a 2-quasi-metric; this input has K = {}",
            q.k
        )));
    }
    let result = chain_metric(q);
    Ok(FrinkReport {
        k: q.k,
        distortion: result.distortion,
        within_bound: result.distortion <= 4.0 + 1e-9,
    })
}

/// Entrywise power `ρ^s` with its recomputed quasi-metric constant.
pub fn power_quasi_metric(q: &QuasiMetricSpace, s: f64) -> Result<QuasiMetricSpace> {
    Ok(QuasiMetricSpace::new(snowflake(&q.matrix, s)?))
}

#[derive(Debug, Clone, Serialize)]
pub struct DistortionCurve {
    pub s_values: Vec<f64>,
    /// Distortion of `chain_metric(ρ^s)` against `ρ^s`, per grid point.
    pub c_values: Vec<f64>,
}

/// Geometric default grid from 0.25 to 4 with 25 points; hits s = 1 exactly
/// at the middle (24 equal log-steps, twelve on each side of 1).
pub fn default_s_grid() -> Vec<f64> {
    let (lo, hi, count) = (0.25f64, 4.0f64, 25usize);
    let step = (hi / lo).ln() / (count - 1) as f64;
    (0..count).map(|k| lo * (step * k as f64).exp()).collect()
}

pub fn distortion_curve(q: &QuasiMetricSpace, s_grid: &[f64]) -> Result<DistortionCurve> {
    if s_grid.iter().any(|&s| !(s > 0.0) || !s.is_finite()) {
        return Err(Error::InvalidParameter("distortion curve exponents must be positive".into()));
    }
    let mut c_values = Vec::with_capacity(s_grid.len());
    for &s in s_grid {
        let powered = snowflake(&q.matrix, s)?;
        // `chain_metric` never consults K, so skip the O(n³) constant scan.
        let result = chain_metric(&QuasiMetricSpace { k: f64::NAN, matrix: powered });
        c_values.push(result.distortion);
    }
    Ok(DistortionCurve { s_values: s_grid.to_vec(), c_values })
}

#[derive(Debug, Clone, Serialize)]
pub struct CriticalExponentEstimate {
    /// Largest grid exponent at which the family's distortions do not
    /// qualify as diverging.
    pub last_bounded_s: Option<f64>,
    /// Smallest grid exponent at which distortion grows monotonically with
    /// space size and the largest space exceeds the threshold; `None` means
    /// no divergence was seen anywhere on the grid ("s₀ = ∞" at this scale).
    pub first_diverging_s: Option<f64>,
    /// Distortions per grid exponent (outer) and family member (inner).
    pub distortions: Vec<Vec<f64>>,
}

/// Heuristic bracket for the critical snowflake exponent of a growing
/// family of spaces.
///
/// "Diverging at s" means the distortions of `ca(ρ^s)` are nondecreasing
/// along the family (slack 1e−9 for ties) and the largest member's
/// distortion reaches `divergence_threshold`. This is a finite-scale trend
/// reading, not a certificate: a genuine critical exponent is defined by a
/// limit the family can only hint at.
pub fn estimate_critical_exponent(
    family: &[QuasiMetricSpace],
    s_grid: &[f64],
    divergence_threshold: f64,
) -> Result<CriticalExponentEstimate> {
    if family.len() < 2 {
        return Err(Error::InvalidParameter(
            "critical-exponent estimation needs at least two family members".into(),
        ));
    }
    if family.windows(2).any(|w| w[0].matrix.n() > w[1].matrix.n()) {
        return Err(Error::InvalidParameter(
            "family must be ordered by nondecreasing size".into(),
        ));
    }
    if s_grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidParameter("exponent grid must be strictly increasing".into()));
    }
    if !(divergence_threshold > 1.0) {
        return Err(Error::InvalidParameter("divergence threshold must exceed 1".into()));
    }

    let mut distortions = Vec::with_capacity(s_grid.len());
    for q in family {
        let curve = distortion_curve(q, s_grid)?;
        distortions.push(curve.c_values);
    }
    // Transpose to per-exponent rows.
    let per_s: Vec<Vec<f64>> = (0..s_grid.len())
        .map(|si| distortions.iter().map(|row| row[si]).collect())
        .collect();

    let mut last_bounded = None;
    let mut first_diverging = None;
    for (si, row) in per_s.iter().enumerate() {
        let monotone = row.windows(2).all(|w| w[1] >= w[0] - 1e-9);
        let diverging = monotone && *row.last().expect("family nonempty") >= divergence_threshold;
        if diverging {
            if first_diverging.is_none() {
                first_diverging = Some(s_grid[si]);
            }
        } else {
            last_bounded = Some(s_grid[si]);
        }
    }
    Ok(CriticalExponentEstimate { last_bounded_s: last_bounded, first_diverging_s: first_diverging, distortions: per_s })
}
