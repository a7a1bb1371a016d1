//! Gromov products, δ-hyperbolicity constants, and the boundary
//! quasi-metric they induce on a finite metric space.
//!
//! The Gromov product `(x|y)_o = ½(|ox| + |oy| − |xy|)` measures how long
//! geodesics from `o` toward `x` and `y` stay together. A space is
//! δ-hyperbolic at `o` when, for every triple, the two smallest of the
//! three products differ by at most δ. Trees achieve δ = 0; the kernel
//! `e^{−(x|y)_o}` is then a quasi-metric with constant at most `e^δ`, the
//! finite stand-in for a visual metric on the boundary at infinity.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::Result;
use crate::matrix::{DistanceMatrix, QuasiMetricSpace};

/// `(x|y)_o` by point indices; nonnegative whenever the matrix is a metric.
fn product_by_index(m: &DistanceMatrix, o: usize, x: usize, y: usize) -> f64 {
    0.5 * (m.get(o, x) + m.get(o, y) - m.get(x, y))
}

pub fn gromov_product(m: &DistanceMatrix, o: &str, x: &str, y: &str) -> Result<f64> {
    Ok(product_by_index(m, m.require_index(o)?, m.require_index(x)?, m.require_index(y)?))
}

/// How far a triple of Gromov products is from the tree case: the gap
/// between its two smallest values.
pub fn triple_deficiency(a: f64, b: f64, c: f64) -> f64 {
    let largest = a.max(b).max(c);
    let smallest = a.min(b).min(c);
    let middle = a + b + c - largest - smallest;
    middle - smallest
}

#[derive(Debug, Clone, Serialize)]
pub struct GromovReport {
    pub basepoint: String,
    /// Smallest δ making every triple a δ-triple at this basepoint.
    pub delta: f64,
    /// Basepoint plus the triple attaining δ (`None` for < 3 non-basepoint
    /// points, where δ = 0 vacuously).
    pub worst_quadruple: Option<[String; 4]>,
}

/// Parallelize the O(n³) triple scan only when it pays for itself.
const PAR_THRESHOLD: usize = 48;

pub fn delta_at_basepoint(m: &DistanceMatrix, o: &str) -> Result<GromovReport> {
    let oi = m.require_index(o)?;
    let n = m.n();

    let scan_x = |x: usize| -> (f64, Option<[usize; 3]>) {
        let mut worst = 0.0f64;
        let mut arg = None;
        if x == oi {
            return (worst, arg);
        }
        for y in x + 1..n {
            if y == oi {
                continue;
            }
            let pxy = product_by_index(m, oi, x, y);
            for z in y + 1..n {
                if z == oi {
                    continue;
                }
                let pyz = product_by_index(m, oi, y, z);
                let pxz = product_by_index(m, oi, x, z);
                let deficiency = triple_deficiency(pxy, pyz, pxz);
                if deficiency > worst {
                    worst = deficiency;
                    arg = Some([x, y, z]);
                }
            }
        }
        (worst, arg)
    };

    let parts: Vec<(f64, Option<[usize; 3]>)> = if n >= PAR_THRESHOLD {
        (0..n).into_par_iter().map(scan_x).collect()
    } else {
        (0..n).map(scan_x).collect()
    };
    let mut delta = 0.0f64;
    let mut arg = None;
    for (worst, a) in parts {
        if worst > delta {
            delta = worst;
            arg = a;
        }
    }

    Ok(GromovReport {
        basepoint: o.to_string(),
        delta,
        worst_quadruple: arg.map(|[x, y, z]| {
            [o.to_string(), m.label(x).to_string(), m.label(y).to_string(), m.label(z).to_string()]
        }),
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct DeltaGlobalReport {
    /// Largest per-basepoint δ.
    pub delta: f64,
    pub per_basepoint: Vec<GromovReport>,
    /// Whether δ(o') ≤ 2·δ(o) held for every ordered basepoint pair
    /// (a theorem for metric inputs; reported so violations of the metric
    /// hypothesis surface loudly).
    pub doubling_satisfied: bool,
    /// `max` over ordered pairs of `δ(o') − 2·δ(o)`.
    pub worst_doubling_excess: f64,
}

pub fn delta_global(m: &DistanceMatrix) -> Result<DeltaGlobalReport> {
    let per_basepoint: Vec<GromovReport> = m
        .labels()
        .iter()
        .map(|o| delta_at_basepoint(m, o))
        .collect::<Result<_>>()?;
    let delta = per_basepoint.iter().map(|r| r.delta).fold(0.0, f64::max);
    let mut worst_excess = f64::NEG_INFINITY;
    for r1 in &per_basepoint {
        for r2 in &per_basepoint {
            let excess = r2.delta - 2.0 * r1.delta;
            if excess > worst_excess {
                worst_excess = excess;
            }
        }
    }
    Ok(DeltaGlobalReport {
        delta,
        per_basepoint,
        doubling_satisfied: worst_excess <= 1e-12,
        worst_doubling_excess: worst_excess,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct BoundaryQuasiMetric {
    /// Kernel `e^{−(x|y)_o}` on the non-basepoint rows and columns,
    /// with its computed constant.
    pub space: QuasiMetricSpace,
    pub basepoint: String,
    /// δ at the basepoint, for the `K ≤ e^δ` comparison.
    pub delta: f64,
    pub e_delta: f64,
}

/// Exponential of minus the Gromov product, the finite proxy for a visual
/// boundary metric. The triple condition at `o` translates verbatim into
/// `K ≤ e^δ`: `(x|z) ≥ min((x|y),(y|z)) − δ` exponentiates to
/// `e^{−(x|z)} ≤ e^δ · max(e^{−(x|y)}, e^{−(y|z)})`.
///
/// The basepoint itself is dropped from the kernel: `(x|x)_o = |ox|` forces
/// a zero diagonal anyway, but `(o|y)_o = 0` would give the basepoint unit
/// distance to everything while sitting at distance 0 in spirit.
pub fn boundary_quasimetric(m: &DistanceMatrix, o: &str) -> Result<BoundaryQuasiMetric> {
    let report = delta_at_basepoint(m, o)?;
    let oi = m.require_index(o)?;
    let keep: Vec<usize> = (0..m.n()).filter(|&i| i != oi).collect();
    let labels = keep.iter().map(|&i| m.label(i).to_string()).collect();
    let matrix = DistanceMatrix::from_fn(labels, |a, b| {
        (-product_by_index(m, oi, keep[a], keep[b])).exp()
    })?;
    let space = QuasiMetricSpace::new(matrix);
    let e_delta = report.delta.exp();
    Ok(BoundaryQuasiMetric { space, basepoint: o.to_string(), delta: report.delta, e_delta })
}

/// Largest deviation from the basepoint-change identity
/// `(x₁|x₂)_{o'} = |oo'| + (x₁|x₂)_o − (x₁|o')_o − (x₂|o')_o`
/// over all pairs. The identity is algebra — every distance cancels — so
/// anything beyond accumulated rounding indicates corrupted input.
pub fn basepoint_change_max_defect(m: &DistanceMatrix, o: &str, o2: &str) -> Result<f64> {
    let oi = m.require_index(o)?;
    let pi = m.require_index(o2)?;
    let n = m.n();
    let mut worst = 0.0f64;
    for x in 0..n {
        for y in x + 1..n {
            let lhs = product_by_index(m, pi, x, y);
            let rhs = m.get(oi, pi) + product_by_index(m, oi, x, y)
                - product_by_index(m, oi, x, pi)
                - product_by_index(m, oi, y, pi);
            let defect = (lhs - rhs).abs();
            if defect > worst {
                worst = defect;
            }
        }
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ptolemy::mobius_equivalent;
    use crate::spaces;
    use crate::tolerances::EXACT_TOL;

    #[test]
    fn product_degenerate_cases() {
        let m = spaces::path_segment(4);
        // (x|x)_o = |ox|.
        assert_eq!(gromov_product(&m, "0", "3", "3").unwrap(), 3.0);
        // o between x and y on a geodesic → 0.
        assert_eq!(gromov_product(&m, "2", "0", "4").unwrap(), 0.0);
    }

    #[test]
    fn four_cycle_product_and_delta() {
        let m = spaces::four_cycle();
        // o = v0, x = v1, y = v3 (both adjacent to o, opposite each other):
        // ½(1 + 1 − 2) = 0.
        assert_eq!(gromov_product(&m, "v0", "v1", "v3").unwrap(), 0.0);
        // Brute-force over the four triples at each basepoint gives δ = 1.
        for o in ["v0", "v1", "v2", "v3"] {
            let report = delta_at_basepoint(&m, o).unwrap();
            assert_eq!(report.delta, 1.0, "4-cycle is exactly 1-hyperbolic at {o}");
            assert!(report.worst_quadruple.is_some());
        }
        let global = delta_global(&m).unwrap();
        assert_eq!(global.delta, 1.0);
        assert!(global.doubling_satisfied);
    }

    #[test]
    fn trees_are_zero_hyperbolic() {
        let star = spaces::star_tree(5);
        assert_eq!(delta_global(&star).unwrap().delta, 0.0);
        let path = spaces::path_segment(9);
        assert_eq!(delta_global(&path).unwrap().delta, 0.0);
    }

    #[test]
    fn delta_scales_with_the_metric() {
        let m = spaces::four_cycle();
        let base = delta_at_basepoint(&m, "v0").unwrap().delta;
        // Dyadic scaling keeps every intermediate value exact.
        let scaled = m.scaled(4.0).unwrap();
        assert_eq!(delta_at_basepoint(&scaled, "v0").unwrap().delta, 4.0 * base);
    }

    #[test]
    fn boundary_kernel_of_a_star_is_uniform() {
        let m = spaces::star_tree(4);
        let boundary = boundary_quasimetric(&m, "c").unwrap();
        // Distinct leaves have Gromov product 0 at the center → entries 1.
        let b = &boundary.space.matrix;
        assert_eq!(b.n(), 4);
        for i in 0..4 {
            for j in i + 1..4 {
                assert_eq!(b.get(i, j), 1.0);
            }
        }
        assert_eq!(boundary.space.k, 1.0);
        assert_eq!(boundary.delta, 0.0);
    }

    #[test]
    fn boundary_constant_stays_under_e_to_delta() {
        let mut state = 0xda3e39cb94b95bdbu64;
        let mut next = move || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            1.0 + (state >> 11) as f64 / (1u64 << 53) as f64
        };
        for n in [5usize, 8, 12] {
            let labels: Vec<String> = (0..n).map(|i| format!("p{i}")).collect();
            let m = DistanceMatrix::from_fn(labels, |_, _| next()).unwrap();
            let o = m.label(0).to_string();
            let boundary = boundary_quasimetric(&m, &o).unwrap();
            assert!(
                boundary.space.k <= boundary.e_delta + 1e-9,
                "K = {} must stay under e^δ = {}",
                boundary.space.k,
                boundary.e_delta
            );
        }
    }

    #[test]
    fn boundary_kernels_at_two_basepoints_are_mobius_equivalent() {
        // The o-terms cancel in every cross ratio of e^{−(·|·)_o}, so the
        // kernels at two basepoints agree on all quadruples of shared points.
        let mut state = 0x853c49e6748fea9bu64;
        let mut next = move || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            1.0 + (state >> 11) as f64 / (1u64 << 53) as f64
        };
        let labels: Vec<String> = (0..8).map(|i| format!("p{i}")).collect();
        let m = DistanceMatrix::from_fn(labels, |_, _| next()).unwrap();
        let at_first = boundary_quasimetric(&m, "p0").unwrap();
        let at_second = boundary_quasimetric(&m, "p1").unwrap();
        // Compare on the six points that survive both puncturings.
        let shared: Vec<String> = (2..8).map(|i| format!("p{i}")).collect();
        let sub = |b: &BoundaryQuasiMetric| {
            DistanceMatrix::from_fn(shared.clone(), |i, j| {
                let bi = b.space.matrix.index_of(&shared[i]).unwrap();
                let bj = b.space.matrix.index_of(&shared[j]).unwrap();
                b.space.matrix.get(bi, bj)
            })
            .unwrap()
        };
        let report = mobius_equivalent(&sub(&at_first), &sub(&at_second), 1e-9).unwrap();
        assert!(report.equivalent, "defect {}", report.max_relative_defect);
    }

    #[test]
    fn basepoint_change_is_algebraically_exact() {
        let mut state = 0x9e3779b97f4a7c15u64;
        let mut next = move || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            1.0 + (state >> 11) as f64 / (1u64 << 53) as f64
        };
        let labels: Vec<String> = (0..10).map(|i| format!("p{i}")).collect();
        let m = DistanceMatrix::from_fn(labels, |_, _| next()).unwrap();
        let defect = basepoint_change_max_defect(&m, "p0", "p7").unwrap();
        assert!(defect <= EXACT_TOL, "defect {defect}");
        assert_eq!(basepoint_change_max_defect(&spaces::four_cycle(), "v0", "v2").unwrap(), 0.0);
    }

    #[test]
    fn deficiency_picks_the_two_smallest() {
        assert_eq!(triple_deficiency(3.0, 1.0, 2.0), 1.0);
        assert_eq!(triple_deficiency(5.0, 5.0, 5.0), 0.0);
        assert_eq!(triple_deficiency(0.0, 10.0, 0.5), 0.5);
    }
}
