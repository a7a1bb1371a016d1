//! The Ptolemy inequality on finite spaces, and the Möbius-geometry
//! operations built on the same pairing products: cross ratios, Möbius
//! equivalence, snowflaking, involution, and the four-point normal form.
//!
//! For four points `{x1, x2, x3, x4}` the three ways of splitting them into
//! two pairs give three products of distances. The (unordered) Ptolemy
//! inequality asks that the largest product never exceed the sum of the
//! other two; its `slack = sum of the smaller two - largest` is our basic
//! observable. Euclidean spaces satisfy it, square roots of metrics satisfy
//! it, and graph metrics as small as the 4-cycle already violate it.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::matrix::DistanceMatrix;
use crate::tolerances;

/// Above this point count the quadruple scan fans out over rayon. The
/// reduction is a min with a lexicographic tie-break computed per first
/// index and folded in index order, so results are identical for any
/// thread count.
const PAR_THRESHOLD: usize = 24;

#[derive(Debug, Clone, Copy)]
pub struct PtolemyOptions {
    /// Slack down to `-violation_tol` still passes.
    pub violation_tol: f64,
    /// `|slack| <= equality_tol` is recorded as an equality quadruple.
    pub equality_tol: f64,
    /// Cap on the recorded equality list; the total count is reported
    /// separately so large highly-symmetric spaces stay cheap.
    pub max_equalities: usize,
}

impl Default for PtolemyOptions {
    fn default() -> Self {
        Self {
            violation_tol: tolerances::VIOLATION_TOL,
            equality_tol: tolerances::EQUALITY_TOL,
            max_equalities: 4096,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct PtolemyReport {
    pub satisfied: bool,
    /// `min` over quadruples of (sum of the two smaller pairing products
    /// minus the largest); `INFINITY` when there are fewer than four points.
    pub worst_slack: f64,
    /// Quadruple attaining `worst_slack`, in label order.
    pub worst_quadruple: Option<[String; 4]>,
    /// Quadruples with `|slack| <= equality_tol`, up to the configured cap.
    pub equality_quadruples: Vec<[String; 4]>,
    /// Total number of equality quadruples (may exceed the recorded list).
    pub equality_count: usize,
}

#[inline]
fn quadruple_slack(m: &DistanceMatrix, i: usize, j: usize, k: usize, l: usize) -> f64 {
    let p = m.get(i, j) * m.get(k, l);
    let q = m.get(i, k) * m.get(j, l);
    let r = m.get(i, l) * m.get(j, k);
    p + q + r - 2.0 * p.max(q).max(r)
}

struct ScanPart {
    worst: f64,
    arg: Option<[usize; 4]>,
    equalities: Vec<[usize; 4]>,
    equality_count: usize,
}

fn scan_first_index(m: &DistanceMatrix, i: usize, opts: &PtolemyOptions) -> ScanPart {
    let n = m.n();
    let mut part = ScanPart { worst: f64::INFINITY, arg: None, equalities: Vec::new(), equality_count: 0 };
    for j in i + 1..n {
        for k in j + 1..n {
            for l in k + 1..n {
                let slack = quadruple_slack(m, i, j, k, l);
                if slack < part.worst {
                    part.worst = slack;
                    part.arg = Some([i, j, k, l]);
                }
                if slack.abs() <= opts.equality_tol {
                    part.equality_count += 1;
                    if part.equalities.len() < opts.max_equalities {
                        part.equalities.push([i, j, k, l]);
                    }
                }
            }
        }
    }
    part
}

pub fn ptolemy_check_with(m: &DistanceMatrix, opts: &PtolemyOptions) -> PtolemyReport {
    let n = m.n();
    if n < 4 {
        return PtolemyReport {
            satisfied: true,
            worst_slack: f64::INFINITY,
            worst_quadruple: None,
            equality_quadruples: Vec::new(),
            equality_count: 0,
        };
    }

    let parts: Vec<ScanPart> = if n >= PAR_THRESHOLD {
        (0..n - 3).into_par_iter().map(|i| scan_first_index(m, i, opts)).collect()
    } else {
        (0..n - 3).map(|i| scan_first_index(m, i, opts)).collect()
    };

    let mut worst = f64::INFINITY;
    let mut arg = None;
    let mut equalities = Vec::new();
    let mut equality_count = 0;
    for part in parts {
        if part.worst < worst {
            worst = part.worst;
            arg = part.arg;
        }
        equality_count += part.equality_count;
        for q in part.equalities {
            if equalities.len() < opts.max_equalities {
                equalities.push(q);
            }
        }
    }

    let to_labels =
        |q: [usize; 4]| q.map(|idx| m.label(idx).to_string());
    PtolemyReport {
        satisfied: worst >= -opts.violation_tol,
        worst_slack: worst,
        worst_quadruple: arg.map(to_labels),
        equality_quadruples: equalities.into_iter().map(to_labels).collect(),
        equality_count,
    }
}

/// Scans all unordered quadruples for the Ptolemy inequality.
pub fn ptolemy_check(m: &DistanceMatrix, violation_tol: f64) -> PtolemyReport {
    ptolemy_check_with(m, &PtolemyOptions { violation_tol, ..Default::default() })
}

// ---- cross ratios and Möbius equivalence ------------------------------------

/// `d(x1,x2) d(x3,x4) / (d(x1,x3) d(x2,x4))` for four distinct labels.
pub fn cross_ratio(m: &DistanceMatrix, quadruple: [&str; 4]) -> Result<f64> {
    let idx: [usize; 4] = [
        m.require_index(quadruple[0])?,
        m.require_index(quadruple[1])?,
        m.require_index(quadruple[2])?,
        m.require_index(quadruple[3])?,
    ];
    for a in 0..4 {
        for b in a + 1..4 {
            if idx[a] == idx[b] {
                return Err(Error::InvalidParameter(format!(
                    "cross ratio needs four distinct points, {} repeats",
                    quadruple[a]
                )));
            }
        }
    }
    let num = m.get(idx[0], idx[1]) * m.get(idx[2], idx[3]);
    let den = m.get(idx[0], idx[2]) * m.get(idx[1], idx[3]);
    if den == 0.0 {
        return Err(Error::InvalidParameter("zero denominator in cross ratio".into()));
    }
    Ok(num / den)
}

#[derive(Debug, Clone, Serialize)]
pub struct MobiusWitness {
    /// Ordered quadruple `(x1, x2, x3, x4)` whose cross ratio differs.
    pub quadruple: [String; 4],
    pub cross_ratio_left: f64,
    pub cross_ratio_right: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct MobiusReport {
    pub equivalent: bool,
    pub max_relative_defect: f64,
    /// First quadruple (in scan order) whose cross ratios disagree.
    pub witness: Option<MobiusWitness>,
}

/// Tests whether two kernels over the same label set have identical cross
/// ratios, up to a relative tolerance.
///
/// Per unordered quadruple the three pairing products generate all 24
/// ordered cross ratios as mutual quotients, so comparing the three
/// quotients `p/q`, `p/r`, `q/r` covers everything.
pub fn mobius_equivalent(a: &DistanceMatrix, b: &DistanceMatrix, tol: f64) -> Result<MobiusReport> {
    if a.n() != b.n() {
        return Err(Error::LabelSetMismatch);
    }
    // Map a-indices to b-indices by label so point order does not matter.
    let perm: Vec<usize> = a
        .labels()
        .iter()
        .map(|l| b.index_of(l).ok_or(Error::LabelSetMismatch))
        .collect::<Result<_>>()?;

    let n = a.n();
    let mut max_defect = 0.0f64;
    let mut witness: Option<MobiusWitness> = None;
    for i in 0..n {
        for j in i + 1..n {
            for k in j + 1..n {
                for l in k + 1..n {
                    let pa = a.get(i, j) * a.get(k, l);
                    let qa = a.get(i, k) * a.get(j, l);
                    let ra = a.get(i, l) * a.get(j, k);
                    let pb = b.get(perm[i], perm[j]) * b.get(perm[k], perm[l]);
                    let qb = b.get(perm[i], perm[k]) * b.get(perm[j], perm[l]);
                    let rb = b.get(perm[i], perm[l]) * b.get(perm[j], perm[k]);
                    // Ordered quadruples realizing each quotient as a cross ratio.
                    let checks = [
                        (pa / qa, pb / qb, [i, j, k, l]),
                        (pa / ra, pb / rb, [i, j, l, k]),
                        (qa / ra, qb / rb, [i, k, l, j]),
                    ];
                    for (left, right, quad) in checks {
                        let defect = (left - right).abs() / left.abs().max(right.abs());
                        if defect > max_defect {
                            max_defect = defect;
                        }
                        if defect > tol && witness.is_none() {
                            witness = Some(MobiusWitness {
                                quadruple: quad.map(|x| a.label(x).to_string()),
                                cross_ratio_left: left,
                                cross_ratio_right: right,
                            });
                        }
                    }
                }
            }
        }
    }
    Ok(MobiusReport { equivalent: max_defect <= tol, max_relative_defect: max_defect, witness })
}

// ---- metric transforms -------------------------------------------------------

/// Entrywise power `d^q`, `q > 0`.
///
/// For `q <= 1` the result of a metric is again a metric; for `q <= 1/2` it
/// is moreover Ptolemaic regardless of the input's own Ptolemy status. For
/// `q > 1` the output is in general only a quasi-metric, which is exactly
/// how the metrization module consumes it.
pub fn snowflake(m: &DistanceMatrix, q: f64) -> Result<DistanceMatrix> {
    if !(q > 0.0) || !q.is_finite() {
        return Err(Error::InvalidParameter(format!("snowflake exponent must be positive, got {q}")));
    }
    DistanceMatrix::from_fn(m.labels().to_vec(), |i, j| m.get(i, j).powf(q))
}

/// Involution (inversion) of the space at one of its points:
/// `d_z(x, y) = d(x, y) / (d(x, z) d(y, z))` on the remaining points.
///
/// `d_z` is a metric for every choice of `z` exactly when `d` is Ptolemaic —
/// the three triangle inequalities of a triple under `d_z` are the three
/// Ptolemy inequalities of the quadruple (triple plus `z`) under `d`.
pub fn involute(m: &DistanceMatrix, z: &str) -> Result<DistanceMatrix> {
    if m.n() < 3 {
        return Err(Error::InvalidParameter(
            "involution needs at least three points (two besides the center)".into(),
        ));
    }
    let zi = m.require_index(z)?;
    let keep: Vec<usize> = (0..m.n()).filter(|&i| i != zi).collect();
    let labels = keep.iter().map(|&i| m.label(i).to_string()).collect();
    DistanceMatrix::from_fn(labels, |a, b| {
        let (i, j) = (keep[a], keep[b]);
        m.get(i, j) / (m.get(i, zi) * m.get(j, zi))
    })
}

// ---- four-point normal form ---------------------------------------------------

/// Normal form of a four-point space under Möbius equivalence.
///
/// Pair the points three ways, take the geometric mean of each pairing,
/// renumber so the largest mean sits on the `(x1 x3)(x2 x4)` pairing, and
/// rescale it to 1. The result is the matrix with opposite sides `a`, `a`
/// and `b`, `b` and unit diagonals; it has the same cross ratios as the
/// input, and the input satisfies the Ptolemy inequality iff `a^2 + b^2 >= 1`.
#[derive(Debug, Clone, Serialize)]
pub struct CanonicalFourPoint {
    pub a: f64,
    pub b: f64,
    /// Reordering of the input points realizing the normal form.
    pub permutation: [usize; 4],
    pub matrix: DistanceMatrix,
}

pub fn canonical_four_point(m: &DistanceMatrix) -> Result<CanonicalFourPoint> {
    if m.n() != 4 {
        return Err(Error::WrongPointCount { expected: 4, got: m.n() });
    }
    let side_a = (m.get(0, 1) * m.get(2, 3)).sqrt();
    let side_b = (m.get(1, 2) * m.get(3, 0)).sqrt();
    let diag_c = (m.get(0, 2) * m.get(1, 3)).sqrt();

    // Move the largest pairing mean onto the diagonal slot (ties keep the
    // input's own diagonal pairing, then prefer the (01)(23) pairing).
    let perm: [usize; 4] = if diag_c >= side_a && diag_c >= side_b {
        [0, 1, 2, 3]
    } else if side_a >= side_b {
        [0, 2, 1, 3]
    } else {
        [1, 0, 2, 3]
    };

    let g = |x: usize, y: usize| m.get(perm[x], perm[y]);
    let a_mean = (g(0, 1) * g(2, 3)).sqrt();
    let b_mean = (g(1, 2) * g(3, 0)).sqrt();
    let c_mean = (g(0, 2) * g(1, 3)).sqrt();
    let a = a_mean / c_mean;
    let b = b_mean / c_mean;

    let labels: Vec<String> = perm.iter().map(|&i| m.label(i).to_string()).collect();
    let matrix = DistanceMatrix::from_fn(labels, |x, y| {
        let (x, y) = (x.min(y), x.max(y));
        match (x, y) {
            (0, 1) | (2, 3) => a,
            (1, 2) | (0, 3) => b,
            _ => 1.0,
        }
    })?;
    Ok(CanonicalFourPoint { a, b, permutation: perm, matrix })
}
