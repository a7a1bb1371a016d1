//! Labeled symmetric distance matrices and the two weakest structure checks
//! we run on them: the triangle inequality and the quasi-metric constant.
//!
//! A [`DistanceMatrix`] is only a *symmetric positive kernel*: construction
//! validates symmetry, zero diagonal, finiteness and positivity off the
//! diagonal, but deliberately not the triangle inequality. Whether the data
//! is a metric, a quasi-metric with small constant, or Ptolemaic is exactly
//! what the rest of the crate measures.

use std::fmt::Write as _;
use std::path::Path;

use serde::ser::SerializeStruct;
use serde::{Deserialize, Serialize, Serializer};

use crate::error::{Error, Result};

/// Symmetric matrix of pairwise distances over a labeled point set.
///
/// Invariants established at construction:
/// * square, at least one point, labels unique;
/// * zero diagonal, exact symmetry, finite entries;
/// * strictly positive off-diagonal entries (points are distinct).
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceMatrix {
    labels: Vec<String>,
    n: usize,
    /// Row-major `n * n` storage.
    d: Vec<f64>,
}

impl DistanceMatrix {
    pub fn new(labels: Vec<String>, rows: Vec<Vec<f64>>) -> Result<Self> {
        let n = labels.len();
        if n == 0 {
            return Err(Error::Empty);
        }
        if rows.len() != n || rows.iter().any(|r| r.len() != n) {
            return Err(Error::BadShape { rows: rows.len(), labels: n });
        }
        for i in 0..n {
            if labels[i + 1..].contains(&labels[i]) {
                return Err(Error::DuplicateLabel(labels[i].clone()));
            }
        }
        let mut d = Vec::with_capacity(n * n);
        for row in &rows {
            d.extend_from_slice(row);
        }
        let m = Self { labels, n, d };
        m.validate()?;
        Ok(m)
    }

    /// Builds the matrix from a pairwise distance function, evaluated once
    /// per unordered pair so the result is symmetric by construction.
    pub fn from_fn(labels: Vec<String>, mut dist: impl FnMut(usize, usize) -> f64) -> Result<Self> {
        let n = labels.len();
        if n == 0 {
            return Err(Error::Empty);
        }
        let mut rows = vec![vec![0.0; n]; n];
        for i in 0..n {
            for j in i + 1..n {
                let v = dist(i, j);
                rows[i][j] = v;
                rows[j][i] = v;
            }
        }
        Self::new(labels, rows)
    }

    fn validate(&self) -> Result<()> {
        let n = self.n;
        for i in 0..n {
            let dii = self.get(i, i);
            if dii != 0.0 {
                return Err(Error::NonzeroDiagonal {
                    label: self.labels[i].clone(),
                    value: dii,
                });
            }
            for j in i + 1..n {
                let v = self.get(i, j);
                if !v.is_finite() {
                    return Err(Error::NonFiniteEntry {
                        i: self.labels[i].clone(),
                        j: self.labels[j].clone(),
                    });
                }
                if v != self.get(j, i) {
                    return Err(Error::NotSymmetric {
                        i: self.labels[i].clone(),
                        j: self.labels[j].clone(),
                        a: v,
                        b: self.get(j, i),
                    });
                }
                if v <= 0.0 {
                    return Err(Error::NonPositiveEntry {
                        i: self.labels[i].clone(),
                        j: self.labels[j].clone(),
                        value: v,
                    });
                }
            }
        }
        Ok(())
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.d[i * self.n + j]
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, i: usize) -> &str {
        &self.labels[i]
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    pub fn require_index(&self, label: &str) -> Result<usize> {
        self.index_of(label).ok_or_else(|| Error::LabelNotFound(label.to_string()))
    }

    /// Same point set, distances multiplied by `factor > 0`.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        if !(factor > 0.0) || !factor.is_finite() {
            return Err(Error::InvalidParameter(format!("scale factor must be positive, got {factor}")));
        }
        Self::from_fn(self.labels.clone(), |i, j| self.get(i, j) * factor)
    }

    /// Same distances under new labels (order preserved).
    pub fn relabeled(&self, labels: Vec<String>) -> Result<Self> {
        if labels.len() != self.n {
            return Err(Error::BadShape { rows: self.n, labels: labels.len() });
        }
        Self::from_fn(labels, |i, j| self.get(i, j))
    }

    /// Entrywise equality within an absolute tolerance; labels must agree.
    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        self.labels == other.labels
            && self
                .d
                .iter()
                .zip(&other.d)
                .all(|(a, b)| (a - b).abs() <= tol)
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        (0..self.n).map(|i| self.d[i * self.n..(i + 1) * self.n].to_vec()).collect()
    }

    // ---- file formats -----------------------------------------------------

    pub fn from_json_str(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }

    pub fn to_json_pretty(&self) -> String {
        serde_json::to_string_pretty(self).expect("matrix serializes")
    }

    /// CSV form: a header row with the labels, then the `n x n` entries.
    pub fn from_csv_str(s: &str) -> Result<Self> {
        let mut reader = csv::ReaderBuilder::new()
            .has_headers(true)
            .trim(csv::Trim::All)
            .from_reader(s.as_bytes());
        let labels: Vec<String> = reader.headers()?.iter().map(str::to_string).collect();
        let mut rows = Vec::new();
        for record in reader.records() {
            let record = record?;
            let row: std::result::Result<Vec<f64>, _> =
                record.iter().map(|f| f.parse::<f64>()).collect();
            rows.push(row.map_err(|e| Error::InvalidParameter(format!("bad CSV number: {e}")))?);
        }
        Self::new(labels, rows)
    }

    pub fn to_csv_string(&self) -> String {
        let mut out = String::new();
        out.push_str(&self.labels.join(","));
        out.push('\n');
        for i in 0..self.n {
            for j in 0..self.n {
                if j > 0 {
                    out.push(',');
                }
                write!(out, "{}", self.get(i, j)).unwrap();
            }
            out.push('\n');
        }
        out
    }

    /// Reads a matrix from a `.json` or `.csv` file, dispatching on extension.
    pub fn read_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        match path.extension().and_then(|e| e.to_str()) {
            Some("csv") => Self::from_csv_str(&text),
            _ => Self::from_json_str(&text),
        }
    }

    pub fn write_path(&self, path: &Path) -> Result<()> {
        let text = match path.extension().and_then(|e| e.to_str()) {
            Some("csv") => self.to_csv_string(),
            _ => self.to_json_pretty(),
        };
        std::fs::write(path, text)?;
        Ok(())
    }
}

impl Serialize for DistanceMatrix {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = serializer.serialize_struct("DistanceMatrix", 2)?;
        st.serialize_field("labels", &self.labels)?;
        st.serialize_field("d", &self.rows())?;
        st.end()
    }
}

#[derive(Deserialize)]
struct RawMatrix {
    labels: Vec<String>,
    d: Vec<Vec<f64>>,
}

impl<'de> Deserialize<'de> for DistanceMatrix {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        let raw = RawMatrix::deserialize(de)?;
        DistanceMatrix::new(raw.labels, raw.d).map_err(serde::de::Error::custom)
    }
}

// ---- triangle inequality ---------------------------------------------------

/// One failed triangle: `d(i, k) > d(i, j) + d(j, k) + tol` reported as the
/// ordered triple `(i, j, k)` with the two sides of the comparison.
#[derive(Debug, Clone, Serialize)]
pub struct TriangleViolation {
    pub triple: [String; 3],
    pub lhs: f64,
    pub rhs: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct MetricAxiomsReport {
    pub is_metric: bool,
    pub violations: Vec<TriangleViolation>,
    /// Minimum of `d(i,j) + d(j,k) - d(i,k)` over all triples; negative when
    /// the triangle inequality fails somewhere, and a sharpness measure
    /// otherwise. `INFINITY` for fewer than three points.
    pub min_margin: f64,
}

/// Scans every triple for the triangle inequality. Symmetry, positivity and
/// the zero diagonal are already enforced by [`DistanceMatrix`] itself, so
/// this is the only axiom left to check.
pub fn check_metric_axioms(m: &DistanceMatrix, tol: f64) -> MetricAxiomsReport {
    let n = m.n();
    let mut violations = Vec::new();
    let mut min_margin = f64::INFINITY;
    for i in 0..n {
        for k in i + 1..n {
            let dik = m.get(i, k);
            for j in 0..n {
                if j == i || j == k {
                    continue;
                }
                let rhs = m.get(i, j) + m.get(j, k);
                let margin = rhs - dik;
                if margin < min_margin {
                    min_margin = margin;
                }
                if dik > rhs + tol {
                    violations.push(TriangleViolation {
                        triple: [
                            m.label(i).to_string(),
                            m.label(j).to_string(),
                            m.label(k).to_string(),
                        ],
                        lhs: dik,
                        rhs,
                    });
                }
            }
        }
    }
    MetricAxiomsReport { is_metric: violations.is_empty(), violations, min_margin }
}

/// Smallest `K` with `d(x, z) <= K * max(d(x, y), d(y, z))` for all triples.
///
/// Always `>= 1` for two or more points, and `<= 2` whenever the input is a
/// metric (the triangle inequality gives `d(x, z) <= 2 max` directly). A
/// value above 2 certifies genuinely quasi-metric behavior; powers `d^s` of
/// a metric reach `K = 2^s`.
pub fn quasi_metric_constant(m: &DistanceMatrix) -> f64 {
    let n = m.n();
    if n < 2 {
        return 1.0;
    }
    let mut k = 1.0f64;
    for i in 0..n {
        for z in i + 1..n {
            let diz = m.get(i, z);
            for j in 0..n {
                if j == i || j == z {
                    continue;
                }
                let denom = m.get(i, j).max(m.get(j, z));
                let ratio = diz / denom;
                if ratio > k {
                    k = ratio;
                }
            }
        }
    }
    k
}

/// A symmetric positive kernel together with its minimal quasi-metric
/// constant, computed at construction.
#[derive(Debug, Clone, Serialize)]
pub struct QuasiMetricSpace {
    pub matrix: DistanceMatrix,
    pub k: f64,
}

impl QuasiMetricSpace {
    pub fn new(matrix: DistanceMatrix) -> Self {
        let k = quasi_metric_constant(&matrix);
        Self { matrix, k }
    }
}
