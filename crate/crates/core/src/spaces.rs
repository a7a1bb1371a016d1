//! Small stock of concrete finite spaces used throughout tests, experiments
//! and the CLI example generators.

use crate::error::Result;
use crate::matrix::DistanceMatrix;

/// Integer segment `{0, ..., n}` with the path metric `|i - j|`.
pub fn path_segment(n: usize) -> DistanceMatrix {
    assert!(n >= 1);
    let labels = (0..=n).map(|i| i.to_string()).collect();
    DistanceMatrix::from_fn(labels, |i, j| (i as f64 - j as f64).abs()).expect("path metric")
}

/// Integer segment `{0, ..., n}` with `d(i, j) = log(1 + |i - j|)`.
///
/// A classical space whose powers `d^s` all stay comparable to their chain
/// metrics: chains of unit steps cost `s_len * log(2)` while the direct
/// distance only grows logarithmically, so no power of `d` degenerates.
pub fn kovalev_segment(n: usize) -> DistanceMatrix {
    assert!(n >= 1);
    let labels = (0..=n).map(|i| i.to_string()).collect();
    DistanceMatrix::from_fn(labels, |i, j| (1.0 + (i as f64 - j as f64).abs()).ln())
        .expect("log segment metric")
}

/// Star tree: a center `c` joined to `k` leaves by unit edges.
pub fn star_tree(k: usize) -> DistanceMatrix {
    assert!(k >= 2);
    let mut labels = vec!["c".to_string()];
    labels.extend((0..k).map(|i| format!("l{i}")));
    DistanceMatrix::from_fn(labels, |i, j| if i == 0 || j == 0 { 1.0 } else { 2.0 })
        .expect("star tree metric")
}

/// Two-level ultrametric: two blocks of two points, distance 1 inside a
/// block and 2 across. Every power of it is again an ultrametric.
pub fn two_block_ultrametric() -> DistanceMatrix {
    let labels = ["a0", "a1", "b0", "b1"].map(String::from).to_vec();
    DistanceMatrix::from_fn(labels, |i, j| if i / 2 == j / 2 { 1.0 } else { 2.0 })
        .expect("ultrametric")
}

/// Graph metric of the 4-cycle: adjacent vertices at distance 1, opposite
/// at 2. The standard small example that is a metric but not Ptolemaic.
pub fn four_cycle() -> DistanceMatrix {
    let labels = ["v0", "v1", "v2", "v3"].map(String::from).to_vec();
    DistanceMatrix::from_fn(labels, |i, j| {
        let k = (i as i64 - j as i64).rem_euclid(4);
        if k == 1 || k == 3 {
            1.0
        } else {
            2.0
        }
    })
    .expect("four cycle metric")
}

/// Euclidean distance matrix of explicit points (all dimensions equal).
pub fn euclidean_points(labels: Vec<String>, points: &[Vec<f64>]) -> Result<DistanceMatrix> {
    DistanceMatrix::from_fn(labels, |i, j| {
        points[i]
            .iter()
            .zip(&points[j])
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt()
    })
}

/// l1 distance matrix of explicit points.
pub fn l1_points(labels: Vec<String>, points: &[Vec<f64>]) -> Result<DistanceMatrix> {
    DistanceMatrix::from_fn(labels, |i, j| {
        points[i].iter().zip(&points[j]).map(|(a, b)| (a - b).abs()).sum()
    })
}
