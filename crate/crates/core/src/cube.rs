//! Hamming-cube slices and the short-diagonal theorem.
//!
//! The slice `S(n, m)` is the set of 0/1 vectors of length `n` with exactly
//! `m` ones. Multiindices `k₁ < … < k_{2m}` embed the `m`-cube `{0,1}^m`
//! into a slice as a factor-2 homothety, and a pigeonhole recursion over a
//! schedule of slice sizes `n₁ = 2, n_ℓ = n_{ℓ−1} + p_ℓ` shows: any
//! Ptolemaic image of `S(n_m, m)` whose Hamming-distance-2 pairs are short
//! (≤ b) contains an embedded `m`-cube with a diagonal of length at most
//! `√m·b`. Played against a snowflake target whose long pairs cannot be
//! that short for exponents above ½, the theorem turns into a concrete
//! obstruction experiment.

use std::collections::HashMap;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::embed::ball_snowflake_sq_dist;
use crate::error::{Error, Result};
use crate::matrix::DistanceMatrix;
use crate::tolerances;

/// Largest slice dimension representable in the bitmask encoding.
pub const MAX_N: usize = 63;

// ---- bit indices and slices ------------------------------------------------------

/// A 0/1 vector of fixed length `n ≤ 63`, stored as a bitmask with
/// coordinate `k` (1-based) at bit `k − 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BitIndex {
    pub mask: u64,
    pub n: usize,
}

impl BitIndex {
    pub fn new(mask: u64, n: usize) -> Result<Self> {
        if n == 0 || n > MAX_N {
            return Err(Error::InvalidParameter(format!(
                "bit vectors must have length 1..={MAX_N}, got {n}"
            )));
        }
        if mask >> n != 0 {
            return Err(Error::InvalidParameter(format!(
                "mask {mask:#b} has bits beyond length {n}"
            )));
        }
        Ok(Self { mask, n })
    }

    /// Parses a coordinate string like "10010" (coordinate 1 first).
    pub fn parse(label: &str) -> Result<Self> {
        let n = label.len();
        let mut mask = 0u64;
        for (pos, ch) in label.chars().enumerate() {
            match ch {
                '1' => mask |= 1 << pos,
                '0' => {}
                other => {
                    return Err(Error::InvalidParameter(format!(
                        "bit labels contain only 0 and 1, found {other:?}"
                    )))
                }
            }
        }
        Self::new(mask, n)
    }

    /// Coordinate string, coordinate 1 leftmost.
    pub fn label(&self) -> String {
        (0..self.n).map(|k| if self.mask >> k & 1 == 1 { '1' } else { '0' }).collect()
    }

    pub fn ones(&self) -> u32 {
        self.mask.count_ones()
    }
}

/// Number of coordinates in which the two vectors differ.
pub fn hamming_distance(a: &BitIndex, b: &BitIndex) -> Result<u32> {
    if a.n != b.n {
        return Err(Error::InvalidParameter(format!(
            "length mismatch: {} vs {}",
            a.n, b.n
        )));
    }
    Ok((a.mask ^ b.mask).count_ones())
}

/// All masks of length `n` with exactly `m` ones, in ascending numeric
/// order (Gosper's next-combination step).
pub fn slice_elements(n: usize, m: usize) -> Result<Vec<BitIndex>> {
    if n == 0 || n > MAX_N || m == 0 || m > n {
        return Err(Error::InvalidParameter(format!(
            "slice needs 1 <= m <= n <= {MAX_N}, got n = {n}, m = {m}"
        )));
    }
    let mut out = Vec::new();
    let mut v: u64 = (1 << m) - 1;
    let limit: u64 = 1 << n;
    while v < limit {
        out.push(BitIndex { mask: v, n });
        let t = v | (v - 1);
        let next = (t + 1) | (((!t & (t + 1)) - 1) >> (v.trailing_zeros() + 1));
        if next <= v {
            break; // all-ones overflow guard for m = n
        }
        v = next;
    }
    Ok(out)
}

/// `I ↦ I/m`: slice vertices land on the unit sphere of ℓ¹, and pairwise
/// ℓ¹ distances become Hamming distances over `m`.
pub fn scaling_map(i: &BitIndex, m: usize) -> Vec<f64> {
    let value = 1.0 / m as f64;
    (0..i.n).map(|k| if i.mask >> k & 1 == 1 { value } else { 0.0 }).collect()
}

// ---- multiindices and cube embeddings ---------------------------------------------

/// Strictly increasing coordinates `k₁ < … < k_{2m}` (1-based), pairing
/// consecutive entries into the `m` blocks of a cube embedding.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MultiIndex {
    pub coords: Vec<u32>,
}

impl MultiIndex {
    pub fn new(coords: Vec<u32>, n: usize, m: usize) -> Result<Self> {
        if coords.len() != 2 * m {
            return Err(Error::InvalidParameter(format!(
                "a multiindex for m = {m} needs {} coordinates, got {}",
                2 * m,
                coords.len()
            )));
        }
        let increasing = coords.windows(2).all(|w| w[0] < w[1]);
        let in_range = coords.iter().all(|&k| k >= 1 && k as usize <= n);
        if !increasing || !in_range {
            return Err(Error::InvalidParameter(format!(
                "multiindex coordinates must be strictly increasing within 1..={n}: {coords:?}"
            )));
        }
        Ok(Self { coords })
    }
}

/// Embeds the cube vertex `v ∈ {0,1}^m` (bit `j` = block `j + 1`): block
/// `j` contributes coordinate `k_{2j+1}` when the bit is 0 and `k_{2j+2}`
/// when it is 1. The image has exactly `m` ones, and Hamming distances
/// double.
pub fn phi(k: &MultiIndex, v: u64, n: usize) -> BitIndex {
    let m = k.coords.len() / 2;
    debug_assert!(v >> m == 0, "cube vertex out of range");
    let mut mask = 0u64;
    for block in 0..m {
        let coord = if v >> block & 1 == 0 {
            k.coords[2 * block]
        } else {
            k.coords[2 * block + 1]
        };
        mask |= 1 << (coord - 1);
    }
    BitIndex { mask, n }
}

// ---- the slice-size schedule -------------------------------------------------------

fn binomial(n: &BigUint, k: u64) -> BigUint {
    let mut result = BigUint::one();
    let mut n_term = n.clone();
    let one = BigUint::one();
    for i in 1..=k {
        result = result * &n_term / BigUint::from(i);
        n_term = &n_term - &one;
        // (n choose k) computed as a running product of exact divisions.
    }
    result
}

/// The slice sizes `n₁, …, n_m` of the pigeonhole recursion: `n₁ = 2` and
/// `n_ℓ = n_{ℓ−1} + 2^{ℓ−1}·C(n_{ℓ−1}, 2ℓ−2) + 1`. Grows explosively —
/// `[2, 5, 26, 1841867, …]` — hence exact big-integer arithmetic.
pub fn n_schedule(m: u32) -> Result<Vec<BigUint>> {
    if m == 0 {
        return Err(Error::InvalidParameter("the schedule starts at m = 1".into()));
    }
    let mut schedule = vec![BigUint::from(2u32)];
    for level in 2..=m {
        let prev = schedule.last().expect("nonempty").clone();
        let classes = BigUint::from(2u32).pow(level - 1)
            * binomial(&prev, u64::from(2 * level - 2));
        schedule.push(prev + classes + BigUint::one());
    }
    Ok(schedule)
}

/// The scheduled `n` for level `m`, required to fit the bitmask encoding.
fn feasible_schedule_n(m: u32) -> Result<usize> {
    let schedule = n_schedule(m)?;
    let n = schedule.last().expect("nonempty");
    n.to_usize().filter(|&n| n <= MAX_N).ok_or_else(|| Error::InfeasibleSchedule {
        m,
        n: n.to_string(),
        limit: MAX_N,
    })
}

// ---- snowflake targets over slices -------------------------------------------------

/// Distance matrix of the slice pushed through the ½-snowflake of the ℓ¹
/// ball: vertex `I ↦ I/m`, entries `‖g(I/m) − g(J/m)‖`. With `n_cells` a
/// multiple of `2m` the points are grid-aligned and distances come out as
/// `√(d_H/m)` up to roundoff.
pub fn euclidean_snowflake_target(n: usize, m: usize, n_cells: usize) -> Result<DistanceMatrix> {
    if n_cells < 2 || n_cells % (2 * m) != 0 {
        return Err(Error::InvalidParameter(format!(
            "resolution must be a positive multiple of 2m = {}, got {n_cells}",
            2 * m
        )));
    }
    let elements = slice_elements(n, m)?;
    let points: Vec<Vec<f64>> = elements.iter().map(|i| scaling_map(i, m)).collect();
    let labels: Vec<String> = elements.iter().map(BitIndex::label).collect();
    DistanceMatrix::from_fn(labels, |i, j| {
        ball_snowflake_sq_dist(&points[i], &points[j], n_cells).sqrt()
    })
}

// ---- the short-diagonal search -----------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SearchStrategy {
    /// Replays the pigeonhole recursion level by level.
    Inductive,
    /// Scans every multiindex and every diagonal for the global minimum.
    Brute,
}

#[derive(Debug, Clone, Serialize)]
pub struct DiagonalWitness {
    pub multiindex: MultiIndex,
    /// Labels of the two slice vertices joined by the diagonal.
    pub endpoints: [String; 2],
    /// The complementary cube-vertex pair behind the endpoints.
    pub cube_vertices: [u64; 2],
    pub length: f64,
    /// The guarantee the witness is measured against: `√m·b`.
    pub bound: f64,
    pub strategy: SearchStrategy,
}

struct SearchContext<'a> {
    target: &'a DistanceMatrix,
    index_of: HashMap<u64, usize>,
    n: usize,
    schedule: Vec<usize>,
}

impl SearchContext<'_> {
    fn distance(&self, a: u64, b: u64) -> f64 {
        let i = self.index_of[&a];
        let j = self.index_of[&b];
        self.target.get(i, j)
    }
}

#[derive(Debug, Clone, PartialEq)]
struct LevelOutcome {
    k: Vec<u32>,
    /// Representative endpoint of the found diagonal: the cube vertex of
    /// `{0,1}^level` whose top bit is 0.
    diag_vertex: u64,
    length: f64,
}

/// One step of the recursion: solves level `level` inside the slice
/// obtained by fixing `suffix` (a mask of already-chosen unit coordinates
/// beyond position `n_level`).
fn solve_level(ctx: &SearchContext, level: usize, suffix: u64) -> Result<LevelOutcome> {
    if level == 1 {
        // Base case: coordinates 1, 2 are a Hamming-2 pair, so the 1-cube
        // diagonal is a side and the side bound applies to it directly.
        let k = vec![1u32, 2u32];
        let length = ctx.distance(0b01 | suffix, 0b10 | suffix);
        return Ok(LevelOutcome { k, diag_vertex: 0, length });
    }
    let n_prev = ctx.schedule[level - 2];
    let n_cur = ctx.schedule[level - 1];
    let p = n_cur - n_prev;

    // Canonical sub-slice embeddings: appending a single 1 at coordinate
    // n_prev + i embeds the level-(m−1) problem, and there are more of them
    // than (multiindex, representative) classes, forcing a collision.
    let outcomes: Vec<LevelOutcome> = (0..p)
        .map(|i| solve_level(ctx, level - 1, suffix | 1 << (n_prev + i)))
        .collect::<Result<_>>()?;

    let mut collision: Option<(usize, usize)> = None;
    'outer: for i1 in 0..p {
        for i2 in i1 + 1..p {
            if outcomes[i1].k == outcomes[i2].k
                && outcomes[i1].diag_vertex == outcomes[i2].diag_vertex
            {
                collision = Some((i1, i2));
                break 'outer;
            }
        }
    }
    let (i1, i2) = collision.expect("pigeonhole: more embeddings than outcome classes");
    let base = &outcomes[i1];

    let mut k = base.k.clone();
    k.push((n_prev + i1 + 1) as u32);
    k.push((n_prev + i2 + 1) as u32);
    let multiindex = MultiIndex { coords: k.clone() };

    // The four cube corners whose pairings drive the induction: the shared
    // representative diagonal (rep, co) on each sub-slice, crossed with the
    // two new coordinates.
    let rep = base.diag_vertex;
    let co = rep ^ ((1 << (level - 1)) - 1);
    let top = 1u64 << (level - 1);
    let a = phi(&multiindex, rep, ctx.n).mask | suffix;
    let b = phi(&multiindex, co, ctx.n).mask | suffix;
    let c = phi(&multiindex, rep | top, ctx.n).mask | suffix;
    let d = phi(&multiindex, co | top, ctx.n).mask | suffix;

    let diag_1 = ctx.distance(a, d);
    let diag_2 = ctx.distance(b, c);
    let sub_1 = ctx.distance(a, b); // the i1 copy of the sub-diagonal
    let sub_2 = ctx.distance(c, d); // the i2 copy
    let side_1 = ctx.distance(a, c);
    let side_2 = ctx.distance(b, d);

    // The qualifying bound needs the Ptolemy inequality on exactly this
    // quadruple; check it lazily so the search certifies its own output
    // even when the global precondition scan was sampled.
    let products = [diag_1 * diag_2, sub_1 * sub_2, side_1 * side_2];
    let slack = products[1] + products[2] - products[0];
    let scale = products.iter().cloned().fold(0.0f64, f64::max).max(1e-300);
    if slack < -tolerances::VIOLATION_TOL * scale {
        let labels = |mask: u64| BitIndex { mask, n: ctx.n }.label();
        return Err(Error::PtolemyViolation {
            quadruple: [labels(a), labels(b), labels(c), labels(d)],
            slack,
        });
    }

    // min(diag₁, diag₂)² ≤ diag₁·diag₂ ≤ sub₁·sub₂ + side₁·side₂
    //                                   ≤ (level−1)b² + b² = level·b².
    if diag_1 <= diag_2 {
        Ok(LevelOutcome { k, diag_vertex: rep, length: diag_1 })
    } else {
        // Representative normalization: endpoint with top bit clear.
        Ok(LevelOutcome { k, diag_vertex: co, length: diag_2 })
    }
}

fn brute_search(ctx: &SearchContext, m: usize) -> (MultiIndex, u64, f64) {
    let mut best: Option<(Vec<u32>, u64, f64)> = None;
    let mut coords: Vec<u32> = (1..=2 * m as u32).collect();
    loop {
        let multiindex = MultiIndex { coords: coords.clone() };
        for rep in 0..(1u64 << (m - 1)) {
            let co = rep ^ ((1 << m) - 1);
            let length =
                ctx.distance(phi(&multiindex, rep, ctx.n).mask, phi(&multiindex, co, ctx.n).mask);
            let better = match &best {
                None => true,
                Some((_, _, incumbent)) => length < *incumbent,
            };
            if better {
                best = Some((coords.clone(), rep, length));
            }
        }
        // Next strictly increasing 2m-tuple in 1..=n, lexicographically.
        let k = coords.len();
        let mut pos = k;
        for i in (0..k).rev() {
            if coords[i] < (ctx.n - (k - 1 - i)) as u32 {
                pos = i;
                break;
            }
        }
        if pos == k {
            break;
        }
        coords[pos] += 1;
        for i in pos + 1..k {
            coords[i] = coords[i - 1] + 1;
        }
    }
    let (coords, rep, length) = best.expect("at least one multiindex exists");
    (MultiIndex { coords }, rep, length)
}

/// Searches the target for an embedded `m`-cube whose diagonal beats the
/// theorem bound `√m·b`.
///
/// Preconditions checked up front: the slice labels must form a complete
/// `S(n, m)` with `n` at least the scheduled size, every Hamming-2 pair
/// must satisfy the side bound `b`, and the target must be Ptolemaic —
/// scanned exhaustively for up to 128 points and on a seeded quadruple
/// sample beyond that (the inductive recursion additionally re-checks the
/// quadruples it actually uses, so a sampled scan cannot silently break
/// the certificate).
pub fn find_short_diagonal(
    target: &DistanceMatrix,
    m: usize,
    b: f64,
    strategy: SearchStrategy,
) -> Result<DiagonalWitness> {
    if m == 0 {
        return Err(Error::InvalidParameter("the cube dimension m must be positive".into()));
    }
    if !(b > 0.0) || !b.is_finite() {
        return Err(Error::InvalidParameter(format!("side bound must be positive, got {b}")));
    }

    // Decode and validate the slice structure from the labels.
    let first = target.label(0);
    let n = first.len();
    let elements: Vec<BitIndex> =
        target.labels().iter().map(|l| BitIndex::parse(l)).collect::<Result<_>>()?;
    for e in &elements {
        if e.n != n || e.ones() as usize != m {
            return Err(Error::InvalidParameter(format!(
                "label {} is not a length-{n} vertex with {m} ones",
                e.label()
            )));
        }
    }
    let expected = binomial(&BigUint::from(n), m as u64);
    if BigUint::from(elements.len()) != expected {
        return Err(Error::InvalidParameter(format!(
            "expected the complete slice of {expected} vertices, got {}",
            elements.len()
        )));
    }
    let scheduled = feasible_schedule_n(m as u32)?;
    if n < scheduled {
        return Err(Error::InvalidParameter(format!(
            "the level-{m} search needs n >= {scheduled}, got {n}"
        )));
    }

    let index_of: HashMap<u64, usize> =
        elements.iter().enumerate().map(|(idx, e)| (e.mask, idx)).collect();

    // Side-bound precondition over all Hamming-2 pairs.
    let tol = tolerances::VIOLATION_TOL;
    for i in 0..elements.len() {
        for j in i + 1..elements.len() {
            if (elements[i].mask ^ elements[j].mask).count_ones() == 2 {
                let distance = target.get(i, j);
                if distance > b * (1.0 + tol) {
                    return Err(Error::SideBoundExceeded {
                        pair: [elements[i].label(), elements[j].label()],
                        distance,
                        bound: b,
                    });
                }
            }
        }
    }

    // Ptolemy precondition: exhaustive when affordable, sampled otherwise.
    let points = elements.len();
    if points <= 128 {
        let report = crate::ptolemy::ptolemy_check(target, tol);
        if !report.satisfied {
            return Err(Error::PtolemyViolation {
                quadruple: report.worst_quadruple.expect("violations carry a witness"),
                slack: report.worst_slack,
            });
        }
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(0x51CE);
        for _ in 0..200_000 {
            let mut idx = [0usize; 4];
            loop {
                for slot in &mut idx {
                    *slot = rng.gen_range(0..points);
                }
                if (0..4).all(|a| (a + 1..4).all(|b| idx[a] != idx[b])) {
                    break;
                }
            }
            let d = |a: usize, b: usize| target.get(idx[a], idx[b]);
            let p = d(0, 1) * d(2, 3);
            let q = d(0, 2) * d(1, 3);
            let r = d(0, 3) * d(1, 2);
            let largest = p.max(q).max(r);
            let slack = p + q + r - 2.0 * largest;
            if slack < -tol * largest {
                return Err(Error::PtolemyViolation {
                    quadruple: [
                        target.label(idx[0]).to_string(),
                        target.label(idx[1]).to_string(),
                        target.label(idx[2]).to_string(),
                        target.label(idx[3]).to_string(),
                    ],
                    slack,
                });
            }
        }
    }

    let schedule: Vec<usize> = n_schedule(m as u32)?
        .iter()
        .map(|v| v.to_usize().expect("feasible schedule fits usize"))
        .collect();
    let ctx = SearchContext { target, index_of, n, schedule };
    let bound = (m as f64).sqrt() * b;

    let (multiindex, rep, length) = match strategy {
        SearchStrategy::Inductive => {
            let outcome = solve_level(&ctx, m, 0)?;
            (MultiIndex { coords: outcome.k }, outcome.diag_vertex, outcome.length)
        }
        SearchStrategy::Brute => brute_search(&ctx, m),
    };
    if length > bound * (1.0 + tol) {
        return Err(Error::InvalidParameter(format!(
            "no diagonal within the bound {bound}: best found {length}; \
             the target must violate the Ptolemy inequality outside the sampled scan"
        )));
    }
    let co = rep ^ ((1 << m) - 1);
    let endpoint_1 = phi(&multiindex, rep, n);
    let endpoint_2 = phi(&multiindex, co, n);
    Ok(DiagonalWitness {
        multiindex,
        endpoints: [endpoint_1.label(), endpoint_2.label()],
        cube_vertices: [rep, co],
        length,
        bound,
        strategy,
    })
}

// ---- the obstruction experiment ----------------------------------------------------

#[derive(Debug, Clone, Serialize)]
pub struct ObstructionRow {
    pub m: usize,
    pub n: usize,
    pub points: usize,
    /// Measured snowflake constant of the target against exponent `q`.
    pub c: f64,
    /// Side bound `c·2^q/m^q` implied by the constant.
    pub b: f64,
    pub best_diagonal_length: f64,
    /// What any diagonal must exceed: `2^q/c`.
    pub diagonal_lower_bound: f64,
    /// What the theorem caps diagonals at: `√m·b`.
    pub theorem_bound: f64,
    /// The combined constraint `√m/m^q ≥ 1/c²`, reported as both sides
    /// and the remaining slack.
    pub constraint_lhs: f64,
    pub constraint_rhs: f64,
    pub slack: f64,
    pub satisfied: bool,
    pub witness: DiagonalWitness,
}

/// For each cube dimension `m`, measures the snowflake constant `c` of the
/// q-snowflaked slice target, runs the short-diagonal search with the
/// implied side bound, and evaluates the inequality `√m/m^q ≥ 1/c²` that
/// any such embedding must satisfy. The slack shrinks as `m` grows
/// whenever `q > ½` — the desk-scale shadow of the fact that exponents
/// above ½ are impossible in the limit.
pub fn snowflake_obstruction_experiment(
    q: f64,
    m_list: &[usize],
    n_cells: usize,
    strategy: SearchStrategy,
) -> Result<Vec<ObstructionRow>> {
    if !(q > 0.0) || !q.is_finite() {
        return Err(Error::InvalidParameter(format!("exponent must be positive, got {q}")));
    }
    let mut rows = Vec::with_capacity(m_list.len());
    for &m in m_list {
        let n = feasible_schedule_n(m as u32)?;
        let target = euclidean_snowflake_target(n, m, n_cells)?;
        let elements = slice_elements(n, m)?;

        // Measured constant: worst two-sided ratio of image distance to
        // the q-th power of the exact ℓ¹ distance d_H/m.
        let mut c = 1.0f64;
        for i in 0..elements.len() {
            for j in i + 1..elements.len() {
                let d_h = (elements[i].mask ^ elements[j].mask).count_ones() as f64;
                let delta_q = (d_h / m as f64).powf(q);
                let image = target.get(i, j);
                c = c.max(image / delta_q).max(delta_q / image);
            }
        }
        let b = c * 2.0f64.powf(q) / (m as f64).powf(q);
        let witness = find_short_diagonal(&target, m, b, strategy)?;

        let constraint_lhs = (m as f64).sqrt() / (m as f64).powf(q);
        let constraint_rhs = 1.0 / (c * c);
        let slack = constraint_lhs - constraint_rhs;
        rows.push(ObstructionRow {
            m,
            n,
            points: elements.len(),
            c,
            b,
            best_diagonal_length: witness.length,
            diagonal_lower_bound: 2.0f64.powf(q) / c,
            theorem_bound: witness.bound,
            constraint_lhs,
            constraint_rhs,
            slack,
            satisfied: slack >= -tolerances::VIOLATION_TOL,
            witness,
        });
    }
    Ok(rows)
}
