//! End-to-end acceptance checks, one per headline capability. Each test
//! prints a single summary line (visible under `--nocapture`) and enforces
//! its own wall-clock budget so regressions in the numerics and in the
//! algorithmic complexity both surface here.

use std::collections::HashSet;
use std::time::Instant;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use ptolemy::spaces::{kovalev_segment, path_segment, star_tree};
use ptolemy::{
    basepoint_change_max_defect, boundary_quasimetric, bourdon_limit, bourdon_metric, chain_metric,
    check_metric_axioms, circle_ideal_config, cross_ratio, delta_global, embedding_experiment,
    estimate_critical_exponent, euclidean_snowflake_target, find_short_diagonal,
    frink_bound_check, involute, mobius_defect, mobius_equivalent, n_schedule, power_quasi_metric,
    ptolemy_check, ptolemy_check_with, quasi_metric_constant, random_ideal_config,
    random_unit_vector,
    six_point_frame_metric, snowflake, snowflake_obstruction_experiment, stereographic_to_plane,
    stereographic_to_sphere, DistanceMatrix, ExtendedPoint, IdealConfig, PtolemyOptions,
    QuasiMetricSpace, SearchStrategy,
};

// ---- shared generators -------------------------------------------------------

fn upper_triangle_kernel(n: usize, range: std::ops::Range<f64>, rng: &mut ChaCha8Rng) -> DistanceMatrix {
    let labels = (0..n).map(|i| format!("p{i}")).collect();
    let mut rows = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in (i + 1)..n {
            let v = rng.gen_range(range.clone());
            rows[i][j] = v;
            rows[j][i] = v;
        }
    }
    DistanceMatrix::new(labels, rows).expect("random symmetric kernel")
}

/// Random metric: shortest-path repair of a random kernel with entries in
/// `[0.5, 2)`. The repair runs to a fixpoint, so the triangle inequality
/// holds exactly in floating point.
fn random_chain_metric(n: usize, rng: &mut ChaCha8Rng) -> DistanceMatrix {
    let raw = upper_triangle_kernel(n, 0.5..2.0, rng);
    chain_metric(&QuasiMetricSpace::new(raw)).ca
}

/// Four angles on a circle, sorted, with all gaps (including the wrap-around
/// gap) at least 0.3 radians.
fn separated_angles(rng: &mut ChaCha8Rng) -> Vec<f64> {
    let start = rng.gen_range(0.0..std::f64::consts::TAU);
    let mut angles = Vec::with_capacity(4);
    let mut acc = start;
    for _ in 0..4 {
        angles.push(acc % std::f64::consts::TAU);
        acc += rng.gen_range(0.3..1.2);
    }
    angles
}

/// Random tree metric: node `i > 0` hangs below a uniformly chosen earlier
/// node by an edge of weight in `[0.5, 2)`; distances go through the
/// lowest common ancestor.
fn random_tree_metric(k: usize, rng: &mut ChaCha8Rng) -> DistanceMatrix {
    let mut parent = vec![0usize; k];
    let mut depth = vec![0usize; k];
    let mut dist_root = vec![0.0f64; k];
    for i in 1..k {
        parent[i] = rng.gen_range(0..i);
        depth[i] = depth[parent[i]] + 1;
        dist_root[i] = dist_root[parent[i]] + rng.gen_range(0.5..2.0);
    }
    let labels = (0..k).map(|i| format!("t{i}")).collect();
    DistanceMatrix::from_fn(labels, |i, j| {
        let (mut a, mut b) = (i, j);
        while depth[a] > depth[b] {
            a = parent[a];
        }
        while depth[b] > depth[a] {
            b = parent[b];
        }
        while a != b {
            a = parent[a];
            b = parent[b];
        }
        dist_root[i] + dist_root[j] - 2.0 * dist_root[a]
    })
    .expect("tree metric")
}

// ---- the checks --------------------------------------------------------------

#[test]
fn boundary_metrics_of_hyperbolic_models_are_ptolemaic() {
    let t0 = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(101);

    // Random ideal quadruples in dimensions 2 and 3: never a violation
    // beyond 1e-9, and in dimension 2 (where every quadruple lies on the
    // full boundary circle) always an equality within 1e-7.
    let mut worst = f64::INFINITY;
    for dim in [2usize, 3] {
        for _ in 0..10_000 {
            let config = random_ideal_config(dim, 4, 0.6, &mut rng).expect("ideal quadruple");
            let bm = bourdon_metric(&config).expect("boundary metric");
            let report = ptolemy_check(&bm.matrix, 1e-9);
            assert!(
                report.satisfied,
                "dimension-{dim} boundary quadruple violated Ptolemy with slack {}",
                report.worst_slack
            );
            if dim == 2 {
                assert!(
                    report.worst_slack.abs() <= 1e-7,
                    "planar boundary quadruple missed equality: slack {}",
                    report.worst_slack
                );
            }
            worst = worst.min(report.worst_slack);
        }
    }

    // Coplanar quadruples inside the 3-ball (points on a circle cut out by
    // a plane) are equality cases for every basepoint.
    let mut planar = 0usize;
    for _ in 0..1_000 {
        let normal = random_unit_vector(3, &mut rng);
        let offset = rng.gen_range(-0.6..0.6);
        let radius = rng.gen_range(0.0..0.5);
        let basepoint = random_unit_vector(3, &mut rng).iter().map(|v| radius * v).collect();
        let config = circle_ideal_config(&normal, offset, &separated_angles(&mut rng), basepoint)
            .expect("circle configuration");
        let report = ptolemy_check(&bourdon_metric(&config).expect("boundary metric").matrix, 1e-9);
        assert!(
            report.satisfied && report.worst_slack.abs() <= 1e-7,
            "coplanar ideal quadruple missed equality: slack {}",
            report.worst_slack
        );
        planar += 1;
    }

    // Genuinely non-coplanar quadruples sit strictly inside the inequality.
    let mut tilted = 0usize;
    for _ in 0..1_000 {
        let phis = separated_angles(&mut rng);
        let tau: f64 = rng.gen_range(0.1..0.4);
        let mut points: Vec<Vec<f64>> =
            phis.iter().map(|p| vec![p.cos(), p.sin(), 0.0]).collect();
        points[3] = vec![tau.cos() * phis[3].cos(), tau.cos() * phis[3].sin(), tau.sin()];
        let labels = (1..=4).map(|i| format!("y{i}")).collect();
        let config = IdealConfig::new(vec![0.0; 3], labels, points).expect("tilted quadruple");
        let report = ptolemy_check(&bourdon_metric(&config).expect("boundary metric").matrix, 1e-9);
        assert!(
            report.worst_slack > 1e-7,
            "tilted quadruple (tau = {tau}) failed to be strict: slack {}",
            report.worst_slack
        );
        tilted += 1;
    }

    let secs = t0.elapsed().as_secs_f64();
    assert!(secs < 60.0, "hyperbolic boundary scan took {secs:.1}s, budget 60s");
    println!(
        "[01 hyperbolic-boundaries] PASS - 2x10^4 random ideal quadruples Ptolemaic \
         (worst slack {worst:.2e}), {planar} coplanar equalities within 1e-7, \
         {tilted} tilted quadruples strict ({secs:.1}s)"
    );
}

#[test]
fn ideal_triangle_heights_converge_to_half_angle_sines() {
    let t0 = Instant::now();
    let mut worst_defect = 0.0f64;
    for i in 1..=100 {
        let theta = 0.05 + (std::f64::consts::PI - 0.05) * (i as f64) / 100.0;
        let report = bourdon_limit(theta, 20).expect("valid angle");
        assert!(
            report.final_defect <= 1e-6,
            "height-based estimate at theta = {theta} still off by {} at t = 20",
            report.final_defect
        );
        worst_defect = worst_defect.max(report.final_defect);
    }
    let secs = t0.elapsed().as_secs_f64();
    assert!(secs < 30.0, "height-limit sweep took {secs:.1}s, budget 30s");
    println!(
        "[02 height-limit] PASS - 100 angles in (0.05, pi], defect at t = 20 \
         at most {worst_defect:.2e} ({secs:.1}s)"
    );
}

#[test]
fn square_root_snowflakes_are_always_ptolemaic() {
    let t0 = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(303);
    let mut min_slack = f64::INFINITY;
    let mut violations = 0usize;
    for _ in 0..100_000 {
        let m = random_chain_metric(4, &mut rng);
        let flaked = snowflake(&m, 0.5).expect("positive exponent");
        let report = ptolemy_check(&flaked, 1e-12);
        if !report.satisfied {
            violations += 1;
        }
        min_slack = min_slack.min(report.worst_slack);
    }
    assert_eq!(violations, 0, "square-root snowflake violated Ptolemy {violations} times");
    let secs = t0.elapsed().as_secs_f64();
    assert!(secs < 60.0, "snowflake scan took {secs:.1}s, budget 60s");
    println!(
        "[03 sqrt-snowflake] PASS - 10^5 random four-point metrics, zero violations \
         at tolerance 1e-12 (minimum slack {min_slack:.2e}) ({secs:.1}s)"
    );
}

#[test]
fn chain_metrics_of_two_quasi_metrics_stay_within_factor_four() {
    let t0 = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(404);
    let mut max_distortion = 0.0f64;
    let mut max_n = 0usize;
    for i in 0..10_000 {
        let n = rng.gen_range(4..=50);
        max_n = max_n.max(n);
        // Two populations: kernels with entries in [1, 2), which satisfy
        // the triangle inequality outright, and wide-spread kernels powered
        // down so their constant lands exactly on 2 - the latter violate
        // the triangle inequality freely and force real repairs.
        let q = if i % 2 == 0 {
            QuasiMetricSpace::new(upper_triangle_kernel(n, 1.0..2.0, &mut rng))
        } else {
            let raw = upper_triangle_kernel(n, 0.5..4.0, &mut rng);
            let k0 = quasi_metric_constant(&raw);
            let exponent =
                if k0 > 2.0 { std::f64::consts::LN_2 / k0.ln() } else { 1.0 };
            let flattened =
                DistanceMatrix::from_fn(raw.labels().to_vec(), |a, b| raw.get(a, b).powf(exponent))
                    .expect("powers preserve validity");
            QuasiMetricSpace::new(flattened)
        };
        assert!(q.k <= 2.0 + 1e-12, "constant {} escaped the 2-quasi-metric class", q.k);
        let res = chain_metric(&q);
        assert!(
            res.distortion <= 4.0 * (1.0 + 1e-9),
            "distortion {} exceeded the guaranteed factor 4 (n = {n})",
            res.distortion
        );
        assert!(
            check_metric_axioms(&res.ca, 0.0).is_metric,
            "chain result failed the exact triangle inequality (n = {n})"
        );
        if i % 10 == 0 {
            let report = frink_bound_check(&q).expect("constant within range");
            assert!(report.within_bound, "factor-four report disagreed: {}", report.distortion);
        }
        max_distortion = max_distortion.max(res.distortion);
    }
    let secs = t0.elapsed().as_secs_f64();
    assert!(secs < 120.0, "chain-metric scan took {secs:.1}s, budget 120s");
    println!(
        "[04 frink-factor-four] PASS - 10^4 random 2-quasi-metrics up to n = {max_n}, \
         exact metrics with distortion at most {max_distortion:.4} <= 4 ({secs:.1}s)"
    );
}

#[test]
fn involution_metricity_matches_ptolemy_exactly() {
    let t0 = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(505);
    let mut agreements = 0usize;
    let mut ptolemaic = 0usize;
    for _ in 0..10_000 {
        let m = random_chain_metric(5, &mut rng);
        let lhs = ptolemy_check(&m, 1e-9).satisfied;
        let rhs = m.labels().to_vec().iter().all(|z| {
            let inv = involute(&m, z).expect("inversion away from five points");
            check_metric_axioms(&inv, 1e-9).is_metric
        });
        if lhs == rhs {
            agreements += 1;
        }
        if lhs {
            ptolemaic += 1;
        }
    }
    assert_eq!(agreements, 10_000, "involution oracle disagreed on {} cases", 10_000 - agreements);
    let secs = t0.elapsed().as_secs_f64();
    assert!(secs < 60.0, "involution scan took {secs:.1}s, budget 60s");
    println!(
        "[05 involution-duality] PASS - 10^4 random five-point metrics, 100% oracle \
         agreement ({ptolemaic} Ptolemaic, {} not) ({secs:.1}s)",
        10_000 - ptolemaic
    );
}

#[test]
fn six_point_frame_equalities_and_mobius_rigidity() {
    let t0 = Instant::now();
    let frame = six_point_frame_metric(1.0, 1.0, 1.0).expect("unit parameters");
    let expected_equalities: HashSet<Vec<String>> = [
        ["e1+", "e1-", "e2+", "e2-"],
        ["e1+", "e1-", "e3+", "e3-"],
        ["e2+", "e2-", "e3+", "e3-"],
    ]
    .iter()
    .map(|q| q.iter().map(|s| s.to_string()).collect())
    .collect();

    for a in [1.0, 1.01, 1.02, 1.05] {
        // The constructor itself verifies the triangle inequality.
        let six = six_point_frame_metric(a, a, a).expect("admissible parameter");
        let opts = PtolemyOptions { violation_tol: 1e-9, equality_tol: 1e-9, max_equalities: 16 };
        let report = ptolemy_check_with(&six, &opts);
        assert!(report.satisfied, "a = {a}: Ptolemy violated with slack {}", report.worst_slack);
        assert_eq!(
            report.equality_count, 3,
            "a = {a}: expected the three coordinate-pair equalities, found {}",
            report.equality_count
        );
        let found: HashSet<Vec<String>> = report
            .equality_quadruples
            .iter()
            .map(|q| {
                let mut v: Vec<String> = q.to_vec();
                v.sort();
                v
            })
            .collect();
        assert_eq!(found, expected_equalities, "a = {a}: equalities sit on the wrong quadruples");

        let rep = mobius_equivalent(&six, &frame, 1e-9).expect("same label set");
        if a == 1.0 {
            assert!(rep.equivalent, "unit parameters must reproduce the frame exactly");
        } else {
            assert!(!rep.equivalent, "a = {a}: scaling one axis must change cross ratios");
            assert!(rep.witness.is_some(), "a = {a}: inequivalence must carry a witness");
            let quad = ["e1+", "e2-", "e2+", "e3+"];
            let on_six = cross_ratio(&six, quad).expect("distinct labels");
            let on_frame = cross_ratio(&frame, quad).expect("distinct labels");
            let ratio = on_six / on_frame;
            assert!(
                (ratio - a * a).abs() <= 1e-12,
                "a = {a}: witness cross ratio {ratio} is not a^2 = {}",
                a * a
            );
        }
    }
    let secs = t0.elapsed().as_secs_f64();
    assert!(secs < 30.0, "six-point family took {secs:.1}s, budget 30s");
    println!(
        "[06 six-point-frame] PASS - a in {{1.0, 1.01, 1.02, 1.05}}: metric, Ptolemaic, \
         exactly 3 coordinate-pair equalities, cross-ratio witness a^2 within 1e-12 ({secs:.1}s)"
    );
}

#[test]
fn cube_diagonal_schedule_and_obstruction_trend() {
    let t0 = Instant::now();

    let schedule: Vec<String> = n_schedule(3).expect("feasible").iter().map(|v| v.to_string()).collect();
    assert_eq!(schedule, ["2", "5", "26"], "pigeonhole schedule changed");

    // m = 2 on the 5-cube slice at two grid resolutions: both strategies
    // find a diagonal within sqrt(2) times the measured side bound.
    for n_cells in [24usize, 504] {
        let target = euclidean_snowflake_target(5, 2, n_cells).expect("valid resolution");
        let mut b = 0.0f64;
        for i in 0..target.n() {
            for j in (i + 1)..target.n() {
                let xor = u64::from_str_radix(target.label(i), 2).unwrap()
                    ^ u64::from_str_radix(target.label(j), 2).unwrap();
                if xor.count_ones() == 2 {
                    b = b.max(target.get(i, j));
                }
            }
        }
        let inductive = find_short_diagonal(&target, 2, b, SearchStrategy::Inductive)
            .expect("inductive search succeeds");
        let brute =
            find_short_diagonal(&target, 2, b, SearchStrategy::Brute).expect("brute search succeeds");
        let bound = 2.0f64.sqrt() * b;
        for witness in [&inductive, &brute] {
            assert!(
                witness.length <= bound * (1.0 + 1e-9),
                "resolution {n_cells}: diagonal {} escaped sqrt(2) * {b}",
                witness.length
            );
            assert_eq!(witness.cube_vertices[0] ^ witness.cube_vertices[1], 0b11);
        }
        assert!(
            brute.length <= inductive.length * (1.0 + 1e-9),
            "global scan found a longer diagonal than the recursion"
        );
    }

    // Full obstruction sweep including the m = 3 recursion (n = 26, 2600
    // slice vertices): the constraint sqrt(m)/m^q >= 1/c^2 holds with slack
    // strictly shrinking in m once q = 0.8 > 1/2.
    let rows = snowflake_obstruction_experiment(0.8, &[1, 2, 3], 504, SearchStrategy::Inductive)
        .expect("experiment completes");
    assert_eq!(rows.len(), 3);
    let expected_c = 2.0f64.powf(0.3);
    let rhs = 2.0f64.powf(-0.6);
    for row in &rows {
        assert!(row.satisfied, "m = {}: constraint already violated at desk scale", row.m);
        assert!(
            (row.c - expected_c).abs() <= 1e-9,
            "m = {}: measured constant {} differs from 2^0.3",
            row.m,
            row.c
        );
        let expected_slack = (row.m as f64).powf(-0.3) - rhs;
        assert!(
            (row.slack - expected_slack).abs() <= 1e-9,
            "m = {}: slack {} differs from the closed form {expected_slack}",
            row.m,
            row.slack
        );
        assert!(
            row.best_diagonal_length <= row.theorem_bound * (1.0 + 1e-9)
                && row.best_diagonal_length >= row.diagonal_lower_bound * (1.0 - 1e-9),
            "m = {}: diagonal {} outside [{}, {}]",
            row.m,
            row.best_diagonal_length,
            row.diagonal_lower_bound,
            row.theorem_bound
        );
    }
    assert!(
        rows[0].slack > rows[1].slack && rows[1].slack > rows[2].slack,
        "constraint slack must shrink monotonically in m for q > 1/2: {:?}",
        rows.iter().map(|r| r.slack).collect::<Vec<_>>()
    );

    let secs = t0.elapsed().as_secs_f64();
    assert!(secs < 600.0, "cube suite took {secs:.1}s, budget 600s");
    println!(
        "[07 cube-diagonals] PASS - schedule [2, 5, 26], both strategies within sqrt(2)*b \
         at m = 2, m = 3 recursion done, slack trend {:.4} > {:.4} > {:.4} ({secs:.1}s)",
        rows[0].slack, rows[1].slack, rows[2].slack
    );
}

#[test]
fn snowflake_sphere_embedding_hits_the_half_exponent() {
    let t0 = Instant::now();

    let exp = embedding_experiment(3, 100, 512, 2024).expect("experiment completes");
    assert!(
        (0.47..=0.53).contains(&exp.fitted_exponent),
        "fitted exponent {} outside [0.47, 0.53]",
        exp.fitted_exponent
    );
    assert!(
        exp.image_ptolemy.satisfied,
        "embedded point set violated Ptolemy with slack {}",
        exp.image_ptolemy.worst_slack
    );

    // Stereographic projection round-trips to machine precision.
    let mut rng = ChaCha8Rng::seed_from_u64(808);
    let mut worst_rt = 0.0f64;
    for _ in 0..10_000 {
        let scale = rng.gen_range(0.0..3.0);
        let y: Vec<f64> = random_unit_vector(3, &mut rng).iter().map(|v| scale * v).collect();
        let x = stereographic_to_sphere(&ExtendedPoint::Finite(y.clone()), 3).expect("lift");
        match stereographic_to_plane(&x).expect("project") {
            ExtendedPoint::Finite(back) => {
                let err = y
                    .iter()
                    .zip(&back)
                    .map(|(a, b)| (a - b) * (a - b))
                    .sum::<f64>()
                    .sqrt();
                assert!(err <= 1e-12, "round trip moved a point by {err}");
                worst_rt = worst_rt.max(err);
            }
            ExtendedPoint::Infinity => panic!("finite point projected to infinity"),
        }
    }

    // Cross ratios survive the plane -> sphere lift, including through the
    // point at infinity.
    let mut points: Vec<ExtendedPoint> = Vec::new();
    for _ in 0..60 {
        let scale = rng.gen_range(0.0..4.0);
        points.push(ExtendedPoint::Finite(
            random_unit_vector(3, &mut rng).iter().map(|v| scale * v).collect(),
        ));
    }
    points.push(ExtendedPoint::Infinity);
    let images: Vec<ExtendedPoint> = points
        .iter()
        .map(|p| ExtendedPoint::Finite(stereographic_to_sphere(p, 3).expect("lift")))
        .collect();
    let defect = mobius_defect(&points, &images, 1_000, 909).expect("enough quadruples");
    assert!(defect <= 1e-9, "cross-ratio defect {defect} above 1e-9");

    let secs = t0.elapsed().as_secs_f64();
    assert!(secs < 60.0, "embedding suite took {secs:.1}s, budget 60s");
    println!(
        "[08 sphere-embedding] PASS - fitted exponent {:.4} in [0.47, 0.53], image Ptolemaic, \
         round-trip error {worst_rt:.2e}, cross-ratio defect {defect:.2e} over 10^3 quadruples \
         ({secs:.1}s)",
        exp.fitted_exponent
    );
}

#[test]
fn hyperbolicity_delta_boundary_and_basepoint_identities() {
    let t0 = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(909);

    // Trees are 0-hyperbolic.
    let mut tree_delta = 0.0f64;
    for k in 3..10 {
        tree_delta = tree_delta.max(delta_global(&star_tree(k)).expect("tree").delta);
    }
    for _ in 0..50 {
        let k = rng.gen_range(4..=10);
        tree_delta = tree_delta.max(delta_global(&random_tree_metric(k, &mut rng)).expect("tree").delta);
    }
    assert!(tree_delta <= 1e-12, "a tree produced delta = {tree_delta}");

    // Random metrics: basepoint doubling, the boundary constant against
    // e^delta, and the exact basepoint-change identity.
    let mut max_excess = f64::NEG_INFINITY;
    let mut max_defect = 0.0f64;
    for _ in 0..1_000 {
        let n = rng.gen_range(5..=8);
        let m = random_chain_metric(n, &mut rng);
        let global = delta_global(&m).expect("metric");
        assert!(
            global.doubling_satisfied,
            "delta doubled across basepoints: excess {}",
            global.worst_doubling_excess
        );
        max_excess = max_excess.max(global.worst_doubling_excess);
        for o in m.labels().to_vec() {
            let bq = boundary_quasimetric(&m, &o).expect("basepoint exists");
            assert!(
                bq.space.k <= bq.e_delta + 1e-9,
                "boundary constant {} exceeded e^delta = {}",
                bq.space.k,
                bq.e_delta
            );
        }
        for i in 0..m.n() {
            for j in (i + 1)..m.n() {
                let defect = basepoint_change_max_defect(&m, m.label(i), m.label(j))
                    .expect("labels exist");
                assert!(defect <= 1e-12, "basepoint-change identity broke: defect {defect}");
                max_defect = max_defect.max(defect);
            }
        }
    }

    let secs = t0.elapsed().as_secs_f64();
    assert!(secs < 60.0, "hyperbolicity suite took {secs:.1}s, budget 60s");
    println!(
        "[09 delta-suite] PASS - trees flat to {tree_delta:.2e}, 10^3 random metrics with \
         doubling excess at most {max_excess:.2e}, K <= e^delta throughout, basepoint-change \
         defect at most {max_defect:.2e} ({secs:.1}s)"
    );
}

#[test]
fn segment_families_separate_bounded_and_critical_exponents() {
    let t0 = Instant::now();
    let sizes = [25usize, 50, 100, 200];

    // Logarithmic segments: distortion of the repaired power metric
    // saturates (the largest member is within 5% of the maximum).
    let mut log_plateaus = Vec::new();
    for s in [2.0, 4.0] {
        let d: Vec<f64> = sizes
            .iter()
            .map(|&n| {
                let q = QuasiMetricSpace::new(kovalev_segment(n));
                chain_metric(&power_quasi_metric(&q, s).expect("positive power")).distortion
            })
            .collect();
        let dmax = d.iter().cloned().fold(0.0, f64::max);
        assert!(
            dmax <= 1.05 * d[3],
            "s = {s}: distortion still climbing, max {dmax} vs final {}",
            d[3]
        );
        log_plateaus.push(d[3]);
    }

    // Path segments: the exact growth laws sqrt(n) at s = 1.5 and n at
    // s = 2 - unbounded in n, the finite-scale signature of a critical
    // exponent at 1.
    for (s, law) in [(1.5, f64::sqrt as fn(f64) -> f64), (2.0, |n: f64| n)] {
        let mut previous = 0.0f64;
        for &n in &sizes {
            let q = QuasiMetricSpace::new(path_segment(n));
            let d = chain_metric(&power_quasi_metric(&q, s).expect("positive power")).distortion;
            let expected = law(n as f64);
            assert!(
                (d - expected).abs() <= 1e-9 * expected,
                "path segment n = {n}, s = {s}: distortion {d} differs from {expected}"
            );
            assert!(d > previous, "path distortion must grow strictly with n");
            previous = d;
        }
    }

    // The trend estimator brackets the path family's critical exponent at 1.
    let family: Vec<QuasiMetricSpace> =
        sizes.iter().map(|&n| QuasiMetricSpace::new(path_segment(n))).collect();
    let est = estimate_critical_exponent(&family, &[1.0, 1.1, 1.2, 1.5, 2.0], 1.5)
        .expect("valid family and grid");
    assert_eq!(est.last_bounded_s, Some(1.0), "s = 1 must remain bounded");
    let diverging = est.first_diverging_s.expect("divergence must be detected");
    assert!(
        diverging > 1.0 && diverging < 1.2,
        "divergence onset {diverging} outside (1.0, 1.2)"
    );

    let secs = t0.elapsed().as_secs_f64();
    assert!(secs < 120.0, "segment families took {secs:.1}s, budget 120s");
    println!(
        "[10 critical-exponents] PASS - log family plateaus at {:.3} (s = 2) and {:.3} (s = 4), \
         path family grows as sqrt(n) and n, divergence bracketed at {diverging} ({secs:.1}s)",
        log_plateaus[0], log_plateaus[1]
    );
}
