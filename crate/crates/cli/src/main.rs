//! Command-line front end over the `ptolemy` library: file-based inputs,
//! deterministic JSON reports and CI-friendly exit codes.
//!
//! Exit codes: 0 when every requested check passes, 1 when input parsed fine
//! but a mathematical check failed (a Ptolemy or triangle violation, a missed
//! bound, inequivalent cross ratios), 2 for usage and input errors.

use std::io;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::ser::{Formatter, PrettyFormatter};
use serde_json::{json, Value};

use ptolemy::spaces::{kovalev_segment, path_segment};
use ptolemy::{
    admissible_parameter_scan, boundary_quasimetric, bourdon_metric, chain_metric,
    check_metric_axioms, delta_global, distortion_curve, embedding_experiment, frink_bound_check,
    glued_quadrilateral, involute, mobius_equivalent, orthogonal_frame_config, power_quasi_metric,
    ptolemy_check_with, six_point_frame_metric, snowflake, snowflake_obstruction_experiment,
    DistanceMatrix, Error, PtolemyOptions, QuasiMetricSpace, SearchStrategy,
};

#[derive(Parser)]
#[command(
    name = "ptolemy",
    version,
    about = "Finite metric geometry: Ptolemy checks, chain metrization, hyperbolicity, \
             hyperbolic boundary models, cube-slice diagonals and snowflake embeddings"
)]
struct Cli {
    /// Seed for every randomized routine; identical seeds give byte-identical reports.
    #[arg(long, global = true, default_value_t = 2024)]
    seed: u64,

    /// Worker threads for parallel scans (0 keeps the library default).
    /// Results do not depend on the thread count.
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,

    /// Write the JSON report to this file instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check the metric axioms and the Ptolemy inequality of a matrix.
    Check {
        /// Distance matrix (.json or .csv).
        matrix: PathBuf,
        /// Run only the Ptolemy check.
        #[arg(long)]
        ptolemy: bool,
        /// Run only the metric-axiom check.
        #[arg(long)]
        metric: bool,
        /// Slack tolerance for both checks.
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
        /// Quadruples with |slack| below this count as equalities.
        #[arg(long, default_value_t = 1e-7)]
        equality_tol: f64,
    },
    /// Repair a quasi-metric into its chain (shortest-path) metric.
    Metrize {
        matrix: PathBuf,
        /// Raise all entries to this power first.
        #[arg(long)]
        power: Option<f64>,
        /// Also write the repaired matrix (.json or .csv).
        #[arg(long)]
        matrix_out: Option<PathBuf>,
    },
    /// Chain-metric distortion across a geometric grid of powers.
    DistortionCurve {
        matrix: PathBuf,
        #[arg(long, default_value_t = 0.25)]
        s_min: f64,
        #[arg(long, default_value_t = 4.0)]
        s_max: f64,
        #[arg(long, default_value_t = 25)]
        s_count: usize,
    },
    /// Gromov products: delta, basepoint doubling, boundary quasi-metric.
    Hyperbolicity {
        matrix: PathBuf,
        /// Also report the boundary kernel e^(-(x|y)) at this basepoint.
        #[arg(long)]
        basepoint: Option<String>,
    },
    /// Generate a stock example matrix.
    #[command(subcommand)]
    Examples(Example),
    /// Search cube-slice diagonals under a snowflake side bound.
    Cube {
        /// Cube dimension; repeat the flag to sweep several.
        #[arg(long, required = true)]
        m: Vec<usize>,
        /// Snowflake exponent the target is measured against.
        #[arg(long, default_value_t = 0.8)]
        q: f64,
        /// Grid cells per axis (must be a multiple of 2m).
        #[arg(long, default_value_t = 504)]
        resolution: usize,
        #[arg(long, value_enum, default_value_t = StrategyArg::Inductive)]
        strategy: StrategyArg,
    },
    /// Snowflake the solid l1 ball onto a round sphere and fit the exponent.
    Embed {
        #[arg(long, default_value_t = 3)]
        dim: usize,
        #[arg(long, default_value_t = 100)]
        samples: usize,
        /// Grid cells per coordinate profile.
        #[arg(long, default_value_t = 512)]
        resolution: usize,
    },
    /// Invert a metric at one of its points: d(x,y) / (d(x,z) d(y,z)).
    Involute {
        matrix: PathBuf,
        /// Label of the inversion center z.
        #[arg(long)]
        center: String,
        #[arg(long)]
        matrix_out: Option<PathBuf>,
    },
    /// Raise all distances to a power q.
    Snowflake {
        matrix: PathBuf,
        #[arg(long)]
        q: f64,
        #[arg(long)]
        matrix_out: Option<PathBuf>,
    },
    /// Compare cross ratios of two kernels over the same label set.
    Mobius {
        matrix_a: PathBuf,
        matrix_b: PathBuf,
        /// Relative tolerance on pairing-product ratios.
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
    },
}

#[derive(Subcommand)]
enum Example {
    /// Two triangles glued along a unit diagonal: sides a, b, a, b.
    Glued {
        #[arg(long, default_value_t = 1.0)]
        a: f64,
        #[arg(long, default_value_t = 1.0)]
        b: f64,
        #[arg(long)]
        matrix_out: Option<PathBuf>,
    },
    /// Six-point coordinate frame with independently scaled axes.
    SixPoint {
        #[arg(long, default_value_t = 1.0)]
        a: f64,
        #[arg(long, default_value_t = 1.0)]
        b: f64,
        #[arg(long, default_value_t = 1.0)]
        c: f64,
        /// Classify a whole parameter grid instead of one matrix.
        #[arg(long)]
        scan: bool,
        /// Grid values for the scan (each strictly between 0.5 and 2).
        #[arg(long, value_delimiter = ',')]
        scan_values: Vec<f64>,
        #[arg(long)]
        matrix_out: Option<PathBuf>,
    },
    /// Logarithmic segment d(i,j) = ln(1 + |i-j|).
    Kovalev {
        #[arg(long, default_value_t = 100)]
        n: usize,
        #[arg(long)]
        matrix_out: Option<PathBuf>,
    },
    /// Integer segment 0..n with the path metric |i-j|.
    Path {
        #[arg(long, default_value_t = 100)]
        n: usize,
        #[arg(long)]
        matrix_out: Option<PathBuf>,
    },
    /// Boundary matrix of the orthogonal ideal frame (the six points ±e_i).
    Frame {
        #[arg(long)]
        matrix_out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum StrategyArg {
    Inductive,
    Brute,
}

impl From<StrategyArg> for SearchStrategy {
    fn from(s: StrategyArg) -> Self {
        match s {
            StrategyArg::Inductive => SearchStrategy::Inductive,
            StrategyArg::Brute => SearchStrategy::Brute,
        }
    }
}

// ---- deterministic JSON rendering ---------------------------------------------

/// Pretty JSON with every float printed at 17 significant digits, so equal
/// results are equal byte-for-byte and every value parses back to the same
/// bits. Non-finite floats become `null` (a slack of +inf means "no
/// quadruples to check").
struct ReportFormatter<'a> {
    inner: PrettyFormatter<'a>,
}

impl ReportFormatter<'_> {
    fn new() -> Self {
        Self { inner: PrettyFormatter::new() }
    }
}

impl Formatter for ReportFormatter<'_> {
    fn write_f64<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        write!(writer, "{value:.16e}")
    }
    fn begin_array<W: ?Sized + io::Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.inner.begin_array(writer)
    }
    fn end_array<W: ?Sized + io::Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.inner.end_array(writer)
    }
    fn begin_array_value<W: ?Sized + io::Write>(
        &mut self,
        writer: &mut W,
        first: bool,
    ) -> io::Result<()> {
        self.inner.begin_array_value(writer, first)
    }
    fn end_array_value<W: ?Sized + io::Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.inner.end_array_value(writer)
    }
    fn begin_object<W: ?Sized + io::Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.inner.begin_object(writer)
    }
    fn end_object<W: ?Sized + io::Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.inner.end_object(writer)
    }
    fn begin_object_key<W: ?Sized + io::Write>(
        &mut self,
        writer: &mut W,
        first: bool,
    ) -> io::Result<()> {
        self.inner.begin_object_key(writer, first)
    }
    fn begin_object_value<W: ?Sized + io::Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.inner.begin_object_value(writer)
    }
    fn end_object_value<W: ?Sized + io::Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.inner.end_object_value(writer)
    }
}

fn render_json(value: &Value) -> String {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, ReportFormatter::new());
    value.serialize(&mut ser).expect("in-memory JSON serialization cannot fail");
    buf.push(b'\n');
    String::from_utf8(buf).expect("serializer emits UTF-8")
}

/// Attaches the schema tag and crate version to a report body.
fn report(schema: &str, body: Value) -> Value {
    let mut map = body.as_object().cloned().unwrap_or_default();
    map.insert("schema".into(), Value::String(format!("{schema}/v1")));
    map.insert("version".into(), Value::String(env!("CARGO_PKG_VERSION").into()));
    Value::Object(map)
}

fn write_matrix(path: &Path, m: &DistanceMatrix) -> ptolemy::Result<()> {
    match path.extension().and_then(|e| e.to_str()) {
        Some("csv") => std::fs::write(path, m.to_csv_string())?,
        _ => std::fs::write(path, render_json(&serde_json::to_value(m)?))?,
    }
    Ok(())
}

// ---- subcommand handlers -------------------------------------------------------

/// Every handler returns the report body plus whether all its mathematical
/// checks passed.
fn run(cli: &Cli) -> ptolemy::Result<(Value, bool)> {
    match &cli.command {
        Command::Check { matrix, ptolemy, metric, tol, equality_tol } => {
            let m = DistanceMatrix::read_path(matrix)?;
            // Bare `check` runs both; the flags narrow it down.
            let run_metric = *metric || !*ptolemy;
            let run_ptolemy = *ptolemy || !*metric;
            let axioms = run_metric.then(|| check_metric_axioms(&m, *tol));
            let pt = run_ptolemy.then(|| {
                ptolemy_check_with(
                    &m,
                    &PtolemyOptions {
                        violation_tol: *tol,
                        equality_tol: *equality_tol,
                        max_equalities: 32,
                    },
                )
            });
            let passed = axioms.as_ref().is_none_or(|r| r.is_metric)
                && pt.as_ref().is_none_or(|r| r.satisfied);
            let body = json!({
                "input": matrix.display().to_string(),
                "points": m.n(),
                "tol": tol,
                "metric": axioms,
                "ptolemy": pt,
                "passed": passed,
            });
            Ok((report("ptolemy.check", body), passed))
        }

        Command::Metrize { matrix, power, matrix_out } => {
            let m = DistanceMatrix::read_path(matrix)?;
            let base = QuasiMetricSpace::new(m);
            let space = match power {
                Some(s) => power_quasi_metric(&base, *s)?,
                None => base,
            };
            let result = chain_metric(&space);
            // The factor-4 guarantee only speaks for 2-quasi-metrics.
            let frink = if space.k <= 2.0 + 1e-12 {
                Some(frink_bound_check(&space)?)
            } else {
                None
            };
            let passed = frink.as_ref().is_none_or(|f| f.within_bound);
            if let Some(path) = matrix_out {
                write_matrix(path, &result.ca)?;
            }
            let body = json!({
                "input": matrix.display().to_string(),
                "power": power.unwrap_or(1.0),
                "k": space.k,
                "distortion": result.distortion,
                "witness_pair": result.witness_pair,
                "factor_four": frink,
                "ca": result.ca,
            });
            Ok((report("ptolemy.metrize", body), passed))
        }

        Command::DistortionCurve { matrix, s_min, s_max, s_count } => {
            if !(*s_min > 0.0) || s_max <= s_min || *s_count < 2 {
                return Err(Error::InvalidParameter(
                    "need 0 < s-min < s-max and at least two grid points".into(),
                ));
            }
            let m = DistanceMatrix::read_path(matrix)?;
            let space = QuasiMetricSpace::new(m);
            let steps = (*s_count - 1) as f64;
            let grid: Vec<f64> = (0..*s_count)
                .map(|i| {
                    let t = i as f64 / steps;
                    (s_min.ln() + t * (s_max.ln() - s_min.ln())).exp()
                })
                .collect();
            let curve = distortion_curve(&space, &grid)?;
            let body = json!({
                "input": matrix.display().to_string(),
                "k": space.k,
                "s_values": curve.s_values,
                "c_values": curve.c_values,
            });
            Ok((report("ptolemy.distortion-curve", body), true))
        }

        Command::Hyperbolicity { matrix, basepoint } => {
            let m = DistanceMatrix::read_path(matrix)?;
            let global = delta_global(&m)?;
            let boundary = match basepoint {
                Some(o) => Some(boundary_quasimetric(&m, o)?),
                None => None,
            };
            let boundary_ok =
                boundary.as_ref().is_none_or(|b| b.space.k <= b.e_delta + 1e-9);
            let passed = global.doubling_satisfied && boundary_ok;
            let body = json!({
                "input": matrix.display().to_string(),
                "delta": global.delta,
                "doubling_satisfied": global.doubling_satisfied,
                "worst_doubling_excess": global.worst_doubling_excess,
                "per_basepoint": global.per_basepoint,
                "boundary": boundary,
                "boundary_within_e_delta": boundary.as_ref().map(|_| boundary_ok),
                "passed": passed,
            });
            Ok((report("ptolemy.hyperbolicity", body), passed))
        }

        Command::Examples(example) => run_example(example),

        Command::Cube { m, q, resolution, strategy } => {
            let rows = snowflake_obstruction_experiment(*q, m, *resolution, (*strategy).into())?;
            let passed = rows.iter().all(|r| r.satisfied);
            let body = json!({
                "q": q,
                "resolution": resolution,
                "rows": rows,
                "passed": passed,
            });
            Ok((report("ptolemy.cube", body), passed))
        }

        Command::Embed { dim, samples, resolution } => {
            let experiment = embedding_experiment(*dim, *samples, *resolution, cli.seed)?;
            let passed = experiment.image_ptolemy.satisfied;
            // The raw pair list is omitted; the fit summary carries the result.
            let body = json!({
                "dim": experiment.dim,
                "n_cells": experiment.n_cells,
                "seed": experiment.seed,
                "samples": samples,
                "pair_count": experiment.pairs.len(),
                "fitted_exponent": experiment.fitted_exponent,
                "fit_pairs_used": experiment.fit_pairs_used,
                "snowflake_constant": experiment.snowflake_constant,
                "image_ptolemy": experiment.image_ptolemy,
                "passed": passed,
            });
            Ok((report("ptolemy.embed", body), passed))
        }

        Command::Involute { matrix, center, matrix_out } => {
            let m = DistanceMatrix::read_path(matrix)?;
            let inv = involute(&m, center)?;
            let axioms = check_metric_axioms(&inv, 1e-9);
            if let Some(path) = matrix_out {
                write_matrix(path, &inv)?;
            }
            let body = json!({
                "input": matrix.display().to_string(),
                "center": center,
                "is_metric": axioms.is_metric,
                "min_margin": axioms.min_margin,
                "violations": axioms.violations.iter().take(8).collect::<Vec<_>>(),
                "matrix": inv,
            });
            // Informational: a non-metric involution is the honest answer
            // for a non-Ptolemaic input, not a failure.
            Ok((report("ptolemy.involute", body), true))
        }

        Command::Snowflake { matrix, q, matrix_out } => {
            let m = DistanceMatrix::read_path(matrix)?;
            let flaked = snowflake(&m, *q)?;
            let pt = ptolemy_check_with(&flaked, &PtolemyOptions::default());
            if let Some(path) = matrix_out {
                write_matrix(path, &flaked)?;
            }
            let body = json!({
                "input": matrix.display().to_string(),
                "q": q,
                "ptolemy": pt,
                "matrix": flaked,
            });
            Ok((report("ptolemy.snowflake", body), true))
        }

        Command::Mobius { matrix_a, matrix_b, tol } => {
            let a = DistanceMatrix::read_path(matrix_a)?;
            let b = DistanceMatrix::read_path(matrix_b)?;
            let rep = mobius_equivalent(&a, &b, *tol)?;
            let passed = rep.equivalent;
            let body = json!({
                "input_a": matrix_a.display().to_string(),
                "input_b": matrix_b.display().to_string(),
                "tol": tol,
                "equivalent": rep.equivalent,
                "max_relative_defect": rep.max_relative_defect,
                "witness": rep.witness,
            });
            Ok((report("ptolemy.mobius", body), passed))
        }
    }
}

fn run_example(example: &Example) -> ptolemy::Result<(Value, bool)> {
    // Each generated matrix ships with its own Ptolemy report; for these
    // constructions a violation would mean a bug, so it fails the run.
    let checked = |name: &str, m: DistanceMatrix, extra: Value| -> ptolemy::Result<(Value, bool)> {
        let pt = ptolemy_check_with(
            &m,
            &PtolemyOptions { violation_tol: 1e-9, equality_tol: 1e-9, max_equalities: 16 },
        );
        let passed = pt.satisfied;
        let mut body = extra.as_object().cloned().unwrap_or_default();
        body.insert("example".into(), Value::String(name.into()));
        body.insert("ptolemy".into(), serde_json::to_value(&pt)?);
        body.insert("matrix".into(), serde_json::to_value(&m)?);
        body.insert("passed".into(), Value::Bool(passed));
        Ok((report("ptolemy.example", Value::Object(body)), passed))
    };

    match example {
        Example::Glued { a, b, matrix_out } => {
            let m = glued_quadrilateral(*a, *b)?;
            if let Some(path) = matrix_out {
                write_matrix(path, &m)?;
            }
            checked("glued", m, json!({ "a": a, "b": b }))
        }
        Example::SixPoint { a, b, c, scan, scan_values, matrix_out } => {
            if *scan {
                let default_grid = vec![0.8, 0.9, 1.0, 1.1, 1.25, 1.5];
                let grid = if scan_values.is_empty() { &default_grid } else { scan_values };
                let rows = admissible_parameter_scan(grid)?;
                let body = json!({
                    "example": "six-point-scan",
                    "grid": grid,
                    "rows": rows,
                });
                return Ok((report("ptolemy.example", body), true));
            }
            let m = six_point_frame_metric(*a, *b, *c)?;
            if let Some(path) = matrix_out {
                write_matrix(path, &m)?;
            }
            checked("six-point", m, json!({ "a": a, "b": b, "c": c }))
        }
        Example::Kovalev { n, matrix_out } => {
            if *n < 1 {
                return Err(Error::InvalidParameter("segment length must be positive".into()));
            }
            let m = kovalev_segment(*n);
            if let Some(path) = matrix_out {
                write_matrix(path, &m)?;
            }
            let body = json!({ "example": "kovalev", "n": n, "matrix": m });
            Ok((report("ptolemy.example", body), true))
        }
        Example::Path { n, matrix_out } => {
            if *n < 1 {
                return Err(Error::InvalidParameter("segment length must be positive".into()));
            }
            let m = path_segment(*n);
            if let Some(path) = matrix_out {
                write_matrix(path, &m)?;
            }
            let body = json!({ "example": "path", "n": n, "matrix": m });
            Ok((report("ptolemy.example", body), true))
        }
        Example::Frame { matrix_out } => {
            let m = bourdon_metric(&orthogonal_frame_config())?.matrix;
            if let Some(path) = matrix_out {
                write_matrix(path, &m)?;
            }
            checked("frame", m, json!({}))
        }
    }
}

fn exit_code_for(e: &Error) -> i32 {
    match e {
        // Well-formed input whose mathematics failed a hypothesis.
        Error::TriangleViolation { .. }
        | Error::PtolemyViolation { .. }
        | Error::SideBoundExceeded { .. } => 1,
        // Everything else is a usage or input problem.
        _ => 2,
    }
}

fn main() {
    let cli = Cli::parse();
    if cli.threads > 0 {
        // Results are deterministic for any pool size; this only bounds it.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(cli.threads).build_global();
    }
    match run(&cli) {
        Ok((value, passed)) => {
            let text = render_json(&value);
            match &cli.out {
                Some(path) => {
                    if let Err(e) = std::fs::write(path, text) {
                        eprintln!("error: cannot write report: {e}");
                        std::process::exit(2);
                    }
                }
                None => print!("{text}"),
            }
            std::process::exit(if passed { 0 } else { 1 });
        }
        Err(e) => {
            eprintln!("error: {e}");
            std::process::exit(exit_code_for(&e));
        }
    }
}
