//! Command-line front end: argument types, dispatch to the library, and
//! deterministic JSON/CSV output with a provenance header.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use maxalign::alignment::{
    alignment_report, bound_functional, cdf_coefficients, maxent_kernel, piecewise_linear_kernel,
    trapezoid_cdf_integral_coefficients, two_point_report, AtomPolicy, EvidenceGrid, Kernel, KernelKind,
    DEFAULT_GRID_POINTS,
};
use maxalign::seqspace::{
    conditional_face_distribution, evidence_histogram_sequences, evidence_histogram_simplex, mean_window_probability,
    rejection_conditioner, sum_distribution, tilted_conditioner, window_conditional_face_distribution, EvidenceSample,
    DEFAULT_SAMPLES, DEFAULT_SEQUENCE_LENGTH,
};
use maxalign::{solve_for_expectation, Distribution, Error, Histogram, Support, DEFAULT_BIN_WIDTH};
use serde::Serialize;
use serde_json::{json, Value};

/// Bumped whenever the layout of output files changes.
pub const FORMAT_VERSION: u32 = 1;
pub const TOOL: &str = "maxalign";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
/// Environment variable naming the default output directory of `reproduce`.
pub const OUT_DIR_ENV: &str = "MAXALIGN_OUT_DIR";

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;
pub const EXIT_INFEASIBLE: i32 = 4;

#[derive(Debug, Parser)]
#[command(
    name = "maxalign",
    version,
    about = "Maximum-entropy updating, product-space conditioning and alignment experiments"
)]
pub struct Cli {
    /// Seed for every stochastic step; recorded in the output.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Write the result here instead of standard output.
    #[arg(long, short = 'o', global = true)]
    pub output: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Clone, Debug, Subcommand, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    /// Maximum-entropy distribution under an expectation constraint.
    Maxent(MaxentArgs),
    /// Distribution of one roll given the sum (or mean window) of n rolls.
    Condition(ConditionArgs),
    /// Histogram of the evidence (sample mean) over an extended space.
    Evidence(EvidenceArgs),
    /// Solve the total-expectation alignment system for an update rule.
    Align(AlignArgs),
    /// Forced integrals and CDF bounds for the two-point update rule.
    Appendix(AppendixArgs),
    /// Regenerate every experiment into a directory with a manifest.
    Reproduce(ReproduceArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Maxent(_) => "maxent",
            Command::Condition(_) => "condition",
            Command::Evidence(_) => "evidence",
            Command::Align(_) => "align",
            Command::Appendix(_) => "appendix",
            Command::Reproduce(_) => "reproduce",
        }
    }
}

#[derive(Clone, Debug, Args, Serialize)]
pub struct MaxentArgs {
    /// Target expectation.
    #[arg(long, allow_negative_numbers = true)]
    pub epsilon: f64,
    /// Comma-separated outcome values.
    #[arg(long, value_delimiter = ',', default_value = "1,2,3,4,5,6", allow_negative_numbers = true)]
    pub support: Vec<f64>,
    #[arg(long, default_value_t = maxalign::maxent::DEFAULT_TOLERANCE)]
    pub tol: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Exact,
    Rejection,
    Tilted,
}

#[derive(Clone, Debug, Args, Serialize)]
pub struct ConditionArgs {
    /// Number of rolls.
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub target_mean: f64,
    /// Shorthand for `--method exact`.
    #[arg(long)]
    pub exact: bool,
    /// Condition on the sample mean lying strictly within this distance of
    /// the target instead of on an exact sum.
    #[arg(long)]
    pub window: Option<f64>,
    #[arg(long, value_enum, default_value_t = Method::Exact)]
    pub method: Method,
    /// Sequences drawn by the tilted sampler.
    #[arg(long, default_value_t = 100_000)]
    pub draws: u64,
    /// Upper bound on sequences drawn by the rejection sampler.
    #[arg(long, default_value_t = 100_000)]
    pub max_draws: u64,
    #[arg(long, value_delimiter = ',', default_value = "1,2,3,4,5,6", allow_negative_numbers = true)]
    pub support: Vec<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Source {
    Sequences,
    Simplex,
}

#[derive(Clone, Debug, Args, Serialize)]
pub struct EvidenceArgs {
    #[arg(long, value_enum, default_value_t = Source::Sequences)]
    pub source: Source,
    /// Sequence length (sequence space only).
    #[arg(long, default_value_t = DEFAULT_SEQUENCE_LENGTH)]
    pub n: usize,
    #[arg(long, default_value_t = DEFAULT_SAMPLES)]
    pub samples: u64,
    #[arg(long, default_value_t = DEFAULT_BIN_WIDTH)]
    pub bin: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum KernelArg {
    Maxent,
    Piecewise,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ReportKind {
    Concentration,
    CdfBounds,
}

#[derive(Clone, Debug, Args, Serialize)]
pub struct AlignArgs {
    #[arg(long, value_enum, default_value_t = KernelArg::Maxent)]
    pub kernel: KernelArg,
    #[arg(long, default_value_t = DEFAULT_GRID_POINTS)]
    pub grid_points: usize,
    #[arg(long, value_enum, value_delimiter = ',', default_value = "concentration")]
    pub report: Vec<ReportKind>,
    /// Apply the two-point rule at the prior mean too (no uniform column there).
    #[arg(long)]
    pub no_atom_exception: bool,
    /// Residual below which the system counts as solved.
    #[arg(long, default_value_t = 1e-9)]
    pub tol: f64,
}

#[derive(Clone, Debug, Args, Serialize)]
pub struct AppendixArgs {
    #[arg(long, default_value_t = DEFAULT_GRID_POINTS)]
    pub grid_points: usize,
}

#[derive(Clone, Debug, Args, Serialize)]
pub struct ReproduceArgs {
    /// Output directory; defaults to $MAXALIGN_OUT_DIR, then `./maxalign-out`.
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
    #[arg(long, default_value_t = DEFAULT_SEQUENCE_LENGTH)]
    pub sequence_length: usize,
    #[arg(long, default_value_t = DEFAULT_SAMPLES)]
    pub sequence_samples: u64,
    #[arg(long, default_value_t = 1_000_000)]
    pub simplex_samples: u64,
    #[arg(long, default_value_t = DEFAULT_GRID_POINTS)]
    pub grid_points: usize,
}

/// Everything that determines an output file.
#[derive(Clone, Debug)]
pub struct RunConfig {
    pub command: Command,
    pub seed: u64,
    pub format: Format,
    pub output: Option<PathBuf>,
}

impl From<Cli> for RunConfig {
    fn from(cli: Cli) -> Self {
        RunConfig { command: cli.command, seed: cli.seed, format: cli.format, output: cli.output }
    }
}

impl RunConfig {
    /// Subcommand arguments as a flat JSON object.
    pub fn parameters(&self) -> Value {
        match serde_json::to_value(&self.command).expect("arguments serialize") {
            Value::Object(mut outer) => outer.remove(self.command.name()).unwrap_or(Value::Null),
            other => other,
        }
    }

    pub fn provenance(&self) -> Provenance {
        Provenance::new(self.command.name().to_string(), self.seed, self.parameters())
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Provenance {
    pub tool: &'static str,
    pub version: &'static str,
    pub format_version: u32,
    pub command: String,
    pub seed: u64,
    pub parameters: Value,
}

impl Provenance {
    pub fn new(command: String, seed: u64, parameters: Value) -> Self {
        Provenance { tool: TOOL, version: VERSION, format_version: FORMAT_VERSION, command, seed, parameters }
    }
}

/// Failure of a run, carrying its exit code.
#[derive(Debug)]
pub struct RunError {
    pub code: i32,
    pub message: String,
}

impl From<Error> for RunError {
    fn from(e: Error) -> Self {
        RunError { code: exit_code(&e), message: e.to_string() }
    }
}

fn invalid(message: impl Into<String>) -> RunError {
    RunError { code: EXIT_INVALID, message: message.into() }
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::InvalidSupport(_)
        | Error::InvalidDistribution(_)
        | Error::SupportMismatch
        | Error::AbsoluteContinuity { .. }
        | Error::InvalidArgument(_)
        | Error::ConstraintInfeasible { .. }
        | Error::TableTooLarge { .. }
        | Error::GridMismatch => EXIT_INVALID,
        Error::NumericalFailure { .. } | Error::UnstableEstimate { .. } => EXIT_NUMERICAL,
        Error::EmptyConditioningEvent { .. } | Error::NoSurvivors { .. } | Error::Infeasible { .. } => EXIT_INFEASIBLE,
    }
}

/// A computed result, renderable as JSON or as a CSV table.
pub struct Output {
    pub json: Value,
    pub csv_header: Vec<String>,
    pub csv_rows: Vec<Vec<String>>,
}

impl Output {
    fn table(json: Value, header: &[&str], rows: Vec<Vec<String>>) -> Self {
        Output { json, csv_header: header.iter().map(|s| s.to_string()).collect(), csv_rows: rows }
    }
}

/// Renders `output` under a provenance header.
pub fn render(provenance: &Provenance, format: Format, output: &Output) -> String {
    match format {
        Format::Json => {
            let doc = json!({ "provenance": provenance, "result": output.json });
            let mut s = serde_json::to_string_pretty(&doc).expect("json");
            s.push('\n');
            s
        }
        Format::Csv => {
            let mut s = String::new();
            s.push_str(&format!("# tool={}\n", provenance.tool));
            s.push_str(&format!("# version={}\n", provenance.version));
            s.push_str(&format!("# format_version={}\n", provenance.format_version));
            s.push_str(&format!("# command={}\n", provenance.command));
            s.push_str(&format!("# seed={}\n", provenance.seed));
            s.push_str(&format!("# parameters={}\n", provenance.parameters));
            let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
            w.write_record(&output.csv_header).expect("csv header");
            for row in &output.csv_rows {
                w.write_record(row).expect("csv row");
            }
            s.push_str(&String::from_utf8(w.into_inner().expect("csv flush")).expect("utf-8"));
            s
        }
    }
}

/// Shortest round-trip text; exponent form outside `[1e-4, 1e16)`.
fn num(x: f64) -> String {
    let x = if x == 0.0 { 0.0 } else { x };
    let a = x.abs();
    if a != 0.0 && a.is_finite() && !(1e-4..1e16).contains(&a) {
        format!("{x:e}")
    } else {
        format!("{x}")
    }
}

fn support_of(values: &[f64]) -> Result<Support, RunError> {
    Ok(Support::from_f64s(values)?)
}

fn distribution_rows(d: &Distribution, errors: Option<&[f64]>) -> Vec<Vec<String>> {
    d.support()
        .values()
        .iter()
        .zip(d.probs())
        .enumerate()
        .map(|(i, (v, p))| {
            let mut row = vec![num(*v), num(*p)];
            if let Some(e) = errors {
                row.push(num(e[i]));
            }
            row
        })
        .collect()
}

pub fn maxent(args: &MaxentArgs) -> Result<Output, RunError> {
    let support = support_of(&args.support)?;
    let sol = solve_for_expectation(args.epsilon, &support, args.tol)?;
    let json = json!({
        "epsilon": args.epsilon,
        "beta": if sol.beta.is_finite() { json!(sol.beta) } else { json!(sol.beta.to_string()) },
        "boundary": sol.boundary,
        "iterations": sol.iterations,
        "support": support.values(),
        "probabilities": sol.distribution.probs(),
        "entropy": sol.distribution.entropy(),
        "achieved_expectation": sol.distribution.expectation(),
    });
    Ok(Output::table(json, &["value", "prob"], distribution_rows(&sol.distribution, None)))
}

pub fn condition(args: &ConditionArgs, seed: u64) -> Result<Output, RunError> {
    let support = support_of(&args.support)?;
    let method = if args.exact { Method::Exact } else { args.method };
    let maxent = solve_for_expectation(args.target_mean, &support, 1e-12).ok().map(|s| s.distribution);
    let (distribution, errors, details) = match (method, args.window) {
        (Method::Exact, None) => {
            let n = args.n as f64;
            let exact = args.target_mean * n;
            let target_sum = if (exact - exact.round()).abs() <= 1e-9 && support.integer_values().is_some() {
                exact.round() as i64
            } else {
                sum_distribution(args.n, &support)?
                    .nearest_attainable_sum(args.target_mean)
                    .ok_or_else(|| invalid("no attainable sum for this support"))?
            };
            let d = conditional_face_distribution(args.n, target_sum, &support)?;
            (d, None, json!({ "target_sum": target_sum }))
        }
        (Method::Exact, Some(w)) => {
            let d = window_conditional_face_distribution(args.n, args.target_mean, w, &support)?;
            let p = mean_window_probability(args.n, args.target_mean, w, &support)?;
            (d, None, json!({ "window": w, "window_probability": p }))
        }
        (mc, window) => {
            let w = window.ok_or_else(|| invalid("--window is required for the sampling methods"))?;
            let est = match mc {
                Method::Rejection => {
                    rejection_conditioner(&support, args.n, args.target_mean, w, args.max_draws, seed)?
                }
                _ => tilted_conditioner(&support, args.n, args.target_mean, w, args.draws, seed)?,
            };
            let details = json!({
                "window": w,
                "draws": est.draws,
                "survivors": est.survivors,
                "acceptance_rate": est.acceptance_rate,
                "effective_sample_size": est.effective_sample_size,
                "tilt_beta": est.beta,
                "standard_errors": est.standard_errors,
            });
            (est.distribution, Some(est.standard_errors), details)
        }
    };
    let tv = maxent.as_ref().map(|m| distribution.tv_distance(m)).transpose()?;
    let json = json!({
        "n": args.n,
        "target_mean": args.target_mean,
        "method": method,
        "support": support.values(),
        "probabilities": distribution.probs(),
        "tv_to_maxent": tv,
        "details": details,
    });
    let header: &[&str] = if errors.is_some() { &["value", "prob", "standard_error"] } else { &["value", "prob"] };
    Ok(Output::table(json, header, distribution_rows(&distribution, errors.as_deref())))
}

fn histogram_rows(h: &Histogram) -> Vec<Vec<String>> {
    h.counts()
        .iter()
        .map(|(&b, &c)| vec![num(h.left_edge(b)), num(h.right_edge(b)), c.to_string(), num(h.frequency(b))])
        .collect()
}

fn histogram_json(h: &Histogram) -> Value {
    let bins: Vec<Value> = h
        .counts()
        .iter()
        .map(|(&b, &c)| json!({ "bin_left": h.left_edge(b), "bin_right": h.right_edge(b), "count": c, "frequency": h.frequency(b) }))
        .collect();
    json!({ "bin_width": h.bin_width(), "origin": h.origin(), "total": h.total(), "bins": bins })
}

fn evidence_sample(args: &EvidenceArgs, seed: u64) -> Result<EvidenceSample, RunError> {
    let support = Support::die();
    Ok(match args.source {
        Source::Sequences => evidence_histogram_sequences(&support, args.n, args.samples, args.bin, seed)?,
        Source::Simplex => evidence_histogram_simplex(&support, args.samples, args.bin, seed)?,
    })
}

fn evidence_summary(s: &EvidenceSample) -> Result<Value, RunError> {
    let (defect, defect_se) = s.means.symmetry_defect(3.5)?;
    Ok(json!({
        "source": s.source,
        "n": s.n,
        "samples": s.samples(),
        "sample_mean": s.sample_mean,
        "sample_sd": s.sample_sd,
        "standard_error": s.standard_error(),
        "mass_within_0.07": s.means.mass_within(3.5 - 0.07, 3.5 + 0.07),
        "symmetry_defect": defect,
        "symmetry_defect_standard_error": defect_se,
    }))
}

pub fn evidence(args: &EvidenceArgs, seed: u64) -> Result<Output, RunError> {
    let s = evidence_sample(args, seed)?;
    let mut json = evidence_summary(&s)?;
    json["histogram"] = histogram_json(&s.means);
    Ok(Output::table(json, &["bin_left", "bin_right", "count", "frequency"], histogram_rows(&s.means)))
}

#[derive(Serialize)]
struct Interval {
    quantity: String,
    lo: f64,
    hi: f64,
    reference: Option<f64>,
}

fn policy_of(no_atom_exception: bool) -> AtomPolicy {
    if no_atom_exception {
        AtomPolicy::NoException
    } else {
        AtomPolicy::UniformAtom
    }
}

fn interval_rows(intervals: &[Interval]) -> Vec<Vec<String>> {
    intervals
        .iter()
        .map(|i| vec![i.quantity.clone(), num(i.lo), num(i.hi), i.reference.map(num).unwrap_or_default()])
        .collect()
}

pub fn align(args: &AlignArgs) -> Result<Output, RunError> {
    if args.report.is_empty() {
        return Err(invalid("--report needs at least one of concentration, cdf-bounds"));
    }
    let policy = policy_of(args.no_atom_exception);
    let kind = match args.kernel {
        KernelArg::Maxent => KernelKind::Maxent,
        KernelArg::Piecewise => KernelKind::Piecewise,
    };
    let mut json = json!({ "kernel": kind, "grid_points": args.grid_points });
    let mut intervals = Vec::new();
    if args.report.contains(&ReportKind::Concentration) {
        let r = alignment_report(kind, args.grid_points, policy, args.tol)?;
        intervals.push(Interval {
            quantity: "residual".into(),
            lo: r.residual,
            hi: r.residual,
            reference: Some(args.tol),
        });
        intervals.push(Interval {
            quantity: "concentration".into(),
            lo: r.concentration,
            hi: r.concentration,
            reference: None,
        });
        if let Some((lo, hi)) = r.atom_mass_range {
            intervals.push(Interval { quantity: "atom_mass".into(), lo, hi, reference: Some(r.atom_mass) });
        }
        json["concentration"] = serde_json::to_value(&r).expect("report");
    }
    if args.report.contains(&ReportKind::CdfBounds) {
        let support = Support::die();
        let grid = EvidenceGrid::default_for(&support, args.grid_points)?;
        let kernel: Kernel = match kind {
            KernelKind::Maxent => maxent_kernel(&grid, &support)?,
            KernelKind::Piecewise => piecewise_linear_kernel(&grid, &support, policy)?,
        };
        let mut bounds = Vec::new();
        for t in 1..=5 {
            let (lo, hi) = bound_functional(&kernel, &cdf_coefficients(&grid, &(t as f64)))?;
            bounds.push(Interval { quantity: format!("cdf_at_{t}"), lo, hi, reference: None });
        }
        let mut integrals = Vec::new();
        for k in 1..=5 {
            let c = trapezoid_cdf_integral_coefficients(&grid, &(k as f64), &(k as f64 + 1.0));
            let (lo, hi) = bound_functional(&kernel, &c)?;
            integrals.push(Interval {
                quantity: format!("cdf_integral_{k}_{}", k + 1),
                lo,
                hi,
                reference: Some(k as f64 / 6.0),
            });
        }
        json["cdf_bounds"] = serde_json::to_value(&bounds).expect("bounds");
        json["cdf_integrals"] = serde_json::to_value(&integrals).expect("integrals");
        json["grid_step"] = json!(grid.step());
        intervals.extend(bounds);
        intervals.extend(integrals);
    }
    Ok(Output::table(json, &["quantity", "lo", "hi", "reference"], interval_rows(&intervals)))
}

pub fn appendix(args: &AppendixArgs) -> Result<Output, RunError> {
    let r = two_point_report(args.grid_points)?;
    let mut intervals: Vec<Interval> = r
        .forced_integrals
        .iter()
        .map(|f| Interval {
            quantity: format!("cdf_integral_{}_{}", f.k, f.k + 1),
            lo: f.lo,
            hi: f.hi,
            reference: Some(f.expected),
        })
        .collect();
    for b in &r.cdf_bounds {
        let tag = match b.atom_policy {
            AtomPolicy::NoException => "no_atom",
            AtomPolicy::UniformAtom => "uniform_atom",
        };
        intervals.push(Interval {
            quantity: format!("cdf_at_{}_{tag}", b.threshold),
            lo: b.lo,
            hi: b.hi,
            reference: Some(b.published),
        });
    }
    let mut json = serde_json::to_value(&r).expect("report");
    json["forced_integrals_hold"] = json!(r.forced_integrals_hold());
    json["published_values_feasible"] = json!({
        "no_exception": r.published_values_feasible(AtomPolicy::NoException),
        "uniform_atom": r.published_values_feasible(AtomPolicy::UniformAtom),
    });
    Ok(Output::table(json, &["quantity", "lo", "hi", "reference"], interval_rows(&intervals)))
}

/// Runs `config` and writes its output; returns the exit code.
pub fn run(config: &RunConfig) -> i32 {
    let start = Instant::now();
    let code = match execute(config) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("maxalign {}: {}", config.command.name(), e.message);
            e.code
        }
    };
    eprintln!("maxalign {}: wall time {:.3} s", config.command.name(), start.elapsed().as_secs_f64());
    code
}

fn execute(config: &RunConfig) -> Result<(), RunError> {
    let output = match &config.command {
        Command::Maxent(a) => maxent(a)?,
        Command::Condition(a) => condition(a, config.seed)?,
        Command::Evidence(a) => evidence(a, config.seed)?,
        Command::Align(a) => align(a)?,
        Command::Appendix(a) => appendix(a)?,
        Command::Reproduce(a) => {
            let dir = match &a.out_dir {
                Some(d) => d.clone(),
                None => {
                    std::env::var_os(OUT_DIR_ENV).map(PathBuf::from).unwrap_or_else(|| PathBuf::from("maxalign-out"))
                }
            };
            let manifest = reproduce_all(&dir, a, config.seed)?;
            return if manifest.entries.iter().all(|e| e.status == "ok") {
                Ok(())
            } else {
                Err(RunError {
                    code: EXIT_NUMERICAL,
                    message: format!("some experiments failed; see {}", dir.join(MANIFEST).display()),
                })
            };
        }
    };
    let text = render(&config.provenance(), config.format, &output);
    match &config.output {
        Some(path) => fs::write(path, text).map_err(|e| invalid(format!("cannot write {}: {e}", path.display()))),
        None => std::io::stdout().write_all(text.as_bytes()).map_err(|e| invalid(format!("cannot write output: {e}"))),
    }
}

pub const MANIFEST: &str = "manifest.json";

#[derive(Clone, Debug, Serialize)]
pub struct ManifestEntry {
    pub name: &'static str,
    pub file: &'static str,
    pub anchor: &'static str,
    pub status: String,
    pub error: Option<String>,
    pub wall_time_seconds: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct Manifest {
    pub tool: &'static str,
    pub version: &'static str,
    pub format_version: u32,
    pub seed: u64,
    pub entries: Vec<ManifestEntry>,
}

/// Sample lengths and mean half-widths of the window-probability table.
pub const WINDOW_TABLE_LENGTHS: [usize; 6] = [10, 30, 100, 300, 1000, 3000];
pub const WINDOW_TABLE_HALFWIDTHS: [f64; 3] = [0.05, 0.1, 0.2];

fn window_table() -> Result<Output, RunError> {
    let support = Support::die();
    let mut rows = Vec::new();
    let mut entries = Vec::new();
    for &n in &WINDOW_TABLE_LENGTHS {
        for &h in &WINDOW_TABLE_HALFWIDTHS {
            let p = mean_window_probability(n, 3.5, h, &support)?;
            rows.push(vec![n.to_string(), num(h), num(p)]);
            entries.push(json!({ "n": n, "halfwidth": h, "probability": p }));
        }
    }
    Ok(Output::table(json!({ "center": 3.5, "rows": entries }), &["n", "halfwidth", "probability"], rows))
}

fn evidence_histograms(a: &ReproduceArgs, seed: u64) -> Result<Output, RunError> {
    let seq = EvidenceArgs {
        source: Source::Sequences,
        n: a.sequence_length,
        samples: a.sequence_samples,
        bin: DEFAULT_BIN_WIDTH,
    };
    let simplex = EvidenceArgs { source: Source::Simplex, n: 0, samples: a.simplex_samples, bin: DEFAULT_BIN_WIDTH };
    let mut rows = Vec::new();
    let mut summaries = Vec::new();
    for (tag, args) in [("sequences", &seq), ("simplex", &simplex)] {
        let s = evidence_sample(args, seed)?;
        summaries.push(evidence_summary(&s)?);
        rows.extend(histogram_rows(&s.means).into_iter().map(|mut r| {
            r.insert(0, tag.to_string());
            r
        }));
    }
    Ok(Output::table(
        json!({ "summaries": summaries }),
        &["source", "bin_left", "bin_right", "count", "frequency"],
        rows,
    ))
}

type Experiment<'a> = Box<dyn Fn() -> Result<Output, RunError> + 'a>;

struct Planned<'a> {
    name: &'static str,
    file: &'static str,
    anchor: &'static str,
    format: Format,
    parameters: Value,
    run: Experiment<'a>,
}

/// Regenerates every experiment into `dir` with fixed file names and writes
/// [`MANIFEST`]. Data files depend only on the arguments and seed; wall
/// times are recorded in the manifest alone.
pub fn reproduce_all(dir: &Path, a: &ReproduceArgs, seed: u64) -> Result<Manifest, RunError> {
    fs::create_dir_all(dir).map_err(|e| invalid(format!("cannot create {}: {e}", dir.display())))?;
    let maxent_args = MaxentArgs { epsilon: 5.0, support: vec![1.0, 2.0, 3.0, 4.0, 5.0, 6.0], tol: 1e-12 };
    let align_args = AlignArgs {
        kernel: KernelArg::Maxent,
        grid_points: a.grid_points,
        report: vec![ReportKind::Concentration],
        no_atom_exception: false,
        tol: 1e-9,
    };
    let appendix_args = AppendixArgs { grid_points: a.grid_points };
    let plan = vec![
        Planned {
            name: "maxent-e5",
            file: "maxent-e5.json",
            anchor: "maximum-entropy distribution of a die with expectation 5",
            format: Format::Json,
            parameters: serde_json::to_value(&maxent_args).expect("arguments"),
            run: Box::new(|| maxent(&maxent_args)),
        },
        Planned {
            name: "window-table",
            file: "window-table.csv",
            anchor: "probability that the sample mean of n fair rolls lies near 3.5",
            format: Format::Csv,
            parameters: json!({ "center": 3.5, "lengths": WINDOW_TABLE_LENGTHS, "halfwidths": WINDOW_TABLE_HALFWIDTHS }),
            run: Box::new(window_table),
        },
        Planned {
            name: "evidence-histograms",
            file: "evidence-histograms.csv",
            anchor: "evidence distributions induced by the sequence and simplex extended spaces",
            format: Format::Csv,
            parameters: json!({
                "sequence_length": a.sequence_length,
                "sequence_samples": a.sequence_samples,
                "simplex_samples": a.simplex_samples,
                "bin": DEFAULT_BIN_WIDTH,
            }),
            run: Box::new(|| evidence_histograms(a, seed)),
        },
        Planned {
            name: "maxent-concentration",
            file: "maxent-concentration.json",
            anchor: "alignment of conditioning with MaxEnt forces the evidence prior onto the prior mean",
            format: Format::Json,
            parameters: serde_json::to_value(&align_args).expect("arguments"),
            run: Box::new(|| align(&align_args)),
        },
        Planned {
            name: "two-point-bounds",
            file: "two-point-bounds.json",
            anchor: "forced integrals and feasible CDF intervals of the two-point update rule",
            format: Format::Json,
            parameters: serde_json::to_value(&appendix_args).expect("arguments"),
            run: Box::new(|| appendix(&appendix_args)),
        },
    ];
    let mut entries = Vec::new();
    for step in plan {
        let start = Instant::now();
        let provenance = Provenance::new(format!("reproduce/{}", step.name), seed, step.parameters);
        let result = (step.run)().and_then(|out| {
            fs::write(dir.join(step.file), render(&provenance, step.format, &out))
                .map_err(|e| invalid(format!("cannot write {}: {e}", step.file)))
        });
        let wall = start.elapsed().as_secs_f64();
        eprintln!("maxalign reproduce: {} in {wall:.3} s", step.name);
        entries.push(ManifestEntry {
            name: step.name,
            file: step.file,
            anchor: step.anchor,
            status: if result.is_ok() { "ok".into() } else { "failed".into() },
            error: result.err().map(|e| e.message),
            wall_time_seconds: wall,
        });
    }
    let manifest = Manifest { tool: TOOL, version: VERSION, format_version: FORMAT_VERSION, seed, entries };
    let mut text = serde_json::to_string_pretty(&manifest).expect("manifest");
    text.push('\n');
    fs::write(dir.join(MANIFEST), text).map_err(|e| invalid(format!("cannot write manifest: {e}")))?;
    Ok(manifest)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes_follow_error_class() {
        assert_eq!(exit_code(&Error::ConstraintInfeasible { epsilon: 7.0, min: 1.0, max: 6.0 }), EXIT_INVALID);
        assert_eq!(exit_code(&Error::UnstableEstimate { ess: 1.0, min: 10.0 }), EXIT_NUMERICAL);
        assert_eq!(exit_code(&Error::NoSurvivors { draws: 5 }), EXIT_INFEASIBLE);
        assert_eq!(exit_code(&Error::Infeasible { residual: 0.1, certificate: vec![] }), EXIT_INFEASIBLE);
    }

    #[test]
    fn numbers_round_trip() {
        assert_eq!(num(-0.0), "0");
        assert_eq!(num(0.25), "0.25");
        assert_eq!(num(3.3306690738754696e-16), "3.3306690738754696e-16");
        for x in [1e-300, 0.1, 1.0 / 3.0, 12345.678, 2e20] {
            assert_eq!(num(x).parse::<f64>().unwrap(), x);
        }
    }

    #[test]
    fn parameters_are_the_subcommand_arguments() {
        let cli = Cli::parse_from(["maxalign", "--seed", "9", "evidence", "--source", "simplex", "--samples", "10"]);
        let config = RunConfig::from(cli);
        let p = config.parameters();
        assert_eq!(p["source"], "simplex");
        assert_eq!(p["samples"], 10);
        assert_eq!(config.provenance().seed, 9);
    }
}
