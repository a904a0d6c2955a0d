//! Subcommand surfaces and implementations.
//!
//! Reports are emitted as canonical JSON (declaration key order, floats with
//! 17 significant digits) so identical invocations produce byte-identical
//! output. The `POLYSTAB_EPS` environment variable overrides the default
//! geometric tolerance wherever `--eps` is not given.

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use polystab::acceptance::{run_all, AcceptanceConfig};
use polystab::convexify::{self, ConvexifyError, FlipPolicy, FlipTrace};
use polystab::corpus;
use polystab::files;
use polystab::jsonfmt;
use polystab::manifold::{self, RatioEstimate, StabilityConstants};
use polystab::polygon::{PolygonMetrics, DEFAULT_EPS};
use polystab::spectral;

pub enum Failure {
    /// Bad input or usage; exit code 1.
    Input(String),
    /// A mathematical invariant or verification check failed; exit code 2.
    Violation(String),
}

#[derive(Parser)]
#[command(
    name = "polystab",
    version,
    about = "Polygon stability toolkit: isoperimetric deficit, pocket flips, spectral verification, stability constants"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand)]
pub enum Command {
    /// Analyze a polygon file: metrics, flip gain, and the stability inequality
    Analyze(AnalyzeArgs),
    /// Convexify a polygon by pocket flips (single file or random corpus)
    Convexify(ConvexifyArgs),
    /// Verify spectral identities, inequalities, and derivative closed forms
    Spectral(SpectralArgs),
    /// Estimate the ratio supremum and assemble the stability constants
    EstimateConstant(EstimateArgs),
    /// Run the acceptance suite
    Verify(VerifyArgs),
}

pub fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Analyze(args) => run_analyze(args),
        Command::Convexify(args) => run_convexify(args),
        Command::Spectral(args) => run_spectral(args),
        Command::EstimateConstant(args) => run_estimate(args),
        Command::Verify(args) => run_verify(args),
    }
}

fn resolve_eps(flag: Option<f64>) -> Result<f64, Failure> {
    if let Some(eps) = flag {
        return Ok(eps);
    }
    match std::env::var("POLYSTAB_EPS") {
        Ok(text) => text
            .parse::<f64>()
            .map_err(|_| Failure::Input(format!("POLYSTAB_EPS is not a number: `{text}`"))),
        Err(_) => Ok(DEFAULT_EPS),
    }
}

/// Sizes from `--n N` or `--n-range A:B` (also accepts `A..B`).
fn select_sizes(n: Option<usize>, range: Option<&str>) -> Result<Vec<usize>, Failure> {
    match (n, range) {
        (Some(_), Some(_)) => Err(Failure::Input(
            "give either --n or --n-range, not both".into(),
        )),
        (Some(n), None) => {
            check_size(n)?;
            Ok(vec![n])
        }
        (None, Some(text)) => {
            let parts: Vec<&str> = if text.contains("..") {
                text.splitn(2, "..").collect()
            } else {
                text.splitn(2, ':').collect()
            };
            if parts.len() != 2 {
                return Err(Failure::Input(format!(
                    "range must look like A:B, got `{text}`"
                )));
            }
            let lo: usize = parts[0]
                .parse()
                .map_err(|_| Failure::Input(format!("bad range start `{}`", parts[0])))?;
            let hi: usize = parts[1]
                .parse()
                .map_err(|_| Failure::Input(format!("bad range end `{}`", parts[1])))?;
            check_size(lo)?;
            if hi < lo {
                return Err(Failure::Input(format!("empty range `{text}`")));
            }
            Ok((lo..=hi).collect())
        }
        (None, None) => Err(Failure::Input("one of --n or --n-range is required".into())),
    }
}

fn check_size(n: usize) -> Result<(), Failure> {
    if n < 3 {
        return Err(Failure::Input(format!("polygon size must be >= 3, got {n}")));
    }
    Ok(())
}

fn emit(text: &str, out: Option<&Path>) -> Result<(), Failure> {
    match out {
        Some(path) => fs::write(path, text)
            .map_err(|e| Failure::Input(format!("cannot write {}: {e}", path.display()))),
        None => {
            println!("{text}");
            Ok(())
        }
    }
}

fn to_json<T: Serialize>(value: &T) -> Result<String, Failure> {
    jsonfmt::to_string(value).map_err(|e| Failure::Input(format!("serialization failed: {e}")))
}

// ───────────────────────── analyze ─────────────────────────

#[derive(Args)]
pub struct AnalyzeArgs {
    /// Polygon file (JSON or CSV)
    pub path: PathBuf,
    /// Fail instead of omitting the flip quantities when they cannot be computed
    #[arg(long)]
    pub tau: bool,
    /// Write the report here instead of stdout
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Geometric tolerance (default: POLYSTAB_EPS or 1e-9)
    #[arg(long)]
    pub eps: Option<f64>,
    /// Seed for the stability-constant estimate
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    /// Restarts for the stability-constant estimate
    #[arg(long, default_value_t = 16)]
    pub restarts: usize,
    /// Radius of the excluded ball around the regular configuration
    #[arg(long, default_value_t = 1e-3)]
    pub exclusion: f64,
}

#[derive(Serialize)]
struct InequalityCheck {
    /// `τ + σ_s² + σ_r²`.
    lhs: f64,
    /// `C_theorem · δ`.
    rhs: f64,
    constant_used: f64,
    satisfied: bool,
}

#[derive(Serialize)]
struct Provenance {
    input: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    name: Option<String>,
    eps: f64,
    seed: u64,
}

#[derive(Serialize)]
struct StabilityReport {
    metrics: PolygonMetrics,
    #[serde(skip_serializing_if = "Option::is_none")]
    tau: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    alpha_c: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    inequality_check: Option<InequalityCheck>,
    provenance: Provenance,
}

fn run_analyze(args: AnalyzeArgs) -> Result<(), Failure> {
    if args.restarts == 0 {
        return Err(Failure::Input("--restarts must be at least 1".into()));
    }
    let eps = resolve_eps(args.eps)?;
    let (polygon, name) =
        files::read_polygon_file(&args.path, eps).map_err(|e| Failure::Input(e.to_string()))?;
    let metrics = polygon
        .metrics()
        .map_err(|e| Failure::Input(e.to_string()))?;

    let (tau, alpha_c) =
        match convexify::convexify(&polygon, FlipPolicy::FirstPocket, convexify::DEFAULT_MAX_STEPS)
        {
            Ok(trace) => (Some(trace.tau), Some(trace.alpha_c)),
            Err(ConvexifyError::StepBudgetExceeded { max_steps, .. }) => {
                if args.tau {
                    return Err(Failure::Violation(format!(
                        "flip budget of {max_steps} steps exhausted"
                    )));
                }
                (None, None)
            }
            Err(e) => return Err(Failure::Input(e.to_string())),
        };

    let inequality_check = match tau {
        Some(tau_value) => {
            let estimate =
                manifold::estimate_ratio_sup(metrics.n, args.restarts, args.seed, args.exclusion)
                    .map_err(|e| Failure::Violation(e.to_string()))?;
            let constants = manifold::combine_constants(metrics.n, estimate.sup_ratio)
                .map_err(|e| Failure::Violation(e.to_string()))?;
            let lhs = tau_value + metrics.variation;
            let rhs = constants.c_theorem * metrics.delta;
            Some(InequalityCheck {
                lhs,
                rhs,
                constant_used: constants.c_theorem,
                satisfied: lhs <= rhs + 1e-9 * rhs.max(1.0),
            })
        }
        None => None,
    };

    let report = StabilityReport {
        metrics,
        tau,
        alpha_c,
        inequality_check,
        provenance: Provenance {
            input: args.path.display().to_string(),
            name,
            eps,
            seed: args.seed,
        },
    };
    emit(&to_json(&report)?, args.out.as_deref())?;
    if let Some(check) = &report.inequality_check {
        if !check.satisfied {
            return Err(Failure::Violation(format!(
                "stability inequality violated: {} > {}",
                check.lhs, check.rhs
            )));
        }
    }
    Ok(())
}

// ───────────────────────── convexify ─────────────────────────

#[derive(Clone, Copy, ValueEnum)]
pub enum PolicyArg {
    FirstPocket,
    LargestPocket,
}

impl From<PolicyArg> for FlipPolicy {
    fn from(p: PolicyArg) -> Self {
        match p {
            PolicyArg::FirstPocket => FlipPolicy::FirstPocket,
            PolicyArg::LargestPocket => FlipPolicy::LargestPocket,
        }
    }
}

#[derive(Args)]
pub struct ConvexifyArgs {
    /// Polygon file (omit with --random)
    pub path: Option<PathBuf>,
    /// Write the full trace JSON here
    #[arg(long)]
    pub trace: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = PolicyArg::FirstPocket)]
    pub policy: PolicyArg,
    #[arg(long, default_value_t = convexify::DEFAULT_MAX_STEPS)]
    pub max_steps: usize,
    /// Convexify a seeded random corpus instead of a file
    #[arg(long)]
    pub random: bool,
    /// Corpus polygon size (with --random)
    #[arg(long)]
    pub n: Option<usize>,
    /// Corpus size (with --random)
    #[arg(long)]
    pub count: Option<usize>,
    /// Corpus seed (with --random)
    #[arg(long)]
    pub seed: Option<u64>,
    /// Geometric tolerance (default: POLYSTAB_EPS or 1e-9)
    #[arg(long)]
    pub eps: Option<f64>,
}

#[derive(Serialize)]
struct ConvexifySummary {
    steps: usize,
    tau: f64,
    alpha_c: f64,
    complete: bool,
}

#[derive(Serialize)]
struct RandomRunSummary {
    n: usize,
    count: usize,
    seed: u64,
    completed: usize,
    all_final_convex: bool,
    max_steps_used: usize,
}

fn write_trace(trace: &FlipTrace, out: Option<&Path>) -> Result<(), Failure> {
    if let Some(path) = out {
        let text = to_json(&trace.to_export())?;
        fs::write(path, text)
            .map_err(|e| Failure::Input(format!("cannot write {}: {e}", path.display())))?;
    }
    Ok(())
}

fn run_convexify(args: ConvexifyArgs) -> Result<(), Failure> {
    let eps = resolve_eps(args.eps)?;
    if args.random {
        if args.path.is_some() {
            return Err(Failure::Input(
                "--random and a polygon file are mutually exclusive".into(),
            ));
        }
        let n = args.n.unwrap_or(10);
        check_size(n)?;
        let count = args.count.unwrap_or(200);
        let seed = args.seed.unwrap_or(3);
        let mut summary = RandomRunSummary {
            n,
            count,
            seed,
            completed: 0,
            all_final_convex: true,
            max_steps_used: 0,
        };
        for index in 0..count as u64 {
            let polygon = corpus::corpus_polygon(n, seed, index, eps);
            match convexify::convexify(&polygon, args.policy.into(), args.max_steps) {
                Ok(trace) => {
                    summary.completed += 1;
                    summary.max_steps_used = summary.max_steps_used.max(trace.steps.len());
                    if !trace.final_polygon.is_convex() {
                        summary.all_final_convex = false;
                    }
                }
                Err(_) => summary.all_final_convex = false,
            }
        }
        emit(&to_json(&summary)?, None)?;
        if summary.completed < count || !summary.all_final_convex {
            return Err(Failure::Violation(format!(
                "{} of {} corpus polygons failed to convexify",
                count - summary.completed,
                count
            )));
        }
        return Ok(());
    }

    let path = args
        .path
        .as_ref()
        .ok_or_else(|| Failure::Input("a polygon file (or --random) is required".into()))?;
    let (polygon, _) =
        files::read_polygon_file(path, eps).map_err(|e| Failure::Input(e.to_string()))?;
    match convexify::convexify(&polygon, args.policy.into(), args.max_steps) {
        Ok(trace) => {
            write_trace(&trace, args.trace.as_deref())?;
            let summary = ConvexifySummary {
                steps: trace.steps.len(),
                tau: trace.tau,
                alpha_c: trace.alpha_c,
                complete: true,
            };
            emit(&to_json(&summary)?, None)
        }
        Err(ConvexifyError::StepBudgetExceeded { max_steps, trace }) => {
            write_trace(&trace, args.trace.as_deref())?;
            let summary = ConvexifySummary {
                steps: trace.steps.len(),
                tau: trace.tau,
                alpha_c: trace.alpha_c,
                complete: false,
            };
            emit(&to_json(&summary)?, None)?;
            Err(Failure::Violation(format!(
                "flip budget of {max_steps} steps exhausted"
            )))
        }
        Err(e) => Err(Failure::Input(e.to_string())),
    }
}

// ───────────────────────── spectral ─────────────────────────

#[derive(Args)]
pub struct SpectralArgs {
    #[arg(long)]
    pub n: Option<usize>,
    /// Inclusive size range A:B
    #[arg(long = "n-range")]
    pub n_range: Option<String>,
    /// Random vectors for the quadratic-form inequality
    #[arg(long, default_value_t = 10_000)]
    pub samples: usize,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    /// Tolerance for the exact matrix identities
    #[arg(long, default_value_t = spectral::IDENTITY_TOL)]
    pub tol: f64,
    /// Central-difference step for the derivative checks
    #[arg(long = "fd-step", default_value_t = spectral::FD_STEP)]
    pub fd_step: f64,
    /// Write the eigenvalue table (n,k,lambda,mu) here
    #[arg(long)]
    pub csv: Option<PathBuf>,
    /// Write ε-scaling curves (f/ε², g/ε² along tangent directions) here
    #[arg(long = "scaling-csv")]
    pub scaling_csv: Option<PathBuf>,
    /// Tangent directions per size in the scaling curves
    #[arg(long, default_value_t = 10)]
    pub directions: usize,
    /// Write the JSON report here instead of stdout
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Serialize)]
struct SpectralEntry {
    n: usize,
    lambda: Vec<f64>,
    mu: Vec<f64>,
    c_tilde: f64,
    rayleigh_floor: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    identities: Option<spectral::IdentityReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    sampling: Option<spectral::UleVReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    min_rayleigh: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    fd: Option<spectral::FdReport>,
    failures: Vec<String>,
}

#[derive(Serialize)]
struct SpectralReport {
    entries: Vec<SpectralEntry>,
    passed: bool,
}

fn run_spectral(args: SpectralArgs) -> Result<(), Failure> {
    if args.samples == 0 {
        return Err(Failure::Input("--samples must be at least 1".into()));
    }
    let sizes = select_sizes(args.n, args.n_range.as_deref())?;
    let mut entries = Vec::new();
    let mut csv = String::from("n,k,lambda,mu\n");
    let mut passed = true;
    for &n in &sizes {
        let bundle = spectral::build_bundle(n);
        let mut failures = Vec::new();
        let identities = match spectral::verify_identities(&bundle, args.tol) {
            Ok(report) => Some(report),
            Err(e) => {
                failures.push(e.to_string());
                None
            }
        };
        let sampling = match spectral::check_u_le_v(
            &bundle,
            args.samples,
            args.seed,
            spectral::INEQUALITY_TOL,
        ) {
            Ok(report) => Some(report),
            Err(e) => {
                failures.push(e.to_string());
                None
            }
        };
        let min_rayleigh = match spectral::min_rayleigh_u_on_htilde(&bundle) {
            Ok(least) => Some(least),
            Err(e) => {
                failures.push(e.to_string());
                None
            }
        };
        let fd = match spectral::gradient_and_hessian_fd_check(n, args.fd_step) {
            Ok(report) => Some(report),
            Err(e) => {
                failures.push(e.to_string());
                None
            }
        };
        for k in 0..n {
            csv.push_str(&format!(
                "{n},{k},{},{}\n",
                jsonfmt::format_float(bundle.lambda[k]),
                jsonfmt::format_float(bundle.mu[k])
            ));
        }
        passed &= failures.is_empty();
        entries.push(SpectralEntry {
            n,
            lambda: bundle.lambda.clone(),
            mu: bundle.mu.clone(),
            c_tilde: bundle.c_tilde,
            rayleigh_floor: spectral::rayleigh_floor(&bundle),
            identities,
            sampling,
            min_rayleigh,
            fd,
            failures,
        });
    }
    if let Some(path) = &args.csv {
        fs::write(path, &csv)
            .map_err(|e| Failure::Input(format!("cannot write {}: {e}", path.display())))?;
    }
    if let Some(path) = &args.scaling_csv {
        let mut scaling =
            String::from("n,direction,epsilon,f_over_eps2,g_over_eps2,half_form_f,half_form_g\n");
        for &n in &sizes {
            for p in manifold::scaling_curves(n, args.directions, args.seed) {
                scaling.push_str(&format!(
                    "{n},{},{},{},{},{},{}\n",
                    p.direction,
                    jsonfmt::format_float(p.epsilon),
                    jsonfmt::format_float(p.f_over_eps2),
                    jsonfmt::format_float(p.g_over_eps2),
                    jsonfmt::format_float(p.half_form_f),
                    jsonfmt::format_float(p.half_form_g)
                ));
            }
        }
        fs::write(path, &scaling)
            .map_err(|e| Failure::Input(format!("cannot write {}: {e}", path.display())))?;
    }
    let report = SpectralReport { entries, passed };
    emit(&to_json(&report)?, args.out.as_deref())?;
    if !report.passed {
        return Err(Failure::Violation(
            "one or more spectral checks failed".into(),
        ));
    }
    Ok(())
}

// ──────────────────── estimate-constant ────────────────────

#[derive(Args)]
pub struct EstimateArgs {
    #[arg(long)]
    pub n: Option<usize>,
    /// Inclusive size range A:B
    #[arg(long = "n-range")]
    pub n_range: Option<String>,
    #[arg(long, default_value_t = 16)]
    pub restarts: usize,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    /// Radius of the excluded ball around the regular configuration
    #[arg(long, default_value_t = 1e-3)]
    pub exclusion: f64,
    /// Write a (n,sup_ratio,limit_at_star) table here
    #[arg(long)]
    pub csv: Option<PathBuf>,
    /// Write the JSON report here instead of stdout
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Record per-restart ratio histories in the JSON output
    #[arg(long)]
    pub trajectories: bool,
}

#[derive(Serialize)]
struct EstimateEntry {
    estimate: RatioEstimate,
    constants: StabilityConstants,
}

fn run_estimate(args: EstimateArgs) -> Result<(), Failure> {
    if args.restarts == 0 {
        return Err(Failure::Input("--restarts must be at least 1".into()));
    }
    if args.exclusion <= 0.0 {
        return Err(Failure::Input("--exclusion must be positive".into()));
    }
    let sizes = select_sizes(args.n, args.n_range.as_deref())?;
    let mut entries = Vec::new();
    let mut csv = String::from("n,sup_ratio,limit_at_star\n");
    for &n in &sizes {
        let estimate = manifold::estimate_ratio_sup_with(
            n,
            args.restarts,
            args.seed,
            args.exclusion,
            args.trajectories,
        )
        .map_err(|e| Failure::Violation(e.to_string()))?;
        let constants = manifold::combine_constants(n, estimate.sup_ratio)
            .map_err(|e| Failure::Violation(e.to_string()))?;
        csv.push_str(&format!(
            "{n},{},{}\n",
            jsonfmt::format_float(estimate.sup_ratio),
            jsonfmt::format_float(estimate.limit_at_star)
        ));
        entries.push(EstimateEntry {
            estimate,
            constants,
        });
    }
    if let Some(path) = &args.csv {
        fs::write(path, &csv)
            .map_err(|e| Failure::Input(format!("cannot write {}: {e}", path.display())))?;
    }
    emit(&to_json(&entries)?, args.out.as_deref())
}

// ───────────────────────── verify ─────────────────────────

#[derive(Args)]
pub struct VerifyArgs {
    /// Capped sweep (sizes <= 16, corpora <= 50); the default
    #[arg(long, conflicts_with = "full")]
    pub quick: bool,
    /// Full sweep
    #[arg(long)]
    pub full: bool,
}

fn run_verify(args: VerifyArgs) -> Result<(), Failure> {
    let cfg = if args.full {
        AcceptanceConfig::full()
    } else {
        AcceptanceConfig::quick()
    };
    let outcomes = run_all(&cfg);
    let mut failed = 0;
    for outcome in &outcomes {
        // Timings go to stderr so stdout stays byte-stable.
        println!(
            "criterion {:2} ({}): {} — {}",
            outcome.id,
            outcome.name,
            if outcome.passed { "PASS" } else { "FAIL" },
            outcome.detail
        );
        eprintln!("criterion {:2}: {:.2}s", outcome.id, outcome.seconds);
        if !outcome.passed {
            failed += 1;
        }
    }
    println!(
        "acceptance: {}/{} criteria passed ({})",
        outcomes.len() - failed,
        outcomes.len(),
        if cfg.quick { "quick" } else { "full" }
    );
    if failed > 0 {
        return Err(Failure::Violation(format!("{failed} criteria failed")));
    }
    Ok(())
}
