//! Command-line verification harness: runs the bound checks, emits
//! machine-readable JSON (or CSV for curves), and pins all randomness and
//! tolerances so identical invocations produce byte-identical reports.
//!
//! Exit status: 0 when every claim passed, 1 on verification failure,
//! 2 on capacity or configuration errors.

mod report;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use mkbell::bounds::{
    analytic_bounds, default_theta_grid, ghz_curve, max_eigen_check,
    mean_variance_identity_deviation, optimize_product,
};
use mkbell::lhv::{distribution_moments, enumerate_lhv, LhvAssignment, LhvDistribution};
use mkbell::linalg::{expectation, matrix_distance};
use mkbell::operators::{
    calibration, canonical_settings, mk_bell_operator, spectral_mk, variant_operator,
};
use mkbell::states::{ghz_pm, Sign};

use report::{
    curve_to_csv, BoundsSummary, Claim, CurveRecord, LhvSummary, Meta, OptimizerWitness, Report,
    Tolerances, Witnesses,
};

/// Tolerance for the optimizer reaching the separability bound.
const ATTAIN_TOL: f64 = 1e-6;
/// Slack on one-sided soundness checks against analytic bounds.
const SOUND_SLACK: f64 = 1e-9;
/// Tolerance for the power-iteration estimate matching the analytic maximum.
const EIGEN_MATCH_TOL: f64 = 1e-8;
/// Tolerance for the GHZ state attaining the maximum.
const GHZ_ATTAIN_TOL: f64 = 1e-9;
/// Random LHV distributions sampled for the decomposition identity.
const DISTRIBUTION_SAMPLES: usize = 1000;

#[derive(Parser)]
#[command(
    name = "mkbell",
    version,
    about = "Verification harness for MK Bell operators and their variance-augmented variants"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Args)]
struct Common {
    /// Number of qubits.
    #[arg(long)]
    n: usize,
    /// Seed for every randomized component of the run.
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Output format; csv applies to ghz-curve only.
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Write the report here instead of stdout.
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct OptimizerArgs {
    /// Multi-start count for the product-state optimizer.
    #[arg(long, default_value_t = 64)]
    restarts: u32,
    /// Per-cycle improvement threshold that stops the coordinate ascent.
    #[arg(long, default_value_t = 1e-9)]
    tol: f64,
}

#[derive(Args)]
struct CurveArgs {
    /// Number of uniform mixing-angle grid points on [0, pi/4].
    #[arg(long, default_value_t = 33)]
    theta_points: usize,
}

#[derive(Subcommand)]
enum Command {
    /// Verify the separability, maximal-violation, and local-realism bounds.
    Bounds {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        optimizer: OptimizerArgs,
    },
    /// Evaluate the GHZ-family violation curve against the closed form.
    GhzCurve {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        curve: CurveArgs,
    },
    /// Exhaustively enumerate deterministic local-hidden-variable strategies.
    LhvEnum {
        #[command(flatten)]
        common: Common,
    },
    /// Maximize the variant expectation over product states.
    Optimize {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        optimizer: OptimizerArgs,
    },
    /// Check the recursively built canonical operator against its rank-2 form.
    VerifySpectral {
        #[command(flatten)]
        common: Common,
    },
    /// Run every verification and emit a single combined report.
    All {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        optimizer: OptimizerArgs,
        #[command(flatten)]
        curve: CurveArgs,
    },
}

enum CliError {
    Core(mkbell::Error),
    Config(String),
    Io(std::io::Error),
}

impl From<mkbell::Error> for CliError {
    fn from(e: mkbell::Error) -> Self {
        CliError::Core(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e)
    }
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            // Capacity and domain violations are configuration problems;
            // anything else that escapes is a failed verification.
            CliError::Core(mkbell::Error::Capacity { .. })
            | CliError::Core(mkbell::Error::Domain { .. }) => 2,
            CliError::Core(_) => 1,
            CliError::Config(_) => 2,
            CliError::Io(_) => 2,
        }
    }

    fn message(&self) -> String {
        match self {
            CliError::Core(e) => e.to_string(),
            CliError::Config(msg) => msg.clone(),
            CliError::Io(e) => format!("i/o error: {e}"),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {}", e.message());
            ExitCode::from(e.exit_code())
        }
    }
}

fn run(command: Command) -> Result<bool, CliError> {
    match command {
        Command::Bounds { common, optimizer } => {
            let (claims, witnesses) =
                bounds_claims(common.n, optimizer.restarts, common.seed, optimizer.tol)?;
            let meta = meta("bounds", &common, &optimizer, 0);
            finish(
                &common,
                Report {
                    meta,
                    claims,
                    witnesses,
                },
                None,
            )
        }
        Command::VerifySpectral { common } => {
            let claims = vec![spectral_claim(common.n)?];
            let meta = meta_plain("verify-spectral", &common);
            finish(
                &common,
                Report {
                    meta,
                    claims,
                    witnesses: Witnesses::default(),
                },
                None,
            )
        }
        Command::LhvEnum { common } => {
            let (claims, witnesses) = lhv_claims(common.n, common.seed)?;
            let meta = meta_plain("lhv-enum", &common);
            finish(
                &common,
                Report {
                    meta,
                    claims,
                    witnesses,
                },
                None,
            )
        }
        Command::Optimize { common, optimizer } => {
            let (claims, witnesses) =
                optimize_claims(common.n, optimizer.restarts, common.seed, optimizer.tol)?;
            let meta = meta("optimize", &common, &optimizer, 0);
            finish(
                &common,
                Report {
                    meta,
                    claims,
                    witnesses,
                },
                None,
            )
        }
        Command::GhzCurve { common, curve } => {
            let (claims, records) = curve_claims(common.n, curve.theta_points)?;
            let mut meta = meta_plain("ghz-curve", &common);
            meta.theta_points = curve.theta_points;
            let witnesses = Witnesses {
                curve: Some(records.clone()),
                ..Witnesses::default()
            };
            finish(
                &common,
                Report {
                    meta,
                    claims,
                    witnesses,
                },
                Some(records),
            )
        }
        Command::All {
            common,
            optimizer,
            curve,
        } => {
            let (mut claims, mut witnesses) =
                bounds_claims(common.n, optimizer.restarts, common.seed, optimizer.tol)?;
            let (curve_claims, records) = curve_claims(common.n, curve.theta_points)?;
            claims.extend(curve_claims);
            let (lhv_extra, _) = distribution_claims(common.n, common.seed)?;
            claims.extend(lhv_extra);
            witnesses.curve = Some(records);
            let meta = meta("all", &common, &optimizer, curve.theta_points);
            finish(
                &common,
                Report {
                    meta,
                    claims,
                    witnesses,
                },
                None,
            )
        }
    }
}

fn meta_plain(command: &str, common: &Common) -> Meta {
    Meta {
        command: command.to_string(),
        n: common.n,
        seed: common.seed,
        restarts: 0,
        tol: 0.0,
        theta_points: 0,
        tolerances: Tolerances::default(),
        frozen_calibration_pattern: calibration().pattern().to_string(),
    }
}

fn meta(command: &str, common: &Common, optimizer: &OptimizerArgs, theta_points: usize) -> Meta {
    Meta {
        restarts: optimizer.restarts,
        tol: optimizer.tol,
        theta_points,
        ..meta_plain(command, common)
    }
}

/// Emit the report body (JSON, or CSV for curve data) to the chosen sink,
/// print a one-line summary on stderr, and report overall pass/fail.
fn finish(
    common: &Common,
    report: Report,
    csv_records: Option<Vec<CurveRecord>>,
) -> Result<bool, CliError> {
    let body = match common.format {
        Format::Json => report.to_json(),
        Format::Csv => match csv_records {
            Some(records) => curve_to_csv(&records),
            None => {
                return Err(CliError::Config(
                    "csv output is only available for ghz-curve".to_string(),
                ))
            }
        },
    };
    match &common.output {
        Some(path) => {
            let mut file = std::fs::File::create(path)?;
            file.write_all(body.as_bytes())?;
        }
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(body.as_bytes())?;
        }
    }
    let passed = report.claims.iter().filter(|c| c.pass).count();
    eprintln!(
        "{}: {}/{} claims passed (n={})",
        report.meta.command,
        passed,
        report.claims.len(),
        report.meta.n
    );
    Ok(report.all_pass())
}

fn spectral_claim(n: usize) -> Result<Claim, CliError> {
    let built = mk_bell_operator(&canonical_settings(n)?)?;
    let distance = matrix_distance(&built.primal, &spectral_mk(n)?)?;
    Ok(Claim::upper_bounded(
        "spectral_identity_distance",
        "4",
        0.0,
        distance,
        mkbell::EQUALITY_TOL,
    ))
}

fn bounds_claims(
    n: usize,
    restarts: u32,
    seed: u64,
    tol: f64,
) -> Result<(Vec<Claim>, Witnesses), CliError> {
    let (sep, ent, lhv) = analytic_bounds(n)?;
    let settings = canonical_settings(n)?;
    let pair = mk_bell_operator(&settings)?;
    let spectral_distance = matrix_distance(&pair.primal, &spectral_mk(n)?)?;
    let v = variant_operator(&pair.primal)?;

    let (best, witness) = optimize_product(n, restarts, seed, tol)?;
    let (eigen_analytic, eigen_iterative) = max_eigen_check(n)?;
    let ghz_value = expectation(&v, &ghz_pm(n, Sign::Plus)?)?;
    let enumeration = enumerate_lhv(n)?;
    let identity_dev = mean_variance_identity_deviation(n, &default_theta_grid(33))?;
    let gap_ratio = sep / lhv;

    let claims = vec![
        Claim::upper_bounded(
            "spectral_identity_distance",
            "4",
            0.0,
            spectral_distance,
            mkbell::EQUALITY_TOL,
        ),
        Claim::equality("separability_bound_attained", "7", sep, best, ATTAIN_TOL),
        Claim::upper_bounded("separability_bound_sound", "7", sep, best, SOUND_SLACK),
        Claim::equality(
            "max_violation_eigenvalue",
            "8",
            eigen_analytic,
            eigen_iterative,
            EIGEN_MATCH_TOL,
        ),
        Claim::equality("ghz_attains_maximum", "8", ent, ghz_value, GHZ_ATTAIN_TOL),
        Claim::exact("mk_lhv_bound", "3", 1.0, enumeration.max_m),
        Claim::exact("lhv_bound", "10", lhv, enumeration.max_v),
        Claim::exact(
            "separability_lhv_gap",
            "7,10",
            (1u64 << (n - 2)) as f64,
            gap_ratio,
        ),
        Claim::upper_bounded(
            "mean_variance_identity",
            "6",
            0.0,
            identity_dev,
            mkbell::EQUALITY_TOL,
        ),
    ];
    let witnesses = Witnesses {
        bounds: Some(BoundsSummary {
            separability: sep,
            entanglement: report::sig12(ent),
            lhv,
            gap_ratio,
            separable_violates_lhv: sep > lhv,
        }),
        optimizer: Some(OptimizerWitness::new(best, &witness)),
        lhv: Some(LhvSummary::new(&enumeration)),
        curve: None,
    };
    Ok((claims, witnesses))
}

fn optimize_claims(
    n: usize,
    restarts: u32,
    seed: u64,
    tol: f64,
) -> Result<(Vec<Claim>, Witnesses), CliError> {
    let (sep, _, _) = analytic_bounds(n)?;
    let (best, witness) = optimize_product(n, restarts, seed, tol)?;
    let claims = vec![
        Claim::equality("separability_bound_attained", "7", sep, best, ATTAIN_TOL),
        Claim::upper_bounded("separability_bound_sound", "7", sep, best, SOUND_SLACK),
    ];
    let witnesses = Witnesses {
        optimizer: Some(OptimizerWitness::new(best, &witness)),
        ..Witnesses::default()
    };
    Ok((claims, witnesses))
}

fn lhv_claims(n: usize, seed: u64) -> Result<(Vec<Claim>, Witnesses), CliError> {
    let enumeration = enumerate_lhv(n)?;
    let mut claims = vec![
        Claim::exact("mk_lhv_bound", "3", 1.0, enumeration.max_m),
        Claim::exact("lhv_bound", "10", 2.0, enumeration.max_v),
        Claim::exact(
            "assignment_count",
            "3",
            (1u64 << (2 * n)) as f64,
            (enumeration.plus_count + enumeration.minus_count) as f64,
        ),
    ];
    let (extra, _) = distribution_claims(n, seed)?;
    claims.extend(extra);
    let witnesses = Witnesses {
        lhv: Some(LhvSummary::new(&enumeration)),
        ..Witnesses::default()
    };
    Ok((claims, witnesses))
}

/// Sample random LHV distributions and report the worst deviation of the
/// mean/variance decomposition plus the largest V expectation seen.
fn distribution_claims(n: usize, seed: u64) -> Result<(Vec<Claim>, f64), CliError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let codes = 1u64 << (2 * n);
    let mut worst_identity = 0.0f64;
    let mut max_v = f64::NEG_INFINITY;
    for _ in 0..DISTRIBUTION_SAMPLES {
        let k = rng.gen_range(1..=16usize);
        let mut support = Vec::with_capacity(k);
        let mut weights = Vec::with_capacity(k);
        for _ in 0..k {
            support.push(LhvAssignment::from_code(n, rng.gen_range(0..codes))?);
            weights.push(rng.gen_range(0.0..1.0f64));
        }
        let total: f64 = weights.iter().sum();
        let d = LhvDistribution::new(
            support
                .into_iter()
                .zip(weights.into_iter().map(|w| w / total))
                .collect(),
        )?;
        let m = distribution_moments(&d);
        let dev = (m.v_expectation - (m.mean + m.mean * m.mean + m.variance)).abs();
        worst_identity = worst_identity.max(dev);
        max_v = max_v.max(m.v_expectation);
    }
    let claims = vec![
        Claim::upper_bounded(
            "distribution_identity",
            "6",
            0.0,
            worst_identity,
            mkbell::IDENTITY_TOL,
        ),
        Claim::upper_bounded(
            "distribution_v_bound",
            "10",
            2.0,
            max_v,
            mkbell::IDENTITY_TOL,
        ),
    ];
    Ok((claims, max_v))
}

fn curve_claims(n: usize, theta_points: usize) -> Result<(Vec<Claim>, Vec<CurveRecord>), CliError> {
    let grid = default_theta_grid(theta_points);
    let curve = ghz_curve(n, &grid)?;
    let (sep, ent, _) = analytic_bounds(n)?;
    let amplitude = ent - sep; // 2^((n-1)/2)

    let mut worst_formula = 0.0f64;
    let mut min_violation = f64::INFINITY;
    for p in &curve.points {
        let formula = amplitude * (2.0 * p.theta).sin() + sep;
        worst_formula = worst_formula.max((p.value - formula).abs());
        if p.theta > 0.0 {
            min_violation = min_violation.min(p.violation);
        }
    }

    let mut claims = Vec::new();
    if !curve.points.is_empty() {
        claims.push(Claim::upper_bounded(
            "ghz_curve_formula_agreement",
            "9",
            0.0,
            worst_formula,
            mkbell::EQUALITY_TOL,
        ));
    }
    if min_violation.is_finite() {
        claims.push(Claim::strictly_above(
            "ghz_curve_strict_violation",
            "9",
            0.0,
            min_violation,
        ));
    }
    let records = curve
        .points
        .iter()
        .map(|p| CurveRecord::new(p.theta, p.value, sep))
        .collect();
    Ok((claims, records))
}
