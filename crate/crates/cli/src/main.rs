//! `twoion`: parameter files in, CSV out.

mod config;
mod output;

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use thiserror::Error;

use config::ConfigFile;
use twoion::entangle::{figure1_curve, solve_epr_parameters, EntanglementResult, EprBranch, EprConstraint, EprParameters};
use twoion::gates::{
    check_cz_conditions, gate_fidelity, robustness_sweep, solve_gate_parameters, GateSolution, PerturbationProtocol,
    SolverOptions, SweepParameter, SweepRow, REFERENCE_SOLUTIONS,
};
use twoion::oracle::{random_draws, OracleDraw};
use twoion::report::{csv_text, fmt_sig};
use twoion::{conditional_propagator, Grid, LaserDrive, PulsePair, SidebandSpec};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Check(String),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
}

impl CliError {
    fn io(path: impl AsRef<Path>) -> impl FnOnce(std::io::Error) -> CliError {
        let path = path.as_ref().to_path_buf();
        move |source| CliError::Io { path, source }
    }

    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Check(_) | CliError::Io { .. } => 1,
        }
    }
}

impl From<twoion::Error> for CliError {
    fn from(e: twoion::Error) -> Self {
        match e {
            twoion::Error::NoRoot { .. } | twoion::Error::EigenFailure { .. } | twoion::Error::NotControlledZ { .. } => {
                CliError::Check(e.to_string())
            }
            _ => CliError::Usage(e.to_string()),
        }
    }
}

#[derive(Parser)]
#[command(name = "twoion", version, about = "Conditional dynamics of two ions driven on a shared bus mode")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Io {
    /// Parameter file with `key = value` lines; flags win over the file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Write the CSV here (atomically) instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Amplitudes of the four computational inputs at the requested times.
    Evolve(EvolveArgs),
    /// Re-check the embedded table of controlled-Z working points.
    #[command(name = "verify-table1")]
    VerifyTable(VerifyArgs),
    /// Search for controlled-Z working points with equal Lamb-Dicke parameters.
    SolveGate(SolveGateArgs),
    /// Gate success probability as one parameter moves off a working point.
    FidelitySweep(SweepArgs),
    /// Entropy of entanglement against the coupling ratio mu.
    EntangleCurve(CurveArgs),
    /// Drive settings that prepare a maximally entangled pair.
    SolveEpr(EprArgs),
    /// Compare the closed form with the truncated-space propagator on random draws.
    OracleCheck(OracleArgs),
}

#[derive(Args)]
struct EvolveArgs {
    #[arg(long)]
    k: Option<u32>,
    #[arg(long)]
    m: Option<u32>,
    /// Omega2 / Omega1.
    #[arg(long)]
    ratio: Option<f64>,
    /// Lamb-Dicke parameter of ion 1 (and ion 2 unless --eta2 is given).
    #[arg(long, allow_hyphen_values = true)]
    eta: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    eta2: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    phi1: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    phi2: Option<f64>,
    /// Times in units of 1/Omega1: a value or min:max[:steps].
    #[arg(long)]
    t: Option<Grid>,
    #[command(flatten)]
    io: Io,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long)]
    tolerance: Option<f64>,
    /// Check a single row (1-based).
    #[arg(long)]
    row: Option<usize>,
    #[command(flatten)]
    io: Io,
}

#[derive(Args)]
struct SolveGateArgs {
    #[arg(long)]
    k: Option<u32>,
    #[arg(long)]
    m: Option<u32>,
    #[arg(long)]
    ratio: Option<f64>,
    /// Search interval min:max.
    #[arg(long)]
    eta: Option<Grid>,
    #[arg(long)]
    tolerance: Option<f64>,
    /// Largest p, q, r tried.
    #[arg(long)]
    max_integers: Option<u32>,
    #[command(flatten)]
    io: Io,
}

#[derive(Args)]
struct SweepArgs {
    /// Start from a row of the embedded table (1-based).
    #[arg(long)]
    row: Option<usize>,
    #[arg(long)]
    k: Option<u32>,
    #[arg(long)]
    ratio: Option<f64>,
    #[arg(long)]
    eta: Option<f64>,
    /// Base pulse area Omega1 * tau.
    #[arg(long)]
    tau: Option<f64>,
    /// ratio, eta or tau.
    #[arg(long)]
    param: Option<SweepParameter>,
    /// Values of the swept parameter, min:max[:steps].
    #[arg(long)]
    grid: Option<Grid>,
    /// fixed-second-rabi, fixed-pulse-area or optimized-duration.
    #[arg(long)]
    protocol: Option<PerturbationProtocol>,
    #[command(flatten)]
    io: Io,
}

#[derive(Args)]
struct CurveArgs {
    /// min:max[:steps], both ends positive.
    #[arg(long)]
    mu: Option<Grid>,
    #[command(flatten)]
    io: Io,
}

#[derive(Args)]
struct EprArgs {
    #[arg(long)]
    k: Option<u32>,
    #[arg(long)]
    m: Option<u32>,
    /// plus (mu = sqrt2 + 1) or minus (mu = sqrt2 - 1); both when omitted.
    #[arg(long)]
    branch: Option<EprBranch>,
    /// equal-eta or equal-omega.
    #[arg(long)]
    constraint: Option<EprConstraint>,
    #[command(flatten)]
    io: Io,
}

#[derive(Args)]
struct OracleArgs {
    #[arg(long)]
    draws: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    tolerance: Option<f64>,
    #[command(flatten)]
    io: Io,
}

/// Loads the parameter file and resolves the output path against it.
fn setup(io: &Io, keys: &[&str]) -> Result<(ConfigFile, Option<PathBuf>), CliError> {
    let cfg = ConfigFile::load(io.config.as_deref())?;
    let mut valid = keys.to_vec();
    valid.push("out");
    cfg.check_keys(&valid)?;
    let out = cfg.optional(io.out.clone(), "out")?;
    Ok((cfg, out))
}

fn evolve(a: EvolveArgs) -> Result<(), CliError> {
    let (cfg, out) = setup(&a.io, &["k", "m", "ratio", "eta", "eta2", "phi1", "phi2", "t"])?;
    let k = cfg.resolve(a.k, "k", 1)?;
    let m = cfg.resolve(a.m, "m", 0)?;
    let ratio = cfg.resolve(a.ratio, "ratio", 1.0)?;
    let eta = cfg.resolve(a.eta, "eta", 0.5)?;
    let eta2 = cfg.resolve(a.eta2, "eta2", eta)?;
    let phi1 = cfg.resolve(a.phi1, "phi1", 0.0)?;
    let phi2 = cfg.resolve(a.phi2, "phi2", 0.0)?;
    let times = cfg.resolve(a.t, "t", Grid::single(0.0))?;
    let pulses = PulsePair::new(LaserDrive::new(1.0, phi1, eta)?, LaserDrive::new(ratio, phi2, eta2)?);
    let spec = SidebandSpec::red(k, m)?;

    let mut rows = Vec::new();
    let mut listing = String::new();
    for t in times.points() {
        let table = conditional_propagator(&pulses, &spec, t)?;
        writeln!(listing, "t = {}", fmt_sig(t)).unwrap();
        for row in &table.rows {
            let mut terms = Vec::new();
            for (label, amp) in &row.entries {
                if amp.re != 0.0 || amp.im != 0.0 {
                    let sign = if amp.im < 0.0 { '-' } else { '+' };
                    terms.push(format!("({}{sign}{}i){label}", fmt_sig(amp.re), fmt_sig(amp.im.abs())));
                }
                rows.push(format!(
                    "{},{},{},{},{},{},{},{}",
                    fmt_sig(t),
                    row.initial.bus,
                    row.initial.spins(),
                    label.bus,
                    label.spins(),
                    fmt_sig(amp.re),
                    fmt_sig(amp.im),
                    fmt_sig(amp.norm_sqr())
                ));
            }
            writeln!(listing, "  {} -> {}", row.initial, terms.join(" + ")).unwrap();
        }
    }
    let csv = csv_text("t,initial_bus,initial_spins,bus,spins,re,im,probability", rows);
    match out {
        Some(path) => {
            print!("{listing}");
            output::emit(&csv, Some(&path))
        }
        None => output::emit(&listing, None),
    }
}

fn verify_table(a: VerifyArgs) -> Result<(), CliError> {
    let (cfg, out) = setup(&a.io, &["tolerance", "row"])?;
    let tol = cfg.resolve(a.tolerance, "tolerance", 1e-3)?;
    let row = cfg.optional(a.row, "row")?;
    let n = REFERENCE_SOLUTIONS.len();
    let selected: Vec<usize> = match row {
        Some(r) if (1..=n).contains(&r) => vec![r - 1],
        Some(r) => return Err(CliError::Usage(format!("--row {r} is outside 1..={n}"))),
        None => (0..n).collect(),
    };
    let mut lines = Vec::new();
    let mut failed = 0;
    for i in &selected {
        let p = &REFERENCE_SOLUTIONS[*i];
        let r = check_cz_conditions(&p.couplings(), p.pulse_area).residual;
        let f = gate_fidelity(&p.pulses(), &p.spec(), p.pulse_area)?;
        let pass = r.within(tol) && f.minimum >= 1.0 - tol;
        failed += usize::from(!pass);
        lines.push(format!(
            "{},{},{},{},{},{},{},{},{},{}",
            i + 1,
            p.k,
            fmt_sig(p.ratio),
            fmt_sig(p.eta),
            fmt_sig(p.pulse_area),
            fmt_sig(r.r_chi),
            fmt_sig(r.r_plus),
            fmt_sig(r.r_minus),
            fmt_sig(f.minimum),
            if pass { "PASS" } else { "FAIL" }
        ));
    }
    let csv = csv_text("row,k,ratio,eta,pulse_area,r_chi,r_plus,r_minus,min_probability,status", lines);
    output::emit(&csv, out.as_deref())?;
    let passed = selected.len() - failed;
    eprintln!("{passed}/{} rows pass at tolerance {tol:e}", selected.len());
    if failed > 0 {
        return Err(CliError::Check(format!("{failed} row(s) failed")));
    }
    Ok(())
}

fn solve_gate(a: SolveGateArgs) -> Result<(), CliError> {
    let (cfg, out) = setup(&a.io, &["k", "m", "ratio", "eta", "tolerance", "max-integers"])?;
    let k = cfg.resolve(a.k, "k", 1)?;
    let m = cfg.resolve(a.m, "m", 0)?;
    let ratio: f64 = cfg.require(a.ratio, "ratio")?;
    let eta = cfg.resolve(a.eta, "eta", Grid::new(0.1, 3.5, 2)?)?;
    let defaults = SolverOptions::default();
    let opts = SolverOptions {
        tolerance: cfg.resolve(a.tolerance, "tolerance", defaults.tolerance)?,
        max_integers: cfg.resolve(a.max_integers, "max-integers", defaults.max_integers)?,
        ..defaults
    };
    let found = solve_gate_parameters(k, ratio, m, (eta.min, eta.max), &opts)?;
    if found.lower_frequency_degenerate {
        eprintln!("lower frequency vanishes on the whole interval; no controlled-Z point exists");
    }
    let csv = csv_text(GateSolution::CSV_HEADER, found.solutions.iter().map(GateSolution::csv_row));
    output::emit(&csv, out.as_deref())
}

fn fidelity_sweep(a: SweepArgs) -> Result<(), CliError> {
    let (cfg, out) = setup(&a.io, &["row", "k", "ratio", "eta", "tau", "param", "grid", "protocol"])?;
    let base = match cfg.optional(a.row, "row")? {
        Some(r) => {
            let n = REFERENCE_SOLUTIONS.len();
            let row = REFERENCE_SOLUTIONS
                .get(r.wrapping_sub(1))
                .ok_or_else(|| CliError::Usage(format!("--row {r} is outside 1..={n}")))?;
            GateSolution::from(row)
        }
        None => {
            let k = cfg.resolve(a.k, "k", 1)?;
            let ratio = cfg.require(a.ratio, "ratio")?;
            let eta = cfg.require(a.eta, "eta")?;
            let tau = cfg.require(a.tau, "tau")?;
            let spec = SidebandSpec::red(k, 0)?;
            let pulses = PulsePair::symmetric(1.0, ratio, eta)?;
            let c = twoion::derive_couplings(&pulses, &spec)?;
            GateSolution {
                k,
                m: 0,
                ratio,
                eta,
                pulse_area: tau,
                residual: check_cz_conditions(&c, tau).residual,
                triplet: (0, 0, 0),
            }
        }
    };
    let param = cfg.resolve(a.param, "param", SweepParameter::Ratio)?;
    let grid = cfg.require(a.grid, "grid")?;
    let protocol = cfg.resolve(a.protocol, "protocol", PerturbationProtocol::default())?;
    let rows = robustness_sweep(&base, param, &grid, protocol)?;
    let csv = csv_text(SweepRow::CSV_HEADER, rows.iter().map(SweepRow::csv_row));
    output::emit(&csv, out.as_deref())
}

fn entangle_curve(a: CurveArgs) -> Result<(), CliError> {
    let (cfg, out) = setup(&a.io, &["mu"])?;
    let grid = cfg.resolve(a.mu, "mu", Grid::new(0.1, 4.0, 400)?)?;
    let rows = figure1_curve(&grid)?;
    let csv = csv_text(EntanglementResult::CSV_HEADER, rows.iter().map(EntanglementResult::csv_row));
    output::emit(&csv, out.as_deref())
}

fn solve_epr(a: EprArgs) -> Result<(), CliError> {
    let (cfg, out) = setup(&a.io, &["k", "m", "branch", "constraint"])?;
    let k = cfg.resolve(a.k, "k", 1)?;
    let m = cfg.resolve(a.m, "m", 0)?;
    let constraint = cfg.resolve(a.constraint, "constraint", EprConstraint::EqualEta)?;
    let branches = match cfg.optional(a.branch, "branch")? {
        Some(b) => vec![b],
        None => vec![EprBranch::Plus, EprBranch::Minus],
    };
    let mut rows = Vec::new();
    for b in branches {
        rows.extend(solve_epr_parameters(k, m, b, constraint)?);
    }
    let csv = csv_text(EprParameters::CSV_HEADER, rows.iter().map(EprParameters::csv_row));
    output::emit(&csv, out.as_deref())
}

fn oracle_check(a: OracleArgs) -> Result<(), CliError> {
    let (cfg, out) = setup(&a.io, &["draws", "seed", "tolerance"])?;
    let draws = cfg.resolve(a.draws, "draws", 100)?;
    if draws == 0 {
        return Err(CliError::Usage("draws must be at least 1".into()));
    }
    let seed = cfg.resolve(a.seed, "seed", 0)?;
    let tol = cfg.resolve(a.tolerance, "tolerance", 1e-9)?;
    let mut rows = Vec::with_capacity(draws);
    let mut offending = Vec::new();
    for (i, draw) in random_draws(draws, seed).iter().enumerate() {
        let report = draw.compare()?;
        let row = draw.csv_row(i, &report);
        if report.max_abs_error.is_nan() || report.max_abs_error >= tol {
            offending.push(row.clone());
        }
        rows.push(row);
    }
    output::emit(&csv_text(OracleDraw::CSV_HEADER, rows), out.as_deref())?;
    if offending.is_empty() {
        return Ok(());
    }
    Err(CliError::Check(format!(
        "{} draw(s) at or above {tol:e}:\n{}\n{}",
        offending.len(),
        OracleDraw::CSV_HEADER,
        offending.join("\n")
    )))
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Evolve(a) => evolve(a),
        Command::VerifyTable(a) => verify_table(a),
        Command::SolveGate(a) => solve_gate(a),
        Command::FidelitySweep(a) => fidelity_sweep(a),
        Command::EntangleCurve(a) => entangle_curve(a),
        Command::SolveEpr(a) => solve_epr(a),
        Command::OracleCheck(a) => oracle_check(a),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
