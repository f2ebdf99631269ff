use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use infopower::duality::{
    duality_round_trip_check, ensemble_from_povm, povm_from_ensemble, ZERO_OUTCOME_TOL,
};
use infopower::info::blahut_arimoto;
use infopower::linalg::DEFAULT_RANK_TOL;
use infopower::objects::{self, ensemble_average, validate_povm, INGEST_TOL};
use infopower::{informational_power, DensityOperator, LogBase, Povm, SolverConfig};
use serde::{Deserialize, Serialize};

use crate::error::CliError;
use crate::files::{
    from_json, to_json, ChannelFile, DensityFile, EnsembleFile, PovmFile, ReportFile,
    ValidationFile,
};

#[derive(Debug, Parser)]
#[command(
    name = "infopower",
    version,
    about = "Informational power of quantum measurements"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check a POVM file against the measurement axioms.
    Validate(ValidateArgs),
    /// Compute the informational power of a POVM.
    Solve(SolveArgs),
    /// Map a POVM to its dual ensemble, or an ensemble to its dual POVM.
    Duality(DualityArgs),
    /// Capacity of a classical channel.
    Capacity(CapacityArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Example {
    Sic,
    Projective2,
    Projective3,
    Trine,
    Trivial,
}

impl Example {
    pub fn povm(self) -> Povm {
        match self {
            Example::Sic => objects::tetrahedral_sic_povm(),
            Example::Projective2 => objects::standard_projective_povm(2),
            Example::Projective3 => objects::standard_projective_povm(3),
            Example::Trine => objects::trine_povm(),
            Example::Trivial => Povm::trivial(2),
        }
    }
}

#[derive(Debug, Args)]
#[group(required = true, multiple = false)]
pub struct Input {
    /// Input file.
    pub path: Option<PathBuf>,
    /// Use a built-in POVM instead of a file.
    #[arg(long, value_enum)]
    pub example: Option<Example>,
}

#[derive(Debug, Args)]
pub struct ValidateArgs {
    #[command(flatten)]
    pub input: Input,
    #[arg(long, default_value_t = INGEST_TOL)]
    pub tol: f64,
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    #[command(flatten)]
    pub input: Input,
    /// Ensemble size M (default D²).
    #[arg(long)]
    pub states: Option<usize>,
    #[arg(long, default_value_t = 20)]
    pub restarts: usize,
    /// Outer-loop stopping threshold, in nats.
    #[arg(long, default_value_t = 1e-9)]
    pub tol: f64,
    #[arg(long, env = "INFOPOWER_SEED", default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = LogBase::Bits)]
    pub base: LogBase,
    /// Write the full report here and print only a summary.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Worker threads for restarts.
    #[arg(long, default_value_t = 1)]
    pub jobs: usize,
    /// Run the generic search even when the elements commute.
    #[arg(long)]
    pub no_fast_path: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Direction {
    ToEnsemble,
    ToPovm,
}

#[derive(Debug, Args)]
pub struct DualityArgs {
    #[command(flatten)]
    pub input: Input,
    #[arg(long, value_enum)]
    pub direction: Direction,
    /// Density-operator file, or `maxmix` for I/D. Used by `to-ensemble`.
    #[arg(long, default_value = "maxmix")]
    pub sigma: String,
    /// Map the result back and report the residual.
    #[arg(long)]
    pub check: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CapacityArgs {
    pub path: PathBuf,
    /// Stopping gap, in units of `--base`.
    #[arg(long, default_value_t = 1e-12)]
    pub tol: f64,
    #[arg(long, default_value_t = LogBase::Bits)]
    pub base: LogBase,
    #[arg(long, default_value_t = 100_000)]
    pub max_iter: usize,
}

/// Result of a successful run: what goes to stdout and the exit status.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub stdout: String,
    pub diagnostic: Option<String>,
    pub exit_code: u8,
}

impl Outcome {
    fn ok(stdout: String) -> Self {
        Self {
            stdout,
            diagnostic: None,
            exit_code: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveSummary {
    pub kind: String,
    pub w_estimate: f64,
    pub base: String,
    pub converged: bool,
    pub report: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CapacityFile {
    pub kind: String,
    pub capacity: f64,
    pub base: String,
    pub prior: Vec<f64>,
    pub gap: f64,
    pub iterations: usize,
    pub converged: bool,
}

pub fn run(cli: &Cli) -> Result<Outcome, CliError> {
    match &cli.command {
        Command::Validate(a) => validate(a),
        Command::Solve(a) => solve(a),
        Command::Duality(a) => duality(a),
        Command::Capacity(a) => capacity(a),
    }
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

fn write(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, format!("{text}\n"))
        .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

fn povm_file(input: &Input) -> Result<PovmFile, CliError> {
    match (&input.path, input.example) {
        (_, Some(ex)) => Ok(PovmFile::from_povm(&ex.povm())),
        (Some(p), None) => from_json(&read(p)?),
        (None, None) => Err(CliError::Parse("no input given".into())),
    }
}

fn emit(out: &Option<PathBuf>, text: String) -> Result<Outcome, CliError> {
    match out {
        Some(path) => {
            write(path, &text)?;
            Ok(Outcome {
                stdout: text,
                diagnostic: Some(format!("wrote {}", path.display())),
                exit_code: 0,
            })
        }
        None => Ok(Outcome::ok(text)),
    }
}

fn validate(a: &ValidateArgs) -> Result<Outcome, CliError> {
    let raw = povm_file(&a.input)?.raw_elements()?;
    let report = validate_povm(&raw, a.tol);
    let text = to_json(&ValidationFile::from(&report));
    Ok(Outcome {
        stdout: text,
        diagnostic: (!report.passed).then(|| report.failures.join("; ")),
        exit_code: if report.passed { 0 } else { 1 },
    })
}

fn solve(a: &SolveArgs) -> Result<Outcome, CliError> {
    let povm = povm_file(&a.input)?.to_povm(INGEST_TOL)?;
    let cfg = SolverConfig {
        num_states: a.states,
        restarts: a.restarts,
        tol: a.tol,
        seed: a.seed,
        base: a.base,
        jobs: a.jobs,
        allow_fast_path: !a.no_fast_path,
        ..SolverConfig::default()
    };
    let report = informational_power(&povm, &cfg)?;
    let file = ReportFile::new(&report, &cfg);
    let text = to_json(&file);
    let mut diagnostics: Vec<String> = report.warnings.clone();
    if !report.converged {
        diagnostics.push("solver did not converge".into());
    }
    let outcome = match &a.out {
        Some(path) => {
            write(path, &text)?;
            let summary = SolveSummary {
                kind: "summary".into(),
                w_estimate: report.w_estimate,
                base: report.base.to_string(),
                converged: report.converged,
                report: path.display().to_string(),
            };
            Outcome::ok(to_json(&summary))
        }
        None => Outcome::ok(text),
    };
    Ok(Outcome {
        diagnostic: (!diagnostics.is_empty()).then(|| diagnostics.join("; ")),
        ..outcome
    })
}

fn sigma_for(arg: &str, dim: usize) -> Result<DensityOperator, CliError> {
    if arg == "maxmix" {
        return Ok(DensityOperator::maximally_mixed(dim));
    }
    let file: DensityFile = from_json(&read(Path::new(arg))?)?;
    let sigma = file.to_density(INGEST_TOL)?;
    if sigma.dim() != dim {
        return Err(CliError::Domain(format!(
            "sigma has dimension {}, input has {dim}",
            sigma.dim()
        )));
    }
    Ok(sigma)
}

fn duality(a: &DualityArgs) -> Result<Outcome, CliError> {
    match a.direction {
        Direction::ToEnsemble => {
            let povm = povm_file(&a.input)?.to_povm(INGEST_TOL)?;
            let sigma = sigma_for(&a.sigma, povm.dim())?;
            let dual = ensemble_from_povm(&povm, &sigma)?;
            let mut file = EnsembleFile::from_ensemble(&dual.ensemble);
            file.source_outcomes = Some(dual.source.clone());
            file.dropped_outcomes = Some(dual.dropped.clone());
            if a.check {
                file.round_trip_residual =
                    Some(duality_round_trip_check(&povm, &sigma)?.max_deviation);
            }
            emit(&a.out, to_json(&file))
        }
        Direction::ToPovm => {
            let path = match (&a.input.path, a.input.example) {
                (Some(p), None) => p,
                _ => {
                    return Err(CliError::Parse(
                        "to-povm needs an ensemble file; built-in examples are measurements".into(),
                    ))
                }
            };
            let ens = from_json::<EnsembleFile>(&read(path)?)?.to_ensemble(INGEST_TOL)?;
            let dual = povm_from_ensemble(&ens, DEFAULT_RANK_TOL)?;
            let mut file = PovmFile::from_povm(&dual.povm);
            file.kernel_element = dual.kernel_element();
            file.dropped_members = Some(dual.dropped.clone());
            if a.check {
                file.round_trip_residual = Some(ensemble_round_trip(&ens, &dual)?);
            }
            emit(&a.out, to_json(&file))
        }
    }
}

/// `S → Π(S) → R(Π(S), σ_S)`: largest prior or state deviation over members.
fn ensemble_round_trip(
    ens: &infopower::Ensemble,
    dual: &infopower::duality::DualPovm,
) -> Result<f64, CliError> {
    let back = ensemble_from_povm(&dual.povm, &ensemble_average(ens))?;
    let mut worst = 0.0f64;
    let mut seen = vec![false; ens.len()];
    for ((q, rho), j) in back.ensemble.members().zip(&back.source) {
        match dual.source[*j] {
            Some(i) => {
                seen[i] = true;
                let dq = (q - ens.priors()[i]).abs();
                let drho = rho.matrix().sub(ens.states()[i].matrix()).frobenius_norm();
                worst = worst.max(dq).max(drho);
            }
            None => worst = worst.max(q),
        }
    }
    for (i, s) in seen.iter().enumerate() {
        let q = ens.priors()[i];
        if !s && q > ZERO_OUTCOME_TOL {
            worst = worst.max(q);
        }
    }
    Ok(worst)
}

fn capacity(a: &CapacityArgs) -> Result<Outcome, CliError> {
    let file: ChannelFile = from_json(&read(&a.path)?)?;
    let ch = file.to_channel(1e-10)?;
    let r = blahut_arimoto(&ch, a.tol, a.max_iter, a.base)?;
    let out = CapacityFile {
        kind: "capacity".into(),
        capacity: r.capacity,
        base: a.base.to_string(),
        prior: r.prior.probs().to_vec(),
        gap: r.gap,
        iterations: r.iterations,
        converged: r.converged,
    };
    Ok(Outcome {
        stdout: to_json(&out),
        diagnostic: (!r.converged).then(|| "capacity iteration did not converge".to_string()),
        exit_code: 0,
    })
}
