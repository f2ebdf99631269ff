//! JSON document formats read and written by the command-line tool.
//!
//! Complex numbers are `[re, im]` pairs and matrices are row-major nested
//! arrays. Every document carries a `kind` tag that is checked on read.

use infopower::linalg::{CMatrix, CVector, HermitianMatrix, C64};
use infopower::objects::{DensityOperator, Ensemble, Povm, PovmValidation, PureState};
use infopower::solver::{BoundCheck, PowerReport, SolverConfig};
use infopower::ClassicalChannel;
use serde::{Deserialize, Serialize};

use crate::error::CliError;

pub type Complex = [f64; 2];
pub type Matrix = Vec<Vec<Complex>>;

fn check_kind(found: &str, expected: &str) -> Result<(), CliError> {
    if found == expected {
        Ok(())
    } else {
        Err(CliError::Parse(format!(
            "expected a `{expected}` document, found kind `{found}`"
        )))
    }
}

pub fn matrix_to_json(m: &CMatrix) -> Matrix {
    (0..m.nrows())
        .map(|r| {
            (0..m.ncols())
                .map(|c| [m[(r, c)].re, m[(r, c)].im])
                .collect()
        })
        .collect()
}

pub fn matrix_from_json(m: &Matrix, dim: usize, what: &str) -> Result<CMatrix, CliError> {
    if m.len() != dim || m.iter().any(|row| row.len() != dim) {
        return Err(CliError::Parse(format!(
            "{what}: expected a {dim}x{dim} matrix"
        )));
    }
    if m.iter().flatten().flatten().any(|x| !x.is_finite()) {
        return Err(CliError::Parse(format!("{what}: non-finite entry")));
    }
    Ok(CMatrix::from_fn(dim, dim, |r, c| {
        C64::new(m[r][c][0], m[r][c][1])
    }))
}

fn vector_to_json(v: &CVector) -> Vec<Complex> {
    v.iter().map(|z| [z.re, z.im]).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PovmFile {
    pub kind: String,
    pub dim: usize,
    pub elements: Vec<Matrix>,
    /// Index of the element added to complete a rank-deficient dual measurement.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kernel_element: Option<usize>,
    /// Ensemble members that produced no element.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dropped_members: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub round_trip_residual: Option<f64>,
}

impl PovmFile {
    pub fn from_povm(p: &Povm) -> Self {
        Self {
            kind: "povm".into(),
            dim: p.dim(),
            elements: p
                .elements()
                .iter()
                .map(|e| matrix_to_json(e.as_matrix()))
                .collect(),
            kernel_element: None,
            dropped_members: None,
            round_trip_residual: None,
        }
    }

    /// Raw element matrices, shape-checked but not validated.
    pub fn raw_elements(&self) -> Result<Vec<CMatrix>, CliError> {
        check_kind(&self.kind, "povm")?;
        if self.dim == 0 || self.elements.is_empty() {
            return Err(CliError::Parse(
                "POVM needs dim ≥ 1 and at least one element".into(),
            ));
        }
        self.elements
            .iter()
            .enumerate()
            .map(|(j, m)| matrix_from_json(m, self.dim, &format!("element {j}")))
            .collect()
    }

    pub fn to_povm(&self, tol: f64) -> Result<Povm, CliError> {
        let raw = self.raw_elements()?;
        Povm::from_raw(raw, tol).map_err(|e| CliError::Domain(e.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnsembleFile {
    pub kind: String,
    pub dim: usize,
    pub priors: Vec<f64>,
    pub states: Vec<Matrix>,
    /// State vectors, present when every member is pure.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub amplitudes: Option<Vec<Vec<Complex>>>,
    /// POVM outcome behind each member, for ensembles built from a measurement.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub source_outcomes: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dropped_outcomes: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub round_trip_residual: Option<f64>,
}

impl EnsembleFile {
    pub fn from_ensemble(e: &Ensemble) -> Self {
        Self {
            kind: "ensemble".into(),
            dim: e.dim(),
            priors: e.priors().to_vec(),
            states: e
                .states()
                .iter()
                .map(|s| matrix_to_json(s.matrix().as_matrix()))
                .collect(),
            amplitudes: None,
            source_outcomes: None,
            dropped_outcomes: None,
            round_trip_residual: None,
        }
    }

    pub fn with_amplitudes(mut self, states: &[PureState]) -> Self {
        self.amplitudes = Some(
            states
                .iter()
                .map(|s| vector_to_json(s.amplitudes()))
                .collect(),
        );
        self
    }

    pub fn to_ensemble(&self, tol: f64) -> Result<Ensemble, CliError> {
        check_kind(&self.kind, "ensemble")?;
        if self.dim == 0 || self.states.is_empty() {
            return Err(CliError::Parse(
                "ensemble needs dim ≥ 1 and at least one member".into(),
            ));
        }
        if self.priors.len() != self.states.len() {
            return Err(CliError::Parse(format!(
                "{} priors for {} states",
                self.priors.len(),
                self.states.len()
            )));
        }
        let states = self
            .states
            .iter()
            .enumerate()
            .map(|(i, m)| {
                let raw = matrix_from_json(m, self.dim, &format!("state {i}"))?;
                let h = HermitianMatrix::new(raw).map_err(|e| CliError::Domain(e.to_string()))?;
                DensityOperator::with_tolerance(h, tol)
                    .map_err(|e| CliError::Domain(format!("state {i}: {e}")))
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ensemble::with_tolerance(self.priors.clone(), states, tol)
            .map_err(|e| CliError::Domain(e.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChannelFile {
    pub kind: String,
    pub probs: Vec<Vec<f64>>,
}

impl ChannelFile {
    pub fn from_channel(ch: &ClassicalChannel) -> Self {
        Self {
            kind: "channel".into(),
            probs: ch.rows().to_vec(),
        }
    }

    pub fn to_channel(&self, tol: f64) -> Result<ClassicalChannel, CliError> {
        check_kind(&self.kind, "channel")?;
        let n = self.probs.first().map_or(0, Vec::len);
        if n == 0 || self.probs.iter().any(|r| r.len() != n) {
            return Err(CliError::Parse(
                "channel rows must be non-empty and of equal length".into(),
            ));
        }
        ClassicalChannel::with_tolerance(self.probs.clone(), tol)
            .map_err(|e| CliError::Domain(e.to_string()))
    }
}

/// A single density operator, used for `--sigma`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityFile {
    pub kind: String,
    pub dim: usize,
    pub matrix: Matrix,
}

impl DensityFile {
    pub fn from_density(rho: &DensityOperator) -> Self {
        Self {
            kind: "density".into(),
            dim: rho.dim(),
            matrix: matrix_to_json(rho.matrix().as_matrix()),
        }
    }

    pub fn to_density(&self, tol: f64) -> Result<DensityOperator, CliError> {
        check_kind(&self.kind, "density")?;
        let raw = matrix_from_json(&self.matrix, self.dim, "density matrix")?;
        let h = HermitianMatrix::new(raw).map_err(|e| CliError::Domain(e.to_string()))?;
        DensityOperator::with_tolerance(h, tol).map_err(|e| CliError::Domain(e.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationFile {
    pub kind: String,
    pub passed: bool,
    pub tol: f64,
    pub dim: usize,
    pub hermiticity: Vec<f64>,
    pub min_eigenvalues: Vec<f64>,
    pub completeness: f64,
    pub failures: Vec<String>,
}

impl From<&PovmValidation> for ValidationFile {
    fn from(v: &PovmValidation) -> Self {
        Self {
            kind: "validation".into(),
            passed: v.passed,
            tol: v.tol,
            dim: v.dim,
            hermiticity: v.hermiticity.clone(),
            min_eigenvalues: v.min_eigenvalues.clone(),
            completeness: v.completeness,
            failures: v.failures.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundCheckFile {
    pub dim: usize,
    pub m_eff: usize,
    pub support_rank: usize,
    pub completed_size: usize,
    pub lower_ok: bool,
    pub upper_ok: bool,
    pub real_povm: bool,
    pub real_bound: Option<usize>,
    pub real_ok: Option<bool>,
    pub passed: bool,
}

impl From<&BoundCheck> for BoundCheckFile {
    fn from(b: &BoundCheck) -> Self {
        Self {
            dim: b.dim,
            m_eff: b.m_eff,
            support_rank: b.support_rank,
            completed_size: b.completed_size,
            lower_ok: b.lower_ok,
            upper_ok: b.upper_ok,
            real_povm: b.real_povm,
            real_bound: b.real_bound,
            real_ok: b.real_ok,
            passed: b.passed(),
        }
    }
}

/// Solver settings echoed into the report. Thread count is left out so that
/// reports do not depend on it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfigFile {
    pub num_states: usize,
    pub restarts: usize,
    pub tol: f64,
    pub max_outer_iter: usize,
    pub seed: u64,
    pub prune_tol: f64,
    pub allow_fast_path: bool,
}

impl ConfigFile {
    pub fn new(cfg: &SolverConfig, dim: usize) -> Self {
        Self {
            num_states: cfg.num_states.unwrap_or(dim * dim),
            restarts: cfg.restarts,
            tol: cfg.tol,
            max_outer_iter: cfg.max_outer_iter,
            seed: cfg.seed,
            prune_tol: cfg.prune_tol,
            allow_fast_path: cfg.allow_fast_path,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportFile {
    pub kind: String,
    pub w_estimate: f64,
    pub base: String,
    pub ensemble: EnsembleFile,
    pub per_restart_values: Vec<f64>,
    pub converged: bool,
    pub iterations_used: usize,
    pub fast_path_used: bool,
    pub pruned_to: usize,
    pub bound_check: BoundCheckFile,
    pub config: ConfigFile,
    pub warnings: Vec<String>,
}

impl ReportFile {
    pub fn new(r: &PowerReport, cfg: &SolverConfig) -> Self {
        Self {
            kind: "report".into(),
            w_estimate: r.w_estimate,
            base: r.base.to_string(),
            ensemble: EnsembleFile::from_ensemble(&r.best_ensemble).with_amplitudes(&r.best_states),
            per_restart_values: r.per_restart_values.clone(),
            converged: r.converged,
            iterations_used: r.iterations_used,
            fast_path_used: r.fast_path_used,
            pruned_to: r.pruned_to,
            bound_check: (&r.bound_check).into(),
            config: ConfigFile::new(cfg, r.best_ensemble.dim()),
            warnings: r.warnings.clone(),
        }
    }

    pub fn check(&self) -> Result<(), CliError> {
        check_kind(&self.kind, "report")
    }
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("documents serialize")
}

pub fn from_json<T: for<'de> Deserialize<'de>>(text: &str) -> Result<T, CliError> {
    serde_json::from_str(text).map_err(|e| CliError::Parse(e.to_string()))
}
