//! Classical information quantities of measurement statistics.
//!
//! All internal arithmetic is in nats; [`LogBase`] converts at the boundary.

use std::f64::consts::LN_2;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::objects::{DensityOperator, Ensemble, Povm};

/// Probabilities at or below this are treated as zero inside logarithms.
pub const PROB_FLOOR: f64 = 1e-300;

const DISTRIBUTION_TOL: f64 = 1e-12;
const ROW_TOL: f64 = 1e-10;
const CLAMP_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Hash)]
pub enum LogBase {
    #[default]
    Bits,
    Nats,
}

impl LogBase {
    /// Converts a value in nats to this base.
    pub fn from_nats(self, x: f64) -> f64 {
        match self {
            LogBase::Bits => x / LN_2,
            LogBase::Nats => x,
        }
    }

    pub fn to_nats(self, x: f64) -> f64 {
        match self {
            LogBase::Bits => x * LN_2,
            LogBase::Nats => x,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            LogBase::Bits => "bits",
            LogBase::Nats => "nats",
        }
    }
}

impl fmt::Display for LogBase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for LogBase {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "bits" | "2" => Ok(LogBase::Bits),
            "nats" | "e" => Ok(LogBase::Nats),
            other => Err(format!(
                "unknown log base `{other}` (expected bits or nats)"
            )),
        }
    }
}

/// A probability vector.
#[derive(Debug, Clone, PartialEq)]
pub struct Distribution(Vec<f64>);

impl Distribution {
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        Self::with_tolerance(probs, DISTRIBUTION_TOL)
    }

    pub fn with_tolerance(mut probs: Vec<f64>, tol: f64) -> Result<Self> {
        if probs.is_empty() {
            return Err(Error::InvalidDistribution("empty".into()));
        }
        if let Some(p) = probs.iter().find(|p| !(**p >= 0.0 && p.is_finite())) {
            return Err(Error::InvalidDistribution(format!("entry {p}")));
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > tol {
            return Err(Error::InvalidDistribution(format!("sums to {total}")));
        }
        probs.iter_mut().for_each(|p| *p /= total);
        Ok(Self(probs))
    }

    pub fn uniform(n: usize) -> Self {
        Self(vec![1.0 / n as f64; n])
    }

    pub fn probs(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }
}

pub fn shannon_entropy(d: &Distribution, base: LogBase) -> f64 {
    let h: f64 = d
        .probs()
        .iter()
        .filter(|&&p| p > 0.0)
        .map(|&p| -p * p.ln())
        .sum();
    base.from_nats(h)
}

/// Row-stochastic transition matrix `p(j|i)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassicalChannel {
    rows: Vec<Vec<f64>>,
}

impl ClassicalChannel {
    pub fn new(rows: Vec<Vec<f64>>) -> Result<Self> {
        Self::with_tolerance(rows, ROW_TOL)
    }

    pub fn with_tolerance(mut rows: Vec<Vec<f64>>, tol: f64) -> Result<Self> {
        let outputs = rows.first().map_or(0, Vec::len);
        if rows.is_empty() || outputs == 0 {
            return Err(Error::InvalidChannel("empty matrix".into()));
        }
        for (i, row) in rows.iter_mut().enumerate() {
            if row.len() != outputs {
                return Err(Error::InvalidChannel(format!(
                    "row {i} has {} entries, expected {outputs}",
                    row.len()
                )));
            }
            if let Some(x) = row.iter().find(|x| !(**x >= 0.0 && x.is_finite())) {
                return Err(Error::InvalidChannel(format!("row {i} has entry {x}")));
            }
            let total: f64 = row.iter().sum();
            if (total - 1.0).abs() > tol {
                return Err(Error::InvalidChannel(format!("row {i} sums to {total}")));
            }
            row.iter_mut().for_each(|x| *x /= total);
        }
        Ok(Self { rows })
    }

    pub fn binary_symmetric(flip: f64) -> Result<Self> {
        Self::new(vec![vec![1.0 - flip, flip], vec![flip, 1.0 - flip]])
    }

    pub fn identity(n: usize) -> Self {
        let rows = (0..n)
            .map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
            .collect();
        Self { rows }
    }

    pub fn inputs(&self) -> usize {
        self.rows.len()
    }

    pub fn outputs(&self) -> usize {
        self.rows[0].len()
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }

    pub fn output_distribution(&self, prior: &[f64]) -> Vec<f64> {
        let mut q = vec![0.0; self.outputs()];
        for (p, row) in prior.iter().zip(&self.rows) {
            for (qj, w) in q.iter_mut().zip(row) {
                *qj += p * w;
            }
        }
        q
    }

    /// Mutual information between input and output under `prior`.
    pub fn mutual_information(&self, prior: &Distribution, base: LogBase) -> Result<f64> {
        if prior.len() != self.inputs() {
            return Err(Error::DimensionMismatch(prior.len(), self.inputs()));
        }
        let q = self.output_distribution(prior.probs());
        let mut acc = 0.0;
        for (p, row) in prior.probs().iter().zip(&self.rows) {
            for (w, qj) in row.iter().zip(&q) {
                if p * w > PROB_FLOOR && *qj > 0.0 {
                    acc += p * w * (w / qj).ln();
                }
            }
        }
        Ok(base.from_nats(acc.max(0.0)))
    }

    /// `D(p(·|i) ‖ q)` in nats for every input `i`.
    pub(crate) fn divergences(&self, q: &[f64]) -> Vec<f64> {
        self.rows
            .iter()
            .map(|row| {
                row.iter()
                    .zip(q)
                    .filter(|(w, _)| **w > PROB_FLOOR)
                    .map(|(w, qj)| w * (w / qj.max(PROB_FLOOR)).ln())
                    .sum()
            })
            .collect()
    }
}

/// Channel `p(j|i) = Tr[ρ_i Π_j]` induced by measuring each ensemble member.
pub fn joint_statistics(e: &Ensemble, p: &Povm) -> Result<ClassicalChannel> {
    if e.dim() != p.dim() {
        return Err(Error::DimensionMismatch(e.dim(), p.dim()));
    }
    let rows = e
        .states()
        .iter()
        .map(|rho| outcome_probabilities(p, rho))
        .collect();
    ClassicalChannel::new(rows)
}

fn outcome_probabilities(p: &Povm, rho: &DensityOperator) -> Vec<f64> {
    let mut row: Vec<f64> = p
        .elements()
        .iter()
        .map(|el| el.trace_product(rho.matrix()))
        .map(|x| {
            if x < 0.0 && x > -CLAMP_SLACK {
                0.0
            } else if x > 1.0 && x < 1.0 + CLAMP_SLACK {
                1.0
            } else {
                x
            }
        })
        .collect();
    let total: f64 = row.iter().sum();
    if (total - 1.0).abs() <= ROW_TOL {
        row.iter_mut().for_each(|x| *x /= total);
    }
    row
}

/// Output distribution of the quantum-classical channel `ρ ↦ Σ_j Tr[ρΠ_j]|j⟩⟨j|`.
pub fn apply_qc_channel(p: &Povm, rho: &DensityOperator) -> Result<Distribution> {
    if rho.dim() != p.dim() {
        return Err(Error::DimensionMismatch(rho.dim(), p.dim()));
    }
    Distribution::with_tolerance(outcome_probabilities(p, rho), ROW_TOL)
}

/// `I(R, Π)` computed directly from the traces `p_i Tr[ρ_i Π_j]`.
pub fn mutual_information(e: &Ensemble, p: &Povm, base: LogBase) -> Result<f64> {
    if e.dim() != p.dim() {
        return Err(Error::DimensionMismatch(e.dim(), p.dim()));
    }
    let cond: Vec<Vec<f64>> = e
        .states()
        .iter()
        .map(|rho| {
            p.elements()
                .iter()
                .map(|el| el.trace_product(rho.matrix()).max(0.0))
                .collect()
        })
        .collect();
    Ok(base.from_nats(mutual_information_nats(e.priors(), &cond)))
}

pub(crate) fn mutual_information_nats(priors: &[f64], cond: &[Vec<f64>]) -> f64 {
    let n = cond.first().map_or(0, Vec::len);
    let mut q = vec![0.0; n];
    for (p, row) in priors.iter().zip(cond) {
        for (qj, w) in q.iter_mut().zip(row) {
            *qj += p * w;
        }
    }
    let mut acc = 0.0;
    for (p, row) in priors.iter().zip(cond) {
        for (w, qj) in row.iter().zip(&q) {
            let joint = p * w;
            if joint > PROB_FLOOR && *qj > 0.0 {
                acc += joint * (w / qj).ln();
            }
        }
    }
    acc.max(0.0)
}

/// Outcome of [`blahut_arimoto`]. `capacity` and `gap` are in the requested base.
#[derive(Debug, Clone, PartialEq)]
pub struct CapacityResult {
    pub capacity: f64,
    pub prior: Distribution,
    /// Certified `max_i D_i − Σ_i p_i D_i` at the returned prior.
    pub gap: f64,
    pub iterations: usize,
    pub converged: bool,
}

/// Capacity of a discrete memoryless channel by alternating maximization.
///
/// Stops once the gap between the upper bound `max_i D(p(·|i)‖q)` and the
/// current mutual information is at most `tol` (in `base` units).
pub fn blahut_arimoto(
    ch: &ClassicalChannel,
    tol: f64,
    max_iter: usize,
    base: LogBase,
) -> Result<CapacityResult> {
    if !(tol > 0.0) {
        return Err(Error::InvalidConfig(format!(
            "tolerance must be positive, got {tol}"
        )));
    }
    let start = vec![1.0 / ch.inputs() as f64; ch.inputs()];
    let run = blahut_arimoto_nats(ch, start, base.to_nats(tol), max_iter);
    Ok(CapacityResult {
        capacity: base.from_nats(run.capacity),
        prior: Distribution(run.prior),
        gap: base.from_nats(run.gap),
        iterations: run.iterations,
        converged: run.converged,
    })
}

pub(crate) struct BaRun {
    pub capacity: f64,
    pub prior: Vec<f64>,
    pub gap: f64,
    pub iterations: usize,
    pub converged: bool,
}

/// Blahut–Arimoto from an arbitrary starting prior, everything in nats.
pub(crate) fn blahut_arimoto_nats(
    ch: &ClassicalChannel,
    mut prior: Vec<f64>,
    tol: f64,
    max_iter: usize,
) -> BaRun {
    let mut iterations = 0;
    loop {
        let q = ch.output_distribution(&prior);
        let d = ch.divergences(&q);
        let lower: f64 = prior.iter().zip(&d).map(|(p, di)| p * di).sum();
        let upper = d.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let gap = (upper - lower).max(0.0);
        if gap <= tol || iterations >= max_iter {
            return BaRun {
                capacity: lower.max(0.0),
                prior,
                gap,
                iterations,
                converged: gap <= tol,
            };
        }
        for (p, di) in prior.iter_mut().zip(&d) {
            *p *= (di - upper).exp();
        }
        let total: f64 = prior.iter().sum();
        prior.iter_mut().for_each(|p| *p /= total);
        iterations += 1;
    }
}
