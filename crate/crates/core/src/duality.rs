//! Maps between ensembles and measurements.
//!
//! An ensemble `S = {q_i, σ_i}` with average `σ_S` defines the measurement
//! `Π(S) = {q_i σ_S^{-1/2} σ_i σ_S^{-1/2}}`; a measurement `Λ` together with a
//! state `σ` defines the ensemble
//! `R(Λ, σ) = {Tr[σΛ_j], σ^{1/2} Λ_j σ^{1/2} / Tr[σΛ_j]}`. For full-rank `σ`
//! the two maps invert each other.

use crate::error::{Error, Result};
use crate::linalg::{self, HermitianMatrix, DEFAULT_RANK_TOL};
use crate::objects::{ensemble_average, DensityOperator, Ensemble, Povm};

/// Outcomes whose weight `Tr[σΛ_j]` falls at or below this are dropped.
pub const ZERO_OUTCOME_TOL: f64 = 1e-14;

const STATE_TOL: f64 = 1e-9;

/// Measurement built from an ensemble, with bookkeeping for dropped members.
#[derive(Debug, Clone, PartialEq)]
pub struct DualPovm {
    pub povm: Povm,
    /// Ensemble index behind each output element; `None` marks the kernel completion.
    pub source: Vec<Option<usize>>,
    /// Ensemble members with zero prior that produced no element.
    pub dropped: Vec<usize>,
    pub support_rank: usize,
}

impl DualPovm {
    pub fn kernel_element(&self) -> Option<usize> {
        self.source.iter().position(Option::is_none)
    }
}

/// `Π(S)` on the support of `σ_S`, completed by `I − P_support` when `σ_S` is singular.
pub fn povm_from_ensemble(s: &Ensemble, rank_tol: f64) -> Result<DualPovm> {
    let sigma = ensemble_average(s);
    let inv_sqrt = linalg::pinv_sqrt(sigma.matrix(), rank_tol)?;
    let (support, support_rank) = linalg::support_projector(sigma.matrix(), rank_tol)?;

    let mut elements = Vec::with_capacity(s.len() + 1);
    let mut source = Vec::with_capacity(s.len() + 1);
    let mut dropped = Vec::new();
    for (i, (q, rho)) in s.members().enumerate() {
        if q <= ZERO_OUTCOME_TOL {
            dropped.push(i);
            continue;
        }
        elements.push(rho.matrix().sandwich(&inv_sqrt).scale(q));
        source.push(Some(i));
    }
    if elements.is_empty() {
        return Err(Error::Empty("every ensemble member has zero prior"));
    }
    let dim = s.dim();
    if support_rank < dim {
        elements.push(HermitianMatrix::identity(dim).sub(&support));
        source.push(None);
    }
    let povm = Povm::with_tolerance(elements, 1e-8)?;
    Ok(DualPovm {
        povm,
        source,
        dropped,
        support_rank,
    })
}

/// Ensemble built from a measurement and a state, with the indices of dropped outcomes.
#[derive(Debug, Clone, PartialEq)]
pub struct DualEnsemble {
    pub ensemble: Ensemble,
    /// POVM outcome behind each ensemble member.
    pub source: Vec<usize>,
    pub dropped: Vec<usize>,
}

/// `R(Λ, σ)`.
pub fn ensemble_from_povm(l: &Povm, sigma: &DensityOperator) -> Result<DualEnsemble> {
    if l.dim() != sigma.dim() {
        return Err(Error::DimensionMismatch(l.dim(), sigma.dim()));
    }
    let root = linalg::matrix_sqrt(sigma.matrix())?;
    let mut priors = Vec::with_capacity(l.len());
    let mut states = Vec::with_capacity(l.len());
    let mut source = Vec::with_capacity(l.len());
    let mut dropped = Vec::new();
    for (j, el) in l.elements().iter().enumerate() {
        let q = el.trace_product(sigma.matrix());
        if q <= ZERO_OUTCOME_TOL {
            dropped.push(j);
            continue;
        }
        let state = el.sandwich(&root).scale(1.0 / q);
        states.push(DensityOperator::with_tolerance(state, STATE_TOL)?);
        priors.push(q);
        source.push(j);
    }
    if priors.is_empty() {
        return Err(Error::Empty("state is orthogonal to every POVM element"));
    }
    let ensemble = Ensemble::with_tolerance(priors, states, 1e-9)?;
    Ok(DualEnsemble {
        ensemble,
        source,
        dropped,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct RoundTripReport {
    /// Largest `‖Π(R(Λ,σ))_j − Λ_j‖_F` over outcomes; dropped outcomes compare against zero.
    pub max_deviation: f64,
    /// `‖Σ_j q_j ρ_j − σ‖_F` for the intermediate ensemble.
    pub average_deviation: f64,
    pub dropped: Vec<usize>,
    pub kernel_completed: bool,
}

/// Runs `Λ → R(Λ, σ) → Π(R(Λ, σ))` and measures how far the result is from `Λ`.
pub fn duality_round_trip_check(l: &Povm, sigma: &DensityOperator) -> Result<RoundTripReport> {
    let dual = ensemble_from_povm(l, sigma)?;
    let avg = ensemble_average(&dual.ensemble);
    let average_deviation = avg.matrix().sub(sigma.matrix()).frobenius_norm();
    let back = povm_from_ensemble(&dual.ensemble, DEFAULT_RANK_TOL)?;

    let mut recovered: Vec<Option<&HermitianMatrix>> = vec![None; l.len()];
    for (el, src) in back.povm.elements().iter().zip(&back.source) {
        if let Some(i) = src {
            recovered[dual.source[*i]] = Some(el);
        }
    }
    let max_deviation = l
        .elements()
        .iter()
        .zip(&recovered)
        .map(|(orig, rec)| match rec {
            Some(r) => orig.sub(r).frobenius_norm(),
            None => orig.frobenius_norm(),
        })
        .fold(0.0, f64::max);
    Ok(RoundTripReport {
        max_deviation,
        average_deviation,
        dropped: dual.dropped,
        kernel_completed: back.kernel_element().is_some(),
    })
}
