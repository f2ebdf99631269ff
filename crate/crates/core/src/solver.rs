//! Informational power of a POVM: `W(Π) = max_R I(R, Π)`.
//!
//! The search runs over ensembles of `M` pure states. Each restart alternates
//! an exact prior update (Blahut–Arimoto on the induced classical channel)
//! with a line-searched ascent step on the states, which live on the unit
//! sphere of `C^D`. Commuting measurements skip the search: their optimum is
//! attained on the common eigenbasis, so a single Blahut–Arimoto run is exact.

use std::cell::RefCell;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::info::{self, blahut_arimoto_nats, ClassicalChannel, LogBase, PROB_FLOOR};
use crate::linalg::{self, CMatrix, CVector, C64};
use crate::objects::{self, Ensemble, Povm, PureState};

/// Largest pairwise commutator norm for which the commuting path is taken.
pub const COMMUTING_TOL: f64 = 1e-10;

const ARMIJO: f64 = 1e-4;
const MIN_STEP: f64 = 1e-16;
const INNER_BA_TOL: f64 = 1e-14;
const INNER_BA_ITER: usize = 200;
const FINAL_BA_ITER: usize = 100_000;
/// Members whose outcome distributions agree to this (max-abs) are merged.
const MERGE_TOL: f64 = 1e-6;
const PURITY_TOL: f64 = 1e-9;
const SUPPORT_RANK_TOL: f64 = 1e-8;
const MAX_INSERTIONS: usize = 20;
/// Required excess (nats) of the best divergence over the current value before inserting.
const INSERTION_GAP: f64 = 1e-7;
const INSERTION_RANDOM_STARTS: usize = 4;
const DIVERGENCE_ASCENT_ITER: usize = 500;

#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    /// Ensemble size; `None` means `D²`.
    pub num_states: Option<usize>,
    pub restarts: usize,
    /// Outer-loop improvement threshold, in nats.
    pub tol: f64,
    pub max_outer_iter: usize,
    pub seed: u64,
    pub base: LogBase,
    pub prune_tol: f64,
    /// Worker threads for restarts. Results do not depend on this.
    pub jobs: usize,
    /// Route commuting POVMs to [`commuting_fast_path`].
    pub allow_fast_path: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            num_states: None,
            restarts: 20,
            tol: 1e-9,
            max_outer_iter: 10_000,
            seed: 0,
            base: LogBase::Bits,
            prune_tol: 1e-8,
            jobs: 1,
            allow_fast_path: true,
        }
    }
}

/// Cardinality check of the reported ensemble against `D ≤ M ≤ D²`.
///
/// `m_eff` counts distinct members with non-negligible prior. When the
/// ensemble average is singular, an equally good ensemble of
/// `completed_size = m_eff + D − support_rank` members exists, obtained by
/// adding zero-prior states spanning its kernel.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundCheck {
    pub dim: usize,
    pub m_eff: usize,
    /// Rank of the ensemble average.
    pub support_rank: usize,
    pub completed_size: usize,
    pub lower_ok: bool,
    pub upper_ok: bool,
    /// Whether every POVM element has real entries.
    pub real_povm: bool,
    /// `D(D+1)/2`, reported for real POVMs only.
    pub real_bound: Option<usize>,
    pub real_ok: Option<bool>,
}

impl BoundCheck {
    pub fn new(dim: usize, m_eff: usize, support_rank: usize, real_povm: bool) -> Self {
        let real_bound = real_povm.then_some(dim * (dim + 1) / 2);
        Self {
            dim,
            m_eff,
            support_rank,
            completed_size: m_eff + dim.saturating_sub(support_rank),
            lower_ok: dim <= m_eff,
            upper_ok: m_eff <= dim * dim,
            real_povm,
            real_bound,
            real_ok: real_bound.map(|b| m_eff <= b),
        }
    }

    pub fn passed(&self) -> bool {
        self.lower_ok && self.upper_ok && self.real_ok.unwrap_or(true)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PowerReport {
    /// Best mutual information found, in `base` units.
    pub w_estimate: f64,
    pub base: LogBase,
    pub best_ensemble: Ensemble,
    /// Pure states of `best_ensemble`, same order.
    pub best_states: Vec<PureState>,
    pub per_restart_values: Vec<f64>,
    pub converged: bool,
    /// Outer iterations summed over all restarts.
    pub iterations_used: usize,
    pub fast_path_used: bool,
    pub pruned_to: usize,
    pub bound_check: BoundCheck,
    pub warnings: Vec<String>,
}

/// An ensemble whose members are pure states.
#[derive(Debug, Clone, PartialEq)]
pub struct PureEnsemble {
    pub priors: Vec<f64>,
    pub states: Vec<PureState>,
}

impl PureEnsemble {
    pub fn new(priors: Vec<f64>, states: Vec<PureState>) -> Result<Self> {
        let e = Ensemble::from_pure(priors, &states)?;
        Ok(Self {
            priors: e.priors().to_vec(),
            states,
        })
    }

    /// Extracts state vectors (with an arbitrary global phase) from rank-one members.
    pub fn from_ensemble(e: &Ensemble) -> Result<Self> {
        let mut states = Vec::with_capacity(e.len());
        for (i, rho) in e.states().iter().enumerate() {
            if (rho.purity() - 1.0).abs() > PURITY_TOL {
                return Err(Error::MixedState(i));
            }
            let eig = linalg::eigh(rho.matrix())?;
            let top = eig.vectors.column(eig.values.len() - 1).into_owned();
            states.push(PureState::normalized(top)?);
        }
        Ok(Self {
            priors: e.priors().to_vec(),
            states,
        })
    }

    pub fn to_ensemble(&self) -> Result<Ensemble> {
        Ensemble::from_pure(self.priors.clone(), &self.states)
    }
}

/// Mixes a seed with a restart index (splitmix64 finalizer).
pub fn restart_seed(seed: u64, index: usize) -> u64 {
    let mut z = seed ^ (index as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15);
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce5_e9b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Per-member data for one configuration of states.
struct Statistics {
    /// `Π_j |ψ_i⟩`, indexed `[i][j]`.
    images: Vec<Vec<CVector>>,
    /// `⟨ψ_i|Π_j|ψ_i⟩`.
    cond: Vec<Vec<f64>>,
}

impl Statistics {
    fn compute(elements: &[CMatrix], states: &[CVector]) -> Self {
        let mut images = Vec::with_capacity(states.len());
        let mut cond = Vec::with_capacity(states.len());
        for psi in states {
            let img: Vec<CVector> = elements.iter().map(|el| el * psi).collect();
            let row: Vec<f64> = img.iter().map(|v| psi.dotc(v).re.max(0.0)).collect();
            images.push(img);
            cond.push(row);
        }
        Self { images, cond }
    }

    /// `D(p(·|i) ‖ q)` in nats for each member.
    fn divergences(&self, q: &[f64]) -> Vec<f64> {
        self.cond
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

    fn objective(&self, priors: &[f64]) -> f64 {
        info::mutual_information_nats(priors, &self.cond)
    }

    fn output(&self, priors: &[f64]) -> Vec<f64> {
        let n = self.cond[0].len();
        let mut q = vec![0.0; n];
        for (p, row) in priors.iter().zip(&self.cond) {
            for (qj, w) in q.iter_mut().zip(row) {
                *qj += p * w;
            }
        }
        q
    }

    /// Tangent-projected gradient of `D(p(·|i) ‖ q)` with `q` held fixed, for
    /// every member. Scaling member `i` by its prior gives the gradient of the
    /// mutual information.
    fn divergence_gradients(&self, states: &[CVector], priors: &[f64]) -> Vec<CVector> {
        self.divergence_gradients_against(states, &self.output(priors))
    }

    fn divergence_gradients_against(&self, states: &[CVector], q: &[f64]) -> Vec<CVector> {
        states
            .iter()
            .enumerate()
            .map(|(i, psi)| {
                let mut g = CVector::zeros(psi.len());
                for (j, img) in self.images[i].iter().enumerate() {
                    let pij = self.cond[i][j];
                    if pij <= PROB_FLOOR {
                        continue;
                    }
                    let w = 2.0 * (pij / q[j].max(PROB_FLOOR)).ln();
                    g.axpy(C64::new(w, 0.0), img, C64::new(1.0, 0.0));
                }
                let radial = psi.dotc(&g).re;
                g.axpy(C64::new(-radial, 0.0), psi, C64::new(1.0, 0.0));
                g
            })
            .collect()
    }
}

fn povm_matrices(p: &Povm) -> Vec<CMatrix> {
    p.elements().iter().map(|e| e.as_matrix().clone()).collect()
}

/// Projected gradient of `I(R, Π)` in nats with respect to each state vector,
/// `g_i = 2 p_i Σ_j ln(p(j|i)/q_j) Π_j|ψ_i⟩` minus its radial component.
pub fn state_gradient(e: &PureEnsemble, p: &Povm) -> Result<Vec<CVector>> {
    let dim = p.dim();
    if let Some(s) = e.states.iter().find(|s| s.dim() != dim) {
        return Err(Error::DimensionMismatch(s.dim(), dim));
    }
    let elements = povm_matrices(p);
    let states: Vec<CVector> = e.states.iter().map(|s| s.amplitudes().clone()).collect();
    let stats = Statistics::compute(&elements, &states);
    let mut grads = stats.divergence_gradients(&states, &e.priors);
    for (g, p) in grads.iter_mut().zip(&e.priors) {
        *g *= C64::new(*p, 0.0);
    }
    Ok(grads)
}

struct RestartOutcome {
    value: f64,
    priors: Vec<f64>,
    states: Vec<CVector>,
    iterations: usize,
    converged: bool,
}

struct SeeSaw<'a> {
    elements: &'a [CMatrix],
    tol: f64,
    max_outer_iter: usize,
    /// Objective after every half-step, when recording.
    trace: Option<RefCell<Vec<f64>>>,
}

impl SeeSaw<'_> {
    fn record(&self, value: f64) {
        if let Some(t) = &self.trace {
            t.borrow_mut().push(value);
        }
    }

    fn prior_update(&self, stats: &Statistics, priors: &[f64], max_iter: usize) -> Vec<f64> {
        let ch = ClassicalChannel::with_tolerance(stats.cond.clone(), 1e-6)
            .expect("statistics of a valid POVM are row-stochastic");
        blahut_arimoto_nats(&ch, priors.to_vec(), INNER_BA_TOL, max_iter).prior
    }

    /// Alternates prior and state updates until the objective stalls.
    /// Returns (value, iterations, converged); `priors` and `states` are updated in place.
    fn run(&self, priors: &mut Vec<f64>, states: &mut Vec<CVector>) -> (f64, usize, bool) {
        let mut stats = Statistics::compute(self.elements, states);
        let mut value = stats.objective(priors);
        let updated = self.prior_update(&stats, priors, INNER_BA_ITER);
        let v = stats.objective(&updated);
        if v >= value {
            *priors = updated;
            value = v;
        }
        self.record(value);

        for iteration in 1..=self.max_outer_iter {
            let start = value;
            let dirs = stats.divergence_gradients(states, priors);
            let slope: f64 = dirs
                .iter()
                .zip(priors.iter())
                .map(|(d, p)| p * d.norm_squared())
                .sum();

            let mut step = 1.0;
            let mut accepted = None;
            if slope > 0.0 {
                while step >= MIN_STEP {
                    let trial: Vec<CVector> = states
                        .iter()
                        .zip(&dirs)
                        .map(|(psi, d)| {
                            let v = psi + d * C64::new(step, 0.0);
                            let n = v.norm();
                            v.unscale(n)
                        })
                        .collect();
                    let trial_stats = Statistics::compute(self.elements, &trial);
                    let trial_value = trial_stats.objective(priors);
                    if trial_value >= value + ARMIJO * step * slope {
                        accepted = Some((trial, trial_stats, trial_value));
                        break;
                    }
                    step *= 0.5;
                }
            }
            if let Some((trial, trial_stats, trial_value)) = accepted {
                *states = trial;
                stats = trial_stats;
                value = trial_value;
            }
            self.record(value);

            let updated = self.prior_update(&stats, priors, INNER_BA_ITER);
            let v = stats.objective(&updated);
            if v >= value {
                *priors = updated;
                value = v;
            }
            self.record(value);

            if value - start < self.tol {
                return (value, iteration, true);
            }
        }
        (value, self.max_outer_iter, false)
    }

    /// Final exact prior optimization for fixed states.
    fn settle_priors(&self, priors: &mut Vec<f64>, states: &[CVector]) -> f64 {
        let stats = Statistics::compute(self.elements, states);
        let mut value = stats.objective(priors);
        let updated = self.prior_update(&stats, priors, FINAL_BA_ITER);
        let v = stats.objective(&updated);
        if v >= value {
            *priors = updated;
            value = v;
        }
        value
    }
}

/// Drops members below `prune_tol` and merges members with matching statistics.
fn compress(
    elements: &[CMatrix],
    priors: &[f64],
    states: &[CVector],
    prune_tol: f64,
) -> (Vec<f64>, Vec<CVector>) {
    let stats = Statistics::compute(elements, states);
    let mut kept: Vec<(f64, usize)> = Vec::new();
    let mut order: Vec<usize> = (0..priors.len())
        .filter(|&i| priors[i] >= prune_tol)
        .collect();
    // heaviest member of a merged group keeps its state
    order.sort_by(|&a, &b| priors[b].total_cmp(&priors[a]).then(a.cmp(&b)));
    for i in order {
        let twin = kept.iter_mut().find(|(_, k)| {
            stats.cond[*k]
                .iter()
                .zip(&stats.cond[i])
                .all(|(x, y)| (x - y).abs() <= MERGE_TOL)
        });
        match twin {
            Some((w, _)) => *w += priors[i],
            None => kept.push((priors[i], i)),
        }
    }
    kept.sort_by_key(|&(_, i)| i);
    let total: f64 = kept.iter().map(|(w, _)| w).sum();
    let new_priors = kept.iter().map(|(w, _)| w / total).collect();
    let new_states = kept.iter().map(|&(_, i)| states[i].clone()).collect();
    (new_priors, new_states)
}

fn run_restart(
    elements: &[CMatrix],
    dim: usize,
    m: usize,
    cfg: &SolverConfig,
    index: usize,
) -> RestartOutcome {
    let mut rng = ChaCha8Rng::seed_from_u64(restart_seed(cfg.seed, index));
    let mut states: Vec<CVector> = objects::random_pure_states_from(&mut rng, dim, m)
        .into_iter()
        .map(|s| s.amplitudes().clone())
        .collect();
    let mut priors = vec![1.0 / m as f64; m];
    let seesaw = SeeSaw {
        elements,
        tol: cfg.tol,
        max_outer_iter: cfg.max_outer_iter,
        trace: None,
    };
    let (mut value, mut iterations, mut converged) = seesaw.run(&mut priors, &mut states);

    // Swap the weakest member for the state that most violates the
    // optimality condition `max_ψ D(p(·|ψ) ‖ q) ≤ I`, while that helps.
    for _ in 0..MAX_INSERTIONS {
        let q = Statistics::compute(elements, &states).output(&priors);
        let starts = insertion_starts(&mut rng, &states, dim);
        let (candidate, divergence) = maximize_divergence(elements, &q, starts);
        if divergence <= value + INSERTION_GAP {
            break;
        }
        let weakest = (0..priors.len())
            .min_by(|&a, &b| priors[a].total_cmp(&priors[b]).then(a.cmp(&b)))
            .unwrap();
        let mut trial_states = states.clone();
        trial_states[weakest] = candidate;
        let mut trial_priors = priors.clone();
        trial_priors[weakest] = 1.0 / m as f64;
        let total: f64 = trial_priors.iter().sum();
        trial_priors.iter_mut().for_each(|w| *w /= total);
        let (trial_value, used, trial_converged) = seesaw.run(&mut trial_priors, &mut trial_states);
        iterations += used;
        if trial_value <= value + cfg.tol {
            break;
        }
        states = trial_states;
        priors = trial_priors;
        value = trial_value;
        converged = trial_converged;
    }
    let value = seesaw.settle_priors(&mut priors, &states).max(value);

    let (mut c_priors, mut c_states) = compress(elements, &priors, &states, cfg.prune_tol);
    let (_, polish_iters, polish_converged) = seesaw.run(&mut c_priors, &mut c_states);
    let c_value = seesaw.settle_priors(&mut c_priors, &c_states);
    iterations += polish_iters;

    if c_value >= value - cfg.tol {
        converged &= polish_converged;
        // a second pass catches members that only drop out after polishing
        let (f_priors, f_states) = compress(elements, &c_priors, &c_states, cfg.prune_tol);
        if f_priors.len() < c_priors.len() {
            let mut f_priors = f_priors;
            let f_value = seesaw.settle_priors(&mut f_priors, &f_states);
            if f_value >= c_value - cfg.tol {
                return RestartOutcome {
                    value: f_value,
                    priors: f_priors,
                    states: f_states,
                    iterations,
                    converged,
                };
            }
        }
        RestartOutcome {
            value: c_value,
            priors: c_priors,
            states: c_states,
            iterations,
            converged,
        }
    } else {
        RestartOutcome {
            value,
            priors,
            states,
            iterations,
            converged,
        }
    }
}

fn insertion_starts(rng: &mut ChaCha8Rng, states: &[CVector], dim: usize) -> Vec<CVector> {
    let mut starts: Vec<CVector> = states.to_vec();
    starts.extend(
        objects::random_pure_states_from(rng, dim, INSERTION_RANDOM_STARTS * dim)
            .into_iter()
            .map(|s| s.amplitudes().clone()),
    );
    starts
}

/// Multistart ascent of `ψ ↦ D(p(·|ψ) ‖ q)` over unit vectors. Returns the best
/// state found and its divergence in nats.
fn maximize_divergence(elements: &[CMatrix], q: &[f64], starts: Vec<CVector>) -> (CVector, f64) {
    let mut best: Option<(CVector, f64)> = None;
    for start in starts {
        let mut psi = vec![start];
        let mut stats = Statistics::compute(elements, &psi);
        let mut value = stats.divergences(q)[0];
        for _ in 0..DIVERGENCE_ASCENT_ITER {
            let dir = stats.divergence_gradients_against(&psi, q).remove(0);
            let slope = dir.norm_squared();
            if slope <= 0.0 {
                break;
            }
            let mut step = 1.0;
            let mut moved = false;
            while step >= MIN_STEP {
                let v = &psi[0] + &dir * C64::new(step, 0.0);
                let trial = vec![v.unscale(v.norm())];
                let trial_stats = Statistics::compute(elements, &trial);
                let trial_value = trial_stats.divergences(q)[0];
                if trial_value >= value + ARMIJO * step * slope {
                    moved = trial_value - value > 1e-14;
                    psi = trial;
                    stats = trial_stats;
                    value = trial_value;
                    break;
                }
                step *= 0.5;
            }
            if !moved {
                break;
            }
        }
        if best.as_ref().is_none_or(|(_, b)| value > *b) {
            best = Some((psi.remove(0), value));
        }
    }
    best.expect("at least one start")
}

/// Upper estimate of the informational power from an ensemble's output
/// distribution: `max_ψ D(p(·|ψ) ‖ q)`, maximized by multistart ascent.
/// Exact when the ascent finds the global maximizer; it then certifies
/// optimality of any ensemble whose mutual information reaches it.
pub fn divergence_bound(p: &Povm, e: &PureEnsemble, starts: usize, seed: u64) -> Result<f64> {
    let elements = povm_matrices(p);
    let states: Vec<CVector> = e.states.iter().map(|s| s.amplitudes().clone()).collect();
    if let Some(s) = states.iter().find(|s| s.len() != p.dim()) {
        return Err(Error::DimensionMismatch(s.len(), p.dim()));
    }
    let q = Statistics::compute(&elements, &states).output(&e.priors);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut all = states;
    all.extend(
        objects::random_pure_states_from(&mut rng, p.dim(), starts)
            .into_iter()
            .map(|s| s.amplitudes().clone()),
    );
    Ok(maximize_divergence(&elements, &q, all).1)
}

fn check_config(p: &Povm, cfg: &SolverConfig) -> Result<(usize, Vec<String>)> {
    let dim = p.dim();
    let m = cfg.num_states.unwrap_or(dim * dim);
    let mut warnings = Vec::new();
    if m < dim {
        return Err(Error::InvalidConfig(format!(
            "num_states {m} is below the dimension {dim}"
        )));
    }
    if m > dim * dim {
        warnings.push(format!(
            "num_states {m} exceeds D² = {}; larger ensembles are never needed",
            dim * dim
        ));
    }
    if cfg.restarts == 0 {
        return Err(Error::InvalidConfig("restarts must be at least 1".into()));
    }
    if !(cfg.tol > 0.0) {
        return Err(Error::InvalidConfig(format!(
            "tol must be positive, got {}",
            cfg.tol
        )));
    }
    if !(cfg.prune_tol >= 0.0) {
        return Err(Error::InvalidConfig(format!("prune_tol {}", cfg.prune_tol)));
    }
    Ok((m, warnings))
}

fn finish_report(
    p: &Povm,
    priors: Vec<f64>,
    states: Vec<PureState>,
    base: LogBase,
) -> Result<(f64, Ensemble, Vec<PureState>, BoundCheck)> {
    let ensemble = Ensemble::from_pure(priors, &states)?;
    let w = info::mutual_information(&ensemble, p, base)?;
    let (_, rank) = linalg::support_projector(
        objects::ensemble_average(&ensemble).matrix(),
        SUPPORT_RANK_TOL,
    )?;
    let bound = BoundCheck::new(p.dim(), ensemble.len(), rank, p.is_real(0.0));
    Ok((w, ensemble, states, bound))
}

/// Searches for the ensemble that maximizes the mutual information with `p`.
pub fn informational_power(p: &Povm, cfg: &SolverConfig) -> Result<PowerReport> {
    let validation = p.validate(objects::CONSTRUCTION_TOL.max(objects::INGEST_TOL));
    if !validation.passed {
        return Err(Error::InvalidPovm(validation.failures.join("; ")));
    }
    let (m, warnings) = check_config(p, cfg)?;
    if cfg.allow_fast_path && p.max_commutator_norm() <= COMMUTING_TOL {
        let mut report = commuting_fast_path(p, cfg.tol, cfg.base)?;
        report.warnings = warnings;
        return Ok(report);
    }

    let dim = p.dim();
    let elements = povm_matrices(p);
    let run = |index: usize| run_restart(&elements, dim, m, cfg, index);
    let outcomes: Vec<RestartOutcome> = if cfg.jobs > 1 {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(cfg.jobs)
            .build()
            .map_err(|e| Error::InvalidConfig(format!("thread pool: {e}")))?;
        pool.install(|| (0..cfg.restarts).into_par_iter().map(run).collect())
    } else {
        (0..cfg.restarts).map(run).collect()
    };

    let mut best = 0;
    for (i, o) in outcomes.iter().enumerate() {
        if o.value > outcomes[best].value {
            best = i;
        }
    }
    let per_restart_values = outcomes
        .iter()
        .map(|o| cfg.base.from_nats(o.value))
        .collect();
    let iterations_used = outcomes.iter().map(|o| o.iterations).sum();
    let winner = &outcomes[best];
    let states = winner
        .states
        .iter()
        .map(|v| PureState::normalized(v.clone()))
        .collect::<Result<Vec<_>>>()?;
    let (w_estimate, best_ensemble, best_states, bound_check) =
        finish_report(p, winner.priors.clone(), states, cfg.base)?;
    Ok(PowerReport {
        w_estimate,
        base: cfg.base,
        pruned_to: best_ensemble.len(),
        best_ensemble,
        best_states,
        per_restart_values,
        converged: winner.converged,
        iterations_used,
        fast_path_used: false,
        bound_check,
        warnings,
    })
}

/// Exact solution for POVMs whose elements pairwise commute: optimize the
/// priors of the common eigenbasis states. `tol` is in nats.
pub fn commuting_fast_path(p: &Povm, tol: f64, base: LogBase) -> Result<PowerReport> {
    commuting_fast_path_with(p, tol, base, SolverConfig::default().prune_tol)
}

pub fn commuting_fast_path_with(
    p: &Povm,
    tol: f64,
    base: LogBase,
    prune_tol: f64,
) -> Result<PowerReport> {
    let basis = linalg::simultaneous_eigenbasis(p.elements(), COMMUTING_TOL)?;
    let dim = p.dim();
    let vectors: Vec<CVector> = (0..dim).map(|i| basis.column(i).into_owned()).collect();
    let rows: Vec<Vec<f64>> = vectors
        .iter()
        .map(|v| {
            p.elements()
                .iter()
                .map(|el| el.expectation(v).max(0.0))
                .collect()
        })
        .collect();
    let ch = ClassicalChannel::with_tolerance(rows, 1e-8)?;
    let ba = blahut_arimoto_nats(&ch, vec![1.0 / dim as f64; dim], tol, FINAL_BA_ITER);

    let mut priors = Vec::new();
    let mut states = Vec::new();
    for (w, v) in ba.prior.iter().zip(vectors) {
        if *w >= prune_tol {
            priors.push(*w);
            states.push(PureState::normalized(v)?);
        }
    }
    let total: f64 = priors.iter().sum();
    priors.iter_mut().for_each(|w| *w /= total);
    let (w_estimate, best_ensemble, best_states, bound_check) =
        finish_report(p, priors, states, base)?;
    Ok(PowerReport {
        w_estimate,
        base,
        pruned_to: best_ensemble.len(),
        best_ensemble,
        best_states,
        per_restart_values: vec![w_estimate],
        converged: ba.converged,
        iterations_used: ba.iterations,
        fast_path_used: true,
        bound_check,
        warnings: Vec::new(),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct AdditivityReport {
    pub w1: f64,
    pub w2: f64,
    pub w12: f64,
    /// `w12 − (w1 + w2)`; zero in exact arithmetic.
    pub gap: f64,
    pub base: LogBase,
}

/// Solves `p1`, `p2` and `p1 ⊗ p2` with the same configuration.
pub fn additivity_check(p1: &Povm, p2: &Povm, cfg: &SolverConfig) -> Result<AdditivityReport> {
    let w1 = informational_power(p1, cfg)?.w_estimate;
    let w2 = informational_power(p2, cfg)?.w_estimate;
    let w12 = informational_power(&p1.tensor(p2), cfg)?.w_estimate;
    Ok(AdditivityReport {
        w1,
        w2,
        w12,
        gap: w12 - (w1 + w2),
        base: cfg.base,
    })
}
