//! Analytic state gradient against central finite differences on the sphere.

use infopower::info::mutual_information;
use infopower::linalg::{CVector, C64};
use infopower::objects::{random_povm, random_pure_states, tetrahedral_sic_povm, PureState};
use infopower::solver::{state_gradient, PureEnsemble};
use infopower::{Ensemble, LogBase, Povm};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const STEP: f64 = 1e-6;

fn value(priors: &[f64], states: &[PureState], p: &Povm) -> f64 {
    let e = Ensemble::from_pure(priors.to_vec(), states).unwrap();
    mutual_information(&e, p, LogBase::Nats).unwrap()
}

/// Directional derivatives along every real tangent coordinate of every member,
/// analytic and numerical, in matching order.
fn derivatives(e: &PureEnsemble, p: &Povm) -> (Vec<f64>, Vec<f64>) {
    let grads = state_gradient(e, p).unwrap();
    let dim = p.dim();
    let (mut analytic, mut numeric) = (Vec::new(), Vec::new());
    for i in 0..e.states.len() {
        let psi = e.states[i].amplitudes().clone();
        for k in 0..2 * dim {
            let mut t = CVector::zeros(dim);
            t[k / 2] = if k % 2 == 0 {
                C64::new(1.0, 0.0)
            } else {
                C64::new(0.0, 1.0)
            };
            let radial = psi.dotc(&t).re;
            t -= psi.map(|z| z * radial);
            analytic.push(grads[i].dotc(&t).re);

            let moved = |h: f64| {
                let mut states = e.states.clone();
                states[i] = PureState::normalized(&psi + t.map(|z| z * h)).unwrap();
                value(&e.priors, &states, p)
            };
            numeric.push((moved(STEP) - moved(-STEP)) / (2.0 * STEP));
        }
    }
    (analytic, numeric)
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn relative_error(a: &[f64], n: &[f64]) -> f64 {
    let diff: Vec<f64> = a.iter().zip(n).map(|(x, y)| x - y).collect();
    norm(&diff) / norm(a)
}

#[test]
fn random_pairs_match_finite_differences() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut worst = 0.0f64;
    for pair in 0..50u64 {
        let dim = 2 + (pair % 2) as usize;
        let outcomes = dim + (pair % 3) as usize;
        let m = 2 + (pair % 4) as usize;
        let p = random_povm(dim, outcomes, 100 + pair).unwrap();
        let mut priors: Vec<f64> = (0..m).map(|_| rng.random_range(0.1..1.0)).collect();
        let total: f64 = priors.iter().sum();
        priors.iter_mut().for_each(|x| *x /= total);
        let e = PureEnsemble::new(priors, random_pure_states(dim, m, 500 + pair)).unwrap();
        let (a, n) = derivatives(&e, &p);
        let err = relative_error(&a, &n);
        worst = worst.max(err);
        assert!(err <= 1e-5, "pair {pair}: relative error {err:e}");
    }
    eprintln!("worst relative gradient error {worst:e}");
}

#[test]
fn identical_states_have_vanishing_gradient() {
    let psi = random_pure_states(2, 1, 3).remove(0);
    let e = PureEnsemble::new(vec![0.3, 0.7], vec![psi.clone(), psi]).unwrap();
    let (a, n) = derivatives(&e, &tetrahedral_sic_povm());
    assert!(norm(&a) <= 1e-12);
    assert!(norm(&n) <= 1e-8);
}
