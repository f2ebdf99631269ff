//! Acceptance checks. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

use std::f64::consts::PI;
use std::path::Path;
use std::process::{Command, ExitCode};
use std::time::Instant;

use infopower::duality::duality_round_trip_check;
use infopower::info::{blahut_arimoto, mutual_information};
use infopower::linalg::{CVector, C64};
use infopower::objects::*;
use infopower::solver::{commuting_fast_path, divergence_bound, state_gradient, PureEnsemble};
use infopower::{
    informational_power, ClassicalChannel, Ensemble, HermitianMatrix, LogBase, Povm, PureState,
    SolverConfig,
};
use infopower_cli::files::{from_json, to_json, PovmFile, ReportFile};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const LOG2_4_3: f64 = 0.41503749927884381;

struct Verdict {
    passed: bool,
    detail: String,
}

fn verdict(passed: bool, detail: String) -> Verdict {
    Verdict { passed, detail }
}

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_infopower"));
    c.env_remove("INFOPOWER_SEED");
    c
}

fn solve_cli(args: &[&str], out: &Path) -> Vec<u8> {
    let status = bin()
        .arg("solve")
        .args(args)
        .arg("--out")
        .arg(out)
        .output()
        .expect("binary runs");
    assert_eq!(
        status.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&status.stderr)
    );
    std::fs::read(out).unwrap()
}

fn sic_value() -> Verdict {
    let dir = tempfile::tempdir().unwrap();
    let start = Instant::now();
    let bytes = solve_cli(&["--example", "sic"], &dir.path().join("sic.json"));
    let secs = start.elapsed().as_secs_f64();
    let r: ReportFile = from_json(std::str::from_utf8(&bytes).unwrap()).unwrap();
    let err = (r.w_estimate - LOG2_4_3).abs();

    // Each returned state must be orthogonal to a distinct SIC direction.
    let pis = tetrahedral_states();
    let amps = r.ensemble.amplitudes.clone().unwrap_or_default();
    let mut used = vec![false; pis.len()];
    let mut worst = 0.0f64;
    let mut matched = amps.len() == pis.len();
    for a in &amps {
        let psi = CVector::from_iterator(a.len(), a.iter().map(|z| C64::new(z[0], z[1])));
        let best = (0..pis.len())
            .filter(|&i| !used[i])
            .map(|i| (i, pis[i].amplitudes().dotc(&psi).norm()))
            .min_by(|x, y| x.1.total_cmp(&y.1));
        match best {
            Some((i, ov)) => {
                used[i] = true;
                worst = worst.max(ov);
            }
            None => matched = false,
        }
    }
    let passed = err <= 1e-6 && secs < 30.0 && matched && worst <= 1e-3;
    verdict(
        passed,
        format!(
            "W = {:.15} bits, |dW| = {err:.1e}, worst overlap {worst:.1e}, {} members, {secs:.1} s",
            r.w_estimate,
            amps.len()
        ),
    )
}

fn projective_baselines() -> Verdict {
    let mut worst = 0.0f64;
    for d in 2..=4 {
        let r =
            informational_power(&standard_projective_povm(d), &SolverConfig::default()).unwrap();
        worst = worst.max((r.w_estimate - (d as f64).log2()).abs());
    }
    verdict(
        worst <= 1e-6,
        format!("max |W - log2 D| = {worst:.1e} for D = 2, 3, 4"),
    )
}

fn trivial_povm() -> Verdict {
    let w = informational_power(&Povm::trivial(2), &SolverConfig::default())
        .unwrap()
        .w_estimate;
    verdict(w.abs() <= 1e-12, format!("W({{I}}) = {w:e}"))
}

fn random_commuting_povm(dim: usize, outcomes: usize, seed: u64) -> Povm {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let u = random_unitary(dim, seed ^ 0xc0ffee);
    let mut cols = vec![vec![0.0; dim]; outcomes];
    for k in 0..dim {
        let w: Vec<f64> = (0..outcomes).map(|_| rng.random_range(0.05..1.0)).collect();
        let s: f64 = w.iter().sum();
        for j in 0..outcomes {
            cols[j][k] = w[j] / s;
        }
    }
    let els = cols
        .iter()
        .map(|d| HermitianMatrix::from_real_diagonal(d).conjugate_by(&u))
        .collect();
    Povm::with_tolerance(els, 1e-10).unwrap()
}

fn commuting_theorem() -> Verdict {
    let generic_cfg = SolverConfig {
        allow_fast_path: false,
        ..SolverConfig::default()
    };
    let mut worst = 0.0f64;
    let mut meff_ok = true;
    for i in 0..20u64 {
        let dim = 2 + (i % 2) as usize;
        let outcomes = 2 + (i % 3) as usize;
        let p = random_commuting_povm(dim, outcomes, 1000 + i);
        let fast = commuting_fast_path(&p, 1e-13, LogBase::Bits).unwrap();
        let generic = informational_power(&p, &generic_cfg).unwrap();
        worst = worst.max((fast.w_estimate - generic.w_estimate).abs());
        meff_ok &= fast.bound_check.m_eff <= dim;
    }
    verdict(
        worst <= 1e-6 && meff_ok,
        format!("20 instances, max |W_generic - W_fast| = {worst:.1e} bits, fast-path M_eff <= D: {meff_ok}"),
    )
}

fn additivity() -> Verdict {
    let sic = tetrahedral_sic_povm();
    let cfg = SolverConfig {
        restarts: 40,
        ..SolverConfig::default()
    };
    let w = informational_power(&sic.tensor(&sic), &cfg)
        .unwrap()
        .w_estimate;
    let sic_err = (w - 2.0 * LOG2_4_3).abs();
    let p = standard_projective_povm(2);
    let wp = informational_power(&p.tensor(&p), &SolverConfig::default())
        .unwrap()
        .w_estimate;
    let proj_err = (wp - 2.0).abs();
    verdict(
        sic_err <= 1e-4 && proj_err <= 1e-6,
        format!("SIC x SIC: |W - 2 log2(4/3)| = {sic_err:.1e}; projective x projective: |W - 2| = {proj_err:.1e}"),
    )
}

fn cardinality_bounds() -> Verdict {
    let mut corpus: Vec<(String, Povm)> = Vec::new();
    for s in 0..15u64 {
        corpus.push((
            format!("complex D=2 N={} #{s}", 2 + s % 4),
            random_povm(2, 2 + (s % 4) as usize, 7000 + s).unwrap(),
        ));
        corpus.push((
            format!("complex D=3 N={} #{s}", 3 + s % 4),
            random_povm(3, 3 + (s % 4) as usize, 8000 + s).unwrap(),
        ));
    }
    for s in 0..10u64 {
        corpus.push((
            format!("real D=2 N={} #{s}", 2 + s % 3),
            random_real_povm(2, 2 + (s % 3) as usize, 9000 + s).unwrap(),
        ));
        corpus.push((
            format!("real D=3 N={} #{s}", 3 + s % 3),
            random_real_povm(3, 3 + (s % 3) as usize, 9500 + s).unwrap(),
        ));
    }
    corpus.push(("trine".into(), trine_povm()));
    corpus.push(("sic".into(), tetrahedral_sic_povm()));

    let cfg = SolverConfig::default();
    let (mut converged, mut lower_fail, mut upper_fail, mut real_fail) = (0, Vec::new(), 0, 0);
    let mut certificate_gap = 0.0f64;
    for (name, p) in &corpus {
        let r = informational_power(p, &cfg).unwrap();
        if !r.converged {
            continue;
        }
        converged += 1;
        let b = &r.bound_check;
        if !b.lower_ok {
            // No ensemble of any size beats max_psi D(P_psi || q) at the reported output q.
            let e = PureEnsemble::new(r.best_ensemble.priors().to_vec(), r.best_states.clone())
                .unwrap();
            let bound = LogBase::Bits.from_nats(divergence_bound(p, &e, 2000, 1).unwrap());
            certificate_gap = certificate_gap.max(bound - r.w_estimate);
            lower_fail.push(format!(
                "{name} (M_eff = {}, rank = {}, completed = {})",
                b.m_eff, b.support_rank, b.completed_size
            ));
        }
        upper_fail += usize::from(!b.upper_ok);
        real_fail += usize::from(b.real_ok == Some(false));
    }
    let passed = lower_fail.is_empty() && upper_fail == 0 && real_fail == 0;
    let mut detail = format!(
        "{} POVMs, {converged} converged; D <= M_eff violated {}, M_eff <= D^2 violated {upper_fail}, real bound violated {real_fail}",
        corpus.len(),
        lower_fail.len()
    );
    if !lower_fail.is_empty() {
        detail.push_str(&format!(
            ": {}; dual upper bound exceeds W by at most {certificate_gap:.1e} bits on these",
            lower_fail.join(", ")
        ));
    }
    verdict(passed, detail)
}

/// Independent brute-force search for the trine. Qubit states are Bloch
/// vectors, outcome probabilities are `(1 + n·m_j)/3` for trine directions
/// `m_j`; each start alternates a Blahut–Arimoto step with a gradient step on
/// the vectors.
mod trine_oracle {
    use super::*;

    fn directions() -> [[f64; 3]; 3] {
        let m = |k: f64| [(2.0 * PI * k / 3.0).cos(), (2.0 * PI * k / 3.0).sin(), 0.0];
        [m(0.0), m(1.0), m(2.0)]
    }

    fn dot(a: &[f64; 3], b: &[f64; 3]) -> f64 {
        a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
    }

    fn conditionals(ns: &[[f64; 3]]) -> Vec<[f64; 3]> {
        let ms = directions();
        ns.iter()
            .map(|n| {
                let mut row = [0.0; 3];
                for (j, m) in ms.iter().enumerate() {
                    row[j] = ((1.0 + dot(n, m)) / 3.0).max(1e-300);
                }
                row
            })
            .collect()
    }

    /// Mutual information in bits and the per-input divergences in nats.
    fn information(p: &[f64], cond: &[[f64; 3]]) -> (f64, Vec<f64>) {
        let mut q = [0.0; 3];
        for (pi, row) in p.iter().zip(cond) {
            for j in 0..3 {
                q[j] += pi * row[j];
            }
        }
        let d: Vec<f64> = cond
            .iter()
            .map(|row| (0..3).map(|j| row[j] * (row[j] / q[j]).ln()).sum())
            .collect();
        let i: f64 = p.iter().zip(&d).map(|(a, b)| a * b).sum();
        (i / 2f64.ln(), d)
    }

    pub fn anti_trine_value() -> f64 {
        let ns: Vec<[f64; 3]> = directions().iter().map(|m| [-m[0], -m[1], -m[2]]).collect();
        information(&[1.0 / 3.0; 3], &conditionals(&ns)).0
    }

    fn refine(mut ns: Vec<[f64; 3]>) -> f64 {
        let ms = directions();
        let mut p = vec![1.0 / ns.len() as f64; ns.len()];
        let mut best = 0.0f64;
        for _ in 0..400 {
            let cond = conditionals(&ns);
            let (_, d) = information(&p, &cond);
            let top = d.iter().cloned().fold(f64::MIN, f64::max);
            let mut s = 0.0;
            for (pi, di) in p.iter_mut().zip(&d) {
                *pi *= (di - top).exp();
                s += *pi;
            }
            p.iter_mut().for_each(|x| *x /= s);
            let cond = conditionals(&ns);
            let mut q = [0.0; 3];
            for (pi, row) in p.iter().zip(&cond) {
                for j in 0..3 {
                    q[j] += pi * row[j];
                }
            }
            for (n, row) in ns.iter_mut().zip(&cond) {
                let mut g = [0.0; 3];
                for j in 0..3 {
                    let w = (row[j] / q[j]).ln() / 3.0;
                    for c in 0..3 {
                        g[c] += w * ms[j][c];
                    }
                }
                for c in 0..3 {
                    n[c] += 0.5 * g[c];
                }
                let len = dot(n, n).sqrt();
                n.iter_mut().for_each(|x| *x /= len);
            }
            best = best.max(information(&p, &conditionals(&ns)).0);
        }
        best
    }

    pub fn value(starts: usize, seed: u64) -> f64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let ns: Vec<[f64; 3]> = directions().iter().map(|m| [-m[0], -m[1], -m[2]]).collect();
        let mut best = refine(ns);
        for s in 0..starts {
            let m = 2 + s % 2;
            let ns = (0..m)
                .map(|_| loop {
                    let v = [
                        rng.random_range(-1.0..1.0),
                        rng.random_range(-1.0..1.0),
                        rng.random_range(-1.0f64..1.0),
                    ];
                    let len = dot(&v, &v).sqrt();
                    if len > 1e-3 && len <= 1.0 {
                        break [v[0] / len, v[1] / len, v[2] / len];
                    }
                })
                .collect();
            best = best.max(refine(ns));
        }
        best
    }
}

fn trine_instance() -> Verdict {
    let closed = trine_oracle::anti_trine_value();
    let oracle = trine_oracle::value(10_000, 31337);
    let w = informational_power(&trine_povm(), &SolverConfig::default())
        .unwrap()
        .w_estimate;
    let err = (w - oracle).abs();
    let passed = err <= 1e-5 && (closed - 1.5f64.log2()).abs() <= 1e-12 && w >= closed - 1e-9;
    verdict(
        passed,
        format!("solver {w:.12}, oracle {oracle:.12}, anti-trine {closed:.12}, |diff| = {err:.1e}"),
    )
}

fn duality_round_trips() -> Verdict {
    let (mut dev, mut avg) = (0.0f64, 0.0f64);
    for i in 0..20u64 {
        let dim = 2 + (i % 2) as usize;
        let p = random_povm(dim, dim + (i % 3) as usize, 3000 + i).unwrap();
        let m = dim + 1;
        let sigma = ensemble_average(
            &Ensemble::from_pure(
                vec![1.0 / m as f64; m],
                &random_pure_states(dim, m, 4000 + i),
            )
            .unwrap(),
        );
        let r = duality_round_trip_check(&p, &sigma).unwrap();
        dev = dev.max(r.max_deviation);
        avg = avg.max(r.average_deviation);
    }
    verdict(
        dev <= 1e-8 && avg <= 1e-9,
        format!("20 POVMs, max element deviation {dev:.1e}, max average deviation {avg:.1e}"),
    )
}

fn gradient_check() -> Verdict {
    const STEP: f64 = 1e-6;
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let mut worst = 0.0f64;
    for pair in 0..50u64 {
        let dim = 2 + (pair % 2) as usize;
        let p = random_povm(dim, dim + (pair % 3) as usize, 5000 + pair).unwrap();
        let m = 2 + (pair % 3) as usize;
        let mut priors: Vec<f64> = (0..m).map(|_| rng.random_range(0.1..1.0)).collect();
        let total: f64 = priors.iter().sum();
        priors.iter_mut().for_each(|x| *x /= total);
        let e = PureEnsemble::new(priors, random_pure_states(dim, m, 6000 + pair)).unwrap();
        let grads = state_gradient(&e, &p).unwrap();
        let f = |states: &[PureState]| {
            let ens = Ensemble::from_pure(e.priors.clone(), states).unwrap();
            mutual_information(&ens, &p, LogBase::Nats).unwrap()
        };
        let (mut num2, mut den2) = (0.0, 0.0);
        for i in 0..m {
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
                let at = |h: f64| {
                    let mut states = e.states.clone();
                    states[i] = PureState::normalized(&psi + t.map(|z| z * h)).unwrap();
                    f(&states)
                };
                let fd = (at(STEP) - at(-STEP)) / (2.0 * STEP);
                let an = grads[i].dotc(&t).re;
                num2 += (fd - an).powi(2);
                den2 += an * an;
            }
        }
        worst = worst.max((num2 / den2).sqrt());
    }
    verdict(
        worst <= 1e-5,
        format!("50 pairs, worst relative error {worst:.1e}"),
    )
}

fn blahut_arimoto_bsc() -> Verdict {
    let h2 = |p: f64| {
        if p == 0.0 {
            0.0
        } else {
            -(p * p.log2() + (1.0 - p) * (1.0 - p).log2())
        }
    };
    let mut worst = 0.0f64;
    for p in [0.0, 0.1, 0.25, 0.5] {
        let ch = ClassicalChannel::binary_symmetric(p).unwrap();
        let c = blahut_arimoto(&ch, 1e-13, 100_000, LogBase::Bits)
            .unwrap()
            .capacity;
        worst = worst.max((c - (1.0 - h2(p))).abs());
    }
    verdict(
        worst <= 1e-9,
        format!("max |C - (1 - h2(p))| = {worst:.1e} bits"),
    )
}

fn determinism() -> Verdict {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("p.json");
    std::fs::write(
        &file,
        to_json(&PovmFile::from_povm(&random_povm(3, 4, 12).unwrap())),
    )
    .unwrap();
    let file = file.to_str().unwrap();
    let mut identical = true;
    let mut runs = 0;
    for input in [vec!["--example", "sic"], vec![file]] {
        let mut reference: Option<Vec<u8>> = None;
        for (k, jobs) in ["1", "1", "3", "8"].iter().enumerate() {
            let mut args = input.clone();
            args.extend(["--seed", "424242", "--restarts", "12", "--jobs", jobs]);
            let bytes = solve_cli(&args, &dir.path().join(format!("r{k}.json")));
            runs += 1;
            match &reference {
                None => reference = Some(bytes),
                Some(r) => identical &= *r == bytes,
            }
        }
    }
    verdict(
        identical,
        format!("{runs} runs over 2 inputs with --jobs 1, 1, 3, 8: byte-identical = {identical}"),
    )
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Verdict); 11] = [
        ("SIC value", sic_value),
        ("projective baselines", projective_baselines),
        ("trivial POVM", trivial_povm),
        ("commuting POVMs", commuting_theorem),
        ("additivity", additivity),
        ("cardinality bounds", cardinality_bounds),
        ("trine instance", trine_instance),
        ("duality round trips", duality_round_trips),
        ("gradient correctness", gradient_check),
        ("Blahut-Arimoto", blahut_arimoto_bsc),
        ("determinism", determinism),
    ];
    let mut failures = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let v = check();
        failures += usize::from(!v.passed);
        println!(
            "criterion {:>2} {:<22} {}  {} [{:.1} s]",
            i + 1,
            name,
            if v.passed { "PASS" } else { "FAIL" },
            v.detail,
            start.elapsed().as_secs_f64()
        );
    }
    println!(
        "acceptance: {} of {} criteria passed",
        criteria.len() - failures,
        criteria.len()
    );
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
