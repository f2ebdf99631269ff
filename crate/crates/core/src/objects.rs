//! Quantum states, ensembles, and measurements.

use std::f64::consts::{FRAC_PI_3, SQRT_2};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution as _, StandardNormal};

use crate::error::{Error, Result};
use crate::linalg::{
    self, hermiticity_residual, orthonormality_residual, CMatrix, CVector, HermitianMatrix, C64,
    PSD_TOL,
};

/// Tolerance used when the library builds objects itself.
pub const CONSTRUCTION_TOL: f64 = 1e-9;
/// Tolerance used for user-supplied data read from files.
pub const INGEST_TOL: f64 = 1e-8;

const TRACE_TOL: f64 = 1e-10;
const PRIOR_SUM_TOL: f64 = 1e-12;
const RANDOM_POVM_ATTEMPTS: usize = 3;

/// A unit vector in `C^D`.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    amplitudes: CVector,
}

impl PureState {
    pub fn new(amplitudes: CVector) -> Result<Self> {
        let norm = amplitudes.norm();
        if amplitudes.is_empty() || (norm - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidState(format!("amplitude norm {norm}")));
        }
        Ok(Self { amplitudes })
    }

    /// Normalizes an arbitrary non-zero vector.
    pub fn normalized(v: CVector) -> Result<Self> {
        let norm = v.norm();
        if !(norm > 0.0 && norm.is_finite()) {
            return Err(Error::InvalidState("cannot normalize a zero vector".into()));
        }
        Ok(Self {
            amplitudes: v.unscale(norm),
        })
    }

    pub fn basis(dim: usize, index: usize) -> Self {
        let mut v = CVector::zeros(dim);
        v[index] = C64::new(1.0, 0.0);
        Self { amplitudes: v }
    }

    /// Qubit state `cos(θ/2)|0⟩ + e^{iφ} sin(θ/2)|1⟩` with Bloch vector `n`.
    pub fn from_bloch(n: [f64; 3]) -> Self {
        let theta = n[2].clamp(-1.0, 1.0).acos();
        let phi = n[1].atan2(n[0]);
        let v = CVector::from_vec(vec![
            C64::new((theta / 2.0).cos(), 0.0),
            C64::from_polar((theta / 2.0).sin(), phi),
        ]);
        Self { amplitudes: v }
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &CVector {
        &self.amplitudes
    }

    pub fn overlap(&self, other: &Self) -> C64 {
        self.amplitudes.dotc(&other.amplitudes)
    }

    pub fn projector(&self) -> HermitianMatrix {
        HermitianMatrix::outer(&self.amplitudes, 1.0)
    }

    pub fn density(&self) -> DensityOperator {
        DensityOperator(self.projector())
    }
}

/// A positive semidefinite operator with unit trace.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityOperator(HermitianMatrix);

impl DensityOperator {
    pub fn new(m: HermitianMatrix) -> Result<Self> {
        Self::with_tolerance(m, TRACE_TOL)
    }

    pub fn with_tolerance(m: HermitianMatrix, tol: f64) -> Result<Self> {
        let tr = m.trace();
        if (tr - 1.0).abs() > tol {
            return Err(Error::InvalidState(format!("trace {tr}")));
        }
        let min = linalg::min_eigenvalue(&m)?;
        if min < -PSD_TOL.max(tol) {
            return Err(Error::InvalidState(format!("min eigenvalue {min:e}")));
        }
        Ok(Self(m))
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        Self(HermitianMatrix::identity(dim).scale(1.0 / dim as f64))
    }

    pub fn dim(&self) -> usize {
        self.0.dim()
    }

    pub fn matrix(&self) -> &HermitianMatrix {
        &self.0
    }

    /// `Tr[ρ²]`.
    pub fn purity(&self) -> f64 {
        self.0.trace_product(&self.0)
    }
}

/// Per-check residuals of a candidate measurement.
#[derive(Debug, Clone, PartialEq)]
pub struct PovmValidation {
    pub passed: bool,
    pub tol: f64,
    pub dim: usize,
    /// `‖Π_j − Π_j†‖_F / 2` per element.
    pub hermiticity: Vec<f64>,
    /// Smallest eigenvalue per element (of the Hermitian part).
    pub min_eigenvalues: Vec<f64>,
    /// `‖Σ_j Π_j − I‖_F`.
    pub completeness: f64,
    pub failures: Vec<String>,
}

/// Checks a raw list of matrices against the POVM axioms. Never fails; the
/// report carries every violation.
pub fn validate_povm(elements: &[CMatrix], tol: f64) -> PovmValidation {
    let mut failures = Vec::new();
    let dim = elements.first().map_or(0, |m| m.nrows());
    let mut report = PovmValidation {
        passed: false,
        tol,
        dim,
        hermiticity: Vec::with_capacity(elements.len()),
        min_eigenvalues: Vec::with_capacity(elements.len()),
        completeness: f64::INFINITY,
        failures: Vec::new(),
    };
    if elements.is_empty() || dim == 0 {
        report.failures.push("no elements".into());
        return report;
    }
    let mut sum = CMatrix::zeros(dim, dim);
    let mut shapes_ok = true;
    for (j, m) in elements.iter().enumerate() {
        if m.nrows() != dim || m.ncols() != dim {
            failures.push(format!(
                "element {j}: shape {}x{} (expected {dim}x{dim})",
                m.nrows(),
                m.ncols()
            ));
            report.hermiticity.push(f64::NAN);
            report.min_eigenvalues.push(f64::NAN);
            shapes_ok = false;
            continue;
        }
        let herm = hermiticity_residual(m);
        report.hermiticity.push(herm);
        if !(herm <= tol) {
            failures.push(format!("element {j}: hermiticity residual {herm:e}"));
        }
        let min = HermitianMatrix::new(m.clone())
            .and_then(|h| linalg::min_eigenvalue(&h))
            .unwrap_or(f64::NAN);
        report.min_eigenvalues.push(min);
        if !(min >= -tol) {
            failures.push(format!("element {j}: negative eigenvalue {min:e}"));
        }
        sum += m;
    }
    if shapes_ok {
        let completeness = (sum - CMatrix::identity(dim, dim)).norm();
        report.completeness = completeness;
        if !(completeness <= tol) {
            failures.push(format!("completeness residual {completeness:e}"));
        }
    }
    report.passed = failures.is_empty();
    report.failures = failures;
    report
}

/// A measurement: PSD operators `{Π_j}` summing to the identity.
#[derive(Debug, Clone, PartialEq)]
pub struct Povm {
    elements: Vec<HermitianMatrix>,
}

impl Povm {
    pub fn new(elements: Vec<HermitianMatrix>) -> Result<Self> {
        Self::with_tolerance(elements, CONSTRUCTION_TOL)
    }

    pub fn with_tolerance(elements: Vec<HermitianMatrix>, tol: f64) -> Result<Self> {
        let raw: Vec<CMatrix> = elements.iter().map(|e| e.as_matrix().clone()).collect();
        let report = validate_povm(&raw, tol);
        if !report.passed {
            return Err(Error::InvalidPovm(report.failures.join("; ")));
        }
        Ok(Self { elements })
    }

    /// Validates raw matrices and symmetrizes them.
    pub fn from_raw(elements: Vec<CMatrix>, tol: f64) -> Result<Self> {
        let report = validate_povm(&elements, tol);
        if !report.passed {
            return Err(Error::InvalidPovm(report.failures.join("; ")));
        }
        let elements = elements
            .into_iter()
            .map(HermitianMatrix::new)
            .collect::<Result<_>>()?;
        Ok(Self { elements })
    }

    pub fn trivial(dim: usize) -> Self {
        Self {
            elements: vec![HermitianMatrix::identity(dim)],
        }
    }

    pub fn dim(&self) -> usize {
        self.elements[0].dim()
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn elements(&self) -> &[HermitianMatrix] {
        &self.elements
    }

    pub fn validate(&self, tol: f64) -> PovmValidation {
        let raw: Vec<CMatrix> = self
            .elements
            .iter()
            .map(|e| e.as_matrix().clone())
            .collect();
        validate_povm(&raw, tol)
    }

    /// `{Π_j ⊗ Π'_k}` with outcome index `j · N' + k`.
    pub fn tensor(&self, other: &Povm) -> Povm {
        let mut elements = Vec::with_capacity(self.len() * other.len());
        for a in &self.elements {
            for b in &other.elements {
                elements.push(linalg::tensor(a, b));
            }
        }
        Povm { elements }
    }

    /// `{U Π_j U†}` for a unitary `u`.
    pub fn conjugate_by(&self, u: &CMatrix) -> Result<Povm> {
        Povm::new(self.elements.iter().map(|e| e.conjugate_by(u)).collect())
    }

    /// True when every entry of every element has imaginary part ≤ `tol`.
    pub fn is_real(&self, tol: f64) -> bool {
        self.elements.iter().all(|e| e.max_imag() <= tol)
    }

    pub fn max_commutator_norm(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for a in 0..self.len() {
            for b in (a + 1)..self.len() {
                worst = worst
                    .max(linalg::commutator_norm(&self.elements[a], &self.elements[b]).unwrap());
            }
        }
        worst
    }
}

/// Prior probabilities paired with density operators.
#[derive(Debug, Clone, PartialEq)]
pub struct Ensemble {
    priors: Vec<f64>,
    states: Vec<DensityOperator>,
}

impl Ensemble {
    pub fn new(priors: Vec<f64>, states: Vec<DensityOperator>) -> Result<Self> {
        Self::with_tolerance(priors, states, PRIOR_SUM_TOL)
    }

    /// Accepts priors summing to one within `tol` and renormalizes them.
    pub fn with_tolerance(
        mut priors: Vec<f64>,
        states: Vec<DensityOperator>,
        tol: f64,
    ) -> Result<Self> {
        if priors.is_empty() {
            return Err(Error::InvalidEnsemble("no members".into()));
        }
        if priors.len() != states.len() {
            return Err(Error::InvalidEnsemble(format!(
                "{} priors for {} states",
                priors.len(),
                states.len()
            )));
        }
        let dim = states[0].dim();
        if let Some(s) = states.iter().find(|s| s.dim() != dim) {
            return Err(Error::DimensionMismatch(dim, s.dim()));
        }
        if let Some(p) = priors.iter().find(|p| !(**p >= 0.0) || !p.is_finite()) {
            return Err(Error::InvalidEnsemble(format!("prior {p}")));
        }
        let total: f64 = priors.iter().sum();
        if (total - 1.0).abs() > tol {
            return Err(Error::InvalidEnsemble(format!("priors sum to {total}")));
        }
        for p in &mut priors {
            *p /= total;
        }
        Ok(Self { priors, states })
    }

    pub fn from_pure(priors: Vec<f64>, states: &[PureState]) -> Result<Self> {
        Self::new(priors, states.iter().map(PureState::density).collect())
    }

    pub fn uniform(states: Vec<DensityOperator>) -> Result<Self> {
        let m = states.len();
        Self::new(vec![1.0 / m as f64; m], states)
    }

    pub fn dim(&self) -> usize {
        self.states[0].dim()
    }

    pub fn len(&self) -> usize {
        self.priors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.priors.is_empty()
    }

    pub fn priors(&self) -> &[f64] {
        &self.priors
    }

    pub fn states(&self) -> &[DensityOperator] {
        &self.states
    }

    pub fn members(&self) -> impl Iterator<Item = (f64, &DensityOperator)> {
        self.priors.iter().copied().zip(self.states.iter())
    }
}

/// `Σ_i p_i ρ_i`.
pub fn ensemble_average(e: &Ensemble) -> DensityOperator {
    let mut acc = HermitianMatrix::zeros(e.dim());
    for (p, rho) in e.members() {
        acc = acc.add(&rho.matrix().scale(p));
    }
    DensityOperator(acc)
}

/// Bloch vectors of the regular tetrahedron with the first vertex on +z.
pub fn tetrahedral_bloch_vectors() -> [[f64; 3]; 4] {
    let a = 2.0 * SQRT_2 / 3.0;
    let b = SQRT_2 / 3.0;
    let c = (2.0f64 / 3.0).sqrt();
    [
        [0.0, 0.0, 1.0],
        [a, 0.0, -1.0 / 3.0],
        [-b, c, -1.0 / 3.0],
        [-b, -c, -1.0 / 3.0],
    ]
}

/// The qubit SIC measurement `{½|π_j⟩⟨π_j|}` along the tetrahedron.
pub fn tetrahedral_sic_povm() -> Povm {
    let elements = tetrahedral_bloch_vectors()
        .iter()
        .map(|&n| PureState::from_bloch(n).projector().scale(0.5))
        .collect();
    Povm { elements }
}

/// The pure states `|π_j⟩` behind [`tetrahedral_sic_povm`].
pub fn tetrahedral_states() -> Vec<PureState> {
    tetrahedral_bloch_vectors()
        .iter()
        .map(|&n| PureState::from_bloch(n))
        .collect()
}

/// States with Bloch vectors `−n_j`, each orthogonal to the matching SIC vector.
pub fn anti_tetrahedral_states() -> Vec<PureState> {
    tetrahedral_bloch_vectors()
        .iter()
        .map(|n| PureState::from_bloch([-n[0], -n[1], -n[2]]))
        .collect()
}

/// Uniform ensemble over [`anti_tetrahedral_states`].
pub fn anti_tetrahedral_ensemble() -> Ensemble {
    let states = anti_tetrahedral_states();
    Ensemble::from_pure(vec![0.25; 4], &states).unwrap()
}

/// Rank-one projectors onto the columns of a unitary.
pub fn projective_povm(basis: &CMatrix) -> Result<Povm> {
    if basis.nrows() != basis.ncols() {
        return Err(Error::NotSquare(basis.nrows(), basis.ncols()));
    }
    let residual = orthonormality_residual(basis);
    if residual > 1e-10 {
        return Err(Error::NotOrthonormal(residual));
    }
    let elements = basis
        .column_iter()
        .map(|c| HermitianMatrix::outer(&c.into_owned(), 1.0))
        .collect();
    Ok(Povm { elements })
}

pub fn standard_projective_povm(dim: usize) -> Povm {
    projective_povm(&CMatrix::identity(dim, dim)).unwrap()
}

/// Bloch vectors at 120° in the x–z plane.
pub fn trine_bloch_vectors() -> [[f64; 3]; 3] {
    let mut out = [[0.0; 3]; 3];
    for (k, n) in out.iter_mut().enumerate() {
        let angle = 2.0 * FRAC_PI_3 * k as f64;
        *n = [angle.sin(), 0.0, angle.cos()];
    }
    out
}

/// The real qubit trine measurement `{⅔|φ_k⟩⟨φ_k|}`.
pub fn trine_povm() -> Povm {
    let elements = trine_bloch_vectors()
        .iter()
        .map(|&n| HermitianMatrix::from_bloch(2.0 / 3.0, [2.0 / 3.0 * n[0], 0.0, 2.0 / 3.0 * n[2]]))
        .collect();
    Povm { elements }
}

/// Uniform ensemble on the states antipodal to the trine directions.
pub fn anti_trine_ensemble() -> Ensemble {
    let states: Vec<PureState> = trine_bloch_vectors()
        .iter()
        .map(|n| PureState::from_bloch([-n[0], -n[1], -n[2]]))
        .collect();
    Ensemble::from_pure(vec![1.0 / 3.0; 3], &states).unwrap()
}

fn gaussian_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize, real: bool) -> CMatrix {
    CMatrix::from_fn(rows, cols, |_, _| {
        let re: f64 = StandardNormal.sample(rng);
        let im: f64 = if real {
            0.0
        } else {
            StandardNormal.sample(rng)
        };
        C64::new(re, im)
    })
}

fn random_povm_impl(dim: usize, outcomes: usize, seed: u64, real: bool) -> Result<Povm> {
    if dim == 0 || outcomes == 0 {
        return Err(Error::InvalidPovm(format!(
            "random POVM needs dim ≥ 1 and outcomes ≥ 1 (got {dim}, {outcomes})"
        )));
    }
    if outcomes == 1 {
        return Ok(Povm::trivial(dim));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..RANDOM_POVM_ATTEMPTS {
        let grams: Vec<HermitianMatrix> = (0..outcomes)
            .map(|_| {
                let g = gaussian_matrix(&mut rng, dim, dim, real);
                HermitianMatrix::new(&g * g.adjoint())
            })
            .collect::<Result<_>>()?;
        let total = grams
            .iter()
            .fold(HermitianMatrix::zeros(dim), |acc, g| acc.add(g));
        let e = linalg::eigh(&total)?;
        if e.values[0] <= linalg::DEFAULT_RANK_TOL * e.max_abs() {
            continue;
        }
        let inv_sqrt = e.map(|x| 1.0 / x.sqrt());
        let elements = grams.iter().map(|g| g.sandwich(&inv_sqrt)).collect();
        return Povm::new(elements);
    }
    Err(Error::SingularDraw(RANDOM_POVM_ATTEMPTS))
}

/// Seeded random POVM `T^{-1/2} G_j G_j† T^{-1/2}` with `T = Σ G_j G_j†`.
pub fn random_povm(dim: usize, outcomes: usize, seed: u64) -> Result<Povm> {
    random_povm_impl(dim, outcomes, seed, false)
}

/// Same construction with real Gaussian factors, so every element is real symmetric.
pub fn random_real_povm(dim: usize, outcomes: usize, seed: u64) -> Result<Povm> {
    random_povm_impl(dim, outcomes, seed, true)
}

pub fn random_pure_states(dim: usize, count: usize, seed: u64) -> Vec<PureState> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    random_pure_states_from(&mut rng, dim, count)
}

pub(crate) fn random_pure_states_from(
    rng: &mut ChaCha8Rng,
    dim: usize,
    count: usize,
) -> Vec<PureState> {
    (0..count)
        .map(|_| loop {
            let v = gaussian_matrix(rng, dim, 1, false).column(0).into_owned();
            if let Ok(s) = PureState::normalized(v) {
                break s;
            }
        })
        .collect()
}

/// Seeded unitary from Gram–Schmidt on a complex Gaussian matrix.
pub fn random_unitary(dim: usize, seed: u64) -> CMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    loop {
        let g = gaussian_matrix(&mut rng, dim, dim, false);
        let mut q = CMatrix::zeros(dim, dim);
        let mut ok = true;
        for c in 0..dim {
            let mut v = g.column(c).into_owned();
            for k in 0..c {
                let qk = q.column(k).into_owned();
                let proj = qk.dotc(&v);
                v -= qk * proj;
            }
            let n = v.norm();
            if n < 1e-8 {
                ok = false;
                break;
            }
            q.set_column(c, &v.unscale(n));
        }
        if ok {
            return q;
        }
    }
}
