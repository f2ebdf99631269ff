//! Dense complex linear algebra for small Hermitian operators.
//!
//! Everything here works on `nalgebra` dynamic matrices of [`C64`]. The
//! dimensions in play are tiny (a few dozen at most), so plain dense
//! algorithms are used throughout.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

pub type C64 = Complex64;
pub type CMatrix = DMatrix<C64>;
pub type CVector = DVector<C64>;

/// Eigenvalues below `-PSD_TOL` are treated as genuine negativity.
pub const PSD_TOL: f64 = 1e-10;

/// Default relative cutoff for the support of a PSD operator.
pub const DEFAULT_RANK_TOL: f64 = 1e-12;

const EIGH_MAX_ITER: usize = 10_000;
const COMMON_BASIS_RESIDUAL: f64 = 1e-8;
const COMMON_BASIS_SEED: u64 = 0x5eed_ba5e;
const COMMON_BASIS_ATTEMPTS: usize = 5;

/// A square complex matrix equal to its conjugate transpose.
///
/// Construction symmetrizes the input as `(m + m†)/2`, so the contract holds
/// exactly after construction. Use [`hermiticity_residual`] beforehand if the
/// raw input needs to be checked.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianMatrix(CMatrix);

impl HermitianMatrix {
    pub fn new(m: CMatrix) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(Error::NotSquare(m.nrows(), m.ncols()));
        }
        if m.nrows() == 0 {
            return Err(Error::NotSquare(0, 0));
        }
        if m.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite);
        }
        let sym = (&m + m.adjoint()).scale(0.5);
        Ok(Self(sym))
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Self {
        let n = diag.len();
        Self(CMatrix::from_fn(n, n, |r, c| {
            if r == c {
                C64::new(diag[r], 0.0)
            } else {
                C64::new(0.0, 0.0)
            }
        }))
    }

    /// Builds a matrix from row-major real entries.
    pub fn from_real_rows(rows: &[&[f64]]) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::NotSquare(n, rows.first().map_or(0, |r| r.len())));
        }
        Self::new(CMatrix::from_fn(n, n, |r, c| C64::new(rows[r][c], 0.0)))
    }

    pub fn identity(dim: usize) -> Self {
        Self(CMatrix::identity(dim, dim))
    }

    pub fn zeros(dim: usize) -> Self {
        Self(CMatrix::zeros(dim, dim))
    }

    /// The rank-one projector `|v⟩⟨v|` scaled by `weight`.
    pub fn outer(v: &CVector, weight: f64) -> Self {
        let m = v * v.adjoint();
        Self(m.scale(weight))
    }

    pub fn pauli_x() -> Self {
        Self::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]]).unwrap()
    }

    pub fn pauli_y() -> Self {
        let i = C64::new(0.0, 1.0);
        let z = C64::new(0.0, 0.0);
        Self(CMatrix::from_row_slice(2, 2, &[z, -i, i, z]))
    }

    pub fn pauli_z() -> Self {
        Self::from_real_diagonal(&[1.0, -1.0])
    }

    /// `½(w·I + n·σ)` for a Bloch vector `n`.
    pub fn from_bloch(weight: f64, n: [f64; 3]) -> Self {
        let i = C64::new(0.0, 1.0);
        let m = CMatrix::from_row_slice(
            2,
            2,
            &[
                C64::new(weight + n[2], 0.0),
                C64::new(n[0], 0.0) - i * n[1],
                C64::new(n[0], 0.0) + i * n[1],
                C64::new(weight - n[2], 0.0),
            ],
        );
        Self(m.scale(0.5))
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn as_matrix(&self) -> &CMatrix {
        &self.0
    }

    pub fn into_matrix(self) -> CMatrix {
        self.0
    }

    pub fn trace(&self) -> f64 {
        self.0.diagonal().iter().map(|z| z.re).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.0.norm()
    }

    /// `Re Tr[self · other]`, which is exact for a pair of Hermitian matrices.
    pub fn trace_product(&self, other: &Self) -> f64 {
        let n = self.dim();
        let mut acc = 0.0;
        for r in 0..n {
            for c in 0..n {
                acc += (self.0[(r, c)] * other.0[(c, r)]).re;
            }
        }
        acc
    }

    /// `⟨v|self|v⟩`.
    pub fn expectation(&self, v: &CVector) -> f64 {
        let mv = &self.0 * v;
        v.dotc(&mv).re
    }

    pub fn add(&self, other: &Self) -> Self {
        Self(&self.0 + &other.0)
    }

    pub fn sub(&self, other: &Self) -> Self {
        Self(&self.0 - &other.0)
    }

    pub fn scale(&self, s: f64) -> Self {
        Self(self.0.scale(s))
    }

    /// `a · self · a` for Hermitian `a`; the result is Hermitian.
    pub fn sandwich(&self, a: &Self) -> Self {
        let m = &a.0 * &self.0 * &a.0;
        Self((&m + m.adjoint()).scale(0.5))
    }

    /// `u · self · u†` for an arbitrary square `u`.
    pub fn conjugate_by(&self, u: &CMatrix) -> Self {
        let m = u * &self.0 * u.adjoint();
        Self((&m + m.adjoint()).scale(0.5))
    }

    /// Largest absolute imaginary part among the entries.
    pub fn max_imag(&self) -> f64 {
        self.0.iter().map(|z| z.im.abs()).fold(0.0, f64::max)
    }
}

/// `‖m − m†‖_F / 2` for a raw (possibly non-Hermitian) square matrix.
pub fn hermiticity_residual(m: &CMatrix) -> f64 {
    (m - m.adjoint()).norm() * 0.5
}

/// Eigendecomposition with eigenvalues sorted ascending.
#[derive(Debug, Clone)]
pub struct Eigh {
    pub values: Vec<f64>,
    /// Orthonormal eigenvectors stored as columns, in the order of `values`.
    pub vectors: CMatrix,
}

impl Eigh {
    pub fn reconstruct(&self) -> CMatrix {
        let d = CMatrix::from_diagonal(&DVector::from_iterator(
            self.values.len(),
            self.values.iter().map(|&x| C64::new(x, 0.0)),
        ));
        &self.vectors * d * self.vectors.adjoint()
    }

    /// `V f(Λ) V†`.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> HermitianMatrix {
        let n = self.values.len();
        let mut out = CMatrix::zeros(n, n);
        for (k, &lambda) in self.values.iter().enumerate() {
            let w = f(lambda);
            if w == 0.0 {
                continue;
            }
            let v = self.vectors.column(k);
            out += (v * v.adjoint()).scale(w);
        }
        HermitianMatrix((&out + out.adjoint()).scale(0.5))
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|x| x.abs()).fold(0.0, f64::max)
    }
}

pub fn eigh(m: &HermitianMatrix) -> Result<Eigh> {
    let dim = m.dim();
    let eig = SymmetricEigen::try_new(m.0.clone(), f64::EPSILON, EIGH_MAX_ITER).ok_or(
        Error::EigenNoConvergence {
            dim,
            norm: m.frobenius_norm(),
        },
    )?;
    let mut order: Vec<usize> = (0..dim).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let vectors = CMatrix::from_fn(dim, dim, |r, c| eig.eigenvectors[(r, order[c])]);
    Ok(Eigh { values, vectors })
}

pub fn min_eigenvalue(m: &HermitianMatrix) -> Result<f64> {
    Ok(eigh(m)?.values[0])
}

/// Principal square root of a PSD matrix; small negative eigenvalues are clamped.
pub fn matrix_sqrt(m: &HermitianMatrix) -> Result<HermitianMatrix> {
    let e = eigh(m)?;
    if e.values[0] < -PSD_TOL {
        return Err(Error::NotPositiveSemidefinite(e.values[0]));
    }
    Ok(e.map(|x| x.max(0.0).sqrt()))
}

/// Inverse square root restricted to the support: eigenvalues above
/// `rank_tol · λ_max` map to `λ^{-1/2}`, the rest to zero.
pub fn pinv_sqrt(m: &HermitianMatrix, rank_tol: f64) -> Result<HermitianMatrix> {
    let e = eigh(m)?;
    if e.values[0] < -PSD_TOL {
        return Err(Error::NotPositiveSemidefinite(e.values[0]));
    }
    let lmax = *e.values.last().unwrap();
    if lmax <= 0.0 {
        return Err(Error::ZeroOperator);
    }
    let cut = rank_tol * lmax;
    Ok(e.map(|x| if x > cut { 1.0 / x.sqrt() } else { 0.0 }))
}

/// Orthogonal projector onto the eigenvectors with eigenvalue above `rank_tol · λ_max`.
pub fn support_projector(m: &HermitianMatrix, rank_tol: f64) -> Result<(HermitianMatrix, usize)> {
    let e = eigh(m)?;
    let lmax = e.max_abs();
    if lmax <= 0.0 {
        return Err(Error::ZeroOperator);
    }
    let cut = rank_tol * lmax;
    let rank = e.values.iter().filter(|&&x| x > cut).count();
    Ok((e.map(|x| if x > cut { 1.0 } else { 0.0 }), rank))
}

/// Kronecker product with composite index `a_index · dim(b) + b_index`.
pub fn tensor(a: &HermitianMatrix, b: &HermitianMatrix) -> HermitianMatrix {
    HermitianMatrix(a.0.kronecker(&b.0))
}

pub fn commutator_norm(a: &HermitianMatrix, b: &HermitianMatrix) -> Result<f64> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch(a.dim(), b.dim()));
    }
    Ok((&a.0 * &b.0 - &b.0 * &a.0).norm())
}

fn max_offdiag_in_basis(ms: &[HermitianMatrix], basis: &CMatrix) -> f64 {
    let mut worst: f64 = 0.0;
    for m in ms {
        let t = basis.adjoint() * &m.0 * basis;
        for r in 0..t.nrows() {
            for c in 0..t.ncols() {
                if r != c {
                    worst = worst.max(t[(r, c)].norm());
                }
            }
        }
    }
    worst
}

/// Orthonormal basis (as columns) that diagonalizes every matrix in `ms`.
///
/// A random real combination of the inputs is diagonalized first; when the
/// draw happens to be degenerate on a subspace where the inputs differ, the
/// eigenspaces are refined one matrix at a time.
pub fn simultaneous_eigenbasis(ms: &[HermitianMatrix], tol: f64) -> Result<CMatrix> {
    let Some(first) = ms.first() else {
        return Err(Error::Empty("no matrices to diagonalize"));
    };
    let dim = first.dim();
    for m in ms {
        if m.dim() != dim {
            return Err(Error::DimensionMismatch(dim, m.dim()));
        }
    }
    for a in 0..ms.len() {
        for b in (a + 1)..ms.len() {
            let norm = commutator_norm(&ms[a], &ms[b])?;
            if norm > tol {
                return Err(Error::NotCommuting { a, b, norm });
            }
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(COMMON_BASIS_SEED);
    let mut best = f64::INFINITY;
    for _ in 0..COMMON_BASIS_ATTEMPTS {
        let mut combo = CMatrix::zeros(dim, dim);
        for m in ms {
            let c: f64 = rng.random_range(-1.0..1.0);
            combo += m.0.scale(c);
        }
        let e = eigh(&HermitianMatrix::new(combo)?)?;
        let residual = max_offdiag_in_basis(ms, &e.vectors);
        if residual <= COMMON_BASIS_RESIDUAL {
            return Ok(e.vectors);
        }
        best = best.min(residual);
    }

    let basis = refine_eigenspaces(ms, dim)?;
    let residual = max_offdiag_in_basis(ms, &basis);
    if residual <= COMMON_BASIS_RESIDUAL {
        Ok(basis)
    } else {
        Err(Error::NoCommonEigenbasis(best.min(residual)))
    }
}

fn refine_eigenspaces(ms: &[HermitianMatrix], dim: usize) -> Result<CMatrix> {
    let mut basis = CMatrix::identity(dim, dim);
    // Column index ranges of the current (jointly degenerate) eigenspaces.
    let mut blocks: Vec<(usize, usize)> = vec![(0, dim)];
    for m in ms {
        let scale = m.frobenius_norm().max(1.0);
        let mut next_blocks = Vec::new();
        for &(start, end) in &blocks {
            let sub = basis.columns(start, end - start).into_owned();
            let restricted = HermitianMatrix::new(sub.adjoint() * &m.0 * &sub)?;
            let e = eigh(&restricted)?;
            let rotated = &sub * &e.vectors;
            basis.columns_mut(start, end - start).copy_from(&rotated);
            let mut s = start;
            for k in 1..e.values.len() {
                if e.values[k] - e.values[k - 1] > 1e-9 * scale {
                    next_blocks.push((s, start + k));
                    s = start + k;
                }
            }
            next_blocks.push((s, end));
        }
        blocks = next_blocks;
    }
    Ok(basis)
}

/// `‖V†V − I‖_F` for a matrix of column vectors.
pub fn orthonormality_residual(v: &CMatrix) -> f64 {
    (v.adjoint() * v - CMatrix::identity(v.ncols(), v.ncols())).norm()
}
