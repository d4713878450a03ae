//! Dense complex linear algebra helpers and seeded random objects.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

/// Eigenvalues below this are treated as zero before taking square roots.
pub const EIGEN_CLAMP: f64 = 1e-12;

/// Singular values below this count as zero in kernel computations.
pub const KERNEL_TOL: f64 = 1e-9;

pub(crate) fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

pub fn hermitian_part(m: &CMatrix) -> CMatrix {
    (m + m.adjoint()).scale(0.5)
}

/// Largest entrywise modulus of `a - b`.
pub fn max_abs_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

fn spectral_map(m: &CMatrix, f: impl Fn(f64) -> f64) -> CMatrix {
    let eig = hermitian_part(m).symmetric_eigen();
    let v = &eig.eigenvectors;
    let d = CMatrix::from_diagonal(&eig.eigenvalues.map(|l| c(f(l))));
    v * d * v.adjoint()
}

/// Square root of a positive semidefinite matrix, clamping eigenvalues below
/// [`EIGEN_CLAMP`] to zero.
pub fn psd_sqrt(m: &CMatrix) -> CMatrix {
    spectral_map(m, |l| if l < EIGEN_CLAMP { 0.0 } else { l.sqrt() })
}

/// `m^{-1/2}` of a positive definite matrix.
pub fn psd_inv_sqrt(m: &CMatrix) -> Result<CMatrix> {
    let eig = hermitian_part(m).symmetric_eigen();
    if eig.eigenvalues.iter().any(|&l| l < EIGEN_CLAMP) {
        return Err(Error::Validation("matrix is singular, no inverse square root".into()));
    }
    Ok(spectral_map(m, |l| 1.0 / l.sqrt()))
}

pub fn min_eigenvalue(m: &CMatrix) -> f64 {
    hermitian_part(m)
        .symmetric_eigenvalues()
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min)
}

/// `[Tr √(√a b √a)]²`, computed as the squared nuclear norm of `√a √b`.
pub(crate) fn fidelity_psd(a: &CMatrix, b: &CMatrix) -> f64 {
    let x = psd_sqrt(a) * psd_sqrt(b);
    let nuclear: f64 = x.singular_values().iter().sum();
    (nuclear * nuclear).clamp(0.0, 1.0)
}

/// Orthonormal basis of the null space of `a`, singular-value threshold
/// [`KERNEL_TOL`].
pub fn null_space(a: &CMatrix) -> Vec<CVector> {
    let n = a.ncols();
    // pad so the SVD returns a full set of right singular vectors
    let padded;
    let a = if a.nrows() < n {
        padded = a.clone().resize_vertically(n, Complex64::ZERO);
        &padded
    } else {
        a
    };
    let svd = a.clone().svd(false, true);
    let v_t = svd.v_t.expect("requested right singular vectors");
    svd.singular_values
        .iter()
        .enumerate()
        .filter(|(_, &s)| s < KERNEL_TOL)
        .map(|(k, _)| v_t.row(k).adjoint())
        .collect()
}

/// `|i⟩` in dimension `d`.
pub fn basis_vector(d: usize, i: usize) -> CVector {
    let mut v = CVector::zeros(d);
    v[i] = c(1.0);
    v
}

/// Plain-array form `{re, im}` of a complex matrix.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixJson {
    pub re: Vec<Vec<f64>>,
    pub im: Vec<Vec<f64>>,
}

impl MatrixJson {
    pub fn from_matrix(m: &CMatrix) -> Self {
        let rows = |f: fn(&Complex64) -> f64| {
            (0..m.nrows())
                .map(|i| (0..m.ncols()).map(|j| f(&m[(i, j)])).collect())
                .collect()
        };
        Self {
            re: rows(|z| z.re),
            im: rows(|z| z.im),
        }
    }

    /// Parses into a matrix; `what` names the value in diagnostics.
    pub fn to_matrix(&self, what: &str) -> Result<CMatrix> {
        let nrows = self.re.len();
        let ncols = self.re.first().map_or(0, Vec::len);
        if nrows == 0 || ncols == 0 {
            return Err(Error::Parse(format!("{what}.re: matrix is empty")));
        }
        if let Some(i) = self.re.iter().position(|r| r.len() != ncols) {
            return Err(Error::Parse(format!(
                "{what}.re: row {i} has {} entries, expected {ncols}",
                self.re[i].len()
            )));
        }
        if self.im.len() != nrows {
            return Err(Error::Parse(format!(
                "{what}.im: {} rows, expected {nrows}",
                self.im.len()
            )));
        }
        if let Some(i) = self.im.iter().position(|r| r.len() != ncols) {
            return Err(Error::Parse(format!(
                "{what}.im: row {i} has {} entries, expected {ncols}",
                self.im[i].len()
            )));
        }
        let m = CMatrix::from_fn(nrows, ncols, |i, j| Complex64::new(self.re[i][j], self.im[i][j]));
        if m.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::Parse(format!("{what}: non-finite entry")));
        }
        Ok(m)
    }
}

pub fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

fn ginibre<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> CMatrix {
    let mut m = CMatrix::zeros(rows, cols);
    for z in m.iter_mut() {
        *z = complex_gaussian(rng);
    }
    m
}

/// Unit vector from a normalized complex Gaussian (unitarily invariant).
pub fn random_pure_state<R: Rng + ?Sized>(rng: &mut R, d: usize) -> CVector {
    loop {
        let v = CVector::from_fn(d, |_, _| complex_gaussian(rng));
        let norm = v.norm();
        if norm > 1e-12 {
            return v.unscale(norm);
        }
    }
}

/// Haar-distributed unitary via QR with phase correction.
pub fn random_unitary<R: Rng + ?Sized>(rng: &mut R, d: usize) -> CMatrix {
    let qr = ginibre(rng, d, d).qr();
    let r = qr.r();
    let mut q = qr.q();
    for j in 0..d {
        let rjj = r[(j, j)];
        let phase = if rjj.norm() > 0.0 { rjj / rjj.norm() } else { c(1.0) };
        for i in 0..d {
            q[(i, j)] *= phase;
        }
    }
    q
}

/// Random density matrix `G G† / Tr(G G†)` with `G` a `d × rank` Ginibre matrix.
pub fn random_density_matrix<R: Rng + ?Sized>(rng: &mut R, d: usize, rank: usize) -> CMatrix {
    let g = ginibre(rng, d, rank.max(1));
    let m = &g * g.adjoint();
    let tr = m.trace().re;
    hermitian_part(&m.unscale(tr))
}

/// Kraus operators `G_i S^{-1/2}` with `S = Σ G_i† G_i`, for Ginibre `G_i`.
///
/// At least `⌈in_dim / out_dim⌉` operators are drawn so that `S` is invertible.
pub fn random_kraus<R: Rng + ?Sized>(
    rng: &mut R,
    in_dim: usize,
    out_dim: usize,
    count: usize,
) -> Vec<CMatrix> {
    loop {
        let count = count.max(in_dim.div_ceil(out_dim.max(1))).max(1);
        let gs: Vec<CMatrix> = (0..count).map(|_| ginibre(rng, out_dim, in_dim)).collect();
        let s = gs
            .iter()
            .fold(CMatrix::zeros(in_dim, in_dim), |acc, g| acc + g.adjoint() * g);
        if let Ok(inv) = psd_inv_sqrt(&s) {
            return gs.into_iter().map(|g| g * &inv).collect();
        }
    }
}
