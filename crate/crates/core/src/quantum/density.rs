use num_complex::Complex64;

use super::linalg::{basis_vector, c, fidelity_psd, hermitian_part, max_abs_diff, min_eigenvalue, CMatrix, CVector};
use crate::error::{Error, Result};

/// Tolerance on Hermiticity, positivity and trace of a state.
pub const STATE_TOL: f64 = 1e-9;

/// Positive semidefinite, unit-trace operator on `ℂ^dim`.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    m: CMatrix,
}

impl DensityMatrix {
    pub fn new(m: CMatrix) -> Result<Self> {
        if !m.is_square() || m.nrows() == 0 {
            return Err(Error::Dimension(format!(
                "density matrix must be square and nonempty, got {}×{}",
                m.nrows(),
                m.ncols()
            )));
        }
        let herm = max_abs_diff(&m, &m.adjoint());
        if !herm.is_finite() || herm > STATE_TOL {
            return Err(Error::Validation(format!(
                "density matrix is not Hermitian (max |ρ - ρ†| = {herm:.3e})"
            )));
        }
        let tr = m.trace();
        if (tr.re - 1.0).abs() > STATE_TOL || tr.im.abs() > STATE_TOL {
            return Err(Error::Validation(format!("density matrix has trace {tr}, expected 1")));
        }
        let m = hermitian_part(&m);
        let min = min_eigenvalue(&m);
        if min < -STATE_TOL {
            return Err(Error::Validation(format!(
                "density matrix is not positive semidefinite (min eigenvalue {min:.3e})"
            )));
        }
        Ok(Self { m })
    }

    /// `|ψ⟩⟨ψ|` for a nonzero vector, normalizing it first.
    pub fn pure(psi: &CVector) -> Result<Self> {
        let norm = psi.norm();
        if psi.is_empty() || !norm.is_finite() || norm < 1e-12 {
            return Err(Error::Validation("state vector is zero or not finite".into()));
        }
        let v = psi.unscale(norm);
        Ok(Self { m: &v * v.adjoint() })
    }

    /// `|i⟩⟨i|` in dimension `d`.
    pub fn basis(d: usize, i: usize) -> Result<Self> {
        if i >= d {
            return Err(Error::Dimension(format!("basis index {i} out of range for dimension {d}")));
        }
        Self::pure(&basis_vector(d, i))
    }

    /// `diag(p)` for a probability vector.
    pub fn diagonal(masses: &[f64]) -> Result<Self> {
        let d = CMatrix::from_diagonal(&CVector::from_iterator(masses.len(), masses.iter().map(|&p| c(p))));
        Self::new(d)
    }

    pub fn maximally_mixed(d: usize) -> Result<Self> {
        if d == 0 {
            return Err(Error::Dimension("dimension must be positive".into()));
        }
        Ok(Self {
            m: CMatrix::identity(d, d).unscale(d as f64),
        })
    }

    /// Skips validation; for results of trace-preserving maps on valid states.
    pub(crate) fn from_trusted(m: CMatrix) -> Self {
        Self { m: hermitian_part(&m) }
    }

    pub fn dim(&self) -> usize {
        self.m.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.m
    }

    pub fn tensor(&self, other: &DensityMatrix) -> DensityMatrix {
        Self {
            m: self.m.kronecker(&other.m),
        }
    }

    /// `U ρ U†`.
    pub fn conjugate(&self, u: &CMatrix) -> Result<DensityMatrix> {
        if u.ncols() != self.dim() {
            return Err(Error::Dimension(format!(
                "{}×{} operator on a state of dimension {}",
                u.nrows(),
                u.ncols(),
                self.dim()
            )));
        }
        Self::new(u * &self.m * u.adjoint())
    }

    /// `⟨ψ|ρ|ψ⟩` for a unit vector.
    pub fn expectation(&self, psi: &CVector) -> f64 {
        (psi.adjoint() * &self.m * psi)[(0, 0)].re
    }

    pub fn entry(&self, i: usize, j: usize) -> Complex64 {
        self.m[(i, j)]
    }
}

/// Fidelity `[Tr √(√ρ σ √ρ)]²` of two states of equal dimension.
pub fn quantum_fidelity(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    if rho.dim() != sigma.dim() {
        return Err(Error::Dimension(format!(
            "states of dimension {} and {}",
            rho.dim(),
            sigma.dim()
        )));
    }
    Ok(fidelity_psd(&rho.m, &sigma.m))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classical::fidelity_masses;

    #[test]
    fn trivial_fidelities() {
        let rho = DensityMatrix::diagonal(&[0.2, 0.3, 0.5]).unwrap();
        assert!((quantum_fidelity(&rho, &rho).unwrap() - 1.0).abs() < 1e-12);
        let a = DensityMatrix::basis(3, 0).unwrap();
        let b = DensityMatrix::basis(3, 2).unwrap();
        assert_eq!(quantum_fidelity(&a, &b).unwrap(), 0.0);
        let m = DensityMatrix::maximally_mixed(2).unwrap();
        assert!(quantum_fidelity(&a, &m).is_err());
    }

    #[test]
    fn diagonal_matches_classical() {
        let p = [0.1, 0.6, 0.3];
        let q = [0.5, 0.25, 0.25];
        let f = quantum_fidelity(&DensityMatrix::diagonal(&p).unwrap(), &DensityMatrix::diagonal(&q).unwrap())
            .unwrap();
        assert!((f - fidelity_masses(&p, &q).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn validation() {
        let mut m = CMatrix::identity(2, 2).unscale(2.0);
        m[(0, 1)] = Complex64::new(0.0, 0.1);
        assert!(DensityMatrix::new(m.clone()).unwrap_err().to_string().contains("Hermitian"));
        m[(1, 0)] = Complex64::new(0.0, -0.1);
        assert!(DensityMatrix::new(m).is_ok());
        assert!(DensityMatrix::diagonal(&[0.5, 0.6]).unwrap_err().to_string().contains("trace"));
        let neg = DensityMatrix::diagonal(&[1.5, -0.5]).unwrap_err();
        assert!(neg.to_string().contains("positive semidefinite"));
        assert!(DensityMatrix::new(CMatrix::zeros(2, 3)).is_err());
    }
}
