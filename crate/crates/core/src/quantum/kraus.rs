use super::density::DensityMatrix;
use super::linalg::{c, max_abs_diff, CMatrix};
use crate::error::{check_unit, Error, Result};

/// Tolerance on `Σ K†K = I`.
pub const COMPLETENESS_TOL: f64 = 1e-9;

/// CPTP map `ρ ↦ Σ K ρ K†` from `ℂ^in_dim` to `ℂ^out_dim`.
#[derive(Clone, Debug, PartialEq)]
pub struct KrausChannel {
    in_dim: usize,
    out_dim: usize,
    kraus: Vec<CMatrix>,
}

impl KrausChannel {
    /// Validates shapes and completeness.
    pub fn new(in_dim: usize, out_dim: usize, kraus: Vec<CMatrix>) -> Result<Self> {
        if in_dim == 0 || out_dim == 0 {
            return Err(Error::Dimension("channel dimensions must be positive".into()));
        }
        if kraus.is_empty() {
            return Err(Error::Validation("at least one Kraus operator is required".into()));
        }
        for (i, k) in kraus.iter().enumerate() {
            if k.shape() != (out_dim, in_dim) {
                return Err(Error::Dimension(format!(
                    "Kraus operator {i} is {}×{}, expected {out_dim}×{in_dim}",
                    k.nrows(),
                    k.ncols()
                )));
            }
        }
        let ch = Self {
            in_dim,
            out_dim,
            kraus,
        };
        let sum = ch.completeness_sum();
        let dev = sum - CMatrix::identity(in_dim, in_dim);
        let max = dev.iter().map(|z| z.norm()).fold(0.0, f64::max);
        if !max.is_finite() || max > COMPLETENESS_TOL {
            return Err(Error::Validation(format!(
                "Kraus operators are not trace preserving: ‖Σ K†K - I‖_F = {:.3e} (max entry {max:.3e})",
                dev.norm()
            )));
        }
        Ok(ch)
    }

    fn completeness_sum(&self) -> CMatrix {
        self.kraus
            .iter()
            .fold(CMatrix::zeros(self.in_dim, self.in_dim), |acc, k| acc + k.adjoint() * k)
    }

    /// Largest entrywise deviation of `Σ K†K` from the identity.
    pub fn completeness_deviation(&self) -> f64 {
        max_abs_diff(&self.completeness_sum(), &CMatrix::identity(self.in_dim, self.in_dim))
    }

    pub fn identity(d: usize) -> Result<Self> {
        Self::new(d, d, vec![CMatrix::identity(d, d)])
    }

    pub fn unitary(u: CMatrix) -> Result<Self> {
        Self::new(u.ncols(), u.nrows(), vec![u])
    }

    /// Isometry `|i⟩ ↦ |i⟩` of `ℂ^from` into `ℂ^to`.
    pub fn embedding(from: usize, to: usize) -> Result<Self> {
        if from > to {
            return Err(Error::Dimension(format!("cannot embed dimension {from} into {to}")));
        }
        Self::new(from, to, vec![CMatrix::identity(to, from)])
    }

    /// Replaces every input by `|target⟩⟨target|`; Kraus `|target⟩⟨x|`.
    pub fn constant_pure(in_dim: usize, out_dim: usize, target: usize) -> Result<Self> {
        if target >= out_dim {
            return Err(Error::Dimension(format!(
                "target {target} out of range for output dimension {out_dim}"
            )));
        }
        let kraus = (0..in_dim)
            .map(|x| {
                let mut k = CMatrix::zeros(out_dim, in_dim);
                k[(target, x)] = c(1.0);
                k
            })
            .collect();
        Self::new(in_dim, out_dim, kraus)
    }

    pub fn in_dim(&self) -> usize {
        self.in_dim
    }

    pub fn out_dim(&self) -> usize {
        self.out_dim
    }

    pub fn kraus(&self) -> &[CMatrix] {
        &self.kraus
    }

    /// Linear action on an arbitrary `in_dim × in_dim` operator.
    pub fn apply_operator(&self, m: &CMatrix) -> CMatrix {
        self.kraus
            .iter()
            .fold(CMatrix::zeros(self.out_dim, self.out_dim), |acc, k| acc + k * m * k.adjoint())
    }

    pub fn apply(&self, rho: &DensityMatrix) -> Result<DensityMatrix> {
        if rho.dim() != self.in_dim {
            return Err(Error::Dimension(format!(
                "state of dimension {} for a channel with input dimension {}",
                rho.dim(),
                self.in_dim
            )));
        }
        Ok(DensityMatrix::from_trusted(self.apply_operator(rho.matrix())))
    }

    /// Like [`Self::apply`], re-validating the output state.
    pub fn apply_checked(&self, rho: &DensityMatrix) -> Result<DensityMatrix> {
        DensityMatrix::new(self.apply(rho)?.matrix().clone())
    }

    /// `self` followed by `next`.
    pub fn then(&self, next: &KrausChannel) -> Result<KrausChannel> {
        if self.out_dim != next.in_dim {
            return Err(Error::Dimension(format!(
                "output dimension {} does not match input dimension {}",
                self.out_dim, next.in_dim
            )));
        }
        let kraus = next
            .kraus
            .iter()
            .flat_map(|b| self.kraus.iter().map(move |a| b * a))
            .collect();
        KrausChannel::new(self.in_dim, next.out_dim, kraus)
    }

    /// Parallel use `self ⊗ other`.
    pub fn tensor(&self, other: &KrausChannel) -> KrausChannel {
        let kraus = self
            .kraus
            .iter()
            .flat_map(|a| other.kraus.iter().map(move |b| a.kronecker(b)))
            .collect();
        KrausChannel {
            in_dim: self.in_dim * other.in_dim,
            out_dim: self.out_dim * other.out_dim,
            kraus,
        }
    }
}

/// Quantum erasure channel `ρ ↦ (1-η) ρ ⊕ η |α⟩⟨α|` with `α` the extra last
/// basis vector of `ℂ^{in_dim+1}`.
pub fn make_quantum_erasure(in_dim: usize, eta: f64) -> Result<KrausChannel> {
    check_unit("eta", eta)?;
    if in_dim == 0 {
        return Err(Error::Dimension("input dimension must be positive".into()));
    }
    let out = in_dim + 1;
    let mut kraus = vec![CMatrix::identity(out, in_dim).scale((1.0 - eta).sqrt())];
    for x in 0..in_dim {
        let mut k = CMatrix::zeros(out, in_dim);
        k[(in_dim, x)] = c(eta.sqrt());
        kraus.push(k);
    }
    KrausChannel::new(in_dim, out, kraus)
}

/// `[(1-η) √F(ρ, σ) + η]²`: fidelity of erasure outputs given the input fidelity.
pub fn erasure_output_fidelity(eta: f64, input_fidelity: f64) -> f64 {
    let root = (1.0 - eta) * input_fidelity.clamp(0.0, 1.0).sqrt() + eta;
    (root * root).clamp(0.0, 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum::linalg::{random_density_matrix, random_kraus};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn identity_leaves_state() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let rho = DensityMatrix::new(random_density_matrix(&mut rng, 3, 2)).unwrap();
        let out = KrausChannel::identity(3).unwrap().apply_checked(&rho).unwrap();
        assert!(max_abs_diff(out.matrix(), rho.matrix()) < 1e-15);
    }

    #[test]
    fn completeness_violation_reports_norm() {
        let err = KrausChannel::new(2, 2, vec![CMatrix::identity(2, 2).scale(0.9)]).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("‖Σ K†K - I‖_F"), "{msg}");
        let err = KrausChannel::new(2, 2, vec![CMatrix::identity(2, 3)]).unwrap_err();
        assert!(err.to_string().contains("operator 0"));
    }

    #[test]
    fn erasure_action() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let eta = 0.35;
        let ch = make_quantum_erasure(3, eta).unwrap();
        let rho = DensityMatrix::new(random_density_matrix(&mut rng, 3, 3)).unwrap();
        let out = ch.apply_checked(&rho).unwrap();
        let mut expected = CMatrix::zeros(4, 4);
        expected.view_mut((0, 0), (3, 3)).copy_from(&rho.matrix().scale(1.0 - eta));
        expected[(3, 3)] = c(eta);
        assert!(max_abs_diff(out.matrix(), &expected) < 1e-14);
        assert!((out.entry(3, 3).re - eta).abs() < 1e-15);

        let e1 = make_quantum_erasure(2, 1.0).unwrap();
        let out = e1.apply(&rho_basis(2, 1)).unwrap();
        assert_eq!(out.entry(2, 2), c(1.0));
        assert!(make_quantum_erasure(2, 1.1).is_err());
    }

    fn rho_basis(d: usize, i: usize) -> DensityMatrix {
        DensityMatrix::basis(d, i).unwrap()
    }

    #[test]
    fn composition_and_tensor_are_complete() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let a = KrausChannel::new(2, 3, random_kraus(&mut rng, 2, 3, 2)).unwrap();
        let b = KrausChannel::new(3, 2, random_kraus(&mut rng, 3, 2, 3)).unwrap();
        let ab = a.then(&b).unwrap();
        assert_eq!(ab.kraus().len(), 6);
        assert!(a.then(&a).is_err());
        let t = a.tensor(&b);
        assert!(t.completeness_deviation() < 1e-12);
        assert_eq!((t.in_dim(), t.out_dim()), (6, 6));
    }

    #[test]
    fn formula_endpoints() {
        assert_eq!(erasure_output_fidelity(0.6, 0.0), 0.36);
        assert!((erasure_output_fidelity(0.6, 0.25) - 0.64).abs() < 1e-15);
        assert_eq!(erasure_output_fidelity(0.3, 1.0), 1.0);
    }
}
