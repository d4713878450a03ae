//! Compressibility verdict for the quantum erasure channel.
//!
//! The erasure channel admits a nontrivial compressor exactly when
//! `η² ≥ 1 - ε`. Above the threshold the full compressor `ρ ↦ |0⟩⟨0|` is
//! checked on the probe family. Below it, each compressor of a test suite
//! is refuted by a pure state drawn from its vector kernel: such a state is
//! orthogonal to its own image, so the erasure outputs have fidelity `η²`.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::coarse::{make_coarse_graining, partial_trace_coarse_graining, quantum_compressibility, vector_kernel};
use super::density::{quantum_fidelity, DensityMatrix};
use super::kraus::{erasure_output_fidelity, make_quantum_erasure, KrausChannel};
use super::linalg::{random_kraus, random_unitary, MatrixJson};
use super::probes::{channel_indistinguishability, Probe, ProbeSpec};
use crate::error::{check_unit, Error, Result};
use crate::partition::Partition;

/// Allowed gap between a kernel witness fidelity and `η²`.
pub const WITNESS_TOL: f64 = 1e-8;

/// Slack on the probe minimum against `1 - ε`.
pub const PROBE_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Compressible,
    Incompressible,
}

/// Outcome for one compressor `Λ` tested against the erasure channel `M`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CompressorCheck {
    pub name: String,
    pub kernel_dim: usize,
    /// `F(ρ, Λ(ρ))` at the witness.
    pub input_fidelity: f64,
    /// `F(M(ρ), M(Λ(ρ)))` at the witness.
    pub output_fidelity: f64,
    /// `[(1-η)√F(ρ,Λρ) + η]²`.
    pub predicted_fidelity: f64,
    /// True when the output fidelity falls below `1 - ε`.
    pub rejected: bool,
    pub witness: MatrixJson,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ErasureVerdict {
    pub dim: usize,
    pub eta: f64,
    pub epsilon: f64,
    pub verdict: Verdict,
    pub gamma: f64,
    /// `η²`, the exact minimum of `F(M(ρ), M(Λ(ρ)))` over states when `Λ`
    /// has a nontrivial kernel.
    pub exact_min_fidelity: f64,
    pub seed: u64,
    pub probe_count: usize,
    /// Smallest fidelity over the probes for the full compressor (an upper
    /// bound on the true minimum). Only set above threshold.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub probe_min_fidelity: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub probe_witness: Option<Probe>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub probe_witness_state: Option<MatrixJson>,
    pub compressors: Vec<CompressorCheck>,
}

impl ErasureVerdict {
    /// Whether every check supports the verdict.
    pub fn consistent(&self, epsilon: f64) -> bool {
        match self.verdict {
            Verdict::Compressible => self
                .probe_min_fidelity
                .is_some_and(|m| m >= 1.0 - epsilon - PROBE_TOL),
            Verdict::Incompressible => {
                !self.compressors.is_empty()
                    && self.compressors.iter().all(|c| {
                        c.rejected && (c.output_fidelity - self.exact_min_fidelity).abs() <= WITNESS_TOL
                    })
            }
        }
    }
}

/// Compressors with nontrivial vector kernel on `ℂ^dim`, each mapping
/// `ℂ^dim` to itself.
pub fn nontrivial_compressors(dim: usize, seed: u64) -> Result<Vec<(String, KrausChannel)>> {
    if dim < 2 {
        return Err(Error::param("dim", "must be at least 2"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(1);
    let mut out = vec![("full".to_string(), KrausChannel::constant_pure(dim, dim, 0)?)];

    let mut merge = vec![vec![0, 1]];
    merge.extend((2..dim).map(|x| vec![x]));
    let merge = make_coarse_graining(&Partition::new(dim, merge)?, dim)?.embedded()?;
    out.push(("merge {0,1}".to_string(), merge.channel().clone()));

    if dim >= 3 {
        let h = dim / 2;
        let halves = Partition::new(dim, vec![(0..h).collect(), (h..dim).collect()])?;
        let halves = make_coarse_graining(&halves, dim)?.embedded()?;
        out.push(("halves".to_string(), halves.channel().clone()));
    }

    if let Some(p) = (2..dim).find(|&p| dim.is_multiple_of(p)) {
        let pt = partial_trace_coarse_graining(dim / p, p)?.embedded()?;
        out.push((format!("partial trace {}x{p}", dim / p), pt.channel().clone()));
    }

    // measure in a random basis, prepare one of m < dim random states
    let m = (dim / 2).max(1);
    let v = random_unitary(&mut rng, dim);
    let u = random_unitary(&mut rng, dim);
    let kraus = (0..dim)
        .map(|j| u.column(j % m) * v.column(j).adjoint())
        .collect();
    out.push((
        format!("measure-prepare onto {m}"),
        KrausChannel::new(dim, dim, kraus)?,
    ));

    // generic channel onto a (dim-1)-dimensional subspace, rotated
    let inner = KrausChannel::new(dim, dim - 1, random_kraus(&mut rng, dim, dim - 1, 2))?;
    let rot = KrausChannel::unitary(random_unitary(&mut rng, dim))?;
    let general = inner.then(&KrausChannel::embedding(dim - 1, dim)?)?.then(&rot)?;
    out.push(("random rank-deficient".to_string(), general));
    Ok(out)
}

fn check_compressor(
    name: String,
    lambda: &KrausChannel,
    erasure: &KrausChannel,
    eta: f64,
    epsilon: f64,
) -> Result<CompressorCheck> {
    let kernel = vector_kernel(lambda);
    let psi = kernel.basis.first().ok_or_else(|| {
        Error::Consistency(format!("compressor `{name}` has a trivial vector kernel"))
    })?;
    let rho = DensityMatrix::pure(psi)?;
    let image = lambda.apply(&rho)?;
    let input_fidelity = quantum_fidelity(&rho, &image)?;
    let output_fidelity = quantum_fidelity(&erasure.apply(&rho)?, &erasure.apply(&image)?)?;
    Ok(CompressorCheck {
        name,
        kernel_dim: kernel.dimension,
        input_fidelity,
        output_fidelity,
        predicted_fidelity: erasure_output_fidelity(eta, input_fidelity),
        rejected: output_fidelity < 1.0 - epsilon,
        witness: MatrixJson::from_matrix(rho.matrix()),
    })
}

/// Decides reverse compressibility of the `dim`-dimensional erasure channel.
pub fn verify_erasure_theorem(dim: usize, eta: f64, epsilon: f64, probes: &ProbeSpec) -> Result<ErasureVerdict> {
    check_unit("eta", eta)?;
    check_unit("epsilon", epsilon)?;
    if dim < 2 {
        return Err(Error::param("dim", "must be at least 2"));
    }
    let erasure = make_quantum_erasure(dim, eta)?;
    let threshold = eta * eta;
    let mut verdict = ErasureVerdict {
        dim,
        eta,
        epsilon,
        verdict: Verdict::Incompressible,
        gamma: 0.0,
        exact_min_fidelity: threshold,
        seed: probes.seed,
        probe_count: 0,
        probe_min_fidelity: None,
        probe_witness: None,
        probe_witness_state: None,
        compressors: Vec::new(),
    };
    if threshold >= 1.0 - epsilon {
        let full = KrausChannel::constant_pure(dim, dim, 0)?;
        let r = channel_indistinguishability(&erasure, &full.then(&erasure)?, probes)?;
        verdict.probe_count = r.probes;
        verdict.probe_min_fidelity = Some(r.min_fidelity);
        verdict.probe_witness = Some(r.witness_probe);
        verdict.probe_witness_state = Some(MatrixJson::from_matrix(r.witness.matrix()));
        verdict.compressors.push(check_compressor("full".into(), &full, &erasure, eta, epsilon)?);
        if r.min_fidelity >= 1.0 - epsilon - PROBE_TOL {
            verdict.verdict = Verdict::Compressible;
            verdict.gamma = quantum_compressibility(&full, dim)?;
        }
    } else {
        for (name, lambda) in nontrivial_compressors(dim, probes.seed)? {
            verdict
                .compressors
                .push(check_compressor(name, &lambda, &erasure, eta, epsilon)?);
        }
    }
    Ok(verdict)
}
