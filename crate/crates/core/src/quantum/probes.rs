//! Probe-based estimate of the minimum output fidelity between two channels.

use std::fmt;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::density::{quantum_fidelity, DensityMatrix};
use super::kraus::KrausChannel;
use super::linalg::{basis_vector, c, random_pure_state, CVector};
use crate::error::{Error, Result};
use crate::par::Execution;

pub const DEFAULT_RANDOM_PROBES: usize = 1000;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ProbeSpec {
    /// Number of seeded random pure states added to the structured probes.
    pub random: usize,
    pub seed: u64,
    pub exec: Execution,
}

impl ProbeSpec {
    pub fn new(seed: u64) -> Self {
        Self {
            random: DEFAULT_RANDOM_PROBES,
            seed,
            exec: Execution::default(),
        }
    }
}

/// One pure input state of the probe family.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum Probe {
    Basis { i: usize },
    /// `(|i⟩ + phase·|j⟩)/√2` with phase in `{1, -1, i, -i}`.
    Superposition { i: usize, j: usize, phase: Phase },
    Random { index: usize },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Phase {
    Plus,
    Minus,
    PlusI,
    MinusI,
}

impl Phase {
    const ALL: [Phase; 4] = [Phase::Plus, Phase::Minus, Phase::PlusI, Phase::MinusI];

    fn value(self) -> Complex64 {
        match self {
            Phase::Plus => c(1.0),
            Phase::Minus => c(-1.0),
            Phase::PlusI => Complex64::i(),
            Phase::MinusI => -Complex64::i(),
        }
    }
}

impl fmt::Display for Probe {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Probe::Basis { i } => write!(f, "|{i}⟩"),
            Probe::Superposition { i, j, phase } => {
                let p = match phase {
                    Phase::Plus => "+",
                    Phase::Minus => "-",
                    Phase::PlusI => "+i",
                    Phase::MinusI => "-i",
                };
                write!(f, "(|{i}⟩{p}|{j}⟩)/√2")
            }
            Probe::Random { index } => write!(f, "random #{index}"),
        }
    }
}

/// Basis states, pairwise superpositions with four phases, then `spec.random`
/// seeded random pure states.
pub fn probe_states(dim: usize, spec: &ProbeSpec) -> Vec<(Probe, CVector)> {
    let mut out = Vec::with_capacity(dim + 2 * dim * dim + spec.random);
    for i in 0..dim {
        out.push((Probe::Basis { i }, basis_vector(dim, i)));
    }
    let s = std::f64::consts::FRAC_1_SQRT_2;
    for i in 0..dim {
        for j in i + 1..dim {
            for phase in Phase::ALL {
                let mut v = CVector::zeros(dim);
                v[i] = c(s);
                v[j] = phase.value() * s;
                out.push((Probe::Superposition { i, j, phase }, v));
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    for index in 0..spec.random {
        out.push((Probe::Random { index }, random_pure_state(&mut rng, dim)));
    }
    out
}

/// Smallest `F(a(ρ), b(ρ))` seen over the probe family.
///
/// Only finitely many states are tried, so `min_fidelity` is an upper bound
/// on the true minimum over all states.
#[derive(Clone, Debug)]
pub struct Indistinguishability {
    pub min_fidelity: f64,
    pub witness: DensityMatrix,
    pub witness_probe: Probe,
    pub probes: usize,
    pub seed: u64,
}

pub fn channel_indistinguishability(
    a: &KrausChannel,
    b: &KrausChannel,
    spec: &ProbeSpec,
) -> Result<Indistinguishability> {
    if a.in_dim() != b.in_dim() || a.out_dim() != b.out_dim() {
        return Err(Error::Dimension(format!(
            "channels {}→{} and {}→{}",
            a.in_dim(),
            a.out_dim(),
            b.in_dim(),
            b.out_dim()
        )));
    }
    let probes = probe_states(a.in_dim(), spec);
    let values = spec.exec.map_slice(&probes, |(_, psi)| -> Result<f64> {
        let rho = DensityMatrix::pure(psi)?;
        quantum_fidelity(&a.apply(&rho)?, &b.apply(&rho)?)
    });
    let mut best: Option<(usize, f64)> = None;
    for (i, v) in values.into_iter().enumerate() {
        let v = v?;
        if best.is_none_or(|(_, m)| v < m) {
            best = Some((i, v));
        }
    }
    let (i, min_fidelity) = best.expect("probe family is never empty");
    Ok(Indistinguishability {
        min_fidelity,
        witness: DensityMatrix::pure(&probes[i].1)?,
        witness_probe: probes[i].0,
        probes: probes.len(),
        seed: spec.seed,
    })
}
