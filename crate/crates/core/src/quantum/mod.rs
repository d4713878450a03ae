//! Quantum channels in Kraus form, coarse grainings, vector kernels, and the
//! erasure-channel compressibility verdict.

pub mod coarse;
pub mod density;
pub mod kraus;
pub mod linalg;
pub mod probes;
pub mod theorem;

pub use coarse::{
    hermitian_basis, make_coarse_graining, partial_trace_coarse_graining, quantum_compressibility,
    uniform_partition, vector_kernel, CoarseGraining, CoarseSource, VectorKernel,
};
pub use density::{quantum_fidelity, DensityMatrix};
pub use kraus::{erasure_output_fidelity, make_quantum_erasure, KrausChannel};
pub use linalg::{CMatrix, CVector, MatrixJson};
pub use probes::{channel_indistinguishability, Indistinguishability, Probe, ProbeSpec};
pub use theorem::{verify_erasure_theorem, ErasureVerdict, Verdict};
