//! Reverse compression of classical and quantum channels.
//!
//! Inputs of a channel whose output distributions are pairwise
//! ε-indistinguishable under fidelity can be merged before transmission,
//! independently of any prior on the inputs. This crate computes the smallest
//! such partition (a minimum clique cover of the ε-indistinguishability graph),
//! its compressibility, the k-use (product channel) analysis, closed forms for
//! erasure channels, and the quantum counterpart built on Kraus channels.
//!
//! Batch workloads (pairwise fidelity matrices, product-channel graphs, probe
//! sweeps) run on rayon when the `parallel` feature is enabled, and fall back
//! to sequential iteration otherwise. Results never depend on the thread count.

pub mod asymptotic;
pub mod classical;
pub mod compress;
pub mod error;
pub mod graph;
pub mod io;
pub mod par;
pub mod partition;
pub mod quantum;
pub mod setpart;
pub mod solver;

pub use classical::{Alphabet, ClassicalChannel, Distribution, ProductChannel};
pub use compress::{compress, decompression_channel, CompressionReport};
pub use error::{Error, Result};
pub use graph::IndistinguishabilityGraph;
pub use par::Execution;
pub use partition::Partition;
pub use solver::{SolverConfig, SolverKind};
