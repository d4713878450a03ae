use super::kraus::KrausChannel;
use super::linalg::{c, null_space, CMatrix, CVector};
use crate::error::{Error, Result};
use crate::partition::Partition;

/// Where a coarse graining came from.
#[derive(Clone, Debug, PartialEq)]
pub enum CoarseSource {
    /// Built from a classical partition with Kraus operators `|z⟩⟨x|`.
    Partition(Partition),
    /// `Tr_W` on `ℂ^{dim_z} ⊗ ℂ^{dim_w}`. Unlike the partition map for the
    /// same uniform partition, it keeps coherences within `Z`.
    PartialTrace { dim_z: usize, dim_w: usize },
    General,
}

/// A compressor together with its provenance and vector-kernel dimension.
#[derive(Clone, Debug, PartialEq)]
pub struct CoarseGraining {
    channel: KrausChannel,
    source: CoarseSource,
    kernel_dim: usize,
}

impl CoarseGraining {
    pub fn general(channel: KrausChannel) -> Self {
        Self::with_source(channel, CoarseSource::General)
    }

    fn with_source(channel: KrausChannel, source: CoarseSource) -> Self {
        let kernel_dim = vector_kernel(&channel).dimension;
        Self {
            channel,
            source,
            kernel_dim,
        }
    }

    pub fn channel(&self) -> &KrausChannel {
        &self.channel
    }

    pub fn source(&self) -> &CoarseSource {
        &self.source
    }

    /// Vector-kernel dimension in the channel's own output space.
    pub fn kernel_dim(&self) -> usize {
        self.kernel_dim
    }

    /// The same map with its output placed in the first basis vectors of
    /// `ℂ^in_dim`, so that input and output spaces coincide.
    pub fn embedded(&self) -> Result<CoarseGraining> {
        let ch = self
            .channel
            .then(&KrausChannel::embedding(self.channel.out_dim(), self.channel.in_dim())?)?;
        Ok(Self::with_source(ch, self.source.clone()))
    }

    /// Quantum compressibility of the embedded map.
    pub fn compressibility(&self) -> Result<f64> {
        let e = self.embedded()?;
        quantum_compressibility(&e.channel, e.channel.in_dim())
    }
}

/// Coarse graining `ρ ↦ Σ_z Σ_{x∈A_z} |z⟩⟨x|ρ|x⟩⟨z|` of a partition of
/// `{0..in_dim-1}`. Output dimension is the number of blocks.
pub fn make_coarse_graining(partition: &Partition, in_dim: usize) -> Result<CoarseGraining> {
    if partition.n() != in_dim || in_dim == 0 {
        return Err(Error::Partition(format!(
            "partition of {} elements for input dimension {in_dim}",
            partition.n()
        )));
    }
    let out = partition.len();
    let mut kraus = Vec::with_capacity(in_dim);
    for (z, block) in partition.blocks().iter().enumerate() {
        for &x in block {
            let mut k = CMatrix::zeros(out, in_dim);
            k[(z, x)] = c(1.0);
            kraus.push(k);
        }
    }
    let ch = KrausChannel::new(in_dim, out, kraus)?;
    Ok(CoarseGraining::with_source(ch, CoarseSource::Partition(partition.clone())))
}

/// `Tr_W` with Kraus operators `I_Z ⊗ ⟨w|`. Composite index `x = z·dim_w + w`.
pub fn partial_trace_coarse_graining(dim_z: usize, dim_w: usize) -> Result<CoarseGraining> {
    if dim_z == 0 || dim_w == 0 {
        return Err(Error::Dimension("partial trace dimensions must be positive".into()));
    }
    let in_dim = dim_z * dim_w;
    let kraus = (0..dim_w)
        .map(|w| {
            let mut k = CMatrix::zeros(dim_z, in_dim);
            for z in 0..dim_z {
                k[(z, z * dim_w + w)] = c(1.0);
            }
            k
        })
        .collect();
    let ch = KrausChannel::new(in_dim, dim_z, kraus)?;
    Ok(CoarseGraining::with_source(ch, CoarseSource::PartialTrace { dim_z, dim_w }))
}

/// Blocks `{(z, w) : w}` grouped by `z`, in composite indexing.
pub fn uniform_partition(dim_z: usize, dim_w: usize) -> Partition {
    let assignment: Vec<usize> = (0..dim_z * dim_w).map(|x| x / dim_w).collect();
    Partition::from_assignment(&assignment)
}

/// Vectors annihilated by every output of a channel.
#[derive(Clone, Debug)]
pub struct VectorKernel {
    pub dimension: usize,
    /// Orthonormal basis of the kernel.
    pub basis: Vec<CVector>,
}

/// Hermitian basis `E_ii`, `(E_ij + E_ji)/√2`, `i(E_ij - E_ji)/√2` of `d × d` operators.
pub fn hermitian_basis(d: usize) -> Vec<CMatrix> {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let mut out = Vec::with_capacity(d * d);
    for i in 0..d {
        let mut m = CMatrix::zeros(d, d);
        m[(i, i)] = c(1.0);
        out.push(m);
        for j in i + 1..d {
            let mut re = CMatrix::zeros(d, d);
            re[(i, j)] = c(s);
            re[(j, i)] = c(s);
            out.push(re);
            let mut im = CMatrix::zeros(d, d);
            im[(i, j)] = num_complex::Complex64::new(0.0, -s);
            im[(j, i)] = num_complex::Complex64::new(0.0, s);
            out.push(im);
        }
    }
    out
}

/// Common null space of `Λ(B_i)` over a Hermitian operator basis `B_i`, in
/// the output space of `ch`.
pub fn vector_kernel(ch: &KrausChannel) -> VectorKernel {
    let images: Vec<CMatrix> = hermitian_basis(ch.in_dim())
        .iter()
        .map(|b| ch.apply_operator(b))
        .collect();
    let m = ch.out_dim();
    let mut stacked = CMatrix::zeros(images.len() * m, m);
    for (i, img) in images.iter().enumerate() {
        stacked.view_mut((i * m, 0), (m, m)).copy_from(img);
    }
    let basis = null_space(&stacked);
    VectorKernel {
        dimension: basis.len(),
        basis,
    }
}

/// `dim K(Λ) / (in_dim - 1)` for a compressor on `ℂ^in_dim`; 1 when `in_dim == 1`.
pub fn quantum_compressibility(compressor: &KrausChannel, in_dim: usize) -> Result<f64> {
    if compressor.in_dim() != in_dim || compressor.out_dim() != in_dim {
        return Err(Error::Dimension(format!(
            "compressor must map dimension {in_dim} to itself, got {} → {} (embed it first)",
            compressor.in_dim(),
            compressor.out_dim()
        )));
    }
    if in_dim == 1 {
        return Ok(1.0);
    }
    let k = vector_kernel(compressor).dimension;
    Ok((k as f64 / (in_dim - 1) as f64).clamp(0.0, 1.0))
}
