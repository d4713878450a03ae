//! The ε-indistinguishability graph of a channel's inputs.

use crate::classical::{ClassicalChannel, ProductChannel};
use crate::error::{check_unit, Error, Result};
use crate::par::Execution;

/// Reflexive, symmetric relation `F(x, x') ≥ 1 - ε` on `n` inputs.
///
/// The relation is not transitive, so valid blocks are cliques rather than
/// equivalence classes. Adjacency is stored as one bitset row per vertex.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IndistinguishabilityGraph {
    n: usize,
    words: usize,
    bits: Vec<u64>,
    epsilon_bits: u64,
}

impl IndistinguishabilityGraph {
    /// Builds the graph from a symmetric predicate evaluated on `i < j`.
    pub fn from_adjacency(epsilon: f64, edge: impl Fn(usize, usize) -> bool, n: usize) -> Self {
        let rows: Vec<Vec<bool>> = (0..n)
            .map(|i| (i + 1..n).map(|j| edge(i, j)).collect())
            .collect();
        Self::from_upper_rows(epsilon, n, rows)
    }

    fn from_upper_rows(epsilon: f64, n: usize, rows: Vec<Vec<bool>>) -> Self {
        let words = n.div_ceil(64).max(1);
        let mut g = Self {
            n,
            words,
            bits: vec![0; n * words],
            epsilon_bits: epsilon.to_bits(),
        };
        for i in 0..n {
            g.set(i, i);
        }
        for (i, row) in rows.into_iter().enumerate() {
            for (off, e) in row.into_iter().enumerate() {
                if e {
                    let j = i + 1 + off;
                    g.set(i, j);
                    g.set(j, i);
                }
            }
        }
        g
    }

    /// Builds the graph by thresholding a fidelity function at `1 - ε`.
    pub fn from_fidelity(
        n: usize,
        epsilon: f64,
        exec: Execution,
        fid: impl Fn(usize, usize) -> f64 + Sync + Send,
    ) -> Result<Self> {
        check_unit("epsilon", epsilon)?;
        let threshold = 1.0 - epsilon;
        let rows = exec.map_range(n, |i| (i + 1..n).map(|j| fid(i, j) >= threshold).collect());
        Ok(Self::from_upper_rows(epsilon, n, rows))
    }

    fn set(&mut self, i: usize, j: usize) {
        self.bits[i * self.words + j / 64] |= 1 << (j % 64);
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn epsilon(&self) -> f64 {
        f64::from_bits(self.epsilon_bits)
    }

    pub fn edge(&self, i: usize, j: usize) -> bool {
        self.bits[i * self.words + j / 64] >> (j % 64) & 1 == 1
    }

    /// Number of neighbours, not counting the vertex itself.
    pub fn degree(&self, i: usize) -> usize {
        let row = &self.bits[i * self.words..(i + 1) * self.words];
        row.iter().map(|w| w.count_ones() as usize).sum::<usize>() - 1
    }

    pub fn is_complete(&self) -> bool {
        (0..self.n).all(|i| self.degree(i) + 1 == self.n)
    }

    pub fn edge_count(&self) -> usize {
        (0..self.n).map(|i| self.degree(i)).sum::<usize>() / 2
    }

    /// Adjacency rows as `u64` masks, including the diagonal. Needs `n ≤ 64`.
    pub(crate) fn masks(&self) -> Result<Vec<u64>> {
        if self.n > 64 {
            return Err(Error::Size(format!(
                "bitmask view supports at most 64 vertices, graph has {}",
                self.n
            )));
        }
        Ok((0..self.n).map(|i| self.bits[i * self.words]).collect())
    }
}

/// Graph of single-use inputs, `edge(x, x') ⇔ F̃(x, x') ≥ 1 - ε`.
pub fn build_graph(ch: &ClassicalChannel, epsilon: f64) -> Result<IndistinguishabilityGraph> {
    build_graph_with(ch, epsilon, Execution::default())
}

pub fn build_graph_with(
    ch: &ClassicalChannel,
    epsilon: f64,
    exec: Execution,
) -> Result<IndistinguishabilityGraph> {
    IndistinguishabilityGraph::from_fidelity(ch.n_inputs(), epsilon, exec, |i, j| {
        ch.reverse_fidelity_at(i, j)
    })
}

/// Graph on `X^k` from letterwise product fidelities.
pub fn build_product_graph(
    pc: &ProductChannel,
    epsilon: f64,
    exec: Execution,
) -> Result<IndistinguishabilityGraph> {
    let n = pc
        .n_sequences()
        .ok_or_else(|| Error::Size("|X|^k overflows".into()))?;
    let base = pc.base();
    let nx = base.n_inputs();
    // single-letter table, then products over sequence digits
    let table = base.pairwise_fidelities(Execution::Sequential);
    let seqs: Vec<Vec<usize>> = (0..n).map(|i| pc.sequence(i)).collect();
    IndistinguishabilityGraph::from_fidelity(n, epsilon, exec, |i, j| {
        seqs[i]
            .iter()
            .zip(&seqs[j])
            .map(|(&a, &b)| table[a * nx + b])
            .product()
    })
}
