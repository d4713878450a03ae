//! Partitions of an input alphabet `{0, ..., n-1}`.

use crate::error::{Error, Result};
use crate::graph::IndistinguishabilityGraph;

/// Disjoint cover of `{0, ..., n-1}` by nonempty blocks.
///
/// Stored canonically: each block ascending, blocks ordered by their smallest
/// member. Two partitions with the same blocks therefore compare equal.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Partition {
    n: usize,
    blocks: Vec<Vec<usize>>,
}

impl Partition {
    pub fn new(n: usize, blocks: Vec<Vec<usize>>) -> Result<Self> {
        let mut seen = vec![false; n];
        for (b, block) in blocks.iter().enumerate() {
            if block.is_empty() {
                return Err(Error::Partition(format!("block {b} is empty")));
            }
            for &x in block {
                if x >= n {
                    return Err(Error::Partition(format!(
                        "element {x} in block {b} is outside 0..{n}"
                    )));
                }
                if std::mem::replace(&mut seen[x], true) {
                    return Err(Error::Partition(format!("element {x} appears twice")));
                }
            }
        }
        if let Some(x) = seen.iter().position(|s| !s) {
            return Err(Error::Partition(format!("element {x} is not covered")));
        }
        Ok(Self::canonical(n, blocks))
    }

    fn canonical(n: usize, mut blocks: Vec<Vec<usize>>) -> Self {
        for block in blocks.iter_mut() {
            block.sort_unstable();
        }
        blocks.sort_unstable_by_key(|b| b[0]);
        Self { n, blocks }
    }

    /// Builds the partition `{λ⁻¹(z)}` of a labeling `λ: x ↦ assignment[x]`.
    /// Labels need not be contiguous.
    pub fn from_assignment(assignment: &[usize]) -> Self {
        let mut by_label: std::collections::BTreeMap<usize, Vec<usize>> = Default::default();
        for (x, &z) in assignment.iter().enumerate() {
            by_label.entry(z).or_default().push(x);
        }
        Self::canonical(assignment.len(), by_label.into_values().collect())
    }

    pub fn singletons(n: usize) -> Self {
        Self {
            n,
            blocks: (0..n).map(|x| vec![x]).collect(),
        }
    }

    pub fn single_block(n: usize) -> Self {
        Self {
            n,
            blocks: if n == 0 { vec![] } else { vec![(0..n).collect()] },
        }
    }

    /// Size of the underlying set.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of blocks.
    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    /// Block index of every element (the surjection `λ: X → Z`).
    pub fn assignment(&self) -> Vec<usize> {
        let mut out = vec![0; self.n];
        for (z, block) in self.blocks.iter().enumerate() {
            for &x in block {
                out[x] = z;
            }
        }
        out
    }

    /// Smallest member of each block.
    pub fn representatives(&self) -> Vec<usize> {
        self.blocks.iter().map(|b| b[0]).collect()
    }

    /// Checks that every block is a clique of `graph`.
    ///
    /// Works directly from the adjacency relation; shares no state with the
    /// solvers.
    pub fn check_cliques(&self, graph: &IndistinguishabilityGraph) -> Result<()> {
        if graph.n() != self.n {
            return Err(Error::Consistency(format!(
                "partition of {} elements against a graph on {} vertices",
                self.n,
                graph.n()
            )));
        }
        for (b, block) in self.blocks.iter().enumerate() {
            for (i, &x) in block.iter().enumerate() {
                for &y in &block[i + 1..] {
                    if !graph.edge(x, y) {
                        return Err(Error::Partition(format!(
                            "block {b} joins {x} and {y}, which are not ε-indistinguishable"
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    /// Largest pairwise distance inside any block under `dist`.
    pub fn max_block_diameter(&self, dist: impl Fn(usize, usize) -> usize) -> usize {
        self.blocks
            .iter()
            .flat_map(|b| {
                b.iter()
                    .enumerate()
                    .flat_map(|(i, &x)| b[i + 1..].iter().map(move |&y| (x, y)))
            })
            .map(|(x, y)| dist(x, y))
            .max()
            .unwrap_or(0)
    }
}
