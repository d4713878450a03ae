//! Minimum clique cover of an indistinguishability graph.
//!
//! A clique cover of `G` is a proper coloring of the complement `H`: two
//! inputs may share a block exactly when they are *not* adjacent in `H`.
//! The exact solver is a branch-and-bound coloring of `H` bounded below by a
//! maximum clique of `H` and above by a greedy coloring.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::IndistinguishabilityGraph;
use crate::partition::Partition;

/// Default vertex cap for [`solve_exact`].
pub const DEFAULT_EXACT_CAP: usize = 20;

/// Hard limit imposed by the 64-bit vertex masks of the exact solver.
pub const MAX_EXACT_CAP: usize = 64;

/// Environment variable overriding the exact-solver cap.
pub const EXACT_CAP_ENV: &str = "REVCOMP_EXACT_CAP";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SolverKind {
    Exact,
    Greedy,
    Auto,
}

impl std::str::FromStr for SolverKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exact" => Ok(Self::Exact),
            "greedy" => Ok(Self::Greedy),
            "auto" => Ok(Self::Auto),
            other => Err(Error::param("solver", format!("unknown solver `{other}`"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SolverConfig {
    pub exact_cap: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            exact_cap: DEFAULT_EXACT_CAP,
        }
    }
}

impl SolverConfig {
    pub fn with_cap(exact_cap: usize) -> Result<Self> {
        if exact_cap > MAX_EXACT_CAP {
            return Err(Error::param(
                "exact_cap",
                format!("{exact_cap} exceeds the supported maximum of {MAX_EXACT_CAP}"),
            ));
        }
        Ok(Self { exact_cap })
    }

    /// Reads [`EXACT_CAP_ENV`], falling back to the default when unset.
    pub fn from_env() -> Result<Self> {
        match std::env::var(EXACT_CAP_ENV) {
            Ok(v) => {
                let cap = v.trim().parse().map_err(|_| {
                    Error::param("exact_cap", format!("{EXACT_CAP_ENV}=`{v}` is not an integer"))
                })?;
                Self::with_cap(cap)
            }
            Err(_) => Ok(Self::default()),
        }
    }
}

/// First-fit clique cover in label order.
///
/// Each vertex joins the first existing block all of whose members it is
/// adjacent to, or opens a new block.
pub fn solve_greedy(g: &IndistinguishabilityGraph) -> Partition {
    let mut blocks: Vec<Vec<usize>> = Vec::new();
    for x in 0..g.n() {
        match blocks
            .iter_mut()
            .find(|b| b.iter().all(|&y| g.edge(x, y)))
        {
            Some(b) => b.push(x),
            None => blocks.push(vec![x]),
        }
    }
    Partition::new(g.n(), blocks).expect("greedy cover is a partition")
}

/// Provably minimum clique cover. Fails with [`Error::Size`] above `cap`.
pub fn solve_exact(g: &IndistinguishabilityGraph, cfg: SolverConfig) -> Result<Partition> {
    let n = g.n();
    let cap = cfg.exact_cap.min(MAX_EXACT_CAP);
    if n > cap {
        return Err(Error::Size(format!(
            "{n} inputs exceed the exact-solver cap of {cap}; use the greedy solver or raise {EXACT_CAP_ENV}"
        )));
    }
    if n == 0 {
        return Ok(Partition::singletons(0));
    }
    let full = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
    let adj = g.masks()?;
    // complement graph H, no self loops
    let conflict: Vec<u64> = (0..n).map(|v| !adj[v] & full & !(1 << v)).collect();

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&v| (std::cmp::Reverse(conflict[v].count_ones()), v));

    let lower = max_clique(&conflict, full);

    let mut search = Coloring {
        order: &order,
        conflict: &conflict,
        classes: Vec::new(),
        best: Vec::new(),
        lower,
    };
    search.best = search.first_fit();
    if search.best.len() > lower {
        search.branch(0);
    }
    let blocks = search
        .best
        .iter()
        .map(|&mask| (0..n).filter(|&v| mask >> v & 1 == 1).collect())
        .collect();
    Partition::new(n, blocks)
}

struct Coloring<'a> {
    order: &'a [usize],
    conflict: &'a [u64],
    classes: Vec<u64>,
    best: Vec<u64>,
    lower: usize,
}

impl Coloring<'_> {
    fn first_fit(&self) -> Vec<u64> {
        let mut classes: Vec<u64> = Vec::new();
        for &v in self.order {
            match classes.iter_mut().find(|c| **c & self.conflict[v] == 0) {
                Some(c) => *c |= 1 << v,
                None => classes.push(1 << v),
            }
        }
        classes
    }

    /// Returns true once the lower bound is reached.
    fn branch(&mut self, pos: usize) -> bool {
        if pos == self.order.len() {
            self.best = self.classes.clone();
            return self.best.len() <= self.lower;
        }
        let v = self.order[pos];
        for c in 0..self.classes.len() {
            if self.classes[c] & self.conflict[v] == 0 {
                self.classes[c] |= 1 << v;
                let done = self.branch(pos + 1);
                self.classes[c] &= !(1 << v);
                if done {
                    return true;
                }
            }
        }
        if self.classes.len() + 1 < self.best.len() {
            self.classes.push(1 << v);
            let done = self.branch(pos + 1);
            self.classes.pop();
            if done {
                return true;
            }
        }
        false
    }
}

/// Size of a maximum clique of the graph given by `adj` (no self loops).
fn max_clique(adj: &[u64], candidates: u64) -> usize {
    fn expand(adj: &[u64], size: usize, mut cand: u64, best: &mut usize) {
        if cand == 0 {
            *best = (*best).max(size);
            return;
        }
        while cand != 0 {
            if size + cand.count_ones() as usize <= *best {
                return;
            }
            let v = cand.trailing_zeros() as usize;
            cand &= !(1 << v);
            expand(adj, size + 1, cand & adj[v], best);
        }
    }
    let mut best = 0;
    expand(adj, 0, candidates, &mut best);
    best
}
