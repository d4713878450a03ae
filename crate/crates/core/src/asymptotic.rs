//! k-use compressibility, s-bounded partitions of `X^k`, and the
//! generalized-erasure block-power bound.

use num::bigint::BigInt;
use num::rational::BigRational;
use num::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::classical::{hamming_distance, sequence_digits, ClassicalChannel, ProductChannel};
use crate::compress::compressibility;
use crate::error::{check_unit, Error, Result};
use crate::graph::{build_graph_with, build_product_graph};
use crate::par::Execution;
use crate::partition::Partition;
use crate::setpart::min_blocks_where;
use crate::solver::{solve_exact, solve_greedy, SolverConfig, SolverKind};

/// How a Γ^(k) value was obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    /// Exact minimum clique cover of the graph on `X^k`.
    Exact,
    /// Greedy cover of the graph on `X^k`; Γ is a lower bound.
    GreedyLowerBound,
    /// Power of a single-letter partition at threshold `(1-ε)^{1/k}`; Γ is a
    /// lower bound.
    ProductLowerBound,
    /// Exact value forced by the single-letter fidelities for every k.
    ClosedForm,
}

impl Method {
    pub fn is_exact(self) -> bool {
        matches!(self, Method::Exact | Method::ClosedForm)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GammaPoint {
    pub k: usize,
    pub gamma: f64,
    pub method: Method,
    /// Block count, when it fits in 128 bits.
    pub blocks: Option<u128>,
}

#[derive(Clone, Copy, Debug)]
pub struct AsymptoticConfig {
    pub solver: SolverConfig,
    /// Largest `|X|^k` for which the full graph on `X^k` is built for greedy.
    pub greedy_cap: usize,
    pub exec: Execution,
}

impl Default for AsymptoticConfig {
    fn default() -> Self {
        Self {
            solver: SolverConfig::default(),
            greedy_cap: 4096,
            exec: Execution::default(),
        }
    }
}

fn checked_power(base: usize, k: usize) -> Option<usize> {
    u32::try_from(k).ok().and_then(|k| base.checked_pow(k))
}

fn power_u128(base: usize, k: usize) -> Option<u128> {
    u32::try_from(k).ok().and_then(|k| (base as u128).checked_pow(k))
}

/// Left-fold product of `k` copies of `f`, matching how sequence fidelities
/// are accumulated in the product graph.
fn fold_power(f: f64, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, _| acc * f)
}

/// Γ^(k) that follows from the single-letter fidelities alone, if any.
///
/// If every distinct pair has `F < 1-ε`, distinct sequences differ somewhere
/// and so stay below threshold: Γ^(k) = 0. If the weakest pair satisfies
/// `F^k ≥ 1-ε`, every pair of sequences is above threshold: Γ^(k) = 1.
fn closed_form(ch: &ClassicalChannel, epsilon: f64, k: usize) -> Option<GammaPoint> {
    let n = ch.n_inputs();
    let mut min = 1.0f64;
    let mut max = 0.0f64;
    for i in 0..n {
        for j in i + 1..n {
            let f = ch.reverse_fidelity_at(i, j);
            min = min.min(f);
            max = max.max(f);
        }
    }
    let threshold = 1.0 - epsilon;
    if n == 1 || fold_power(min, k) >= threshold {
        Some(GammaPoint {
            k,
            gamma: 1.0,
            method: Method::ClosedForm,
            blocks: Some(1),
        })
    } else if max < threshold {
        Some(GammaPoint {
            k,
            gamma: 0.0,
            method: Method::ClosedForm,
            blocks: power_u128(n, k),
        })
    } else {
        None
    }
}

/// Compressibility of `k` independent uses of `ch`.
pub fn gamma_k(
    ch: &ClassicalChannel,
    epsilon: f64,
    k: usize,
    mode: SolverKind,
    cfg: AsymptoticConfig,
) -> Result<GammaPoint> {
    check_unit("epsilon", epsilon)?;
    let pc = ProductChannel::new(ch.clone(), k)?;
    let n = pc.n_sequences();
    let fits = |cap: usize| n.is_some_and(|n| n <= cap);
    let exact_ok = fits(cfg.solver.exact_cap);

    let on_graph = |greedy: bool| -> Result<GammaPoint> {
        let g = build_product_graph(&pc, epsilon, cfg.exec)?;
        let (p, method) = if greedy {
            (solve_greedy(&g), Method::GreedyLowerBound)
        } else {
            (solve_exact(&g, cfg.solver)?, Method::Exact)
        };
        p.check_cliques(&g)?;
        Ok(GammaPoint {
            k,
            gamma: compressibility(g.n(), p.len()),
            method,
            blocks: Some(p.len() as u128),
        })
    };

    match mode {
        SolverKind::Exact if exact_ok => on_graph(false),
        SolverKind::Exact => closed_form(ch, epsilon, k).ok_or_else(|| {
            Error::Size(format!(
                "|X|^k = {}^{k} exceeds the exact-solver cap of {}",
                ch.n_inputs(),
                cfg.solver.exact_cap
            ))
        }),
        SolverKind::Greedy if fits(cfg.greedy_cap) => on_graph(true),
        SolverKind::Auto if exact_ok => on_graph(false),
        _ => match closed_form(ch, epsilon, k) {
            Some(p) => Ok(p),
            None if fits(cfg.greedy_cap) => on_graph(true),
            None => product_lower_bound(ch, epsilon, k, cfg),
        },
    }
}

/// Γ^(k) lower bound from the k-fold power of a single-letter partition whose
/// blocks have pairwise fidelity at least `(1-ε)^{1/k}`.
fn product_lower_bound(
    ch: &ClassicalChannel,
    epsilon: f64,
    k: usize,
    cfg: AsymptoticConfig,
) -> Result<GammaPoint> {
    let target = 1.0 - epsilon;
    let mut per_letter = target.powf(1.0 / k as f64);
    while fold_power(per_letter, k) < target {
        per_letter = per_letter.next_up();
    }
    let letter_eps = (1.0 - per_letter).clamp(0.0, 1.0);
    let g = build_graph_with(ch, letter_eps, cfg.exec)?;
    let p = if g.n() <= cfg.solver.exact_cap {
        solve_exact(&g, cfg.solver)?
    } else {
        solve_greedy(&g)
    };
    let n = ch.n_inputs() as f64;
    let b = p.len() as f64;
    let kk = k as i32;
    // (n^k - b^k) / (n^k - 1) without forming n^k
    let gamma = ((1.0 - (b / n).powi(kk)) / (1.0 - n.powi(-kk))).clamp(0.0, 1.0);
    Ok(GammaPoint {
        k,
        gamma,
        method: Method::ProductLowerBound,
        blocks: power_u128(p.len(), k),
    })
}

/// Direction of a finite Γ^(k) sequence.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Trend {
    Constant,
    NonIncreasing,
    NonDecreasing,
    Mixed,
}

fn trend(values: &[f64]) -> Trend {
    let up = values.windows(2).any(|w| w[1] > w[0]);
    let down = values.windows(2).any(|w| w[1] < w[0]);
    match (up, down) {
        (false, false) => Trend::Constant,
        (false, true) => Trend::NonIncreasing,
        (true, false) => Trend::NonDecreasing,
        (true, true) => Trend::Mixed,
    }
}

/// Γ^(k) for `k = 1..=k_max`. The limit itself is never extrapolated.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AsymptoticSweep {
    pub epsilon: f64,
    pub points: Vec<GammaPoint>,
    pub trend: Trend,
}

pub fn delta_estimate(
    ch: &ClassicalChannel,
    epsilon: f64,
    k_max: usize,
    cfg: AsymptoticConfig,
) -> Result<AsymptoticSweep> {
    if k_max == 0 {
        return Err(Error::param("k_max", "must be at least 1"));
    }
    let points = (1..=k_max)
        .map(|k| gamma_k(ch, epsilon, k, SolverKind::Auto, cfg))
        .collect::<Result<Vec<_>>>()?;
    let values: Vec<f64> = points.iter().map(|p| p.gamma).collect();
    Ok(AsymptoticSweep {
        epsilon,
        trend: trend(&values),
        points,
    })
}

/// Largest `|X|^k` materialized by the explicit partition constructions.
pub const CONSTRUCTION_CAP: usize = 1 << 22;

fn sequence_count(alphabet_size: usize, k: usize, cap: usize) -> Result<usize> {
    if alphabet_size == 0 {
        return Err(Error::param("alphabet_size", "must be at least 1"));
    }
    checked_power(alphabet_size, k)
        .filter(|&n| n <= cap)
        .ok_or_else(|| Error::Size(format!("{alphabet_size}^{k} sequences exceed the cap of {cap}")))
}

/// Groups sequences of `X^k` by their first `k - s` letters: `|X|^{k-s}`
/// blocks, each of Hamming diameter at most `s`.
pub fn s_bound_partition(alphabet_size: usize, k: usize, s: usize) -> Result<Partition> {
    if s > k {
        return Err(Error::param("s", format!("{s} exceeds k = {k}")));
    }
    let n = sequence_count(alphabet_size, k, CONSTRUCTION_CAP)?;
    let tail = alphabet_size.pow(s as u32);
    let assignment: Vec<usize> = (0..n).map(|i| i / tail).collect();
    Ok(Partition::from_assignment(&assignment))
}

/// Default cap on `|X|^k` for [`min_s_bounded_partition_size`].
pub const EXHAUSTIVE_CAP: usize = 10;

/// Fewest blocks over every partition of `X^k` whose blocks have Hamming
/// diameter at most `s`, by exhaustive search.
pub fn min_s_bounded_partition_size(alphabet_size: usize, k: usize, s: usize) -> Result<usize> {
    min_s_bounded_partition_size_with_cap(alphabet_size, k, s, EXHAUSTIVE_CAP)
}

pub fn min_s_bounded_partition_size_with_cap(
    alphabet_size: usize,
    k: usize,
    s: usize,
    cap: usize,
) -> Result<usize> {
    if s > k {
        return Err(Error::param("s", format!("{s} exceeds k = {k}")));
    }
    let n = sequence_count(alphabet_size, k, cap)?;
    let seqs: Vec<Vec<usize>> = (0..n).map(|i| sequence_digits(i, alphabet_size, k)).collect();
    let (best, _) = min_blocks_where(n, |a, b| hamming_distance(&seqs[a], &seqs[b]) <= s);
    Ok(best)
}

/// One line of the s-bounded partition table.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConjectureRow {
    pub alphabet_size: usize,
    pub k: usize,
    pub s: usize,
    pub minimum: usize,
    pub bound: usize,
    pub equal: bool,
}

/// Exhaustive minima against `|X|^{k-s}` for `s = 0..=max_s`.
pub fn conjecture_table(alphabet_size: usize, k: usize, max_s: usize) -> Result<Vec<ConjectureRow>> {
    conjecture_table_with_cap(alphabet_size, k, max_s, EXHAUSTIVE_CAP)
}

pub fn conjecture_table_with_cap(
    alphabet_size: usize,
    k: usize,
    max_s: usize,
    cap: usize,
) -> Result<Vec<ConjectureRow>> {
    if max_s > k {
        return Err(Error::param("max_s", format!("{max_s} exceeds k = {k}")));
    }
    (0..=max_s)
        .map(|s| {
            let minimum = min_s_bounded_partition_size_with_cap(alphabet_size, k, s, cap)?;
            let bound = alphabet_size.pow((k - s) as u32);
            Ok(ConjectureRow {
                alphabet_size,
                k,
                s,
                minimum,
                bound,
                equal: minimum == bound,
            })
        })
        .collect()
}

/// Every `(|X|, k)` with `|X| ≥ 2`, `k ≥ 1`, `|X|^k ≤ cap`, for all `s ≤ k`.
///
/// Rows with `equal == false` would be counterexamples to `min == |X|^{k-s}`;
/// they are returned, not treated as errors.
pub fn conjecture_sweep(cap: usize) -> Result<Vec<ConjectureRow>> {
    let mut rows = Vec::new();
    for a in 2..=cap {
        let mut k = 1;
        while checked_power(a, k).is_some_and(|n| n <= cap) {
            rows.extend(conjecture_table_with_cap(a, k, k, cap)?);
            k += 1;
        }
    }
    Ok(rows)
}

/// Closed-form value `(Σ|A_i|^k - d) / ((Σ|A_i|)^k - 1)` of the block-power
/// partition of a generalized erasure channel, in exact integers.
#[derive(Clone, Debug, PartialEq)]
pub struct BlockPowerBound {
    pub k: usize,
    pub numerator: BigInt,
    pub denominator: BigInt,
}

impl BlockPowerBound {
    /// Exact ratio; 1 when there is a single input (`0/0`).
    pub fn ratio(&self) -> BigRational {
        if self.denominator.is_zero() {
            BigRational::one()
        } else {
            BigRational::new(self.numerator.clone(), self.denominator.clone())
        }
    }

    pub fn value(&self) -> f64 {
        self.ratio().to_f64().unwrap_or(f64::NAN)
    }
}

pub fn generalized_erasure_gamma_bound(block_sizes: &[usize], k: usize) -> Result<BlockPowerBound> {
    if block_sizes.is_empty() || block_sizes.contains(&0) {
        return Err(Error::param("block_sizes", "need at least one block, all nonempty"));
    }
    if k == 0 {
        return Err(Error::param("k", "must be at least 1"));
    }
    let k32 = u32::try_from(k).map_err(|_| Error::param("k", "too large"))?;
    let d = BigInt::from(block_sizes.len());
    let total: usize = block_sizes.iter().sum();
    let sum_pow: BigInt = block_sizes.iter().map(|&a| num::pow(BigInt::from(a), k32 as usize)).sum();
    Ok(BlockPowerBound {
        k,
        numerator: sum_pow - d,
        denominator: num::pow(BigInt::from(total), k32 as usize) - BigInt::one(),
    })
}

/// The partition `{A_1^k, ..., A_d^k} ∪ {singletons}` of `X^k` whose
/// compressibility is [`generalized_erasure_gamma_bound`]. Inputs are
/// numbered block by block.
pub fn block_power_partition(block_sizes: &[usize], k: usize) -> Result<Partition> {
    if block_sizes.is_empty() || block_sizes.contains(&0) {
        return Err(Error::param("block_sizes", "need at least one block, all nonempty"));
    }
    let total: usize = block_sizes.iter().sum();
    let n = sequence_count(total, k, CONSTRUCTION_CAP)?;
    let mut block_of = Vec::with_capacity(total);
    for (b, &size) in block_sizes.iter().enumerate() {
        block_of.extend(std::iter::repeat_n(b, size));
    }
    let d = block_sizes.len();
    let assignment: Vec<usize> = (0..n)
        .map(|i| {
            let seq = sequence_digits(i, total, k);
            let first = block_of[seq[0]];
            if seq.iter().all(|&x| block_of[x] == first) {
                first
            } else {
                d + i
            }
        })
        .collect();
    Ok(Partition::from_assignment(&assignment))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::compress::compress;

    fn cfg() -> AsymptoticConfig {
        AsymptoticConfig::default()
    }

    #[test]
    fn k1_matches_single_shot() {
        let ch = ClassicalChannel::generalized_erasure(&[vec!["1", "2"], vec!["3", "4", "5"]], &[0.9, 0.7])
            .unwrap();
        for eps in [0.0, 0.1, 0.2, 0.5, 0.6] {
            let single = compress(&ch, eps, SolverKind::Exact, SolverConfig::default()).unwrap();
            let g1 = gamma_k(&ch, eps, 1, SolverKind::Exact, cfg()).unwrap();
            assert_eq!(g1.gamma, single.compressibility);
            assert_eq!(g1.method, Method::Exact);
        }
    }

    #[test]
    fn identity_stays_incompressible() {
        let id = ClassicalChannel::identity(3).unwrap();
        for k in 1..=6 {
            let p = gamma_k(&id, 0.9, k, SolverKind::Auto, cfg()).unwrap();
            assert_eq!(p.gamma, 0.0, "k = {k}");
        }
    }

    #[test]
    fn erasure_below_threshold_k2() {
        // η² = 0.25 < 0.5: no distinct pair of 2-sequences merges
        let ch = ClassicalChannel::erasure(2, 0.5).unwrap();
        let p = gamma_k(&ch, 0.5, 2, SolverKind::Exact, cfg()).unwrap();
        assert_eq!(p.gamma, 0.0);
        assert_eq!(p.blocks, Some(4));
        assert_eq!(p.method, Method::Exact);
    }

    #[test]
    fn exact_demanded_beyond_cap() {
        let ch = ClassicalChannel::erasure(3, 0.9).unwrap();
        let err = gamma_k(&ch, 0.2, 3, SolverKind::Exact, cfg()).unwrap_err();
        assert!(matches!(err, Error::Size(_)));
        // closed form covers it when every pair of sequences is decided
        let ch = ClassicalChannel::erasure(3, 0.3).unwrap();
        let p = gamma_k(&ch, 0.2, 5, SolverKind::Exact, cfg()).unwrap();
        assert_eq!((p.gamma, p.method), (0.0, Method::ClosedForm));
    }

    #[test]
    fn greedy_and_product_bounds_are_below_exact() {
        let ch = ClassicalChannel::erasure(2, 0.9).unwrap();
        let eps = 0.2;
        for k in 2..=4 {
            let exact = gamma_k(&ch, eps, k, SolverKind::Exact, cfg()).unwrap();
            let greedy = gamma_k(&ch, eps, k, SolverKind::Greedy, cfg()).unwrap();
            let prod = product_lower_bound(&ch, eps, k, cfg()).unwrap();
            assert!(greedy.gamma <= exact.gamma);
            assert!(prod.gamma <= exact.gamma + 1e-15, "k = {k}");
        }
        let tiny = AsymptoticConfig {
            greedy_cap: 8,
            ..cfg()
        };
        let p = gamma_k(&ch, eps, 10, SolverKind::Auto, tiny).unwrap();
        assert_eq!(p.method, Method::ProductLowerBound);
        assert!((0.0..=1.0).contains(&p.gamma));
    }

    #[test]
    fn s_bound_examples() {
        assert_eq!(s_bound_partition(2, 3, 0).unwrap(), Partition::singletons(8));
        let p = s_bound_partition(2, 3, 1).unwrap();
        assert_eq!(p.blocks(), &[vec![0, 1], vec![2, 3], vec![4, 5], vec![6, 7]]);
        assert_eq!(s_bound_partition(2, 3, 3).unwrap(), Partition::single_block(8));
        assert!(s_bound_partition(2, 3, 4).is_err());
    }

    #[test]
    fn exhaustive_minima() {
        assert_eq!(min_s_bounded_partition_size(2, 3, 2).unwrap(), 2);
        assert_eq!(min_s_bounded_partition_size(2, 3, 1).unwrap(), 4);
        assert_eq!(min_s_bounded_partition_size(2, 2, 1).unwrap(), 2);
        assert!(matches!(min_s_bounded_partition_size(2, 4, 1), Err(Error::Size(_))));
    }

    #[test]
    fn block_power_bound_examples() {
        assert_eq!(generalized_erasure_gamma_bound(&[5], 3).unwrap().value(), 1.0);
        assert_eq!(generalized_erasure_gamma_bound(&[1], 3).unwrap().value(), 1.0);
        let b1 = generalized_erasure_gamma_bound(&[2, 2], 1).unwrap();
        assert_eq!(b1.ratio(), BigRational::new(2.into(), 3.into()));
        let b10 = generalized_erasure_gamma_bound(&[2, 2], 10).unwrap();
        assert_eq!(b10.numerator, BigInt::from(2046));
        assert_eq!(b10.denominator, BigInt::from(1048575));
        assert!((b10.value() - 2046.0 / 1048575.0).abs() < 1e-15);
    }
}
