//! Single-shot reverse compression of a classical channel.

use serde::{Deserialize, Serialize};

use crate::classical::{Alphabet, ClassicalChannel};
use crate::error::{check_unit, Error, Result};
use crate::graph::{build_graph_with, IndistinguishabilityGraph};
use crate::par::Execution;
use crate::partition::Partition;
use crate::solver::{solve_exact, solve_greedy, SolverConfig, SolverKind};

/// Which solver produced a partition.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SolverTag {
    Exact,
    Greedy,
}

/// `(n - blocks) / (n - 1)`, taken as 1 when `n == 1`.
pub fn compressibility(n: usize, blocks: usize) -> f64 {
    if n <= 1 {
        1.0
    } else {
        (n - blocks) as f64 / (n - 1) as f64
    }
}

/// Minimum pairwise reverse fidelity inside each block (1 for singletons).
pub fn block_certificates(ch: &ClassicalChannel, partition: &Partition) -> Vec<f64> {
    partition
        .blocks()
        .iter()
        .map(|b| {
            let mut min = 1.0f64;
            for (i, &x) in b.iter().enumerate() {
                for &y in &b[i + 1..] {
                    min = min.min(ch.reverse_fidelity_at(x, y));
                }
            }
            min
        })
        .collect()
}

/// Result of compressing a channel at a given ε.
#[derive(Clone, Debug, PartialEq)]
pub struct CompressionReport {
    pub inputs: Alphabet,
    pub partition: Partition,
    /// Lowest-index member of each block.
    pub representatives: Vec<usize>,
    pub epsilon: f64,
    pub compressibility: f64,
    pub certificates: Vec<f64>,
    pub solver: SolverTag,
    /// True only when the exact solver proved the block count minimal.
    pub optimal: bool,
}

/// Wire form of a [`CompressionReport`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CompressionReportJson {
    pub epsilon: f64,
    pub solver: SolverTag,
    pub optimal: bool,
    pub blocks: Vec<Vec<String>>,
    pub representatives: Vec<String>,
    pub compressibility: f64,
    pub certificates: Vec<f64>,
}

impl CompressionReport {
    pub fn to_json(&self) -> CompressionReportJson {
        let label = |x: &usize| self.inputs.label(*x).to_string();
        CompressionReportJson {
            epsilon: self.epsilon,
            solver: self.solver,
            optimal: self.optimal,
            blocks: self
                .partition
                .blocks()
                .iter()
                .map(|b| b.iter().map(label).collect())
                .collect(),
            representatives: self.representatives.iter().map(label).collect(),
            compressibility: self.compressibility,
            certificates: self.certificates.clone(),
        }
    }

    /// Rebuilds a report from its wire form against the channel's input alphabet.
    pub fn from_json(json: &CompressionReportJson, inputs: &Alphabet) -> Result<Self> {
        let blocks = json
            .blocks
            .iter()
            .map(|b| b.iter().map(|l| inputs.index_of(l)).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        let partition = Partition::new(inputs.len(), blocks)?;
        let representatives = json
            .representatives
            .iter()
            .map(|l| inputs.index_of(l))
            .collect::<Result<Vec<_>>>()?;
        if representatives.len() != partition.len()
            || representatives
                .iter()
                .zip(partition.blocks())
                .any(|(r, b)| !b.contains(r))
        {
            return Err(Error::Consistency(
                "each representative must belong to its block".into(),
            ));
        }
        if json.certificates.len() != partition.len() {
            return Err(Error::Consistency(format!(
                "{} certificates for {} blocks",
                json.certificates.len(),
                partition.len()
            )));
        }
        Ok(Self {
            inputs: inputs.clone(),
            partition,
            representatives,
            epsilon: json.epsilon,
            compressibility: json.compressibility,
            certificates: json.certificates.clone(),
            solver: json.solver,
            optimal: json.optimal,
        })
    }
}

/// Solves the clique cover of `g` with the requested solver.
pub fn solve(
    g: &IndistinguishabilityGraph,
    solver: SolverKind,
    cfg: SolverConfig,
) -> Result<(Partition, SolverTag)> {
    match solver {
        SolverKind::Exact => Ok((solve_exact(g, cfg)?, SolverTag::Exact)),
        SolverKind::Greedy => Ok((solve_greedy(g), SolverTag::Greedy)),
        SolverKind::Auto if g.n() <= cfg.exact_cap => Ok((solve_exact(g, cfg)?, SolverTag::Exact)),
        SolverKind::Auto => Ok((solve_greedy(g), SolverTag::Greedy)),
    }
}

/// Smallest ε-indistinguishability partition of the channel's inputs.
pub fn compress(
    ch: &ClassicalChannel,
    epsilon: f64,
    solver: SolverKind,
    cfg: SolverConfig,
) -> Result<CompressionReport> {
    check_unit("epsilon", epsilon)?;
    let g = build_graph_with(ch, epsilon, Execution::default())?;
    let (partition, tag) = solve(&g, solver, cfg)?;
    partition.check_cliques(&g)?;
    let certificates = block_certificates(ch, &partition);
    let optimal = tag == SolverTag::Exact;
    Ok(CompressionReport {
        inputs: ch.input().clone(),
        representatives: partition.representatives(),
        compressibility: compressibility(ch.n_inputs(), partition.len()),
        epsilon,
        certificates,
        solver: tag,
        optimal,
        partition,
    })
}

/// Deterministic decompression `Z → X` sending block `z` to its representative.
///
/// Block labels are `z1, z2, ...` in block order. Composing the result with
/// `ch` gives `P(Y|Z)`.
pub fn decompression_channel(
    report: &CompressionReport,
    ch: &ClassicalChannel,
) -> Result<ClassicalChannel> {
    if report.inputs != *ch.input() {
        return Err(Error::Consistency(
            "report was produced for a channel with different input labels".into(),
        ));
    }
    let recomputed = block_certificates(ch, &report.partition);
    if recomputed.len() != report.certificates.len()
        || recomputed
            .iter()
            .zip(&report.certificates)
            .any(|(a, b)| (a - b).abs() > 1e-12)
    {
        return Err(Error::Consistency(
            "block certificates do not match this channel".into(),
        ));
    }
    let m = report.partition.len();
    let z = Alphabet::new((1..=m).map(|i| format!("z{i}")))?;
    let rows = report
        .representatives
        .iter()
        .map(|&r| {
            let mut row = vec![0.0; ch.n_inputs()];
            row[r] = 1.0;
            row
        })
        .collect();
    ClassicalChannel::new(z, ch.input().clone(), rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classical::fidelity_masses;

    fn cfg() -> SolverConfig {
        SolverConfig::default()
    }

    #[test]
    fn identity_not_compressible() {
        for n in 2..7 {
            let r = compress(&ClassicalChannel::identity(n).unwrap(), 0.99, SolverKind::Exact, cfg())
                .unwrap();
            assert_eq!(r.compressibility, 0.0);
            assert_eq!(r.partition.len(), n);
            assert!(r.optimal);
        }
    }

    #[test]
    fn constant_fully_compressible() {
        let ch = ClassicalChannel::constant(6, &[0.1, 0.9]).unwrap();
        let r = compress(&ch, 0.0, SolverKind::Exact, cfg()).unwrap();
        assert_eq!(r.compressibility, 1.0);
        assert_eq!(r.representatives, vec![0]);
        assert_eq!(r.certificates, vec![1.0]);
    }

    #[test]
    fn generalized_erasure_two_blocks() {
        let ch = ClassicalChannel::generalized_erasure(&[vec!["1", "2"], vec!["3", "4"]], &[0.9, 0.95])
            .unwrap();
        let r = compress(&ch, 0.2, SolverKind::Exact, cfg()).unwrap();
        assert_eq!(r.partition.blocks(), &[vec![0, 1], vec![2, 3]]);
        assert_eq!(r.compressibility, 2.0 / 3.0);
        let json = r.to_json();
        assert_eq!(json.blocks, vec![vec!["1", "2"], vec!["3", "4"]]);
        assert_eq!(json.representatives, vec!["1", "3"]);
    }

    #[test]
    fn single_input_convention() {
        let ch = ClassicalChannel::identity(1).unwrap();
        let r = compress(&ch, 0.5, SolverKind::Auto, cfg()).unwrap();
        assert_eq!(r.compressibility, 1.0);
    }

    #[test]
    fn auto_switches_to_greedy_above_cap() {
        let ch = ClassicalChannel::erasure(25, 0.5).unwrap();
        let r = compress(&ch, 0.8, SolverKind::Auto, cfg()).unwrap();
        assert_eq!(r.solver, SolverTag::Greedy);
        assert!(!r.optimal);
        assert_eq!(r.partition.len(), 1);
        assert!(matches!(
            compress(&ch, 0.8, SolverKind::Exact, cfg()),
            Err(Error::Size(_))
        ));
    }

    #[test]
    fn decompression_maps_to_representatives() {
        let ch = ClassicalChannel::generalized_erasure(&[vec!["a", "b", "c"], vec!["d"]], &[0.9, 0.2])
            .unwrap();
        let eps = 0.2;
        let r = compress(&ch, eps, SolverKind::Exact, cfg()).unwrap();
        let dec = decompression_channel(&r, &ch).unwrap();
        assert_eq!(dec.row(0), &[1.0, 0.0, 0.0, 0.0]);
        assert_eq!(dec.row(1), &[0.0, 0.0, 0.0, 1.0]);
        let zy = dec.then(&ch).unwrap();
        for (z, block) in r.partition.blocks().iter().enumerate() {
            for &x in block {
                assert!(fidelity_masses(ch.row(x), zy.row(z)).unwrap() >= 1.0 - eps);
            }
        }
    }

    #[test]
    fn decompression_rejects_foreign_report() {
        let a = ClassicalChannel::erasure(3, 0.9).unwrap();
        let b = ClassicalChannel::erasure(3, 0.95).unwrap();
        let r = compress(&a, 0.2, SolverKind::Exact, cfg()).unwrap();
        assert!(matches!(decompression_channel(&r, &b), Err(Error::Consistency(_))));
        let c = ClassicalChannel::identity(4).unwrap();
        assert!(decompression_channel(&r, &c).is_err());
    }

    #[test]
    fn report_json_round_trip() {
        let ch = ClassicalChannel::erasure(4, 0.9).unwrap();
        let r = compress(&ch, 0.2, SolverKind::Exact, cfg()).unwrap();
        let text = serde_json::to_string(&r.to_json()).unwrap();
        let parsed: CompressionReportJson = serde_json::from_str(&text).unwrap();
        assert_eq!(CompressionReport::from_json(&parsed, ch.input()).unwrap(), r);
        assert!(text.starts_with(r#"{"epsilon":0.2,"solver":"exact","optimal":true,"blocks":"#));
    }
}
