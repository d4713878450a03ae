//! Finite classical channels and output-distribution fidelities.

use std::collections::HashMap;
use std::fmt;

use crate::error::{check_unit, Error, Result};
use crate::par::Execution;

/// Tolerance accepted on masses and row sums before renormalization.
pub const STOCHASTIC_TOL: f64 = 1e-9;

/// Label of the single erasure output symbol.
pub const ERASURE_SYMBOL: &str = "α";

/// Ordered set of distinct symbol names.
#[derive(Clone, PartialEq, Eq)]
pub struct Alphabet {
    labels: Vec<String>,
    index: HashMap<String, usize>,
}

impl Alphabet {
    pub fn new<S: Into<String>>(labels: impl IntoIterator<Item = S>) -> Result<Self> {
        let labels: Vec<String> = labels.into_iter().map(Into::into).collect();
        if labels.is_empty() {
            return Err(Error::Validation("alphabet must contain at least one label".into()));
        }
        let mut index = HashMap::with_capacity(labels.len());
        for (i, label) in labels.iter().enumerate() {
            if index.insert(label.clone(), i).is_some() {
                return Err(Error::Validation(format!("duplicate label `{label}`")));
            }
        }
        Ok(Self { labels, index })
    }

    /// Labels `"1"`, `"2"`, ..., `"r"`.
    pub fn numbered(r: usize) -> Result<Self> {
        Self::new((1..=r).map(|i| i.to_string()))
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, i: usize) -> &str {
        &self.labels[i]
    }

    pub fn index_of(&self, label: &str) -> Result<usize> {
        self.index
            .get(label)
            .copied()
            .ok_or_else(|| Error::UnknownLabel(label.to_string()))
    }
}

impl fmt::Debug for Alphabet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(&self.labels).finish()
    }
}

/// Probability distribution over an [`Alphabet`].
#[derive(Clone, Debug, PartialEq)]
pub struct Distribution {
    alphabet: Alphabet,
    masses: Vec<f64>,
}

impl Distribution {
    pub fn new(alphabet: Alphabet, masses: Vec<f64>) -> Result<Self> {
        if masses.len() != alphabet.len() {
            return Err(Error::Dimension(format!(
                "{} masses for an alphabet of {} labels",
                masses.len(),
                alphabet.len()
            )));
        }
        let masses = normalize_row(masses).map_err(Error::Validation)?;
        Ok(Self { alphabet, masses })
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn masses(&self) -> &[f64] {
        &self.masses
    }
}

/// Validates a probability vector and renormalizes it if its sum is off by
/// less than [`STOCHASTIC_TOL`].
fn normalize_row(mut row: Vec<f64>) -> std::result::Result<Vec<f64>, String> {
    for (j, &m) in row.iter().enumerate() {
        if !m.is_finite() || !(-STOCHASTIC_TOL..=1.0 + STOCHASTIC_TOL).contains(&m) {
            return Err(format!("mass {m} at position {j} is outside [0, 1]"));
        }
    }
    let sum: f64 = row.iter().sum();
    if (sum - 1.0).abs() > STOCHASTIC_TOL {
        return Err(format!("masses sum to {sum}, expected 1"));
    }
    for m in row.iter_mut() {
        *m = m.clamp(0.0, 1.0);
    }
    let sum: f64 = row.iter().sum();
    if sum != 1.0 {
        for m in row.iter_mut() {
            *m /= sum;
        }
    }
    Ok(row)
}

/// Classical fidelity `[Σ √(p q)]²` of two mass vectors of equal length.
///
/// The summand `√(p·q)` is evaluated left to right in index order, so the
/// result is bit-for-bit symmetric in its arguments. Identical vectors give
/// exactly 1.
pub fn fidelity_masses(p: &[f64], q: &[f64]) -> Result<f64> {
    if p.len() != q.len() {
        return Err(Error::Dimension(format!(
            "distributions of length {} and {}",
            p.len(),
            q.len()
        )));
    }
    Ok(fidelity_unchecked(p, q))
}

#[inline]
fn fidelity_unchecked(p: &[f64], q: &[f64]) -> f64 {
    if p == q {
        return 1.0;
    }
    let bc: f64 = p.iter().zip(q).map(|(a, b)| (a * b).sqrt()).sum();
    (bc * bc).clamp(0.0, 1.0)
}

/// Fidelity of two distributions over the same alphabet.
pub fn fidelity(p: &Distribution, q: &Distribution) -> Result<f64> {
    if p.alphabet != q.alphabet {
        return Err(Error::Dimension(
            "distributions are over different alphabets".into(),
        ));
    }
    fidelity_masses(&p.masses, &q.masses)
}

/// Row-stochastic matrix `P(y|x)` over labeled input and output alphabets.
#[derive(Clone, Debug, PartialEq)]
pub struct ClassicalChannel {
    input: Alphabet,
    output: Alphabet,
    // row-major, |input| x |output|
    matrix: Vec<f64>,
}

impl ClassicalChannel {
    pub fn new(input: Alphabet, output: Alphabet, rows: Vec<Vec<f64>>) -> Result<Self> {
        if rows.len() != input.len() {
            return Err(Error::Dimension(format!(
                "matrix has {} rows for {} input labels",
                rows.len(),
                input.len()
            )));
        }
        let mut matrix = Vec::with_capacity(input.len() * output.len());
        for (i, row) in rows.into_iter().enumerate() {
            if row.len() != output.len() {
                return Err(Error::Dimension(format!(
                    "row {i} (`{}`) has {} entries for {} output labels",
                    input.label(i),
                    row.len(),
                    output.len()
                )));
            }
            let row = normalize_row(row)
                .map_err(|e| Error::Validation(format!("row {i} (`{}`): {e}", input.label(i))))?;
            matrix.extend(row);
        }
        Ok(Self {
            input,
            output,
            matrix,
        })
    }

    /// Identity channel on `r` numbered symbols.
    pub fn identity(r: usize) -> Result<Self> {
        let alphabet = Alphabet::numbered(r)?;
        let rows = (0..r)
            .map(|i| (0..r).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
            .collect();
        Self::new(alphabet.clone(), alphabet, rows)
    }

    /// Channel whose output law `dist` ignores the input.
    pub fn constant(r: usize, dist: &[f64]) -> Result<Self> {
        let input = Alphabet::numbered(r)?;
        let output = Alphabet::new((1..=dist.len()).map(|j| format!("y{j}")))?;
        Self::new(input, output, vec![dist.to_vec(); r])
    }

    /// Erasure channel: `P(y|x) = (1-η) δ(x,y) + η δ(α,y)` on `{1..r}`.
    pub fn erasure(r: usize, eta: f64) -> Result<Self> {
        check_unit("eta", eta)?;
        let input = Alphabet::numbered(r)?;
        let output = Alphabet::new(
            input
                .labels()
                .iter()
                .cloned()
                .chain(std::iter::once(ERASURE_SYMBOL.to_string())),
        )?;
        let rows = (0..r)
            .map(|i| {
                let mut row = vec![0.0; r + 1];
                row[i] = 1.0 - eta;
                row[r] = eta;
                row
            })
            .collect();
        Self::new(input, output, rows)
    }

    /// Generalized erasure channel with one erasure symbol `α_i` per block.
    ///
    /// Inputs are the block labels in block order. Outputs are primed copies
    /// of the inputs followed by `α1, ..., αd`.
    pub fn generalized_erasure<S: AsRef<str>>(blocks: &[Vec<S>], etas: &[f64]) -> Result<Self> {
        if blocks.len() != etas.len() {
            return Err(Error::param(
                "etas",
                format!("{} rates for {} blocks", etas.len(), blocks.len()),
            ));
        }
        if blocks.is_empty() {
            return Err(Error::param("blocks", "at least one block is required"));
        }
        for &eta in etas {
            check_unit("etas", eta)?;
        }
        if let Some(i) = blocks.iter().position(|b| b.is_empty()) {
            return Err(Error::param("blocks", format!("block {i} is empty")));
        }
        let input = Alphabet::new(blocks.iter().flatten().map(|s| s.as_ref().to_string()))?;
        let n = input.len();
        let d = blocks.len();
        let output = Alphabet::new(
            input
                .labels()
                .iter()
                .map(|l| format!("{l}'"))
                .chain((1..=d).map(|i| format!("{ERASURE_SYMBOL}{i}"))),
        )?;
        let mut rows = Vec::with_capacity(n);
        for (b, block) in blocks.iter().enumerate() {
            for _ in block {
                let x = rows.len();
                let mut row = vec![0.0; n + d];
                row[x] = 1.0 - etas[b];
                row[n + b] = etas[b];
                rows.push(row);
            }
        }
        Self::new(input, output, rows)
    }

    pub fn input(&self) -> &Alphabet {
        &self.input
    }

    pub fn output(&self) -> &Alphabet {
        &self.output
    }

    pub fn n_inputs(&self) -> usize {
        self.input.len()
    }

    pub fn n_outputs(&self) -> usize {
        self.output.len()
    }

    /// Conditional distribution `P(·|x)` for the input at index `x`.
    pub fn row(&self, x: usize) -> &[f64] {
        let m = self.output.len();
        &self.matrix[x * m..(x + 1) * m]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.matrix.chunks(self.output.len())
    }

    pub fn row_distribution(&self, label: &str) -> Result<Distribution> {
        let x = self.input.index_of(label)?;
        Ok(Distribution {
            alphabet: self.output.clone(),
            masses: self.row(x).to_vec(),
        })
    }

    /// Fidelity of the output distributions of two inputs, by label.
    pub fn reverse_fidelity(&self, x: &str, x_hat: &str) -> Result<f64> {
        let i = self.input.index_of(x)?;
        let j = self.input.index_of(x_hat)?;
        Ok(self.reverse_fidelity_at(i, j))
    }

    /// Fidelity of the output distributions of two inputs, by index.
    pub fn reverse_fidelity_at(&self, x: usize, x_hat: usize) -> f64 {
        fidelity_unchecked(self.row(x), self.row(x_hat))
    }

    /// Full `n × n` table of reverse fidelities (row-major).
    pub fn pairwise_fidelities(&self, exec: Execution) -> Vec<f64> {
        let n = self.n_inputs();
        exec.map_range(n * n, |ij| self.reverse_fidelity_at(ij / n, ij % n))
    }

    /// Channel `self` followed by `next`: `P(Y|X) = Σ_m P(Y|m) P(m|X)`.
    pub fn then(&self, next: &ClassicalChannel) -> Result<ClassicalChannel> {
        if self.output != next.input {
            return Err(Error::Dimension(
                "output alphabet of the first channel differs from the input of the second".into(),
            ));
        }
        let rows = self
            .rows()
            .map(|row| {
                (0..next.n_outputs())
                    .map(|y| {
                        row.iter()
                            .enumerate()
                            .map(|(m, p)| p * next.row(m)[y])
                            .sum()
                    })
                    .collect()
            })
            .collect();
        ClassicalChannel::new(self.input.clone(), next.output.clone(), rows)
    }
}

/// Number of positions at which two equal-length sequences differ.
pub fn hamming_distance<T: PartialEq>(a: &[T], b: &[T]) -> usize {
    a.iter().zip(b).filter(|(x, y)| x != y).count()
}

/// Digits of `index` in base `radix`, most significant first, `len` digits.
pub fn sequence_digits(mut index: usize, radix: usize, len: usize) -> Vec<usize> {
    let mut digits = vec![0; len];
    for d in digits.iter_mut().rev() {
        *d = index % radix;
        index /= radix;
    }
    digits
}

/// `k` memoryless uses of a base channel, without feedback.
///
/// Sequences are indexed lexicographically with the first letter most
/// significant. The joint matrix is never built except by [`Self::materialize`].
#[derive(Clone, Debug)]
pub struct ProductChannel {
    base: ClassicalChannel,
    uses: usize,
}

/// Largest `|Y|^k` for which [`ProductChannel::materialize`] will run.
pub const MATERIALIZE_CAP: usize = 1_000_000;

impl ProductChannel {
    pub fn new(base: ClassicalChannel, uses: usize) -> Result<Self> {
        if uses == 0 {
            return Err(Error::param("k", "number of uses must be positive"));
        }
        Ok(Self { base, uses })
    }

    pub fn base(&self) -> &ClassicalChannel {
        &self.base
    }

    pub fn uses(&self) -> usize {
        self.uses
    }

    /// `|X|^k`, or `None` on overflow.
    pub fn n_sequences(&self) -> Option<usize> {
        self.base.n_inputs().checked_pow(self.uses as u32)
    }

    pub fn sequence(&self, index: usize) -> Vec<usize> {
        sequence_digits(index, self.base.n_inputs(), self.uses)
    }

    pub fn sequence_label(&self, seq: &[usize]) -> String {
        join_labels(self.base.input(), seq)
    }

    /// Letterwise product of single-use reverse fidelities, by label.
    pub fn product_reverse_fidelity<S: AsRef<str>>(&self, xs: &[S], x_hat: &[S]) -> Result<f64> {
        let a = self.lookup(xs)?;
        let b = self.lookup(x_hat)?;
        self.product_reverse_fidelity_at(&a, &b)
    }

    pub fn product_reverse_fidelity_at(&self, xs: &[usize], x_hat: &[usize]) -> Result<f64> {
        if xs.len() != self.uses || x_hat.len() != self.uses {
            return Err(Error::Dimension(format!(
                "sequences of length {} and {} for k = {}",
                xs.len(),
                x_hat.len(),
                self.uses
            )));
        }
        Ok(xs
            .iter()
            .zip(x_hat)
            .map(|(&a, &b)| self.base.reverse_fidelity_at(a, b))
            .product())
    }

    fn lookup<S: AsRef<str>>(&self, seq: &[S]) -> Result<Vec<usize>> {
        seq.iter()
            .map(|s| self.base.input().index_of(s.as_ref()))
            .collect()
    }

    /// Dense joint channel on `X^k → Y^k`. Only for small instances.
    pub fn materialize(&self) -> Result<ClassicalChannel> {
        let base = &self.base;
        let ny = base
            .n_outputs()
            .checked_pow(self.uses as u32)
            .filter(|&m| m <= MATERIALIZE_CAP)
            .ok_or_else(|| {
                Error::Size(format!(
                    "|Y|^k exceeds {MATERIALIZE_CAP} for |Y| = {}, k = {}",
                    base.n_outputs(),
                    self.uses
                ))
            })?;
        let nx = self
            .n_sequences()
            .filter(|&n| n.saturating_mul(ny) <= 16 * MATERIALIZE_CAP)
            .ok_or_else(|| Error::Size("joint matrix too large to materialize".into()))?;
        let input = Alphabet::new((0..nx).map(|i| join_labels(base.input(), &self.sequence(i))))?;
        let output = Alphabet::new(
            (0..ny).map(|j| join_labels(base.output(), &sequence_digits(j, base.n_outputs(), self.uses))),
        )?;
        let rows = (0..nx)
            .map(|i| {
                let xs = self.sequence(i);
                (0..ny)
                    .map(|j| {
                        let ys = sequence_digits(j, base.n_outputs(), self.uses);
                        xs.iter().zip(&ys).map(|(&x, &y)| base.row(x)[y]).product()
                    })
                    .collect()
            })
            .collect();
        ClassicalChannel::new(input, output, rows)
    }
}

fn join_labels(alphabet: &Alphabet, seq: &[usize]) -> String {
    let short = alphabet.labels().iter().all(|l| l.chars().count() == 1);
    let parts: Vec<&str> = seq.iter().map(|&i| alphabet.label(i)).collect();
    if short {
        parts.concat()
    } else {
        parts.join(",")
    }
}

/// Reverse fidelity `η^{2s}` of two erasure-channel input sequences that
/// differ in `s` positions.
pub fn erasure_sequence_fidelity(eta: f64, s: u32) -> Result<f64> {
    check_unit("eta", eta)?;
    Ok((eta * eta).powi(s as i32))
}

/// Published threshold values for the erasure channel that disagree with the
/// closed form `ε ≥ 1 - η^{2s}`, as `(eta, s, quoted epsilon)`.
pub const QUOTED_ERASURE_THRESHOLDS: &[(f64, u32, f64)] = &[(0.5, 1, 0.85)];

/// Smallest ε that lets two erasure inputs at Hamming distance `s` share a block.
#[derive(Clone, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct ErasureThreshold {
    pub eta: f64,
    pub s: u32,
    pub fidelity: f64,
    pub min_epsilon: f64,
    /// Set when a quoted threshold for the same `(eta, s)` differs from `min_epsilon`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub discrepancy: Option<ThresholdDiscrepancy>,
}

#[derive(Clone, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct ThresholdDiscrepancy {
    pub quoted: f64,
    pub computed: f64,
    pub note: String,
}

pub fn erasure_threshold(eta: f64, s: u32) -> Result<ErasureThreshold> {
    let fidelity = erasure_sequence_fidelity(eta, s)?;
    let min_epsilon = 1.0 - fidelity;
    let discrepancy = QUOTED_ERASURE_THRESHOLDS
        .iter()
        .find(|&&(e, k, quoted)| e == eta && k == s && (quoted - min_epsilon).abs() > 1e-12)
        .map(|&(_, _, quoted)| ThresholdDiscrepancy {
            quoted,
            computed: min_epsilon,
            note: format!(
                "a threshold of {quoted} is quoted for eta = {eta}, s = {s}, but eta^(2s) = {fidelity} >= 1 - eps gives eps >= {min_epsilon}"
            ),
        });
    Ok(ErasureThreshold {
        eta,
        s,
        fidelity,
        min_epsilon,
        discrepancy,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn dist(masses: &[f64]) -> Distribution {
        Distribution::new(Alphabet::numbered(masses.len()).unwrap(), masses.to_vec()).unwrap()
    }

    #[test]
    fn fidelity_examples() {
        assert_eq!(fidelity(&dist(&[0.3, 0.7]), &dist(&[0.3, 0.7])).unwrap(), 1.0);
        assert_eq!(fidelity(&dist(&[1.0, 0.0]), &dist(&[0.0, 1.0])).unwrap(), 0.0);
        assert_abs_diff_eq!(
            fidelity(&dist(&[1.0, 0.0]), &dist(&[0.5, 0.5])).unwrap(),
            0.5,
            epsilon = 1e-15
        );
    }

    #[test]
    fn identical_rows_exactly_one() {
        let p = [0.1, 0.2, 0.3, 0.4];
        assert_eq!(fidelity_masses(&p, &p).unwrap(), 1.0);
        let bc: f64 = p.iter().map(|x| (x * x).sqrt()).sum();
        assert!(bc * bc <= 1.0);
    }

    #[test]
    fn fidelity_alphabet_mismatch() {
        let p = dist(&[0.5, 0.5]);
        let q = Distribution::new(Alphabet::new(["a", "b"]).unwrap(), vec![0.5, 0.5]).unwrap();
        assert!(matches!(fidelity(&p, &q), Err(Error::Dimension(_))));
        assert!(matches!(fidelity_masses(&[1.0], &[0.5, 0.5]), Err(Error::Dimension(_))));
    }

    #[test]
    fn rejects_bad_rows() {
        let a = Alphabet::numbered(2).unwrap();
        let err = ClassicalChannel::new(a.clone(), a.clone(), vec![vec![1.0, 0.0], vec![0.5, 0.4]])
            .unwrap_err();
        assert!(err.to_string().contains("row 1"), "{err}");
        let err = ClassicalChannel::new(a.clone(), a.clone(), vec![vec![1.2, -0.2], vec![0.5, 0.5]])
            .unwrap_err();
        assert!(err.to_string().contains("row 0"), "{err}");
        // drift inside tolerance is renormalized
        let ch = ClassicalChannel::new(a.clone(), a, vec![vec![0.5, 0.5 + 5e-10], vec![0.0, 1.0]])
            .unwrap();
        assert_eq!(ch.row(0).iter().sum::<f64>(), 1.0);
    }

    #[test]
    fn duplicate_labels_rejected() {
        assert!(Alphabet::new(["a", "a"]).is_err());
        assert!(Alphabet::new(Vec::<String>::new()).is_err());
    }

    #[test]
    fn reverse_fidelity_examples() {
        let id = ClassicalChannel::identity(3).unwrap();
        assert_eq!(id.reverse_fidelity("2", "2").unwrap(), 1.0);
        assert_eq!(id.reverse_fidelity("1", "3").unwrap(), 0.0);
        assert!(matches!(id.reverse_fidelity("1", "9"), Err(Error::UnknownLabel(_))));
        let er = ClassicalChannel::erasure(3, 0.5).unwrap();
        assert_eq!(er.reverse_fidelity("1", "2").unwrap(), 0.25);
    }

    #[test]
    fn erasure_constructor() {
        let e0 = ClassicalChannel::erasure(2, 0.0).unwrap();
        assert_eq!(e0.row(0), &[1.0, 0.0, 0.0]);
        assert_eq!(e0.row(1), &[0.0, 1.0, 0.0]);
        let e1 = ClassicalChannel::erasure(2, 1.0).unwrap();
        assert_eq!(e1.row(0), &[0.0, 0.0, 1.0]);
        assert_eq!(e1.row(1), &[0.0, 0.0, 1.0]);
        let e = ClassicalChannel::erasure(3, 0.5).unwrap();
        assert_eq!(e.output().labels(), &["1", "2", "3", "α"]);
        for x in 0..3 {
            assert_eq!(e.row(x)[x], 0.5);
            assert_eq!(e.row(x)[3], 0.5);
        }
        assert!(matches!(ClassicalChannel::erasure(2, 1.5), Err(Error::Parameter { .. })));
        assert!(ClassicalChannel::erasure(2, f64::NAN).is_err());
    }

    #[test]
    fn generalized_erasure_constructor() {
        let single = ClassicalChannel::generalized_erasure(&[vec!["1", "2", "3"]], &[0.3]).unwrap();
        let plain = ClassicalChannel::erasure(3, 0.3).unwrap();
        assert_eq!(single.rows().collect::<Vec<_>>(), plain.rows().collect::<Vec<_>>());

        let ch = ClassicalChannel::generalized_erasure(&[vec!["1", "2"], vec!["3", "4"]], &[0.9, 0.95])
            .unwrap();
        assert_eq!(ch.output().labels(), &["1'", "2'", "3'", "4'", "α1", "α2"]);
        assert_abs_diff_eq!(ch.row(0)[0], 0.1, epsilon = 1e-15);
        assert_eq!(ch.row(1)[4], 0.9);
        assert_eq!(ch.row(3)[5], 0.95);
        assert_abs_diff_eq!(ch.reverse_fidelity("1", "2").unwrap(), 0.81, epsilon = 1e-15);
        assert_abs_diff_eq!(ch.reverse_fidelity("3", "4").unwrap(), 0.9025, epsilon = 1e-15);
        assert_eq!(ch.reverse_fidelity("1", "3").unwrap(), 0.0);
        assert_eq!(ch.reverse_fidelity("2", "4").unwrap(), 0.0);

        let err = ClassicalChannel::generalized_erasure(&[vec!["1"], vec!["2"]], &[0.5]).unwrap_err();
        assert!(matches!(err, Error::Parameter { name: "etas", .. }));
    }

    #[test]
    fn product_fidelity_examples() {
        let pc = ProductChannel::new(ClassicalChannel::erasure(2, 0.5).unwrap(), 3).unwrap();
        assert_eq!(pc.product_reverse_fidelity(&["1", "2", "1"], &["1", "2", "1"]).unwrap(), 1.0);
        assert_eq!(pc.product_reverse_fidelity(&["1", "2", "1"], &["1", "1", "1"]).unwrap(), 0.25);
        assert!(matches!(
            pc.product_reverse_fidelity(&["1", "2"], &["1", "1", "1"]),
            Err(Error::Dimension(_))
        ));
    }

    #[test]
    fn erasure_sequence_fidelity_examples() {
        assert_eq!(erasure_sequence_fidelity(0.7, 0).unwrap(), 1.0);
        assert_eq!(erasure_sequence_fidelity(0.5, 1).unwrap(), 0.25);
        assert_abs_diff_eq!(erasure_sequence_fidelity(0.8, 3).unwrap(), 0.262144, epsilon = 1e-15);
        let pc = ProductChannel::new(ClassicalChannel::erasure(3, 0.8).unwrap(), 4).unwrap();
        let f = pc.product_reverse_fidelity(&["1", "2", "3", "1"], &["2", "3", "1", "1"]).unwrap();
        assert_abs_diff_eq!(f, 0.262144, epsilon = 1e-15);
        assert!(erasure_sequence_fidelity(-0.1, 1).is_err());
    }

    #[test]
    fn threshold_discrepancy_flagged() {
        let t = erasure_threshold(0.5, 1).unwrap();
        assert_eq!(t.min_epsilon, 0.75);
        let d = t.discrepancy.unwrap();
        assert_eq!(d.quoted, 0.85);
        assert_eq!(d.computed, 0.75);
        assert!(erasure_threshold(0.5, 2).unwrap().discrepancy.is_none());
    }

    #[test]
    fn composition_with_identity() {
        let ch = ClassicalChannel::erasure(3, 0.4).unwrap();
        let id = ClassicalChannel::identity(3).unwrap();
        assert_eq!(id.then(&ch).unwrap().rows().collect::<Vec<_>>(), ch.rows().collect::<Vec<_>>());
        assert!(ch.then(&id).is_err());
    }

    #[test]
    fn materialize_small_product() {
        let pc = ProductChannel::new(ClassicalChannel::erasure(2, 0.5).unwrap(), 2).unwrap();
        let joint = pc.materialize().unwrap();
        assert_eq!(joint.input().labels(), &["11", "12", "21", "22"]);
        assert_eq!(joint.n_outputs(), 9);
        let big = ProductChannel::new(ClassicalChannel::erasure(9, 0.5).unwrap(), 7).unwrap();
        assert!(matches!(big.materialize(), Err(Error::Size(_))));
    }
}
