//! Exhaustive enumeration of set partitions as restricted growth strings.
//!
//! A restricted growth string `a` of length `n` has `a[0] = 0` and
//! `a[i] ≤ 1 + max(a[..i])`; these strings are in bijection with the
//! partitions of `{0, ..., n-1}`.

use crate::partition::Partition;

/// Iterator over all restricted growth strings of a given length, in
/// lexicographic order. Yields `Bell(n)` items.
#[derive(Clone, Debug)]
pub struct SetPartitions {
    rgs: Vec<usize>,
    // running prefix maxima
    max: Vec<usize>,
    started: bool,
    done: bool,
}

impl SetPartitions {
    pub fn new(n: usize) -> Self {
        Self {
            rgs: vec![0; n],
            max: vec![0; n],
            started: false,
            done: false,
        }
    }
}

impl Iterator for SetPartitions {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        if self.done {
            return None;
        }
        if !self.started {
            self.started = true;
            if self.rgs.is_empty() {
                self.done = true;
            }
            return Some(self.rgs.clone());
        }
        let n = self.rgs.len();
        let mut i = n;
        while i > 1 {
            i -= 1;
            if self.rgs[i] <= self.max[i - 1] {
                self.rgs[i] += 1;
                self.max[i] = self.max[i - 1].max(self.rgs[i]);
                for j in i + 1..n {
                    self.rgs[j] = 0;
                    self.max[j] = self.max[i];
                }
                return Some(self.rgs.clone());
            }
        }
        self.done = true;
        None
    }
}

/// Fewest blocks over all partitions of `{0..n-1}` whose blocks satisfy the
/// pairwise predicate `compatible`, by pruned restricted-growth search.
///
/// Elements are assigned in order to an existing block or to a fresh one
/// (the growth step); branches that cannot beat the incumbent are cut.
pub fn min_blocks_where(n: usize, compatible: impl Fn(usize, usize) -> bool) -> (usize, Partition) {
    struct Search<'a, F> {
        n: usize,
        ok: &'a F,
        blocks: Vec<Vec<usize>>,
        best: usize,
        best_blocks: Vec<Vec<usize>>,
    }
    impl<F: Fn(usize, usize) -> bool> Search<'_, F> {
        fn go(&mut self, x: usize) {
            if self.blocks.len() >= self.best {
                return;
            }
            if x == self.n {
                self.best = self.blocks.len();
                self.best_blocks = self.blocks.clone();
                return;
            }
            for b in 0..self.blocks.len() {
                if self.blocks[b].iter().all(|&y| (self.ok)(x, y)) {
                    self.blocks[b].push(x);
                    self.go(x + 1);
                    self.blocks[b].pop();
                }
            }
            self.blocks.push(vec![x]);
            self.go(x + 1);
            self.blocks.pop();
        }
    }
    let mut s = Search {
        n,
        ok: &compatible,
        blocks: Vec::new(),
        best: n + 1,
        best_blocks: (0..n).map(|x| vec![x]).collect(),
    };
    s.go(0);
    let best = s.best.min(n);
    (best, Partition::new(n, s.best_blocks).expect("search yields a partition"))
}

#[cfg(test)]
mod tests {
    use super::*;

    const BELL: [usize; 10] = [1, 1, 2, 5, 15, 52, 203, 877, 4140, 21147];

    #[test]
    fn bell_numbers() {
        for (n, &b) in BELL.iter().enumerate() {
            assert_eq!(SetPartitions::new(n).count(), b, "n = {n}");
        }
    }

    #[test]
    fn strings_are_restricted_growth_and_distinct() {
        let all: Vec<_> = SetPartitions::new(5).collect();
        let mut dedup = all.clone();
        dedup.dedup();
        assert_eq!(dedup.len(), all.len());
        for s in &all {
            let mut max = 0;
            for (i, &a) in s.iter().enumerate() {
                assert!(i == 0 && a == 0 || a <= max + 1);
                max = max.max(a);
            }
        }
        assert!(all.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn pruned_search_matches_enumeration() {
        // blocks may only join elements at distance ≤ 2
        let ok = |a: usize, b: usize| a.abs_diff(b) <= 2;
        let brute = SetPartitions::new(7)
            .filter(|rgs| {
                (0..7).all(|a| (a + 1..7).all(|b| rgs[a] != rgs[b] || ok(a, b)))
            })
            .map(|rgs| rgs.iter().max().unwrap() + 1)
            .min()
            .unwrap();
        let (best, part) = min_blocks_where(7, ok);
        assert_eq!(best, brute);
        assert_eq!(part.len(), best);
    }
}
