use proptest::prelude::*;

use revcomp::classical::{erasure_sequence_fidelity, fidelity_masses, hamming_distance};
use revcomp::compress::compressibility;
use revcomp::graph::{build_graph_with, build_product_graph};
use revcomp::solver::{solve_exact, solve_greedy};
use revcomp::{
    compress, decompression_channel, Alphabet, ClassicalChannel, Execution, IndistinguishabilityGraph,
    ProductChannel, SolverConfig, SolverKind,
};

fn dist(len: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.0f64..1.0, len).prop_filter_map("all-zero weights", |w| {
        let s: f64 = w.iter().sum();
        (s > 1e-6).then(|| w.into_iter().map(|x| x / s).collect())
    })
}

fn channel(max_in: usize, max_out: usize) -> impl Strategy<Value = ClassicalChannel> {
    (1..=max_in, 1..=max_out).prop_flat_map(|(nx, ny)| {
        prop::collection::vec(dist(ny), nx).prop_map(move |rows| {
            ClassicalChannel::new(Alphabet::numbered(nx).unwrap(), Alphabet::numbered(ny).unwrap(), rows)
                .unwrap()
        })
    })
}

fn brute_min_cover(g: &IndistinguishabilityGraph) -> usize {
    let n = g.n();
    if n == 0 {
        return 0;
    }
    let mut best = n;
    let mut assign = vec![0usize; n];
    // restricted growth strings
    fn rec(i: usize, used: usize, assign: &mut [usize], g: &IndistinguishabilityGraph, best: &mut usize) {
        if used >= *best {
            return;
        }
        if i == assign.len() {
            *best = used;
            return;
        }
        for b in 0..=used {
            if (0..i).filter(|&j| assign[j] == b).all(|j| g.edge(i, j)) {
                assign[i] = b;
                rec(i + 1, used.max(b + 1), assign, g, best);
            }
        }
    }
    rec(0, 0, &mut assign, g, &mut best);
    best
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn fidelity_symmetric_and_bounded((p, q) in (1usize..8).prop_flat_map(|n| (dist(n), dist(n)))) {
        let a = fidelity_masses(&p, &q).unwrap();
        let b = fidelity_masses(&q, &p).unwrap();
        prop_assert!((a - b).abs() < 1e-15);
        prop_assert!((0.0..=1.0).contains(&a));
        prop_assert!((fidelity_masses(&p, &p).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn product_fidelity_factorizes(ch in channel(4, 4), k in 1usize..4, seed in any::<u64>()) {
        let pc = ProductChannel::new(ch.clone(), k).unwrap();
        let n = pc.n_sequences().unwrap();
        let a = pc.sequence(seed as usize % n);
        let b = pc.sequence((seed >> 32) as usize % n);
        let letterwise: f64 = a.iter().zip(&b).map(|(&x, &y)| ch.reverse_fidelity_at(x, y)).product();
        let materialized = pc.materialize().unwrap();
        let ia = (seed as usize) % n;
        let ib = ((seed >> 32) as usize) % n;
        let joint = materialized.reverse_fidelity_at(ia, ib);
        prop_assert!((pc.product_reverse_fidelity_at(&a, &b).unwrap() - letterwise).abs() < 1e-12);
        prop_assert!((joint - letterwise).abs() < 1e-10);
    }

    #[test]
    fn exact_matches_exhaustive(ch in channel(7, 4), eps in 0.0f64..1.0) {
        let g = build_graph_with(&ch, eps, Execution::Sequential).unwrap();
        let exact = solve_exact(&g, SolverConfig::default()).unwrap();
        exact.check_cliques(&g).unwrap();
        prop_assert_eq!(exact.len(), brute_min_cover(&g));
        let greedy = solve_greedy(&g);
        greedy.check_cliques(&g).unwrap();
        prop_assert!(greedy.len() >= exact.len());
    }

    #[test]
    fn compressibility_monotone_in_epsilon(ch in channel(7, 4), a in 0.0f64..1.0, b in 0.0f64..1.0) {
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        let cfg = SolverConfig::default();
        let g_lo = compress(&ch, lo, SolverKind::Exact, cfg).unwrap().compressibility;
        let g_hi = compress(&ch, hi, SolverKind::Exact, cfg).unwrap().compressibility;
        prop_assert!(g_lo <= g_hi);
        prop_assert!((0.0..=1.0).contains(&g_lo));
    }

    #[test]
    fn decompression_preserves_indistinguishability(ch in channel(6, 4), eps in 0.0f64..1.0) {
        let report = compress(&ch, eps, SolverKind::Exact, SolverConfig::default()).unwrap();
        let dec = decompression_channel(&report, &ch).unwrap();
        let composed = dec.then(&ch).unwrap();
        let assignment = report.partition.assignment();
        for (x, &z) in assignment.iter().enumerate() {
            let f = fidelity_masses(ch.row(x), composed.row(z)).unwrap();
            prop_assert!(f >= 1.0 - eps - 1e-12);
        }
    }

    #[test]
    fn erasure_graph_is_hamming_graph(r in 2usize..4, k in 1usize..5, eta in 0.0f64..1.0, eps in 0.0f64..1.0) {
        let pc = ProductChannel::new(ClassicalChannel::erasure(r, eta).unwrap(), k).unwrap();
        let g = build_product_graph(&pc, eps, Execution::Sequential).unwrap();
        for i in 0..g.n() {
            for j in 0..g.n() {
                let s = hamming_distance(&pc.sequence(i), &pc.sequence(j)) as u32;
                let f = erasure_sequence_fidelity(eta, s).unwrap();
                prop_assert_eq!(g.edge(i, j), f >= 1.0 - eps, "pair ({}, {})", i, j);
            }
        }
    }

    #[test]
    fn parallel_and_sequential_graphs_agree(ch in channel(8, 4), eps in 0.0f64..1.0) {
        let a = build_graph_with(&ch, eps, Execution::Sequential).unwrap();
        let b = build_graph_with(&ch, eps, Execution::default()).unwrap();
        prop_assert_eq!(a.edge_count(), b.edge_count());
        for i in 0..a.n() {
            for j in 0..a.n() {
                prop_assert_eq!(a.edge(i, j), b.edge(i, j));
            }
        }
    }
}

#[test]
fn erasure_single_use_thresholds() {
    let ch = ClassicalChannel::erasure(3, 0.6).unwrap();
    let cfg = SolverConfig::default();
    // pairwise fidelity 0.36
    assert_eq!(compress(&ch, 0.63, SolverKind::Exact, cfg).unwrap().compressibility, 0.0);
    assert_eq!(compress(&ch, 0.64, SolverKind::Exact, cfg).unwrap().compressibility, 1.0);
}

#[test]
fn compressibility_formula() {
    assert_eq!(compressibility(1, 1), 1.0);
    assert_eq!(compressibility(4, 4), 0.0);
    assert_eq!(compressibility(4, 1), 1.0);
    assert_eq!(compressibility(4, 2), 2.0 / 3.0);
}

#[test]
fn labelled_product_fidelity() {
    let ch = ClassicalChannel::erasure(2, 0.5).unwrap();
    let pc = ProductChannel::new(ch.clone(), 3).unwrap();
    let labels = ch.input().labels().to_vec();
    let a = [&labels[0], &labels[1], &labels[0]];
    let b = [&labels[0], &labels[0], &labels[0]];
    assert_eq!(pc.product_reverse_fidelity(&a, &b).unwrap(), 0.25);
    assert!(pc.product_reverse_fidelity(&a[..2], &b).is_err());
}

#[test]
fn rejects_bad_rows() {
    let err = ClassicalChannel::new(
        Alphabet::numbered(2).unwrap(),
        Alphabet::numbered(2).unwrap(),
        vec![vec![0.5, 0.5], vec![0.9, 0.0]],
    )
    .unwrap_err();
    assert!(err.to_string().contains("row 1"), "{err}");
    assert!(ClassicalChannel::erasure(2, 1.5).is_err());
    assert!(compress(&ClassicalChannel::identity(2).unwrap(), -0.1, SolverKind::Exact, SolverConfig::default()).is_err());
}

#[test]
fn exact_solver_respects_cap() {
    let ch = ClassicalChannel::identity(25).unwrap();
    let err = compress(&ch, 0.5, SolverKind::Exact, SolverConfig::default()).unwrap_err();
    assert!(matches!(err, revcomp::Error::Size(_)), "{err}");
    let r = compress(&ch, 0.5, SolverKind::Auto, SolverConfig::default()).unwrap();
    assert_eq!(r.compressibility, 0.0);
    assert!(!r.optimal);
}
