mod common;

use common::connected_graph;
use egospec::bounds::{hankel_pair, lower_bound, robust_bounds, spectral_bounds, upper_bound, BoundOptions};
use egospec::linalg::eigenvalues;
use egospec::laplacian::exact_moments;
use egospec::moments::moment_ceiling;
use egospec::oracle::exact_spectral_radius;
use egospec::{Graph, GraphKind, MomentSequence};
use proptest::prelude::*;

/// Moments carry rounding that near-singular Hankel matrices amplify.
const SLACK: f64 = 1e-7;

fn er(n: usize, p: f64, seed: u64) -> Graph {
    Graph::generate(GraphKind::ErdosRenyi { n, p, seed }).unwrap()
}

fn boxed(g: &Graph, order: usize, width: f64) -> MomentSequence {
    let m = exact_moments(g, order).unwrap();
    let widths = (0..=order).map(|k| if k < 2 { 0.0 } else { width * moment_ceiling(k) }).collect();
    let mut provenance = m.provenance().to_vec();
    for p in provenance.iter_mut().skip(2) {
        *p = egospec::Provenance::Estimated;
    }
    MomentSequence::new(g.n(), m.values().to_vec(), widths, provenance, Some(100), 0.9).unwrap()
}

#[test]
fn exact_bounds_sandwich_the_radius_on_random_graphs() {
    let opts = BoundOptions::default();
    for (i, &(n, p)) in [(40, 0.15), (80, 0.08), (120, 0.05), (200, 0.03), (200, 0.1)].iter().enumerate() {
        let g = er(n, p, 70 + i as u64);
        let lambda = exact_spectral_radius(&g).unwrap();
        let m = exact_moments(&g, 7).unwrap();
        for r in 1..=3 {
            let b = spectral_bounds(&m, r, &opts).unwrap();
            assert!(b.lower <= lambda + SLACK && lambda <= b.upper + SLACK, "n={n} r={r}: {} {lambda} {}", b.lower, b.upper);
        }
    }
}

#[test]
fn complete_graphs_are_two_point_exact() {
    let opts = BoundOptions::default();
    for n in 3..=10 {
        let g = Graph::generate(GraphKind::Complete(n)).unwrap();
        let lambda = n as f64 / (n - 1) as f64;
        let m = exact_moments(&g, 3).unwrap();
        let b = spectral_bounds(&m, 1, &opts).unwrap();
        assert!((b.lower - lambda).abs() < 1e-6, "K{n} lower {}", b.lower);
        assert!((b.upper - lambda).abs() < 1e-6, "K{n} upper {}", b.upper);
    }
}

#[test]
fn robust_bounds_contain_the_plain_ones() {
    let opts = BoundOptions::default();
    for (n, p, seed) in [(30, 0.2, 1), (60, 0.1, 2)] {
        let g = er(n, p, seed);
        let plain = spectral_bounds(&exact_moments(&g, 5).unwrap(), 2, &opts).unwrap();
        let robust = robust_bounds(&boxed(&g, 5, 0.002), 2, &opts).unwrap();
        assert!(robust.lower <= plain.lower + 1e-9, "{} > {}", robust.lower, plain.lower);
        assert!(robust.upper >= plain.upper - 1e-9, "{} < {}", robust.upper, plain.upper);
        assert!((robust.confidence - 0.9).abs() < 1e-15);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn bounds_sandwich_and_tighten(g in connected_graph(14, true)) {
        let opts = BoundOptions::default();
        let lambda = exact_spectral_radius(&g).unwrap();
        let m = exact_moments(&g, 7).unwrap();
        let mut previous: Option<(f64, f64)> = None;
        for r in 1..=3 {
            let b = spectral_bounds(&m, r, &opts).unwrap();
            prop_assert!(b.lower <= lambda + SLACK && lambda <= b.upper + SLACK, "r={r}: {} {lambda} {}", b.lower, b.upper);
            if let Some((lo, hi)) = previous {
                prop_assert!(b.lower >= lo - SLACK, "lower fell from {lo} to {}", b.lower);
                prop_assert!(b.upper <= hi + SLACK, "upper rose from {hi} to {}", b.upper);
            }
            previous = Some((b.lower, b.upper));
        }
    }

    #[test]
    fn lower_bisection_matches_eigenvalue(g in connected_graph(14, true), r in 1usize..=3) {
        let m = exact_moments(&g, 2 * r + 1).unwrap();
        let lower = lower_bound(&m, r, &BoundOptions::default()).unwrap();
        let spectrum = eigenvalues(&hankel_pair(m.values(), r).unwrap().even).unwrap();
        let well_conditioned = spectrum[0] > 1e-8 * spectrum[r];
        if let (Some(bisection), true) = (lower.bisection, well_conditioned) {
            prop_assert!((bisection - lower.preclamp).abs() < 1e-7, "{bisection} vs {}", lower.preclamp);
        }
        let upper = upper_bound(&m, g.n(), r, &BoundOptions::default()).unwrap();
        prop_assert!(lower.value <= upper.value + SLACK);
        prop_assert!(upper.value <= 2.0);
    }
}
