mod common;

use common::connected_graph;
use egospec::egonet::extract_egonet;
use egospec::laplacian::{exact_moments, phi, phi_sequence};
use egospec::moments::moment_ceiling;
use egospec::oracle::{full_spectrum, power_diagonals, walk_enumeration_phi};
use egospec::{Graph, GraphKind};
use proptest::prelude::*;

proptest! {
    #[test]
    fn local_walks_match_global_diagonals(g in connected_graph(14, true), r in 1usize..4) {
        let k = 2 * r + 1;
        let diagonals = power_diagonals(&g, k).unwrap();
        for c in 0..g.n() {
            let e = extract_egonet(&g, c, r).unwrap();
            let local = phi_sequence(&e, k).unwrap();
            for order in 1..=k {
                let want = diagonals[order - 1][c];
                let got = local[order - 1];
                prop_assert!((got - want).abs() <= 1e-10 * want.abs().max(1.0), "c={c} k={order}: {got} vs {want}");
                prop_assert!(got >= -1e-12 && got <= moment_ceiling(order) + 1e-12);
            }
        }
    }

    #[test]
    fn walk_enumeration_agrees(g in connected_graph(7, true), k in 1usize..=6) {
        let r = k / 2;
        for c in 0..g.n() {
            let e = extract_egonet(&g, c, r).unwrap();
            let local = phi(&e, k).unwrap();
            let walks = walk_enumeration_phi(&g, c, k).unwrap();
            prop_assert!((local - walks).abs() <= 1e-10 * walks.abs().max(1.0));
        }
    }

    #[test]
    fn exact_moments_are_spectral_power_sums(g in connected_graph(16, true), k in 1usize..8) {
        let m = exact_moments(&g, k).unwrap();
        let want = full_spectrum(&g).unwrap().moments(k);
        prop_assert_eq!(m.values().len(), k + 1);
        for (got, want) in m.values().iter().zip(&want) {
            prop_assert!((got - want).abs() <= 1e-9 * want.abs().max(1.0));
        }
    }
}

#[test]
fn order_past_the_radius_is_rejected() {
    let g = Graph::generate(GraphKind::Path(8)).unwrap();
    let e = extract_egonet(&g, 0, 1).unwrap();
    assert!(phi(&e, 3).is_ok());
    assert!(phi(&e, 4).is_err());
    let k3 = Graph::generate(GraphKind::Complete(3)).unwrap();
    let closed = extract_egonet(&k3, 0, 1).unwrap();
    assert!(closed.is_closed());
    assert!(phi(&closed, 9).is_ok());
}

#[test]
fn first_moments_are_fixed() {
    let g = Graph::generate(GraphKind::ErdosRenyi { n: 60, p: 0.1, seed: 4 }).unwrap();
    let m = exact_moments(&g, 5).unwrap();
    assert!((m.value(0) - 1.0).abs() < 1e-15);
    assert!((m.value(1) - 1.0).abs() < 1e-12);
    let want = 1.0 + (0..g.n()).map(|i| g.adjacent(i).map(|(j, w)| w * w / (g.degree(i) * g.degree(j))).sum::<f64>()).sum::<f64>() / g.n() as f64;
    assert!((m.value(2) - want).abs() < 1e-12);
}
