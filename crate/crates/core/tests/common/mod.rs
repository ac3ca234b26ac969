#![allow(dead_code)]

use egospec::Graph;
use proptest::prelude::*;

pub fn labels(n: usize) -> Vec<String> {
    (0..n).map(|i| format!("v{i}")).collect()
}

/// Edge list of a connected graph: a random spanning tree plus extra edges.
pub fn connected_edges(max_nodes: usize, weighted: bool) -> impl Strategy<Value = (usize, Vec<(usize, usize, f64)>)> {
    (3..=max_nodes).prop_flat_map(move |n| {
        let pairs = n * (n - 1) / 2;
        let weight = if weighted { (0.25f64..4.0).boxed() } else { Just(1.0).boxed() };
        (
            Just(n),
            proptest::collection::vec(any::<prop::sample::Index>(), n - 1),
            proptest::collection::vec(proptest::bool::weighted(0.3), pairs),
            proptest::collection::vec(weight, pairs),
        )
            .prop_map(|(n, parents, extra, weights)| {
                let mut present = vec![false; n * n];
                for (child, parent) in (1..n).zip(&parents) {
                    let p = parent.index(child);
                    present[p * n + child] = true;
                }
                let mut t = 0;
                let mut edges = Vec::new();
                for i in 0..n {
                    for j in i + 1..n {
                        if present[i * n + j] || extra[t] {
                            edges.push((i, j, weights[t]));
                        }
                        t += 1;
                    }
                }
                (n, edges)
            })
    })
}

pub fn connected_graph(max_nodes: usize, weighted: bool) -> impl Strategy<Value = Graph> {
    connected_edges(max_nodes, weighted).prop_map(|(n, edges)| Graph::from_edges(labels(n), &edges).unwrap())
}

/// Hop distances from `source` by repeated relaxation over the edge list.
pub fn hop_distances(g: &Graph, source: usize) -> Vec<usize> {
    let mut dist = vec![usize::MAX; g.n()];
    dist[source] = 0;
    let mut changed = true;
    while changed {
        changed = false;
        for (u, v, _) in g.edges() {
            for (a, b) in [(u, v), (v, u)] {
                if dist[a] != usize::MAX && dist[a] + 1 < dist[b] {
                    dist[b] = dist[a] + 1;
                    changed = true;
                }
            }
        }
    }
    dist
}
