//! Immutable undirected weighted graphs.
//!
//! Adjacency is stored in compressed sparse row form with every neighbor list
//! sorted by index, so degree sums and all downstream traversals run in a
//! fixed order.

use std::collections::{HashMap, HashSet};
use std::io::BufRead;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// Attempts the Erdős–Rényi generator makes before giving up on an
/// isolated-node-free draw.
pub const ER_MAX_ATTEMPTS: usize = 64;

#[derive(Debug, Clone, PartialEq)]
pub struct Graph {
    offsets: Vec<usize>,
    targets: Vec<usize>,
    weights: Vec<f64>,
    degrees: Vec<f64>,
    labels: Vec<String>,
}

/// Synthetic graph families used as fixtures and surrogates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GraphKind {
    Path(usize),
    Cycle(usize),
    Complete(usize),
    ErdosRenyi { n: usize, p: f64, seed: u64 },
}

impl Graph {
    /// Builds a graph from dense node labels and an undirected edge list.
    ///
    /// Errors report the 1-based position of the offending edge in `edges`.
    pub fn from_edges(labels: Vec<String>, edges: &[(usize, usize, f64)]) -> Result<Graph> {
        let n = labels.len();
        let mut seen = HashSet::with_capacity(edges.len());
        for (pos, &(u, v, w)) in edges.iter().enumerate() {
            let line = pos + 1;
            for idx in [u, v] {
                if idx >= n {
                    return Err(Error::Index { index: idx, n });
                }
            }
            if u == v {
                return Err(Error::SelfLoop { line, label: labels[u].clone() });
            }
            if !(w > 0.0) || !w.is_finite() {
                return Err(Error::NonPositiveWeight {
                    u: labels[u].clone(),
                    v: labels[v].clone(),
                    weight: w,
                });
            }
            if !seen.insert((u.min(v), u.max(v))) {
                return Err(Error::DuplicateEdge {
                    line,
                    u: labels[u].clone(),
                    v: labels[v].clone(),
                });
            }
        }

        let mut adjacency: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
        for &(u, v, w) in edges {
            adjacency[u].push((v, w));
            adjacency[v].push((u, w));
        }

        let mut offsets = Vec::with_capacity(n + 1);
        let mut targets = Vec::with_capacity(2 * edges.len());
        let mut weights = Vec::with_capacity(2 * edges.len());
        let mut degrees = Vec::with_capacity(n);
        offsets.push(0);
        for (i, list) in adjacency.iter_mut().enumerate() {
            if list.is_empty() {
                return Err(Error::IsolatedNode(labels[i].clone()));
            }
            list.sort_unstable_by_key(|&(j, _)| j);
            let mut degree = 0.0;
            for &(j, w) in list.iter() {
                targets.push(j);
                weights.push(w);
                degree += w;
            }
            degrees.push(degree);
            offsets.push(targets.len());
        }

        Ok(Graph { offsets, targets, weights, degrees, labels })
    }

    /// Parses a SNAP-style edge list: `u v` or `u v w` per line, `#` comments.
    ///
    /// Labels are assigned dense indices in order of first appearance and a
    /// missing weight defaults to 1.
    pub fn load_edge_list<R: BufRead>(reader: R) -> Result<Graph> {
        let mut index: HashMap<String, usize> = HashMap::new();
        let mut labels: Vec<String> = Vec::new();
        let mut edges: Vec<(usize, usize, f64)> = Vec::new();
        let mut seen: HashSet<(usize, usize)> = HashSet::new();

        for (lineno, line) in reader.lines().enumerate() {
            let line = line?;
            let lineno = lineno + 1;
            let trimmed = line.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = trimmed.split_whitespace().collect();
            if fields.len() != 2 && fields.len() != 3 {
                return Err(Error::Parse {
                    line: lineno,
                    message: format!("expected `u v` or `u v w`, found {} fields", fields.len()),
                });
            }
            let weight = match fields.get(2) {
                Some(raw) => raw.parse::<f64>().map_err(|_| Error::Parse {
                    line: lineno,
                    message: format!("invalid weight `{raw}`"),
                })?,
                None => 1.0,
            };
            if fields[0] == fields[1] {
                return Err(Error::SelfLoop { line: lineno, label: fields[0].to_string() });
            }
            if !(weight > 0.0) || !weight.is_finite() {
                return Err(Error::NonPositiveWeight {
                    u: fields[0].to_string(),
                    v: fields[1].to_string(),
                    weight,
                });
            }
            let mut intern = |label: &str| -> usize {
                *index.entry(label.to_string()).or_insert_with(|| {
                    labels.push(label.to_string());
                    labels.len() - 1
                })
            };
            let u = intern(fields[0]);
            let v = intern(fields[1]);
            if !seen.insert((u.min(v), u.max(v))) {
                return Err(Error::DuplicateEdge {
                    line: lineno,
                    u: fields[0].to_string(),
                    v: fields[1].to_string(),
                });
            }
            edges.push((u, v, weight));
        }

        Graph::from_edges(labels, &edges)
    }

    pub fn parse_edge_list(text: &str) -> Result<Graph> {
        Graph::load_edge_list(text.as_bytes())
    }

    /// Generates an unweighted fixture graph. Erdős–Rényi draws use
    /// ChaCha8 seeded from `seed` and are redrawn until no node is isolated.
    pub fn generate(kind: GraphKind) -> Result<Graph> {
        let labels = |n: usize| (0..n).map(|i| i.to_string()).collect::<Vec<_>>();
        match kind {
            GraphKind::Path(n) => {
                require_nodes(n, 2)?;
                let edges: Vec<_> = (0..n - 1).map(|i| (i, i + 1, 1.0)).collect();
                Graph::from_edges(labels(n), &edges)
            }
            GraphKind::Cycle(n) => {
                require_nodes(n, 3)?;
                let edges: Vec<_> = (0..n).map(|i| (i, (i + 1) % n, 1.0)).collect();
                Graph::from_edges(labels(n), &edges)
            }
            GraphKind::Complete(n) => {
                require_nodes(n, 2)?;
                let mut edges = Vec::with_capacity(n * (n - 1) / 2);
                for i in 0..n {
                    for j in i + 1..n {
                        edges.push((i, j, 1.0));
                    }
                }
                Graph::from_edges(labels(n), &edges)
            }
            GraphKind::ErdosRenyi { n, p, seed } => {
                require_nodes(n, 2)?;
                if !(p > 0.0 && p <= 1.0) {
                    return Err(Error::Range(format!("edge probability must lie in (0, 1], got {p}")));
                }
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                for _ in 0..ER_MAX_ATTEMPTS {
                    let mut edges = Vec::new();
                    let mut touched = vec![false; n];
                    for i in 0..n {
                        for j in i + 1..n {
                            if rng.gen::<f64>() < p {
                                edges.push((i, j, 1.0));
                                touched[i] = true;
                                touched[j] = true;
                            }
                        }
                    }
                    if touched.iter().all(|&t| t) {
                        return Graph::from_edges(labels(n), &edges);
                    }
                }
                Err(Error::DegenerateGraph(ER_MAX_ATTEMPTS))
            }
        }
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.degrees.len()
    }

    /// Number of undirected edges.
    pub fn edge_count(&self) -> usize {
        self.targets.len() / 2
    }

    /// Neighbor indices of `i`, ascending.
    #[inline]
    pub fn neighbors(&self, i: usize) -> &[usize] {
        &self.targets[self.offsets[i]..self.offsets[i + 1]]
    }

    /// Edge weights aligned with [`Graph::neighbors`].
    #[inline]
    pub fn neighbor_weights(&self, i: usize) -> &[f64] {
        &self.weights[self.offsets[i]..self.offsets[i + 1]]
    }

    pub fn adjacent(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.neighbors(i).iter().copied().zip(self.neighbor_weights(i).iter().copied())
    }

    /// Weight of edge `{i, j}`, or `None` when absent.
    pub fn weight(&self, i: usize, j: usize) -> Option<f64> {
        let nbrs = self.neighbors(i);
        nbrs.binary_search(&j).ok().map(|pos| self.neighbor_weights(i)[pos])
    }

    #[inline]
    pub fn degree(&self, i: usize) -> f64 {
        self.degrees[i]
    }

    pub fn degrees(&self) -> &[f64] {
        &self.degrees
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, i: usize) -> &str {
        &self.labels[i]
    }

    /// Every undirected edge once, as `(i, j, w)` with `i < j`.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.n()).flat_map(move |i| {
            self.adjacent(i).filter(move |&(j, _)| i < j).map(move |(j, w)| (i, j, w))
        })
    }
}

fn require_nodes(n: usize, min: usize) -> Result<()> {
    if n < min {
        return Err(Error::Range(format!("graph needs at least {min} nodes, got {n}")));
    }
    Ok(())
}
