//! Laplacian-graph weights, the local walk variable phi, and exact moments.
//!
//! The Laplacian graph of a weighted graph has a unit self-loop at every node
//! and weight `-w_ab / sqrt(d_a d_b)` on every edge, so its adjacency matrix
//! is the normalized Laplacian `I - D^{-1/2} W D^{-1/2}`. The diagonal entry
//! `[L^k]_{ii}` only involves closed walks within `floor(k/2)` hops of `i`,
//! which is why a radius-r egonet determines it exactly for `k <= 2r + 1`.

use rayon::prelude::*;

use crate::egonet::{Egonet, EgonetExtractor};
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::linalg::SymMatrix;
use crate::moments::MomentSequence;

/// Dense Laplacian-graph matrix of an egonet; row and column 0 are the
/// center.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalLaplacianMatrix {
    matrix: SymMatrix,
}

impl LocalLaplacianMatrix {
    pub fn size(&self) -> usize {
        self.matrix.order()
    }

    pub fn get(&self, a: usize, b: usize) -> f64 {
        self.matrix.get(a, b)
    }

    pub fn matrix(&self) -> &SymMatrix {
        &self.matrix
    }
}

/// Sparse form of the same matrix: unit diagonal plus a symmetric adjacency
/// list of normalized off-diagonal weights.
#[derive(Debug, Clone)]
pub struct LaplacianOperator {
    offsets: Vec<usize>,
    targets: Vec<usize>,
    weights: Vec<f64>,
}

impl LaplacianOperator {
    pub fn from_egonet(e: &Egonet) -> Result<LaplacianOperator> {
        check_degrees(e)?;
        let size = e.len();
        let degrees = e.global_degrees();
        let mut counts = vec![0usize; size + 1];
        for &(a, b, _) in e.edges() {
            counts[a + 1] += 1;
            counts[b + 1] += 1;
        }
        for i in 0..size {
            counts[i + 1] += counts[i];
        }
        let offsets = counts.clone();
        let mut cursor = counts;
        let mut targets = vec![0; 2 * e.edges().len()];
        let mut weights = vec![0.0; 2 * e.edges().len()];
        for &(a, b, w) in e.edges() {
            let value = normalized_weight(w, degrees[a], degrees[b]);
            targets[cursor[a]] = b;
            weights[cursor[a]] = value;
            cursor[a] += 1;
            targets[cursor[b]] = a;
            weights[cursor[b]] = value;
            cursor[b] += 1;
        }
        Ok(LaplacianOperator { offsets, targets, weights })
    }

    pub fn size(&self) -> usize {
        self.offsets.len() - 1
    }

    /// `out = M x`.
    pub fn apply(&self, x: &[f64], out: &mut [f64]) {
        for (a, slot) in out.iter_mut().enumerate() {
            let mut acc = x[a];
            for idx in self.offsets[a]..self.offsets[a + 1] {
                acc += self.weights[idx] * x[self.targets[idx]];
            }
            *slot = acc;
        }
    }

    /// `[M^k]_{00}` for `k = 1..=max_order` by repeated products with `e_0`.
    pub fn center_powers(&self, max_order: usize) -> Vec<f64> {
        let size = self.size();
        let mut x = vec![0.0; size];
        let mut y = vec![0.0; size];
        x[0] = 1.0;
        let mut out = Vec::with_capacity(max_order);
        for _ in 0..max_order {
            self.apply(&x, &mut y);
            std::mem::swap(&mut x, &mut y);
            out.push(x[0]);
        }
        out
    }
}

#[inline]
fn normalized_weight(w: f64, da: f64, db: f64) -> f64 {
    -w / (da * db).sqrt()
}

fn check_degrees(e: &Egonet) -> Result<()> {
    match e.global_degrees().iter().position(|&d| !(d > 0.0)) {
        Some(pos) => Err(Error::DegenerateDegree(e.members()[pos])),
        None => Ok(()),
    }
}

/// Dense Laplacian-graph matrix of an egonet, weighted with the members'
/// full-graph degrees.
pub fn local_laplacian(e: &Egonet) -> Result<LocalLaplacianMatrix> {
    check_degrees(e)?;
    let degrees = e.global_degrees();
    let mut matrix = SymMatrix::identity(e.len());
    for &(a, b, w) in e.edges() {
        matrix.set(a, b, normalized_weight(w, degrees[a], degrees[b]));
    }
    Ok(LocalLaplacianMatrix { matrix })
}

/// Largest order for which phi on `e` equals the full-graph diagonal entry.
pub fn max_valid_order(e: &Egonet) -> Option<usize> {
    if e.is_closed() {
        None
    } else {
        Some(2 * e.radius() + 1)
    }
}

fn check_order(e: &Egonet, k: usize) -> Result<()> {
    if k == 0 {
        return Err(Error::Range("moment order must be at least 1".into()));
    }
    match max_valid_order(e) {
        Some(max) if k > max => Err(Error::OrderOutOfRange { k, radius: e.radius(), max }),
        _ => Ok(()),
    }
}

/// `phi(e, k) = [M^k]_{00}` for the egonet's Laplacian-graph matrix `M`.
///
/// Requires `1 <= k <= 2r + 1` unless the egonet already spans the center's
/// whole component.
pub fn phi(e: &Egonet, k: usize) -> Result<f64> {
    check_order(e, k)?;
    Ok(LaplacianOperator::from_egonet(e)?.center_powers(k)[k - 1])
}

/// `phi(e, 1..=max_order)` from a single chain of products.
pub fn phi_sequence(e: &Egonet, max_order: usize) -> Result<Vec<f64>> {
    check_order(e, max_order)?;
    Ok(LaplacianOperator::from_egonet(e)?.center_powers(max_order))
}

/// Per-node `phi(egonet(i, r), 1..=max_order)` for the given centers, in
/// the order given. Work is spread over the rayon pool.
pub fn phi_table(g: &Graph, centers: &[usize], radius: usize, max_order: usize) -> Result<Vec<Vec<f64>>> {
    centers
        .par_iter()
        .map_init(
            || EgonetExtractor::new(g),
            |extractor, &c| {
                let e = extractor.extract(c, radius)?;
                phi_sequence(&e, max_order)
            },
        )
        .collect()
}

/// Averages rows of a phi table column-wise in row order, giving
/// `(m_1, ..., m_K)`.
pub(crate) fn average_rows(rows: &[Vec<f64>], max_order: usize) -> Vec<f64> {
    let mut sums = vec![0.0; max_order];
    for row in rows {
        for (s, v) in sums.iter_mut().zip(row) {
            *s += v;
        }
    }
    let count = rows.len() as f64;
    sums.into_iter().map(|s| s / count).collect()
}

/// Exact `m_0..=m_K` by sweeping every node with egonets of radius
/// `ceil((K - 1) / 2)`. The average is reduced in ascending node order.
pub fn exact_moments(g: &Graph, max_order: usize) -> Result<MomentSequence> {
    if max_order < 1 {
        return Err(Error::Range("maximum moment order must be at least 1".into()));
    }
    let radius = max_order / 2;
    let centers: Vec<usize> = (0..g.n()).collect();
    let rows = phi_table(g, &centers, radius, max_order)?;
    let mut values = vec![1.0];
    values.extend(average_rows(&rows, max_order));
    // m_1 is exactly 1 for every normalized Laplacian
    values[1] = 1.0;
    MomentSequence::exact(g.n(), values)
}
