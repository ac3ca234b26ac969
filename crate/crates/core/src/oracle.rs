//! Ground-truth engines for validation: dense spectra, power-sum moments,
//! dense matrix powers and brute-force closed-walk enumeration.
//!
//! Nothing in the estimation or bounding path calls into this module.

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::linalg::{eigenvalues, SymMatrix};

/// Default node cap for dense solves.
pub const DEFAULT_DENSE_CAP: usize = 2000;
pub const WALK_MAX_NODES: usize = 12;
pub const WALK_MAX_ORDER: usize = 6;

/// Eigenvalues of the normalized Laplacian, descending.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    pub eigenvalues: Vec<f64>,
}

impl Spectrum {
    pub fn spectral_radius(&self) -> f64 {
        self.eigenvalues[0]
    }

    /// Power sums `(1/n) sum_i lambda_i^k` for `k = 0..=max_order`.
    pub fn moments(&self, max_order: usize) -> Vec<f64> {
        let n = self.eigenvalues.len() as f64;
        (0..=max_order)
            .map(|k| self.eigenvalues.iter().map(|l| l.powi(k as i32)).sum::<f64>() / n)
            .collect()
    }
}

fn check_cap(g: &Graph, cap: usize) -> Result<()> {
    if g.n() > cap {
        return Err(Error::SizeCap { n: g.n(), cap });
    }
    Ok(())
}

/// Dense `I - D^{-1/2} W D^{-1/2}`.
pub fn normalized_laplacian(g: &Graph) -> SymMatrix {
    let mut l = SymMatrix::identity(g.n());
    for (i, j, w) in g.edges() {
        l.set(i, j, -w / (g.degree(i) * g.degree(j)).sqrt());
    }
    l
}

pub fn full_spectrum(g: &Graph) -> Result<Spectrum> {
    full_spectrum_capped(g, DEFAULT_DENSE_CAP)
}

pub fn full_spectrum_capped(g: &Graph, cap: usize) -> Result<Spectrum> {
    check_cap(g, cap)?;
    let mut values = eigenvalues(&normalized_laplacian(g))?;
    values.reverse();
    Ok(Spectrum { eigenvalues: values })
}

pub fn exact_spectral_radius(g: &Graph) -> Result<f64> {
    Ok(full_spectrum(g)?.spectral_radius())
}

pub fn exact_spectral_radius_capped(g: &Graph, cap: usize) -> Result<f64> {
    Ok(full_spectrum_capped(g, cap)?.spectral_radius())
}

/// Diagonals of `L^1..=L^max_order` by dense matrix multiplication;
/// `out[k-1][i] = [L^k]_{ii}`.
pub fn power_diagonals(g: &Graph, max_order: usize) -> Result<Vec<Vec<f64>>> {
    check_cap(g, DEFAULT_DENSE_CAP)?;
    let n = g.n();
    let l = normalized_laplacian(g);
    let mut power = l.clone();
    let mut out = Vec::with_capacity(max_order);
    for k in 1..=max_order {
        if k > 1 {
            let mut next = vec![0.0; n * n];
            for i in 0..n {
                let row = power.row(i);
                for (t, &a) in row.iter().enumerate() {
                    if a != 0.0 {
                        for (slot, &b) in next[i * n..(i + 1) * n].iter_mut().zip(l.row(t)) {
                            *slot += a * b;
                        }
                    }
                }
            }
            power = SymMatrix::from_fn(n, |i, j| next[i * n + j]);
        }
        out.push((0..n).map(|i| power.get(i, i)).collect());
    }
    Ok(out)
}

/// Sum of weights of all closed walks of length `k` from `center` in the
/// Laplacian graph (unit self-loops included), enumerated depth first.
pub fn walk_enumeration_phi(g: &Graph, center: usize, k: usize) -> Result<f64> {
    if g.n() > WALK_MAX_NODES {
        return Err(Error::SizeCap { n: g.n(), cap: WALK_MAX_NODES });
    }
    if k > WALK_MAX_ORDER {
        return Err(Error::SizeCap { n: k, cap: WALK_MAX_ORDER });
    }
    if center >= g.n() {
        return Err(Error::Index { index: center, n: g.n() });
    }
    let steps: Vec<Vec<(usize, f64)>> = (0..g.n())
        .map(|i| {
            let mut out = vec![(i, 1.0)];
            out.extend(g.adjacent(i).map(|(j, w)| (j, -w / (g.degree(i) * g.degree(j)).sqrt())));
            out
        })
        .collect();

    fn walk(steps: &[Vec<(usize, f64)>], at: usize, target: usize, left: usize, weight: f64) -> f64 {
        if left == 0 {
            return if at == target { weight } else { 0.0 };
        }
        steps[at].iter().map(|&(next, w)| walk(steps, next, target, left - 1, weight * w)).sum()
    }
    Ok(walk(&steps, center, center, k, 1.0))
}
