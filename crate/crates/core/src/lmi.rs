//! Feasibility of small linear matrix inequalities whose matrices depend
//! affinely on a point in a box.
//!
//! The margin `g(x) = min_b (lambda_min(A_b(x)) + tol_b)` is concave in `x`,
//! so a central-cut ellipsoid method either finds a point with `g >= 0` or
//! certifies `max g < 0` over the box from the bound
//! `g(x*) <= g(x_k) + sqrt(s_k' P_k s_k)`.

use crate::linalg::{eigensolve, SymMatrix};

/// One affine block `A(x) = base + sum_i (x_i - c_i) dirs[i]` with its
/// absolute tolerance, after diagonal congruence scaling.
pub(crate) struct Block {
    base: SymMatrix,
    dirs: Vec<SymMatrix>,
    tol: f64,
}

impl Block {
    /// Scales `base` and `dirs` by `diag(base)^{-1/2}` where that diagonal is
    /// positive; the tolerance is `scale * (1 + ||scaled base||_inf)`.
    pub(crate) fn new(base: SymMatrix, dirs: Vec<SymMatrix>, scale: f64) -> Block {
        let order = base.order();
        let weights: Vec<f64> = (0..order)
            .map(|i| {
                let d = base.get(i, i);
                if d > f64::MIN_POSITIVE {
                    1.0 / d.sqrt()
                } else {
                    1.0
                }
            })
            .collect();
        let congruence = |m: &SymMatrix| SymMatrix::from_fn(order, |i, j| m.get(i, j) * weights[i] * weights[j]);
        let base = congruence(&base);
        let dirs = dirs.iter().map(congruence).collect();
        let tol = scale * (1.0 + base.norm_inf());
        Block { base, dirs, tol }
    }
}

pub(crate) enum Verdict {
    /// A point of the box with nonnegative margin.
    Feasible(Vec<f64>),
    /// The margin is negative everywhere on the box.
    Infeasible,
    /// Iteration budget exhausted; carries the best point seen.
    Undecided(Vec<f64>),
}

/// Affine LMI family over the box `[lo, hi]`; `center` is the expansion
/// point of every block.
pub(crate) struct BoxLmi<'a> {
    pub center: &'a [f64],
    pub lo: &'a [f64],
    pub hi: &'a [f64],
    pub blocks: Vec<Block>,
}

impl BoxLmi<'_> {
    fn margin(&self, x: &[f64]) -> (f64, Vec<f64>) {
        let mut worst = f64::INFINITY;
        let mut gradient = vec![0.0; x.len()];
        for block in &self.blocks {
            let mut a = block.base.clone();
            for (i, dir) in block.dirs.iter().enumerate() {
                let step = x[i] - self.center[i];
                if step != 0.0 {
                    a = a.combine(1.0, dir, step);
                }
            }
            let eig = match eigensolve(&a) {
                Ok(e) => e,
                Err(_) => return (f64::NEG_INFINITY, gradient),
            };
            let value = eig.values[0] + block.tol;
            if value < worst {
                worst = value;
                let v = eig.vector(0);
                for (g, dir) in gradient.iter_mut().zip(&block.dirs) {
                    let dv = dir.mul_vec(&v);
                    *g = v.iter().zip(&dv).map(|(p, q)| p * q).sum();
                }
            }
        }
        (worst, gradient)
    }

    /// Decides whether some point of the box has nonnegative margin.
    /// `evaluations` counts margin evaluations.
    pub(crate) fn solve(&self, evaluations: &mut usize) -> Verdict {
        let d = self.lo.len();
        let mid: Vec<f64> = self.lo.iter().zip(self.hi).map(|(a, b)| 0.5 * (a + b)).collect();
        if d == 0 {
            *evaluations += 1;
            return if self.margin(&mid).0 >= 0.0 { Verdict::Feasible(mid) } else { Verdict::Infeasible };
        }

        let mut x = mid;
        let mut p = vec![0.0; d * d];
        for i in 0..d {
            let half = 0.5 * (self.hi[i] - self.lo[i]);
            p[i * d + i] = d as f64 * half * half;
        }
        let max_iterations = 100 + 60 * d * (d + 1);
        let mut best: Option<(f64, Vec<f64>)> = None;
        let mut ceiling = f64::INFINITY;

        for _ in 0..max_iterations {
            let outside = (0..d).find_map(|i| {
                if x[i] > self.hi[i] {
                    Some((i, 1.0))
                } else if x[i] < self.lo[i] {
                    Some((i, -1.0))
                } else {
                    None
                }
            });
            // cut keeps { z : a . (z - x) <= 0 }
            let a: Vec<f64> = match outside {
                Some((i, sign)) => (0..d).map(|j| if j == i { sign } else { 0.0 }).collect(),
                None => {
                    *evaluations += 1;
                    let (g, s) = self.margin(&x);
                    if g >= 0.0 {
                        return Verdict::Feasible(x);
                    }
                    if best.as_ref().map_or(true, |(b, _)| g > *b) {
                        best = Some((g, x.clone()));
                    }
                    let spread = quad(&p, &s, d).max(0.0).sqrt();
                    ceiling = ceiling.min(g + spread);
                    if ceiling < 0.0 || !g.is_finite() || spread == 0.0 {
                        return Verdict::Infeasible;
                    }
                    s.iter().map(|v| -v).collect()
                }
            };

            let pa: Vec<f64> = (0..d).map(|i| (0..d).map(|j| p[i * d + j] * a[j]).sum()).collect();
            let denom = quad(&p, &a, d);
            if !(denom > 0.0) {
                break;
            }
            let gt: Vec<f64> = pa.iter().map(|v| v / denom.sqrt()).collect();
            if d == 1 {
                x[0] -= 0.5 * gt[0];
                p[0] *= 0.25;
            } else {
                let df = d as f64;
                for i in 0..d {
                    x[i] -= gt[i] / (df + 1.0);
                }
                let grow = df * df / (df * df - 1.0);
                let shrink = 2.0 / (df + 1.0);
                for i in 0..d {
                    for j in 0..=i {
                        let v = grow * (p[i * d + j] - shrink * gt[i] * gt[j]);
                        p[i * d + j] = v;
                        p[j * d + i] = v;
                    }
                }
            }
        }
        Verdict::Undecided(best.map(|(_, x)| x).unwrap_or_else(|| self.center.to_vec()))
    }
}

fn quad(p: &[f64], v: &[f64], d: usize) -> f64 {
    let mut acc = 0.0;
    for i in 0..d {
        for j in 0..d {
            acc += v[i] * p[i * d + j] * v[j];
        }
    }
    acc
}
