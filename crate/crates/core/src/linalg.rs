//! Dense symmetric kernels: Jacobi eigensolver, tridiagonal QL eigenvalues,
//! semidefinite Cholesky test and the range-restricted generalized
//! eigenproblem.

use crate::error::{Error, Result};

/// Sweep cap for the cyclic Jacobi iteration.
pub const JACOBI_MAX_SWEEPS: usize = 100;

/// Iteration cap per eigenvalue in the implicit QL iteration.
const QL_MAX_ITERATIONS: usize = 60;

/// Relative scale of the default PSD tolerance: `1e-9 * (1 + ||M||_inf)`.
pub const DEFAULT_PSD_SCALE: f64 = 1e-9;

/// Dense symmetric matrix stored row-major with both triangles populated.
#[derive(Debug, Clone, PartialEq)]
pub struct SymMatrix {
    order: usize,
    data: Vec<f64>,
}

/// Eigenpairs with eigenvalues ascending; column `j` of `vectors` belongs to
/// `values[j]`.
#[derive(Debug, Clone)]
pub struct Eigen {
    pub values: Vec<f64>,
    vectors: Vec<f64>,
    order: usize,
}

impl Eigen {
    /// Entry `i` of eigenvector `j`.
    pub fn vector_entry(&self, i: usize, j: usize) -> f64 {
        self.vectors[i * self.order + j]
    }

    pub fn vector(&self, j: usize) -> Vec<f64> {
        (0..self.order).map(|i| self.vector_entry(i, j)).collect()
    }
}

impl SymMatrix {
    pub fn zeros(order: usize) -> Self {
        SymMatrix { order, data: vec![0.0; order * order] }
    }

    pub fn identity(order: usize) -> Self {
        let mut m = SymMatrix::zeros(order);
        for i in 0..order {
            m.data[i * order + i] = 1.0;
        }
        m
    }

    /// Builds from `f(i, j)` evaluated on the upper triangle and mirrored.
    pub fn from_fn(order: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut m = SymMatrix::zeros(order);
        for i in 0..order {
            for j in i..order {
                let v = f(i, j);
                m.data[i * order + j] = v;
                m.data[j * order + i] = v;
            }
        }
        m
    }

    /// Builds from rows; the upper triangle is authoritative.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let order = rows.len();
        if rows.iter().any(|r| r.len() != order) {
            return Err(Error::Range("matrix rows must form a square".into()));
        }
        let m = SymMatrix::from_fn(order, |i, j| rows[i][j]);
        if m.data.iter().any(|v| !v.is_finite()) {
            return Err(Error::Range("matrix entries must be finite".into()));
        }
        Ok(m)
    }

    #[inline]
    pub fn order(&self) -> usize {
        self.order
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.order + j]
    }

    /// Sets both `(i, j)` and `(j, i)`.
    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.order + j] = v;
        self.data[j * self.order + i] = v;
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.order..(i + 1) * self.order]
    }

    pub fn norm_inf(&self) -> f64 {
        (0..self.order)
            .map(|i| self.row(i).iter().map(|v| v.abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn frobenius(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn trace(&self) -> f64 {
        (0..self.order).map(|i| self.get(i, i)).sum()
    }

    /// `alpha * self + beta * other`.
    pub fn combine(&self, alpha: f64, other: &SymMatrix, beta: f64) -> SymMatrix {
        assert_eq!(self.order, other.order);
        SymMatrix {
            order: self.order,
            data: self.data.iter().zip(&other.data).map(|(a, b)| alpha * a + beta * b).collect(),
        }
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        (0..self.order).map(|i| dot(self.row(i), x)).collect()
    }

    /// Default absolute PSD tolerance for this matrix at relative `scale`.
    pub fn psd_tolerance(&self, scale: f64) -> f64 {
        scale * (1.0 + self.norm_inf())
    }
}

#[inline]
fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Full eigendecomposition by cyclic Jacobi rotations, run until the
/// off-diagonal Frobenius norm falls to `1e-12` of the matrix norm.
pub fn eigensolve(m: &SymMatrix) -> Result<Eigen> {
    let n = m.order;
    let mut a = m.data.clone();
    let mut v = SymMatrix::identity(n).data;
    let target = 1e-12 * m.frobenius();

    let off_norm = |a: &[f64]| -> f64 {
        let mut s = 0.0;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    s += a[i * n + j] * a[i * n + j];
                }
            }
        }
        s.sqrt()
    };

    let mut sweeps = 0;
    while off_norm(&a) > target {
        if sweeps == JACOBI_MAX_SWEEPS {
            return Err(Error::Convergence(JACOBI_MAX_SWEEPS));
        }
        sweeps += 1;
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[p * n + q];
                if apq == 0.0 {
                    continue;
                }
                let app = a[p * n + p];
                let aqq = a[q * n + q];
                let theta = (aqq - app) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[k * n + p];
                    let akq = a[k * n + q];
                    a[k * n + p] = c * akp - s * akq;
                    a[k * n + q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p * n + k];
                    let aqk = a[q * n + k];
                    a[p * n + k] = c * apk - s * aqk;
                    a[q * n + k] = s * apk + c * aqk;
                }
                a[p * n + q] = 0.0;
                a[q * n + p] = 0.0;
                for k in 0..n {
                    let vkp = v[k * n + p];
                    let vkq = v[k * n + q];
                    v[k * n + p] = c * vkp - s * vkq;
                    v[k * n + q] = s * vkp + c * vkq;
                }
            }
        }
    }

    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&i, &j| a[i * n + i].total_cmp(&a[j * n + j]));
    let values = idx.iter().map(|&i| a[i * n + i]).collect();
    let mut vectors = vec![0.0; n * n];
    for (col, &src) in idx.iter().enumerate() {
        for k in 0..n {
            vectors[k * n + col] = v[k * n + src];
        }
    }
    Ok(Eigen { values, vectors, order: n })
}

/// Eigenvalues only, ascending, via Householder tridiagonalization and the
/// implicit QL iteration. Intended for the large dense solves of the oracle;
/// only the lower triangle is read and updated, and the rank-two update of
/// each step is fused with the matrix-vector product of the next.
pub fn eigenvalues(m: &SymMatrix) -> Result<Vec<f64>> {
    let n = m.order;
    if n == 0 {
        return Ok(Vec::new());
    }
    let (mut d, mut e) = tridiagonalize(m.data.clone(), n);
    tridiagonal_ql(&mut d, &mut e)?;
    d.sort_by(f64::total_cmp);
    Ok(d)
}

/// Householder reflector for `x`: returns `(v, beta, alpha)` with
/// `(I - beta v v^T) x = alpha e_1`.
fn householder(x: &[f64]) -> (Vec<f64>, f64, f64) {
    let sigma = x.iter().map(|v| v * v).sum::<f64>().sqrt();
    let mut v = x.to_vec();
    if sigma == 0.0 {
        return (v, 0.0, 0.0);
    }
    let alpha = if x[0] >= 0.0 { -sigma } else { sigma };
    v[0] -= alpha;
    let vtv: f64 = v.iter().map(|t| t * t).sum();
    let beta = if vtv == 0.0 { 0.0 } else { 2.0 / vtv };
    (v, beta, alpha)
}

fn tridiagonalize(mut a: Vec<f64>, n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut d = vec![0.0; n];
    let mut e = vec![0.0; n];
    if n == 1 {
        d[0] = a[0];
        return (d, e);
    }
    if n == 2 {
        d[0] = a[0];
        d[1] = a[3];
        e[0] = a[2];
        return (d, e);
    }

    // Vectors are indexed globally; step k uses entries k+1..n.
    let mut v = vec![0.0; n];
    let mut w = vec![0.0; n];
    let mut p = vec![0.0; n];

    let x0: Vec<f64> = (1..n).map(|i| a[i * n]).collect();
    let (h, mut beta, alpha) = householder(&x0);
    v[1..].copy_from_slice(&h);
    e[0] = alpha;
    for i in 1..n {
        let row = &a[i * n..i * n + i + 1];
        let vi = v[i];
        let mut acc = 0.0;
        for j in 1..i {
            acc += row[j] * v[j];
            p[j] += row[j] * vi;
        }
        p[i] += acc + row[i] * vi;
    }
    for t in p.iter_mut() {
        *t *= beta;
    }

    for k in 0..n - 2 {
        d[k] = a[k * n + k];
        let lo = k + 1;
        let pv: f64 = (lo..n).map(|i| p[i] * v[i]).sum();
        let half = 0.5 * beta * pv;
        for i in lo..n {
            w[i] = p[i] - half * v[i];
        }

        let next = k + 1;
        let has_next = next + 2 < n;
        let mut vn = vec![0.0; n];
        let mut beta_next = 0.0;
        if has_next {
            let x: Vec<f64> = (next + 1..n)
                .map(|i| a[i * n + next] - v[i] * w[next] - w[i] * v[next])
                .collect();
            let (h, b, alpha) = householder(&x);
            vn[next + 1..].copy_from_slice(&h);
            beta_next = b;
            e[next] = alpha;
        }

        for t in p.iter_mut() {
            *t = 0.0;
        }
        for i in lo..n {
            let vi = v[i];
            let wi = w[i];
            let row = &mut a[i * n + lo..i * n + i + 1];
            let vs = &v[lo..=i];
            let ws = &w[lo..=i];
            for ((s, &vj), &wj) in row.iter_mut().zip(vs).zip(ws) {
                *s -= vi * wj + wi * vj;
            }
            if has_next && i > next {
                let start = next + 1;
                let row = &a[i * n + start..i * n + i + 1];
                let vni = vn[i];
                let mut acc = 0.0;
                let last = row.len() - 1;
                for (off, (&s, pj)) in row[..last].iter().zip(p[start..i].iter_mut()).enumerate() {
                    acc += s * vn[start + off];
                    *pj += s * vni;
                }
                p[i] += acc + row[last] * vni;
            }
        }

        if has_next {
            for t in p.iter_mut() {
                *t *= beta_next;
            }
        }
        v = vn;
        beta = beta_next;
    }

    d[n - 2] = a[(n - 2) * n + n - 2];
    d[n - 1] = a[(n - 1) * n + n - 1];
    e[n - 2] = a[(n - 1) * n + n - 2];
    (d, e)
}

/// Implicit QL with Wilkinson-type shifts on a symmetric tridiagonal matrix
/// (`d` diagonal, `e[i]` couples `i` and `i + 1`). Eigenvalues are left in `d`.
fn tridiagonal_ql(d: &mut [f64], e: &mut [f64]) -> Result<()> {
    let n = d.len();
    if n > 0 {
        e[n - 1] = 0.0;
    }
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > QL_MAX_ITERATIONS {
                return Err(Error::Convergence(QL_MAX_ITERATIONS));
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut deflated = false;
            let mut i = m;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    deflated = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
            }
            if deflated {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    Ok(())
}

/// True iff a semidefinite Cholesky factorization of `M + tol I` succeeds.
///
/// Zero pivots are accepted when the rest of their column is zero as well,
/// so singular PSD matrices pass at `tol = 0`.
pub fn is_psd(m: &SymMatrix, tol: f64) -> bool {
    let n = m.order;
    let mut l = vec![0.0; n * n];
    for j in 0..n {
        let mut pivot = m.get(j, j) + tol;
        for k in 0..j {
            pivot -= l[j * n + k] * l[j * n + k];
        }
        if !(pivot >= 0.0) {
            return false;
        }
        let root = pivot.sqrt();
        for i in j + 1..n {
            let mut s = m.get(i, j);
            for k in 0..j {
                s -= l[i * n + k] * l[j * n + k];
            }
            if root == 0.0 {
                if s != 0.0 {
                    return false;
                }
                l[i * n + j] = 0.0;
            } else {
                l[i * n + j] = s / root;
            }
        }
        l[j * n + j] = root;
    }
    true
}

/// Eigenvalues `x` of `det(A - x B) = 0` restricted to the range of the PSD
/// matrix `B`, ascending.
///
/// `B = Q diag(lambda) Q^T` is truncated to eigenvalues above
/// `1e-10 * lambda_max`, and the result is the spectrum of
/// `Lambda^{-1/2} Q^T A Q Lambda^{-1/2}` on those directions.
pub fn generalized_eigs(a: &SymMatrix, b: &SymMatrix) -> Result<Vec<f64>> {
    assert_eq!(a.order(), b.order());
    let n = b.order();
    let eig = eigensolve(b)?;
    let lambda_max = eig.values.iter().copied().fold(0.0, f64::max);
    if !(lambda_max > 0.0) {
        return Err(Error::Rank);
    }
    let cutoff = 1e-10 * lambda_max;
    let kept: Vec<usize> = (0..n).filter(|&j| eig.values[j] > cutoff).collect();
    let scaled: Vec<Vec<f64>> = kept
        .iter()
        .map(|&j| {
            let s = 1.0 / eig.values[j].sqrt();
            eig.vector(j).into_iter().map(|x| x * s).collect()
        })
        .collect();
    let reduced = SymMatrix::from_fn(kept.len(), |p, q| {
        let aq = a.mul_vec(&scaled[q]);
        dot(&scaled[p], &aq)
    });
    Ok(eigensolve(&reduced)?.values)
}
