//! Spectral radius bounds from truncated moment sequences.
//!
//! The lower bound is the smallest `x` with `x H_{2r} - H_{2r+1} >= 0`, i.e.
//! the largest generalized eigenvalue of `(H_{2r+1}, H_{2r})` on the range of
//! `H_{2r}`; PSD bisection recomputes it independently as a cross-check.
//!
//! The upper bound is the largest `y` for which the residual measure left
//! after removing an atom of mass `1/n` at `y` still has PSD moment matrices
//! supported on `[0, y]`. That feasible set need not contain the lower bound,
//! so a grid over `[beta, 2]` locates its top before bisection refines it.
//!
//! For interval-valued moments every constraint is affine in the moments at
//! a fixed candidate `x` (or `y`), so "some box point is feasible" is a
//! concave maximization over the box, decided exactly by an ellipsoid method.
//! The robust bounds bisect on the scalar around that test.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{eigensolve, generalized_eigs, is_psd, SymMatrix, DEFAULT_PSD_SCALE};
use crate::lmi::{Block, BoxLmi, Verdict};
use crate::moments::{MomentSequence, Provenance};

/// Bisection stops once the bracket is narrower than this.
const BISECTION_WIDTH: f64 = 1e-11;
const MAX_BISECTION_STEPS: usize = 200;
/// Grid intervals used to locate the upper feasible point on `[beta, 2]`.
const UPPER_GRID: usize = 256;
/// Upper search never looks beyond this value.
const UPPER_SEARCH_CAP: f64 = 64.0;
const UPPER_PROBES: i32 = 64;
/// Half-width, relative to `max(1, beta)`, of the window searched for a
/// point-like upper feasible set.
const PINNED_WINDOW: f64 = 1e-6;
const GOLDEN_STEPS: usize = 80;
/// Coarser grid for the robust upper search, where each test is a box solve.
const ROBUST_UPPER_GRID: usize = 64;
/// A-priori range of the normalized Laplacian spectrum.
const SPECTRUM_MAX: f64 = 2.0;

/// Relative tolerance of the PSD tests inside the bisections. Near a
/// single-point feasible set the constraint eigenvalue is tangent to zero,
/// so the bound moves by roughly `sqrt(tol)`; this keeps that below 1e-6.
pub const DEFAULT_FEASIBILITY_SCALE: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundOptions {
    /// Moment-feasibility gate: `H_{2r}` is accepted when `H + tol I` is PSD
    /// with `tol = psd_scale * (1 + ||H||_inf)`.
    pub psd_scale: f64,
    /// Same form of tolerance for the PSD tests driving both bisections.
    pub feasibility_scale: f64,
}

impl Default for BoundOptions {
    fn default() -> Self {
        BoundOptions { psd_scale: DEFAULT_PSD_SCALE, feasibility_scale: DEFAULT_FEASIBILITY_SCALE }
    }
}

/// Moment matrices `[H_{2r}]_{ij} = M_{i+j}` and `[H_{2r+1}]_{ij} = M_{i+j+1}`
/// (0-based), both of order `r + 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct HankelPair {
    pub r: usize,
    pub even: SymMatrix,
    pub odd: SymMatrix,
}

/// Hankel matrices of the residual measure for a candidate radius `y`:
/// `(n m_p - y^p) / (n - 1)`.
#[derive(Debug, Clone, PartialEq)]
pub struct TPair {
    pub r: usize,
    pub n: usize,
    pub y: f64,
    pub even: SymMatrix,
    pub odd: SymMatrix,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LowerBound {
    /// Bound clamped to `[0, 2]`.
    pub value: f64,
    pub preclamp: f64,
    /// Same bound found by PSD bisection, when the bracket could be formed.
    pub bisection: Option<f64>,
    pub iterations: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UpperBound {
    pub value: f64,
    pub preclamp: f64,
    pub iterations: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RobustBound {
    pub value: f64,
    pub preclamp: f64,
    pub confidence: f64,
    /// Constraint evaluations performed over the box.
    pub evaluations: usize,
    /// Moment vector `m_0..m_{2r+1}` attaining the bound.
    pub argopt: Vec<f64>,
    /// True when some box solve ran out of iterations undecided.
    pub capped: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundReport {
    pub lower: f64,
    pub upper: f64,
    pub r: usize,
    pub confidence: f64,
    pub diagnostics: Diagnostics,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Diagnostics {
    pub psd_tol: f64,
    pub feasibility_tol: f64,
    pub iterations: usize,
    pub preclamp_lower: f64,
    pub preclamp_upper: f64,
    pub status: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lower_bisection: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub box_evaluations: Option<usize>,
}

fn require_order(values: &[f64], r: usize) -> Result<()> {
    if values.len() < 2 * r + 2 {
        return Err(Error::OrderOutOfRange { k: 2 * r + 1, radius: r, max: values.len().saturating_sub(1) });
    }
    if r == 0 {
        return Err(Error::Range("bound order r must be at least 1".into()));
    }
    Ok(())
}

pub fn hankel_pair(values: &[f64], r: usize) -> Result<HankelPair> {
    require_order(values, r)?;
    Ok(HankelPair {
        r,
        even: SymMatrix::from_fn(r + 1, |i, j| values[i + j]),
        odd: SymMatrix::from_fn(r + 1, |i, j| values[i + j + 1]),
    })
}

pub fn t_pair(values: &[f64], n: usize, y: f64, r: usize) -> Result<TPair> {
    require_order(values, r)?;
    if n < 2 {
        return Err(Error::Range("upper bound needs a graph with at least 2 nodes".into()));
    }
    let nf = n as f64;
    let entry = |p: usize| (nf * values[p] - y.powi(p as i32)) / (nf - 1.0);
    Ok(TPair {
        r,
        n,
        y,
        even: SymMatrix::from_fn(r + 1, |i, j| entry(i + j)),
        odd: SymMatrix::from_fn(r + 1, |i, j| entry(i + j + 1)),
    })
}

fn psd(m: &SymMatrix, scale: f64) -> bool {
    is_psd(m, m.psd_tolerance(scale))
}

fn min_eigenvalue(m: &SymMatrix) -> f64 {
    eigensolve(m).map(|e| e.values[0]).unwrap_or(f64::NAN)
}

/// Unclamped lower bound from the generalized eigenproblem.
fn lower_value(values: &[f64], r: usize, scale: f64) -> Result<f64> {
    let h = hankel_pair(values, r)?;
    if !psd(&h.even, scale) {
        return Err(Error::InfeasibleMoments { min_eigenvalue: min_eigenvalue(&h.even) });
    }
    let eigs = generalized_eigs(&h.odd, &h.even)?;
    Ok(eigs.into_iter().fold(f64::NEG_INFINITY, f64::max))
}

/// Smallest `x` in `[0, 2]` (extended upward if needed) with
/// `x H_{2r} - H_{2r+1}` PSD, tested after symmetric diagonal scaling by
/// `diag(H_{2r})^{-1/2}`.
fn lower_by_bisection(h: &HankelPair, scale: f64) -> Option<(f64, usize)> {
    let order = h.even.order();
    let diag: Vec<f64> = (0..order).map(|i| h.even.get(i, i)).collect();
    let weights: Vec<f64> = if diag.iter().all(|&d| d > 0.0) {
        diag.iter().map(|d| 1.0 / d.sqrt()).collect()
    } else {
        vec![1.0; order]
    };
    let feasible = |x: f64| {
        let m = SymMatrix::from_fn(order, |i, j| {
            (x * h.even.get(i, j) - h.odd.get(i, j)) * weights[i] * weights[j]
        });
        min_eigenvalue(&m) + m.psd_tolerance(scale) >= 0.0
    };

    let mut lo = 0.0;
    let mut hi = SPECTRUM_MAX;
    if feasible(lo) {
        return Some((lo, 0));
    }
    while !feasible(hi) {
        lo = hi;
        hi *= 2.0;
        if hi > UPPER_SEARCH_CAP {
            return None;
        }
    }
    let mut steps = 0;
    while hi - lo > BISECTION_WIDTH && steps < MAX_BISECTION_STEPS {
        let mid = 0.5 * (lo + hi);
        if feasible(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
        steps += 1;
    }
    Some((hi, steps))
}

/// Eigenvalue test rather than Cholesky: the residual blocks are close to
/// rank deficient at the edge, where pivots lose more than the tolerance.
fn upper_feasible(values: &[f64], n: usize, y: f64, r: usize, scale: f64) -> bool {
    upper_margin(values, n, y, r, scale) >= 0.0
}

/// Smallest of `lambda_min + tol` over the three upper-program blocks.
fn upper_margin(values: &[f64], n: usize, y: f64, r: usize, scale: f64) -> f64 {
    let Ok(t) = t_pair(values, n, y, r) else {
        return f64::NEG_INFINITY;
    };
    let combined = t.even.combine(y, &t.odd, -1.0);
    [&t.even, &t.odd, &combined]
        .into_iter()
        .map(|m| min_eigenvalue(m) + m.psd_tolerance(scale))
        .fold(f64::INFINITY, f64::min)
}

/// When the moments pin the measure, the upper feasible set shrinks to a
/// point at the top atom, which can sit within rounding of `beta` on either
/// side or, when `beta` is weakened by a truncated direction, between grid
/// points. Near that point one block's margin rises and another's falls,
/// so a golden-section search for the largest margin lands on it. Windows
/// tried: around `beta`, then around the grid point of largest margin.
fn pinned_upper(values: &[f64], n: usize, r: usize, beta: f64, scale: f64) -> Option<(f64, usize)> {
    let margin = |y: f64| upper_margin(values, n, y, r, scale);
    let feasible = |y: f64| upper_feasible(values, n, y, r, scale);
    let width = PINNED_WINDOW * beta.max(1.0);
    let start = beta.max(0.0);
    let step = (SPECTRUM_MAX.max(start) - start) / UPPER_GRID as f64;
    let best = (0..=UPPER_GRID)
        .map(|i| start + step * i as f64)
        .map(|y| (y, margin(y)))
        .max_by(|a, b| a.1.total_cmp(&b.1))
        .map(|(y, _)| y)
        .unwrap_or(start);

    for (a, b) in [((beta - width).max(0.0), beta + width), ((best - step).max(0.0), best + step)] {
        if !(b > a) {
            continue;
        }
        let y = golden_max(&margin, a, b);
        if !feasible(y) || feasible(b) {
            continue;
        }
        let (mut lo, mut hi, mut steps) = (y, b, 0);
        while hi - lo > f64::EPSILON * hi && steps < MAX_BISECTION_STEPS {
            let mid = 0.5 * (lo + hi);
            if feasible(mid) {
                lo = mid;
            } else {
                hi = mid;
            }
            steps += 1;
        }
        return Some((lo, steps));
    }
    None
}

fn golden_max(f: &impl Fn(f64) -> f64, a: f64, b: f64) -> f64 {
    let ratio = 0.5 * (5f64.sqrt() - 1.0);
    let (mut a, mut b) = (a, b);
    let mut c = b - ratio * (b - a);
    let mut d = a + ratio * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..GOLDEN_STEPS {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - ratio * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + ratio * (b - a);
            fd = f(d);
        }
    }
    if fc >= fd {
        c
    } else {
        d
    }
}

/// Unclamped upper bound and the number of bisection steps.
fn upper_value(values: &[f64], n: usize, r: usize, beta: f64, scale: f64) -> Result<(f64, usize)> {
    t_pair(values, n, beta, r)?;
    match upper_search(beta, UPPER_GRID, |y| upper_feasible(values, n, y, r, scale)) {
        Err(err @ Error::NoFeasiblePoint { .. }) => pinned_upper(values, n, r, beta, scale).ok_or(err),
        other => other,
    }
}

/// Top of the feasible set of `feasible` above `start`: a descending grid
/// over `[start, max(2, start)]`, geometric probes toward `start` when the
/// grid misses, an upward walk when the ceiling itself is feasible, then
/// bisection. Returns the value and the bisection step count.
fn upper_search(beta: f64, grid: usize, mut feasible: impl FnMut(f64) -> bool) -> Result<(f64, usize)> {
    let start = beta.max(0.0);
    let end = SPECTRUM_MAX.max(start);
    let step = (end - start) / grid as f64;
    let top = (0..=grid)
        .rev()
        .map(|i| if i == grid { end } else { start + step * i as f64 })
        .find(|&y| feasible(y));

    let (mut lo, mut hi) = match top {
        Some(y) if y == end => {
            // feasible at the a-priori ceiling; walk upward to bracket the edge
            let mut lo = y;
            let mut stride = 0.25;
            loop {
                let hi = lo + stride;
                if hi > UPPER_SEARCH_CAP {
                    return Ok((UPPER_SEARCH_CAP, 0));
                }
                if !feasible(hi) {
                    break (lo, hi);
                }
                lo = hi;
                stride *= 2.0;
            }
        }
        Some(y) => (y, y + step),
        None => {
            // a feasible set narrower than the grid step hugs beta
            let probe = (1..=UPPER_PROBES)
                .map(|j| (start + step * 0.5f64.powi(j), start + step * 0.5f64.powi(j - 1)))
                .find(|&(y, _)| feasible(y));
            match probe {
                Some(bracket) => bracket,
                None => return Err(Error::NoFeasiblePoint { lower: start, upper: end }),
            }
        }
    };

    let mut steps = 0;
    while hi - lo > BISECTION_WIDTH && steps < MAX_BISECTION_STEPS {
        let mid = 0.5 * (lo + hi);
        if feasible(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
        steps += 1;
    }
    Ok((lo, steps))
}

fn clamp_spectrum(x: f64) -> f64 {
    x.clamp(0.0, SPECTRUM_MAX)
}

/// Lower bound on the spectral radius from the point values of `m`.
pub fn lower_bound(m: &MomentSequence, r: usize, opts: &BoundOptions) -> Result<LowerBound> {
    let values = m.values();
    let preclamp = lower_value(values, r, opts.psd_scale)?;
    let h = hankel_pair(values, r)?;
    let (bisection, iterations) = match lower_by_bisection(&h, opts.feasibility_scale) {
        Some((x, it)) => (Some(x), it),
        None => (None, 0),
    };
    Ok(LowerBound { value: clamp_spectrum(preclamp), preclamp, bisection, iterations })
}

/// Upper bound on the spectral radius of an `n`-node graph from the point
/// values of `m`.
pub fn upper_bound(m: &MomentSequence, n: usize, r: usize, opts: &BoundOptions) -> Result<UpperBound> {
    let values = m.values();
    let beta = lower_value(values, r, opts.psd_scale)?;
    let (preclamp, iterations) = upper_value(values, n, r, beta, opts.feasibility_scale)?;
    Ok(UpperBound { value: clamp_spectrum(preclamp), preclamp, iterations })
}

/// Plain lower and upper bounds on the point values of `m`.
pub fn spectral_bounds(m: &MomentSequence, r: usize, opts: &BoundOptions) -> Result<BoundReport> {
    let lower = lower_bound(m, r, opts)?;
    let upper = upper_bound(m, m.n(), r, opts)?;
    Ok(BoundReport {
        lower: lower.value,
        upper: upper.value.max(lower.value),
        r,
        confidence: if m.is_exact() { 1.0 } else { m.confidence() },
        diagnostics: Diagnostics {
            psd_tol: opts.psd_scale,
            feasibility_tol: opts.feasibility_scale,
            iterations: upper.iterations,
            preclamp_lower: lower.preclamp,
            preclamp_upper: upper.preclamp,
            status: "feasible".into(),
            lower_bisection: lower.bisection,
            box_evaluations: None,
        },
    })
}

fn point_values(m: &MomentSequence, r: usize) -> Result<Vec<f64>> {
    require_order(m.values(), r)?;
    Ok(m.values()[..=2 * r + 1].to_vec())
}

/// Confidence-box axes: estimated orders with a nonempty interval.
struct BoxAxes {
    orders: Vec<usize>,
    lo: Vec<f64>,
    hi: Vec<f64>,
    center: Vec<f64>,
}

fn box_axes(m: &MomentSequence, r: usize) -> BoxAxes {
    let mut axes = BoxAxes { orders: Vec::new(), lo: Vec::new(), hi: Vec::new(), center: Vec::new() };
    for k in 2..=2 * r + 1 {
        if m.provenance()[k] != Provenance::Estimated {
            continue;
        }
        let (lo, hi) = m.interval(k);
        if hi > lo {
            axes.orders.push(k);
            axes.lo.push(lo);
            axes.hi.push(hi);
            axes.center.push(m.value(k).clamp(lo, hi));
        }
    }
    axes
}

impl BoxAxes {
    fn point(&self, base: &[f64], x: &[f64]) -> Vec<f64> {
        let mut out = base.to_vec();
        for (&k, &v) in self.orders.iter().zip(x) {
            out[k] = v;
        }
        out
    }
}

/// `d H / d m_p` for a Hankel matrix with entries `m_{i + j + shift}`.
fn hankel_unit(order: usize, p: usize, shift: usize) -> SymMatrix {
    SymMatrix::from_fn(order, |i, j| if i + j + shift == p { 1.0 } else { 0.0 })
}

/// Accumulates verdicts of box LMI solves.
struct BoxRun<'a> {
    axes: &'a BoxAxes,
    base: Vec<f64>,
    evaluations: usize,
    undecided: bool,
}

impl BoxRun<'_> {
    /// `Some(point)` when some moment vector in the box satisfies every block;
    /// undecided solves count as feasible, which only loosens the bound.
    fn feasible(&mut self, blocks: Vec<Block>) -> Option<Vec<f64>> {
        let lmi = BoxLmi { center: &self.axes.center, lo: &self.axes.lo, hi: &self.axes.hi, blocks };
        match lmi.solve(&mut self.evaluations) {
            Verdict::Feasible(x) => Some(self.axes.point(&self.base, &x)),
            Verdict::Undecided(x) => {
                self.undecided = true;
                Some(self.axes.point(&self.base, &x))
            }
            Verdict::Infeasible => None,
        }
    }
}

fn center_values(base: &[f64], axes: &BoxAxes) -> Vec<f64> {
    axes.point(base, &axes.center)
}

fn gate_block(h: &HankelPair, orders: &[usize], scale: f64) -> Block {
    let size = h.even.order();
    Block::new(h.even.clone(), orders.iter().map(|&p| hankel_unit(size, p, 0)).collect(), scale)
}

/// Smallest lower bound over every moment vector in the confidence box:
/// the least `x` for which some box point has `H_{2r} >= 0` and
/// `x H_{2r} - H_{2r+1} >= 0`.
pub fn robust_lower_bound(m: &MomentSequence, r: usize, opts: &BoundOptions) -> Result<RobustBound> {
    let base = point_values(m, r)?;
    let axes = box_axes(m, r);
    if axes.orders.is_empty() {
        let value = lower_value(&base, r, opts.psd_scale)?;
        return Ok(RobustBound {
            value: clamp_spectrum(value),
            preclamp: value,
            confidence: m.confidence(),
            evaluations: 1,
            argopt: base,
            capped: false,
        });
    }

    let center = center_values(&base, &axes);
    let h = hankel_pair(&center, r)?;
    let size = h.even.order();
    let mut run = BoxRun { axes: &axes, base: base.clone(), evaluations: 0, undecided: false };
    if run.feasible(vec![gate_block(&h, &axes.orders, opts.psd_scale)]).is_none() {
        return Err(Error::EmptyBox);
    }

    let mut test = |x: f64| {
        let pencil = h.even.combine(x, &h.odd, -1.0);
        let dirs = axes.orders.iter().map(|&p| hankel_unit(size, p, 0).combine(x, &hankel_unit(size, p, 1), -1.0));
        run.feasible(vec![
            gate_block(&h, &axes.orders, opts.psd_scale),
            Block::new(pencil, dirs.collect(), opts.feasibility_scale),
        ])
    };

    let mut lo = 0.0;
    let mut hi = SPECTRUM_MAX;
    if let Some(point) = test(lo) {
        drop(test);
        return Ok(robust_result(0.0, point, m, &run));
    }
    let mut witness = test(hi);
    while witness.is_none() {
        lo = hi;
        hi *= 2.0;
        if hi > UPPER_SEARCH_CAP {
            return Err(Error::NoFeasiblePoint { lower: 0.0, upper: UPPER_SEARCH_CAP });
        }
        witness = test(hi);
    }
    let mut steps = 0;
    while hi - lo > BISECTION_WIDTH && steps < MAX_BISECTION_STEPS {
        let mid = 0.5 * (lo + hi);
        match test(mid) {
            Some(point) => {
                hi = mid;
                witness = Some(point);
            }
            None => lo = mid,
        }
        steps += 1;
    }
    drop(test);
    Ok(robust_result(hi, witness.expect("bracket top is feasible"), m, &run))
}

fn robust_result(value: f64, argopt: Vec<f64>, m: &MomentSequence, run: &BoxRun) -> RobustBound {
    RobustBound {
        value: clamp_spectrum(value),
        preclamp: value,
        confidence: m.confidence(),
        evaluations: run.evaluations,
        argopt,
        capped: run.undecided,
    }
}

/// Largest upper bound over every moment vector in the confidence box: the
/// greatest `y` for which some box point satisfies the three residual PSD
/// constraints.
pub fn robust_upper_bound(m: &MomentSequence, n: usize, r: usize, opts: &BoundOptions) -> Result<RobustBound> {
    let base = point_values(m, r)?;
    if n < 2 {
        return Err(Error::Range("upper bound needs a graph with at least 2 nodes".into()));
    }
    let axes = box_axes(m, r);
    if axes.orders.is_empty() {
        let beta = lower_value(&base, r, opts.psd_scale)?;
        let (value, _) = upper_value(&base, n, r, beta, opts.feasibility_scale)?;
        return Ok(RobustBound {
            value: clamp_spectrum(value),
            preclamp: value,
            confidence: m.confidence(),
            evaluations: 1,
            argopt: base,
            capped: false,
        });
    }

    let start = robust_lower_bound(m, r, opts)?.preclamp;
    let center = center_values(&base, &axes);
    let size = r + 1;
    let ratio = n as f64 / (n as f64 - 1.0);
    let mut run = BoxRun { axes: &axes, base: base.clone(), evaluations: 0, undecided: false };
    let mut witness: Option<(f64, Vec<f64>)> = None;
    let feasible = |y: f64, run: &mut BoxRun, witness: &mut Option<(f64, Vec<f64>)>| -> bool {
        let Ok(t) = t_pair(&center, n, y, r) else { return false };
        let even_dirs: Vec<SymMatrix> =
            axes.orders.iter().map(|&p| hankel_unit(size, p, 0).combine(ratio, &hankel_unit(size, p, 0), 0.0)).collect();
        let odd_dirs: Vec<SymMatrix> =
            axes.orders.iter().map(|&p| hankel_unit(size, p, 1).combine(ratio, &hankel_unit(size, p, 1), 0.0)).collect();
        let pencil_dirs = even_dirs.iter().zip(&odd_dirs).map(|(e, o)| e.combine(y, o, -1.0)).collect();
        let pencil = t.even.combine(y, &t.odd, -1.0);
        let blocks = vec![
            Block::new(t.even, even_dirs, opts.feasibility_scale),
            Block::new(t.odd, odd_dirs, opts.feasibility_scale),
            Block::new(pencil, pencil_dirs, opts.feasibility_scale),
        ];
        match run.feasible(blocks) {
            Some(point) => {
                if witness.as_ref().map_or(true, |(w, _)| y > *w) {
                    *witness = Some((y, point));
                }
                true
            }
            None => false,
        }
    };
    let (value, _) = upper_search(start, ROBUST_UPPER_GRID, |y| feasible(y, &mut run, &mut witness))?;
    let argopt = witness.map(|(_, p)| p).unwrap_or(center);
    Ok(robust_result(value, argopt, m, &run))
}

/// Robust lower and upper bounds holding with the sequence's confidence.
pub fn robust_bounds(m: &MomentSequence, r: usize, opts: &BoundOptions) -> Result<BoundReport> {
    let lower = robust_lower_bound(m, r, opts)?;
    let upper = robust_upper_bound(m, m.n(), r, opts)?;
    let status = if lower.capped || upper.capped { "descent_capped" } else { "feasible" };
    Ok(BoundReport {
        lower: lower.value,
        upper: upper.value.max(lower.value),
        r,
        confidence: m.confidence(),
        diagnostics: Diagnostics {
            psd_tol: opts.psd_scale,
            feasibility_tol: opts.feasibility_scale,
            iterations: 0,
            preclamp_lower: lower.preclamp,
            preclamp_upper: upper.preclamp,
            status: status.into(),
            lower_bisection: None,
            box_evaluations: Some(lower.evaluations + upper.evaluations),
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn exact(values: &[f64], n: usize) -> MomentSequence {
        MomentSequence::exact(n, values.to_vec()).unwrap()
    }

    const K2: [f64; 4] = [1.0, 1.0, 2.0, 4.0];
    const K3: [f64; 4] = [1.0, 1.0, 1.5, 2.25];
    const P3: [f64; 4] = [1.0, 1.0, 5.0 / 3.0, 3.0];

    #[test]
    fn hankel_layout() {
        let h = hankel_pair(&[1.0, 1.0, 2.0, 3.0, 4.0, 5.0], 2).unwrap();
        assert_eq!(h.even.row(2), &[2.0, 3.0, 4.0]);
        assert_eq!(h.odd.row(0), &[1.0, 2.0, 3.0]);
        assert_eq!(h.odd.row(2), &[3.0, 4.0, 5.0]);
        assert!(hankel_pair(&[1.0, 1.0, 2.0], 1).is_err());
    }

    #[test]
    fn t_layout() {
        let t = t_pair(&K2, 2, 2.0, 1).unwrap();
        assert_eq!(t.even.row(0), &[1.0, 0.0]);
        assert_eq!(t.even.row(1), &[0.0, 0.0]);
        assert_eq!(t.odd.row(0), &[0.0, 0.0]);
        assert!(t_pair(&K2, 1, 2.0, 1).is_err());
    }

    #[test]
    fn lower_closed_forms() {
        let opts = BoundOptions::default();
        let b = lower_bound(&exact(&K2, 2), 1, &opts).unwrap();
        assert!((b.value - 2.0).abs() < 1e-9);
        let b = lower_bound(&exact(&K3, 3), 1, &opts).unwrap();
        assert!((b.value - 1.5).abs() < 1e-9);
        let b = lower_bound(&exact(&P3, 3), 1, &opts).unwrap();
        assert!((b.value - (1.0 + (2.0f64 / 3.0).sqrt())).abs() < 1e-9);
        assert!((b.bisection.unwrap() - b.preclamp).abs() < 1e-7);
    }

    #[test]
    fn upper_closed_forms() {
        let opts = BoundOptions::default();
        for (values, n, want) in [(K2, 2, 2.0), (K3, 3, 1.5), (P3, 3, 2.0)] {
            let u = upper_bound(&exact(&values, n), n, 1, &opts).unwrap();
            assert!((u.value - want).abs() < 1e-6, "{values:?}: {u:?}");
        }
    }

    #[test]
    fn infeasible_moments_rejected() {
        // m_2 < m_1^2 makes H_2 indefinite
        let m = exact(&[1.0, 1.0, 0.5, 0.5], 5);
        assert!(matches!(lower_bound(&m, 1, &BoundOptions::default()), Err(Error::InfeasibleMoments { .. })));
        assert!(matches!(upper_bound(&m, 5, 1, &BoundOptions::default()), Err(Error::InfeasibleMoments { .. })));
    }

    #[test]
    fn report_json_shape() {
        let report = spectral_bounds(&exact(&P3, 3), 1, &BoundOptions::default()).unwrap();
        let v = serde_json::to_value(&report).unwrap();
        for key in ["lower", "upper", "r", "confidence"] {
            assert!(v.get(key).is_some());
        }
        for key in ["psd_tol", "iterations", "preclamp_lower", "preclamp_upper"] {
            assert!(v["diagnostics"].get(key).is_some());
        }
    }

    #[test]
    fn zero_width_box_is_a_point() {
        let m = MomentSequence::new(
            2,
            K2.to_vec(),
            vec![0.0; 4],
            vec![Provenance::Exact, Provenance::Exact, Provenance::Estimated, Provenance::Estimated],
            Some(3),
            0.9,
        )
        .unwrap();
        let opts = BoundOptions::default();
        let lo = robust_lower_bound(&m, 1, &opts).unwrap();
        assert_eq!(lo.evaluations, 1);
        assert_eq!(lo.preclamp, lower_value(&K2, 1, opts.psd_scale).unwrap());
        assert_eq!(lo.confidence, 0.9);
    }

    #[test]
    fn k2_widened_box() {
        let m = MomentSequence::new(
            2,
            K2.to_vec(),
            vec![0.0, 0.0, 0.1, 0.1],
            vec![Provenance::Exact, Provenance::Exact, Provenance::Estimated, Provenance::Estimated],
            Some(3),
            0.9,
        )
        .unwrap();
        let opts = BoundOptions::default();
        let lo = robust_lower_bound(&m, 1, &opts).unwrap();
        let reference = lower_value(&[1.0, 1.0, 1.9, 3.9], 1, opts.psd_scale).unwrap();
        assert!(lo.value <= 2.0);
        assert!(lo.preclamp <= reference + 1e-12);
    }

    #[test]
    fn empty_box() {
        // every point of the box violates m_2 >= m_1^2
        let m = MomentSequence::new(
            4,
            vec![1.0, 1.0, 0.3, 0.3],
            vec![0.0, 0.0, 0.1, 0.1],
            vec![Provenance::Exact, Provenance::Exact, Provenance::Estimated, Provenance::Estimated],
            Some(3),
            0.9,
        )
        .unwrap();
        assert_eq!(robust_lower_bound(&m, 1, &BoundOptions::default()).unwrap_err(), Error::EmptyBox);
    }

    fn boxed(values: &[f64], n: usize, width: f64) -> MomentSequence {
        let len = values.len();
        let provenance = (0..len).map(|k| if k >= 2 { Provenance::Estimated } else { Provenance::Exact }).collect();
        let widths = (0..len).map(|k| if k >= 2 { width } else { 0.0 }).collect();
        MomentSequence::new(n, values.to_vec(), widths, provenance, Some(100), 0.95).unwrap()
    }

    #[test]
    fn c4_box_reaches_the_ceiling() {
        // C4 spectrum {0, 1, 1, 2}
        let c4 = [1.0, 1.0, 1.5, 2.5];
        let up = robust_upper_bound(&boxed(&c4, 4, 0.05), 4, 1, &BoundOptions::default()).unwrap();
        assert!(up.preclamp >= 2.0);
        assert_eq!(up.value, 2.0);
    }

    #[test]
    fn robust_brackets_plain() {
        let opts = BoundOptions::default();
        for (values, n) in [(P3, 3), ([1.0, 1.0, 1.5, 2.5], 4), ([1.0, 1.0, 1.25, 1.75], 8)] {
            let plain = spectral_bounds(&exact(&values, n), 1, &opts).unwrap();
            let robust = robust_bounds(&boxed(&values, n, 0.02), 1, &opts).unwrap();
            assert!(robust.lower <= plain.lower + 1e-9, "{values:?}");
            assert!(robust.upper >= plain.upper - 1e-9, "{values:?}");
            assert!(robust.diagnostics.box_evaluations.unwrap() > 0);
        }
    }

    #[test]
    fn witness_lies_in_box() {
        let m = boxed(&K2, 2, 0.1);
        let lo = robust_lower_bound(&m, 1, &BoundOptions::default()).unwrap();
        for k in 2..=3 {
            let (a, b) = m.interval(k);
            assert!(lo.argopt[k] >= a - 1e-12 && lo.argopt[k] <= b + 1e-12);
        }
        assert!(!lo.capped);
    }
}
