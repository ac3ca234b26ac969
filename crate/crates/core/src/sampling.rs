//! Uniform node sampling, the sampled moment estimator, and Hoeffding-based
//! sample planning.
//!
//! Every phi value lies in `[0, 2^{k-1}]`, so Hoeffding's inequality gives
//! `P(|m~_k - m_k| >= t) <= 2 exp(-8 t^2 |S| / 4^k)` for a uniform sample of
//! independent draws.
//!
//! Samples are drawn from ChaCha8 (`rand_chacha`) seeded with
//! `seed_from_u64`; with-replacement draws use `gen_range(0..n)` and
//! without-replacement draws use `rand::seq::index::sample`.

use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::laplacian::{average_rows, exact_moments, phi_table};
use crate::moments::{moment_ceiling, MomentSequence, Provenance};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SampleMode {
    #[default]
    WithReplacement,
    WithoutReplacement,
}

/// Sample count meeting a normalized error `epsilon = t_k / 2^{k-1}` with
/// failure probability at most `delta` for one moment order.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SamplePlan {
    pub epsilon: f64,
    pub delta: f64,
    pub samples: usize,
}

/// How confidence half-widths are assigned to estimated orders.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum IntervalSpec {
    /// All estimated orders hold jointly with probability at least
    /// `confidence`, splitting the failure budget evenly by a union bound.
    Joint { confidence: f64 },
    /// Each estimated order gets `t_k = epsilon 2^{k-1}` and fails with
    /// probability at most `delta`; the reported joint confidence is
    /// `max(0, 1 - q delta)` over `q` estimated orders.
    PerMoment { epsilon: f64, delta: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EstimateConfig {
    pub radius: usize,
    pub intervals: IntervalSpec,
    /// Orders `<= exact_up_to` are computed exactly over the whole graph
    /// instead of estimated.
    pub exact_up_to: Option<usize>,
}

pub fn sample_nodes(g: &Graph, count: usize, seed: u64, mode: SampleMode) -> Result<Vec<usize>> {
    let n = g.n();
    if count == 0 {
        return Err(Error::Range("sample size must be at least 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    match mode {
        SampleMode::WithReplacement => Ok((0..count).map(|_| rng.gen_range(0..n)).collect()),
        SampleMode::WithoutReplacement => {
            if count > n {
                return Err(Error::SampleTooLarge { count, n });
            }
            Ok(index::sample(&mut rng, n, count).into_vec())
        }
    }
}

/// Hoeffding half-width for order `k` when `orders` moments must hold
/// jointly at `confidence`: `2^{k-1} / sqrt(2|S|) * sqrt(ln(2 orders / (1 - confidence)))`.
///
/// With `orders = 2r` this is the usual width for estimating `m_2..m_{2r+1}`.
pub fn joint_half_width(k: usize, sample_size: usize, orders: usize, confidence: f64) -> f64 {
    let log_term = (2.0 * orders as f64 / (1.0 - confidence)).ln();
    moment_ceiling(k) / (2.0 * sample_size as f64).sqrt() * log_term.sqrt()
}

fn check_confidence(confidence: f64) -> Result<()> {
    if confidence > 0.0 && confidence < 1.0 {
        Ok(())
    } else {
        Err(Error::ConfidenceRange(confidence))
    }
}

fn check_plan_inputs(epsilon: f64, delta: f64) -> Result<()> {
    if !(epsilon > 0.0 && epsilon <= 1.0) {
        return Err(Error::Range(format!("epsilon must lie in (0, 1], got {epsilon}")));
    }
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::Range(format!("delta must lie in (0, 1), got {delta}")));
    }
    Ok(())
}

/// Sampled moments `m~_k` for `k <= 2r + 1` with confidence half-widths for
/// the joint confidence `confidence`.
pub fn estimate_moments(g: &Graph, sample: &[usize], radius: usize, confidence: f64) -> Result<MomentSequence> {
    estimate_moments_with(
        g,
        sample,
        &EstimateConfig { radius, intervals: IntervalSpec::Joint { confidence }, exact_up_to: None },
    )
}

pub fn estimate_moments_with(g: &Graph, sample: &[usize], config: &EstimateConfig) -> Result<MomentSequence> {
    let radius = config.radius;
    if radius < 1 {
        return Err(Error::Range("estimation radius must be at least 1".into()));
    }
    if sample.is_empty() {
        return Err(Error::Range("sample must contain at least one node".into()));
    }
    match config.intervals {
        IntervalSpec::Joint { confidence } => check_confidence(confidence)?,
        IntervalSpec::PerMoment { epsilon, delta } => check_plan_inputs(epsilon, delta)?,
    }
    if let Some(&bad) = sample.iter().find(|&&i| i >= g.n()) {
        return Err(Error::Index { index: bad, n: g.n() });
    }

    let max_order = 2 * radius + 1;
    let exact_up_to = config.exact_up_to.unwrap_or(1).clamp(1, max_order);

    let mut values = vec![1.0; max_order + 1];
    let mut provenance = vec![Provenance::Exact; max_order + 1];
    let mut half_widths = vec![0.0; max_order + 1];
    if exact_up_to >= 2 {
        let exact = exact_moments(g, exact_up_to)?;
        values[..=exact_up_to].copy_from_slice(exact.values());
    }

    let estimated: Vec<usize> = (exact_up_to + 1..=max_order).collect();
    if estimated.is_empty() {
        return MomentSequence::exact(g.n(), values);
    }

    let rows = phi_table(g, sample, radius, max_order)?;
    let averages = average_rows(&rows, max_order);
    let q = estimated.len();
    let s = sample.len();
    let confidence = match config.intervals {
        IntervalSpec::Joint { confidence } => confidence,
        IntervalSpec::PerMoment { delta, .. } => (1.0 - q as f64 * delta).max(0.0),
    };
    for &k in &estimated {
        values[k] = averages[k - 1];
        provenance[k] = Provenance::Estimated;
        half_widths[k] = match config.intervals {
            IntervalSpec::Joint { confidence } => joint_half_width(k, s, q, confidence),
            IntervalSpec::PerMoment { epsilon, .. } => epsilon * moment_ceiling(k),
        };
    }
    MomentSequence::new(g.n(), values, half_widths, provenance, Some(s), confidence)
}

/// `s = ceil(epsilon^{-2} ln(2 / delta) / 2)`.
pub fn plan_sample_size(epsilon: f64, delta: f64) -> Result<SamplePlan> {
    check_plan_inputs(epsilon, delta)?;
    let raw = 0.5 * (2.0 / delta).ln() / (epsilon * epsilon);
    // absorb a few ulps of rounding so exact integers are not bumped up
    let samples = (raw * (1.0 - 4.0 * f64::EPSILON)).ceil().max(1.0) as usize;
    Ok(SamplePlan { epsilon, delta, samples })
}

/// Hoeffding tail `min(1, 2 exp(-8 t^2 |S| / 4^k))`.
pub fn failure_probability(t: f64, k: usize, sample_size: usize) -> Result<f64> {
    if !(t > 0.0) || k < 1 || sample_size < 1 {
        return Err(Error::Range("failure probability needs t > 0, k >= 1 and a nonempty sample".into()));
    }
    let exponent = -8.0 * t * t * sample_size as f64 / 4f64.powi(k as i32);
    Ok((2.0 * exponent.exp()).min(1.0))
}
