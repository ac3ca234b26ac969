//! Truncated spectral moment sequences with per-entry provenance.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Provenance {
    Exact,
    Estimated,
}

/// Moments `m_0..=m_K` of a normalized Laplacian, each either exact or a
/// sampled estimate with a confidence half-width.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentSequence {
    n: usize,
    values: Vec<f64>,
    half_widths: Vec<f64>,
    provenance: Vec<Provenance>,
    sample_size: Option<usize>,
    confidence: f64,
}

#[derive(Serialize, Deserialize)]
struct MomentRecord {
    n: usize,
    #[serde(rename = "K")]
    max_order: usize,
    values: Vec<f64>,
    half_widths: Vec<f64>,
    provenance: Vec<Provenance>,
    sample_size: Option<usize>,
    confidence: f64,
}

/// Upper end of the a-priori range of `m_k`.
pub fn moment_ceiling(k: usize) -> f64 {
    if k == 0 {
        1.0
    } else {
        2f64.powi(k as i32 - 1)
    }
}

impl MomentSequence {
    /// An all-exact sequence. `values[0]` and `values[1]` must both be 1.
    pub fn exact(n: usize, values: Vec<f64>) -> Result<MomentSequence> {
        let len = values.len();
        MomentSequence::new(n, values, vec![0.0; len], vec![Provenance::Exact; len], None, 1.0)
    }

    pub fn new(
        n: usize,
        values: Vec<f64>,
        half_widths: Vec<f64>,
        provenance: Vec<Provenance>,
        sample_size: Option<usize>,
        confidence: f64,
    ) -> Result<MomentSequence> {
        let len = values.len();
        if len < 2 {
            return Err(Error::Range("a moment sequence needs at least m_0 and m_1".into()));
        }
        if half_widths.len() != len || provenance.len() != len {
            return Err(Error::Range("values, half_widths and provenance differ in length".into()));
        }
        if values[0] != 1.0 || values[1] != 1.0 {
            return Err(Error::Range("m_0 and m_1 of a normalized Laplacian are both 1".into()));
        }
        if provenance[0] != Provenance::Exact || provenance[1] != Provenance::Exact {
            return Err(Error::Range("m_0 and m_1 are always exact".into()));
        }
        if values.iter().chain(&half_widths).any(|v| !v.is_finite())
            || half_widths.iter().any(|&t| t < 0.0)
        {
            return Err(Error::Range("moments must be finite with nonnegative half-widths".into()));
        }
        if !(0.0..=1.0).contains(&confidence) {
            return Err(Error::Range(format!("confidence {confidence} outside [0, 1]")));
        }
        Ok(MomentSequence { n, values, half_widths, provenance, sample_size, confidence })
    }

    /// Node count of the source graph.
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn max_order(&self) -> usize {
        self.values.len() - 1
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn value(&self, k: usize) -> f64 {
        self.values[k]
    }

    pub fn half_widths(&self) -> &[f64] {
        &self.half_widths
    }

    pub fn provenance(&self) -> &[Provenance] {
        &self.provenance
    }

    pub fn sample_size(&self) -> Option<usize> {
        self.sample_size
    }

    pub fn confidence(&self) -> f64 {
        self.confidence
    }

    pub fn is_exact(&self) -> bool {
        self.provenance.iter().all(|&p| p == Provenance::Exact)
    }

    /// Orders whose entries are sampled estimates.
    pub fn estimated_orders(&self) -> Vec<usize> {
        (0..self.values.len()).filter(|&k| self.provenance[k] == Provenance::Estimated).collect()
    }

    /// Confidence interval for `m_k`, intersected with `[0, 2^{k-1}]`.
    /// When the raw interval misses that range entirely it collapses onto the
    /// nearest endpoint.
    pub fn interval(&self, k: usize) -> (f64, f64) {
        let ceiling = moment_ceiling(k);
        let lo = (self.values[k] - self.half_widths[k]).clamp(0.0, ceiling);
        let hi = (self.values[k] + self.half_widths[k]).clamp(0.0, ceiling);
        (lo, hi)
    }

    /// Same sequence with replaced half-widths (exact entries stay at zero).
    pub fn with_half_widths(&self, half_widths: Vec<f64>) -> Result<MomentSequence> {
        let widths = half_widths
            .into_iter()
            .zip(&self.provenance)
            .map(|(t, &p)| if p == Provenance::Exact { 0.0 } else { t })
            .collect();
        MomentSequence::new(
            self.n,
            self.values.clone(),
            widths,
            self.provenance.clone(),
            self.sample_size,
            self.confidence,
        )
    }

    /// First `order + 1` entries.
    pub fn truncated(&self, order: usize) -> Result<MomentSequence> {
        if order > self.max_order() {
            return Err(Error::Range(format!("cannot truncate order {} to {order}", self.max_order())));
        }
        let len = order + 1;
        let estimated = self.provenance[..len].contains(&Provenance::Estimated);
        MomentSequence::new(
            self.n,
            self.values[..len].to_vec(),
            self.half_widths[..len].to_vec(),
            self.provenance[..len].to_vec(),
            if estimated { self.sample_size } else { None },
            if estimated { self.confidence } else { 1.0 },
        )
    }
}

impl Serialize for MomentSequence {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        MomentRecord {
            n: self.n,
            max_order: self.max_order(),
            values: self.values.clone(),
            half_widths: self.half_widths.clone(),
            provenance: self.provenance.clone(),
            sample_size: self.sample_size,
            confidence: self.confidence,
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for MomentSequence {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let r = MomentRecord::deserialize(deserializer)?;
        if r.values.len() != r.max_order + 1 {
            return Err(serde::de::Error::custom("K does not match the number of values"));
        }
        MomentSequence::new(r.n, r.values, r.half_widths, r.provenance, r.sample_size, r.confidence)
            .map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_wrong_leading_moments() {
        assert!(MomentSequence::exact(3, vec![1.0, 0.9, 1.5]).is_err());
        assert!(MomentSequence::exact(3, vec![1.0]).is_err());
    }

    #[test]
    fn interval_clamps_to_feasible_range() {
        let m = MomentSequence::new(
            10,
            vec![1.0, 1.0, 1.9, 0.1],
            vec![0.0, 0.0, 0.5, 0.5],
            vec![Provenance::Exact, Provenance::Exact, Provenance::Estimated, Provenance::Estimated],
            Some(5),
            0.9,
        )
        .unwrap();
        assert_eq!(m.interval(2), (1.4, 2.0));
        assert_eq!(m.interval(3), (0.0, 0.6));
        assert_eq!(m.estimated_orders(), vec![2, 3]);
    }

    #[test]
    fn json_uses_capital_k() {
        let m = MomentSequence::exact(3, vec![1.0, 1.0, 1.5]).unwrap();
        let v = serde_json::to_value(&m).unwrap();
        assert_eq!(v["K"], 2);
        assert_eq!(v["provenance"][2], "exact");
        assert!(v["sample_size"].is_null());
        let back: MomentSequence = serde_json::from_value(v).unwrap();
        assert_eq!(back, m);
    }
}
