//! Empirical-distribution utilities: exact Wasserstein-1 distance,
//! quantiles, Hill tail-index estimation, and tail-ratio diagnostics.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum StatsError {
    #[error("empirical distribution requires at least one sample")]
    Empty,
    #[error("samples must be finite, found {0}")]
    NonFinite(f64),
    #[error("hill estimator needs 1 <= k < count, got k={k} count={count}")]
    InvalidK { k: usize, count: usize },
    #[error("hill estimator needs strictly positive samples in the top-k window, found {0}")]
    NonPositiveTail(f64),
    #[error("hill estimator undefined: zero log-spacings in the top-k window")]
    DegenerateTail,
    #[error("tail-ratio grid probabilities must lie in (0, 0.5), got {0}")]
    InvalidGridProbability(f64),
}

/// A sorted sample vector treated as an empirical distribution.
#[derive(Clone, Debug)]
pub struct EmpiricalDistribution {
    sorted: Vec<f64>,
}

impl EmpiricalDistribution {
    /// Build from raw samples; sorts them and rejects empty or non-finite input.
    pub fn new(mut samples: Vec<f64>) -> Result<Self, StatsError> {
        if samples.is_empty() {
            return Err(StatsError::Empty);
        }
        if let Some(&bad) = samples.iter().find(|x| !x.is_finite()) {
            return Err(StatsError::NonFinite(bad));
        }
        samples.sort_by(|a, b| a.partial_cmp(b).expect("finite values compare"));
        Ok(Self { sorted: samples })
    }

    pub fn count(&self) -> usize {
        self.sorted.len()
    }

    pub fn sorted(&self) -> &[f64] {
        &self.sorted
    }

    pub fn mean(&self) -> f64 {
        self.sorted.iter().sum::<f64>() / self.sorted.len() as f64
    }

    pub fn min(&self) -> f64 {
        self.sorted[0]
    }

    pub fn max(&self) -> f64 {
        *self.sorted.last().expect("nonempty")
    }

    /// Generalized inverse CDF: smallest sample `x` with `F(x) >= u`, for `u` in (0, 1].
    pub fn quantile(&self, u: f64) -> f64 {
        assert!(u > 0.0 && u <= 1.0, "quantile level must be in (0,1]");
        let n = self.sorted.len();
        let idx = (u * n as f64).ceil() as usize;
        self.sorted[idx.clamp(1, n) - 1]
    }

    /// Empirical survival probability `P(sample > x)`.
    pub fn survival(&self, x: f64) -> f64 {
        let above = self.sorted.partition_point(|&v| v <= x);
        (self.sorted.len() - above) as f64 / self.sorted.len() as f64
    }
}

/// Exact Wasserstein-1 (Kantorovich-Rubinstein) distance between two
/// empirical distributions, computed as the integral of `|F_a - F_b|`
/// over the merged step functions.
///
/// For equal sample counts this reduces to the mean absolute difference of
/// paired order statistics.
pub fn wasserstein1(a: &EmpiricalDistribution, b: &EmpiricalDistribution) -> f64 {
    let (xa, xb) = (a.sorted(), b.sorted());
    let (na, nb) = (xa.len() as f64, xb.len() as f64);
    let (mut i, mut j) = (0usize, 0usize);
    let mut total = 0.0;
    let mut prev: Option<f64> = None;
    while i < xa.len() || j < xb.len() {
        let x = match (xa.get(i), xb.get(j)) {
            (Some(&u), Some(&v)) => u.min(v),
            (Some(&u), None) => u,
            (None, Some(&v)) => v,
            (None, None) => unreachable!(),
        };
        if let Some(p) = prev {
            total += (x - p) * (i as f64 / na - j as f64 / nb).abs();
        }
        while i < xa.len() && xa[i] == x {
            i += 1;
        }
        while j < xb.len() && xb[j] == x {
            j += 1;
        }
        prev = Some(x);
    }
    total
}

/// Result of a tail analysis: the Hill index and, when produced by
/// [`tail_ratio`]-style diagnostics, a survival-ratio curve.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TailReport {
    pub hill_index: f64,
    pub k_used: usize,
    pub ratio_curve: Vec<(f64, f64)>,
}

/// Classical Hill estimator on the `k` largest order statistics:
/// `alpha = k / sum_{i=1..k} ln(x_(n-i+1) / x_(n-k))`.
pub fn hill_index(d: &EmpiricalDistribution, k: usize) -> Result<TailReport, StatsError> {
    let n = d.count();
    if k == 0 || k >= n {
        return Err(StatsError::InvalidK { k, count: n });
    }
    let xs = d.sorted();
    let reference = xs[n - 1 - k];
    if reference <= 0.0 {
        return Err(StatsError::NonPositiveTail(reference));
    }
    let log_sum: f64 = xs[n - k..].iter().map(|&x| (x / reference).ln()).sum();
    if log_sum <= 0.0 {
        return Err(StatsError::DegenerateTail);
    }
    Ok(TailReport {
        hill_index: k as f64 / log_sum,
        k_used: k,
        ratio_curve: Vec::new(),
    })
}

/// Default Hill order-statistics count: the top 2.5% of the sample.
pub fn default_hill_k(count: usize) -> usize {
    ((0.025 * count as f64).ceil() as usize).clamp(1, count.saturating_sub(1))
}

/// Survival-ratio diagnostic: for each grid probability `p`, anchors
/// `x` at the reference's `(1-p)`-quantile and reports
/// `P(sample > x) / p`. Ratios near 1 mean matching tails; ratios
/// decaying with `p` mean the sample's tail is strictly lighter.
pub fn tail_ratio(
    sample: &EmpiricalDistribution,
    reference: &EmpiricalDistribution,
    quantile_grid: &[f64],
) -> Result<Vec<(f64, f64)>, StatsError> {
    let mut curve = Vec::with_capacity(quantile_grid.len());
    for &p in quantile_grid {
        if !(p > 0.0 && p < 0.5) {
            return Err(StatsError::InvalidGridProbability(p));
        }
        let x = reference.quantile(1.0 - p);
        curve.push((x, sample.survival(x) / p));
    }
    Ok(curve)
}
