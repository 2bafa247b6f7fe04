//! Tukey box-plot statistics over PEB samples.

use serde::{Deserialize, Serialize};

use super::{PebSampleSet, ScenarioError};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryStats {
    pub n_samples: usize,
    pub n_valid: usize,
    pub mean: f64,
    pub median: f64,
    pub q1: f64,
    pub q3: f64,
    pub whisker_low: f64,
    pub whisker_high: f64,
    pub outlier_count: usize,
    pub degenerate_count: usize,
    pub error_count: usize,
}

/// Quantile by linear interpolation between order statistics at
/// position `p * (n - 1)`. `sorted` must be ascending and non-empty.
pub fn quantile(sorted: &[f64], p: f64) -> f64 {
    let pos = p * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    let w = pos - lo as f64;
    sorted[lo] + w * (sorted[hi] - sorted[lo])
}

/// Statistics over finite values; degenerate and error counts are passed through.
pub fn summarize_values(
    values: &[f64],
    degenerate_count: usize,
    error_count: usize,
) -> Result<SummaryStats, ScenarioError> {
    let mut sorted: Vec<f64> = values.iter().copied().filter(|v| v.is_finite()).collect();
    if sorted.is_empty() {
        return Err(ScenarioError::EmptyStatistics);
    }
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len();
    let mean = sorted.iter().sum::<f64>() / n as f64;
    let q1 = quantile(&sorted, 0.25);
    let median = quantile(&sorted, 0.5);
    let q3 = quantile(&sorted, 0.75);
    let iqr = q3 - q1;
    let (fence_lo, fence_hi) = (q1 - 1.5 * iqr, q3 + 1.5 * iqr);
    let inside = || sorted.iter().copied().filter(|v| (fence_lo..=fence_hi).contains(v));
    let whisker_low = inside().next().map_or(q1, |w| w.min(q1));
    let whisker_high = inside().last().map_or(q3, |w| w.max(q3));
    let outlier_count = sorted.iter().filter(|v| **v < fence_lo || **v > fence_hi).count();
    Ok(SummaryStats {
        n_samples: n + degenerate_count + error_count,
        n_valid: n,
        mean,
        median,
        q1,
        q3,
        whisker_low,
        whisker_high,
        outlier_count,
        degenerate_count,
        error_count,
    })
}

pub fn summarize(samples: &PebSampleSet) -> Result<SummaryStats, ScenarioError> {
    let values: Vec<f64> = samples.records.iter().filter_map(|r| r.peb_m).collect();
    summarize_values(&values, samples.degenerate_count(), samples.error_count())
}
