//! Published mean PEB values the simulator is compared against.

/// Single-LEO measurement times, seconds.
pub const SINGLE_LEO_TIMES_S: [f64; 9] = [2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0, 9.0, 10.0];
/// Single-LEO mean PEB per measurement time, meters.
pub const SINGLE_LEO_MEAN_PEB_M: [f64; 9] = [
    2220.19, 1692.03, 1440.50, 1300.16, 1214.39, 1158.84, 1121.87, 1096.73, 1078.49,
];

/// Multi-LEO cases as (active satellites, RTT augmentation) in published order.
pub const MULTI_LEO_CASES: [(usize, bool); 4] = [(3, false), (3, true), (4, false), (4, true)];
/// Multi-LEO mean PEB per case, meters.
pub const MULTI_LEO_MEAN_PEB_M: [f64; 4] = [187.68, 96.25, 53.75, 33.64];

/// GNSS+LEO measurement times, seconds.
pub const GNSS_LEO_TIMES_S: [f64; 4] = [2.0, 5.0, 7.0, 10.0];
/// Two GNSS satellites plus single-LEO RTT, mean PEB per measurement time, meters.
pub const GNSS_LEO_MEAN_PEB_M: [f64; 4] = [184.04, 118.37, 88.85, 60.88];
/// Three GNSS satellites alone, mean PEB, meters.
pub const GNSS_ONLY_MEAN_PEB_M: f64 = 11.93;

/// Acceptance band: simulated mean within this factor of the published mean.
pub const BAND_FACTOR: f64 = 2.0;

pub fn within_band(simulated: f64, published: f64) -> bool {
    simulated.is_finite() && simulated >= published / BAND_FACTOR && simulated <= published * BAND_FACTOR
}

/// Mean squared natural-log ratio between simulated and published values.
pub fn log_ratio_error(simulated: &[f64], published: &[f64]) -> f64 {
    assert_eq!(simulated.len(), published.len());
    simulated
        .iter()
        .zip(published)
        .map(|(s, p)| (s / p).ln().powi(2))
        .sum::<f64>()
        / published.len() as f64
}
