//! Fitting of the two link constants the published results leave open.
//!
//! The processing gain is fitted first on the single-LEO sweep alone, since
//! those cases do not involve TDOA. The TDOA synchronization error is then
//! fitted on the multi-LEO cases with the processing gain held fixed. Both
//! searches run with LOS-only links and minimize the mean squared log ratio
//! against the published means.

use crate::channel::ChannelTables;

use super::reference::{
    log_ratio_error, MULTI_LEO_CASES, MULTI_LEO_MEAN_PEB_M, SINGLE_LEO_MEAN_PEB_M, SINGLE_LEO_TIMES_S,
};
use super::{figure_configs, run, ScenarioConfig, ScenarioError, Variant};

/// Frozen result of [`calibrate_processing_gain`] with the default grid.
pub const CALIBRATED_PROCESSING_GAIN_DB: f64 = 0.0;
/// Frozen result of [`calibrate_tdoa_sync_sigma`] with the default grid.
pub const CALIBRATED_TDOA_SYNC_SIGMA_M: f64 = 45.0;

pub const CALIBRATION_SEED: u64 = 0;
pub const CALIBRATION_DROPS: usize = 1000;

/// Processing gain candidates, dB.
pub fn processing_gain_grid() -> Vec<f64> {
    (-10..=30).map(f64::from).collect()
}

/// Synchronization error candidates, meters.
pub fn tdoa_sync_grid() -> Vec<f64> {
    (0..=40).map(|i| 5.0 * f64::from(i)).collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridPoint {
    pub value: f64,
    /// `None` when some case produced no valid samples.
    pub error: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Calibration {
    pub best: f64,
    pub grid: Vec<GridPoint>,
}

/// Calibration template: default settings, LOS-only, fixed seed and drop count.
pub fn calibration_template() -> ScenarioConfig {
    ScenarioConfig {
        seed: CALIBRATION_SEED,
        n_ue_drops: CALIBRATION_DROPS,
        los_only: true,
        ..ScenarioConfig::default_for(Variant::SingleLeo)
    }
}

fn pick(grid: Vec<GridPoint>) -> Calibration {
    // first minimum wins, so ties resolve to the lower grid value
    let best = grid
        .iter()
        .filter_map(|p| p.error.map(|e| (p.value, e)))
        .fold(None::<(f64, f64)>, |acc, (v, e)| match acc {
            Some((_, be)) if be <= e => acc,
            _ => Some((v, e)),
        })
        .map_or(f64::NAN, |(v, _)| v);
    Calibration { best, grid }
}

pub fn single_leo_error(template: &ScenarioConfig, tables: &ChannelTables) -> Result<Option<f64>, ScenarioError> {
    let mut cfg = figure_configs(template).remove(0);
    cfg.measurement_times_s = SINGLE_LEO_TIMES_S.to_vec();
    let means: Option<Vec<f64>> = run(&cfg, tables)?.cases.iter().map(|c| c.mean()).collect();
    Ok(means.map(|m| log_ratio_error(&m, &SINGLE_LEO_MEAN_PEB_M)))
}

pub fn multi_leo_error(template: &ScenarioConfig, tables: &ChannelTables) -> Result<Option<f64>, ScenarioError> {
    let mut means = Vec::with_capacity(MULTI_LEO_CASES.len());
    for cfg in figure_configs(template)
        .into_iter()
        .filter(|c| c.variant == Variant::MultiLeo)
    {
        match run(&cfg, tables)?.cases[0].mean() {
            Some(m) => means.push(m),
            None => return Ok(None),
        }
    }
    Ok(Some(log_ratio_error(&means, &MULTI_LEO_MEAN_PEB_M)))
}

pub fn calibrate_processing_gain(
    template: &ScenarioConfig,
    tables: &ChannelTables,
    grid: &[f64],
) -> Result<Calibration, ScenarioError> {
    let mut points = Vec::with_capacity(grid.len());
    for &g in grid {
        let mut cfg = template.clone();
        cfg.links.processing_gain_db = g;
        points.push(GridPoint {
            value: g,
            error: single_leo_error(&cfg, tables)?,
        });
    }
    Ok(pick(points))
}

pub fn calibrate_tdoa_sync_sigma(
    template: &ScenarioConfig,
    tables: &ChannelTables,
    grid: &[f64],
) -> Result<Calibration, ScenarioError> {
    let mut points = Vec::with_capacity(grid.len());
    for &s in grid {
        let mut cfg = template.clone();
        cfg.links.tdoa_sync_sigma_m = s;
        points.push(GridPoint {
            value: s,
            error: multi_leo_error(&cfg, tables)?,
        });
    }
    Ok(pick(points))
}

/// Runs both searches in order and returns (processing gain, sync sigma).
/// The frozen constants come from [`calibration_template`].
pub fn calibrate(template: &ScenarioConfig, tables: &ChannelTables) -> Result<(Calibration, Calibration), ScenarioError> {
    let gain = calibrate_processing_gain(template, tables, &processing_gain_grid())?;
    let mut with_gain = template.clone();
    with_gain.links.processing_gain_db = gain.best;
    let sync = calibrate_tdoa_sync_sigma(&with_gain, tables, &tdoa_sync_grid())?;
    Ok((gain, sync))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ties_go_to_the_lower_value() {
        let c = pick(vec![
            GridPoint { value: 1.0, error: Some(0.5) },
            GridPoint { value: 2.0, error: Some(0.2) },
            GridPoint { value: 3.0, error: Some(0.2) },
            GridPoint { value: 4.0, error: None },
        ]);
        assert_eq!(c.best, 2.0);
    }

    #[test]
    fn grids_span_the_documented_ranges() {
        let g = processing_gain_grid();
        assert_eq!((g[0], *g.last().unwrap(), g.len()), (-10.0, 30.0, 41));
        let s = tdoa_sync_grid();
        assert_eq!((s[0], *s.last().unwrap(), s[1] - s[0]), (0.0, 200.0, 5.0));
    }
}
