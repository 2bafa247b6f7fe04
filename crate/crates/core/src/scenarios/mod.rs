//! The three positioning case studies: single-LEO RTT over a measurement
//! window, multi-LEO TDOA with optional serving-satellite RTT, and GNSS
//! TDOA combined with single-LEO RTT.
//!
//! Each run drops UEs uniformly over the serving beam's 3 dB footprint,
//! realizes every link, assembles the measurement sets and evaluates the
//! position error bound per UE. UEs are evaluated in parallel and merged in
//! drop order; every random draw comes from a substream keyed by
//! `(seed, drop index)`, so results do not depend on the worker count.

pub mod calibration;
pub mod config;
pub mod reference;
pub mod stats;

use std::f64::consts::PI;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::channel::{link_snr, AntennaPattern, ChannelError, ChannelTables, LinkParams};
use crate::fisher::{peb_with_threshold, select_satellites, Fim, FisherError, MeasurementKind, MeasurementSet, PebResult};
use crate::geometry::{
    destination, ecef_to_geodetic, elevation_angle, geodetic_to_ecef, hex_constellation, hex_serving_orbit,
    make_virtual_anchors, nadir_cap_central_angle, off_boresight_angle, propagate_with_role, AnchorSet, EcefVector,
    Geodetic, GeometryError, LocalFrame, OrbitSpec, SatelliteRole, SatelliteState, EARTH_RADIUS_M,
};
use crate::rng::{substream, Purpose};

pub use config::{FieldError, LinkSettings, ScenarioConfig, Variant};
pub use stats::{summarize, summarize_values, SummaryStats};

/// Peak gain assigned to the satellite antenna pattern. Link budgets use
/// EIRP and G/T, which already include it, so only the relative pattern matters.
const SATELLITE_PEAK_GAIN_DBI: f64 = 30.0;

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("invalid configuration: {}", .0.iter().map(|e| e.to_string()).collect::<Vec<_>>().join("; "))]
    Config(Vec<FieldError>),
    #[error("no non-degenerate samples to summarize")]
    EmptyStatistics,
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Channel(#[from] ChannelError),
    #[error(transparent)]
    Fisher(#[from] FisherError),
}

/// What was evaluated in one case, with the parameters that define it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CaseSpec {
    pub id: String,
    pub variant: Variant,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub measurement_time_s: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_active_satellites: Option<usize>,
    pub rtt_augmentation: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_gnss_satellites: Option<usize>,
    pub leo_altitude_m: f64,
    pub processing_gain_db: f64,
    pub tdoa_sync_sigma_m: f64,
    pub los_only: bool,
}

/// Outcome for one UE drop.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PebRecord {
    pub drop_index: usize,
    pub ue_lat_deg: f64,
    pub ue_lon_deg: f64,
    pub peb_m: Option<f64>,
    pub gdop: Option<f64>,
    pub degenerate: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PebSampleSet {
    pub case: CaseSpec,
    pub records: Vec<PebRecord>,
}

impl PebSampleSet {
    pub fn degenerate_count(&self) -> usize {
        self.records.iter().filter(|r| r.degenerate).count()
    }

    pub fn error_count(&self) -> usize {
        self.records.iter().filter(|r| r.error.is_some()).count()
    }

    pub fn valid_pebs(&self) -> Vec<f64> {
        self.records.iter().filter_map(|r| r.peb_m).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CaseResult {
    pub samples: PebSampleSet,
    /// `None` when every sample was degenerate or failed.
    pub stats: Option<SummaryStats>,
}

impl CaseResult {
    fn from_samples(samples: PebSampleSet) -> Self {
        let stats = summarize(&samples).ok();
        Self { samples, stats }
    }

    pub fn id(&self) -> &str {
        &self.samples.case.id
    }

    pub fn mean(&self) -> Option<f64> {
        self.stats.as_ref().map(|s| s.mean)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultsBundle {
    pub config: ScenarioConfig,
    pub cases: Vec<CaseResult>,
}

impl ResultsBundle {
    pub fn case(&self, id: &str) -> Option<&CaseResult> {
        self.cases.iter().find(|c| c.id() == id)
    }
}

fn fmt_time(t: f64) -> String {
    format!("{t}")
}

pub fn single_leo_case_id(t: f64) -> String {
    format!("single_leo_t{}", fmt_time(t))
}

pub fn multi_leo_case_id(n_active: usize, rtt: bool) -> String {
    format!("multi_leo_{n_active}tdoa{}", if rtt { "_rtt" } else { "" })
}

pub fn gnss_leo_case_id(t: f64) -> String {
    format!("gnss_leo_t{}", fmt_time(t))
}

pub fn gnss_only_case_id(n_gnss: usize) -> String {
    format!("gnss_only_{n_gnss}")
}

/// Immutable per-run context shared by all UE evaluations.
struct Context<'a> {
    config: &'a ScenarioConfig,
    tables: &'a ChannelTables,
    pattern: AntennaPattern,
    /// Ground point the serving beam is pointed at.
    beam_center: EcefVector,
    downlink: LinkParams,
    neighbor_downlink: LinkParams,
    uplink: LinkParams,
    gnss: LinkParams,
}

impl<'a> Context<'a> {
    fn new(config: &'a ScenarioConfig, tables: &'a ChannelTables) -> Result<Self, ScenarioError> {
        config.validate()?;
        let pattern = AntennaPattern::new(
            SATELLITE_PEAK_GAIN_DBI,
            config.beamwidth_deg.to_radians(),
            config.antenna_model,
        )?;
        Ok(Self {
            config,
            tables,
            pattern,
            beam_center: geodetic_to_ecef(&coverage_center(config)?),
            downlink: config.links.leo_downlink(),
            neighbor_downlink: config.links.neighbor_downlink(),
            uplink: config.links.leo_uplink(),
            gnss: config.links.gnss_downlink(),
        })
    }

    fn case(&self, id: String) -> CaseSpec {
        CaseSpec {
            id,
            variant: self.config.variant,
            measurement_time_s: None,
            n_active_satellites: None,
            rtt_augmentation: false,
            n_gnss_satellites: None,
            leo_altitude_m: self.config.leo_altitude_m,
            processing_gain_db: self.config.links.processing_gain_db,
            tdoa_sync_sigma_m: self.config.links.tdoa_sync_sigma_m,
            los_only: self.config.los_only,
        }
    }

    /// Range sigma of a downlink/uplink pair to one satellite.
    fn link_sigmas<R: Rng + ?Sized>(
        &self,
        ue: &EcefVector,
        sat: &EcefVector,
        steered: bool,
        downlink: &LinkParams,
        uplink: Option<&LinkParams>,
        rng: &mut R,
    ) -> Result<(f64, Option<f64>), ScenarioError> {
        let distance = sat.distance(ue);
        let elevation = elevation_angle(ue, sat);
        let off_boresight = if steered {
            0.0
        } else {
            off_boresight_angle(sat, &self.beam_center, ue)
        };
        let draw = self
            .tables
            .draw(self.config.scenario_class, elevation, self.config.los_only, rng)?;
        let dl = link_snr(downlink, &self.pattern, distance, off_boresight, &draw)?;
        let sigma_dl = crate::fisher::toa_range_sigma(dl.snr_db, downlink.bandwidth_hz)?;
        let sigma_ul = match uplink {
            Some(ul_params) => {
                let ul = link_snr(ul_params, &self.pattern, distance, off_boresight, &draw)?;
                Some(crate::fisher::toa_range_sigma(ul.snr_db, ul_params.bandwidth_hz)?)
            }
            None => None,
        };
        Ok((sigma_dl, sigma_ul))
    }

    /// RTT over `n_virtual_anchors` positions of `orbit` spread across `window`.
    fn rtt_set<R: Rng + ?Sized>(
        &self,
        ue: &EcefVector,
        orbit: &OrbitSpec,
        window: f64,
        rng: &mut R,
    ) -> Result<MeasurementSet, ScenarioError> {
        let anchors = make_virtual_anchors(orbit, window, self.config.n_virtual_anchors)?;
        let mut sigma_dl = Vec::with_capacity(anchors.len());
        let mut sigma_ul = Vec::with_capacity(anchors.len());
        for sat in anchors.positions() {
            let (dl, ul) = self.link_sigmas(ue, &sat, false, &self.downlink, Some(&self.uplink), rng)?;
            sigma_dl.push(dl);
            sigma_ul.push(ul.expect("uplink requested"));
        }
        Ok(MeasurementSet::rtt(anchors, sigma_dl, sigma_ul)?)
    }

    fn peb(&self, fim: &Fim) -> PebResult {
        peb_with_threshold(fim, self.config.degenerate_threshold)
    }

    fn evaluate_cases<F>(&self, drops: &[Geodetic], case: CaseSpec, eval: F) -> CaseResult
    where
        F: Fn(usize, &EcefVector) -> Result<PebResult, ScenarioError> + Sync,
    {
        let records = drops
            .par_iter()
            .enumerate()
            .map(|(i, g)| {
                let ue = geodetic_to_ecef(g);
                let mut rec = PebRecord {
                    drop_index: i,
                    ue_lat_deg: g.latitude_deg(),
                    ue_lon_deg: g.longitude_deg(),
                    peb_m: None,
                    gdop: None,
                    degenerate: false,
                    error: None,
                };
                match eval(i, &ue) {
                    Ok(r) => {
                        rec.degenerate = r.is_degenerate();
                        rec.peb_m = r.peb;
                        rec.gdop = r.gdop;
                    }
                    Err(e) => rec.error = Some(e.to_string()),
                }
                rec
            })
            .collect();
        CaseResult::from_samples(PebSampleSet { case, records })
    }

    fn single_leo_orbit(&self) -> Result<OrbitSpec, ScenarioError> {
        let center = coverage_center(self.config)?;
        Ok(OrbitSpec::passing_over(
            &center,
            self.config.leo_altitude_m,
            self.config.leo_inclination_deg.to_radians(),
        )?)
    }
}

pub fn coverage_center(config: &ScenarioConfig) -> Result<Geodetic, GeometryError> {
    Geodetic::from_degrees(config.coverage_center_lat_deg, config.coverage_center_lon_deg, 0.0)
}

/// UE positions uniform by area over the ground cap inside the serving
/// beam's 3 dB footprint, with the beam pointed at the satellite's nadir.
pub fn drop_ues(config: &ScenarioConfig, serving: &SatelliteState) -> Vec<Geodetic> {
    let mut nadir = ecef_to_geodetic(&serving.position);
    let altitude = nadir.altitude;
    nadir.altitude = 0.0;
    let cap = nadir_cap_central_angle(altitude, 0.5 * config.beamwidth_deg.to_radians());
    let cos_cap = cap.cos();
    (0..config.n_ue_drops)
        .map(|i| {
            let mut rng = substream(config.seed, Purpose::UeDrop, i as u64);
            let u: f64 = rng.gen();
            let az: f64 = rng.gen::<f64>() * 2.0 * PI;
            // uniform area on a cap: cos(angle) uniform in [cos(cap), 1]
            let angle = (1.0 - u * (1.0 - cos_cap)).clamp(-1.0, 1.0).acos().min(cap);
            destination(&nadir, angle, az, 0.0)
        })
        .collect()
}

/// Geometry that is fixed for a whole run, plus the link context.
struct Prepared<'a> {
    ctx: Context<'a>,
    serving_orbit: OrbitSpec,
    serving: SatelliteState,
    /// Hexagonal grid, multi-LEO only.
    grid: Option<AnchorSet>,
}

/// Number of GNSS satellites drawn per drop; the hybrid uses the first two.
const GNSS_SATELLITES_PER_DROP: usize = 3;
const GNSS_SATELLITES_HYBRID: usize = 2;

impl<'a> Prepared<'a> {
    fn new(config: &'a ScenarioConfig, tables: &'a ChannelTables) -> Result<Self, ScenarioError> {
        let ctx = Context::new(config, tables)?;
        let center = coverage_center(config)?;
        let (serving_orbit, grid) = match config.variant {
            Variant::MultiLeo => (
                hex_serving_orbit(&center, config.leo_altitude_m)?,
                Some(hex_constellation(
                    &center,
                    config.hex_lon_gap_deg.to_radians(),
                    config.hex_lat_gap_deg.to_radians(),
                    config.leo_altitude_m,
                )?),
            ),
            _ => (ctx.single_leo_orbit()?, None),
        };
        let serving = propagate_with_role(&serving_orbit, 0.0, SatelliteRole::ServingLeo);
        Ok(Self {
            ctx,
            serving_orbit,
            serving,
            grid,
        })
    }

    fn gnss_satellites(&self, drop_index: usize, ue: &EcefVector, n: usize) -> Vec<SatelliteState> {
        let cfg = self.ctx.config;
        let mut rng = substream(cfg.seed, Purpose::GnssGeometry, drop_index as u64);
        let mut sats = place_gnss_satellites(
            ue,
            GNSS_SATELLITES_PER_DROP,
            cfg.gnss_elevation_mask_deg.to_radians(),
            cfg.gnss_altitude_m,
            &mut rng,
        );
        sats.truncate(n);
        sats
    }

    /// Every measurement set one UE contributes for one case. Channel
    /// draws are consumed TDOA links first, then RTT anchors.
    fn sets(&self, drop_index: usize, ue: &EcefVector, window: Option<f64>) -> Result<Vec<MeasurementSet>, ScenarioError> {
        let cfg = self.ctx.config;
        let mut rng = substream(cfg.seed, Purpose::Channel, drop_index as u64);
        let mut out = Vec::with_capacity(2);
        match cfg.variant {
            Variant::SingleLeo => {
                let t = window.expect("single-leo case has a measurement time");
                out.push(self.ctx.rtt_set(ue, &self.serving_orbit, t, &mut rng)?);
            }
            Variant::MultiLeo => {
                let grid = self.grid.as_ref().expect("multi-leo grid");
                out.push(multi_leo_tdoa(&self.ctx, grid, ue, &mut rng)?);
                if cfg.rtt_augmentation {
                    out.push(self.ctx.rtt_set(ue, &self.serving_orbit, cfg.rtt_measurement_time_s, &mut rng)?);
                }
            }
            Variant::GnssOnly => {
                let sats = self.gnss_satellites(drop_index, ue, GNSS_SATELLITES_PER_DROP);
                out.push(gnss_tdoa(&self.ctx, sats, ue, &mut rng)?);
            }
            Variant::GnssLeo => {
                let t = window.expect("gnss-leo case has a measurement time");
                let sats = self.gnss_satellites(drop_index, ue, GNSS_SATELLITES_HYBRID);
                out.push(gnss_tdoa(&self.ctx, sats, ue, &mut rng)?);
                out.push(self.ctx.rtt_set(ue, &self.serving_orbit, t, &mut rng)?);
            }
        }
        Ok(out)
    }

    fn evaluate(&self, drops: &[Geodetic], case: CaseSpec, window: Option<f64>) -> CaseResult {
        self.ctx.evaluate_cases(drops, case, |i, ue| {
            let mut fim = Fim::zero();
            for set in self.sets(i, ue, window)? {
                fim = fim + Fim::for_set(ue, &set)?;
            }
            Ok(self.ctx.peb(&fim))
        })
    }

    fn drops(&self) -> Vec<Geodetic> {
        drop_ues(self.ctx.config, &self.serving)
    }
}

/// Measurement sets a UE at `ue` would contribute in drop `drop_index` of
/// the configured variant, for measurement time `window` where the variant
/// sweeps one. Used by the estimator to validate against the same inputs.
pub fn measurement_sets(
    config: &ScenarioConfig,
    tables: &ChannelTables,
    ue: &EcefVector,
    drop_index: usize,
    window: Option<f64>,
) -> Result<Vec<MeasurementSet>, ScenarioError> {
    Prepared::new(config, tables)?.sets(drop_index, ue, window)
}

/// Serving satellite at the evaluation epoch for the configured variant.
pub fn serving_satellite(config: &ScenarioConfig, tables: &ChannelTables) -> Result<SatelliteState, ScenarioError> {
    Ok(Prepared::new(config, tables)?.serving)
}

pub fn run_single_leo(config: &ScenarioConfig, tables: &ChannelTables) -> Result<Vec<CaseResult>, ScenarioError> {
    expect_variant(config, &[Variant::SingleLeo])?;
    let prep = Prepared::new(config, tables)?;
    let drops = prep.drops();
    Ok(config
        .measurement_times_s
        .iter()
        .map(|&t| {
            let mut case = prep.ctx.case(single_leo_case_id(t));
            case.measurement_time_s = Some(t);
            prep.evaluate(&drops, case, Some(t))
        })
        .collect())
}

/// TDOA set over the selected satellites of the hexagonal grid, serving
/// satellite as reference. Neighbor beams are steered at the coverage
/// area and carry the neighbor penalty instead of a pattern roll-off.
fn multi_leo_tdoa<R: Rng + ?Sized>(
    ctx: &Context<'_>,
    grid: &AnchorSet,
    ue: &EcefVector,
    rng: &mut R,
) -> Result<MeasurementSet, ScenarioError> {
    let visible: Vec<usize> = (0..grid.len())
        .filter(|&i| i == grid.serving_index() || elevation_angle(ue, &grid.states()[i].position) > 0.0)
        .collect();
    let visible = grid.subset(&visible)?;
    let (active, _) = select_satellites(&visible, ctx.config.n_active_satellites, ue, MeasurementKind::Tdoa)?;
    let mut sigma = Vec::with_capacity(active.len());
    for (i, sat) in active.states().iter().enumerate() {
        let serving = i == active.serving_index();
        let params = if serving {
            &ctx.downlink
        } else {
            &ctx.neighbor_downlink
        };
        let (dl, _) = ctx.link_sigmas(ue, &sat.position, !serving, params, None, rng)?;
        sigma.push(dl);
    }
    let reference = active.serving_index();
    Ok(MeasurementSet::tdoa(
        active,
        reference,
        sigma,
        ctx.config.links.tdoa_sync_sigma_m,
    )?)
}

pub fn run_multi_leo(config: &ScenarioConfig, tables: &ChannelTables) -> Result<Vec<CaseResult>, ScenarioError> {
    expect_variant(config, &[Variant::MultiLeo])?;
    let prep = Prepared::new(config, tables)?;
    let drops = prep.drops();
    let mut case = prep.ctx.case(multi_leo_case_id(config.n_active_satellites, config.rtt_augmentation));
    case.n_active_satellites = Some(config.n_active_satellites);
    case.rtt_augmentation = config.rtt_augmentation;
    if config.rtt_augmentation {
        case.measurement_time_s = Some(config.rtt_measurement_time_s);
    }
    Ok(vec![prep.evaluate(&drops, case, None)])
}

/// GNSS satellites placed independently and uniformly by solid angle on the
/// sky above `mask`, at the range that puts them at `altitude`.
pub fn place_gnss_satellites<R: Rng + ?Sized>(
    ue: &EcefVector,
    n: usize,
    mask: f64,
    altitude: f64,
    rng: &mut R,
) -> Vec<SatelliteState> {
    let frame = LocalFrame::at_ecef(ue);
    let orbit_radius = EARTH_RADIUS_M + altitude;
    (0..n)
        .map(|_| {
            let sin_el = mask.sin() + rng.gen::<f64>() * (1.0 - mask.sin());
            let az = rng.gen::<f64>() * 2.0 * PI;
            let cos_el = (1.0 - sin_el * sin_el).max(0.0).sqrt();
            let dir = frame.east * (cos_el * az.sin()) + frame.north * (cos_el * az.cos()) + frame.up * sin_el;
            let b = ue.dot(&dir);
            let range = -b + (b * b - (ue.dot(ue) - orbit_radius * orbit_radius)).sqrt();
            SatelliteState {
                position: *ue + dir * range,
                velocity: EcefVector::ZERO,
                time: 0.0,
                role: SatelliteRole::Gnss,
            }
        })
        .collect()
}

fn gnss_tdoa<R: Rng + ?Sized>(
    ctx: &Context<'_>,
    sats: Vec<SatelliteState>,
    ue: &EcefVector,
    rng: &mut R,
) -> Result<MeasurementSet, ScenarioError> {
    let mut sigma = Vec::with_capacity(sats.len());
    for s in &sats {
        let (dl, _) = ctx.link_sigmas(ue, &s.position, true, &ctx.gnss, None, rng)?;
        sigma.push(dl);
    }
    let anchors = AnchorSet::new(sats, 0)?;
    Ok(MeasurementSet::tdoa(anchors, 0, sigma, 0.0)?)
}

pub fn run_gnss_leo(config: &ScenarioConfig, tables: &ChannelTables) -> Result<Vec<CaseResult>, ScenarioError> {
    expect_variant(config, &[Variant::GnssLeo, Variant::GnssOnly])?;
    let prep = Prepared::new(config, tables)?;
    let drops = prep.drops();
    if config.variant == Variant::GnssOnly {
        let mut case = prep.ctx.case(gnss_only_case_id(GNSS_SATELLITES_PER_DROP));
        case.n_gnss_satellites = Some(GNSS_SATELLITES_PER_DROP);
        return Ok(vec![prep.evaluate(&drops, case, None)]);
    }
    Ok(config
        .measurement_times_s
        .iter()
        .map(|&t| {
            let mut case = prep.ctx.case(gnss_leo_case_id(t));
            case.measurement_time_s = Some(t);
            case.n_gnss_satellites = Some(GNSS_SATELLITES_HYBRID);
            prep.evaluate(&drops, case, Some(t))
        })
        .collect())
}

fn expect_variant(config: &ScenarioConfig, allowed: &[Variant]) -> Result<(), ScenarioError> {
    if allowed.contains(&config.variant) {
        Ok(())
    } else {
        Err(ScenarioError::Config(vec![FieldError::new(
            "variant",
            format!(
                "{} is not one of {}",
                config.variant,
                allowed.iter().map(|v| v.name()).collect::<Vec<_>>().join(", ")
            ),
        )]))
    }
}

/// Runs the configured variant and bundles every case with its statistics.
pub fn run(config: &ScenarioConfig, tables: &ChannelTables) -> Result<ResultsBundle, ScenarioError> {
    config.validate()?;
    let cases = match config.variant {
        Variant::SingleLeo => run_single_leo(config, tables)?,
        Variant::MultiLeo => run_multi_leo(config, tables)?,
        Variant::GnssLeo | Variant::GnssOnly => run_gnss_leo(config, tables)?,
    };
    Ok(ResultsBundle {
        config: config.clone(),
        cases,
    })
}

/// Configurations for every case of the three studies, sharing the
/// template's seed, drop count, channel and link settings.
pub fn figure_configs(template: &ScenarioConfig) -> Vec<ScenarioConfig> {
    let derive = |variant: Variant| {
        let d = ScenarioConfig::default_for(variant);
        ScenarioConfig {
            n_ue_drops: template.n_ue_drops,
            seed: template.seed,
            scenario_class: template.scenario_class,
            los_only: template.los_only,
            beamwidth_deg: template.beamwidth_deg,
            antenna_model: template.antenna_model,
            coverage_center_lat_deg: template.coverage_center_lat_deg,
            coverage_center_lon_deg: template.coverage_center_lon_deg,
            n_virtual_anchors: template.n_virtual_anchors,
            degenerate_threshold: template.degenerate_threshold,
            links: template.links.clone(),
            channel_table_dir: template.channel_table_dir.clone(),
            ..d
        }
    };
    let mut out = vec![derive(Variant::SingleLeo)];
    for n_active in [3, 4] {
        for rtt in [false, true] {
            out.push(ScenarioConfig {
                n_active_satellites: n_active,
                rtt_augmentation: rtt,
                ..derive(Variant::MultiLeo)
            });
        }
    }
    out.push(derive(Variant::GnssLeo));
    out.push(derive(Variant::GnssOnly));
    out
}

/// All cases of the three studies in figure order.
pub fn reproduce_figures(template: &ScenarioConfig, tables: &ChannelTables) -> Result<Vec<CaseResult>, ScenarioError> {
    let mut cases = Vec::new();
    for cfg in figure_configs(template) {
        cases.extend(run(&cfg, tables)?.cases);
    }
    Ok(cases)
}
