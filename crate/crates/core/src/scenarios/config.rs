//! Experiment configuration: strict JSON schema, variant-dependent
//! defaults and field-level validation.

use std::fmt;
use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::channel::{AntennaModel, Eirp, LinkBudget, LinkDirection, LinkParams, ScenarioClass};
use crate::scenarios::calibration::{CALIBRATED_PROCESSING_GAIN_DB, CALIBRATED_TDOA_SYNC_SIGMA_M};
use crate::scenarios::ScenarioError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Variant {
    SingleLeo,
    MultiLeo,
    GnssLeo,
    GnssOnly,
}

impl Variant {
    pub fn name(self) -> &'static str {
        match self {
            Variant::SingleLeo => "single-leo",
            Variant::MultiLeo => "multi-leo",
            Variant::GnssLeo => "gnss-leo",
            Variant::GnssOnly => "gnss-only",
        }
    }

    fn uses_measurement_times(self) -> bool {
        matches!(self, Variant::SingleLeo | Variant::GnssLeo)
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Link-budget constants. Every field can be overridden from the config file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LinkSettings {
    pub leo_carrier_hz: f64,
    pub leo_bandwidth_hz: f64,
    pub leo_dl_eirp_density_dbw_per_mhz: f64,
    pub ue_g_over_t_dbk: f64,
    pub ue_eirp_dbw: f64,
    pub satellite_g_over_t_dbk: f64,
    pub extra_losses_db: f64,
    /// Extra loss of neighbor-satellite downlinks relative to the serving satellite.
    pub neighbor_penalty_db: f64,
    /// Post-integration gain on every LEO link.
    pub processing_gain_db: f64,
    /// Per-satellite LEO timing error expressed as range, added to TDOA.
    pub tdoa_sync_sigma_m: f64,
    pub gnss_carrier_hz: f64,
    pub gnss_bandwidth_hz: f64,
    pub gnss_cn0_dbhz: f64,
    pub gnss_integration_time_s: f64,
}

impl Default for LinkSettings {
    fn default() -> Self {
        let dl = LinkParams::leo_downlink();
        let gnss = LinkParams::gnss_downlink();
        Self {
            leo_carrier_hz: dl.carrier_hz,
            leo_bandwidth_hz: dl.bandwidth_hz,
            leo_dl_eirp_density_dbw_per_mhz: 34.0,
            ue_g_over_t_dbk: -31.6,
            ue_eirp_dbw: -7.0,
            satellite_g_over_t_dbk: 1.1,
            extra_losses_db: 0.0,
            neighbor_penalty_db: 6.0,
            processing_gain_db: CALIBRATED_PROCESSING_GAIN_DB,
            tdoa_sync_sigma_m: CALIBRATED_TDOA_SYNC_SIGMA_M,
            gnss_carrier_hz: gnss.carrier_hz,
            gnss_bandwidth_hz: gnss.bandwidth_hz,
            gnss_cn0_dbhz: 44.0,
            gnss_integration_time_s: 0.01,
        }
    }
}

impl LinkSettings {
    pub fn leo_downlink(&self) -> LinkParams {
        LinkParams {
            direction: LinkDirection::LeoDownlink,
            carrier_hz: self.leo_carrier_hz,
            bandwidth_hz: self.leo_bandwidth_hz,
            budget: LinkBudget::Eirp {
                eirp: Eirp::DensityDbwPerMhz(self.leo_dl_eirp_density_dbw_per_mhz),
                g_over_t_dbk: self.ue_g_over_t_dbk,
            },
            extra_losses_db: self.extra_losses_db,
            neighbor_penalty_db: 0.0,
            processing_gain_db: self.processing_gain_db,
        }
    }

    pub fn neighbor_downlink(&self) -> LinkParams {
        LinkParams {
            neighbor_penalty_db: self.neighbor_penalty_db,
            ..self.leo_downlink()
        }
    }

    pub fn leo_uplink(&self) -> LinkParams {
        LinkParams {
            direction: LinkDirection::LeoUplink,
            carrier_hz: self.leo_carrier_hz,
            bandwidth_hz: self.leo_bandwidth_hz,
            budget: LinkBudget::Eirp {
                eirp: Eirp::TotalDbw(self.ue_eirp_dbw),
                g_over_t_dbk: self.satellite_g_over_t_dbk,
            },
            extra_losses_db: self.extra_losses_db,
            neighbor_penalty_db: 0.0,
            processing_gain_db: self.processing_gain_db,
        }
    }

    pub fn gnss_downlink(&self) -> LinkParams {
        LinkParams {
            direction: LinkDirection::GnssDownlink,
            carrier_hz: self.gnss_carrier_hz,
            bandwidth_hz: self.gnss_bandwidth_hz,
            budget: LinkBudget::ReceivedCn0 {
                cn0_dbhz: self.gnss_cn0_dbhz,
                integration_time_s: self.gnss_integration_time_s,
            },
            extra_losses_db: self.extra_losses_db,
            neighbor_penalty_db: 0.0,
            processing_gain_db: 0.0,
        }
    }
}

/// Fully resolved experiment description.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub variant: Variant,
    pub leo_altitude_m: f64,
    pub gnss_altitude_m: f64,
    pub measurement_times_s: Vec<f64>,
    pub n_virtual_anchors: usize,
    pub n_active_satellites: usize,
    pub rtt_augmentation: bool,
    /// Window of the serving-satellite RTT that augments multi-LEO TDOA.
    pub rtt_measurement_time_s: f64,
    pub n_ue_drops: usize,
    pub seed: u64,
    pub scenario_class: ScenarioClass,
    pub los_only: bool,
    pub gnss_elevation_mask_deg: f64,
    pub beamwidth_deg: f64,
    pub antenna_model: AntennaModel,
    pub coverage_center_lat_deg: f64,
    pub coverage_center_lon_deg: f64,
    /// Inclination of the single-LEO orbit.
    pub leo_inclination_deg: f64,
    pub hex_lon_gap_deg: f64,
    pub hex_lat_gap_deg: f64,
    pub degenerate_threshold: f64,
    pub links: LinkSettings,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub channel_table_dir: Option<PathBuf>,
}

pub const SINGLE_LEO_ALTITUDE_M: f64 = 600e3;
pub const MULTI_LEO_ALTITUDE_M: f64 = 780e3;
pub const GNSS_ALTITUDE_M: f64 = 20_200e3;
pub const DEFAULT_BEAMWIDTH_DEG: f64 = 4.4127;

impl ScenarioConfig {
    pub fn default_for(variant: Variant) -> Self {
        let measurement_times_s = match variant {
            Variant::SingleLeo => (2..=10).map(f64::from).collect(),
            Variant::GnssLeo => vec![2.0, 5.0, 7.0, 10.0],
            Variant::MultiLeo | Variant::GnssOnly => Vec::new(),
        };
        Self {
            variant,
            leo_altitude_m: if variant == Variant::MultiLeo {
                MULTI_LEO_ALTITUDE_M
            } else {
                SINGLE_LEO_ALTITUDE_M
            },
            gnss_altitude_m: GNSS_ALTITUDE_M,
            measurement_times_s,
            n_virtual_anchors: 10,
            n_active_satellites: 4,
            rtt_augmentation: false,
            rtt_measurement_time_s: 10.0,
            n_ue_drops: 1000,
            seed: 0,
            scenario_class: ScenarioClass::SuburbanRural,
            los_only: true,
            gnss_elevation_mask_deg: 30.0,
            beamwidth_deg: DEFAULT_BEAMWIDTH_DEG,
            antenna_model: AntennaModel::BesselAperture,
            coverage_center_lat_deg: 0.0,
            coverage_center_lon_deg: 0.0,
            leo_inclination_deg: 53.0,
            hex_lon_gap_deg: 13.0,
            hex_lat_gap_deg: 6.9,
            degenerate_threshold: crate::fisher::DEFAULT_DEGENERATE_THRESHOLD,
            links: LinkSettings::default(),
            channel_table_dir: None,
        }
    }

    /// Parses a JSON config. Only `variant` is required; unknown keys are rejected.
    pub fn from_json_str(text: &str) -> Result<Self, ScenarioError> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let raw: RawConfig = serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            let field = if path == "." { "<root>".to_string() } else { path };
            ScenarioError::Config(vec![FieldError::new(field, e.into_inner().to_string())])
        })?;
        let cfg = raw.resolve()?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_canonical_json(&self) -> String {
        // struct fields serialize in declaration order, so equal configs give equal text
        serde_json::to_string(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<(), ScenarioError> {
        let mut errs = Vec::new();
        let mut check = |ok: bool, field: &str, msg: String| {
            if !ok {
                errs.push(FieldError::new(field, msg));
            }
        };
        check(
            self.leo_altitude_m.is_finite() && self.leo_altitude_m > 0.0,
            "leo_altitude_m",
            format!("must be > 0, got {}", self.leo_altitude_m),
        );
        check(
            self.gnss_altitude_m.is_finite() && self.gnss_altitude_m > 0.0,
            "gnss_altitude_m",
            format!("must be > 0, got {}", self.gnss_altitude_m),
        );
        check(self.n_ue_drops >= 1, "n_ue_drops", "must be >= 1".into());
        check(
            self.n_virtual_anchors >= 2,
            "n_virtual_anchors",
            format!("must be >= 2, got {}", self.n_virtual_anchors),
        );
        if self.variant.uses_measurement_times() {
            check(
                !self.measurement_times_s.is_empty(),
                "measurement_times_s",
                format!("must be non-empty for variant {}", self.variant),
            );
        }
        for (i, t) in self.measurement_times_s.iter().enumerate() {
            check(
                t.is_finite() && *t > 0.0,
                &format!("measurement_times_s[{i}]"),
                format!("must be > 0, got {t}"),
            );
        }
        if self.variant == Variant::MultiLeo {
            check(
                matches!(self.n_active_satellites, 3 | 4),
                "n_active_satellites",
                format!("the number of active satellites must be 3 or 4, got {}", self.n_active_satellites),
            );
        }
        check(
            self.rtt_measurement_time_s.is_finite() && self.rtt_measurement_time_s > 0.0,
            "rtt_measurement_time_s",
            format!("must be > 0, got {}", self.rtt_measurement_time_s),
        );
        check(
            self.beamwidth_deg > 0.0 && self.beamwidth_deg < 180.0,
            "beamwidth_deg",
            format!("must be in (0, 180), got {}", self.beamwidth_deg),
        );
        check(
            (0.0..90.0).contains(&self.gnss_elevation_mask_deg),
            "gnss_elevation_mask_deg",
            format!("must be in [0, 90), got {}", self.gnss_elevation_mask_deg),
        );
        check(
            self.coverage_center_lat_deg.abs() < 90.0,
            "coverage_center_lat_deg",
            format!("must be in (-90, 90), got {}", self.coverage_center_lat_deg),
        );
        check(
            self.coverage_center_lon_deg.is_finite(),
            "coverage_center_lon_deg",
            "must be finite".into(),
        );
        check(
            self.leo_inclination_deg > 0.0
                && self.leo_inclination_deg < 180.0
                && self.coverage_center_lat_deg.abs()
                    <= self.leo_inclination_deg.min(180.0 - self.leo_inclination_deg),
            "leo_inclination_deg",
            format!(
                "orbit inclined {} deg cannot pass over latitude {}",
                self.leo_inclination_deg, self.coverage_center_lat_deg
            ),
        );
        check(
            self.hex_lon_gap_deg > 0.0,
            "hex_lon_gap_deg",
            format!("must be > 0, got {}", self.hex_lon_gap_deg),
        );
        check(
            self.hex_lat_gap_deg >= 0.0,
            "hex_lat_gap_deg",
            format!("must be >= 0, got {}", self.hex_lat_gap_deg),
        );
        check(
            self.degenerate_threshold.is_finite() && self.degenerate_threshold >= 0.0,
            "degenerate_threshold",
            format!("must be >= 0, got {}", self.degenerate_threshold),
        );
        let l = &self.links;
        for (name, v) in [
            ("links.leo_carrier_hz", l.leo_carrier_hz),
            ("links.leo_bandwidth_hz", l.leo_bandwidth_hz),
            ("links.gnss_carrier_hz", l.gnss_carrier_hz),
            ("links.gnss_bandwidth_hz", l.gnss_bandwidth_hz),
            ("links.gnss_integration_time_s", l.gnss_integration_time_s),
        ] {
            check(v.is_finite() && v > 0.0, name, format!("must be > 0, got {v}"));
        }
        for (name, v) in [
            ("links.neighbor_penalty_db", l.neighbor_penalty_db),
            ("links.tdoa_sync_sigma_m", l.tdoa_sync_sigma_m),
        ] {
            check(v.is_finite() && v >= 0.0, name, format!("must be >= 0, got {v}"));
        }
        for (name, v) in [
            ("links.leo_dl_eirp_density_dbw_per_mhz", l.leo_dl_eirp_density_dbw_per_mhz),
            ("links.ue_g_over_t_dbk", l.ue_g_over_t_dbk),
            ("links.ue_eirp_dbw", l.ue_eirp_dbw),
            ("links.satellite_g_over_t_dbk", l.satellite_g_over_t_dbk),
            ("links.extra_losses_db", l.extra_losses_db),
            ("links.processing_gain_db", l.processing_gain_db),
            ("links.gnss_cn0_dbhz", l.gnss_cn0_dbhz),
        ] {
            check(v.is_finite(), name, "must be finite".into());
        }
        if errs.is_empty() {
            Ok(())
        } else {
            Err(ScenarioError::Config(errs))
        }
    }
}

/// One invalid config field.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FieldError {
    pub field: String,
    pub message: String,
}

impl FieldError {
    pub fn new(field: impl Into<String>, message: impl Into<String>) -> Self {
        Self {
            field: field.into(),
            message: message.into(),
        }
    }
}

impl fmt::Display for FieldError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.field, self.message)
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    variant: Variant,
    leo_altitude_m: Option<f64>,
    gnss_altitude_m: Option<f64>,
    measurement_times_s: Option<Vec<f64>>,
    n_virtual_anchors: Option<usize>,
    n_active_satellites: Option<usize>,
    rtt_augmentation: Option<bool>,
    rtt_measurement_time_s: Option<f64>,
    n_ue_drops: Option<usize>,
    seed: Option<u64>,
    scenario_class: Option<ScenarioClass>,
    los_only: Option<bool>,
    gnss_elevation_mask_deg: Option<f64>,
    beamwidth_deg: Option<f64>,
    antenna_model: Option<AntennaModel>,
    coverage_center_lat_deg: Option<f64>,
    coverage_center_lon_deg: Option<f64>,
    leo_inclination_deg: Option<f64>,
    hex_lon_gap_deg: Option<f64>,
    hex_lat_gap_deg: Option<f64>,
    degenerate_threshold: Option<f64>,
    links: Option<LinkSettings>,
    channel_table_dir: Option<PathBuf>,
}

impl RawConfig {
    fn resolve(self) -> Result<ScenarioConfig, ScenarioError> {
        let d = ScenarioConfig::default_for(self.variant);
        Ok(ScenarioConfig {
            variant: self.variant,
            leo_altitude_m: self.leo_altitude_m.unwrap_or(d.leo_altitude_m),
            gnss_altitude_m: self.gnss_altitude_m.unwrap_or(d.gnss_altitude_m),
            measurement_times_s: self.measurement_times_s.unwrap_or(d.measurement_times_s),
            n_virtual_anchors: self.n_virtual_anchors.unwrap_or(d.n_virtual_anchors),
            n_active_satellites: self.n_active_satellites.unwrap_or(d.n_active_satellites),
            rtt_augmentation: self.rtt_augmentation.unwrap_or(d.rtt_augmentation),
            rtt_measurement_time_s: self.rtt_measurement_time_s.unwrap_or(d.rtt_measurement_time_s),
            n_ue_drops: self.n_ue_drops.unwrap_or(d.n_ue_drops),
            seed: self.seed.unwrap_or(d.seed),
            scenario_class: self.scenario_class.unwrap_or(d.scenario_class),
            los_only: self.los_only.unwrap_or(d.los_only),
            gnss_elevation_mask_deg: self.gnss_elevation_mask_deg.unwrap_or(d.gnss_elevation_mask_deg),
            beamwidth_deg: self.beamwidth_deg.unwrap_or(d.beamwidth_deg),
            antenna_model: self.antenna_model.unwrap_or(d.antenna_model),
            coverage_center_lat_deg: self.coverage_center_lat_deg.unwrap_or(d.coverage_center_lat_deg),
            coverage_center_lon_deg: self.coverage_center_lon_deg.unwrap_or(d.coverage_center_lon_deg),
            leo_inclination_deg: self.leo_inclination_deg.unwrap_or(d.leo_inclination_deg),
            hex_lon_gap_deg: self.hex_lon_gap_deg.unwrap_or(d.hex_lon_gap_deg),
            hex_lat_gap_deg: self.hex_lat_gap_deg.unwrap_or(d.hex_lat_gap_deg),
            degenerate_threshold: self.degenerate_threshold.unwrap_or(d.degenerate_threshold),
            links: self.links.unwrap_or(d.links),
            channel_table_dir: self.channel_table_dir,
        })
    }
}
