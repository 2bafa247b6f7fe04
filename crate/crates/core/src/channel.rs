//! Large-scale radio channel: satellite antenna pattern, free-space path
//! loss, elevation-dependent LOS probability and shadowing tables, and the
//! link budget that turns them into a per-measurement SNR.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt;
use std::path::Path;
use std::sync::OnceLock;

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::geometry::SPEED_OF_LIGHT;

pub const BOLTZMANN: f64 = 1.380_649e-23;

/// Version tag of the embedded channel tables.
pub const TABLE_VERSION: &str = "v1";

#[derive(Debug, Error)]
pub enum ChannelError {
    #[error("elevation {elevation_deg:.4} deg is at or below the horizon")]
    BelowHorizon { elevation_deg: f64 },
    #[error("invalid {field}: {reason}")]
    InvalidArgument { field: &'static str, reason: String },
    #[error("channel table {name}: {reason}")]
    Table { name: String, reason: String },
    #[error("reading channel table {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum AntennaModel {
    /// Normalized circular-aperture pattern, 4 |J1(ka sin t) / (ka sin t)|^2.
    #[default]
    BesselAperture,
    /// Parabolic-in-dB main lobe, -12 (t / beamwidth)^2 dB.
    GaussianApprox,
}

/// Floor applied to the aperture pattern so nulls do not produce -inf dB.
const PATTERN_FLOOR_DB: f64 = -80.0;

// 2 J1(u) / u = 1/sqrt(2) at the half-power point
fn aperture_half_power_argument() -> f64 {
    static ROOT: OnceLock<f64> = OnceLock::new();
    *ROOT.get_or_init(|| {
        let target = 0.5f64.sqrt();
        let (mut lo, mut hi) = (1.0, 2.5);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if 2.0 * libm::j1(mid) / mid > target {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AntennaPattern {
    pub peak_gain_dbi: f64,
    /// Full 3 dB beamwidth, radians.
    pub beamwidth: f64,
    pub model: AntennaModel,
}

impl AntennaPattern {
    pub fn new(peak_gain_dbi: f64, beamwidth: f64, model: AntennaModel) -> Result<Self, ChannelError> {
        if !(beamwidth > 0.0 && beamwidth < PI) {
            return Err(ChannelError::InvalidArgument {
                field: "beamwidth",
                reason: format!("{beamwidth} rad not in (0, pi)"),
            });
        }
        if !peak_gain_dbi.is_finite() {
            return Err(ChannelError::InvalidArgument {
                field: "peak_gain_dbi",
                reason: "must be finite".into(),
            });
        }
        Ok(Self {
            peak_gain_dbi,
            beamwidth,
            model,
        })
    }

    /// Gain in dB relative to the peak at the given off-boresight angle.
    pub fn gain_db(&self, off_boresight: f64) -> f64 {
        antenna_gain(self, off_boresight)
    }

    /// Aperture size parameter k*a for the Bessel model.
    pub fn aperture_ka(&self) -> f64 {
        aperture_half_power_argument() / (0.5 * self.beamwidth).sin()
    }
}

pub fn antenna_gain(pattern: &AntennaPattern, off_boresight: f64) -> f64 {
    let theta = off_boresight.abs();
    match pattern.model {
        AntennaModel::BesselAperture => {
            let u = pattern.aperture_ka() * theta.sin();
            if u < 1e-9 {
                return 0.0;
            }
            let amplitude = 2.0 * libm::j1(u) / u;
            (20.0 * amplitude.abs().log10()).max(PATTERN_FLOOR_DB)
        }
        AntennaModel::GaussianApprox => {
            let x = theta / pattern.beamwidth;
            (-12.0 * x * x).max(PATTERN_FLOOR_DB)
        }
    }
}

pub fn free_space_path_loss(distance: f64, carrier: f64) -> f64 {
    20.0 * (4.0 * PI * distance * carrier / SPEED_OF_LIGHT).log10()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default, PartialOrd, Ord)]
#[serde(rename_all = "kebab-case")]
pub enum ScenarioClass {
    DenseUrban,
    Urban,
    #[default]
    SuburbanRural,
}

impl ScenarioClass {
    pub const ALL: [ScenarioClass; 3] = [
        ScenarioClass::DenseUrban,
        ScenarioClass::Urban,
        ScenarioClass::SuburbanRural,
    ];

    fn file_stem(self) -> &'static str {
        match self {
            ScenarioClass::DenseUrban => "dense_urban",
            ScenarioClass::Urban => "urban",
            ScenarioClass::SuburbanRural => "suburban_rural",
        }
    }
}

impl fmt::Display for ScenarioClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ScenarioClass::DenseUrban => "dense-urban",
            ScenarioClass::Urban => "urban",
            ScenarioClass::SuburbanRural => "suburban-rural",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TableQuantity {
    LosProbability,
    ShadowSigmaLos,
    ShadowSigmaNlos,
    ClutterLoss,
}

impl TableQuantity {
    pub const ALL: [TableQuantity; 4] = [
        TableQuantity::LosProbability,
        TableQuantity::ShadowSigmaLos,
        TableQuantity::ShadowSigmaNlos,
        TableQuantity::ClutterLoss,
    ];

    fn file_suffix(self) -> &'static str {
        match self {
            TableQuantity::LosProbability => "los_probability",
            TableQuantity::ShadowSigmaLos => "shadow_sigma_los",
            TableQuantity::ShadowSigmaNlos => "shadow_sigma_nlos",
            TableQuantity::ClutterLoss => "clutter_loss",
        }
    }
}

pub fn table_file_name(class: ScenarioClass, quantity: TableQuantity) -> String {
    format!("{}_{}.csv", class.file_stem(), quantity.file_suffix())
}

macro_rules! embedded {
    ($name:literal) => {
        ($name, include_str!(concat!("../assets/channel/v1/", $name)))
    };
}

const EMBEDDED_TABLES: [(&str, &str); 12] = [
    embedded!("dense_urban_los_probability.csv"),
    embedded!("dense_urban_shadow_sigma_los.csv"),
    embedded!("dense_urban_shadow_sigma_nlos.csv"),
    embedded!("dense_urban_clutter_loss.csv"),
    embedded!("urban_los_probability.csv"),
    embedded!("urban_shadow_sigma_los.csv"),
    embedded!("urban_shadow_sigma_nlos.csv"),
    embedded!("urban_clutter_loss.csv"),
    embedded!("suburban_rural_los_probability.csv"),
    embedded!("suburban_rural_shadow_sigma_los.csv"),
    embedded!("suburban_rural_shadow_sigma_nlos.csv"),
    embedded!("suburban_rural_clutter_loss.csv"),
];

/// SHA-256 of every shipped table file.
pub const PINNED_TABLE_CHECKSUMS: [(&str, &str); 12] = [
    ("dense_urban_clutter_loss.csv", "2bc37ebbe9cb9a2e10f9351b1b924751d466e551f493949c30eee416093037b0"),
    ("dense_urban_los_probability.csv", "43412876a22029d925d4a060ea80d8ab8cb13037a4b505b3ea431196468d92ff"),
    ("dense_urban_shadow_sigma_los.csv", "92a967474388a6a481b1edfd1146b894d613c79a457872ea6f5bae341a7077df"),
    ("dense_urban_shadow_sigma_nlos.csv", "d0ff18b6ecffe3b1013de3e82d7f69e0239f37c371995cdd21f8dde2f6b5b84e"),
    ("suburban_rural_clutter_loss.csv", "614f278d43351ed23dd46c9f1484e398999847139165c7849d692fe395807f43"),
    ("suburban_rural_los_probability.csv", "fb9164bdf8b56c18aae4913ee7ed786f2b862c8469949925f20248ba7b608ace"),
    ("suburban_rural_shadow_sigma_los.csv", "a4be9e961afd7030eb0a92e16c8bc4f9b7c273aeb27dd4d7afcdaba52e109920"),
    ("suburban_rural_shadow_sigma_nlos.csv", "88e9185533ff998ac2f9bcea7c66a0866a6bc38d4d007f5acf61d735f591f429"),
    ("urban_clutter_loss.csv", "2bc37ebbe9cb9a2e10f9351b1b924751d466e551f493949c30eee416093037b0"),
    ("urban_los_probability.csv", "a696f00078ff2958b034838049988280dbf5ed8c67eb0263fba01d7f40cba8e4"),
    ("urban_shadow_sigma_los.csv", "265afcd312f8bef29c906c80a8811108c73628b8846c35bfbb6bf9f809c63675"),
    ("urban_shadow_sigma_nlos.csv", "2011f3955af7b2ef4cbef72c4fbe5d275107070c1ca714334563e41603fcb814"),
];

/// Piecewise-linear table over elevation in degrees.
#[derive(Debug, Clone, PartialEq)]
pub struct ElevationTable {
    elevations_deg: Vec<f64>,
    values: Vec<f64>,
}

impl ElevationTable {
    pub fn parse(name: &str, text: &str) -> Result<Self, ChannelError> {
        let err = |reason: String| ChannelError::Table {
            name: name.to_string(),
            reason,
        };
        let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty());
        match lines.next() {
            Some("elevation_deg,value") => {}
            other => return Err(err(format!("unexpected header {other:?}"))),
        }
        let mut elevations_deg = Vec::new();
        let mut values = Vec::new();
        for (row, line) in lines.enumerate() {
            let mut cols = line.split(',');
            let (Some(e), Some(v), None) = (cols.next(), cols.next(), cols.next()) else {
                return Err(err(format!("row {}: expected 2 columns", row + 1)));
            };
            let e: f64 = e
                .trim()
                .parse()
                .map_err(|_| err(format!("row {}: bad elevation {e:?}", row + 1)))?;
            let v: f64 = v
                .trim()
                .parse()
                .map_err(|_| err(format!("row {}: bad value {v:?}", row + 1)))?;
            if !(e.is_finite() && v.is_finite()) {
                return Err(err(format!("row {}: non-finite entry", row + 1)));
            }
            if let Some(&prev) = elevations_deg.last() {
                if e <= prev {
                    return Err(err(format!("row {}: elevations must increase", row + 1)));
                }
            }
            elevations_deg.push(e);
            values.push(v);
        }
        if elevations_deg.is_empty() {
            return Err(err("no rows".into()));
        }
        Ok(Self {
            elevations_deg,
            values,
        })
    }

    /// Linear interpolation; clamps outside the tabulated range.
    pub fn lookup_deg(&self, elevation_deg: f64) -> f64 {
        let e = &self.elevations_deg;
        let n = e.len();
        if elevation_deg <= e[0] {
            return self.values[0];
        }
        if elevation_deg >= e[n - 1] {
            return self.values[n - 1];
        }
        let hi = e.partition_point(|&x| x <= elevation_deg);
        let lo = hi - 1;
        if elevation_deg == e[lo] {
            return self.values[lo];
        }
        let w = (elevation_deg - e[lo]) / (e[hi] - e[lo]);
        self.values[lo] + w * (self.values[hi] - self.values[lo])
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn elevations_deg(&self) -> &[f64] {
        &self.elevations_deg
    }
}

#[derive(Debug, Clone)]
struct ClassTables {
    los_probability: ElevationTable,
    sigma_los: ElevationTable,
    sigma_nlos: ElevationTable,
    clutter_loss: ElevationTable,
}

/// Shadow-fading standard deviation and deterministic clutter loss for one link state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShadowingParams {
    pub sigma_db: f64,
    pub clutter_loss_db: f64,
}

/// All LOS/shadowing/clutter tables, immutable after load.
#[derive(Debug, Clone)]
pub struct ChannelTables {
    classes: BTreeMap<ScenarioClass, ClassTables>,
    checksums: BTreeMap<String, String>,
}

impl ChannelTables {
    pub fn embedded() -> Result<Self, ChannelError> {
        Self::from_sources(|name| {
            EMBEDDED_TABLES
                .iter()
                .find(|(n, _)| *n == name)
                .map(|(_, text)| text.to_string())
                .ok_or_else(|| ChannelError::Table {
                    name: name.to_string(),
                    reason: "not embedded".into(),
                })
        })
    }

    /// Loads the twelve table files from a directory.
    pub fn from_dir(dir: &Path) -> Result<Self, ChannelError> {
        Self::from_sources(|name| {
            let path = dir.join(name);
            std::fs::read_to_string(&path).map_err(|source| ChannelError::Io {
                path: path.display().to_string(),
                source,
            })
        })
    }

    fn from_sources<F>(mut read: F) -> Result<Self, ChannelError>
    where
        F: FnMut(&str) -> Result<String, ChannelError>,
    {
        let mut classes = BTreeMap::new();
        let mut checksums = BTreeMap::new();
        for class in ScenarioClass::ALL {
            let mut load = |q: TableQuantity| -> Result<ElevationTable, ChannelError> {
                let name = table_file_name(class, q);
                let text = read(&name)?;
                checksums.insert(name.clone(), hex::encode(Sha256::digest(text.as_bytes())));
                ElevationTable::parse(&name, &text)
            };
            let tables = ClassTables {
                los_probability: load(TableQuantity::LosProbability)?,
                sigma_los: load(TableQuantity::ShadowSigmaLos)?,
                sigma_nlos: load(TableQuantity::ShadowSigmaNlos)?,
                clutter_loss: load(TableQuantity::ClutterLoss)?,
            };
            validate_class(class, &tables)?;
            classes.insert(class, tables);
        }
        Ok(Self { classes, checksums })
    }

    /// SHA-256 hex digest per table file, keyed by file name.
    pub fn checksums(&self) -> &BTreeMap<String, String> {
        &self.checksums
    }

    /// One warning per table whose checksum differs from the pinned value.
    pub fn checksum_warnings(&self) -> Vec<String> {
        PINNED_TABLE_CHECKSUMS
            .iter()
            .filter_map(|(name, pinned)| match self.checksums.get(*name) {
                Some(actual) if actual == pinned => None,
                Some(actual) => Some(format!(
                    "channel table {name} checksum mismatch: expected {pinned}, found {actual}"
                )),
                None => Some(format!("channel table {name} missing")),
            })
            .collect()
    }

    fn class(&self, class: ScenarioClass) -> &ClassTables {
        &self.classes[&class]
    }

    pub fn los_probability(&self, class: ScenarioClass, elevation: f64) -> Result<f64, ChannelError> {
        let deg = check_elevation(elevation)?;
        Ok(self.class(class).los_probability.lookup_deg(deg))
    }

    pub fn shadowing(&self, class: ScenarioClass, elevation: f64, los: bool) -> Result<ShadowingParams, ChannelError> {
        let deg = check_elevation(elevation)?;
        let t = self.class(class);
        Ok(if los {
            ShadowingParams {
                sigma_db: t.sigma_los.lookup_deg(deg),
                clutter_loss_db: 0.0,
            }
        } else {
            ShadowingParams {
                sigma_db: t.sigma_nlos.lookup_deg(deg),
                clutter_loss_db: t.clutter_loss.lookup_deg(deg),
            }
        })
    }

    pub fn table(&self, class: ScenarioClass, quantity: TableQuantity) -> &ElevationTable {
        let t = self.class(class);
        match quantity {
            TableQuantity::LosProbability => &t.los_probability,
            TableQuantity::ShadowSigmaLos => &t.sigma_los,
            TableQuantity::ShadowSigmaNlos => &t.sigma_nlos,
            TableQuantity::ClutterLoss => &t.clutter_loss,
        }
    }

    /// Draws LOS state, shadowing and clutter for one link. With `los_only`
    /// the link is forced LOS and no randomness is consumed.
    pub fn draw<R: Rng + ?Sized>(
        &self,
        class: ScenarioClass,
        elevation: f64,
        los_only: bool,
        rng: &mut R,
    ) -> Result<LargeScaleDraw, ChannelError> {
        if los_only {
            check_elevation(elevation)?;
            return Ok(LargeScaleDraw::LOS_CLEAR);
        }
        let p = self.los_probability(class, elevation)?;
        let los = rng.gen::<f64>() < p;
        let params = self.shadowing(class, elevation, los)?;
        let z: f64 = rng.sample(StandardNormal);
        Ok(LargeScaleDraw {
            los,
            shadow_fading_db: params.sigma_db * z,
            clutter_loss_db: params.clutter_loss_db,
        })
    }
}

fn check_elevation(elevation: f64) -> Result<f64, ChannelError> {
    if !(elevation > 0.0) {
        return Err(ChannelError::BelowHorizon {
            elevation_deg: elevation.to_degrees(),
        });
    }
    Ok(elevation.to_degrees().min(90.0))
}

fn validate_class(class: ScenarioClass, t: &ClassTables) -> Result<(), ChannelError> {
    let fail = |q: TableQuantity, reason: &str| ChannelError::Table {
        name: table_file_name(class, q),
        reason: reason.to_string(),
    };
    let p = t.los_probability.values();
    if p.iter().any(|&v| !(0.0..=1.0).contains(&v)) {
        return Err(fail(TableQuantity::LosProbability, "probabilities must lie in [0, 1]"));
    }
    if p.windows(2).any(|w| w[1] < w[0]) {
        return Err(fail(TableQuantity::LosProbability, "must be non-decreasing in elevation"));
    }
    for (q, table) in [
        (TableQuantity::ShadowSigmaLos, &t.sigma_los),
        (TableQuantity::ShadowSigmaNlos, &t.sigma_nlos),
        (TableQuantity::ClutterLoss, &t.clutter_loss),
    ] {
        if table.values().iter().any(|&v| v < 0.0) {
            return Err(fail(q, "values must be non-negative"));
        }
    }
    if t.sigma_los.elevations_deg() != t.sigma_nlos.elevations_deg()
        || t.sigma_los
            .values()
            .iter()
            .zip(t.sigma_nlos.values())
            .any(|(l, n)| l > n)
    {
        return Err(fail(TableQuantity::ShadowSigmaLos, "LOS sigma must not exceed NLOS sigma on a shared grid"));
    }
    Ok(())
}

/// Shared copy of the embedded tables.
pub fn default_tables() -> &'static ChannelTables {
    static TABLES: OnceLock<ChannelTables> = OnceLock::new();
    TABLES.get_or_init(|| ChannelTables::embedded().expect("embedded channel tables are valid"))
}

pub fn los_probability(class: ScenarioClass, elevation: f64) -> Result<f64, ChannelError> {
    default_tables().los_probability(class, elevation)
}

pub fn shadowing_sigma(class: ScenarioClass, elevation: f64, los: bool) -> Result<ShadowingParams, ChannelError> {
    default_tables().shadowing(class, elevation, los)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LinkDirection {
    LeoDownlink,
    LeoUplink,
    GnssDownlink,
}

/// Transmit power either as a total or as a density scaled by the bandwidth.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum Eirp {
    TotalDbw(f64),
    DensityDbwPerMhz(f64),
}

impl Eirp {
    pub fn total_dbw(&self, bandwidth: f64) -> f64 {
        match *self {
            Eirp::TotalDbw(p) => p,
            Eirp::DensityDbwPerMhz(d) => d + 10.0 * (bandwidth / 1e6).log10(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum LinkBudget {
    /// Transmit EIRP and receiver G/T (dB/K).
    Eirp { eirp: Eirp, g_over_t_dbk: f64 },
    /// Received carrier-to-noise density at nominal geometry plus a coherent integration time.
    ReceivedCn0 { cn0_dbhz: f64, integration_time_s: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LinkParams {
    pub direction: LinkDirection,
    pub carrier_hz: f64,
    pub bandwidth_hz: f64,
    pub budget: LinkBudget,
    /// Polarization, atmospheric and other fixed losses.
    pub extra_losses_db: f64,
    pub neighbor_penalty_db: f64,
    /// Post-integration gain applied to the per-measurement SNR.
    pub processing_gain_db: f64,
}

impl LinkParams {
    pub fn leo_downlink() -> Self {
        Self {
            direction: LinkDirection::LeoDownlink,
            carrier_hz: 2.0e9,
            bandwidth_hz: 10.0e6,
            budget: LinkBudget::Eirp {
                eirp: Eirp::DensityDbwPerMhz(34.0),
                g_over_t_dbk: -31.6,
            },
            extra_losses_db: 0.0,
            neighbor_penalty_db: 0.0,
            processing_gain_db: 0.0,
        }
    }

    /// UE transmits 23 dBm through a 0 dBi antenna.
    pub fn leo_uplink() -> Self {
        Self {
            direction: LinkDirection::LeoUplink,
            carrier_hz: 2.0e9,
            bandwidth_hz: 10.0e6,
            budget: LinkBudget::Eirp {
                eirp: Eirp::TotalDbw(23.0 - 30.0),
                g_over_t_dbk: 1.1,
            },
            extra_losses_db: 0.0,
            neighbor_penalty_db: 0.0,
            processing_gain_db: 0.0,
        }
    }

    pub fn gnss_downlink() -> Self {
        Self {
            direction: LinkDirection::GnssDownlink,
            carrier_hz: 1575.42e6,
            bandwidth_hz: 15.345e6,
            budget: LinkBudget::ReceivedCn0 {
                cn0_dbhz: 44.0,
                integration_time_s: 0.01,
            },
            extra_losses_db: 0.0,
            neighbor_penalty_db: 0.0,
            processing_gain_db: 0.0,
        }
    }

    pub fn validate(&self) -> Result<(), ChannelError> {
        let bad = |field: &'static str, reason: String| Err(ChannelError::InvalidArgument { field, reason });
        if !(self.bandwidth_hz > 0.0 && self.bandwidth_hz.is_finite()) {
            return bad("bandwidth_hz", format!("must be > 0, got {}", self.bandwidth_hz));
        }
        if !(self.carrier_hz > 0.0 && self.carrier_hz.is_finite()) {
            return bad("carrier_hz", format!("must be > 0, got {}", self.carrier_hz));
        }
        if !(self.neighbor_penalty_db >= 0.0) {
            return bad(
                "neighbor_penalty_db",
                format!("must be >= 0, got {}", self.neighbor_penalty_db),
            );
        }
        if let LinkBudget::ReceivedCn0 {
            integration_time_s, ..
        } = self.budget
        {
            if !(integration_time_s > 0.0) {
                return bad(
                    "integration_time_s",
                    format!("must be > 0, got {integration_time_s}"),
                );
            }
        }
        if !(self.extra_losses_db.is_finite() && self.processing_gain_db.is_finite()) {
            return bad("link", "losses and gains must be finite".into());
        }
        Ok(())
    }
}

/// Large-scale random state of one link for one UE drop.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LargeScaleDraw {
    pub los: bool,
    pub shadow_fading_db: f64,
    pub clutter_loss_db: f64,
}

impl LargeScaleDraw {
    pub const LOS_CLEAR: LargeScaleDraw = LargeScaleDraw {
        los: true,
        shadow_fading_db: 0.0,
        clutter_loss_db: 0.0,
    };
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinkRealization {
    pub los: bool,
    pub path_loss_db: f64,
    pub shadow_fading_db: f64,
    pub clutter_loss_db: f64,
    /// Antenna gain relative to peak at the link's off-boresight angle.
    pub antenna_gain_db: f64,
    /// Post-integration SNR per measurement.
    pub snr_db: f64,
}

/// Link budget for one measurement. The noise term is `10 log10(k B)`,
/// with the receiver temperature folded into G/T.
pub fn link_snr(
    params: &LinkParams,
    pattern: &AntennaPattern,
    distance: f64,
    off_boresight: f64,
    draw: &LargeScaleDraw,
) -> Result<LinkRealization, ChannelError> {
    params.validate()?;
    if !(distance > 0.0 && distance.is_finite()) {
        return Err(ChannelError::InvalidArgument {
            field: "distance",
            reason: format!("must be > 0, got {distance}"),
        });
    }
    let path_loss_db = free_space_path_loss(distance, params.carrier_hz);
    let antenna_gain_db = pattern.gain_db(off_boresight);
    let common = antenna_gain_db
        - draw.shadow_fading_db
        - draw.clutter_loss_db
        - params.extra_losses_db
        - params.neighbor_penalty_db
        + params.processing_gain_db;
    let snr_db = match params.budget {
        LinkBudget::Eirp { eirp, g_over_t_dbk } => {
            let noise_db = 10.0 * (BOLTZMANN * params.bandwidth_hz).log10();
            eirp.total_dbw(params.bandwidth_hz) + g_over_t_dbk - path_loss_db - noise_db + common
        }
        LinkBudget::ReceivedCn0 {
            cn0_dbhz,
            integration_time_s,
        } => cn0_dbhz + 10.0 * integration_time_s.log10() + common,
    };
    Ok(LinkRealization {
        los: draw.los,
        path_loss_db,
        shadow_fading_db: draw.shadow_fading_db,
        clutter_loss_db: draw.clutter_loss_db,
        antenna_gain_db,
        snr_db,
    })
}
