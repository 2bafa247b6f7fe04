//! Earth and orbit geometry on a spherical, non-rotating Earth.
//!
//! Everything here is expressed in an Earth-fixed frame. Measurement
//! windows are at most a few seconds long, so Earth rotation during a
//! window is ignored and satellite positions are taken as exactly known.

use std::f64::consts::{FRAC_PI_2, PI};
use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Mean spherical Earth radius in meters.
pub const EARTH_RADIUS_M: f64 = 6_371_000.0;
/// Earth gravitational parameter in m^3/s^2.
pub const MU_EARTH: f64 = 3.986_004_418e14;
/// Speed of light in vacuum, m/s.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeometryError {
    #[error("invalid {field}: {reason}")]
    InvalidArgument { field: &'static str, reason: String },
    #[error("anchor {index} is below the UE horizon (elevation {elevation_deg:.3} deg)")]
    BelowHorizon { index: usize, elevation_deg: f64 },
}

fn invalid(field: &'static str, reason: impl Into<String>) -> GeometryError {
    GeometryError::InvalidArgument {
        field,
        reason: reason.into(),
    }
}

/// A point or displacement in the Earth-centered Earth-fixed frame, meters.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct EcefVector {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl EcefVector {
    pub const ZERO: EcefVector = EcefVector {
        x: 0.0,
        y: 0.0,
        z: 0.0,
    };

    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }

    pub fn dot(&self, other: &EcefVector) -> f64 {
        self.x * other.x + self.y * other.y + self.z * other.z
    }

    pub fn cross(&self, other: &EcefVector) -> EcefVector {
        EcefVector::new(
            self.y * other.z - self.z * other.y,
            self.z * other.x - self.x * other.z,
            self.x * other.y - self.y * other.x,
        )
    }

    pub fn norm(&self) -> f64 {
        self.dot(self).sqrt()
    }

    /// Unit vector in the same direction. The zero vector maps to itself.
    pub fn normalize(&self) -> EcefVector {
        let n = self.norm();
        if n == 0.0 {
            *self
        } else {
            *self * (1.0 / n)
        }
    }

    pub fn distance(&self, other: &EcefVector) -> f64 {
        (*self - *other).norm()
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }
}

impl Add for EcefVector {
    type Output = EcefVector;
    fn add(self, rhs: EcefVector) -> EcefVector {
        EcefVector::new(self.x + rhs.x, self.y + rhs.y, self.z + rhs.z)
    }
}

impl Sub for EcefVector {
    type Output = EcefVector;
    fn sub(self, rhs: EcefVector) -> EcefVector {
        EcefVector::new(self.x - rhs.x, self.y - rhs.y, self.z - rhs.z)
    }
}

impl Mul<f64> for EcefVector {
    type Output = EcefVector;
    fn mul(self, rhs: f64) -> EcefVector {
        EcefVector::new(self.x * rhs, self.y * rhs, self.z * rhs)
    }
}

impl Neg for EcefVector {
    type Output = EcefVector;
    fn neg(self) -> EcefVector {
        EcefVector::new(-self.x, -self.y, -self.z)
    }
}

/// Latitude/longitude in radians and altitude in meters above the sphere.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Geodetic {
    pub latitude: f64,
    pub longitude: f64,
    pub altitude: f64,
}

impl Geodetic {
    /// Builds a geodetic point, wrapping longitude into [-pi, pi).
    pub fn new(latitude: f64, longitude: f64, altitude: f64) -> Result<Self, GeometryError> {
        if !(latitude.is_finite() && longitude.is_finite() && altitude.is_finite()) {
            return Err(invalid("geodetic", "components must be finite"));
        }
        if !(-FRAC_PI_2..=FRAC_PI_2).contains(&latitude) {
            return Err(invalid(
                "latitude",
                format!("{latitude} rad outside [-pi/2, pi/2]"),
            ));
        }
        Ok(Self {
            latitude,
            longitude: wrap_longitude(longitude),
            altitude,
        })
    }

    pub fn from_degrees(lat_deg: f64, lon_deg: f64, altitude: f64) -> Result<Self, GeometryError> {
        Self::new(lat_deg.to_radians(), lon_deg.to_radians(), altitude)
    }

    pub fn latitude_deg(&self) -> f64 {
        self.latitude.to_degrees()
    }

    pub fn longitude_deg(&self) -> f64 {
        self.longitude.to_degrees()
    }
}

fn wrap_longitude(lon: f64) -> f64 {
    let wrapped = (lon + PI).rem_euclid(2.0 * PI) - PI;
    // rem_euclid can round up to exactly 2*pi for tiny negative inputs
    if wrapped >= PI {
        wrapped - 2.0 * PI
    } else {
        wrapped
    }
}

pub fn geodetic_to_ecef(g: &Geodetic) -> EcefVector {
    let r = EARTH_RADIUS_M + g.altitude;
    let (slat, clat) = g.latitude.sin_cos();
    let (slon, clon) = g.longitude.sin_cos();
    EcefVector::new(r * clat * clon, r * clat * slon, r * slat)
}

pub fn ecef_to_geodetic(p: &EcefVector) -> Geodetic {
    let r = p.norm();
    let latitude = if r == 0.0 {
        0.0
    } else {
        (p.z / r).clamp(-1.0, 1.0).asin()
    };
    Geodetic {
        latitude,
        longitude: wrap_longitude(p.y.atan2(p.x)),
        altitude: r - EARTH_RADIUS_M,
    }
}

/// Local east-north-up coordinates in meters.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Enu {
    pub east: f64,
    pub north: f64,
    pub up: f64,
}

impl Enu {
    pub const fn new(east: f64, north: f64, up: f64) -> Self {
        Self { east, north, up }
    }

    pub fn horizontal_norm(&self) -> f64 {
        self.east.hypot(self.north)
    }
}

/// Tangent frame at a point on (or above) the sphere.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LocalFrame {
    pub origin: EcefVector,
    pub east: EcefVector,
    pub north: EcefVector,
    pub up: EcefVector,
}

impl LocalFrame {
    pub fn at(origin: &Geodetic) -> Self {
        let (slat, clat) = origin.latitude.sin_cos();
        let (slon, clon) = origin.longitude.sin_cos();
        Self {
            origin: geodetic_to_ecef(origin),
            east: EcefVector::new(-slon, clon, 0.0),
            north: EcefVector::new(-slat * clon, -slat * slon, clat),
            up: EcefVector::new(clat * clon, clat * slon, slat),
        }
    }

    /// Frame at an ECEF point, using the geocentric up direction.
    pub fn at_ecef(point: &EcefVector) -> Self {
        let mut frame = Self::at(&ecef_to_geodetic(point));
        frame.origin = *point;
        frame
    }

    pub fn to_enu(&self, p: &EcefVector) -> Enu {
        let d = *p - self.origin;
        Enu::new(d.dot(&self.east), d.dot(&self.north), d.dot(&self.up))
    }

    pub fn to_ecef(&self, v: &Enu) -> EcefVector {
        self.origin + self.east * v.east + self.north * v.north + self.up * v.up
    }

    /// Rotates a local east/north/up direction into ECEF without translation.
    pub fn direction(&self, v: &Enu) -> EcefVector {
        self.east * v.east + self.north * v.north + self.up * v.up
    }
}

pub fn ecef_to_enu(point: &EcefVector, origin: &Geodetic) -> Enu {
    LocalFrame::at(origin).to_enu(point)
}

pub fn enu_to_ecef(v: &Enu, origin: &Geodetic) -> EcefVector {
    LocalFrame::at(origin).to_ecef(v)
}

/// Point at great-circle central angle `angle` from `origin` along
/// `azimuth` (clockwise from north), at the given altitude.
pub fn destination(origin: &Geodetic, angle: f64, azimuth: f64, altitude: f64) -> Geodetic {
    let frame = LocalFrame::at(origin);
    let (s, c) = angle.sin_cos();
    let (saz, caz) = azimuth.sin_cos();
    let dir = frame.up * c + (frame.north * caz + frame.east * saz) * s;
    let mut g = ecef_to_geodetic(&dir.normalize());
    g.altitude = altitude;
    g
}

/// Great-circle central angle between two points, radians.
pub fn central_angle(a: &Geodetic, b: &Geodetic) -> f64 {
    let ua = geodetic_to_ecef(a).normalize();
    let ub = geodetic_to_ecef(b).normalize();
    ua.cross(&ub).norm().atan2(ua.dot(&ub))
}

/// Elevation of `sat` above the local horizontal plane at `ue`.
/// Negative values mean the satellite is below the horizon.
pub fn elevation_angle(ue: &EcefVector, sat: &EcefVector) -> f64 {
    let los = (*sat - *ue).normalize();
    los.dot(&ue.normalize()).clamp(-1.0, 1.0).asin()
}

/// Angle at the satellite between the directions to `target` and `boresight_point`.
pub fn off_boresight_angle(sat: &EcefVector, boresight_point: &EcefVector, target: &EcefVector) -> f64 {
    let a = (*boresight_point - *sat).normalize();
    let b = (*target - *sat).normalize();
    a.cross(&b).norm().atan2(a.dot(&b))
}

/// Earth central angle of the ground cap seen by a nadir-pointing beam of
/// half-angle `half_beamwidth` from `altitude`.
pub fn nadir_cap_central_angle(altitude: f64, half_beamwidth: f64) -> f64 {
    let r = EARTH_RADIUS_M + altitude;
    let cos_el = (r * half_beamwidth.sin() / EARTH_RADIUS_M).min(1.0);
    FRAC_PI_2 - half_beamwidth - cos_el.acos()
}

/// Circular orbit about a spherical Earth.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OrbitSpec {
    pub altitude: f64,
    pub inclination: f64,
    /// Longitude of the ascending node in the Earth-fixed frame.
    pub ascending_node: f64,
    /// Argument of latitude at t = 0.
    pub initial_argument_of_latitude: f64,
}

impl OrbitSpec {
    pub fn new(
        altitude: f64,
        inclination: f64,
        ascending_node: f64,
        initial_argument_of_latitude: f64,
    ) -> Result<Self, GeometryError> {
        if !(altitude.is_finite() && altitude > 0.0) {
            return Err(invalid("altitude", format!("must be > 0, got {altitude}")));
        }
        if !(inclination.is_finite() && ascending_node.is_finite() && initial_argument_of_latitude.is_finite()) {
            return Err(invalid("orbit", "angles must be finite"));
        }
        Ok(Self {
            altitude,
            inclination,
            ascending_node,
            initial_argument_of_latitude,
        })
    }

    /// Orbit whose sub-satellite point at t = 0 is `nadir` (ascending pass).
    pub fn passing_over(nadir: &Geodetic, altitude: f64, inclination: f64) -> Result<Self, GeometryError> {
        let si = inclination.sin();
        if nadir.latitude.abs() > inclination.min(PI - inclination) + 1e-12 {
            return Err(invalid(
                "inclination",
                format!(
                    "orbit inclined {:.3} deg never reaches latitude {:.3} deg",
                    inclination.to_degrees(),
                    nadir.latitude.to_degrees()
                ),
            ));
        }
        let u = (nadir.latitude.sin() / si).clamp(-1.0, 1.0).asin();
        let node = nadir.longitude - (inclination.cos() * u.sin()).atan2(u.cos());
        Self::new(altitude, inclination, wrap_longitude(node), u)
    }

    pub fn radius(&self) -> f64 {
        EARTH_RADIUS_M + self.altitude
    }

    /// Mean motion in rad/s.
    pub fn angular_rate(&self) -> f64 {
        (MU_EARTH / self.radius().powi(3)).sqrt()
    }

    pub fn speed(&self) -> f64 {
        (MU_EARTH / self.radius()).sqrt()
    }

    pub fn period(&self) -> f64 {
        2.0 * PI / self.angular_rate()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SatelliteRole {
    ServingLeo,
    NeighborLeo,
    Gnss,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SatelliteState {
    pub position: EcefVector,
    /// m/s
    pub velocity: EcefVector,
    /// Seconds since the scenario epoch.
    pub time: f64,
    pub role: SatelliteRole,
}

/// Ordered anchors with one designated serving satellite.
#[derive(Debug, Clone, PartialEq)]
pub struct AnchorSet {
    states: Vec<SatelliteState>,
    serving: usize,
}

impl AnchorSet {
    pub fn new(states: Vec<SatelliteState>, serving: usize) -> Result<Self, GeometryError> {
        if states.is_empty() {
            return Err(invalid("anchors", "anchor set is empty"));
        }
        if serving >= states.len() {
            return Err(invalid(
                "serving",
                format!("index {serving} out of range for {} anchors", states.len()),
            ));
        }
        if let Some(bad) = states.iter().position(|s| !s.position.is_finite()) {
            return Err(invalid("anchors", format!("anchor {bad} has a non-finite position")));
        }
        Ok(Self { states, serving })
    }

    pub fn states(&self) -> &[SatelliteState] {
        &self.states
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn serving_index(&self) -> usize {
        self.serving
    }

    pub fn serving(&self) -> &SatelliteState {
        &self.states[self.serving]
    }

    pub fn positions(&self) -> impl Iterator<Item = EcefVector> + '_ {
        self.states.iter().map(|s| s.position)
    }

    /// Subset keeping the given indices in order. The serving satellite must be among them.
    pub fn subset(&self, indices: &[usize]) -> Result<AnchorSet, GeometryError> {
        let serving = indices
            .iter()
            .position(|&i| i == self.serving)
            .ok_or_else(|| invalid("indices", "subset must contain the serving satellite"))?;
        let states = indices
            .iter()
            .map(|&i| {
                self.states
                    .get(i)
                    .copied()
                    .ok_or_else(|| invalid("indices", format!("index {i} out of range")))
            })
            .collect::<Result<Vec<_>, _>>()?;
        AnchorSet::new(states, serving)
    }
}

pub fn propagate_circular_orbit(spec: &OrbitSpec, t: f64) -> SatelliteState {
    propagate_with_role(spec, t, SatelliteRole::ServingLeo)
}

pub fn propagate_with_role(spec: &OrbitSpec, t: f64, role: SatelliteRole) -> SatelliteState {
    let r = spec.radius();
    let omega = spec.angular_rate();
    let u = spec.initial_argument_of_latitude + omega * t;
    let (su, cu) = u.sin_cos();
    let (sn, cn) = spec.ascending_node.sin_cos();
    let (si, ci) = spec.inclination.sin_cos();
    let position = EcefVector::new(
        r * (cn * cu - sn * su * ci),
        r * (sn * cu + cn * su * ci),
        r * su * si,
    );
    let v = r * omega;
    let velocity = EcefVector::new(
        v * (-cn * su - sn * cu * ci),
        v * (-sn * su + cn * cu * ci),
        v * cu * si,
    );
    SatelliteState {
        position,
        velocity,
        time: t,
        role,
    }
}

/// Sample times of `n` virtual anchors spread evenly over a window of
/// length `measurement_time` centered on the epoch, endpoints included.
pub fn virtual_anchor_times(measurement_time: f64, n_anchors: usize) -> Vec<f64> {
    let step = measurement_time / (n_anchors - 1) as f64;
    (0..n_anchors)
        .map(|i| -0.5 * measurement_time + step * i as f64)
        .collect()
}

/// Positions of one moving satellite at `n_anchors` instants, each treated
/// as an independent anchor.
pub fn make_virtual_anchors(
    spec: &OrbitSpec,
    measurement_time: f64,
    n_anchors: usize,
) -> Result<AnchorSet, GeometryError> {
    if !(measurement_time.is_finite() && measurement_time > 0.0) {
        return Err(invalid(
            "measurement_time",
            format!("must be > 0, got {measurement_time}"),
        ));
    }
    if n_anchors < 2 {
        return Err(invalid("n_anchors", format!("need at least 2, got {n_anchors}")));
    }
    let states = virtual_anchor_times(measurement_time, n_anchors)
        .into_iter()
        .map(|t| propagate_circular_orbit(spec, t))
        .collect();
    AnchorSet::new(states, n_anchors / 2)
}

/// Seven satellites on a hexagonal grid: the serving satellite over
/// `center`, two same-row neighbors at +/- `lon_gap`, and four in the rows
/// at +/- `lat_gap` offset by half a longitude gap.
///
/// Order: center, east, west, north-east, north-west, south-east, south-west.
/// All satellites fly northbound polar orbits.
pub fn hex_constellation(
    center: &Geodetic,
    lon_gap: f64,
    lat_gap: f64,
    altitude: f64,
) -> Result<AnchorSet, GeometryError> {
    if !(lon_gap > 0.0 && lon_gap.is_finite()) {
        return Err(invalid("lon_gap", format!("must be > 0, got {lon_gap}")));
    }
    if !(lat_gap >= 0.0 && lat_gap.is_finite()) {
        return Err(invalid("lat_gap", format!("must be >= 0, got {lat_gap}")));
    }
    let offsets = [
        (0.0, 0.0),
        (0.0, lon_gap),
        (0.0, -lon_gap),
        (lat_gap, 0.5 * lon_gap),
        (lat_gap, -0.5 * lon_gap),
        (-lat_gap, 0.5 * lon_gap),
        (-lat_gap, -0.5 * lon_gap),
    ];
    let states = offsets
        .iter()
        .enumerate()
        .map(|(i, (dlat, dlon))| {
            let lat = center.latitude + dlat;
            if lat.abs() >= FRAC_PI_2 {
                return Err(invalid("lat_gap", "grid row crosses a pole"));
            }
            let nadir = Geodetic::new(lat, center.longitude + dlon, 0.0)?;
            let orbit = OrbitSpec::passing_over(&nadir, altitude, FRAC_PI_2)?;
            let role = if i == 0 {
                SatelliteRole::ServingLeo
            } else {
                SatelliteRole::NeighborLeo
            };
            Ok(propagate_with_role(&orbit, 0.0, role))
        })
        .collect::<Result<Vec<_>, _>>()?;
    AnchorSet::new(states, 0)
}

/// Orbit of the serving (center) satellite of [`hex_constellation`].
pub fn hex_serving_orbit(center: &Geodetic, altitude: f64) -> Result<OrbitSpec, GeometryError> {
    let nadir = Geodetic::new(center.latitude, center.longitude, 0.0)?;
    OrbitSpec::passing_over(&nadir, altitude, FRAC_PI_2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn g(lat: f64, lon: f64, alt: f64) -> Geodetic {
        Geodetic::new(lat, lon, alt).unwrap()
    }

    #[test]
    fn geodetic_to_ecef_axes() {
        let p = geodetic_to_ecef(&g(0.0, 0.0, 0.0));
        assert_abs_diff_eq!(p.x, 6_371_000.0, epsilon = 1e-6);
        assert_abs_diff_eq!(p.y, 0.0, epsilon = 1e-6);
        assert_abs_diff_eq!(p.z, 0.0, epsilon = 1e-6);

        let p = geodetic_to_ecef(&g(FRAC_PI_2, 0.0, 0.0));
        assert_abs_diff_eq!(p.x, 0.0, epsilon = 1e-6);
        assert_abs_diff_eq!(p.z, 6_371_000.0, epsilon = 1e-6);

        let p = geodetic_to_ecef(&g(0.0, FRAC_PI_2, 600_000.0));
        assert_abs_diff_eq!(p.x, 0.0, epsilon = 1e-6);
        assert_abs_diff_eq!(p.y, 6_971_000.0, epsilon = 1e-6);
        assert_abs_diff_eq!(p.z, 0.0, epsilon = 1e-6);
    }

    #[test]
    fn latitude_out_of_range_rejected() {
        assert!(Geodetic::new(2.0, 0.0, 0.0).is_err());
        assert!(Geodetic::new(f64::NAN, 0.0, 0.0).is_err());
    }

    #[test]
    fn longitude_wraps_to_half_open_interval() {
        assert_abs_diff_eq!(g(0.0, PI, 0.0).longitude, -PI, epsilon = 1e-15);
        assert_abs_diff_eq!(g(0.0, 3.0 * PI / 2.0, 0.0).longitude, -FRAC_PI_2, epsilon = 1e-12);
    }

    #[test]
    fn enu_identity_and_up_axis() {
        let origin = g(0.3, -1.1, 0.0);
        let o = geodetic_to_ecef(&origin);
        let e = ecef_to_enu(&o, &origin);
        assert_abs_diff_eq!(e.east, 0.0, epsilon = 1e-9);
        assert_abs_diff_eq!(e.north, 0.0, epsilon = 1e-9);
        assert_abs_diff_eq!(e.up, 0.0, epsilon = 1e-9);

        let above = geodetic_to_ecef(&g(0.3, -1.1, 1000.0));
        let e = ecef_to_enu(&above, &origin);
        assert_abs_diff_eq!(e.east, 0.0, epsilon = 1e-6);
        assert_abs_diff_eq!(e.north, 0.0, epsilon = 1e-6);
        assert_abs_diff_eq!(e.up, 1000.0, epsilon = 1e-6);
    }

    #[test]
    fn orbit_speed_and_periodicity() {
        let spec = OrbitSpec::new(600_000.0, 0.9, 0.2, 0.4).unwrap();
        assert!((spec.speed() - 7560.0).abs() < 10.0, "speed {}", spec.speed());
        let s0 = propagate_circular_orbit(&spec, 0.0);
        let s1 = propagate_circular_orbit(&spec, spec.period());
        assert!(s0.position.distance(&s1.position) < 1e-3);
        assert_abs_diff_eq!(s0.position.norm(), 6_971_000.0, epsilon = 1e-6);
        assert_abs_diff_eq!(s0.velocity.norm(), spec.speed(), epsilon = 1e-6);
        assert!(s0.velocity.dot(&s0.position).abs() / (s0.velocity.norm() * s0.position.norm()) < 1e-12);
    }

    #[test]
    fn passing_over_puts_nadir_at_requested_point() {
        let nadir = g(0.4, 1.3, 0.0);
        let spec = OrbitSpec::passing_over(&nadir, 600_000.0, 53f64.to_radians()).unwrap();
        let s = propagate_circular_orbit(&spec, 0.0);
        let sub = ecef_to_geodetic(&s.position);
        assert_abs_diff_eq!(sub.latitude, nadir.latitude, epsilon = 1e-12);
        assert_abs_diff_eq!(sub.longitude, nadir.longitude, epsilon = 1e-12);
        assert!(OrbitSpec::passing_over(&g(1.2, 0.0, 0.0), 600_000.0, 0.5).is_err());
    }

    #[test]
    fn elevation_cases() {
        let ue = geodetic_to_ecef(&g(0.2, 0.5, 0.0));
        let overhead = geodetic_to_ecef(&g(0.2, 0.5, 600_000.0));
        assert_abs_diff_eq!(elevation_angle(&ue, &overhead), FRAC_PI_2, epsilon = 1e-9);

        let frame = LocalFrame::at(&g(0.2, 0.5, 0.0));
        let horizontal = frame.to_ecef(&Enu::new(1.0e5, 2.0e5, 0.0));
        assert_abs_diff_eq!(elevation_angle(&ue, &horizontal), 0.0, epsilon = 1e-12);

        let antipode = -ue * 1.1;
        assert!(elevation_angle(&ue, &antipode) < 0.0);
    }

    #[test]
    fn virtual_anchor_span() {
        let spec = OrbitSpec::passing_over(&g(0.0, 0.0, 0.0), 600_000.0, 1.0).unwrap();
        let a10 = make_virtual_anchors(&spec, 10.0, 10).unwrap();
        let first = a10.states()[0].position;
        let last = a10.states()[9].position;
        let span = first.distance(&last);
        let arc = spec.speed() * 10.0;
        // chord of a 75.6 km arc at orbit radius
        assert!((span - 75_600.0).abs() < 300.0, "span {span}");
        assert!(span < arc);

        let a2 = make_virtual_anchors(&spec, 2.0, 10).unwrap();
        let span2 = a2.states()[0].position.distance(&a2.states()[9].position);
        assert!((span / span2 - 5.0).abs() < 1e-4);

        let pair = make_virtual_anchors(&spec, 4.0, 2).unwrap();
        assert_abs_diff_eq!(pair.states()[0].time, -2.0);
        assert_abs_diff_eq!(pair.states()[1].time, 2.0);

        assert!(make_virtual_anchors(&spec, 0.0, 10).is_err());
        assert!(make_virtual_anchors(&spec, 1.0, 1).is_err());
    }

    #[test]
    fn hex_grid_structure() {
        let center = g(0.0, 0.0, 0.0);
        let set = hex_constellation(&center, 13f64.to_radians(), 6.9f64.to_radians(), 780_000.0).unwrap();
        assert_eq!(set.len(), 7);
        assert_eq!(set.serving_index(), 0);
        let serving_count = set
            .states()
            .iter()
            .filter(|s| s.role == SatelliteRole::ServingLeo)
            .count();
        assert_eq!(serving_count, 1);
        let d = set.states()[0].position.distance(&set.states()[1].position);
        assert!((d - 1_633_400.0).abs() / 1_633_400.0 < 0.05, "chord {d}");
        assert!((d - 1_619_000.0).abs() < 1_000.0);

        let flat = hex_constellation(&center, 0.2, 0.0, 780_000.0).unwrap();
        let d = flat.states()[0].position.distance(&flat.states()[1].position);
        assert_abs_diff_eq!(d, 2.0 * 7_151_000.0 * 0.1f64.sin(), epsilon = 1e-6);
    }

    #[test]
    fn cap_radius_for_default_beam() {
        let half = 4.4127f64.to_radians() / 2.0;
        let psi = nadir_cap_central_angle(600_000.0, half);
        let ground = psi * EARTH_RADIUS_M;
        assert!((ground - 23_100.0).abs() < 100.0, "cap radius {ground}");
    }
}
