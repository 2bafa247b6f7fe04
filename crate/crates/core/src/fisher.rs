//! Ranging accuracy, measurement Jacobians and Fisher information for the
//! 2-D horizontal UE position at known altitude.
//!
//! The unknown is the UE's east/north displacement in the local tangent
//! frame at its true position. RTT ranges need no clock nuisance parameter
//! and TDOA differences cancel the UE clock against a reference anchor.

use std::f64::consts::PI;
use std::ops::Add;

use itertools::Itertools;
use nalgebra::{DMatrix, Matrix2, SymmetricEigen};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{elevation_angle, AnchorSet, EcefVector, GeometryError, LocalFrame, SPEED_OF_LIGHT};

/// Smallest FIM eigenvalue (m^-2) below which the bound is reported as degenerate.
pub const DEFAULT_DEGENERATE_THRESHOLD: f64 = 1e-12;

#[derive(Debug, Error)]
pub enum FisherError {
    #[error("linear SNR must be positive and finite, got {snr_db} dB")]
    NonPositiveSnr { snr_db: f64 },
    #[error("invalid {field}: {reason}")]
    InvalidArgument { field: &'static str, reason: String },
    #[error("need at least {needed} anchors, got {got}")]
    TooFewAnchors { needed: usize, got: usize },
    #[error("covariance is not positive definite")]
    SingularCovariance,
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MeasurementKind {
    Rtt,
    Tdoa,
}

/// One-way delay CRLB converted to range, assuming a flat spectrum of
/// width `bandwidth` (RMS bandwidth B/sqrt(12)).
pub fn toa_range_sigma(snr_db: f64, bandwidth: f64) -> Result<f64, FisherError> {
    if !(bandwidth > 0.0 && bandwidth.is_finite()) {
        return Err(FisherError::InvalidArgument {
            field: "bandwidth",
            reason: format!("must be > 0, got {bandwidth}"),
        });
    }
    let snr = 10f64.powf(snr_db / 10.0);
    if !(snr > 0.0) || snr_db.is_nan() {
        return Err(FisherError::NonPositiveSnr { snr_db });
    }
    if snr.is_infinite() {
        return Ok(0.0);
    }
    Ok(SPEED_OF_LIGHT * (3.0 / (2.0 * PI * PI * bandwidth * bandwidth * snr)).sqrt())
}

/// Range sigma of a round trip: range = c * RTT / 2 averages the two one-way delays.
pub fn rtt_range_sigma(sigma_dl: f64, sigma_ul: f64) -> f64 {
    0.5 * (sigma_dl * sigma_dl + sigma_ul * sigma_ul).sqrt()
}

/// Covariance of range differences against `reference`. Rows follow anchor
/// order with the reference removed.
pub fn tdoa_covariance(sigmas: &[f64], reference: usize) -> Result<DMatrix<f64>, FisherError> {
    if sigmas.len() < 2 {
        return Err(FisherError::TooFewAnchors {
            needed: 2,
            got: sigmas.len(),
        });
    }
    if reference >= sigmas.len() {
        return Err(FisherError::InvalidArgument {
            field: "reference",
            reason: format!("index {reference} out of range"),
        });
    }
    let var_ref = sigmas[reference] * sigmas[reference];
    let others: Vec<f64> = sigmas
        .iter()
        .enumerate()
        .filter(|(i, _)| *i != reference)
        .map(|(_, s)| s * s)
        .collect();
    let m = others.len();
    Ok(DMatrix::from_fn(m, m, |i, j| {
        if i == j {
            others[i] + var_ref
        } else {
            var_ref
        }
    }))
}

/// RTT or TDOA observables over an anchor set, with their full covariance.
#[derive(Debug, Clone)]
pub struct MeasurementSet {
    kind: MeasurementKind,
    anchors: AnchorSet,
    reference: Option<usize>,
    sigma_dl: Vec<f64>,
    sigma_ul: Option<Vec<f64>>,
    covariance: DMatrix<f64>,
}

fn check_sigmas(name: &'static str, sigmas: &[f64], n: usize) -> Result<(), FisherError> {
    if sigmas.len() != n {
        return Err(FisherError::DimensionMismatch(format!(
            "{name} has {} entries for {n} anchors",
            sigmas.len()
        )));
    }
    if sigmas.iter().any(|s| !(s.is_finite() && *s >= 0.0)) {
        return Err(FisherError::InvalidArgument {
            field: name,
            reason: "sigmas must be finite and non-negative".into(),
        });
    }
    Ok(())
}

impl MeasurementSet {
    /// Independent round-trip ranges, one per anchor.
    pub fn rtt(anchors: AnchorSet, sigma_dl: Vec<f64>, sigma_ul: Vec<f64>) -> Result<Self, FisherError> {
        check_sigmas("sigma_dl", &sigma_dl, anchors.len())?;
        check_sigmas("sigma_ul", &sigma_ul, anchors.len())?;
        let var: Vec<f64> = sigma_dl
            .iter()
            .zip(&sigma_ul)
            .map(|(d, u)| rtt_range_sigma(*d, *u).powi(2))
            .collect();
        let covariance = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(var));
        Ok(Self {
            kind: MeasurementKind::Rtt,
            anchors,
            reference: None,
            sigma_dl,
            sigma_ul: Some(sigma_ul),
            covariance,
        })
    }

    /// Downlink range differences against `reference`. `sync_sigma` is a
    /// per-satellite timing error (as range) added in quadrature.
    pub fn tdoa(anchors: AnchorSet, reference: usize, sigma_dl: Vec<f64>, sync_sigma: f64) -> Result<Self, FisherError> {
        check_sigmas("sigma_dl", &sigma_dl, anchors.len())?;
        if !(sync_sigma >= 0.0 && sync_sigma.is_finite()) {
            return Err(FisherError::InvalidArgument {
                field: "sync_sigma",
                reason: format!("must be >= 0, got {sync_sigma}"),
            });
        }
        let effective: Vec<f64> = sigma_dl.iter().map(|s| s.hypot(sync_sigma)).collect();
        let covariance = tdoa_covariance(&effective, reference)?;
        Ok(Self {
            kind: MeasurementKind::Tdoa,
            anchors,
            reference: Some(reference),
            sigma_dl,
            sigma_ul: None,
            covariance,
        })
    }

    pub fn kind(&self) -> MeasurementKind {
        self.kind
    }

    pub fn anchors(&self) -> &AnchorSet {
        &self.anchors
    }

    pub fn reference(&self) -> Option<usize> {
        self.reference
    }

    pub fn sigma_dl(&self) -> &[f64] {
        &self.sigma_dl
    }

    pub fn sigma_ul(&self) -> Option<&[f64]> {
        self.sigma_ul.as_deref()
    }

    pub fn covariance(&self) -> &DMatrix<f64> {
        &self.covariance
    }

    /// Number of scalar observables.
    pub fn len(&self) -> usize {
        self.covariance.nrows()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Noise-free observables for a UE at `ue`: ranges (rtt) or range
    /// differences against the reference (tdoa).
    pub fn model(&self, ue: &EcefVector) -> Vec<f64> {
        let ranges: Vec<f64> = self.anchors.positions().map(|a| a.distance(ue)).collect();
        match self.reference {
            None => ranges,
            Some(r) => ranges
                .iter()
                .enumerate()
                .filter(|(i, _)| *i != r)
                .map(|(_, d)| d - ranges[r])
                .collect(),
        }
    }
}

/// Partials of each observable with respect to UE east/north displacement (M x 2).
pub fn jacobian(ue: &EcefVector, set: &MeasurementSet) -> Result<DMatrix<f64>, FisherError> {
    let frame = LocalFrame::at_ecef(ue);
    let mut rows = Vec::with_capacity(set.anchors().len());
    for (index, anchor) in set.anchors().positions().enumerate() {
        let el = elevation_angle(ue, &anchor);
        if !(el > 0.0) {
            return Err(GeometryError::BelowHorizon {
                index,
                elevation_deg: el.to_degrees(),
            }
            .into());
        }
        let los = (anchor - *ue).normalize();
        rows.push([-los.dot(&frame.east), -los.dot(&frame.north)]);
    }
    let out: Vec<[f64; 2]> = match set.reference() {
        None => rows,
        Some(r) => rows
            .iter()
            .enumerate()
            .filter(|(i, _)| *i != r)
            .map(|(_, row)| [row[0] - rows[r][0], row[1] - rows[r][1]])
            .collect(),
    };
    Ok(DMatrix::from_fn(out.len(), 2, |i, j| out[i][j]))
}

/// Fisher information about the horizontal UE position (m^-2), plus the
/// same information with measurement noise normalized to unit mean variance
/// (used for GDOP).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Fim {
    pub info: Matrix2<f64>,
    pub unit_info: Matrix2<f64>,
}

impl Fim {
    pub fn zero() -> Self {
        Self {
            info: Matrix2::zeros(),
            unit_info: Matrix2::zeros(),
        }
    }

    pub fn for_set(ue: &EcefVector, set: &MeasurementSet) -> Result<Self, FisherError> {
        fim(&jacobian(ue, set)?, set.covariance())
    }

    /// Congruent transform for a rotation of the east/north frame by `angle`.
    pub fn rotated(&self, angle: f64) -> Self {
        let (s, c) = angle.sin_cos();
        let rot = Matrix2::new(c, -s, s, c);
        Self {
            info: rot * self.info * rot.transpose(),
            unit_info: rot * self.unit_info * rot.transpose(),
        }
    }
}

impl Add for Fim {
    type Output = Fim;
    fn add(self, rhs: Fim) -> Fim {
        Fim {
            info: self.info + rhs.info,
            unit_info: self.unit_info + rhs.unit_info,
        }
    }
}

impl std::iter::Sum for Fim {
    fn sum<I: Iterator<Item = Fim>>(iter: I) -> Fim {
        iter.fold(Fim::zero(), Add::add)
    }
}

/// `J^T R^-1 J`.
pub fn fim(j: &DMatrix<f64>, r: &DMatrix<f64>) -> Result<Fim, FisherError> {
    if j.ncols() != 2 || r.nrows() != j.nrows() || r.ncols() != j.nrows() {
        return Err(FisherError::DimensionMismatch(format!(
            "jacobian {}x{}, covariance {}x{}",
            j.nrows(),
            j.ncols(),
            r.nrows(),
            r.ncols()
        )));
    }
    let chol = r.clone().cholesky().ok_or(FisherError::SingularCovariance)?;
    let w = chol.solve(j);
    let info_d = j.transpose() * w;
    let info = Matrix2::new(info_d[(0, 0)], info_d[(0, 1)], info_d[(1, 0)], info_d[(1, 1)]);
    let info = 0.5 * (info + info.transpose());
    let mean_var = r.diagonal().mean();
    Ok(Fim {
        info,
        unit_info: info * mean_var,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PebResult {
    /// sqrt(trace(FIM^-1)) in meters; `None` when degenerate.
    pub peb: Option<f64>,
    pub gdop: Option<f64>,
    /// Ratio of the largest to smallest FIM eigenvalue.
    pub condition_number: f64,
}

impl PebResult {
    pub fn is_degenerate(&self) -> bool {
        self.peb.is_none()
    }
}

fn eigenvalues(m: &Matrix2<f64>) -> (f64, f64) {
    let e = SymmetricEigen::new(*m).eigenvalues;
    (e[0].min(e[1]), e[0].max(e[1]))
}

fn root_trace_inverse(m: &Matrix2<f64>) -> Option<f64> {
    let det = m.determinant();
    if !(det > 0.0) {
        return None;
    }
    let v = ((m[(0, 0)] + m[(1, 1)]) / det).sqrt();
    v.is_finite().then_some(v)
}

pub fn peb(f: &Fim) -> PebResult {
    peb_with_threshold(f, DEFAULT_DEGENERATE_THRESHOLD)
}

pub fn peb_with_threshold(f: &Fim, threshold: f64) -> PebResult {
    let (lo, hi) = eigenvalues(&f.info);
    let condition_number = if lo > 0.0 { hi / lo } else { f64::INFINITY };
    if !(lo >= threshold) || !lo.is_finite() {
        return PebResult {
            peb: None,
            gdop: None,
            condition_number,
        };
    }
    let (ulo, _) = eigenvalues(&f.unit_info);
    PebResult {
        peb: root_trace_inverse(&f.info),
        gdop: if ulo > 0.0 { root_trace_inverse(&f.unit_info) } else { None },
        condition_number,
    }
}

/// Unit-sigma GDOP of a measurement kind over an anchor set, serving
/// satellite as the TDOA reference. `None` if degenerate.
pub fn geometry_gdop(ue: &EcefVector, anchors: &AnchorSet, kind: MeasurementKind) -> Result<Option<f64>, FisherError> {
    let n = anchors.len();
    let ones = vec![1.0; n];
    let set = match kind {
        MeasurementKind::Rtt => MeasurementSet::rtt(anchors.clone(), ones.clone(), ones)?,
        MeasurementKind::Tdoa => MeasurementSet::tdoa(anchors.clone(), anchors.serving_index(), ones, 0.0)?,
    };
    let f = Fim::for_set(ue, &set)?;
    Ok(peb(&f).gdop)
}

/// Picks the `k`-subset containing the serving satellite with the smallest
/// GDOP for the UE, by exhaustive search. Subsets are visited in
/// lexicographic index order and only a strictly better GDOP replaces the
/// incumbent, so ties resolve to the lowest indices. Returns the subset and
/// its indices into `visible`.
pub fn select_satellites(
    visible: &AnchorSet,
    k: usize,
    ue: &EcefVector,
    kind: MeasurementKind,
) -> Result<(AnchorSet, Vec<usize>), FisherError> {
    let n = visible.len();
    if k > n {
        return Err(FisherError::InvalidArgument {
            field: "k",
            reason: format!("cannot select {k} of {n} visible satellites"),
        });
    }
    if k == 0 {
        return Err(FisherError::InvalidArgument {
            field: "k",
            reason: "must select at least the serving satellite".into(),
        });
    }
    let serving = visible.serving_index();
    let others: Vec<usize> = (0..n).filter(|&i| i != serving).collect();
    let mut best: Option<(f64, Vec<usize>)> = None;
    for combo in others.into_iter().combinations(k - 1) {
        let mut idx = combo;
        idx.push(serving);
        idx.sort_unstable();
        let subset = visible.subset(&idx)?;
        let g = match geometry_gdop(ue, &subset, kind) {
            Ok(Some(g)) => g,
            Ok(None) => f64::INFINITY,
            Err(FisherError::Geometry(GeometryError::BelowHorizon { .. })) => continue,
            Err(e) => return Err(e),
        };
        let better = match &best {
            None => true,
            Some((bg, _)) => g < bg * (1.0 - 1e-9) || (bg.is_infinite() && g.is_finite()),
        };
        if better {
            best = Some((g, idx));
        }
    }
    let (_, idx) = best.ok_or_else(|| FisherError::InvalidArgument {
        field: "visible",
        reason: "no subset has every satellite above the horizon".into(),
    })?;
    Ok((visible.subset(&idx)?, idx))
}
