//! Iterative least-squares position solver used as an oracle for the bound.
//!
//! Synthetic measurements are drawn with exactly the covariance the Fisher
//! information assumes, then solved by weighted Gauss-Newton over the 2-D
//! horizontal position at fixed altitude. At high SNR the empirical RMSE
//! should approach the PEB.

use nalgebra::{DMatrix, DVector, Matrix2, SymmetricEigen, Vector2};
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::channel::ChannelTables;
use crate::fisher::{jacobian, peb_with_threshold, Fim, FisherError, MeasurementSet, DEFAULT_DEGENERATE_THRESHOLD};
use crate::geometry::{ecef_to_geodetic, geodetic_to_ecef, Enu, Geodetic, LocalFrame};
use crate::rng::{substream, Purpose};
use crate::scenarios::{coverage_center, measurement_sets, serving_satellite, ScenarioConfig, ScenarioError, Variant};

#[derive(Debug, Error)]
pub enum EstimatorError {
    #[error("degenerate geometry at iteration {iteration}: smallest unit-noise normal-matrix eigenvalue {min_eigenvalue:e}")]
    DegenerateGeometry { iteration: usize, min_eigenvalue: f64 },
    #[error("invalid argument `{field}`: {reason}")]
    InvalidArgument { field: &'static str, reason: String },
    #[error(transparent)]
    Fisher(#[from] FisherError),
    #[error(transparent)]
    Scenario(#[from] ScenarioError),
}

/// Observed values for one or more independent measurement sets.
#[derive(Debug, Clone)]
pub struct SyntheticMeasurements {
    pub sets: Vec<MeasurementSet>,
    /// One vector per set, meters.
    pub observed: Vec<Vec<f64>>,
    pub truth: Geodetic,
}

/// Lower-triangular `L` with `L Lᵀ = cov`, tolerating semi-definite input.
fn noise_factor(cov: &DMatrix<f64>) -> DMatrix<f64> {
    if let Some(ch) = cov.clone().cholesky() {
        return ch.l();
    }
    let eig = SymmetricEigen::new(cov.clone());
    let sqrt = eig.eigenvalues.map(|v| v.max(0.0).sqrt());
    &eig.eigenvectors * DMatrix::from_diagonal(&sqrt)
}

/// Geometric truth plus zero-mean Gaussian noise with each set's covariance,
/// drawn from the `(seed, trial)` substream.
pub fn simulate_measurements(truth: &Geodetic, sets: &[MeasurementSet], seed: u64, trial: u64) -> SyntheticMeasurements {
    let mut rng = substream(seed, Purpose::MeasurementNoise, trial);
    simulate_with_rng(truth, sets, &mut rng)
}

pub fn simulate_with_rng<R: Rng + ?Sized>(truth: &Geodetic, sets: &[MeasurementSet], rng: &mut R) -> SyntheticMeasurements {
    let ue = geodetic_to_ecef(truth);
    let observed = sets
        .iter()
        .map(|set| {
            let l = noise_factor(set.covariance());
            let z = DVector::from_fn(set.len(), |_, _| rng.sample::<f64, _>(StandardNormal));
            let noise = l * z;
            set.model(&ue).iter().zip(noise.iter()).map(|(m, n)| m + n).collect()
        })
        .collect();
    SyntheticMeasurements {
        sets: sets.to_vec(),
        observed,
        truth: *truth,
    }
}

/// Noise-free observations of `truth`.
pub fn noiseless_measurements(truth: &Geodetic, sets: &[MeasurementSet]) -> SyntheticMeasurements {
    let ue = geodetic_to_ecef(truth);
    SyntheticMeasurements {
        sets: sets.to_vec(),
        observed: sets.iter().map(|s| s.model(&ue)).collect(),
        truth: *truth,
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverOptions {
    pub max_iterations: usize,
    /// Converged once the applied step is shorter than this, meters.
    pub step_tolerance_m: f64,
    /// Smallest admissible eigenvalue of the normal matrix after scaling the
    /// noise to unit mean variance (dimensionless).
    pub degenerate_threshold: f64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            max_iterations: 50,
            step_tolerance_m: 1e-4,
            degenerate_threshold: DEFAULT_DEGENERATE_THRESHOLD,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolveResult {
    pub estimate: Geodetic,
    pub iterations: usize,
    pub converged: bool,
    /// sqrt(rᵀ R⁻¹ r) at the estimate.
    pub residual_norm: f64,
}

struct Weighted {
    weight: DMatrix<f64>,
}

fn weights(sets: &[MeasurementSet]) -> Vec<Weighted> {
    sets.iter()
        .map(|s| {
            let weight = s
                .covariance()
                .clone()
                .cholesky()
                .map(|c| c.inverse())
                .unwrap_or_else(|| DMatrix::identity(s.len(), s.len()));
            Weighted { weight }
        })
        .collect()
}

fn residuals(m: &SyntheticMeasurements, at: &Geodetic) -> Vec<DVector<f64>> {
    let ue = geodetic_to_ecef(at);
    m.sets
        .iter()
        .zip(&m.observed)
        .map(|(set, obs)| {
            let model = set.model(&ue);
            DVector::from_iterator(obs.len(), obs.iter().zip(&model).map(|(o, p)| o - p))
        })
        .collect()
}

fn cost(res: &[DVector<f64>], w: &[Weighted]) -> f64 {
    res.iter().zip(w).map(|(r, w)| (r.transpose() * &w.weight * r)[(0, 0)]).sum()
}

/// Moves `from` by a horizontal displacement, keeping its altitude.
fn retract(from: &Geodetic, east: f64, north: f64) -> Geodetic {
    let frame = LocalFrame::at(from);
    let p = frame.to_ecef(&Enu { east, north, up: 0.0 });
    let mut g = ecef_to_geodetic(&p);
    g.altitude = from.altitude;
    g
}

const MAX_HALVINGS: usize = 30;

/// Weighted Gauss-Newton over horizontal position at the initial guess's
/// altitude. Steps that increase the cost are halved. Hitting the iteration
/// limit is reported through `converged`, not as an error.
pub fn solve(m: &SyntheticMeasurements, initial: &Geodetic, opts: &SolverOptions) -> Result<SolveResult, EstimatorError> {
    if m.sets.is_empty() {
        return Err(EstimatorError::InvalidArgument {
            field: "sets",
            reason: "no measurements".into(),
        });
    }
    let w = weights(&m.sets);
    let rows: usize = m.sets.iter().map(|s| s.len()).sum();
    let variance_scale = match m.sets.iter().map(|s| s.covariance().trace()).sum::<f64>() / rows as f64 {
        v if v > 0.0 => v,
        _ => 1.0,
    };
    let mut x = *initial;
    let mut res = residuals(m, &x);
    let mut c = cost(&res, &w);
    for iteration in 1..=opts.max_iterations {
        let ue = geodetic_to_ecef(&x);
        let mut normal = Matrix2::zeros();
        let mut rhs = Vector2::zeros();
        for ((set, r), w) in m.sets.iter().zip(&res).zip(&w) {
            let j = jacobian(&ue, set)?;
            let jtw = j.transpose() * &w.weight;
            let n = &jtw * &j;
            let g = &jtw * r;
            normal += Matrix2::new(n[(0, 0)], n[(0, 1)], n[(1, 0)], n[(1, 1)]);
            rhs += Vector2::new(g[0], g[1]);
        }
        // geometry-only test: normal matrix with the noise scaled to unit mean variance
        let eig = SymmetricEigen::new(normal * variance_scale).eigenvalues;
        let min_eigenvalue = eig[0].min(eig[1]);
        if !(min_eigenvalue >= opts.degenerate_threshold) {
            return Err(EstimatorError::DegenerateGeometry {
                iteration,
                min_eigenvalue,
            });
        }
        let mut step = normal.try_inverse().expect("positive definite") * rhs;
        let mut next = retract(&x, step[0], step[1]);
        let mut next_res = residuals(m, &next);
        let mut next_c = cost(&next_res, &w);
        let mut halvings = 0;
        while next_c > c && halvings < MAX_HALVINGS {
            step *= 0.5;
            next = retract(&x, step[0], step[1]);
            next_res = residuals(m, &next);
            next_c = cost(&next_res, &w);
            halvings += 1;
        }
        x = next;
        res = next_res;
        c = next_c;
        if step.norm() < opts.step_tolerance_m {
            return Ok(SolveResult {
                estimate: x,
                iterations: iteration,
                converged: true,
                residual_norm: c.sqrt(),
            });
        }
    }
    Ok(SolveResult {
        estimate: x,
        iterations: opts.max_iterations,
        converged: false,
        residual_norm: c.sqrt(),
    })
}

/// Horizontal distance between two points at (nearly) the same altitude.
pub fn horizontal_error(a: &Geodetic, b: &Geodetic) -> f64 {
    let frame = LocalFrame::at(a);
    frame.to_enu(&geodetic_to_ecef(b)).horizontal_norm()
}

/// Inputs of a validation run beyond the scenario configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct ValidationRequest {
    /// Fixed UE; defaults to the coverage center moved 5 km east and 3 km north.
    pub ue: Option<Geodetic>,
    pub trials: usize,
    pub seed: u64,
    /// Distance of the initial guess from the truth, along the serving
    /// satellite's ground track so the guess stays on the truth's side.
    pub initial_offset_m: f64,
    /// Skip noise entirely.
    pub noiseless: bool,
    pub solver: SolverOptions,
}

impl Default for ValidationRequest {
    fn default() -> Self {
        Self {
            ue: None,
            trials: 2000,
            seed: 0,
            initial_offset_m: 5000.0,
            noiseless: false,
            solver: SolverOptions::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub variant: Variant,
    pub ue_lat_deg: f64,
    pub ue_lon_deg: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub measurement_time_s: Option<f64>,
    pub trials: usize,
    pub converged_trials: usize,
    pub convergence_rate: f64,
    /// Root mean square horizontal error over converged trials, meters.
    pub rmse_m: f64,
    pub peb_m: f64,
    /// rmse / peb.
    pub ratio: f64,
    /// Norm of the mean error vector over converged trials, meters.
    pub mean_error_m: f64,
    pub degenerate_trials: usize,
}

pub fn default_validation_ue(config: &ScenarioConfig) -> Result<Geodetic, EstimatorError> {
    let center = coverage_center(config).map_err(ScenarioError::from)?;
    Ok(retract(&center, 5000.0, 3000.0))
}

/// Simulates and solves `trials` independent realizations for one UE using
/// the scenario's own measurement sets (drop index 0 channel draws; the
/// last configured measurement time where the variant sweeps one).
pub fn validate(
    config: &ScenarioConfig,
    tables: &ChannelTables,
    req: &ValidationRequest,
) -> Result<ValidationReport, EstimatorError> {
    if req.trials == 0 {
        return Err(EstimatorError::InvalidArgument {
            field: "trials",
            reason: "must be >= 1".into(),
        });
    }
    let truth = match req.ue {
        Some(g) => g,
        None => default_validation_ue(config)?,
    };
    let ue = geodetic_to_ecef(&truth);
    let window = match config.variant {
        Variant::SingleLeo | Variant::GnssLeo => config.measurement_times_s.last().copied(),
        _ => None,
    };
    let sets = measurement_sets(config, tables, &ue, 0, window)?;
    let fim: Fim = sets.iter().map(|s| Fim::for_set(&ue, s)).collect::<Result<Vec<_>, _>>()?.into_iter().sum();
    let peb_m = peb_with_threshold(&fim, config.degenerate_threshold)
        .peb
        .ok_or(EstimatorError::DegenerateGeometry {
            iteration: 0,
            min_eigenvalue: 0.0,
        })?;

    let serving = serving_satellite(config, tables)?;
    let frame = LocalFrame::at(&truth);
    let along = frame.to_enu(&(ue + serving.velocity));
    let (ae, an) = (along.east, along.north);
    let norm = ae.hypot(an);
    let initial = retract(&truth, req.initial_offset_m * ae / norm, req.initial_offset_m * an / norm);

    let mut converged = 0;
    let mut degenerate = 0;
    let mut sum_sq = 0.0;
    let (mut sum_e, mut sum_n) = (0.0, 0.0);
    for trial in 0..req.trials {
        let m = if req.noiseless {
            noiseless_measurements(&truth, &sets)
        } else {
            simulate_measurements(&truth, &sets, req.seed, trial as u64)
        };
        match solve(&m, &initial, &req.solver) {
            Ok(r) if r.converged => {
                converged += 1;
                let d = frame.to_enu(&geodetic_to_ecef(&r.estimate));
                sum_sq += d.east * d.east + d.north * d.north;
                sum_e += d.east;
                sum_n += d.north;
            }
            Ok(_) => {}
            Err(EstimatorError::DegenerateGeometry { .. }) => degenerate += 1,
            Err(e) => return Err(e),
        }
    }
    let k = converged.max(1) as f64;
    let rmse_m = (sum_sq / k).sqrt();
    Ok(ValidationReport {
        variant: config.variant,
        ue_lat_deg: truth.latitude_deg(),
        ue_lon_deg: truth.longitude_deg(),
        measurement_time_s: match config.variant {
            Variant::MultiLeo if config.rtt_augmentation => Some(config.rtt_measurement_time_s),
            _ => window,
        },
        trials: req.trials,
        converged_trials: converged,
        convergence_rate: converged as f64 / req.trials as f64,
        rmse_m,
        peb_m,
        ratio: rmse_m / peb_m,
        mean_error_m: (sum_e / k).hypot(sum_n / k),
        degenerate_trials: degenerate,
    })
}
