//! Cramér-Rao position error bounds for satellite-based UE positioning.
//!
//! The crate covers three measurement setups: single-LEO round-trip time
//! over a window of virtual anchors, multi-LEO TDOA (optionally augmented
//! with RTT from the serving satellite), and a GNSS + single-LEO hybrid.
//!
//! - [`geometry`]: spherical Earth, circular orbits, anchor layouts
//! - [`channel`]: antenna pattern, path loss, LOS/shadowing tables, link SNR
//! - [`fisher`]: ranging accuracy, Jacobians, Fisher information, PEB/GDOP
//! - [`scenarios`]: UE drops, the case studies, box-plot statistics
//! - [`estimator`]: Gauss-Newton solver used to check bound achievability

pub mod channel;
pub mod estimator;
pub mod fisher;
pub mod geometry;
pub mod rng;
pub mod scenarios;

pub use channel::{AntennaModel, AntennaPattern, LinkParams, LinkRealization, ScenarioClass};
pub use fisher::{Fim, MeasurementKind, MeasurementSet, PebResult};
pub use geometry::{AnchorSet, EcefVector, Enu, Geodetic, OrbitSpec, SatelliteRole, SatelliteState};
pub use scenarios::{PebSampleSet, ResultsBundle, ScenarioConfig, SummaryStats, Variant};
