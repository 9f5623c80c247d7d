//! Exact and asymptotic law of a symmetric ±1 lattice walk's end position
//! `X` after `N` steps jointly with `K`, the number of arrivals at a marked
//! site `Z >= 1`.
//!
//! - [`exactwalk`]: closed forms in exact dyadic arithmetic.
//! - [`oracle`]: forward DP and brute-force enumeration of the same law.
//! - [`powerseries`]: generating functions expanded as truncated series.
//! - [`asymptotics`]: the diffusion-scaling limit and its distance to the
//!   exact law.
//! - [`montecarlo`]: simulation and goodness of fit.
//! - [`verify`]: the cross-checking suite behind `walkvisits verify`.

pub mod asymptotics;
pub mod dyadic;
pub mod error;
pub mod exactwalk;
pub mod montecarlo;
pub mod oracle;
pub mod powerseries;
pub mod quadrature;
pub mod verify;

pub use asymptotics::{ConvergenceReport, GridAxis, RidgePoint, ScaleMap, ScaledJointDensity};
pub use dyadic::DyadicProb;
pub use error::{Result, WalkError};
pub use exactwalk::{JointTable, SiteDist, VisitDist, WalkQuery};
pub use montecarlo::{GofReport, Histogram2D};
pub use powerseries::{BivariateSeries, RationalSeries};
