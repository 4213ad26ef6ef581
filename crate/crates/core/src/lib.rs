//! Periods, rotation numbers and oracles for the planar two-fixed-center problem.
//!
//! Everything is generic over the scalar type; `f64` aliases are exported at
//! the crate root, `f32` ones under [`single`].

pub mod dynamics_oracle;
pub mod elliptic_identities;
pub mod error;
pub mod monotonicity;
pub mod param_domain;
pub mod period_engine;
pub mod quadrature;
pub mod real;

pub use error::{Error, Result};
pub use param_domain::{classify, classify_in, f_boundaries, f_sing, PeriodRegion, WDomain, WRegion};
pub use period_engine::{rotation_number, t_of, PeriodStatus, Representation};
pub use real::Real;

pub type SystemParams = param_domain::SystemParams<f64>;
pub type NormalizedParams = param_domain::NormalizedParams<f64>;
pub type QuadratureSpec = quadrature::QuadratureSpec<f64>;
pub type PeriodEngine = period_engine::PeriodEngine<f64>;
pub type PeriodResult = period_engine::PeriodResult<f64>;
pub type RotationNumberResult = period_engine::RotationNumberResult<f64>;
pub type RegionLabel = param_domain::RegionLabel<f64>;
pub type TurningPoints = param_domain::TurningPoints<f64>;
pub type LemmaParams = elliptic_identities::LemmaParams<f64>;
pub type PhaseState = dynamics_oracle::PhaseState<f64>;
pub type Trajectory = dynamics_oracle::Trajectory<f64>;
pub type TrajectorySample = dynamics_oracle::TrajectorySample<f64>;
pub type KeplerElements = dynamics_oracle::KeplerElements<f64>;
pub type OrbitControls = dynamics_oracle::OrbitControls<f64>;
pub type FiberScan = monotonicity::FiberScan<f64>;

/// Single-precision aliases.
pub mod single {
    pub type SystemParams = crate::param_domain::SystemParams<f32>;
    pub type NormalizedParams = crate::param_domain::NormalizedParams<f32>;
    pub type PeriodEngine = crate::period_engine::PeriodEngine<f32>;
    pub type PhaseState = crate::dynamics_oracle::PhaseState<f32>;
}
