use thiserror::Error;

/// Errors raised by the library. Numeric payloads are reported as `f64`.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("energy J0 = {0} is not negative; no bounded motion")]
    NonNegativeEnergy(f64),
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("quadratic has complex roots")]
    ComplexRoots,
    #[error("Hill set is empty for these parameters")]
    EmptyHillSet,
    #[error("integrand is not finite at {0}")]
    NonFiniteIntegrand(f64),
    #[error("square-root branch jump near {0}")]
    BranchAmbiguity(f64),
    #[error("lemma condition |b/a| < min|t ± i sqrt(1 - t^2)| violated")]
    ConditionViolated,
    #[error("point outside the domain of {0}")]
    OutOfDomain(&'static str),
    #[error("representations disagree: {0} vs {1}")]
    RepresentationMismatch(f64, f64),
    #[error("eccentricity is complex (F0 > M^2 + delta^2/4)")]
    ComplexEccentricity,
    #[error("(e, omega) constraint residual {0} too large")]
    ConstraintViolated(f64),
    #[error("no case of the corollary applies")]
    NoCaseApplies,
    #[error("radicand is negative")]
    ComplexRadicand,
    #[error("kernels are not monotone in the same direction")]
    MonotonicityViolated,
    #[error("state coincides with a center")]
    CollisionSingularity,
    #[error("orbit approached a center to distance {0}")]
    CollisionApproach(f64),
    #[error("integrator step failed at tau = {0}")]
    StepFailure(f64),
    #[error("too few oscillations: {alpha} in alpha, {beta} in beta")]
    InsufficientOscillations { alpha: usize, beta: usize },
    #[error("state is not bound (J >= 0)")]
    HyperbolicState,
}

pub type Result<T> = std::result::Result<T, Error>;
