//! Parameter algebra: normalization, singular and boundary curves, turning
//! points and region classification.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::real::Real;

/// Physical configuration. The first center (mass `m_plus`) sits at the
/// origin, the second at distance `2 v0` along the symmetry axis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SystemParams<T> {
    pub m_plus: T,
    pub m_minus: T,
    pub v0: T,
    pub j0: T,
    pub f0: T,
    /// Angular-momentum projection; only the planar case `0` is supported.
    pub theta0: T,
}

impl<T: Real> SystemParams<T> {
    pub fn new(m_plus: T, m_minus: T, v0: T, j0: T, f0: T) -> Result<Self> {
        let p = Self {
            m_plus,
            m_minus,
            v0,
            j0,
            f0,
            theta0: T::zero(),
        };
        p.validate()?;
        Ok(p)
    }

    /// Builds the physical point that normalizes to `(delta0_hat, f0_hat)`.
    pub fn from_normalized(m_plus: T, m_minus: T, v0: T, delta0_hat: T, f0_hat: T) -> Result<Self> {
        if !(delta0_hat > T::zero()) {
            return Err(Error::InvalidParams("delta0_hat must be positive".into()));
        }
        let j0 = -delta0_hat / (T::lit(4.0) * v0);
        let f0 = f0_hat / (-T::two() * j0);
        Self::new(m_plus, m_minus, v0, j0, f0)
    }

    pub fn validate(&self) -> Result<()> {
        let all = [self.m_plus, self.m_minus, self.v0, self.j0, self.f0];
        if all.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParams("parameters must be finite".into()));
        }
        if !(self.m_plus >= self.m_minus && self.m_minus >= T::zero()) || self.m_plus == T::zero() {
            return Err(Error::InvalidParams("masses must satisfy m_plus >= m_minus >= 0, not both zero".into()));
        }
        if !(self.v0 > T::zero()) {
            return Err(Error::InvalidParams("v0 must be positive".into()));
        }
        if self.theta0 != T::zero() {
            return Err(Error::InvalidParams("only Theta0 = 0 is supported".into()));
        }
        Ok(())
    }

    /// `M₊ = m₊ + m₋`.
    pub fn mass_plus(&self) -> T {
        self.m_plus + self.m_minus
    }

    /// `M₋ = m₊ − m₋`.
    pub fn mass_minus(&self) -> T {
        self.m_plus - self.m_minus
    }

    pub fn delta0_hat(&self) -> T {
        -T::lit(4.0) * self.v0 * self.j0
    }

    pub fn f0_hat(&self) -> T {
        -T::two() * self.j0 * self.f0
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MassChoice<T> {
    Plus,
    Minus,
    Custom(T),
}

/// Reduced parameters `(M, δ̂₀, F̂₀)` plus `v0` for the period prefactor.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NormalizedParams<T> {
    pub mass: T,
    pub delta0_hat: T,
    pub f0_hat: T,
    pub v0: T,
}

impl<T: Real> NormalizedParams<T> {
    pub fn new(mass: T, delta0_hat: T, f0_hat: T, v0: T) -> Result<Self> {
        if !(mass >= T::zero() && mass.is_finite()) {
            return Err(Error::InvalidParams("mass must be finite and non-negative".into()));
        }
        if !(delta0_hat > T::zero() && delta0_hat.is_finite()) {
            return Err(Error::InvalidParams("delta0_hat must be finite and positive".into()));
        }
        if !f0_hat.is_finite() {
            return Err(Error::InvalidParams("f0_hat must be finite".into()));
        }
        if !(v0 > T::zero() && v0.is_finite()) {
            return Err(Error::InvalidParams("v0 must be finite and positive".into()));
        }
        Ok(Self {
            mass,
            delta0_hat,
            f0_hat,
            v0,
        })
    }

    /// Normalized parameters with `v0 = 1`.
    pub fn unit(mass: T, delta0_hat: T, f0_hat: T) -> Result<Self> {
        Self::new(mass, delta0_hat, f0_hat, T::one())
    }

    pub fn j0_abs(&self) -> T {
        self.delta0_hat / (T::lit(4.0) * self.v0)
    }

    /// `√(2|J₀|)`, the common factor of every period formula.
    pub fn prefactor(&self) -> T {
        (T::two() * self.j0_abs()).sqrt()
    }

    pub fn with_f0_hat(mut self, f0_hat: T) -> Self {
        self.f0_hat = f0_hat;
        self
    }

    pub fn with_mass(mut self, mass: T) -> Self {
        self.mass = mass;
        self
    }

    pub fn to_system(&self, m_plus: T, m_minus: T) -> Result<SystemParams<T>> {
        SystemParams::from_normalized(m_plus, m_minus, self.v0, self.delta0_hat, self.f0_hat)
    }
}

pub fn normalize<T: Real>(p: &SystemParams<T>, which: MassChoice<T>) -> Result<NormalizedParams<T>> {
    p.validate()?;
    if !(p.j0 < T::zero()) {
        return Err(Error::NonNegativeEnergy(p.j0.f64()));
    }
    let mass = match which {
        MassChoice::Plus => p.mass_plus(),
        MassChoice::Minus => p.mass_minus(),
        MassChoice::Custom(m) => m,
    };
    NormalizedParams::new(mass, p.delta0_hat(), p.f0_hat(), p.v0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum SingularBranch {
    /// `F = M δ̂₀`, used for `δ̂₀ < 2M`.
    Linear,
    /// `F = M² + δ̂₀²/4`, used for `δ̂₀ > 2M`.
    Quadratic,
    /// `δ̂₀ = 2M`, where both agree.
    Both,
}

pub fn f_sing_branch<T: Real>(mass: T, delta0_hat: T) -> SingularBranch {
    let two_m = mass + mass;
    if delta0_hat < two_m {
        SingularBranch::Linear
    } else if delta0_hat > two_m {
        SingularBranch::Quadratic
    } else {
        SingularBranch::Both
    }
}

/// Singular-line value `F̂ˢⁱⁿᵍ_M(δ̂₀)`.
pub fn f_sing<T: Real>(mass: T, delta0_hat: T) -> T {
    match f_sing_branch(mass, delta0_hat) {
        SingularBranch::Linear | SingularBranch::Both => mass * delta0_hat,
        SingularBranch::Quadratic => mass * mass + delta0_hat * delta0_hat / T::lit(4.0),
    }
}

/// Band `(F̂⁻_M, F̂⁺_M)` of the Hill-set conditions.
pub fn f_boundaries<T: Real>(mass: T, delta0_hat: T) -> (T, T) {
    let lower = -mass * delta0_hat;
    let upper = if delta0_hat <= mass + mass {
        mass * mass + delta0_hat * delta0_hat / T::lit(4.0)
    } else {
        mass * delta0_hat
    };
    (lower, upper)
}

pub fn singular_tolerance<T: Real>(f_sing: T) -> T {
    T::lit(1e-12).max(T::tol_floor()) * T::one().max(f_sing.abs())
}

pub fn is_near_singular<T: Real>(mass: T, delta0_hat: T, f0_hat: T) -> bool {
    let fs = f_sing(mass, delta0_hat);
    (f0_hat - fs).abs() < singular_tolerance(fs)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum PeriodRegion {
    PDown,
    PUp,
    OnSingular,
    Outside,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum WRegion {
    DS,
    DL,
    DP,
    OnBoundary,
    Outside,
}

impl WRegion {
    pub fn as_str(&self) -> &'static str {
        match self {
            WRegion::DS => "DS",
            WRegion::DL => "DL",
            WRegion::DP => "DP",
            WRegion::OnBoundary => "OnBoundary",
            WRegion::Outside => "Outside",
        }
    }
}

/// Position of `(δ̂₀, F̂₀)` relative to the singular line of one mass.
pub fn period_region<T: Real>(mass: T, delta0_hat: T, f0_hat: T) -> PeriodRegion {
    if !(delta0_hat > T::zero()) || !f0_hat.is_finite() || !(mass >= T::zero()) {
        return PeriodRegion::Outside;
    }
    let fs = f_sing(mass, delta0_hat);
    if (f0_hat - fs).abs() < singular_tolerance(fs) {
        PeriodRegion::OnSingular
    } else if f0_hat < fs {
        PeriodRegion::PDown
    } else {
        PeriodRegion::PUp
    }
}

/// Which part of parameter space the rotation-number regions cover.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WDomain {
    /// Only the physical band `F̂⁻_{M₋} < F̂₀ < F̂⁺_{M₊}`.
    Physical,
    /// The full regions `P↓_{M₋}`, `P↑_{M₋} ∩ P↓_{M₊}`, `P↑_{M₊}` on which
    /// the extended periods are defined.
    Extended,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RegionLabel<T> {
    pub period_region_plus: PeriodRegion,
    pub period_region_minus: PeriodRegion,
    pub w_region: WRegion,
    pub distance_to_singular_plus: T,
    pub distance_to_singular_minus: T,
}

pub fn classify<T: Real>(mp: T, mm: T, delta0_hat: T, f0_hat: T) -> RegionLabel<T> {
    classify_in(mp, mm, delta0_hat, f0_hat, WDomain::Physical)
}

pub fn classify_in<T: Real>(mp: T, mm: T, delta0_hat: T, f0_hat: T, domain: WDomain) -> RegionLabel<T> {
    let plus = period_region(mp, delta0_hat, f0_hat);
    let minus = period_region(mm, delta0_hat, f0_hat);
    let valid = delta0_hat > T::zero() && mp >= mm && mm >= T::zero() && f0_hat.is_finite();
    let in_band = match domain {
        WDomain::Physical => {
            f0_hat > f_boundaries(mm, delta0_hat).0 && f0_hat < f_boundaries(mp, delta0_hat).1
        }
        WDomain::Extended => true,
    };
    let w_region = if !valid || !in_band {
        WRegion::Outside
    } else if plus == PeriodRegion::OnSingular || minus == PeriodRegion::OnSingular {
        WRegion::OnBoundary
    } else if minus == PeriodRegion::PDown {
        WRegion::DS
    } else if plus == PeriodRegion::PDown {
        WRegion::DL
    } else {
        WRegion::DP
    };
    RegionLabel {
        period_region_plus: plus,
        period_region_minus: minus,
        w_region,
        distance_to_singular_plus: f0_hat - f_sing(mp, delta0_hat),
        distance_to_singular_minus: f0_hat - f_sing(mm, delta0_hat),
    }
}

/// Roots `x₋ ≤ x₊` of `M²x² − 2F̂₀x + δ̂₀²`.
pub fn quadratic_roots<T: Real>(mass: T, f0_hat: T, delta0_hat: T) -> Result<(T, T)> {
    if !(mass > T::zero()) {
        return Err(Error::InvalidParams("quadratic_roots needs M > 0".into()));
    }
    let m2 = mass * mass;
    let md = mass * delta0_hat;
    let disc = (f0_hat - md) * (f0_hat + md);
    let thresh = T::lit(1e-14) * f0_hat * f0_hat;
    if disc < -thresh {
        return Err(Error::ComplexRoots);
    }
    if disc <= thresh {
        let x = f0_hat / m2;
        return Ok((x, x));
    }
    let r = disc.sqrt();
    let d2 = delta0_hat * delta0_hat;
    if f0_hat > T::zero() {
        let s = f0_hat + r;
        Ok((d2 / s, s / m2))
    } else {
        let s = f0_hat - r;
        Ok((s / m2, d2 / s))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TurningPoints<T> {
    /// `Δ₊ = M₊² + δ̂₀²/4 − F̂₀`.
    pub delta_plus: T,
    /// `Δ₋ = M₋² + δ̂₀²/4 − F̂₀`.
    pub delta_minus: T,
    pub alpha_minus: Option<T>,
    pub alpha_plus: Option<T>,
    pub beta_minus: Option<T>,
    pub beta_plus: Option<T>,
    pub alpha_range: (T, T),
    pub beta_components: Vec<(T, T)>,
}

/// Roots `(2/δ̂₀)(M ± √Δ)` of `δ̂₀²s² − 4Mδ̂₀s + 4F̂₀ − δ̂₀²`.
fn cofocal_roots<T: Real>(mass: T, delta0_hat: T, f0_hat: T, disc: T) -> Option<(T, T)> {
    if disc < T::zero() {
        return None;
    }
    let k = T::two() / delta0_hat;
    let sd = disc.sqrt();
    let hi = k * (mass + sd);
    let lo = if hi != T::zero() {
        // Product of the roots is (4F̂₀ − δ̂₀²)/δ̂₀².
        (T::lit(4.0) * f0_hat - delta0_hat * delta0_hat) / (delta0_hat * delta0_hat * hi)
    } else {
        k * (mass - sd)
    };
    Some((lo.min(hi), hi.max(lo)))
}

pub fn turning_points<T: Real>(mp: T, mm: T, j0: T, v0: T, f0: T) -> Result<TurningPoints<T>> {
    if !(j0 < T::zero()) {
        return Err(Error::NonNegativeEnergy(j0.f64()));
    }
    let delta0_hat = -T::lit(4.0) * v0 * j0;
    let f0_hat = -T::two() * j0 * f0;
    turning_points_normalized(mp, mm, delta0_hat, f0_hat)
}

pub fn turning_points_normalized<T: Real>(mp: T, mm: T, delta0_hat: T, f0_hat: T) -> Result<TurningPoints<T>> {
    let quarter_d2 = delta0_hat * delta0_hat / T::lit(4.0);
    let delta_plus = mp * mp + quarter_d2 - f0_hat;
    let delta_minus = mm * mm + quarter_d2 - f0_hat;
    let one = T::one();

    let alpha = cofocal_roots(mp, delta0_hat, f0_hat, delta_plus);
    let alpha_range = match alpha {
        Some((lo, hi)) if delta_plus > T::zero() && hi > one => (lo.max(one), hi),
        _ => return Err(Error::EmptyHillSet),
    };

    let beta = cofocal_roots(mm, delta0_hat, f0_hat, delta_minus);
    let mut beta_components = Vec::with_capacity(2);
    match beta {
        None => beta_components.push((-one, one)),
        Some((lo, hi)) => {
            if lo > -one {
                beta_components.push((-one, lo.min(one)));
            }
            if hi < one {
                beta_components.push((hi.max(-one), one));
            }
        }
    }
    // A double root inside (−1, 1) splits the interval but leaves it covered.
    beta_components.retain(|(a, b)| a < b);
    if beta_components.is_empty() {
        return Err(Error::EmptyHillSet);
    }
    Ok(TurningPoints {
        delta_plus,
        delta_minus,
        alpha_minus: alpha.map(|r| r.0),
        alpha_plus: alpha.map(|r| r.1),
        beta_minus: beta.map(|r| r.0),
        beta_plus: beta.map(|r| r.1),
        alpha_range,
        beta_components,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn normalize_examples() {
        let p = SystemParams::new(1.0, 0.0, 1.0, -0.25, 2.0).unwrap();
        let n = normalize(&p, MassChoice::Plus).unwrap();
        assert_eq!((n.mass, n.delta0_hat, n.f0_hat), (1.0, 1.0, 1.0));
        let p = SystemParams::new(1.0, 0.0, 0.5, -1.0, 0.0).unwrap();
        let n = normalize(&p, MassChoice::Minus).unwrap();
        assert_eq!((n.delta0_hat, n.f0_hat), (2.0, 0.0));
        let p = SystemParams::new(1.0, 0.0, 1.0, 0.1, 1.0).unwrap();
        assert!(matches!(normalize(&p, MassChoice::Plus), Err(Error::NonNegativeEnergy(_))));
    }

    #[test]
    fn singular_line_and_band() {
        assert_eq!(f_sing(1.0, 1.0), 1.0);
        assert_eq!(f_sing(1.0, 4.0), 5.0);
        assert_eq!(f_sing(1.0, 2.0), 2.0);
        assert_eq!(f_sing_branch(1.0, 2.0), SingularBranch::Both);
        assert_eq!(f_boundaries(1.0, 1.0), (-1.0, 1.25));
        assert_eq!(f_boundaries(1.0, 4.0), (-4.0, 4.0));
        assert_eq!(f_boundaries(0.0, 1.0), (-0.0, 0.0));
    }

    #[test]
    fn classify_examples() {
        assert_eq!(classify(1.0, 0.5, 1.0, 0.75).w_region, WRegion::DL);
        assert_eq!(classify(1.0, 1.0, 1.0, 0.5).w_region, WRegion::DS);
        assert_eq!(classify(1.0, 0.5, 1.0, 2.0).w_region, WRegion::Outside);
        assert_eq!(classify(1.0, 0.5, 1.0, 1.0).w_region, WRegion::OnBoundary);
        assert_eq!(classify_in(1.0, 0.5, 1.0, 2.0, WDomain::Extended).w_region, WRegion::DP);
    }

    #[test]
    fn roots_examples() {
        let (a, b) = quadratic_roots(1.0, 1.0, 0.75f64.sqrt()).unwrap();
        assert!((a - 0.5).abs() < 1e-15 && (b - 1.5).abs() < 1e-15);
        assert_eq!(quadratic_roots(1.0, 1.0, 1.0).unwrap(), (1.0, 1.0));
        assert_eq!(quadratic_roots(1.0, 0.5, 1.0), Err(Error::ComplexRoots));
    }

    #[test]
    fn turning_point_examples() {
        let tp = turning_points_normalized(1.0f64, 1.0, 2.0, 0.0).unwrap();
        assert!((tp.delta_plus - 2.0).abs() < 1e-15);
        assert!((tp.alpha_range.1 - (1.0 + 2f64.sqrt())).abs() < 1e-14);
        assert_eq!(tp.alpha_range.0, 1.0);
        assert!(matches!(turning_points_normalized(1.0, 1.0, 2.0, 2.0), Err(Error::EmptyHillSet)));
        let tp = turning_points_normalized(1.0, 0.0, 2.0, 1.0).unwrap();
        assert_eq!(tp.beta_components, vec![(-1.0, 0.0), (0.0, 1.0)]);
    }
}
