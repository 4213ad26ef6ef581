//! Period representations (T↓, T↑, T*, T°, the (e, ω) family, the Jacobi
//! quadratures) and the rotation number.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::param_domain::{
    classify, f_sing, period_region, turning_points, NormalizedParams, PeriodRegion,
    SystemParams, WRegion,
};
use crate::quadrature::{
    integrate_periodic, integrate_piecewise, IntegralResult, Node, QuadratureSpec,
};
use crate::real::{rel_diff, Real};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Representation {
    TDown,
    TUp,
    TStar,
    TCirc,
    TGeneralEOmega,
    JacobiAlpha,
    JacobiBeta,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum PeriodStatus {
    Ok,
    Diverging,
    OutOfDomain,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PeriodResult<T> {
    pub value: T,
    pub err_estimate: T,
    pub representation: Representation,
    pub status: PeriodStatus,
}

impl<T: Real> PeriodResult<T> {
    pub fn is_ok(&self) -> bool {
        self.status == PeriodStatus::Ok
    }

    fn diverging(representation: Representation) -> Self {
        Self {
            value: T::infinity(),
            err_estimate: T::infinity(),
            representation,
            status: PeriodStatus::Diverging,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum WBranch {
    WS,
    WL,
    WP,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RotationNumberResult<T> {
    pub w: T,
    pub branch: WBranch,
    pub t_plus: PeriodResult<T>,
    pub t_minus: PeriodResult<T>,
}

/// Quadrature settings shared by all period evaluations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PeriodEngine<T> {
    pub spec: QuadratureSpec<T>,
    pub periodic: QuadratureSpec<T>,
    /// Relative tolerance of the internal cross-check in [`PeriodEngine::t_up`].
    pub cross_check_tol: T,
}

impl<T: Real> Default for PeriodEngine<T> {
    fn default() -> Self {
        let spec = QuadratureSpec::double_exponential().with_rel_tol(T::lit(1e-12));
        Self {
            spec,
            periodic: QuadratureSpec::periodic().with_rel_tol(T::lit(1e-12)),
            cross_check_tol: T::lit(1e-8).max(T::tol_floor() * T::lit(16.0)),
        }
    }
}

impl<T: Real> PeriodEngine<T> {
    pub fn with_spec(spec: QuadratureSpec<T>) -> Self {
        Self {
            spec,
            periodic: QuadratureSpec {
                method: crate::quadrature::Method::PeriodicTrapezoid,
                max_levels: spec.max_levels.max(16),
                ..spec
            },
            ..Self::default()
        }
    }

    fn finish(
        &self,
        res: IntegralResult<T>,
        scale: T,
        n: &NormalizedParams<T>,
        representation: Representation,
    ) -> PeriodResult<T> {
        let res = res.scale(scale);
        let bound = T::lit(1e6) * n.prefactor() / n.delta0_hat;
        if !res.converged && (res.value > bound || res.grows_monotonically()) {
            return PeriodResult::diverging(representation);
        }
        PeriodResult {
            value: res.value,
            err_estimate: res.err_estimate,
            representation,
            status: PeriodStatus::Ok,
        }
    }

    /// `∫₀² dx/√(x(2−x)(M²x² − 2F̂₀x + δ̂₀²))` on `P↓`, split at the vertex of
    /// the quadratic when it lies inside `(0, 2)`.
    pub fn t_down_integral(&self, n: &NormalizedParams<T>) -> Result<IntegralResult<T>> {
        let (m, d, f) = (n.mass, n.delta0_hat, n.f0_hat);
        let m2 = m * m;
        let two = T::two();
        let mut points = vec![T::zero()];
        let vertex = if m > T::zero() { f / m2 } else { T::nan() };
        let kappa = if m > T::zero() {
            (m * d - f) * (m * d + f) / m2
        } else {
            T::nan()
        };
        if vertex > T::zero() && vertex < two {
            points.push(vertex);
        }
        points.push(two);
        let q_at = |c: T| -> (T, T) {
            if c == T::zero() {
                (d * d, -two * f)
            } else if c == two {
                (d * d + T::lit(4.0) * (m2 - f), T::lit(4.0) * m2 - two * f)
            } else {
                (kappa, T::zero())
            }
        };
        integrate_piecewise(
            |node: Node<T>| {
                let x = if node.a == T::zero() { node.from_a } else { node.x };
                let y = if node.b == two { node.to_b } else { two - node.x };
                let (q0, q1) = q_at(node.nearest());
                let u = node.offset_nearest();
                let q = q0 + u * (q1 + m2 * u);
                T::one() / (x * y * q).sqrt()
            },
            &points,
            &self.spec,
        )
    }

    pub fn t_down(&self, n: &NormalizedParams<T>) -> Result<PeriodResult<T>> {
        match period_region(n.mass, n.delta0_hat, n.f0_hat) {
            PeriodRegion::PDown => {}
            PeriodRegion::OnSingular => return Ok(PeriodResult::diverging(Representation::TDown)),
            _ => return Err(Error::OutOfDomain("t_down")),
        }
        let res = self.t_down_integral(n)?;
        Ok(self.finish(res, T::two() * n.prefactor(), n, Representation::TDown))
    }

    /// `(x₋, r, M²x₊)` with `r = √(F̂₀² − M²δ̂₀²)`; valid for `M = 0` too.
    fn up_roots(n: &NormalizedParams<T>) -> Result<(T, T, T)> {
        let (m, d, f) = (n.mass, n.delta0_hat, n.f0_hat);
        let disc = (f - m * d) * (f + m * d);
        if disc < T::zero() || f <= T::zero() {
            return Err(Error::ComplexRoots);
        }
        let r = disc.sqrt();
        let s = f + r;
        Ok((d * d / s, r, s))
    }

    /// `∫₀^{x₋} dx/√(x(2−x)(M²x² − 2F̂₀x + δ̂₀²))`.
    pub fn t_up_integral_x(&self, n: &NormalizedParams<T>) -> Result<IntegralResult<T>> {
        let (xm, r, _) = Self::up_roots(n)?;
        let m2 = n.mass * n.mass;
        let two = T::two();
        let gap = two - xm;
        integrate_piecewise(
            |node: Node<T>| {
                let x = node.from_a;
                let y = gap + node.to_b;
                let q = node.to_b * (r + r + m2 * node.to_b);
                T::one() / (x * y * q).sqrt()
            },
            &[T::zero(), xm],
            &self.spec,
        )
    }

    /// `∫₀¹ dt/√(t(1−t)(2 − x₋t)(M²x₊ − M²x₋t))`.
    pub fn t_up_integral_t(&self, n: &NormalizedParams<T>) -> Result<IntegralResult<T>> {
        let (xm, r, _) = Self::up_roots(n)?;
        let m2 = n.mass * n.mass;
        let two = T::two();
        integrate_piecewise(
            |node: Node<T>| {
                let t = node.from_a;
                let y = two - xm + xm * node.to_b;
                let q = r + r + m2 * xm * node.to_b;
                T::one() / (t * node.to_b * y * q).sqrt()
            },
            &[T::zero(), T::one()],
            &self.spec,
        )
    }

    pub fn t_up(&self, n: &NormalizedParams<T>) -> Result<PeriodResult<T>> {
        match period_region(n.mass, n.delta0_hat, n.f0_hat) {
            PeriodRegion::PUp => {}
            PeriodRegion::OnSingular => return Ok(PeriodResult::diverging(Representation::TUp)),
            _ => return Err(Error::OutOfDomain("t_up")),
        }
        let scale = T::lit(4.0) * n.prefactor();
        let nice = self.t_up_integral_t(n)?;
        let direct = self.t_up_integral_x(n)?;
        let out = self.finish(nice, scale, n, Representation::TUp);
        if out.is_ok() {
            let other = self.finish(direct, scale, n, Representation::TUp);
            if other.is_ok() && rel_diff(out.value, other.value) > self.cross_check_tol {
                return Err(Error::RepresentationMismatch(out.value.f64(), other.value.f64()));
            }
        }
        Ok(out)
    }

    /// The piecewise period `T_M`: `T↓` below the singular line, `T↑` above.
    pub fn t_of(&self, n: &NormalizedParams<T>) -> Result<PeriodResult<T>> {
        match period_region(n.mass, n.delta0_hat, n.f0_hat) {
            PeriodRegion::PDown => self.t_down(n),
            PeriodRegion::PUp => self.t_up(n),
            PeriodRegion::OnSingular => Ok(PeriodResult::diverging(Representation::TDown)),
            PeriodRegion::Outside => Err(Error::OutOfDomain("t_of")),
        }
    }

    fn periodic_period(
        &self,
        n: &NormalizedParams<T>,
        radicand: impl Fn(T) -> T,
        representation: Representation,
    ) -> Result<PeriodResult<T>> {
        let res = integrate_periodic(
            |xi| {
                let q = radicand(xi);
                if q > T::zero() {
                    T::one() / q.sqrt()
                } else {
                    T::nan()
                }
            },
            &self.periodic,
        )
        .map_err(|e| match e {
            Error::NonFiniteIntegrand(_) => Error::ComplexRadicand,
            e => e,
        })?;
        Ok(self.finish(res, n.prefactor(), n, representation))
    }

    /// `T*` on `−Mδ̂₀ < F̂₀ < Mδ̂₀`.
    pub fn t_star(&self, n: &NormalizedParams<T>) -> Result<PeriodResult<T>> {
        let (m, d, f) = (n.mass, n.delta0_hat, n.f0_hat);
        let md = m * d;
        let degenerate = m == T::zero() && f == T::zero();
        if !(f.abs() < md || degenerate) {
            return Err(Error::OutOfDomain("t_star"));
        }
        let m2 = m * m;
        self.periodic_period(
            n,
            |xi| {
                let s = (xi * T::half()).sin();
                let u = T::two() * s * s;
                m2 * u * u - T::two() * f * u + d * d
            },
            Representation::TStar,
        )
    }

    /// `(σ, ê)` of the circular-orbit representation.
    pub fn eccentricity_hat(n: &NormalizedParams<T>, sigma: T) -> Result<T> {
        let (m, d, f) = (n.mass, n.delta0_hat, n.f0_hat);
        let rad = m * m + d * d / T::lit(4.0) - f;
        let rad = if rad < T::zero() && rad > -T::tol_floor() * T::one().max(f.abs()) {
            T::zero()
        } else {
            rad
        };
        if rad < T::zero() {
            return Err(Error::ComplexEccentricity);
        }
        Ok(sigma * (-d * T::half() + rad.sqrt()))
    }

    pub fn sigma(n: &NormalizedParams<T>) -> T {
        if n.f0_hat < n.mass * n.mass {
            T::one()
        } else {
            -T::one()
        }
    }

    fn t_circ_sigma(&self, n: &NormalizedParams<T>, sigma: T) -> Result<PeriodResult<T>> {
        let (m, d) = (n.mass, n.delta0_hat);
        let e = Self::eccentricity_hat(n, sigma)?;
        let c0 = m * m + T::two() * sigma * e * d + d * d;
        let c1 = T::two() * m * (e + sigma * d);
        self.periodic_period(
            n,
            |xi| {
                let c = xi.cos();
                e * e * c * c - c1 * c + c0
            },
            Representation::TCirc,
        )
    }

    /// `T°` on `F̂₀ ≤ M² + δ̂₀²/4`, `F̂₀ ≠ F̂ˢⁱⁿᵍ`.
    pub fn t_circ(&self, n: &NormalizedParams<T>) -> Result<PeriodResult<T>> {
        if period_region(n.mass, n.delta0_hat, n.f0_hat) == PeriodRegion::OnSingular {
            return Ok(PeriodResult::diverging(Representation::TCirc));
        }
        let sigma = Self::sigma(n);
        let out = self.t_circ_sigma(n, sigma)?;
        if n.f0_hat == n.mass * n.mass {
            let other = self.t_circ_sigma(n, -sigma)?;
            if rel_diff(out.value, other.value) > self.cross_check_tol {
                return Err(Error::RepresentationMismatch(out.value.f64(), other.value.f64()));
            }
        }
        Ok(out)
    }

    /// Residual of `(1 − e²) − (δ̂₀/M) e sin ω − F̂₀/M²`.
    pub fn e_omega_residual(n: &NormalizedParams<T>, e: T, omega: T) -> T {
        let m = n.mass;
        (T::one() - e * e) - n.delta0_hat / m * e * omega.sin() - n.f0_hat / (m * m)
    }

    /// The angle `ω ∈ [−π/2, π/2]` completing a constraint solution for a
    /// given eccentricity, if one exists.
    pub fn omega_for(n: &NormalizedParams<T>, e: T) -> Option<T> {
        let m = n.mass;
        if !(m > T::zero()) || !(e > T::zero()) || e > T::one() {
            return None;
        }
        let s = (m * m * (T::one() - e * e) - n.f0_hat) / (m * n.delta0_hat * e);
        if s.abs() <= T::one() {
            Some(s.asin())
        } else {
            None
        }
    }

    /// Period of the Kepler-type representation for any `(e, ω)` satisfying
    /// the constraint.
    pub fn t_general_e_omega(&self, n: &NormalizedParams<T>, e: T, omega: T) -> Result<PeriodResult<T>> {
        let (m, d) = (n.mass, n.delta0_hat);
        if !(m > T::zero()) {
            return Err(Error::OutOfDomain("t_general_e_omega"));
        }
        if !(e >= T::zero() && e <= T::one()) {
            return Err(Error::InvalidParams("eccentricity must lie in [0, 1]".into()));
        }
        let res = Self::e_omega_residual(n, e, omega);
        let scale = T::one().max((n.f0_hat / (m * m)).abs());
        if !(res.abs() <= T::lit(1e-10).max(T::tol_floor()) * scale) {
            return Err(Error::ConstraintViolated(res.f64()));
        }
        let sq = (T::one() - e * e).max(T::zero()).sqrt();
        let (so, co) = omega.sin_cos();
        self.periodic_period(
            n,
            |xi| {
                let (s, c) = xi.sin_cos();
                let k = T::one() - e * c;
                m * m * k * k - T::two() * m * d * (sq * s * co + (c - e) * so) + d * d
            },
            Representation::TGeneralEOmega,
        )
    }

    /// Jacobi period of the α oscillation (τ-time units).
    pub fn jacobi_t_plus(&self, p: &SystemParams<T>) -> Result<PeriodResult<T>> {
        let tp = turning_points(p.mass_plus(), p.mass_minus(), p.j0, p.v0, p.f0)?;
        let d = p.delta0_hat();
        let n = NormalizedParams::new(p.mass_plus(), d, p.f0_hat(), p.v0)?;
        let (lo, hi) = tp.alpha_range;
        let am = tp.alpha_minus.unwrap_or(lo);
        let one = T::one();
        let (gap1, gapm) = (lo - one, lo - am);
        let res = integrate_piecewise(
            |node: Node<T>| {
                let u = node.from_a;
                let v = node.to_b;
                let a1 = gap1 + u;
                let am_ = gapm + u;
                T::one() / (a1 * (lo + one + u) * am_ * v).sqrt()
            },
            &[lo, hi],
            &self.spec,
        )?;
        let scale = T::two() * (T::two() * d / p.v0).sqrt() / d;
        Ok(self.finish(res, scale, &n, Representation::JacobiAlpha))
    }

    /// Jacobi periods of the β oscillation, one per connected component of
    /// the β Hill interval.
    pub fn jacobi_t_minus(&self, p: &SystemParams<T>) -> Result<Vec<PeriodResult<T>>> {
        let tp = turning_points(p.mass_plus(), p.mass_minus(), p.j0, p.v0, p.f0)?;
        let d = p.delta0_hat();
        let mm = p.mass_minus();
        let n = NormalizedParams::new(mm, d, p.f0_hat(), p.v0)?;
        let one = T::one();
        let scale = T::two() * (T::two() * d / p.v0).sqrt();
        let roots = tp.beta_minus.zip(tp.beta_plus);
        let delta_minus = tp.delta_minus;
        let mut out = Vec::with_capacity(tp.beta_components.len());
        for &(lo, hi) in &tp.beta_components {
            let res = integrate_piecewise(
                |node: Node<T>| {
                    let c = node.nearest();
                    let u = node.offset_nearest();
                    let one_minus = (one - c) - u;
                    let one_plus = (one + c) + u;
                    let q = match roots {
                        Some((b1, b2)) => (c - b1 + u) * (c - b2 + u) * d * d,
                        None => {
                            let w = d * node.x - mm - mm;
                            w * w - T::lit(4.0) * delta_minus
                        }
                    };
                    T::one() / (one_minus * one_plus * q).sqrt()
                },
                &[lo, hi],
                &self.spec,
            )?;
            out.push(self.finish(res, scale, &n, Representation::JacobiBeta));
        }
        Ok(out)
    }

    /// `W = T_{M₋} / T_{M₊}` on the physical domain.
    pub fn rotation_number(&self, p: &SystemParams<T>) -> Result<RotationNumberResult<T>> {
        if !(p.j0 < T::zero()) {
            return Err(Error::NonNegativeEnergy(p.j0.f64()));
        }
        let label = classify(p.mass_plus(), p.mass_minus(), p.delta0_hat(), p.f0_hat());
        self.rotation_number_at(p, label.w_region)
    }

    /// Rotation number with the region supplied by the caller, e.g. from the
    /// extended classification.
    pub fn rotation_number_at(&self, p: &SystemParams<T>, region: WRegion) -> Result<RotationNumberResult<T>> {
        let branch = match region {
            WRegion::DS => WBranch::WS,
            WRegion::DL => WBranch::WL,
            WRegion::DP => WBranch::WP,
            _ => return Err(Error::OutOfDomain("rotation_number")),
        };
        let np = NormalizedParams::new(p.mass_plus(), p.delta0_hat(), p.f0_hat(), p.v0)?;
        let nm = np.with_mass(p.mass_minus());
        let t_plus = self.t_of(&np)?;
        let t_minus = self.t_of(&nm)?;
        Ok(RotationNumberResult {
            w: t_minus.value / t_plus.value,
            branch,
            t_plus,
            t_minus,
        })
    }

    /// `T̃(a, b, c) = T_M(δ̂₀, F̂₀)/√(2|J₀|)` with `a = M²`, `b = δ̂₀²`, `c = F̂₀`.
    pub fn t_tilde(&self, a: T, b: T, c: T) -> Result<PeriodResult<T>> {
        let n = NormalizedParams::unit(a.sqrt(), b.sqrt(), c)?;
        let mut r = self.t_of(&n)?;
        let k = n.prefactor();
        r.value /= k;
        r.err_estimate /= k;
        Ok(r)
    }
}

/// Annotates the period region on both sides of a singular value.
pub fn singular_side<T: Real>(mass: T, delta0_hat: T, f0_hat: T) -> T {
    f0_hat - f_sing(mass, delta0_hat)
}

pub fn t_down<T: Real>(n: &NormalizedParams<T>) -> Result<PeriodResult<T>> {
    PeriodEngine::default().t_down(n)
}

pub fn t_up<T: Real>(n: &NormalizedParams<T>) -> Result<PeriodResult<T>> {
    PeriodEngine::default().t_up(n)
}

pub fn t_of<T: Real>(n: &NormalizedParams<T>) -> Result<PeriodResult<T>> {
    PeriodEngine::default().t_of(n)
}

pub fn t_star<T: Real>(n: &NormalizedParams<T>) -> Result<PeriodResult<T>> {
    PeriodEngine::default().t_star(n)
}

pub fn t_circ<T: Real>(n: &NormalizedParams<T>) -> Result<PeriodResult<T>> {
    PeriodEngine::default().t_circ(n)
}

pub fn t_general_e_omega<T: Real>(n: &NormalizedParams<T>, e: T, omega: T) -> Result<PeriodResult<T>> {
    PeriodEngine::default().t_general_e_omega(n, e, omega)
}

pub fn jacobi_t_plus<T: Real>(p: &SystemParams<T>) -> Result<PeriodResult<T>> {
    PeriodEngine::default().jacobi_t_plus(p)
}

pub fn jacobi_t_minus<T: Real>(p: &SystemParams<T>) -> Result<Vec<PeriodResult<T>>> {
    PeriodEngine::default().jacobi_t_minus(p)
}

pub fn rotation_number<T: Real>(p: &SystemParams<T>) -> Result<RotationNumberResult<T>> {
    PeriodEngine::default().rotation_number(p)
}
