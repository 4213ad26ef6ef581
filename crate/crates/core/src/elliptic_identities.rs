//! Complex elliptic-integral equivalences, the auxiliary functions ε, χ, γ, ψ
//! and the real-part relation between T° and the continued T↓.
//!
//! Radicands of the form `a² R(θ)` are evaluated as `a·√R(θ)` with the
//! principal root applied to `R`, which keeps `R` away from the branch cut for
//! every admissible parameter set.

use num_complex::Complex;
use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::param_domain::NormalizedParams;
use crate::period_engine::PeriodEngine;
use crate::quadrature::{integrate_complex_periodic, integrate_periodic, integrate_piecewise, Node, QuadratureSpec};
use crate::real::Real;

type C<T> = Complex<T>;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LemmaParams<T> {
    pub a: C<T>,
    pub b: C<T>,
    pub t: C<T>,
}

impl<T: Real> LemmaParams<T> {
    pub fn new(a: C<T>, b: C<T>, t: C<T>) -> Result<Self> {
        let p = Self { a, b, t };
        if !p.satisfies_conditions() {
            return Err(Error::ConditionViolated);
        }
        Ok(p)
    }

    /// `√(1 − t²)`, principal branch.
    pub fn s(&self) -> C<T> {
        (C::new(T::one(), T::zero()) - self.t * self.t).sqrt()
    }

    /// `min(|t + i√(1−t²)|, |t − i√(1−t²)|)`.
    pub fn radius(&self) -> T {
        let is = C::<T>::i() * self.s();
        (self.t + is).norm().min((self.t - is).norm())
    }

    pub fn satisfies_conditions(&self) -> bool {
        self.a.norm() > T::zero() && (self.b / self.a).norm() < self.radius()
    }

    /// Draws `a = e^{iφ}`, `t` uniform in the unit disk and
    /// `|b| ≤ 0.9·min|t ± i√(1−t²)|` with uniform phase.
    pub fn sample<R: Rng + ?Sized>(rng: &mut R) -> Self {
        let tau = T::TAU();
        let unif = |rng: &mut R| T::lit(rng.random::<f64>());
        let a = C::from_polar(T::one(), tau * unif(rng));
        let t = C::from_polar(unif(rng).sqrt(), tau * unif(rng));
        let mut p = Self { a, b: C::new(T::zero(), T::zero()), t };
        let rb = T::lit(0.9) * p.radius() * unif(rng).sqrt();
        p.b = C::from_polar(rb, tau * unif(rng));
        p
    }
}

/// Parameter sets with a real root ratio `β/α`: real `(a, b, t)` on even
/// indices, imaginary `a`, `b` with real `t` on odd ones.
pub fn real_ratio_samples<T: Real>(n: usize, seed: u64) -> Vec<LemmaParams<T>> {
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|k| {
            let t = T::lit(rng.random_range(-0.95..0.95));
            let a = T::lit(rng.random_range(0.2..2.0)) * if rng.random::<bool>() { T::one() } else { -T::one() };
            let b = a * T::lit(rng.random_range(-0.9..0.9));
            if k % 2 == 0 {
                LemmaParams { a: C::new(a, T::zero()), b: C::new(b, T::zero()), t: C::new(t, T::zero()) }
            } else {
                LemmaParams { a: C::new(T::zero(), a), b: C::new(T::zero(), b), t: C::new(t, T::zero()) }
            }
        })
        .collect()
}

fn lemma_spec<T: Real>(spec: &QuadratureSpec<T>) -> QuadratureSpec<T> {
    QuadratureSpec {
        method: crate::quadrature::Method::PeriodicTrapezoid,
        max_levels: spec.max_levels.max(16),
        ..*spec
    }
}

/// `∫₀^{2π} dθ/√(a² − 2iab√(1−t²)cos θ − b²cos²θ)`.
pub fn lemma_lhs<T: Real>(p: &LemmaParams<T>, spec: &QuadratureSpec<T>) -> Result<C<T>> {
    if !p.satisfies_conditions() {
        return Err(Error::ConditionViolated);
    }
    let eps = p.b / p.a;
    let s = p.s();
    let two_i = C::new(T::zero(), T::two());
    let r = integrate_complex_periodic(
        |th| {
            let c = th.cos();
            C::new(T::one(), T::zero()) - two_i * eps * s * c - eps * eps * c * c
        },
        &lemma_spec(spec),
    )?;
    Ok(r.value / p.a)
}

/// `∫₀^{2π} dθ/√(a² − 2abt cos θ + b²)`.
pub fn lemma_rhs<T: Real>(p: &LemmaParams<T>, spec: &QuadratureSpec<T>) -> Result<C<T>> {
    if !p.satisfies_conditions() {
        return Err(Error::ConditionViolated);
    }
    let eps = p.b / p.a;
    let two = T::two();
    let r = integrate_complex_periodic(
        |th| C::new(T::one(), T::zero()) - eps * p.t * (two * th.cos()) + eps * eps,
        &lemma_spec(spec),
    )?;
    Ok(r.value / p.a)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AlphaBetaPair<T> {
    pub alpha: C<T>,
    pub beta: C<T>,
}

/// Roots of the α/β system with signs fixed by `Re(α/a) ≥ 0`, `Re(β/a) ≥ 0`.
pub fn alpha_beta<T: Real>(p: &LemmaParams<T>) -> AlphaBetaPair<T> {
    let (a, b, t) = (p.a, p.b, p.t);
    let half = T::half();
    let s = a * a + b * b;
    let root = (s * s * T::lit(0.25) - a * a * b * b * t * t).sqrt();
    let mut alpha = (s * half + root).sqrt();
    let mut beta = (s * half - root).sqrt();
    if a.norm() > T::zero() {
        if (alpha / a).re < T::zero() {
            alpha = -alpha;
        }
        if (beta / a).re < T::zero() {
            beta = -beta;
        }
    }
    AlphaBetaPair { alpha, beta }
}

/// `∫₀^{2π} dθ/√(1 − r² cos²θ)` with the principal root.
pub fn legendre_integral<T: Real>(r2: C<T>, spec: &QuadratureSpec<T>) -> Result<C<T>> {
    let tiny = T::tol_floor() * T::one().max(r2.norm());
    if r2.im.abs() <= tiny && r2.re > T::one() {
        // Zeros at cos θ = ±1/r; quarter period [0, π/2] times four.
        let r = r2.re.sqrt();
        let th0 = (T::one() / r).acos();
        let factor = |node: Node<T>| -> T {
            let x = node.x;
            let diff = node.offset_nearest() + (node.nearest() - th0);
            let one_minus = T::two() * r * ((x + th0) * T::half()).sin() * (diff * T::half()).sin();
            let one_plus = T::one() + r * x.cos();
            (one_minus * one_plus).abs()
        };
        let de = QuadratureSpec {
            method: crate::quadrature::Method::DoubleExponential,
            max_levels: spec.max_levels.min(12).max(8),
            ..*spec
        };
        let imag = integrate_piecewise(|n| T::one() / factor(n).sqrt(), &[T::zero(), th0], &de)?;
        let real = integrate_piecewise(|n| T::one() / factor(n).sqrt(), &[th0, T::FRAC_PI_2()], &de)?;
        let four = T::lit(4.0);
        return Ok(C::new(four * real.value, -four * imag.value));
    }
    let r = integrate_complex_periodic(
        |th| {
            let c = th.cos();
            C::new(T::one(), T::zero()) - r2 * (c * c)
        },
        &lemma_spec(spec),
    )?;
    Ok(r.value)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum CorCase {
    I,
    II,
    III,
    III1,
    III2,
    IV,
    IV1,
    IV2,
}

fn is_real<T: Real>(z: C<T>) -> bool {
    z.im.abs() <= T::lit(1e-12).max(T::tol_floor()) * z.norm()
}

fn is_imaginary<T: Real>(z: C<T>) -> bool {
    z.re.abs() <= T::lit(1e-12).max(T::tol_floor()) * z.norm()
}

/// `I₂ = ∫dθ/√(α² − β²cos²θ)` evaluated as `(1/α)∫dθ/√(1 − (β/α)²cos²θ)`.
fn i2<T: Real>(ab: &AlphaBetaPair<T>, spec: &QuadratureSpec<T>) -> Result<C<T>> {
    let r = ab.beta / ab.alpha;
    Ok(legendre_integral(r * r, spec)? / ab.alpha)
}

fn i3<T: Real>(ab: &AlphaBetaPair<T>, spec: &QuadratureSpec<T>) -> Result<C<T>> {
    let r = ab.alpha / ab.beta;
    Ok(legendre_integral(r * r, spec)? / ab.beta)
}

/// Every case of the corollary whose hypotheses hold, with its value.
pub fn cor_cases<T: Real>(p: &LemmaParams<T>, spec: &QuadratureSpec<T>) -> Result<Vec<(CorCase, C<T>)>> {
    if !p.satisfies_conditions() {
        return Err(Error::ConditionViolated);
    }
    let ab = alpha_beta(p);
    let zero = T::zero();
    let (na, nb) = (ab.alpha.norm(), ab.beta.norm());
    let mut out = Vec::new();
    if na == zero && nb == zero {
        return Err(Error::NoCaseApplies);
    }
    let tol = T::lit(1e-12).max(T::tol_floor());
    let modulus = if na > zero { nb / na } else { T::infinity() };
    if (modulus - T::one()).abs() <= tol {
        return Err(Error::NoCaseApplies);
    }
    if na > zero && modulus < T::one() {
        out.push((CorCase::I, i2(&ab, spec)?));
    }
    if nb > zero && modulus > T::one() {
        out.push((CorCase::II, i3(&ab, spec)?));
    }
    if na > zero && is_real(ab.beta / ab.alpha) {
        let v = i2(&ab, spec)?;
        let w = C::new((ab.alpha * v).re, zero) / ab.alpha;
        out.push((CorCase::III, w));
        if is_real(ab.alpha) {
            out.push((CorCase::III1, C::new(v.re, zero)));
        } else if is_imaginary(ab.alpha) {
            out.push((CorCase::III2, C::new(zero, v.im)));
        }
    }
    if nb > zero && is_real(ab.alpha / ab.beta) {
        let v = i3(&ab, spec)?;
        let w = C::new((ab.beta * v).re, zero) / ab.beta;
        out.push((CorCase::IV, w));
        if is_real(ab.beta) {
            out.push((CorCase::IV1, C::new(v.re, zero)));
        } else if is_imaginary(ab.beta) {
            out.push((CorCase::IV2, C::new(zero, v.im)));
        }
    }
    if out.is_empty() {
        return Err(Error::NoCaseApplies);
    }
    Ok(out)
}

/// The lemma integral through the first applicable corollary case, preferring
/// the real-ratio forms.
pub fn cor_case<T: Real>(p: &LemmaParams<T>, spec: &QuadratureSpec<T>) -> Result<(CorCase, C<T>)> {
    let all = cor_cases(p, spec)?;
    let pick = all
        .iter()
        .find(|(c, _)| matches!(c, CorCase::III1 | CorCase::III2 | CorCase::IV1 | CorCase::IV2))
        .or_else(|| all.iter().find(|(c, _)| matches!(c, CorCase::III | CorCase::IV)))
        .unwrap_or(&all[0]);
    Ok(*pick)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AuxFunctions<T> {
    pub eps: T,
    pub chi: T,
    pub gamma: T,
    pub psi: T,
}

/// `ε, χ, γ, ψ` at `(±δ̂₀, F̂₀)`; `delta0_hat` may be negative.
pub fn aux_functions<T: Real>(mass: T, delta0_hat: T, f0_hat: T) -> Result<AuxFunctions<T>> {
    let d = delta0_hat;
    let rad = mass * mass + d * d / T::lit(4.0) - f0_hat;
    let rad = if rad < T::zero() && rad > -T::tol_floor() * T::one().max(f0_hat.abs()) {
        T::zero()
    } else {
        rad
    };
    if rad < T::zero() {
        return Err(Error::ComplexRadicand);
    }
    let s = rad.sqrt();
    let gamma = f0_hat - d * d * T::half();
    Ok(AuxFunctions {
        eps: -gamma * T::half() + T::lit(1.5) * d * s,
        chi: gamma * T::half() + d * T::half() * s,
        gamma,
        psi: d * s,
    })
}

/// `∫₀^{2π} dx/√(e − χ cos x)` with the principal root; regions where the
/// radicand is negative contribute `−i/√|·|`.
pub fn inv_sqrt_cos_integral<T: Real>(e: T, chi: T, spec: &QuadratureSpec<T>) -> Result<C<T>> {
    let zero = T::zero();
    if e.abs() == chi.abs() {
        return Err(Error::NonFiniteIntegrand(0.0));
    }
    if e.abs() > chi.abs() {
        let sign = if e > zero { T::one() } else { -T::one() };
        let per = QuadratureSpec {
            method: crate::quadrature::Method::PeriodicTrapezoid,
            max_levels: spec.max_levels.max(16),
            ..*spec
        };
        let r = integrate_periodic(|x| T::one() / (sign * (e - chi * x.cos())).sqrt(), &per)?;
        return Ok(if sign > zero {
            C::new(r.value, zero)
        } else {
            C::new(zero, -r.value)
        });
    }
    // Zero at cos x₀ = e/χ on [0, π]; the integral is twice that half period.
    let x0 = (e / chi).acos();
    let abs_val = |node: Node<T>| -> T {
        let diff = node.offset_nearest() + (node.nearest() - x0);
        let v = T::two() * chi * ((node.x + x0) * T::half()).sin() * (diff * T::half()).sin();
        v.abs()
    };
    let de = QuadratureSpec {
        method: crate::quadrature::Method::DoubleExponential,
        ..*spec
    };
    let lower = integrate_piecewise(|n| T::one() / abs_val(n).sqrt(), &[zero, x0], &de)?;
    let upper = integrate_piecewise(|n| T::one() / abs_val(n).sqrt(), &[x0, T::PI()], &de)?;
    // For χ > 0 the radicand is negative on [0, x₀) and positive on (x₀, π].
    let (pos, neg) = if chi > zero {
        (upper.value, lower.value)
    } else {
        (lower.value, upper.value)
    };
    Ok(C::new(T::two() * pos, -T::two() * neg))
}

/// T↓ on the triangle region through the symmetrized ε/χ representation.
pub fn good_formula_t_down<T: Real>(mass: T, delta0_hat: T, f0_hat: T, v0: T) -> Result<C<T>> {
    good_formula_t_down_with(mass, delta0_hat, f0_hat, v0, &QuadratureSpec::default())
}

pub fn good_formula_terms<T: Real>(
    mass: T,
    delta0_hat: T,
    f0_hat: T,
    spec: &QuadratureSpec<T>,
) -> Result<(C<T>, C<T>)> {
    let d = delta0_hat;
    if !(d > T::zero() && d < mass + mass && f0_hat > mass * d && f0_hat < mass * mass + d * d / T::lit(4.0)) {
        return Err(Error::OutOfDomain("good_formula_t_down"));
    }
    let p = aux_functions(mass, d, f0_hat)?;
    let m = aux_functions(mass, -d, f0_hat)?;
    Ok((
        inv_sqrt_cos_integral(p.eps, p.chi, spec)?,
        inv_sqrt_cos_integral(m.eps, m.chi, spec)?,
    ))
}

pub fn good_formula_t_down_with<T: Real>(
    mass: T,
    delta0_hat: T,
    f0_hat: T,
    v0: T,
    spec: &QuadratureSpec<T>,
) -> Result<C<T>> {
    let n = NormalizedParams::new(mass, delta0_hat, f0_hat, v0)?;
    let (first, second) = good_formula_terms(mass, delta0_hat, f0_hat, spec)?;
    Ok((first + second) * (n.prefactor() * T::half()))
}

/// `√(2|J₀|)∫₀^{2π} dx/√(γ − ψ cos x)`.
pub fn gamma_psi_period<T: Real>(n: &NormalizedParams<T>, spec: &QuadratureSpec<T>) -> Result<T> {
    let a = aux_functions(n.mass, n.delta0_hat, n.f0_hat)?;
    let v = inv_sqrt_cos_integral(a.gamma, a.psi, spec)?;
    if v.im != T::zero() {
        return Err(Error::ComplexRadicand);
    }
    Ok(v.re * n.prefactor())
}

/// `√(2|J₀|)·Re∫₀^{2π} dx/√(ε − χ cos x)`.
pub fn re_eps_chi_period<T: Real>(n: &NormalizedParams<T>, spec: &QuadratureSpec<T>) -> Result<T> {
    let a = aux_functions(n.mass, n.delta0_hat, n.f0_hat)?;
    Ok(inv_sqrt_cos_integral(a.eps, a.chi, spec)?.re * n.prefactor())
}

/// T↓ continued across the singular line by integrating the same real
/// interval with the principal square root:
/// `2√(2|J₀|)∫₀² dx/√(x(2−x)(M²x² − 2F̂₀x + δ̂₀²))`.
pub fn t_down_continuation<T: Real>(n: &NormalizedParams<T>, spec: &QuadratureSpec<T>) -> Result<C<T>> {
    let (m, d, f) = (n.mass, n.delta0_hat, n.f0_hat);
    let two = T::two();
    let m2 = m * m;
    let disc = (f - m * d) * (f + m * d);
    let mut pts = vec![T::zero()];
    let roots = if m > T::zero() && disc > T::zero() && f > T::zero() {
        let r = disc.sqrt();
        Some((d * d / (f + r), (f + r) / m2))
    } else {
        None
    };
    if let Some((xm, xp)) = roots {
        for x in [xm, xp] {
            if x > T::zero() && x < two {
                pts.push(x);
            }
        }
    }
    pts.push(two);
    let mut re = T::zero();
    let mut im = T::zero();
    for w in pts.windows(2) {
        let (lo, hi) = (w[0], w[1]);
        let mid = (lo + hi) * T::half();
        let qmid = m2 * mid * mid - two * f * mid + d * d;
        let q = |node: Node<T>| -> T {
            match roots {
                Some((xm, xp)) => {
                    let c = node.nearest();
                    let u = node.offset_nearest();
                    m2 * ((c - xm) + u) * ((c - xp) + u)
                }
                None => m2 * node.x * node.x - two * f * node.x + d * d,
            }
        };
        let part = integrate_piecewise(
            |node: Node<T>| {
                let x = if node.a == T::zero() { node.from_a } else { node.x };
                let y = if node.b == two { node.to_b } else { two - node.x };
                T::one() / (x * y * q(node)).abs().sqrt()
            },
            &[lo, hi],
            spec,
        )?;
        if qmid >= T::zero() {
            re += part.value;
        } else {
            im -= part.value;
        }
    }
    Ok(C::new(re, im) * (two * n.prefactor()))
}

/// `(T°, 2·Re T↓)` on the triangle region, with T↓ given by the symmetrized
/// ε/χ representation.
pub fn real_part_corollary_check<T: Real>(mass: T, delta0_hat: T, f0_hat: T, v0: T) -> Result<(T, T)> {
    let d = delta0_hat;
    if !(d > T::zero() && d < mass + mass && f0_hat > mass * d && f0_hat <= mass * mass + d * d / T::lit(4.0)) {
        return Err(Error::OutOfDomain("real_part_corollary_check"));
    }
    let n = NormalizedParams::new(mass, d, f0_hat, v0)?;
    let engine = PeriodEngine::default();
    let circ = engine.t_circ(&n)?.value;
    let down = good_formula_t_down_with(mass, d, f0_hat, v0, &engine.spec)?;
    Ok((circ, T::two() * down.re))
}

/// Summary of a seeded batch of lemma checks.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LemmaBatch<T> {
    pub samples: usize,
    /// `max |lhs − rhs| / (1 + |lhs|)`.
    pub max_residual: T,
    /// Same measure for every applicable corollary case against `lhs`.
    pub max_case_residual: T,
    /// Applicable cases seen, in [`CorCase`] order.
    pub case_counts: Vec<(CorCase, usize)>,
}

/// Runs the lemma and corollary checks on `n` parameter sets drawn from a
/// ChaCha stream seeded with `seed`. The result does not depend on the
/// thread count.
pub fn lemma_batch<T: Real>(n: usize, seed: u64, spec: &QuadratureSpec<T>) -> Result<LemmaBatch<T>> {
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let params: Vec<LemmaParams<T>> = (0..n).map(|_| LemmaParams::sample(&mut rng)).collect();
    check_lemma(&params, spec)
}

/// Lemma and corollary residuals over explicit parameter sets.
pub fn check_lemma<T: Real>(params: &[LemmaParams<T>], spec: &QuadratureSpec<T>) -> Result<LemmaBatch<T>> {
    use rayon::prelude::*;
    let n = params.len();
    let rows = params
        .par_iter()
        .map(|p| {
            let lhs = lemma_lhs(p, spec)?;
            let rhs = lemma_rhs(p, spec)?;
            let scale = T::one() + lhs.norm();
            let cases = match cor_cases(p, spec) {
                Ok(v) => v,
                Err(Error::NoCaseApplies) => Vec::new(),
                Err(e) => return Err(e),
            };
            let case_res = cases.iter().fold(T::zero(), |m, (_, v)| m.max((*v - lhs).norm() / scale));
            Ok(((lhs - rhs).norm() / scale, case_res, cases.into_iter().map(|c| c.0).collect::<Vec<_>>()))
        })
        .collect::<Result<Vec<_>>>()?;
    let all = [
        CorCase::I,
        CorCase::II,
        CorCase::III,
        CorCase::III1,
        CorCase::III2,
        CorCase::IV,
        CorCase::IV1,
        CorCase::IV2,
    ];
    let mut counts: Vec<(CorCase, usize)> = all.iter().map(|&c| (c, 0)).collect();
    let (mut max_residual, mut max_case_residual) = (T::zero(), T::zero());
    for (r, cr, cases) in rows {
        max_residual = max_residual.max(r);
        max_case_residual = max_case_residual.max(cr);
        for c in cases {
            if let Some(slot) = counts.iter_mut().find(|(k, _)| *k == c) {
                slot.1 += 1;
            }
        }
    }
    counts.retain(|&(_, k)| k > 0);
    Ok(LemmaBatch {
        samples: n,
        max_residual,
        max_case_residual,
        case_counts: counts,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C<f64> {
        C::new(re, im)
    }

    #[test]
    fn trivial_lemma_value() {
        let spec = QuadratureSpec::periodic();
        let p = LemmaParams::new(c(1.0, 0.0), c(0.0, 0.0), c(0.3, 0.2)).unwrap();
        let l = lemma_lhs(&p, &spec).unwrap();
        let r = lemma_rhs(&p, &spec).unwrap();
        assert!((l - c(std::f64::consts::TAU, 0.0)).norm() < 1e-12);
        assert!((r - l).norm() < 1e-12);
    }

    #[test]
    fn condition_rejected() {
        assert_eq!(
            LemmaParams::new(c(1.0, 0.0), c(2.0, 0.0), c(0.1, 0.0)),
            Err(Error::ConditionViolated)
        );
    }

    #[test]
    fn aux_example() {
        let a = aux_functions(1.0f64, 1.0, 1.0).unwrap();
        for v in [a.eps, a.chi, a.gamma, a.psi] {
            assert!((v - 0.5).abs() < 1e-15);
        }
        assert_eq!(aux_functions(1.0, 1.0, 1.0 + 0.25 + 1e-3), Err(Error::ComplexRadicand));
        assert_eq!(aux_functions(1.0, 2.0, 2.0).unwrap().gamma, 0.0);
        assert_eq!(aux_functions(1.0, 1.0, 1.25).unwrap().psi, 0.0);
    }

    #[test]
    fn degenerate_ratio_has_no_case() {
        // b = 0 and t arbitrary gives β = 0: only case (i) and friends apply.
        let spec = QuadratureSpec::periodic();
        let p = LemmaParams::new(c(1.0, 0.0), c(0.0, 0.0), c(0.5, 0.0)).unwrap();
        let ab = alpha_beta(&p);
        assert!((ab.alpha - c(1.0, 0.0)).norm() < 1e-15 && ab.beta.norm() < 1e-15);
        let (_, v) = cor_case(&p, &spec).unwrap();
        assert!((v - c(std::f64::consts::TAU, 0.0)).norm() < 1e-12);
    }
}
