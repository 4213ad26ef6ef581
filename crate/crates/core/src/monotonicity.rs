//! Fiber scans of periods and rotation numbers, divergence probes at the
//! singular lines, the S functionals and the Chebyshev integral inequality.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::param_domain::{
    classify_in, f_sing, NormalizedParams, PeriodRegion, SystemParams, WDomain,
    WRegion,
};
use crate::period_engine::{PeriodEngine, PeriodStatus};
use crate::quadrature::{integrate_piecewise, Node, QuadratureSpec};
use crate::real::Real;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Sign {
    #[serde(rename = "+")]
    Plus,
    #[serde(rename = "-")]
    Minus,
    #[serde(rename = "0")]
    Zero,
}

impl Sign {
    pub fn of<T: Real>(v: T) -> Option<Sign> {
        if v > T::zero() {
            Some(Sign::Plus)
        } else if v < T::zero() {
            Some(Sign::Minus)
        } else if v == T::zero() {
            Some(Sign::Zero)
        } else {
            None
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            Sign::Plus => "+",
            Sign::Minus => "-",
            Sign::Zero => "0",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FiberSample<T> {
    pub f0_hat: T,
    /// `T_{M₊}`, NaN where it is not defined.
    pub t_plus: T,
    /// `T_{M₋}`, NaN where it is not defined.
    pub t_minus: T,
    pub w: T,
    pub region: WRegion,
    pub region_plus: PeriodRegion,
    pub region_minus: PeriodRegion,
    /// Within the exclusion band of a singular line.
    pub excluded: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanConfig<T> {
    pub domain: WDomain,
    /// Samples closer than this to either singular line get no derivative sign.
    pub exclusion: T,
    pub engine: PeriodEngine<T>,
}

impl<T: Real> Default for ScanConfig<T> {
    fn default() -> Self {
        Self {
            domain: WDomain::Extended,
            exclusion: T::lit(1e-4),
            engine: PeriodEngine::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FiberScan<T> {
    pub m_plus: T,
    pub m_minus: T,
    pub delta0_hat: T,
    pub samples: Vec<FiberSample<T>>,
    /// Central-difference signs of `W`, aligned with `samples`.
    pub derivative_signs: Vec<Option<Sign>>,
    pub t_plus_signs: Vec<Option<Sign>>,
    pub t_minus_signs: Vec<Option<Sign>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Quantity {
    W,
    TPlus,
    TMinus,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum Verdict {
    /// All signs `+` on the grid.
    Increasing,
    /// All signs `−` on the grid.
    Decreasing,
    Violation,
    Insufficient,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RegionVerdict<T> {
    pub quantity: Quantity,
    pub region: &'static str,
    pub expected: Sign,
    pub n_signs: usize,
    pub verdict: Verdict,
    /// `F̂₀` values whose sign differs from `expected`.
    pub violations: Vec<T>,
}

impl<T> RegionVerdict<T> {
    pub fn verified(&self) -> bool {
        matches!(
            (&self.verdict, self.expected),
            (Verdict::Increasing, Sign::Plus) | (Verdict::Decreasing, Sign::Minus)
        )
    }
}

/// Expected sign of `∂W/∂F̂₀` per region.
pub fn expected_w_sign(region: WRegion) -> Option<Sign> {
    match region {
        WRegion::DS | WRegion::DP => Some(Sign::Plus),
        WRegion::DL => Some(Sign::Minus),
        _ => None,
    }
}

/// Expected sign of `∂T/∂F̂₀` per period region.
pub fn expected_t_sign(region: PeriodRegion) -> Option<Sign> {
    match region {
        PeriodRegion::PDown => Some(Sign::Plus),
        PeriodRegion::PUp => Some(Sign::Minus),
        _ => None,
    }
}

fn period_region_name(r: PeriodRegion) -> &'static str {
    match r {
        PeriodRegion::PDown => "PDown",
        PeriodRegion::PUp => "PUp",
        PeriodRegion::OnSingular => "OnSingular",
        PeriodRegion::Outside => "Outside",
    }
}

fn period_value<T: Real>(engine: &PeriodEngine<T>, mass: T, d: T, f: T) -> T {
    NormalizedParams::unit(mass, d, f)
        .and_then(|n| engine.t_of(&n))
        .ok()
        .filter(|r| r.status == PeriodStatus::Ok)
        .map_or(T::nan(), |r| r.value)
}

fn uniform_grid<T: Real>(lo: T, hi: T, n: usize) -> Vec<T> {
    let step = (hi - lo) / T::lit((n - 1) as f64);
    (0..n)
        .map(|i| if i + 1 == n { hi } else { lo + step * T::lit(i as f64) })
        .collect()
}

fn central_signs<T: Real, K: PartialEq + Copy>(
    values: &[T],
    keys: &[Option<K>],
) -> Vec<Option<Sign>> {
    let n = values.len();
    (0..n)
        .map(|i| {
            if i == 0 || i + 1 == n {
                return None;
            }
            let k = keys[i]?;
            if keys[i - 1] != Some(k) || keys[i + 1] != Some(k) {
                return None;
            }
            Sign::of(values[i + 1] - values[i - 1])
        })
        .collect()
}

/// Samples `T_{M₊}`, `T_{M₋}` and `W` along the `F̂₀`-fiber at fixed `δ̂₀`.
pub fn scan_fiber<T: Real>(
    m_plus: T,
    m_minus: T,
    delta0_hat: T,
    f0_range: (T, T),
    n_samples: usize,
    config: &ScanConfig<T>,
) -> Result<FiberScan<T>> {
    if !(delta0_hat > T::zero()) {
        return Err(Error::InvalidParams("delta0_hat must be positive".into()));
    }
    if n_samples < 3 || !(f0_range.0 < f0_range.1) {
        return Err(Error::InvalidParams("need n_samples >= 3 and f_min < f_max".into()));
    }
    let fs_plus = f_sing(m_plus, delta0_hat);
    let fs_minus = f_sing(m_minus, delta0_hat);
    let grid = uniform_grid(f0_range.0, f0_range.1, n_samples);
    let engine = config.engine;
    let samples: Vec<FiberSample<T>> = grid
        .par_iter()
        .map(|&f| {
            let label = classify_in(m_plus, m_minus, delta0_hat, f, config.domain);
            let t_plus = period_value(&engine, m_plus, delta0_hat, f);
            let t_minus = period_value(&engine, m_minus, delta0_hat, f);
            let excluded = (f - fs_plus).abs() < config.exclusion
                || (f - fs_minus).abs() < config.exclusion;
            FiberSample {
                f0_hat: f,
                t_plus,
                t_minus,
                w: t_minus / t_plus,
                region: label.w_region,
                region_plus: label.period_region_plus,
                region_minus: label.period_region_minus,
                excluded,
            }
        })
        .collect();

    let keep = |s: &FiberSample<T>, r: Option<&'static str>, v: T| {
        if s.excluded || !v.is_finite() {
            None
        } else {
            r
        }
    };
    let w_keys: Vec<_> = samples
        .iter()
        .map(|s| keep(s, expected_w_sign(s.region).map(|_| s.region.as_str()), s.w))
        .collect();
    let tp_keys: Vec<_> = samples
        .iter()
        .map(|s| {
            let r = expected_t_sign(s.region_plus).map(|_| period_region_name(s.region_plus));
            keep(s, r, s.t_plus)
        })
        .collect();
    let tm_keys: Vec<_> = samples
        .iter()
        .map(|s| {
            let r = expected_t_sign(s.region_minus).map(|_| period_region_name(s.region_minus));
            keep(s, r, s.t_minus)
        })
        .collect();
    let ws: Vec<T> = samples.iter().map(|s| s.w).collect();
    let tps: Vec<T> = samples.iter().map(|s| s.t_plus).collect();
    let tms: Vec<T> = samples.iter().map(|s| s.t_minus).collect();
    Ok(FiberScan {
        m_plus,
        m_minus,
        delta0_hat,
        derivative_signs: central_signs(&ws, &w_keys),
        t_plus_signs: central_signs(&tps, &tp_keys),
        t_minus_signs: central_signs(&tms, &tm_keys),
        samples,
    })
}

impl<T: Real> FiberScan<T> {
    fn verdicts_for(
        &self,
        quantity: Quantity,
        signs: &[Option<Sign>],
        region_of: impl Fn(&FiberSample<T>) -> (&'static str, Option<Sign>),
        regions: &[&'static str],
    ) -> Vec<RegionVerdict<T>> {
        regions
            .iter()
            .filter_map(|&name| {
                let mut expected = None;
                let mut seen = Vec::new();
                for (s, sign) in self.samples.iter().zip(signs) {
                    let (r, e) = region_of(s);
                    if r != name {
                        continue;
                    }
                    expected = expected.or(e);
                    if let Some(sign) = sign {
                        seen.push((s.f0_hat, *sign));
                    }
                }
                let expected = expected?;
                let violations: Vec<T> =
                    seen.iter().filter(|(_, s)| *s != expected).map(|(f, _)| *f).collect();
                let verdict = if seen.len() < 3 {
                    Verdict::Insufficient
                } else if seen.iter().all(|(_, s)| *s == Sign::Plus) {
                    Verdict::Increasing
                } else if seen.iter().all(|(_, s)| *s == Sign::Minus) {
                    Verdict::Decreasing
                } else {
                    Verdict::Violation
                };
                Some(RegionVerdict {
                    quantity,
                    region: name,
                    expected,
                    n_signs: seen.len(),
                    verdict,
                    violations,
                })
            })
            .collect()
    }

    /// Verdicts for `W` on `D_S`, `D_L`, `D_P`, skipping regions the fiber misses.
    pub fn w_verdicts(&self) -> Vec<RegionVerdict<T>> {
        self.verdicts_for(
            Quantity::W,
            &self.derivative_signs,
            |s| (s.region.as_str(), expected_w_sign(s.region)),
            &["DS", "DL", "DP"],
        )
    }

    /// Verdicts for `T_{M₊}` and `T_{M₋}` on `P↓` and `P↑`.
    pub fn t_verdicts(&self) -> Vec<RegionVerdict<T>> {
        let mut out = self.verdicts_for(
            Quantity::TPlus,
            &self.t_plus_signs,
            |s| (period_region_name(s.region_plus), expected_t_sign(s.region_plus)),
            &["PDown", "PUp"],
        );
        out.extend(self.verdicts_for(
            Quantity::TMinus,
            &self.t_minus_signs,
            |s| (period_region_name(s.region_minus), expected_t_sign(s.region_minus)),
            &["PDown", "PUp"],
        ));
        out
    }

    pub fn verdicts(&self) -> Vec<RegionVerdict<T>> {
        let mut v = self.w_verdicts();
        v.extend(self.t_verdicts());
        v
    }
}

/// `W` just above the `M₋` singular line and just below the `M₊` one, for
/// combined masses `M₊ = m_plus`, `M₋ = m_minus`.
pub fn w_boundary_values<T: Real>(
    m_plus: T,
    m_minus: T,
    delta0_hat: T,
    offset: T,
    engine: &PeriodEngine<T>,
) -> Result<(T, T)> {
    let at = |f: T| -> Result<T> {
        let (mp, mm) = ((m_plus + m_minus) * T::half(), (m_plus - m_minus) * T::half());
        let p = SystemParams::from_normalized(mp, mm, T::one(), delta0_hat, f)?;
        Ok(engine.rotation_number_at(&p, WRegion::DL)?.w)
    };
    Ok((
        at(f_sing(m_minus, delta0_hat) + offset)?,
        at(f_sing(m_plus, delta0_hat) - offset)?,
    ))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Side {
    Below,
    Above,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DivergenceProbe<T> {
    /// `(ε, T)` at `F̂₀ = F̂ˢⁱⁿᵍ ∓ ε`.
    pub points: Vec<(T, T)>,
    pub strictly_increasing: bool,
    /// `ΔT / Δlog(1/ε)` between consecutive points.
    pub log_slopes: Vec<T>,
    /// `Δlog T / Δlog(1/ε)` between consecutive points.
    pub power_exponents: Vec<T>,
}

/// Periods approaching the singular line from one side.
pub fn divergence_probe<T: Real>(
    mass: T,
    delta0_hat: T,
    side: Side,
    eps_sequence: &[T],
    engine: &PeriodEngine<T>,
) -> Result<DivergenceProbe<T>> {
    if eps_sequence.iter().any(|e| !(*e > T::zero()))
        || eps_sequence.windows(2).any(|w| !(w[1] < w[0]))
    {
        return Err(Error::InvalidParams("eps_sequence must be positive and decreasing".into()));
    }
    let fs = f_sing(mass, delta0_hat);
    let points = eps_sequence
        .iter()
        .map(|&e| {
            let f = match side {
                Side::Below => fs - e,
                Side::Above => fs + e,
            };
            let n = NormalizedParams::unit(mass, delta0_hat, f)?;
            let r = engine.t_of(&n)?;
            Ok((e, r.value))
        })
        .collect::<Result<Vec<_>>>()?;
    let strictly_increasing = points.windows(2).all(|w| w[1].1 > w[0].1);
    let log_slopes = points
        .windows(2)
        .map(|w| (w[1].1 - w[0].1) / (w[0].0 / w[1].0).ln())
        .collect();
    let power_exponents = points
        .windows(2)
        .map(|w| (w[1].1 / w[0].1).ln() / (w[0].0 / w[1].0).ln())
        .collect();
    Ok(DivergenceProbe {
        points,
        strictly_increasing,
        log_slopes,
        power_exponents,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum SLocation {
    NearM1,
    NearM2,
    NearM3,
    NearM4,
    Interior,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SFunctionalSample<T> {
    pub a: T,
    pub b: T,
    pub c: T,
    pub s_value: T,
    pub location: SLocation,
}

/// `f_sing(a, b)` in squared variables.
fn f_sing_sq<T: Real>(a: T, b: T) -> T {
    f_sing(a.sqrt(), b.sqrt())
}

fn in_p_up<T: Real>(a: T, b: T, c: T) -> bool {
    a >= T::zero() && b > T::zero() && c > f_sing_sq(a, b) && c * c > a * b
}

fn in_p_down<T: Real>(a: T, b: T, c: T) -> bool {
    a > T::zero() && b > T::zero() && c < f_sing_sq(a, b)
}

fn up_r<T: Real>(a: T, b: T, c: T) -> Result<T> {
    let r2 = c * c - a * b;
    if r2 <= T::zero() || !r2.is_finite() {
        return Err(Error::ComplexRadicand);
    }
    Ok(r2.sqrt())
}

/// Denominator `(2c−b)(1−τ) + 2r(1+τ)` from `τ` and `1−τ`.
fn kernel_den<T: Real>(b: T, c: T, r: T, tau: T, one_minus: T) -> T {
    (c + c - b) * one_minus + (r + r) * (T::one() + tau)
}

pub fn kernel_f<T: Real>(a: T, b: T, c: T, tau: T) -> Result<T> {
    let r = up_r(a, b, c)?;
    Ok(((c + r) + (c - r) * tau) / kernel_den(b, c, r, tau, T::one() - tau))
}

pub fn kernel_g<T: Real>(a: T, b: T, c: T, tau: T) -> Result<T> {
    let r = up_r(a, b, c)?;
    Ok((T::one() + tau) / kernel_den(b, c, r, tau, T::one() - tau))
}

pub fn kernel_p<T: Real>(a: T, b: T, c: T, tau: T) -> Result<T> {
    let r = up_r(a, b, c)?;
    let one_minus = T::one() - tau;
    Ok(T::lit(4.0) / (tau * one_minus * kernel_den(b, c, r, tau, one_minus)).sqrt())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Direction {
    Increasing,
    Decreasing,
}

/// Directions of `τ ↦ f` and `τ ↦ g` on `[0, 1]`.
pub fn kernel_directions<T: Real>(a: T, b: T, c: T) -> (Direction, Direction) {
    let f = if c <= a + a {
        Direction::Increasing
    } else {
        Direction::Decreasing
    };
    let g = if c + c >= b {
        Direction::Increasing
    } else {
        Direction::Decreasing
    };
    (f, g)
}

/// `(∫p, ∫fp, ∫gp, ∫fgp)` over `[0, 1]`.
pub fn kernel_moments<T: Real>(a: T, b: T, c: T, spec: &QuadratureSpec<T>) -> Result<[T; 4]> {
    let r = up_r(a, b, c)?;
    let mut out = [T::zero(); 4];
    for (k, slot) in out.iter_mut().enumerate() {
        let res = integrate_piecewise(
            |n: Node<T>| {
                let (tau, om) = (n.from_a, n.to_b);
                let den = kernel_den(b, c, r, tau, om);
                let p = T::lit(4.0) / (tau * om * den).sqrt();
                let f = ((c + r) + (c - r) * tau) / den;
                let g = (T::one() + tau) / den;
                match k {
                    0 => p,
                    1 => f * p,
                    2 => g * p,
                    _ => f * g * p,
                }
            },
            &[T::zero(), T::one()],
            spec,
        )?;
        *slot = res.value;
    }
    Ok(out)
}

fn s_spec<T: Real>() -> QuadratureSpec<T> {
    QuadratureSpec::double_exponential().with_rel_tol(T::lit(1e-13).max(T::tol_floor()))
}

/// `S↑` on `P↑` from the kernel integrals.
pub fn s_up_kernel<T: Real>(a: T, b: T, c: T) -> Result<T> {
    if !in_p_up(a, b, c) {
        return Err(Error::OutOfDomain("s_up"));
    }
    let r = up_r(a, b, c)?;
    let [ip, ifp, igp, ifgp] = kernel_moments(a, b, c, &s_spec())?;
    Ok(b / (T::two() * r * r) * (c / r * ip * igp + T::lit(3.0) * ifgp * ip - ifp * igp))
}

pub fn s_up<T: Real>(a: T, b: T, c: T) -> Result<SFunctionalSample<T>> {
    s_up_at(a, b, c, SLocation::Interior)
}

pub fn s_up_at<T: Real>(a: T, b: T, c: T, location: SLocation) -> Result<SFunctionalSample<T>> {
    Ok(SFunctionalSample {
        a,
        b,
        c,
        s_value: s_up_kernel(a, b, c)?,
        location,
    })
}

/// Distance in `a` to the singular boundary `c = f_sing(a, b)`.
fn a_boundary<T: Real>(b: T, c: T) -> T {
    if c + c <= b {
        c - b / T::lit(4.0)
    } else {
        c * c / b
    }
}

/// `T̃_c·T̃_a − T̃·T̃_ac` from central differences with one Richardson level.
///
/// Steps are `rel_step` times the distance to the nearest boundary in each
/// direction.
pub fn s_finite_difference<T: Real>(
    a: T,
    b: T,
    c: T,
    rel_step: T,
    engine: &PeriodEngine<T>,
) -> Result<T> {
    let fs = f_sing_sq(a, b);
    let dist_c = (c - fs).abs();
    let a_star = a_boundary(b, c);
    let dist_a = if a_star > T::zero() { (a_star - a).abs().min(a) } else { a };
    let hc = rel_step * dist_c.min(T::one() + c.abs());
    let ha = rel_step * dist_a;
    if !(hc > T::zero() && ha > T::zero()) {
        return Err(Error::OutOfDomain("s_finite_difference"));
    }
    let t = |da: T, dc: T| -> Result<T> {
        let r = engine.t_tilde(a + da, b, c + dc)?;
        if r.status != PeriodStatus::Ok {
            return Err(Error::OutOfDomain("s_finite_difference"));
        }
        Ok(r.value)
    };
    let t0 = t(T::zero(), T::zero())?;
    let deriv = |h: T, k: T| -> Result<(T, T, T)> {
        let dc = (t(T::zero(), h)? - t(T::zero(), -h)?) / (h + h);
        let da = (t(k, T::zero())? - t(-k, T::zero())?) / (k + k);
        let dac = (t(k, h)? - t(k, -h)? - t(-k, h)? + t(-k, -h)?) / (T::lit(4.0) * h * k);
        Ok((dc, da, dac))
    };
    let (c1, a1, x1) = deriv(hc, ha)?;
    let (c2, a2, x2) = deriv(hc * T::half(), ha * T::half())?;
    let rich = |coarse: T, fine: T| (T::lit(4.0) * fine - coarse) / T::lit(3.0);
    let (dc, da, dac) = (rich(c1, c2), rich(a1, a2), rich(x1, x2));
    Ok(dc * da - t0 * dac)
}

/// `g^β_α(a, b, c) = ∫₀² x^β / (Q^α √(2−x)) dx` with `Q = ax² − 2cx + b`.
pub fn g_integral<T: Real>(beta: T, alpha: T, a: T, b: T, c: T, spec: &QuadratureSpec<T>) -> Result<T> {
    let two = T::two();
    let four = T::lit(4.0);
    let vertex = c / a;
    let mut points = vec![T::zero()];
    if vertex > T::zero() && vertex < two {
        points.push(vertex);
    }
    points.push(two);
    let kappa = b - c * c / a;
    let res = integrate_piecewise(
        |n: Node<T>| {
            let x = if n.a == T::zero() { n.from_a } else { n.x };
            let y = if n.b == two { n.to_b } else { two - n.x };
            let u = n.offset_nearest();
            let near = n.nearest();
            let q = if near == T::zero() {
                b + u * (a * u - c - c)
            } else if near == two {
                (four * a - four * c + b) + u * (four * a - c - c + a * u)
            } else {
                kappa + a * u * u
            };
            x.powf(beta) / (q.powf(alpha) * y.sqrt())
        },
        &points,
        spec,
    )?;
    Ok(res.value)
}

/// `3g^{5/2}_{5/2} g^{−1/2}_{1/2} − g^{3/2}_{3/2} g^{1/2}_{3/2}` on `P↓`.
pub fn s_down_value<T: Real>(a: T, b: T, c: T) -> Result<T> {
    if !in_p_down(a, b, c) {
        return Err(Error::OutOfDomain("s_down"));
    }
    let spec = s_spec();
    let h = T::half();
    let g = |beta: T, alpha: T| g_integral(beta, alpha, a, b, c, &spec);
    let five = T::lit(2.5);
    let three = T::lit(1.5);
    Ok(T::lit(3.0) * g(five, five)? * g(-h, h)? - g(three, three)? * g(h, three)?)
}

pub fn s_down<T: Real>(a: T, b: T, c: T) -> Result<SFunctionalSample<T>> {
    s_down_at(a, b, c, SLocation::Interior)
}

pub fn s_down_at<T: Real>(a: T, b: T, c: T, location: SLocation) -> Result<SFunctionalSample<T>> {
    Ok(SFunctionalSample {
        a,
        b,
        c,
        s_value: s_down_value(a, b, c)?,
        location,
    })
}

/// Leading growth of `S↓` near `M₄` at `b = ε`: `−log ε / (2|c|(a+|c|)²)`.
pub fn m4_asymptote<T: Real>(a: T, c: T, eps: T) -> T {
    let ac = c.abs();
    -eps.ln() / (T::two() * ac * (a + ac) * (a + ac))
}

/// Points at the given offsets from the boundary sets of `P↑`, moved inward.
pub fn boundary_samples_up<T: Real>(offsets: &[T]) -> Vec<(SLocation, T, T, T)> {
    let l = T::lit;
    let mut out = Vec::new();
    for &o in offsets {
        for (b, c) in [(1.0, 0.5), (1.0, 1.0), (4.0, 2.0), (0.25, 0.2)] {
            out.push((SLocation::NearM1, o, l(b), l(c)));
        }
        for (a, c) in [(1.0, 0.5), (1.0, 2.0), (2.0, 1.0)] {
            out.push((SLocation::NearM2, l(a), o, l(c)));
        }
        for (a, b) in [(1.0, 1.0), (1.0, 2.0), (1.0, 4.0), (1.0, 9.0), (0.25, 0.5)] {
            let (a, b) = (l(a), l(b));
            out.push((SLocation::NearM3, a, b, f_sing_sq(a, b) + o));
        }
    }
    out
}

/// Points at the given offsets from the boundary sets of `P↓`, moved inward.
pub fn boundary_samples_down<T: Real>(offsets: &[T]) -> Vec<(SLocation, T, T, T)> {
    let l = T::lit;
    let mut out = Vec::new();
    for &o in offsets {
        for (a, b) in [(1.0, 1.0), (1.0, 2.0), (1.0, 0.25)] {
            let (a, b) = (l(a), l(b));
            out.push((SLocation::NearM1, a, b, (a * b).sqrt() - o));
        }
        for (a, b) in [(1.0, 4.0), (1.0, 9.0), (0.25, 4.0)] {
            let (a, b) = (l(a), l(b));
            out.push((SLocation::NearM2, a, b, a + b / l(4.0) - o));
        }
        for (b, c) in [(1.0, 0.0), (1.0, 0.2), (4.0, -1.0)] {
            out.push((SLocation::NearM3, o, l(b), l(c)));
        }
        for (a, c) in [(1.0, -1.0), (1.0, -3.0), (0.5, -0.2)] {
            out.push((SLocation::NearM4, l(a), o, l(c)));
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ChebyshevCheck<T> {
    /// `(∫fp)(∫gp)`
    pub lhs: T,
    /// `(∫fgp)(∫p)`
    pub rhs: T,
    pub holds: bool,
}

fn monotone_directions<T: Real>(v: &[T]) -> (bool, bool) {
    let inc = v.windows(2).all(|w| w[1] >= w[0]);
    let dec = v.windows(2).all(|w| w[1] <= w[0]);
    (inc, dec)
}

/// Chebyshev's integral inequality for sampled `f`, `g`, `p` using trapezoid
/// weights on `grid`.
pub fn chebyshev_check<T: Real>(f: &[T], g: &[T], p: &[T], grid: &[T]) -> Result<ChebyshevCheck<T>> {
    let n = grid.len();
    if n < 2 || f.len() != n || g.len() != n || p.len() != n {
        return Err(Error::InvalidParams("samples and grid must have equal length >= 2".into()));
    }
    if grid.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::InvalidParams("grid must be strictly increasing".into()));
    }
    if p.iter().any(|v| !(*v >= T::zero())) {
        return Err(Error::InvalidParams("weight must be non-negative".into()));
    }
    let support: Vec<usize> = (0..n).filter(|&i| p[i] > T::zero()).collect();
    let fs: Vec<T> = support.iter().map(|&i| f[i]).collect();
    let gs: Vec<T> = support.iter().map(|&i| g[i]).collect();
    let (fi, fd) = monotone_directions(&fs);
    let (gi, gd) = monotone_directions(&gs);
    if !((fi && gi) || (fd && gd)) {
        return Err(Error::MonotonicityViolated);
    }
    let mut w = vec![T::zero(); n];
    for i in 0..n - 1 {
        let h = (grid[i + 1] - grid[i]) * T::half();
        w[i] += h;
        w[i + 1] += h;
    }
    let (mut ip, mut ifp, mut igp, mut ifgp) = (T::zero(), T::zero(), T::zero(), T::zero());
    for i in 0..n {
        let wp = w[i] * p[i];
        ip += wp;
        ifp += wp * f[i];
        igp += wp * g[i];
        ifgp += wp * f[i] * g[i];
    }
    let lhs = ifp * igp;
    let rhs = ifgp * ip;
    let tol = T::tol_floor() * lhs.abs().max(rhs.abs());
    Ok(ChebyshevCheck {
        lhs,
        rhs,
        holds: lhs <= rhs + tol,
    })
}

/// Open Chebyshev grid on `(0, 1)`, clustered at the ends where `p` is singular.
pub fn kernel_grid<T: Real>(n: usize) -> Vec<T> {
    (0..n)
        .map(|k| {
            let th = T::PI() * (T::lit(k as f64) + T::half()) / T::lit(n as f64);
            (T::one() - th.cos()) * T::half()
        })
        .collect()
}

/// `f`, `g`, `p` kernels sampled on a grid, ready for [`chebyshev_check`].
pub fn kernel_triple<T: Real>(a: T, b: T, c: T, grid: &[T]) -> Result<(Vec<T>, Vec<T>, Vec<T>)> {
    let mut f = Vec::with_capacity(grid.len());
    let mut g = Vec::with_capacity(grid.len());
    let mut p = Vec::with_capacity(grid.len());
    for &t in grid {
        f.push(kernel_f(a, b, c, t)?);
        g.push(kernel_g(a, b, c, t)?);
        p.push(kernel_p(a, b, c, t)?);
    }
    Ok((f, g, p))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn chebyshev_trivial_cases() {
        let grid: Vec<f64> = (0..=1000).map(|i| i as f64 / 1000.0).collect();
        let one = vec![1.0; grid.len()];
        let r = chebyshev_check(&grid, &grid, &one, &grid).unwrap();
        assert!((r.lhs - 0.25).abs() < 1e-12 && (r.rhs - 1.0 / 3.0).abs() < 1e-6 && r.holds);
        let down: Vec<f64> = grid.iter().map(|x| 1.0 - x).collect();
        assert_eq!(
            chebyshev_check(&grid, &down, &one, &grid),
            Err(Error::MonotonicityViolated)
        );
        let k = vec![2.0; grid.len()];
        let r = chebyshev_check(&k, &k, &one, &grid).unwrap();
        assert!(r.holds && (r.lhs - r.rhs).abs() < 1e-12);
    }

    #[test]
    fn kernel_at_zero() {
        let (a, b, c) = (1.0f64, 1.0, 1.1);
        let r = (c * c - a * b).sqrt();
        let den = 2.0 * c - b + 2.0 * r;
        assert!((kernel_f(a, b, c, 0.0).unwrap() - (c + r) / den).abs() < 1e-15);
        assert!((kernel_g(a, b, c, 0.0).unwrap() * den - 1.0).abs() < 1e-15);
        assert_eq!(kernel_f(1.0, 1.0, 0.5, 0.0), Err(Error::ComplexRadicand));
    }

    #[test]
    fn sign_of_values() {
        assert_eq!(Sign::of(1.0), Some(Sign::Plus));
        assert_eq!(Sign::of(-1.0), Some(Sign::Minus));
        assert_eq!(Sign::of(0.0), Some(Sign::Zero));
        assert_eq!(Sign::of(f64::NAN), None);
    }
}
