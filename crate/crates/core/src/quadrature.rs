//! Numerical integration: tanh-sinh for endpoint singularities, adaptive
//! Gauss-Kronrod panels, periodic trapezoid (real and complex), and nested
//! double integrals.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::real::Real;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    DoubleExponential,
    AdaptivePanel,
    PeriodicTrapezoid,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSpec<T> {
    pub rel_tol: T,
    pub abs_tol: T,
    /// Refinement levels (double exponential, trapezoid) or bisection depth
    /// (adaptive panels).
    pub max_levels: usize,
    pub method: Method,
}

impl<T: Real> Default for QuadratureSpec<T> {
    fn default() -> Self {
        Self::double_exponential()
    }
}

impl<T: Real> QuadratureSpec<T> {
    pub fn double_exponential() -> Self {
        Self {
            rel_tol: T::lit(1e-10).max(T::tol_floor()),
            abs_tol: T::lit(1e-14).max(T::min_positive_value()),
            max_levels: 12,
            method: Method::DoubleExponential,
        }
    }

    pub fn adaptive_panel() -> Self {
        Self {
            max_levels: 30,
            method: Method::AdaptivePanel,
            ..Self::double_exponential()
        }
    }

    pub fn periodic() -> Self {
        Self {
            max_levels: 16,
            method: Method::PeriodicTrapezoid,
            ..Self::double_exponential()
        }
    }

    pub fn with_rel_tol(mut self, rel_tol: T) -> Self {
        self.rel_tol = rel_tol.max(T::tol_floor());
        self
    }

    pub fn with_max_levels(mut self, levels: usize) -> Self {
        self.max_levels = levels;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.rel_tol > T::zero() && self.abs_tol > T::zero()) || self.max_levels == 0 {
            return Err(Error::InvalidParams(
                "quadrature tolerances must be positive and max_levels >= 1".into(),
            ));
        }
        Ok(())
    }

    fn tol(&self, value: T) -> T {
        self.abs_tol.max(self.rel_tol * value.abs())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct IntegralResult<T, V = T> {
    pub value: V,
    pub err_estimate: T,
    pub evaluations: usize,
    pub converged: bool,
    /// Estimates after each refinement level, coarsest first.
    pub partials: Vec<V>,
}

impl<T: Real, V: Copy + std::ops::Add<Output = V>> IntegralResult<T, V> {
    /// Sums results of integrals over adjacent pieces.
    pub fn combine(parts: &[Self]) -> Self
    where
        V: num_traits::Zero,
    {
        let mut value = V::zero();
        let mut err = T::zero();
        let mut evaluations = 0;
        let mut converged = true;
        let depth = parts.iter().map(|p| p.partials.len()).max().unwrap_or(0);
        let mut partials = vec![V::zero(); depth];
        for p in parts {
            value = value + p.value;
            err += p.err_estimate;
            evaluations += p.evaluations;
            converged &= p.converged;
            for (k, slot) in partials.iter_mut().enumerate() {
                let v = p.partials.get(k).or(p.partials.last()).copied();
                *slot = *slot + v.unwrap_or(p.value);
            }
        }
        Self {
            value,
            err_estimate: err,
            evaluations,
            converged,
            partials,
        }
    }

    pub fn map<W>(self, f: impl Fn(V) -> W) -> IntegralResult<T, W> {
        IntegralResult {
            value: f(self.value),
            err_estimate: self.err_estimate,
            evaluations: self.evaluations,
            converged: self.converged,
            partials: self.partials.into_iter().map(f).collect(),
        }
    }
}

impl<T: Real> IntegralResult<T, T> {
    pub fn scale(mut self, c: T) -> Self {
        self.value *= c;
        self.err_estimate *= c.abs();
        for p in &mut self.partials {
            *p *= c;
        }
        self
    }

    /// True when partial sums keep growing in magnitude, the signature of an
    /// integrand approaching a non-integrable singularity.
    pub fn grows_monotonically(&self) -> bool {
        self.partials.len() >= 3 && self.partials.windows(2).all(|w| w[1].abs() > w[0].abs())
    }
}

/// Quadrature node on a segment `[a, b]`: `from_a = x − a` and `to_b = b − x`
/// are computed directly so integrands can resolve endpoint behavior without
/// cancellation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Node<T> {
    pub x: T,
    pub a: T,
    pub b: T,
    pub from_a: T,
    pub to_b: T,
}

impl<T: Real> Node<T> {
    pub fn interior(x: T, a: T, b: T) -> Self {
        Self {
            x,
            a,
            b,
            from_a: x - a,
            to_b: b - x,
        }
    }

    /// Offset of `x` from the nearer endpoint, signed (`x − a` or `x − b`).
    pub fn offset_nearest(&self) -> T {
        if self.from_a <= self.to_b {
            self.from_a
        } else {
            -self.to_b
        }
    }

    /// The endpoint nearer to `x`.
    pub fn nearest(&self) -> T {
        if self.from_a <= self.to_b {
            self.a
        } else {
            self.b
        }
    }
}

fn check_finite<T: Real>(v: T, x: T) -> Result<T> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::NonFiniteIntegrand(x.f64()))
    }
}

/// Integrates `f(x)` over `[a, b]` where `f` may have inverse-square-root
/// endpoint singularities.
///
/// Nodes that round onto an endpoint are dropped, so a singularity at `b`
/// limits accuracy to about `√(ε·|b|)`. Use [`tanh_sinh`] with the node
/// offsets when that matters.
pub fn integrate_endpoint_singular<T: Real>(
    f: impl FnMut(T) -> T,
    a: T,
    b: T,
    spec: &QuadratureSpec<T>,
) -> Result<IntegralResult<T>> {
    let mut f = f;
    let mut g = move |n: Node<T>| {
        if n.x <= n.a || n.x >= n.b {
            T::zero()
        } else {
            f(n.x)
        }
    };
    match spec.method {
        Method::AdaptivePanel => adaptive_panel(g, a, b, spec),
        _ => tanh_sinh(&mut g, a, b, spec),
    }
}

/// Integrates over `[a, b]` split at the given interior breakpoints, handing
/// the integrand the full node description of the current segment.
pub fn integrate_piecewise<T: Real>(
    mut f: impl FnMut(Node<T>) -> T,
    points: &[T],
    spec: &QuadratureSpec<T>,
) -> Result<IntegralResult<T>> {
    if points.len() < 2 {
        return Err(Error::InvalidParams("need at least two points".into()));
    }
    let mut parts = Vec::with_capacity(points.len() - 1);
    for w in points.windows(2) {
        if !(w[0] < w[1]) {
            return Err(Error::InvalidParams("breakpoints must increase".into()));
        }
        let r = match spec.method {
            Method::AdaptivePanel => adaptive_panel(&mut f, w[0], w[1], spec)?,
            _ => tanh_sinh(&mut f, w[0], w[1], spec)?,
        };
        parts.push(r);
    }
    Ok(IntegralResult::combine(&parts))
}

/// Tanh-sinh rule on `[a, b]` with level halving of the step.
pub fn tanh_sinh<T: Real>(
    mut f: impl FnMut(Node<T>) -> T,
    a: T,
    b: T,
    spec: &QuadratureSpec<T>,
) -> Result<IntegralResult<T>> {
    spec.validate()?;
    if !(a < b) {
        return Err(Error::InvalidParams("integration bounds must satisfy a < b".into()));
    }
    let width = b - a;
    let half_pi = T::FRAC_PI_2();
    let tiny = T::min_positive_value() / T::epsilon();
    let mut evaluations = 0usize;

    // Contribution of the symmetric node pair at abscissa t >= 0.
    let mut pair = |t: T, evals: &mut usize| -> Result<Option<T>> {
        let u = half_pi * t.sinh();
        let em = (-(u + u)).exp();
        let w = width * half_pi * t.cosh() * em / ((T::one() + em) * (T::one() + em)) * T::two();
        let small = width * em / (T::one() + em);
        if t > T::zero() && small <= tiny {
            return Ok(None);
        }
        let large = width - small;
        if t == T::zero() {
            let mid = a + width * T::half();
            *evals += 1;
            let v = check_finite(f(Node::interior(mid, a, b)), mid)?;
            return Ok(Some(w * v));
        }
        let left = Node {
            x: a + small,
            a,
            b,
            from_a: small,
            to_b: large,
        };
        let right = Node {
            x: b - small,
            a,
            b,
            from_a: large,
            to_b: small,
        };
        *evals += 2;
        let vl = check_finite(f(left), left.x)?;
        let vr = check_finite(f(right), right.x)?;
        Ok(Some(w * (vl + vr)))
    };

    // Level 0 with h = 1 fixes the truncation point.
    let mut raw = T::zero();
    let mut t_max = T::zero();
    let mut k = 0usize;
    loop {
        let t = T::lit(k as f64);
        match pair(t, &mut evaluations)? {
            Some(term) => {
                raw += term;
                t_max = t;
                let negligible = term.abs() <= T::epsilon() * T::lit(1e-3) * raw.abs();
                if k >= 4 && negligible {
                    break;
                }
            }
            None => break,
        }
        k += 1;
        if k > 64 {
            break;
        }
    }
    let mut h = T::one();
    let mut estimate = raw * h;
    let mut partials = vec![estimate];
    let mut err = T::infinity();
    let mut converged = false;
    for level in 1..=spec.max_levels {
        h = h * T::half();
        let mut t = h;
        let mut add = T::zero();
        while t <= t_max {
            if let Some(term) = pair(t, &mut evaluations)? {
                add += term;
            }
            t = t + h + h;
        }
        raw += add;
        let next = raw * h;
        err = (next - estimate).abs() * T::lit(4.0);
        estimate = next;
        partials.push(estimate);
        if level >= 3 && err <= spec.tol(estimate) {
            converged = true;
            break;
        }
    }
    Ok(IntegralResult {
        value: estimate,
        err_estimate: err,
        evaluations,
        converged,
        partials,
    })
}

const GK_X: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
];
const GK_WK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];
const GK_WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

fn gk15<T: Real>(
    f: &mut impl FnMut(Node<T>) -> T,
    a: T,
    b: T,
    evals: &mut usize,
) -> Result<(T, T)> {
    let c = (a + b) * T::half();
    let hw = (b - a) * T::half();
    let mut kron = T::zero();
    let mut gauss = T::zero();
    for (i, (&x, &wk)) in GK_X.iter().zip(GK_WK.iter()).enumerate() {
        let d = hw * T::lit(x);
        let pts: &[T] = if i == 7 { &[T::zero()] } else { &[-d, d] };
        for &off in pts {
            let xx = c + off;
            let node = Node {
                x: xx,
                a,
                b,
                from_a: hw + off,
                to_b: hw - off,
            };
            *evals += 1;
            let v = check_finite(f(node), xx)?;
            kron += T::lit(wk) * v;
            if i % 2 == 1 {
                gauss += T::lit(GK_WG[i / 2]) * v;
            }
        }
    }
    Ok((kron * hw, (kron - gauss).abs() * hw))
}

/// Adaptive bisection with 15-point Gauss-Kronrod panels.
pub fn adaptive_panel<T: Real>(
    mut f: impl FnMut(Node<T>) -> T,
    a: T,
    b: T,
    spec: &QuadratureSpec<T>,
) -> Result<IntegralResult<T>> {
    spec.validate()?;
    if !(a < b) {
        return Err(Error::InvalidParams("integration bounds must satisfy a < b".into()));
    }
    let mut evaluations = 0;
    let (whole, whole_err) = gk15(&mut f, a, b, &mut evaluations)?;
    let tol = spec.tol(whole);
    let mut stack = vec![(a, b, whole, whole_err, 0usize, tol)];
    let mut value = T::zero();
    let mut err = T::zero();
    let mut converged = true;
    while let Some((lo, hi, v, e, depth, tol)) = stack.pop() {
        if e <= tol {
            value += v;
            err += e;
            continue;
        }
        if depth >= spec.max_levels {
            converged = false;
            value += v;
            err += e;
            continue;
        }
        let mid = (lo + hi) * T::half();
        let (v1, e1) = gk15(&mut f, lo, mid, &mut evaluations)?;
        let (v2, e2) = gk15(&mut f, mid, hi, &mut evaluations)?;
        let sub = tol * T::half();
        stack.push((mid, hi, v2, e2, depth + 1, sub));
        stack.push((lo, mid, v1, e1, depth + 1, sub));
    }
    Ok(IntegralResult {
        value,
        err_estimate: err,
        evaluations,
        converged,
        partials: vec![whole, value],
    })
}

/// Trapezoid rule over one period `[0, 2π)` with node doubling.
pub fn integrate_periodic<T: Real>(
    f: impl FnMut(T) -> T,
    spec: &QuadratureSpec<T>,
) -> Result<IntegralResult<T>> {
    let mut f = f;
    periodic_core(
        |theta| {
            let v = f(theta);
            check_finite(v, theta)
        },
        |v: T| v.abs(),
        spec,
    )
}

fn periodic_core<T: Real, V>(
    mut f: impl FnMut(T) -> Result<V>,
    norm: impl Fn(V) -> T,
    spec: &QuadratureSpec<T>,
) -> Result<IntegralResult<T, V>>
where
    V: Copy + num_traits::Zero + std::ops::Mul<T, Output = V> + std::ops::Sub<Output = V>,
{
    spec.validate()?;
    let two_pi = T::TAU();
    let mut n = 16usize;
    let mut raw = V::zero();
    for k in 0..n {
        raw = raw + f(two_pi * T::lit(k as f64) / T::lit(n as f64))?;
    }
    let mut evaluations = n;
    let mut estimate = raw * (two_pi / T::lit(n as f64));
    let mut partials = vec![estimate];
    let mut err = T::infinity();
    let mut converged = false;
    for _ in 0..spec.max_levels {
        let m = 2 * n;
        let mut add = V::zero();
        for k in (1..m).step_by(2) {
            add = add + f(two_pi * T::lit(k as f64) / T::lit(m as f64))?;
        }
        evaluations += n;
        raw = raw + add;
        n = m;
        let next = raw * (two_pi / T::lit(n as f64));
        err = norm(next - estimate) * T::lit(4.0);
        estimate = next;
        partials.push(estimate);
        if err <= spec.tol(norm(estimate)) {
            converged = true;
            break;
        }
    }
    Ok(IntegralResult {
        value: estimate,
        err_estimate: err,
        evaluations,
        converged,
        partials,
    })
}

/// Trapezoid rule for a complex periodic integrand.
pub fn integrate_complex_trapezoid<T: Real>(
    mut f: impl FnMut(T) -> Complex<T>,
    spec: &QuadratureSpec<T>,
) -> Result<IntegralResult<T, Complex<T>>> {
    periodic_core(
        |theta| {
            let v = f(theta);
            if v.re.is_finite() && v.im.is_finite() {
                Ok(v)
            } else {
                Err(Error::NonFiniteIntegrand(theta.f64()))
            }
        },
        |v: Complex<T>| v.norm(),
        spec,
    )
}

/// Integrates `R(θ)^(−1/2)` over `[0, 2π)` with the principal square root.
///
/// After convergence the principal argument of `R` is checked at every pair
/// of adjacent nodes of the finest level; a jump of `π/2` or more means the
/// path crossed the branch cut (or is under-resolved) and is reported as
/// [`Error::BranchAmbiguity`].
pub fn integrate_complex_periodic<T: Real>(
    mut radicand: impl FnMut(T) -> Complex<T>,
    spec: &QuadratureSpec<T>,
) -> Result<IntegralResult<T, Complex<T>>> {
    let res = integrate_complex_trapezoid(
        |theta| {
            let r = radicand(theta);
            r.sqrt().inv()
        },
        spec,
    )?;
    let n = 16usize << (res.partials.len() - 1);
    let two_pi = T::TAU();
    let at = |k: usize| two_pi * T::lit(k as f64) / T::lit(n as f64);
    let first = radicand(at(0)).arg();
    let mut prev = first;
    for k in 1..=n {
        let cur = if k == n { first } else { radicand(at(k)).arg() };
        if (cur - prev).abs() >= T::FRAC_PI_2() {
            return Err(Error::BranchAmbiguity(at(k).f64()));
        }
        prev = cur;
    }
    Ok(res)
}

/// Nested tanh-sinh over a rectangle; the integrand receives nodes in both
/// variables so endpoint behavior can be resolved in each.
pub fn integrate_double<T: Real>(
    mut f: impl FnMut(Node<T>, Node<T>) -> T,
    x_range: (T, T),
    y_range: (T, T),
    spec: &QuadratureSpec<T>,
) -> Result<IntegralResult<T>> {
    let mut inner_err = T::zero();
    let mut inner_evals = 0usize;
    let mut inner_ok = true;
    let mut failure = None;
    let outer = tanh_sinh(
        |nx| {
            let r = tanh_sinh(|ny| f(nx, ny), y_range.0, y_range.1, spec);
            match r {
                Ok(r) => {
                    inner_err = inner_err.max(r.err_estimate);
                    inner_evals += r.evaluations;
                    inner_ok &= r.converged;
                    r.value
                }
                Err(e) => {
                    failure.get_or_insert(e);
                    T::zero()
                }
            }
        },
        x_range.0,
        x_range.1,
        spec,
    )?;
    if let Some(e) = failure {
        return Err(e);
    }
    let width = x_range.1 - x_range.0;
    Ok(IntegralResult {
        value: outer.value,
        err_estimate: outer.err_estimate + inner_err * width,
        evaluations: inner_evals,
        converged: outer.converged && inner_ok,
        partials: outer.partials,
    })
}
