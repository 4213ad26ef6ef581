//! Direct integration of the planar two-center Hamiltonian, used as ground
//! truth for the period formulas, plus the Kepler-side element relations.
//!
//! The first center sits at the origin, the second at `(0, 2v₀)`. Positions
//! are `(ρ, z)` with `z` along the symmetry axis.

use std::cell::Cell;

use ode_solvers::dop_shared::{FloatNumber, IntegrationError};
use ode_solvers::{Dop853, OutputType, SVector, System};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::param_domain::{f_sing, singular_tolerance, turning_points, SystemParams};
use crate::real::Real;

/// Scalars usable by the integrator (`f32`, `f64`).
pub trait OdeReal: Real + FloatNumber {}

impl<T: Real + FloatNumber> OdeReal for T {}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PhaseState<T> {
    pub y: [T; 2],
    pub x: [T; 2],
}

impl<T: Real> PhaseState<T> {
    pub fn new(y: [T; 2], x: [T; 2]) -> Self {
        Self { y, x }
    }

    /// Distances `(r₁, r₂)` to the two centers.
    pub fn distances(&self, v0: T) -> (T, T) {
        let r1 = self.x[0].hypot(self.x[1]);
        let r2 = self.x[0].hypot(self.x[1] - v0 - v0);
        (r1, r2)
    }
}

fn check_distances<T: Real>(r1: T, r2: T) -> Result<()> {
    if r1 > T::zero() && r2 > T::zero() && r1.is_finite() && r2.is_finite() {
        Ok(())
    } else {
        Err(Error::CollisionSingularity)
    }
}

/// `‖y‖²/2 − m₊/‖x‖ − m₋/‖x − 2v₀‖`.
pub fn hamiltonian<T: Real>(s: &PhaseState<T>, p: &SystemParams<T>) -> Result<T> {
    hamiltonian_with(s, s.x[1] - p.v0 - p.v0, p)
}

fn hamiltonian_with<T: Real>(s: &PhaseState<T>, z2: T, p: &SystemParams<T>) -> Result<T> {
    let r1 = s.x[0].hypot(s.x[1]);
    let r2 = s.x[0].hypot(z2);
    check_distances(r1, r2)?;
    let [p1, p2] = s.y;
    Ok((p1 * p1 + p2 * p2) * T::half() - p.m_plus / r1 - p.m_minus / r2)
}

/// `‖G‖² − 2v₀·(y × G − m₊x/‖x‖ + m₋(x − 2v₀)/‖x − 2v₀‖)` with `G = x × y`.
pub fn euler_integral<T: Real>(s: &PhaseState<T>, p: &SystemParams<T>) -> Result<T> {
    euler_integral_with(s, s.x[1] - p.v0 - p.v0, p)
}

fn euler_integral_with<T: Real>(s: &PhaseState<T>, z2: T, p: &SystemParams<T>) -> Result<T> {
    let [x1, x2] = s.x;
    let r1 = x1.hypot(x2);
    let r2 = x1.hypot(z2);
    check_distances(r1, r2)?;
    let [p1, p2] = s.y;
    let g = x1 * p2 - x2 * p1;
    let axial = -p1 * g - p.m_plus * x2 / r1 + p.m_minus * z2 / r2;
    Ok(g * g - (p.v0 + p.v0) * axial)
}

/// Co-focal coordinates and their conjugate momenta.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CofocalState<T> {
    pub alpha: T,
    pub beta: T,
    pub a_mom: T,
    pub b_mom: T,
}

/// `(α, β)` from the axis coordinate and the distance to the axis, by
/// inverting `z = v₀(1 + αβ)`, `ρ² = v₀²(α² − 1)(1 − β²)`.
pub fn alpha_beta_of<T: Real>(x: [T; 2], v0: T) -> (T, T) {
    let prod = x[1] / v0 - T::one();
    let rho = x[0] / v0;
    let sum = rho * rho + prod * prod + T::one();
    let disc = ((sum - T::two() * prod) * (sum + T::two() * prod)).max(T::zero());
    let a2 = (sum + disc.sqrt()) * T::half();
    let alpha = a2.sqrt().max(T::one());
    let beta = (prod / alpha).max(-T::one()).min(T::one());
    (alpha, beta)
}

/// Co-focal form of a Cartesian state. Momenta need `ρ ≠ 0`.
pub fn to_cofocal<T: Real>(s: &PhaseState<T>, p: &SystemParams<T>) -> Result<CofocalState<T>> {
    let v0 = p.v0;
    let (alpha, beta) = alpha_beta_of(s.x, v0);
    let rho = s.x[0];
    if rho == T::zero() {
        return Err(Error::InvalidParams("co-focal momenta are singular on the axis".into()));
    }
    let [p1, p2] = s.y;
    let a_mom = v0 * beta * p2 + v0 * v0 * alpha * (T::one() - beta * beta) * p1 / rho;
    let b_mom = v0 * alpha * p2 - v0 * v0 * beta * (alpha * alpha - T::one()) * p1 / rho;
    Ok(CofocalState {
        alpha,
        beta,
        a_mom,
        b_mom,
    })
}

/// Cartesian state from co-focal data on the half-plane `sign(ρ) = side`.
pub fn from_cofocal<T: Real>(c: &CofocalState<T>, p: &SystemParams<T>, side: T) -> PhaseState<T> {
    let v0 = p.v0;
    let (a, b) = (c.alpha, c.beta);
    let ea = a * a - T::one();
    let eb = T::one() - b * b;
    let rho = side.signum() * v0 * (ea * eb).sqrt();
    let z = v0 * (T::one() + a * b);
    let d = v0 * v0 * (a * a - b * b);
    let ad = c.a_mom * ea / d;
    let bd = c.b_mom * eb / d;
    let zd = v0 * (ad * b + a * bd);
    let rhod = v0 * v0 * (a * ad * eb - b * bd * ea) / rho;
    PhaseState::new([rhod, zd], [rho, z])
}

/// Energy in co-focal variables.
pub fn hamiltonian_cofocal<T: Real>(c: &CofocalState<T>, p: &SystemParams<T>) -> T {
    let (a, b, v0) = (c.alpha, c.beta, p.v0);
    let kin = (c.a_mom * c.a_mom * (a * a - T::one()) + c.b_mom * c.b_mom * (T::one() - b * b)) * T::half();
    (kin - p.mass_plus() * v0 * a + p.mass_minus() * v0 * b) / (v0 * v0 * (a * a - b * b))
}

/// Euler integral in co-focal variables.
pub fn euler_integral_cofocal<T: Real>(c: &CofocalState<T>, p: &SystemParams<T>) -> T {
    let (a, b, v0) = (c.alpha, c.beta, p.v0);
    let two = T::two();
    (c.b_mom * c.b_mom - c.a_mom * c.a_mom) * (a * a - T::one()) * (T::one() - b * b) / (a * a - b * b)
        + two * p.m_plus * v0 * (a * b + T::one()) / (a + b)
        - two * p.m_minus * v0 * (a * b - T::one()) / (a - b)
}

/// A state on the level set `(J₀, F₀)` at the given co-focal position.
pub fn state_on_level<T: Real>(p: &SystemParams<T>, alpha: T, beta: T, side: T) -> Result<PhaseState<T>> {
    let v0 = p.v0;
    let ea = alpha * alpha - T::one();
    let eb = T::one() - beta * beta;
    if !(ea > T::zero() && eb > T::zero()) {
        return Err(Error::InvalidParams("need alpha > 1 and |beta| < 1".into()));
    }
    let two = T::two();
    let a2 = (-p.f0 + two * p.mass_plus() * v0 * alpha + two * p.j0 * v0 * v0 * ea) / ea;
    let b2 = (p.f0 - two * p.mass_minus() * v0 * beta + two * p.j0 * v0 * v0 * eb) / eb;
    if !(a2 >= T::zero() && b2 >= T::zero()) {
        return Err(Error::EmptyHillSet);
    }
    let c = CofocalState {
        alpha,
        beta,
        a_mom: a2.sqrt(),
        b_mom: b2.sqrt(),
    };
    Ok(from_cofocal(&c, p, side))
}

/// Like [`state_on_level`] with the signs of both momenta chosen.
pub fn state_on_level_signed<T: Real>(
    p: &SystemParams<T>,
    alpha: T,
    beta: T,
    a_sign: T,
    b_sign: T,
) -> Result<PhaseState<T>> {
    let s = state_on_level(p, alpha, beta, T::one())?;
    let mut c = to_cofocal(&s, p)?;
    c.alpha = alpha;
    c.beta = beta;
    c.a_mom = c.a_mom.abs() * a_sign.signum();
    c.b_mom = c.b_mom.abs() * b_sign.signum();
    Ok(from_cofocal(&c, p, T::one()))
}

/// A generic starting state: midpoints of the `α` range and of the chosen
/// `β` component.
pub fn initial_state<T: Real>(p: &SystemParams<T>, beta_component: usize) -> Result<PhaseState<T>> {
    let tp = turning_points(p.mass_plus(), p.mass_minus(), p.j0, p.v0, p.f0)?;
    let (alo, ahi) = tp.alpha_range;
    let &(blo, bhi) = tp
        .beta_components
        .get(beta_component)
        .ok_or_else(|| Error::InvalidParams("no such beta component".into()))?;
    state_on_level(p, (alo + ahi) * T::half(), (blo + bhi) * T::half(), T::one())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TrajectorySample<T> {
    pub t: T,
    pub tau: T,
    pub state: PhaseState<T>,
    /// `z − 2v₀`, integrated alongside `z` so that it keeps full precision
    /// near the second center.
    pub z2: T,
    pub alpha: T,
    pub beta: T,
    pub j_val: T,
    pub f_val: T,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrbitControls<T> {
    pub rtol: T,
    pub atol: T,
    /// Abort when a center is approached closer than this times `v₀`.
    pub collision_distance: T,
    pub max_steps: u32,
    /// Upper bound on the `τ` span of any run.
    pub max_tau: T,
}

impl<T: Real> Default for OrbitControls<T> {
    fn default() -> Self {
        Self {
            rtol: T::lit(1e-13).max(T::epsilon() * T::lit(16.0)),
            atol: T::lit(1e-15).max(T::epsilon()),
            collision_distance: T::lit(1e-6),
            max_steps: 2_000_000,
            max_tau: T::lit(1e4),
        }
    }
}

type Vec6<T> = SVector<T, 6>;

/// Which turning points [`event_times`] reports.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Event {
    AlphaMax,
    BetaMax,
    /// Maxima of the distance to the first center.
    R1Max,
}

fn event_value<T: Real>(y: &Vec6<T>, event: Event) -> T {
    let r1 = y[0].hypot(y[1]);
    let dz = y[5];
    let r2 = y[0].hypot(dz);
    let d1 = (y[2] * y[0] + y[3] * y[1]) / r1;
    let d2 = (y[2] * y[0] + y[3] * dz) / r2;
    match event {
        Event::AlphaMax => d1 + d2,
        Event::BetaMax => d1 - d2,
        Event::R1Max => d1,
    }
}

enum Stop<T> {
    Tau,
    Time(T),
    Maxima(usize),
}

struct Field<'a, T> {
    m_plus: T,
    m_minus: T,
    min_dist: &'a Cell<T>,
    stop: &'a Stop<T>,
    counts: &'a Cell<(usize, usize)>,
    last: &'a Cell<(T, T)>,
}

impl<T: OdeReal> System<T, Vec6<T>> for Field<'_, T> {
    fn system(&self, _tau: T, y: &Vec6<T>, dy: &mut Vec6<T>) {
        let (x1, x2, dz) = (y[0], y[1], y[5]);
        let r1 = x1.hypot(x2);
        let r2 = x1.hypot(dz);
        let w = r1 * r2;
        let k1 = self.m_plus / (r1 * r1 * r1);
        let k2 = self.m_minus / (r2 * r2 * r2);
        dy[0] = w * y[2];
        dy[1] = w * y[3];
        dy[2] = -w * (k1 * x1 + k2 * x1);
        dy[3] = -w * (k1 * x2 + k2 * dz);
        dy[4] = w;
        dy[5] = dy[1];
    }

    fn solout(&mut self, _tau: T, y: &Vec6<T>, _dy: &Vec6<T>) -> bool {
        let r1 = y[0].hypot(y[1]);
        let r2 = y[0].hypot(y[5]);
        self.min_dist.set(self.min_dist.get().min(r1.min(r2)));
        if self.min_dist.get() < T::zero() || !(r1 > T::zero()) {
            return true;
        }
        match self.stop {
            Stop::Tau => false,
            Stop::Time(t_end) => y[4] >= *t_end,
            Stop::Maxima(n) => {
                let ga = event_value(y, Event::AlphaMax);
                let gb = event_value(y, Event::BetaMax);
                let (pa, pb) = self.last.get();
                let (mut ca, mut cb) = self.counts.get();
                if pa > T::zero() && ga <= T::zero() {
                    ca += 1;
                }
                if pb > T::zero() && gb <= T::zero() {
                    cb += 1;
                }
                self.last.set((ga, gb));
                self.counts.set((ca, cb));
                ca >= *n && cb >= *n
            }
        }
    }
}

fn step_error(e: IntegrationError) -> Error {
    match e {
        IntegrationError::MaxNumStepReached { x, .. }
        | IntegrationError::StepSizeUnderflow { x }
        | IntegrationError::StiffnessDetected { x } => Error::StepFailure(x),
    }
}

fn pack<T: Real + FloatNumber>(s: &PhaseState<T>, z2: T, t: T) -> Vec6<T> {
    Vec6::from([s.x[0], s.x[1], s.y[0], s.y[1], t, z2])
}

fn pack_start<T: Real + FloatNumber>(s: &PhaseState<T>, p: &SystemParams<T>) -> Vec6<T> {
    pack(s, s.x[1] - p.v0 - p.v0, T::zero())
}

fn unpack<T: Real + FloatNumber>(y: &Vec6<T>) -> PhaseState<T> {
    PhaseState::new([y[2], y[3]], [y[0], y[1]])
}

struct RunOutput<T: FloatNumber> {
    taus: Vec<T>,
    ys: Vec<Vec6<T>>,
    min_dist: T,
}

fn run<T: OdeReal>(
    p: &SystemParams<T>,
    y0: Vec6<T>,
    tau0: T,
    tau_end: T,
    stop: Stop<T>,
    controls: &OrbitControls<T>,
) -> Result<RunOutput<T>>
where
    f64: From<T>,
{
    let min_dist = Cell::new(T::infinity());
    let counts = Cell::new((0, 0));
    let last = Cell::new((
        event_value(&y0, Event::AlphaMax),
        event_value(&y0, Event::BetaMax),
    ));
    let field = Field {
        m_plus: p.m_plus,
        m_minus: p.m_minus,
        min_dist: &min_dist,
        stop: &stop,
        counts: &counts,
        last: &last,
    };
    let span = tau_end - tau0;
    let mut solver = Dop853::from_param(
        field,
        tau0,
        tau_end,
        span,
        y0,
        controls.rtol,
        controls.atol,
        T::lit(0.9),
        T::zero(),
        T::lit(0.333),
        T::lit(6.0),
        span,
        T::zero(),
        controls.max_steps,
        u32::MAX,
        OutputType::Sparse,
    );
    solver.integrate().map_err(step_error)?;
    let (taus, ys) = solver.results().get();
    let (mut out_t, mut out_y) = (vec![tau0], vec![y0]);
    let skip = usize::from(taus.first() == Some(&tau0));
    out_t.extend_from_slice(&taus[skip..]);
    out_y.extend_from_slice(&ys[skip..]);
    let r0 = y0[0].hypot(y0[1]).min(y0[0].hypot(y0[5]));
    Ok(RunOutput {
        taus: out_t,
        ys: out_y,
        min_dist: min_dist.get().min(r0),
    })
}

/// State after advancing `y` by `ds` in `τ`.
fn advance<T: OdeReal>(p: &SystemParams<T>, y: &Vec6<T>, tau: T, ds: T, controls: &OrbitControls<T>) -> Result<Vec6<T>>
where
    f64: From<T>,
{
    if ds == T::zero() {
        return Ok(*y);
    }
    let out = run(p, *y, tau, tau + ds, Stop::Tau, controls)?;
    Ok(*out.ys.last().expect("run output includes the start"))
}

/// Root of `g(s)` on `[0, h]` with `g(0)` and `g(h)` of opposite sign
/// (Illinois variant of regula falsi).
fn bracket_root<T: Real>(mut g: impl FnMut(T) -> Result<T>, h: T, g0: T, gh: T) -> Result<T> {
    let (mut a, mut b) = (T::zero(), h);
    let (mut fa, mut fb) = (g0, gh);
    let tol = h * T::epsilon() * T::lit(4.0);
    let mut side = 0i32;
    for _ in 0..100 {
        let c = (a * fb - b * fa) / (fb - fa);
        let fc = g(c)?;
        if fc == T::zero() || (b - a).abs() <= tol {
            return Ok(c);
        }
        if (fc > T::zero()) == (fb > T::zero()) {
            b = c;
            fb = fc;
            if side == -1 {
                fa = fa * T::half();
            }
            side = -1;
        } else {
            a = c;
            fa = fc;
            if side == 1 {
                fb = fb * T::half();
            }
            side = 1;
        }
        if (b - a).abs() <= tol {
            return Ok((a + b) * T::half());
        }
    }
    Ok((a + b) * T::half())
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory<T> {
    pub params: SystemParams<T>,
    pub controls: OrbitControls<T>,
    pub samples: Vec<TrajectorySample<T>>,
    /// Closest approach to either center over the run.
    pub min_distance: T,
}

fn sample_of<T: OdeReal>(p: &SystemParams<T>, tau: T, y: &Vec6<T>) -> Result<TrajectorySample<T>> {
    let state = unpack(y);
    let (alpha, beta) = alpha_beta_of(state.x, p.v0);
    Ok(TrajectorySample {
        t: y[4],
        tau,
        state,
        z2: y[5],
        alpha,
        beta,
        j_val: hamiltonian_with(&state, y[5], p)?,
        f_val: euler_integral_with(&state, y[5], p)?,
    })
}

fn build<T: OdeReal>(p: &SystemParams<T>, out: RunOutput<T>, controls: &OrbitControls<T>) -> Result<Trajectory<T>> {
    if out.min_dist < controls.collision_distance * p.v0 {
        return Err(Error::CollisionApproach(out.min_dist.f64()));
    }
    let samples = out
        .taus
        .iter()
        .zip(&out.ys)
        .map(|(&tau, y)| sample_of(p, tau, y))
        .collect::<Result<Vec<_>>>()?;
    Ok(Trajectory {
        params: *p,
        controls: *controls,
        samples,
        min_distance: out.min_dist,
    })
}

fn check_start<T: Real>(s0: &PhaseState<T>, p: &SystemParams<T>) -> Result<()> {
    p.validate()?;
    let j = hamiltonian(s0, p)?;
    if !(j < T::zero()) {
        return Err(Error::NonNegativeEnergy(j.f64()));
    }
    Ok(())
}

/// Integrates up to physical time `t_end`, landing on it exactly.
pub fn integrate_orbit<T: OdeReal>(
    s0: &PhaseState<T>,
    p: &SystemParams<T>,
    t_end: T,
    controls: &OrbitControls<T>,
) -> Result<Trajectory<T>>
where
    f64: From<T>,
{
    check_start(s0, p)?;
    let y0 = pack_start(s0, p);
    let mut out = run(p, y0, T::zero(), controls.max_tau, Stop::Time(t_end), controls)?;
    let n = out.taus.len();
    if n >= 2 && out.ys[n - 1][4] > t_end {
        let (tau_a, ya) = (out.taus[n - 2], out.ys[n - 2]);
        let h = out.taus[n - 1] - tau_a;
        let g = |s: T| Ok(advance(p, &ya, tau_a, s, controls)?[4] - t_end);
        let s = bracket_root(g, h, ya[4] - t_end, out.ys[n - 1][4] - t_end)?;
        out.taus[n - 1] = tau_a + s;
        out.ys[n - 1] = advance(p, &ya, tau_a, s, controls)?;
    } else if out.ys[n - 1][4] < t_end {
        return Err(Error::StepFailure(out.taus[n - 1].f64()));
    }
    build(p, out, controls)
}

/// Integrates over `τ ∈ [0, tau_end]`.
pub fn integrate_orbit_tau<T: OdeReal>(
    s0: &PhaseState<T>,
    p: &SystemParams<T>,
    tau_end: T,
    controls: &OrbitControls<T>,
) -> Result<Trajectory<T>>
where
    f64: From<T>,
{
    check_start(s0, p)?;
    let out = run(p, pack_start(s0, p), T::zero(), tau_end, Stop::Tau, controls)?;
    build(p, out, controls)
}

/// Integrates until both `α` and `β` have passed `n_maxima` maxima.
pub fn integrate_until_maxima<T: OdeReal>(
    s0: &PhaseState<T>,
    p: &SystemParams<T>,
    n_maxima: usize,
    controls: &OrbitControls<T>,
) -> Result<Trajectory<T>>
where
    f64: From<T>,
{
    check_start(s0, p)?;
    let out = run(
        p,
        pack_start(s0, p),
        T::zero(),
        controls.max_tau,
        Stop::Maxima(n_maxima),
        controls,
    )?;
    build(p, out, controls)
}

impl<T: OdeReal> Trajectory<T>
where
    f64: From<T>,
{
    /// `(τ, t)` of each event, located by re-integrating from the step start.
    pub fn event_times(&self, event: Event) -> Result<Vec<(T, T)>> {
        let p = &self.params;
        let mut out = Vec::new();
        for w in self.samples.windows(2) {
            let ya = pack(&w[0].state, w[0].z2, w[0].t);
            let yb = pack(&w[1].state, w[1].z2, w[1].t);
            let ga = event_value(&ya, event);
            let gb = event_value(&yb, event);
            if !(ga > T::zero() && gb <= T::zero()) {
                continue;
            }
            let h = w[1].tau - w[0].tau;
            let g = |s: T| Ok(event_value(&advance(p, &ya, w[0].tau, s, &self.controls)?, event));
            let s = bracket_root(g, h, ga, gb)?;
            let y = advance(p, &ya, w[0].tau, s, &self.controls)?;
            out.push((w[0].tau + s, y[4]));
        }
        Ok(out)
    }

    /// Largest relative drift of `J` and of `F` over the run. `F` is measured
    /// against `|F₀| + 2(m₊ + m₋)v₀`.
    pub fn drift(&self) -> (T, T) {
        let s0 = &self.samples[0];
        let p = &self.params;
        let f_scale = s0.f_val.abs() + T::two() * (p.m_plus + p.m_minus) * p.v0;
        let mut dj = T::zero();
        let mut df = T::zero();
        for s in &self.samples {
            dj = dj.max(((s.j_val - s0.j_val) / s0.j_val).abs());
            df = df.max(((s.f_val - s0.f_val) / f_scale).abs());
        }
        (dj, df)
    }

    /// Largest violation of `‖x‖ = v₀(α+β)`, `‖x−2v₀‖ = v₀(α−β)` and
    /// `v₀²(α²−β²) = ‖x‖·‖x−2v₀‖`, relative to the distances involved.
    pub fn cofocal_residual(&self) -> T {
        let v0 = self.params.v0;
        let mut worst = T::zero();
        for s in &self.samples {
            let (r1, r2) = s.state.distances(v0);
            let scale = T::one().max(r1).max(r2);
            let e1 = (r1 - v0 * (s.alpha + s.beta)).abs() / scale;
            let e2 = (r2 - v0 * (s.alpha - s.beta)).abs() / scale;
            let e3 = (v0 * v0 * (s.alpha * s.alpha - s.beta * s.beta) - r1 * r2).abs() / (scale * scale);
            worst = worst.max(e1).max(e2).max(e3);
        }
        worst
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TauPeriods<T> {
    pub t_plus: T,
    pub t_minus: T,
    /// Largest deviation of a single period from the mean.
    pub t_plus_spread: T,
    pub t_minus_spread: T,
    pub n_plus: usize,
    pub n_minus: usize,
}

fn mean_period<T: Real>(times: &[T]) -> (T, T, usize) {
    let diffs: Vec<T> = times.windows(2).map(|w| w[1] - w[0]).collect();
    let n = diffs.len();
    let mean = diffs.iter().fold(T::zero(), |a, &d| a + d) / T::lit(n.max(1) as f64);
    let spread = diffs.iter().fold(T::zero(), |a, &d| a.max((d - mean).abs()));
    (mean, spread, n)
}

/// Empirical `τ`-periods of `α` and `β` from successive maxima.
pub fn measure_tau_periods<T: OdeReal>(traj: &Trajectory<T>) -> Result<TauPeriods<T>>
where
    f64: From<T>,
{
    let a: Vec<T> = traj.event_times(Event::AlphaMax)?.into_iter().map(|e| e.0).collect();
    let b: Vec<T> = traj.event_times(Event::BetaMax)?.into_iter().map(|e| e.0).collect();
    if a.len() < 4 || b.len() < 4 {
        return Err(Error::InsufficientOscillations {
            alpha: a.len().saturating_sub(1),
            beta: b.len().saturating_sub(1),
        });
    }
    let (t_plus, t_plus_spread, n_plus) = mean_period(&a);
    let (t_minus, t_minus_spread, n_minus) = mean_period(&b);
    Ok(TauPeriods {
        t_plus,
        t_minus,
        t_plus_spread,
        t_minus_spread,
        n_plus,
        n_minus,
    })
}

const LAUNCH_PHASES: usize = 36;

/// Integrates `n_periods` oscillations of each coordinate from several
/// relative launch phases on `(J₀, F₀)`, keeps the run with the widest clearance
/// from both centers and measures its periods.
pub fn oracle_periods<T: OdeReal>(
    p: &SystemParams<T>,
    n_periods: usize,
    controls: &OrbitControls<T>,
) -> Result<(TauPeriods<T>, Trajectory<T>)>
where
    f64: From<T>,
{
    let tp = turning_points(p.mass_plus(), p.mass_minus(), p.j0, p.v0, p.f0)?;
    let (alo, ahi) = tp.alpha_range;
    let &(blo, bhi) = tp.beta_components.first().ok_or(Error::EmptyHillSet)?;
    let alpha = (alo + ahi) * T::half();
    let (bc, bh) = ((blo + bhi) * T::half(), (bhi - blo) * T::half());
    let starts = (0..LAUNCH_PHASES)
        .map(|k| {
            let th = T::two() * T::PI() * (T::lit(k as f64) + T::half()) / T::lit(LAUNCH_PHASES as f64);
            let (s, c) = th.sin_cos();
            state_on_level_signed(p, alpha, bc + bh * c, T::one(), s.signum())
        })
        .collect::<Result<Vec<_>>>()?;
    let runs: Vec<Result<Trajectory<T>>> = starts
        .par_iter()
        .map(|s0| integrate_until_maxima(s0, p, n_periods + 2, controls))
        .collect();
    let mut best: Option<Trajectory<T>> = None;
    let mut first_err = None;
    for r in runs {
        match r {
            Ok(t) => {
                if best.as_ref().is_none_or(|b| t.min_distance > b.min_distance) {
                    best = Some(t);
                }
            }
            Err(e) => {
                first_err.get_or_insert(e);
            }
        }
    }
    let traj = best.ok_or_else(|| first_err.expect("at least one start"))?;
    Ok((measure_tau_periods(&traj)?, traj))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KeplerElements<T> {
    pub a: T,
    pub e: T,
    /// Angle of the perihelion, counterclockwise from the `ρ` semi-axis
    /// perpendicular to the symmetry axis.
    pub omega: T,
    pub n: T,
}

impl<T: Real> KeplerElements<T> {
    /// Elements of an orbit of energy `j0 < 0` around mass `mass`.
    pub fn new(mass: T, j0: T, e: T, omega: T) -> Result<Self> {
        if !(j0 < T::zero()) {
            return Err(Error::HyperbolicState);
        }
        if !(e >= T::zero() && e < T::one()) {
            return Err(Error::InvalidParams("eccentricity must lie in [0, 1)".into()));
        }
        let ja = -j0;
        Ok(Self {
            a: mass / (T::two() * ja),
            e,
            omega,
            n: T::two() / mass * (T::two() * ja * ja * ja).sqrt(),
        })
    }

    pub fn period(&self) -> T {
        T::two() * T::PI() / self.n
    }
}

fn require_kepler<T: Real>(p: &SystemParams<T>) -> Result<()> {
    if p.m_minus != T::zero() {
        return Err(Error::InvalidParams("Kepler relations need m_minus = 0".into()));
    }
    Ok(())
}

/// Prograde state at true anomaly `nu`.
pub fn state_from_elements<T: Real>(el: &KeplerElements<T>, p: &SystemParams<T>, nu: T) -> Result<PhaseState<T>> {
    require_kepler(p)?;
    if !(el.e >= T::zero() && el.e < T::one() && el.a > T::zero()) {
        return Err(Error::InvalidParams("elements must describe an ellipse".into()));
    }
    let m = p.m_plus;
    let slr = el.a * (T::one() - el.e * el.e);
    let r = slr / (T::one() + el.e * nu.cos());
    let (sp, cp) = (el.omega + nu).sin_cos();
    let (so, co) = el.omega.sin_cos();
    let k = (m / slr).sqrt();
    Ok(PhaseState::new(
        [-k * (sp + el.e * so), k * (cp + el.e * co)],
        [r * cp, r * sp],
    ))
}

/// Elements and true anomaly of a bound state.
pub fn elements_from_state<T: Real>(s: &PhaseState<T>, p: &SystemParams<T>) -> Result<(KeplerElements<T>, T)> {
    require_kepler(p)?;
    let j = hamiltonian(s, p)?;
    if !(j < T::zero()) {
        return Err(Error::HyperbolicState);
    }
    let m = p.m_plus;
    let [x1, x2] = s.x;
    let [p1, p2] = s.y;
    let r = x1.hypot(x2);
    let g = x1 * p2 - x2 * p1;
    let ex = p2 * g / m - x1 / r;
    let ey = -p1 * g / m - x2 / r;
    let e = ex.hypot(ey).min(T::one() - T::epsilon());
    let omega = if e > T::zero() { ey.atan2(ex) } else { T::zero() };
    let phi = x2.atan2(x1);
    let mut nu = phi - omega;
    let tau = T::two() * T::PI();
    while nu > T::PI() {
        nu -= tau;
    }
    while nu <= -T::PI() {
        nu += tau;
    }
    Ok((KeplerElements::new(m, j, e, omega)?, nu))
}

/// `F̂₀ = M²((1 − e²) − (δ̂₀/M) e sin ω)`.
pub fn f0_hat_from_elements<T: Real>(mass: T, delta0_hat: T, e: T, omega: T) -> T {
    mass * mass * ((T::one() - e * e) - delta0_hat / mass * e * omega.sin())
}

/// `M(a(1 − e²) − 2v₀ e sin ω)`.
pub fn euler_integral_from_elements<T: Real>(el: &KeplerElements<T>, mass: T, v0: T) -> T {
    mass * (el.a * (T::one() - el.e * el.e) - T::two() * v0 * el.e * el.omega.sin())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum CollisionLabel {
    MildlyCollisionFree,
    HitsSecondCenter,
}

pub fn collision_classify<T: Real>(p: &SystemParams<T>) -> Result<CollisionLabel> {
    require_kepler(p)?;
    if !(p.j0 < T::zero()) {
        return Err(Error::NonNegativeEnergy(p.j0.f64()));
    }
    let m = p.m_plus;
    let (d, f) = (p.delta0_hat(), p.f0_hat());
    let line = m * d;
    if d < m + m && (f - line).abs() <= singular_tolerance(f_sing(m, d)) {
        Ok(CollisionLabel::HitsSecondCenter)
    } else {
        Ok(CollisionLabel::MildlyCollisionFree)
    }
}
