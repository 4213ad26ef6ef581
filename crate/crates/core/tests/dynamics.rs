use std::f64::consts::PI;

use proptest::prelude::*;
use twocenter::dynamics_oracle::*;
use twocenter::param_domain::{normalize, MassChoice, SystemParams};
use twocenter::period_engine::{jacobi_t_minus, t_of};
use twocenter::Error;

fn params(mp: f64, mm: f64, d: f64, f: f64) -> SystemParams<f64> {
    SystemParams::from_normalized(mp, mm, 1.0, d, f).unwrap()
}

fn rel(a: f64, b: f64) -> f64 {
    ((a - b) / b).abs()
}

const GRID: &[(f64, f64, f64, f64)] = &[
    (1.0, 0.5, 1.0, 0.6),
    (1.0, 0.5, 1.0, 1.3),
    (1.0, 0.5, 3.0, 4.0),
    (1.0, 0.3, 0.5, 0.2),
    (1.0, 0.3, 2.0, -0.5),
    (1.0, 0.9, 4.0, 5.5),
    (1.0, 0.5, 0.25, 0.24),
];

#[test]
fn measured_periods_match_quadrature() {
    let c = OrbitControls::default();
    for &(mp, mm, d, f) in GRID {
        let p = params(mp, mm, d, f);
        let (per, traj) = oracle_periods(&p, 10, &c).unwrap();
        let np = normalize(&p, MassChoice::Plus).unwrap();
        let tp = t_of(&np).unwrap().value;
        let tm = t_of(&np.with_mass(p.mass_minus())).unwrap().value;
        assert!(rel(per.t_plus, tp) < 1e-5, "{:?}: {} vs {}", (mp, mm, d, f), per.t_plus, tp);
        assert!(rel(per.t_minus, tm) < 1e-5, "{:?}: {} vs {}", (mp, mm, d, f), per.t_minus, tm);
        let (dj, df) = traj.drift();
        assert!(dj < 1e-9 && df < 1e-9, "{:?}: drift {dj:e} {df:e}", (mp, mm, d, f));
        assert!(traj.cofocal_residual() < 1e-10);
    }
}

#[test]
fn kepler_periods_coincide() {
    let p = params(1.0, 0.0, 1.0, 0.6);
    let (per, _) = oracle_periods(&p, 5, &OrbitControls::default()).unwrap();
    assert!(rel(per.t_plus, per.t_minus) < 1e-6);
}

#[test]
fn kepler_physical_period() {
    let p = params(1.0, 0.0, 1.0, 0.6);
    let el = KeplerElements::new(1.0, p.j0, 0.4, 0.3).unwrap();
    let s0 = state_from_elements(&el, &p, 0.0).unwrap();
    let traj = integrate_orbit(&s0, &p, 3.5 * el.period(), &OrbitControls::default()).unwrap();
    let ts: Vec<f64> = traj.event_times(Event::R1Max).unwrap().into_iter().map(|e| e.1).collect();
    assert_eq!(ts.len(), 3);
    for w in ts.windows(2) {
        assert!(rel(w[1] - w[0], 2.0 * PI / el.n) < 1e-8);
    }
    assert!((traj.samples.last().unwrap().t - 3.5 * el.period()).abs() < 1e-10);
}

#[test]
fn beta_components_match_jacobi() {
    let p = params(0.6, 0.4, 2.0, 0.75);
    let jac = jacobi_t_minus(&p).unwrap();
    assert_eq!(jac.len(), 2);
    let c = OrbitControls::default();
    for (k, j) in jac.iter().enumerate() {
        let s0 = initial_state(&p, k).unwrap();
        let traj = integrate_until_maxima(&s0, &p, 6, &c).unwrap();
        let per = measure_tau_periods(&traj).unwrap();
        assert!(rel(per.t_minus, j.value) < 1e-6, "component {k}: {} vs {}", per.t_minus, j.value);
    }
}

#[test]
fn too_short_run_is_reported() {
    let p = params(1.0, 0.5, 1.0, 0.6);
    let s0 = initial_state(&p, 0).unwrap();
    let traj = integrate_orbit_tau(&s0, &p, 5.0, &OrbitControls::default()).unwrap();
    assert!(matches!(measure_tau_periods(&traj), Err(Error::InsufficientOscillations { .. })));
}

#[test]
fn samples_are_monotone() {
    let p = params(1.0, 0.3, 2.0, -0.5);
    let s0 = initial_state(&p, 0).unwrap();
    let traj = integrate_orbit(&s0, &p, 20.0, &OrbitControls::default()).unwrap();
    for w in traj.samples.windows(2) {
        assert!(w[1].t > w[0].t && w[1].tau > w[0].tau);
    }
    for s in &traj.samples {
        assert!(s.alpha >= 1.0 && s.beta.abs() <= 1.0);
    }
}

#[test]
fn collision_center_rejected() {
    let p = params(1.0, 0.5, 1.0, 0.6);
    let s = PhaseState::new([0.3, 0.1], [0.0, 2.0]);
    assert_eq!(euler_integral(&s, &p), Err(Error::CollisionSingularity));
    assert_eq!(hamiltonian(&PhaseState::new([0.3, 0.1], [0.0, 0.0]), &p), Err(Error::CollisionSingularity));
}

#[test]
fn collision_orbit_passes_through_second_center() {
    let (m, d) = (1.0, 1.0);
    let e: f64 = 0.5;
    let sin_w = (1.0 - e * e - d) / (d * e);
    let omega = sin_w.asin();
    assert!((f0_hat_from_elements(m, d, e, omega) - m * d).abs() < 1e-14);
    let p = params(m, 0.0, d, m * d);
    assert_eq!(collision_classify(&p).unwrap(), CollisionLabel::HitsSecondCenter);
    let el = KeplerElements::new(m, p.j0, e, omega).unwrap();
    let nu = PI / 2.0 - omega;
    let s = state_from_elements(&el, &p, nu).unwrap();
    assert!(s.x[0].abs() < 1e-12 && (s.x[1] - 2.0 * p.v0).abs() < 1e-12);
}

#[test]
fn circular_constraint() {
    assert_eq!(f0_hat_from_elements(1.3, 0.7, 0.0, 1.1), 1.3 * 1.3);
}

#[test]
fn f32_orbit_smoke() {
    let p = SystemParams::<f32>::from_normalized(1.0, 0.5, 1.0, 1.0, 0.6).unwrap();
    let (per, _) = oracle_periods(&p, 3, &OrbitControls::default()).unwrap();
    assert!(((per.t_plus - 3.212_951) / 3.212_951).abs() < 1e-3);
}

fn elliptic() -> impl Strategy<Value = (f64, f64, f64, f64, f64)> {
    (0.3f64..2.0, 0.2f64..3.0, 0.0f64..0.95, -PI..PI, -PI..PI)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn kepler_round_trip((m, ja, e, omega, nu) in elliptic()) {
        let p = SystemParams::new(m, 0.0, 1.0, -ja, 0.1).unwrap();
        let el = KeplerElements::new(m, -ja, e, omega).unwrap();
        let s = state_from_elements(&el, &p, nu).unwrap();
        let (back, nu2) = elements_from_state(&s, &p).unwrap();
        prop_assert!((back.a - el.a).abs() < 1e-10 * el.a);
        prop_assert!((back.e - el.e).abs() < 1e-10);
        if e > 1e-6 {
            let dw = (back.omega - omega).sin().abs() + (1.0 - (back.omega - omega).cos()).abs();
            prop_assert!(dw < 1e-9);
            let s2 = state_from_elements(&back, &p, nu2).unwrap();
            for k in 0..2 {
                prop_assert!((s2.x[k] - s.x[k]).abs() < 1e-10 * (1.0 + el.a));
                prop_assert!((s2.y[k] - s.y[k]).abs() < 1e-10 * (1.0 + s.y[0].hypot(s.y[1])));
            }
        }
    }

    #[test]
    fn euler_integral_from_elements_matches((m, ja, e, omega, nu) in elliptic(), v0 in 0.2f64..3.0) {
        let p = SystemParams::new(m, 0.0, v0, -ja, 0.1).unwrap();
        let el = KeplerElements::new(m, -ja, e, omega).unwrap();
        let s = state_from_elements(&el, &p, nu).unwrap();
        let lhs = euler_integral(&s, &p).unwrap();
        let rhs = euler_integral_from_elements(&el, m, v0);
        prop_assert!((lhs - rhs).abs() < 1e-10 * (1.0 + rhs.abs() + m * el.a));
        prop_assert!((hamiltonian(&s, &p).unwrap() + ja).abs() < 1e-12 * (1.0 + ja));
        prop_assert!((el.a - m / (2.0 * ja)).abs() < 1e-14 * el.a);
    }

    #[test]
    fn cofocal_forms_agree(
        mp in 0.2f64..2.0, frac in 0.0f64..1.0, v0 in 0.3f64..2.0,
        x1 in 0.05f64..3.0, x2 in -3.0f64..5.0, p1 in -2.0f64..2.0, p2 in -2.0f64..2.0,
    ) {
        let p = SystemParams::new(mp, frac * mp, v0, -0.5, 0.0).unwrap();
        let s = PhaseState::new([p1, p2], [x1, x2]);
        let c = to_cofocal(&s, &p).unwrap();
        let (r1, r2) = s.distances(v0);
        prop_assert!((r1 - v0 * (c.alpha + c.beta)).abs() < 1e-10 * (1.0 + r1));
        prop_assert!((r2 - v0 * (c.alpha - c.beta)).abs() < 1e-10 * (1.0 + r2));
        let f = euler_integral(&s, &p).unwrap();
        let fc = euler_integral_cofocal(&c, &p);
        prop_assert!((f - fc).abs() < 1e-10 * (1.0 + f.abs() + (r1 + r2) * (p1.abs() + p2.abs()).powi(2)));
        let j = hamiltonian(&s, &p).unwrap();
        prop_assert!((j - hamiltonian_cofocal(&c, &p)).abs() < 1e-10 * (1.0 + j.abs()));
        let back = from_cofocal(&c, &p, 1.0);
        for k in 0..2 {
            prop_assert!((back.x[k] - s.x[k]).abs() < 1e-9 * (1.0 + r1));
        }
    }
}

#[test]
fn close_passes_near_second_center_conserve_j() {
    let p = params(1.0, 1.0, 1.7954458932719184, 3.4124359135392996);
    let (_, traj) = oracle_periods(&p, 10, &OrbitControls::default()).unwrap();
    assert!(traj.min_distance < 2e-3);
    let (dj, df) = traj.drift();
    assert!(dj < 1e-9 && df < 1e-9, "{dj:e} {df:e}");
}
