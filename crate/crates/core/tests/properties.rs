use proptest::prelude::*;
use twocenter::elliptic_identities::{alpha_beta, aux_functions, LemmaParams};
use twocenter::monotonicity::s_up_kernel;
use twocenter::param_domain::{
    classify, f_boundaries, f_sing, quadratic_roots, turning_points_normalized, NormalizedParams,
};
use twocenter::period_engine::PeriodEngine;
use twocenter::quadrature::{
    adaptive_panel, integrate_complex_trapezoid, integrate_periodic, tanh_sinh, Node, QuadratureSpec,
};
use twocenter::Error;

use num_complex::Complex;

fn rel(a: f64, b: f64) -> f64 {
    ((a - b) / b).abs()
}

/// P↑ point `(a, b, c) = (M², δ̂₀², F̂₀)` strictly inside the upper region.
fn up_point() -> impl Strategy<Value = (f64, f64, f64)> {
    (0.3f64..2.0, 0.2f64..3.0, 0.05f64..0.95).prop_map(|(m, d, t)| {
        let (lo, hi) = (f_sing(m, d), m * m + d * d / 4.0);
        let hi = if hi > lo { hi } else { lo + 1.0 };
        (m * m, d * d, lo + (hi - lo) * t)
    })
}

fn down_point() -> impl Strategy<Value = (f64, f64, f64)> {
    (0.3f64..2.0, 0.2f64..3.0, 0.05f64..0.95).prop_map(|(m, d, t)| {
        let (lo, _) = f_boundaries(m, d);
        let fs = f_sing(m, d);
        (m * m, d * d, lo + (fs - lo) * t)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn boundary_ordering(m in 0.05f64..5.0, d in 0.01f64..10.0) {
        let (lo, hi) = f_boundaries(m, d);
        let fs = f_sing(m, d);
        prop_assert!(lo < fs);
        if d < 2.0 * m {
            prop_assert!(fs < hi);
        } else {
            prop_assert!(hi <= fs);
            prop_assert_eq!(hi, m * d);
        }
    }

    #[test]
    fn classify_is_scale_invariant(
        mp in 0.2f64..3.0, frac in 0.0f64..1.0, d in 0.1f64..5.0, f in -5.0f64..8.0, lam in 0.2f64..5.0,
    ) {
        let mm = frac * mp;
        let a = classify(mp, mm, d, f);
        let b = classify(lam * mp, lam * mm, lam * d, lam * lam * f);
        prop_assert_eq!(a.w_region, b.w_region);
        prop_assert_eq!(a.period_region_plus, b.period_region_plus);
        prop_assert_eq!(a.period_region_minus, b.period_region_minus);
    }

    #[test]
    fn quadratic_roots_vieta(m in 0.1f64..3.0, d in 0.05f64..4.0, f in -6.0f64..10.0) {
        prop_assume!((f.abs() - m * d) > 1e-6 * (1.0 + f.abs()));
        let m2 = m * m;
        match quadratic_roots(m, f, d) {
            Ok((xm, xp)) => {
                prop_assert!(xm <= xp);
                prop_assert!(rel(xm + xp, 2.0 * f / m2) < 1e-12);
                prop_assert!(rel(xm * xp, d * d / m2) < 1e-12);
            }
            Err(e) => {
                prop_assert_eq!(e, Error::ComplexRoots);
                prop_assert!(f.abs() < m * d);
            }
        }
    }

    #[test]
    fn hill_set_empty_exactly_outside_band(
        mp in 0.2f64..3.0, frac in 0.0f64..1.0, d in 0.1f64..5.0, f in -8.0f64..10.0,
    ) {
        let mm = frac * mp;
        let lo = f_boundaries(mm, d).0;
        let hi = f_boundaries(mp, d).1;
        prop_assume!((f - lo).abs() > 1e-9 && (f - hi).abs() > 1e-9);
        let r = turning_points_normalized(mp, mm, d, f);
        if lo < f && f < hi {
            prop_assert!(r.is_ok(), "{:?}", r);
        } else {
            prop_assert_eq!(r.err(), Some(Error::EmptyHillSet));
        }
    }

    #[test]
    fn quadrature_linearity(c in -5.0f64..5.0, k in 0.1f64..3.0) {
        let spec = QuadratureSpec::double_exponential();
        let f = |n: Node<f64>| (k * n.x).cos() / n.x.sqrt();
        let a = tanh_sinh(f, 0.0, 2.0, &spec).unwrap();
        let b = tanh_sinh(|n: Node<f64>| c * f(n), 0.0, 2.0, &spec).unwrap();
        prop_assert!((b.value - c * a.value).abs() <= (b.err_estimate + c.abs() * a.err_estimate).max(1e-13));
    }

    #[test]
    fn panel_additivity(s in 0.1f64..1.9) {
        let spec = QuadratureSpec::adaptive_panel();
        let f = |n: Node<f64>| (n.x * n.x).exp() * n.x.sin();
        let whole = adaptive_panel(f, 0.0, 2.0, &spec).unwrap();
        let l = adaptive_panel(f, 0.0, s, &spec).unwrap();
        let r = adaptive_panel(f, s, 2.0, &spec).unwrap();
        let tol = whole.err_estimate + l.err_estimate + r.err_estimate;
        prop_assert!((whole.value - l.value - r.value).abs() <= tol.max(1e-12 * whole.value.abs()));
    }

    #[test]
    fn complex_matches_real(a in 1.5f64..4.0, k in 1u32..4) {
        let spec = QuadratureSpec::periodic();
        let g = |t: f64| 1.0 / (a + (k as f64 * t).cos());
        let r = integrate_periodic(g, &spec).unwrap();
        let c = integrate_complex_trapezoid(|t| Complex::new(g(t), 0.0), &spec).unwrap();
        prop_assert!(rel(c.value.re, r.value) < 1e-12 && c.value.im.abs() < 1e-14);
        prop_assert!(rel(r.value, 2.0 * std::f64::consts::PI / (a * a - 1.0).sqrt()) < 1e-12);
    }

    #[test]
    fn periods_positive_and_homogeneous((a, b, c) in prop_oneof![up_point(), down_point()], lam in prop_oneof![Just(0.5), Just(2.0), Just(10.0)]) {
        let e = PeriodEngine::<f64>::default();
        let t = e.t_tilde(a, b, c).unwrap();
        prop_assume!(t.is_ok());
        prop_assert!(t.value > 0.0);
        let ts = e.t_tilde(lam * a, lam * b, lam * c).unwrap();
        prop_assert!(rel(ts.value, t.value / lam.sqrt()) < 1e-9);
    }

    #[test]
    fn s_up_homogeneous((a, b, c) in up_point(), lam in prop_oneof![Just(0.5), Just(2.0), Just(10.0)]) {
        let s = s_up_kernel(a, b, c).unwrap();
        let ss = s_up_kernel(lam * a, lam * b, lam * c).unwrap();
        prop_assert!(rel(ss, s / lam.powi(3)) < 1e-6);
    }

    #[test]
    fn roots_monotone_along_up_fiber(m in 0.3f64..2.0, d in 0.2f64..3.0, t in 0.05f64..0.9) {
        let (lo, hi) = (f_sing(m, d), m * m + d * d / 4.0);
        prop_assume!(hi > lo + 1e-6);
        let f1 = lo + (hi - lo) * t;
        let f2 = f1 + (hi - lo) * 0.05;
        let (a1, b1) = quadratic_roots(m, f1, d).unwrap();
        let (a2, b2) = quadratic_roots(m, f2, d).unwrap();
        prop_assert!(a2 < a1 && b2 > b1);
        prop_assert!(a2 > 0.0);
    }

    #[test]
    fn alpha_beta_vieta(ar in -2.0f64..2.0, ai in -2.0f64..2.0, br in -2.0f64..2.0, bi in -2.0f64..2.0, tr in -1.0f64..1.0, ti in -1.0f64..1.0) {
        let p = LemmaParams { a: Complex::new(ar, ai), b: Complex::new(br, bi), t: Complex::new(tr, ti) };
        let ab = alpha_beta(&p);
        let (a2, b2) = (p.a * p.a, p.b * p.b);
        let scale = 1.0 + (a2 + b2).norm() + (a2 * b2).norm();
        prop_assert!((ab.alpha * ab.alpha + ab.beta * ab.beta - a2 - b2).norm() < 1e-12 * scale);
        prop_assert!((ab.alpha * ab.beta * ab.alpha * ab.beta - a2 * b2 * p.t * p.t).norm() < 1e-12 * scale * scale);
    }

    #[test]
    fn aux_signs_on_triangle(m in 0.3f64..2.0, s in 0.02f64..0.98, t in 0.02f64..0.98) {
        let d = 2.0 * m * s;
        let f = m * d + (m * m + d * d / 4.0 - m * d) * t;
        let n = NormalizedParams::unit(m, d, f).unwrap();
        let x = aux_functions(n.mass, -n.delta0_hat, n.f0_hat).unwrap();
        prop_assert!(x.eps + x.chi < 0.0 && x.eps - x.chi < 0.0);
    }
}
