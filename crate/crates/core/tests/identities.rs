use twocenter::elliptic_identities::*;
use twocenter::param_domain::NormalizedParams;
use twocenter::period_engine::{t_circ, t_down, t_up};
use twocenter::quadrature::QuadratureSpec;

fn rel(a: f64, b: f64) -> f64 {
    ((a - b) / b).abs()
}

fn unit(m: f64, d: f64, f: f64) -> NormalizedParams<f64> {
    NormalizedParams::unit(m, d, f).unwrap()
}

const DOWN: &[(f64, f64, f64)] = &[(1.0, 1.0, 0.5), (1.0, 1.0, -0.3), (1.0, 3.0, 1.0), (0.6, 0.8, 0.1)];
const TRIANGLE: &[(f64, f64, f64)] = &[(1.0, 1.0, 1.1), (1.0, 0.5, 0.7), (1.0, 1.5, 1.55), (0.7, 1.0, 0.72)];

#[test]
fn eps_chi_real_part_reproduces_both_periods() {
    let spec = QuadratureSpec::default();
    for &(m, d, f) in DOWN {
        let n = unit(m, d, f);
        let v = re_eps_chi_period(&n, &spec).unwrap();
        assert!(rel(v, t_down(&n).unwrap().value) < 1e-10, "({m},{d},{f})");
    }
    for &(m, d, f) in TRIANGLE {
        let n = unit(m, d, f);
        let v = re_eps_chi_period(&n, &spec).unwrap();
        assert!(rel(v, t_up(&n).unwrap().value) < 1e-10, "({m},{d},{f})");
    }
}

#[test]
fn gamma_psi_form_on_the_triangle() {
    let spec = QuadratureSpec::default();
    for &(m, d, f) in TRIANGLE {
        let n = unit(m, d, f);
        let v = gamma_psi_period(&n, &spec).unwrap();
        assert!(rel(v, t_circ(&n).unwrap().value) < 1e-10, "({m},{d},{f})");
    }
    let n = unit(1.0, 1.0, 0.5);
    assert!(gamma_psi_period(&n, &spec).is_err());
}

#[test]
fn continuation_is_real_below_the_singular_line() {
    let spec = QuadratureSpec::default();
    for &(m, d, f) in DOWN {
        let n = unit(m, d, f);
        let c = t_down_continuation(&n, &spec).unwrap();
        assert!(c.im.abs() < 1e-14 * c.re);
        assert!(rel(c.re, t_down(&n).unwrap().value) < 1e-10);
    }
}

#[test]
fn continuation_and_good_formula_on_the_triangle() {
    let spec = QuadratureSpec::default();
    for &(m, d, f) in TRIANGLE {
        let n = unit(m, d, f);
        let c = t_down_continuation(&n, &spec).unwrap();
        let g = good_formula_t_down(m, d, f, 1.0).unwrap();
        let circ = t_circ(&n).unwrap().value;
        assert!(c.im < 0.0);
        assert!(rel(c.re, circ) < 1e-10 && rel(g.im, c.im) < 1e-10);
        assert!(rel(2.0 * g.re, circ) < 1e-10);
        let (cc, two_re) = real_part_corollary_check(m, d, f, 1.0).unwrap();
        assert!(rel(two_re, cc) < 1e-10);
    }
    assert!(good_formula_t_down(1.0, 1.0, 0.5, 1.0).is_err());
}

#[test]
fn periods_are_even_in_delta() {
    let spec = QuadratureSpec::default();
    for &(m, d, f) in TRIANGLE {
        let (p, q) = (aux_functions(m, d, f).unwrap(), aux_functions(m, -d, f).unwrap());
        assert_eq!(p.gamma, q.gamma);
        let a = inv_sqrt_cos_integral(p.gamma, p.psi, &spec).unwrap();
        let b = inv_sqrt_cos_integral(q.gamma, q.psi, &spec).unwrap();
        assert!((a - b).norm() < 1e-12 * a.norm());
        let (first, second) = good_formula_terms(m, d, f, &spec).unwrap();
        let e = inv_sqrt_cos_integral(q.eps, q.chi, &spec).unwrap();
        assert!((second - e).norm() < 1e-14 * e.norm() && first != second);
    }
}

#[test]
fn real_ratio_cases_agree_with_the_lemma() {
    let spec = QuadratureSpec::default();
    let b = check_lemma(&real_ratio_samples::<f64>(200, 5), &spec).unwrap();
    assert!(b.max_residual < 1e-8 && b.max_case_residual < 1e-8);
    assert!(b.case_counts.len() >= 4, "{:?}", b.case_counts);
}

#[test]
fn lemma_batch_is_seed_deterministic() {
    let spec = QuadratureSpec::default();
    let a = lemma_batch::<f64>(300, 42, &spec).unwrap();
    let b = lemma_batch::<f64>(300, 42, &spec).unwrap();
    assert_eq!(a, b);
    assert!(a.max_residual < 1e-8);
}
