use num_complex::Complex64;
use proptest::prelude::*;
use slmaster::cfunc::{self, CMethod};
use slmaster::master::SymbolFunction;
use slmaster::model::{build_model, Model};
use slmaster::phi;
use slmaster::sinetype::{self, build_sinetype, SineTypeData};
use slmaster::spectrum::{solve_eigen, EigenData};
use std::sync::OnceLock;

fn perturbed() -> &'static (Model, EigenData, SineTypeData) {
    static CELL: OnceLock<(Model, EigenData, SineTypeData)> = OnceLock::new();
    CELL.get_or_init(|| {
        let m = build_model(1.0, 1.0, &[2.0], 16).unwrap();
        let e = solve_eigen(&m, 30, 1e-13).unwrap();
        let s = build_sinetype(&m, &e, 400).unwrap();
        (m, e, s)
    })
}

fn complex(r: f64) -> impl Strategy<Value = Complex64> {
    (-r..r, -r..r).prop_map(|(a, b)| Complex64::new(a, b))
}

fn model_params() -> impl Strategy<Value = (f64, f64, Vec<f64>)> {
    (-0.45f64..2.0, -0.45f64..2.0, prop::collection::vec(1.1f64..4.0, 0..=2))
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 24, ..ProptestConfig::default() })]

    #[test]
    fn flat_case_is_cosine(l in complex(8.0), t in 0.01f64..3.0) {
        let m = build_model(-0.5, -0.5, &[], 16).unwrap();
        let v = phi::eval_phi(&m, l, t, 1e-12).unwrap().values[0];
        let exact = (l * t).cos();
        prop_assert!((v - exact).norm() < 1e-9 * exact.norm().max(1.0));
    }

    #[test]
    fn phi_even_and_conjugate((a, b, roots) in model_params(), l in complex(6.0), t in 0.05f64..4.0) {
        let m = build_model(a, b, &roots, 16).unwrap();
        let v = phi::eval_phi(&m, l, t, 1e-12).unwrap().values[0];
        let w = phi::eval_phi(&m, -l, t, 1e-12).unwrap().values[0];
        let c = phi::eval_phi(&m, l.conj(), t, 1e-12).unwrap().values[0];
        let s = v.norm().max(1e-12);
        prop_assert!((v - w).norm() < 1e-9 * s);
        prop_assert!((v.conj() - c).norm() < 1e-9 * s);
    }

    #[test]
    fn phi_at_origin_is_one((a, b, roots) in model_params(), l in complex(6.0)) {
        let m = build_model(a, b, &roots, 16).unwrap();
        let v = phi::eval_phi(&m, l, 1e-6, 1e-12).unwrap().values[0];
        prop_assert!((v - 1.0).norm() < 1e-9);
    }

    #[test]
    fn c_conjugate_on_real_line(x in 0.3f64..8.0) {
        let (m, _, _) = perturbed();
        let cp = cfunc::eval_c(m, Complex64::new(x, 0.0), CMethod::Wronskian).unwrap().value;
        let cm = cfunc::eval_c(m, Complex64::new(-x, 0.0), CMethod::Wronskian).unwrap().value;
        prop_assert!((cp.conj() - cm).norm() < 1e-9 * cp.norm());
    }

    #[test]
    fn sine_type_is_odd(z in complex(10.0)) {
        let (_, _, s) = perturbed();
        let a = s.sine_s(z);
        let b = s.sine_s(-z);
        prop_assert!((a + b).norm() <= 1e-12 * a.norm());
        let (p, q) = (s.s1(z), s.s1(-z));
        prop_assert!((p + q).norm() <= 1e-12 * p.norm());
    }

    #[test]
    fn tail_doubling_is_stable(r in 0.0f64..10.0, th in 0.0f64..6.283) {
        let (m, e, s) = perturbed();
        let z = Complex64::from_polar(r, th);
        let s2 = build_sinetype(m, e, 2 * s.truncation_n).unwrap();
        let d = (s2.sine_s(z) / s.sine_s(z)).ln();
        prop_assert!(d.norm() < 1e-12);
    }

    #[test]
    fn b_is_odd(x in 0.2f64..8.0, y in -0.5f64..0.5) {
        let (m, _, s) = perturbed();
        let l = Complex64::new(x, y);
        let bp = sinetype::b_eval(m, s, l).unwrap();
        let bm = sinetype::b_eval(m, s, -l).unwrap();
        prop_assert!((bp + bm).norm() < 1e-9 * bp.norm());
    }

    #[test]
    fn exp_shift_certificate_holds(p in 0.1f64..3.0) {
        let a = SymbolFunction::exp_shift(p).unwrap();
        prop_assert!(a.certificate_ratio() <= 1.0 + 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 8, ..ProptestConfig::default() })]

    #[test]
    fn jacobi_spectrum((a, b) in (-0.45f64..2.0, -0.45f64..2.0)) {
        let m = build_model(a, b, &[], 16).unwrap();
        let d = solve_eigen(&m, 6, 1e-13).unwrap();
        for (n, nu) in d.nus.iter().enumerate() {
            let exact = (2.0 * n as f64 + a + b + 1.0).powi(2) - a * a - b * b + 0.5;
            prop_assert!((nu - exact).abs() < 1e-8 * exact.abs().max(1.0));
        }
    }

    #[test]
    fn eigenvalues_increase_with_zeros((a, b, roots) in model_params()) {
        let m = build_model(a, b, &roots, 16).unwrap();
        let d = solve_eigen(&m, 8, 1e-12).unwrap();
        prop_assert!(d.nus.windows(2).all(|w| w[1] > w[0]));
        for (n, diag) in d.diagnostics.iter().enumerate() {
            prop_assert_eq!(diag.oscillations, n);
        }
    }
}

#[test]
fn sine_type_vanishes_at_nodes() {
    let (_, _, s) = perturbed();
    for j in 0..s.computed {
        let z = Complex64::new(0.0, s.mus[j]);
        let d = sinetype::residue_d(s, s.first_index + j).unwrap();
        // |S'(iμ)| = μ²/|d| on the generic branch
        let slope = s.mus[j] * s.mus[j] / d.norm();
        assert!(s.sine_s(z).norm() < 1e-9 * slope, "node {j}");
    }
}
