use proptest::prelude::*;

use qfock::deformation::parse_deformation;
use qfock::deformation::DeformationScheme;
use qfock::fock_matrix::{annihilation_matrix, creation_matrix, projector, verify_algebra};
use qfock::paired_state::{quadrature_variances, reduced_entropy_bits, shannon_entropy_bits};
use qfock::squeezed::{self, SqueezedSpec};
use qfock::thermal::{self, ThermalSpec};

fn bm(q: f64) -> DeformationScheme {
    DeformationScheme::biedenharn_macfarlane(q).unwrap()
}

fn close(a: f64, b: f64, rel: f64) -> bool {
    (a - b).abs() <= rel * a.abs().max(b.abs()).max(1.0)
}

fn q_value() -> impl Strategy<Value = f64> {
    prop_oneof![0.2f64..0.99, 1.01f64..5.0]
}

proptest! {
    #[test]
    fn bm_inversion_symmetry(q in q_value(), n in 0u32..48) {
        let a = bm(q).eval_d(n).unwrap();
        let b = bm(1.0 / q).eval_d(n).unwrap();
        prop_assert!(close(a, b, 1e-12), "D_q({n}) = {a}, D_1/q = {b}");
    }

    #[test]
    fn factorial_ratio(q in q_value(), n in 1u32..20) {
        let s = bm(q);
        let ratio = s.d_factorial(n).unwrap() / s.d_factorial(n - 1).unwrap();
        prop_assert!(close(ratio, s.eval_d(n).unwrap(), 1e-12));
    }

    #[test]
    fn bm_limit(n in 0u32..40, eps in -1e-9f64..1e-9) {
        let d = bm(1.0 + eps).eval_d(n).unwrap();
        prop_assert_eq!(d, n as f64);
    }

    #[test]
    fn ladder_adjoint(q in q_value(), dim in 2usize..24) {
        let s = bm(q);
        let a = annihilation_matrix(&s, dim).unwrap();
        let ad = creation_matrix(&s, dim).unwrap();
        prop_assert_eq!(a.transpose(), ad);
    }

    #[test]
    fn projector_products(dim in 1usize..12, i in 0usize..12, j in 0usize..12, k in 0usize..12) {
        prop_assume!(i < dim && j < dim && k < dim);
        let p = projector(i, j, dim).unwrap().mul(&projector(j, k, dim).unwrap()).unwrap();
        prop_assert_eq!(p, projector(i, k, dim).unwrap());
    }

    #[test]
    fn algebra_holds(q in q_value(), dim in 2usize..40) {
        let report = verify_algebra(&bm(q), dim, 1e-10).unwrap();
        prop_assert!(report.passed(), "{report}");
    }

    #[test]
    fn normalization(xi in 0.0f64..3.0, theta in 0.05f64..6.0) {
        let s: f64 = squeezed::squeezed_probabilities(&SqueezedSpec::new(xi, bm(2.0), 1e-12).unwrap()).iter().sum();
        prop_assert!((s - 1.0).abs() <= 1e-12);
        let t: f64 = thermal::thermal_probabilities(&ThermalSpec::new(theta, bm(2.0), 1e-12).unwrap()).iter().sum();
        prop_assert!((t - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn entropy_routes_agree(theta in 0.3f64..5.0) {
        let spec = ThermalSpec::new(theta, DeformationScheme::undeformed(), 1e-12).unwrap();
        let p = thermal::thermal_probabilities(&spec);
        let shannon = shannon_entropy_bits(&p).unwrap();
        let reduced = reduced_entropy_bits(&thermal::thermal_state(&spec).unwrap());
        prop_assert!((shannon - reduced).abs() < 1e-12);
    }

    #[test]
    fn uncertainty_product_identity(q in 0.6f64..1.6, theta in 1.0f64..4.0) {
        prop_assume!(theta > q.ln().abs());
        let m = thermal::thermal_moments(&ThermalSpec::new(theta, bm(q), 1e-12).unwrap()).unwrap();
        let v = quadrature_variances(&m);
        let want = 0.0625 * ((m.adag_a + m.a_adag).powi(2) * 0.25 - m.a_atilde.powi(2)) * 4.0;
        prop_assert!(close(v.product, want, 1e-12));
        prop_assert!(v.var1 >= v.var2 && v.var2 >= 0.0);
    }

    #[test]
    fn correspondence(theta in 0.3f64..4.0, q in 0.7f64..1.4) {
        prop_assume!(theta > q.ln().abs() * 1.05);
        let xi = (-0.5 * theta).exp().atanh();
        let a = squeezed::squeezed_moments(&SqueezedSpec::new(xi, bm(q), 1e-12).unwrap()).unwrap();
        let b = thermal::thermal_moments(&ThermalSpec::new(theta, bm(q), 1e-12).unwrap()).unwrap();
        prop_assert!(close(a.adag_a, b.adag_a, 1e-10));
        prop_assert!(close(a.a_atilde, b.a_atilde, 1e-10));
    }

    #[test]
    fn display_reparses(src in "[qn0-9+*/^() -]{1,24}") {
        if let Ok(e) = parse_deformation(&src) {
            let again = parse_deformation(&e.to_string()).unwrap();
            prop_assert_eq!(again, e);
        }
    }

    #[test]
    fn parse_errors_are_positioned(src in "[qn0-9+*/^()a-z. -]{0,24}") {
        if let Err(e) = parse_deformation(&src) {
            prop_assert!(e.position <= src.len());
        }
    }
}
