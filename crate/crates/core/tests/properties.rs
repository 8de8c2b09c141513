//! Randomized invariants across modules.

mod common;

use std::f64::consts::PI;

use num_complex::Complex64;
use proptest::prelude::*;

use abq_forms::cli::output::Table;
use abq_forms::extensions::{charge_solve, extension_matrix};
use abq_forms::forms::{charge_diagonal, HermitianCoupling};
use abq_forms::greens::{green_norm_closed, GreenFunction};
use abq_forms::specfun::{bessel_k, bessel_k_derivative, gamma};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn bessel_k_matches_oracle(nu in 0.05f64..0.95, x in 0.01f64..20.0) {
        let reference = common::bessel_k_integral(nu, x);
        prop_assert!((bessel_k(nu, x).unwrap() - reference).abs() <= 1e-10 * reference);
    }

    #[test]
    fn bessel_k_is_positive_and_decreasing(nu in 0.01f64..1.99, x in 0.01f64..40.0) {
        prop_assert!(bessel_k(nu, x).unwrap() > 0.0);
        prop_assert!(bessel_k_derivative(nu, x).unwrap() < 0.0);
    }

    #[test]
    fn bessel_k_recurrence(nu in 0.05f64..0.95, x in 0.05f64..10.0) {
        // K_{nu+1} = K_{nu-1} + 2 nu K_nu / x with K_{nu-1} = K_{1-nu}.
        let lhs = bessel_k(nu + 1.0, x).unwrap();
        let rhs = bessel_k(1.0 - nu, x).unwrap() + 2.0 * nu / x * bessel_k(nu, x).unwrap();
        prop_assert!((lhs - rhs).abs() <= 1e-12 * lhs);
    }

    #[test]
    fn gamma_recurrence(x in 0.05f64..20.0) {
        let a = gamma(x + 1.0).unwrap();
        let b = x * gamma(x).unwrap();
        prop_assert!((a - b).abs() <= 1e-13 * a.abs());
    }

    #[test]
    fn green_norm_scales_with_lambda(alpha in 0.05f64..0.95, lambda in 0.1f64..10.0, k in prop_oneof![Just(0), Just(-1)]) {
        let nu = (k as f64 + alpha).abs();
        let ratio = green_norm_closed(alpha, k, lambda).unwrap() / green_norm_closed(alpha, k, 1.0).unwrap();
        prop_assert!((ratio - lambda.powf(2.0 * nu - 2.0)).abs() <= 1e-12 * ratio);
    }

    #[test]
    fn green_function_decays(alpha in 0.05f64..0.95, lambda in 0.2f64..5.0, r in 0.01f64..5.0) {
        let g = GreenFunction::new(alpha, 0, lambda).unwrap();
        prop_assert!(g.radial(r).unwrap() > g.radial(r * 1.5).unwrap());
    }

    #[test]
    fn extension_matrix_is_hermitian(
        alpha in 0.05f64..0.95, lambda in 0.1f64..10.0,
        b00 in -50.0f64..50.0, b11 in -50.0f64..50.0, re in -20.0f64..20.0, im in -20.0f64..20.0,
    ) {
        let beta = HermitianCoupling::new(b00, b11, Complex64::new(re, im));
        let m = extension_matrix(&beta, alpha, lambda).unwrap();
        let e = &m.entries;
        prop_assert!((e[0][1] - e[1][0].conj()).norm() <= 1e-12 * m.norm());
        let [l1, l2] = m.eigenvalues();
        prop_assert!((l1 * l2 - m.determinant()).abs() <= 1e-9 * m.norm().powi(2));
        let d = charge_diagonal(alpha, lambda);
        prop_assert!((e[0][0].re - b00 - d[0]).abs() <= 1e-12 * m.norm());
        prop_assert!((d[0] - PI * PI * lambda.powf(2.0 * alpha) / (PI * alpha).sin()).abs() <= 1e-12 * d[0]);
    }

    #[test]
    fn charge_solve_inverts_matrix(
        alpha in 0.1f64..0.9, lambda in 0.5f64..4.0,
        b00 in 0.0f64..5.0, b11 in 0.0f64..5.0, re in -1.0f64..1.0,
        t0 in -1.0f64..1.0, t1 in -1.0f64..1.0,
    ) {
        let beta = HermitianCoupling::new(b00, b11, Complex64::new(re, 0.0));
        let traces = [Complex64::new(t0, 0.0), Complex64::new(0.0, t1)];
        let q = charge_solve(&beta, alpha, lambda, traces).unwrap();
        let mq = extension_matrix(&beta, alpha, lambda).unwrap().apply(q);
        for (k, nu) in [(0usize, alpha), (1, 1.0 - alpha)] {
            let weight = 2f64.powf(1.0 - nu) / gamma(nu).unwrap();
            prop_assert!((weight * mq[k] - traces[k]).norm() <= 1e-10);
        }
    }

    #[test]
    fn csv_is_deterministic(values in proptest::collection::vec(-1e6f64..1e6, 1..20)) {
        let mut a = Table::new(&["value"]);
        let mut b = Table::new(&["value"]);
        for v in &values {
            a.push(vec![(*v).into()]);
            b.push(vec![(*v).into()]);
        }
        let text = a.to_csv();
        prop_assert_eq!(&text, &b.to_csv());
        prop_assert_eq!(text.lines().count(), values.len() + 2);
        for (line, v) in text.lines().skip(2).zip(&values) {
            prop_assert_eq!(line.parse::<f64>().unwrap(), *v);
        }
    }
}
