//! Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

mod common;

use std::f64::consts::PI;
use std::io::Write;
use std::process::Command;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use abq_forms::extensions::{bound_states, boundary_trace, extension_matrix, geometric_radii};
use abq_forms::fields::{Cutoff, PerturbationField};
use abq_forms::forms::{
    coercivity_sweep, qbeta_eval, xi_matrix, GaussianMode, GridSpec, HermitianCoupling, RegularPart, TrialFunction,
};
use abq_forms::greens::{green_asymptotic, green_norm_quadrature, radial_defect, GreenFunction};
use abq_forms::specfun::bessel_k;
use abq_forms::spectral::{
    assemble_mode_operator, eigenvector, extrapolated_eigenvalues, gamma_recovery_study, profile_near_origin,
    resolvent_study, RadialGrid,
};
use common::*;

const FLUX_SEQUENCE: [f64; 5] = [0.2, 0.1, 0.05, 0.025, 0.0125];

/// Writes the verdict past the test harness capture, then asserts it.
fn verdict(number: u32, name: &str, passed: bool, detail: String) {
    let status = if passed { "PASS" } else { "FAIL" };
    let _ = writeln!(std::io::stderr(), "criterion {number:>2} {name}: {status} | {detail}");
    assert!(passed, "criterion {number} ({name}) failed: {detail}");
}

#[test]
fn criterion_01_bessel_fidelity() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut worst: f64 = 0.0;
    for _ in 0..500 {
        let nu = rng.gen_range(0.05..0.95);
        let x = rng.gen_range(0.01..20.0);
        let reference = bessel_k_integral(nu, x);
        worst = worst.max((bessel_k(nu, x).unwrap() - reference).abs() / reference);
    }
    let mut half: f64 = 0.0;
    for i in 0..200 {
        let x = 0.01 * 2000f64.powf(i as f64 / 199.0);
        half = half.max((bessel_k(0.5, x).unwrap() - bessel_k_half(x)).abs() / bessel_k_half(x));
    }
    verdict(
        1,
        "bessel_k against integral oracle and K_1/2",
        worst <= 1e-10 && half <= 1e-12,
        format!("max rel err {worst:.2e} (<= 1e-10), K_1/2 max rel err {half:.2e} (<= 1e-12)"),
    );
}

#[test]
fn criterion_02_norm_identity() {
    let mut worst: f64 = 0.0;
    let mut count = 0;
    for alpha in [0.1, 0.25, 0.4, 0.5, 0.6, 0.9] {
        for k in [0, -1] {
            for lambda in [0.25, 0.5, 1.0, 2.0, 4.0, 8.0] {
                let exact = green_norm_identity(alpha, k, lambda);
                let quad = green_norm_quadrature(alpha, k, lambda, 1e-10).unwrap().value;
                worst = worst.max((quad - exact).abs() / exact);
                count += 1;
            }
        }
    }
    verdict(2, "Green norm identity", count == 72 && worst <= 1e-7, format!("{count} points, max rel err {worst:.2e} (<= 1e-7)"));
}

#[test]
fn criterion_03_asymptotic_order() {
    let radii: Vec<f64> = (0..9).map(|i| 1e-2 * 10f64.powf(-0.25 * i as f64)).collect();
    let mut worst: f64 = 0.0;
    let mut lines = Vec::new();
    for alpha in [0.3, 0.5, 0.7] {
        for k in [0, -1] {
            let g = GreenFunction::new(alpha, k, 1.0).unwrap();
            let rem: Vec<f64> = radii
                .iter()
                .map(|&r| (g.radial(r).unwrap() - green_asymptotic(alpha, k, 1.0, r).unwrap().value).abs())
                .collect();
            let slope = log_log_slope(&radii, &rem);
            let gap = (slope - (2.0 - g.order())).abs();
            worst = worst.max(gap);
            lines.push(format!("({alpha},{k}):{slope:.3}"));
        }
    }
    verdict(3, "remainder order 2 - nu", worst <= 0.05, format!("max |slope - (2 - nu)| = {worst:.3} (<= 0.05); {}", lines.join(" ")));
}

#[test]
fn criterion_04_defect_equation() {
    let radii: Vec<f64> = (0..20).map(|i| 1e-3 * 10f64.powf(4.0 * i as f64 / 19.0)).collect();
    let mut residual: f64 = 0.0;
    let mut control = f64::INFINITY;
    for alpha in [0.1, 0.3, 0.5, 0.7, 0.9] {
        for k in [0, -1] {
            for lambda in [0.5, 1.0, 2.0] {
                let nu = GreenFunction::new(alpha, k, lambda).unwrap().order();
                let mut perturbed: f64 = 0.0;
                for &r in &radii {
                    residual = residual.max(radial_defect(nu, nu, lambda, r).unwrap());
                    perturbed = perturbed.max(radial_defect(nu + 0.05, nu, lambda, r).unwrap());
                }
                control = control.min(perturbed);
            }
        }
    }
    verdict(
        4,
        "defect equation residual",
        residual <= 1e-7 && control > 1e-2,
        format!("max residual {residual:.2e} (<= 1e-7), weakest negative control {control:.2e} (> 1e-2)"),
    );
}

#[test]
fn criterion_05_xi_hermitian() {
    let field = PerturbationField::capped_homogeneous(1.0, 2.0).unwrap();
    let mut worst_herm: f64 = 0.0;
    let mut worst_off: f64 = 0.0;
    for alpha in [0.3, 0.5] {
        for lambda in [0.5, 1.0, 2.0] {
            let psi = TrialFunction::new(
                alpha,
                lambda,
                [Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)],
                Cutoff::new(0.5, 1.5).unwrap(),
                field.clone(),
                RegularPart::zero(),
            )
            .unwrap();
            let xi = xi_matrix(&psi, &GridSpec::default()).unwrap();
            let allowed_herm = 10.0 * (xi.errors[0][1] + xi.errors[1][0]);
            worst_herm = worst_herm.max(xi.asymmetry() / allowed_herm);
            worst_off = worst_off.max(xi.entries[0][1].norm() / (10.0 * xi.errors[0][1]));
        }
    }
    verdict(
        5,
        "Xi Hermiticity and vanishing off-diagonal",
        worst_herm <= 1.0 && worst_off <= 1.0,
        format!("max asymmetry / (10 err) = {worst_herm:.3}, max |Xi_01| / (10 err) = {worst_off:.3} (both <= 1)"),
    );
}

#[test]
fn criterion_06_lambda_and_cutoff_invariance() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let grid = GridSpec::default();
    let mut worst: f64 = 0.0;
    for _ in 0..10 {
        let (psi, beta) = random_trial(&mut rng, 1.0);
        for (l1, l2) in [(1.0, 2.0), (0.5, 3.0)] {
            let a = psi.change_lambda(l1).unwrap();
            let qa = qbeta_eval(&a, &beta, &grid).unwrap().value;
            let qb = qbeta_eval(&a.change_lambda(l2).unwrap(), &beta, &grid).unwrap().value;
            worst = worst.max((qa - qb).abs() / qa.abs());
        }
        let q = qbeta_eval(&psi, &beta, &grid).unwrap().value;
        let recut = psi.change_cutoff(Cutoff::new(1.0, 3.0).unwrap());
        let qc = qbeta_eval(&recut, &beta, &grid).unwrap().value;
        worst = worst.max((q - qc).abs() / q.abs());
    }
    verdict(6, "lambda and cutoff invariance", worst <= 1e-4, format!("10 seeded trials, max rel deviation {worst:.2e} (<= 1e-4)"));
}

#[test]
fn criterion_07_coercivity() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let lambdas = [0.5, 1.0, 2.0, 4.0, 8.0, 16.0];
    let mut weakest = f64::INFINITY;
    let mut largest_threshold: f64 = 0.0;
    let mut all_finite = true;
    for _ in 0..10 {
        let (psi, beta) = random_trial(&mut rng, 1.0);
        let (rows, threshold) = coercivity_sweep(&[psi], &beta, &lambdas, &GridSpec::coarse()).unwrap();
        weakest = weakest.min(rows.last().unwrap().1);
        match threshold {
            Some(t) => largest_threshold = largest_threshold.max(t),
            None => all_finite = false,
        }
    }
    verdict(
        7,
        "coercivity at lambda = 16",
        weakest >= 0.0 && all_finite,
        format!("min probe at 16 = {weakest:.4e} (>= 0), lambda* finite = {all_finite} (largest {largest_threshold})"),
    );
}

#[test]
fn criterion_08_bound_states() {
    let bracket = (1e-3, 1e3);
    let mut worst: f64 = 0.0;
    let mut count_ok = true;
    for alpha in [0.2, 0.5, 0.8] {
        let s = (PI * alpha).sin();
        for (b00, b11) in [(-5.0, 3.0), (2.0, -12.0), (-20.0, -1.5)] {
            let beta = HermitianCoupling::diagonal(b00, b11);
            let mut expected: Vec<f64> = [(b00, 0), (b11, -1)]
                .iter()
                .filter(|(b, _)| *b < 0.0)
                .map(|&(b, k)| (-b * s / (PI * PI)).powf(1.0 / (2.0 * (k as f64 + alpha).abs())))
                .collect();
            expected.sort_by(f64::total_cmp);
            let found = bound_states(&beta, alpha, bracket).unwrap();
            count_ok &= found.states.len() == expected.len();
            for (st, ex) in found.states.iter().zip(&expected) {
                worst = worst.max((st.lambda - ex).abs() / ex.max(1.0));
            }
        }
    }
    for b01 in [Complex64::new(2.0, 0.0), Complex64::new(0.0, 5.0), Complex64::new(3.0, 4.0)] {
        let alpha = 0.5;
        let beta = HermitianCoupling::new(0.0, 0.0, b01);
        let expected = b01.norm() * (PI * alpha).sin() / (PI * PI);
        let found = bound_states(&beta, alpha, bracket).unwrap();
        count_ok &= found.states.len() == 1;
        if let Some(st) = found.states.first() {
            worst = worst.max((st.lambda - expected).abs() / expected.max(1.0));
            let m = extension_matrix(&beta, alpha, st.lambda).unwrap();
            let r = m.apply(st.charges);
            worst = worst.max((r[0].norm() + r[1].norm()) / m.norm());
        }
    }
    let friedrichs = bound_states(&HermitianCoupling::diagonal(1e12, 1e12), 0.5, bracket).unwrap();
    verdict(
        8,
        "bound-state closed forms",
        worst <= 1e-10 && count_ok && friedrichs.states.is_empty(),
        format!(
            "max rel root err {worst:.2e} (<= 1e-10), root counts ok = {count_ok}, huge beta gives {} states",
            friedrichs.states.len()
        ),
    );
}

#[test]
fn criterion_09_boundary_condition() {
    let radii = geometric_radii(1e-3, 20);
    let field = |r: f64| 0.5 * r;
    let grid = RadialGrid::standard(20.0, 800).unwrap();
    let mut eigen_traces = Vec::new();
    for alpha in [0.3, 0.5] {
        for k in [0, -1] {
            let op = assemble_mode_operator(k, alpha, &field, &grid).unwrap();
            let (_, y) = eigenvector(&op, 0).unwrap();
            let profile = profile_near_origin(&op, &y);
            let trace = boundary_trace(
                |r| {
                    let (f, df) = profile(r);
                    Ok((f.into(), df.into()))
                },
                k,
                alpha,
                &radii,
            )
            .unwrap();
            let (f_tiny, _) = profile(1e-12);
            eigen_traces.push((alpha, k, trace.value.norm(), 2.0 * op.nu * f_tiny / 1e-12f64.powf(op.nu)));
        }
    }
    let eigen_worst = eigen_traces.iter().map(|t| t.2).fold(0.0, f64::max);

    let mut model_worst: f64 = 0.0;
    for alpha in [0.2, 0.3, 0.5, 0.8] {
        for k in [0, -1] {
            let nu = (k as f64 + alpha).abs();
            for g0 in [1.0, -2.5] {
                let g = |r: f64| g0 * (-r).exp() * (1.0 + r * r);
                let dg = |r: f64| g0 * (-r).exp() * (2.0 * r - 1.0 - r * r);
                let trace = boundary_trace(
                    |r| Ok(((r.powf(nu) * g(r)).into(), (nu * r.powf(nu - 1.0) * g(r) + r.powf(nu) * dg(r)).into())),
                    k,
                    alpha,
                    &radii,
                )
                .unwrap();
                model_worst = model_worst.max((trace.value - 2.0 * nu * g0).norm());
            }
        }
    }
    let listing: Vec<String> =
        eigen_traces.iter().map(|(a, k, t, pred)| format!("({a},{k}): {t:.3e} vs 2nu w(0) = {pred:.3e}")).collect();
    verdict(
        9,
        "boundary trace of Friedrichs modes and of r^nu g",
        eigen_worst <= 1e-4 && model_worst <= 1e-6,
        format!(
            "Friedrichs-mode traces max {eigen_worst:.3e} (<= 1e-4) [{}]; r^nu g trace err {model_worst:.2e} (<= 1e-6)",
            listing.join("; ")
        ),
    );
}

#[test]
fn criterion_10_spectrum_anchors() {
    let grid = RadialGrid::standard(20.0, 800).unwrap();
    let field = |r: f64| 0.5 * r;
    let mut worst: f64 = 0.0;
    for (k, levels) in [(0, 3), (-1, 1), (-2, 1)] {
        let est = extrapolated_eigenvalues(k, 0.0, &field, &grid, levels).unwrap();
        for (n, e) in est.iter().enumerate() {
            worst = worst.max((e.value - oscillator_level(1.0, 0.0, k, n)).abs());
        }
    }
    let landau = worst;
    for alpha in [0.3, 0.5] {
        for k in [0, -1, 1] {
            let est = extrapolated_eigenvalues(k, alpha, &field, &grid, 2).unwrap();
            for (n, e) in est.iter().enumerate() {
                worst = worst.max((e.value - oscillator_level(1.0, alpha, k, n)).abs());
            }
        }
    }
    verdict(10, "Landau and flux-oscillator levels", worst <= 1e-3, format!("Landau max err {landau:.2e}, overall max err {worst:.2e} (<= 1e-3)"));
}

#[test]
fn criterion_11_vanishing_flux_limit() {
    let psi0 = GaussianMode::new(Complex64::new(1.0, 0.0), 0, 0.0, 1.0).unwrap();
    let study = gamma_recovery_study(&psi0, &FLUX_SEQUENCE, &PerturbationField::zero(), &GridSpec::coarse()).unwrap();
    let gaps_ok = study.gap_decreasing() && study.gap_ratio() <= 0.25;
    let singular_ok = study.rows.windows(2).all(|w| w[1].singular_norm < w[0].singular_norm)
        && study.rows.iter().all(|r| r.singular_norm <= r.singular_bound);
    let grid = RadialGrid::standard(12.0, 800).unwrap();
    let rows = resolvent_study(&FLUX_SEQUENCE, 0, Complex64::new(-1.0, 0.0), &|r| (-r * r / 2.0).exp(), &grid).unwrap();
    let resolvent_ratio = rows[4].relative_gap / rows[0].relative_gap;
    let resolvent_ok = rows.windows(2).all(|w| w[1].relative_gap < w[0].relative_gap) && resolvent_ratio <= 0.25;
    let singular: Vec<String> = study.rows.iter().map(|r| format!("{:.2e}<={:.2e}", r.singular_norm, r.singular_bound)).collect();
    verdict(
        11,
        "Gamma gap, resolvent error and singular norm",
        gaps_ok && singular_ok && resolvent_ok,
        format!(
            "gap ratio {:.3e}, resolvent ratio {resolvent_ratio:.3e} (both <= 0.25, decreasing: {}, {}), singular norms [{}]",
            study.gap_ratio(),
            study.gap_decreasing(),
            resolvent_ok,
            singular.join(", ")
        ),
    );
}

#[test]
fn criterion_12_selftest_and_determinism() {
    let bin = env!("CARGO_BIN_EXE_abq");
    let selftest = Command::new(bin).arg("selftest").output().unwrap();
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str, args: &[&str]| {
        let path = dir.path().join(name);
        let out = Command::new(bin).args(args).arg("-o").arg(&path).output().unwrap();
        assert!(out.status.success());
        std::fs::read(&path).unwrap()
    };
    let norms = ["norms", "--alphas", "0.3,0.7", "--lambdas", "0.5,1,2"];
    let spectrum = ["spectrum", "--alphas", "0.3,0.5", "--n", "400"];
    let identical = run("a.csv", &norms) == run("b.csv", &norms) && run("c.csv", &spectrum) == run("d.csv", &spectrum);
    verdict(
        12,
        "selftest and byte-identical CSV",
        selftest.status.success() && identical,
        format!("selftest exit {:?}, repeated CSV identical = {identical}", selftest.status.code()),
    );
}
