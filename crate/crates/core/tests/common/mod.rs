//! Independent reference values shared by the integration tests.
#![allow(dead_code)]

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use abq_forms::fields::{Cutoff, PerturbationField};
use abq_forms::forms::{GaussianMode, HermitianCoupling, RegularPart, TrialFunction};

/// `K_nu(x) = int_0^inf exp(-x cosh t) cosh(nu t) dt`, by the trapezoid rule.
///
/// The integrand is analytic in the strip `|Im t| < pi/2` and decays
/// doubly exponentially, so the error of step `h` is of order `exp(-pi^2/h)`.
pub fn bessel_k_integral(nu: f64, x: f64) -> f64 {
    let end = (800.0 / x).max(1.0).acosh();
    let h = 0.005;
    let steps = (end / h).ceil() as usize;
    let mut sum = 0.5 * (-x).exp();
    for i in 1..=steps {
        let t = i as f64 * h;
        sum += (-x * t.cosh()).exp() * (nu * t).cosh();
    }
    sum * h
}

/// `K_{1/2}(x) = sqrt(pi / (2x)) e^{-x}`.
pub fn bessel_k_half(x: f64) -> f64 {
    (PI / (2.0 * x)).sqrt() * (-x).exp()
}

/// `pi^2 nu lambda^{2nu - 2} / sin(pi alpha)`.
pub fn green_norm_identity(alpha: f64, k: i32, lambda: f64) -> f64 {
    let nu = (k as f64 + alpha).abs();
    PI * PI * nu * lambda.powf(2.0 * nu - 2.0) / (PI * alpha).sin()
}

/// Least-squares slope of `log y` against `log x`.
pub fn log_log_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let lx: Vec<f64> = xs.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|v| v.ln()).collect();
    let n = lx.len() as f64;
    let (mx, my) = (lx.iter().sum::<f64>() / n, ly.iter().sum::<f64>() / n);
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = lx.iter().map(|a| (a - mx).powi(2)).sum();
    sxy / sxx
}

/// Oscillator reduction of the flux-plus-homogeneous-field levels.
pub fn oscillator_level(b: f64, alpha: f64, k: i32, n: usize) -> f64 {
    let kappa = k as f64 + alpha;
    b * (2.0 * n as f64 + kappa.abs() + kappa + 1.0)
}

/// A random trial function with smooth regular part, both charges and one
/// of three field shapes, plus a random Hermitian `beta`.
pub fn random_trial(rng: &mut ChaCha8Rng, lambda: f64) -> (TrialFunction, HermitianCoupling) {
    let alpha = rng.gen_range(0.15..0.85);
    let c = |rng: &mut ChaCha8Rng, scale: f64| Complex64::new(rng.gen_range(-scale..scale), rng.gen_range(-scale..scale));
    let charges = [c(rng, 1.0), c(rng, 1.0)];
    let field = match rng.gen_range(0..3) {
        0 => PerturbationField::zero(),
        1 => PerturbationField::capped_homogeneous(rng.gen_range(0.2..1.5), rng.gen_range(1.0..3.0)).unwrap(),
        _ => PerturbationField::sheared(rng.gen_range(0.2..1.0)).with_offset([rng.gen_range(-0.5..0.5), rng.gen_range(-0.5..0.5)]),
    };
    let mut regular = RegularPart::zero();
    for _ in 0..rng.gen_range(1..=2) {
        let m = rng.gen_range(-1..=1);
        let mode = GaussianMode::new(c(rng, 1.0), m, rng.gen_range(1.0..2.0), rng.gen_range(0.6..1.4)).unwrap();
        regular = regular.with_field(mode);
    }
    let beta = HermitianCoupling::new(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0), c(rng, 1.0));
    let psi = TrialFunction::new(alpha, lambda, charges, Cutoff::new(0.5, 1.5).unwrap(), field, regular).unwrap();
    (psi, beta)
}
