//! Invariant checks across every module, small enough to run in seconds.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use super::commands;
use super::config::RunConfig;
use crate::error::Result;
use crate::extensions::{bound_states, boundary_trace, geometric_radii};
use crate::fields::{Cutoff, FluxParameter, PerturbationField};
use crate::forms::{
    friedrichs_form, qbeta_eval, xi_matrix, GaussianMode, GridSpec, HermitianCoupling, RegularPart, TrialFunction,
};
use crate::greens::{green_asymptotic, green_norm_closed, green_norm_quadrature, radial_defect, GreenFunction};
use crate::specfun::{bessel_k, gamma};
use crate::spectral::{extrapolated_eigenvalues, gamma_recovery_study, resolvent_study, RadialGrid};

/// Outcome of one check: `value` is compared against `threshold`.
#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub value: f64,
    pub threshold: f64,
    pub passed: bool,
}

fn at_most(name: &'static str, value: f64, threshold: f64) -> Check {
    Check { name, value, threshold, passed: value <= threshold }
}

fn at_least(name: &'static str, value: f64, threshold: f64) -> Check {
    Check { name, value, threshold, passed: value >= threshold }
}

fn failed(name: &'static str) -> Check {
    Check { name, value: f64::NAN, threshold: f64::NAN, passed: false }
}

/// `int_0^inf exp(-x cosh t) cosh(nu t) dt` by the trapezoid rule, which
/// converges geometrically for this integrand.
fn k_by_trapezoid(nu: f64, x: f64) -> f64 {
    let end = (800.0 / x).acosh();
    let h = 0.01;
    let steps = (end / h).ceil() as usize;
    let mut sum = 0.5 * (-x).exp();
    for i in 1..=steps {
        let t = i as f64 * h;
        sum += (-x * t.cosh()).exp() * (nu * t).cosh();
    }
    sum * h
}

fn bessel_checks() -> Result<Vec<Check>> {
    let mut half: f64 = 0.0;
    for x in [0.01, 0.5, 3.0, 15.0] {
        let exact = (PI / (2.0 * x)).sqrt() * (-x).exp();
        half = half.max((bessel_k(0.5, x)? - exact).abs() / exact);
    }
    let mut oracle: f64 = 0.0;
    for i in 0..20 {
        let nu = 0.05 + 0.9 * ((i as f64 * 0.618_034) % 1.0);
        let x = 0.01 * (2000f64).powf((i as f64 * 0.414_214) % 1.0);
        let reference = k_by_trapezoid(nu, x);
        oracle = oracle.max((bessel_k(nu, x)? - reference).abs() / reference);
    }
    let mut gam: f64 = (gamma(0.5)? - PI.sqrt()).abs() / PI.sqrt();
    for nu in [0.1, 0.37, 0.5, 0.83] {
        let reflected = gamma(nu)? * gamma(1.0 - nu)? * (PI * nu).sin() / PI;
        gam = gam.max((reflected - 1.0).abs());
    }
    Ok(vec![
        at_most("specfun.k_half_closed_form", half, 1e-12),
        at_most("specfun.k_integral_oracle", oracle, 1e-10),
        at_most("specfun.gamma_reflection", gam, 1e-13),
    ])
}

fn flux_checks() -> Result<Vec<Check>> {
    let a = FluxParameter::reduce(2.7)?;
    let b = FluxParameter::reduce(-0.3)?;
    let gap = (a.alpha - 0.7).abs() + (b.alpha - 0.3).abs();
    let ok = a.ell == 1 && !a.conjugated && b.conjugated && gap < 1e-12;
    Ok(vec![Check { name: "fields.flux_reduction", value: gap, threshold: 1e-12, passed: ok }])
}

fn green_checks() -> Result<Vec<Check>> {
    let mut norm: f64 = 0.0;
    let mut defect: f64 = 0.0;
    let mut control = f64::INFINITY;
    let mut order_gap: f64 = 0.0;
    for alpha in [0.3, 0.5, 0.7] {
        for k in [0, -1] {
            let closed = green_norm_closed(alpha, k, 1.0)?;
            norm = norm.max((green_norm_quadrature(alpha, k, 1.0, 1e-10)?.value - closed).abs() / closed);
            let g = GreenFunction::new(alpha, k, 1.0)?;
            let nu = g.order();
            let mut worst_control: f64 = 0.0;
            for r in [0.05, 0.5, 2.0] {
                defect = defect.max(radial_defect(nu, nu, 1.0, r)?);
                worst_control = worst_control.max(radial_defect(nu + 0.05, nu, 1.0, r)?);
            }
            control = control.min(worst_control);
            let rem = |r: f64| -> Result<f64> { Ok((g.radial(r)? - green_asymptotic(alpha, k, 1.0, r)?.value).abs()) };
            let (r1, r2) = (1e-2, 1e-3);
            let slope = (rem(r1)? / rem(r2)?).ln() / (r1 / r2).ln();
            order_gap = order_gap.max((slope - (2.0 - nu)).abs());
        }
    }
    Ok(vec![
        at_most("greens.norm_identity", norm, 1e-7),
        at_most("greens.defect_residual", defect, 1e-7),
        at_least("greens.defect_negative_control", control, 1e-2),
        at_most("greens.asymptotic_order", order_gap, 0.05),
    ])
}

fn sample_trial(alpha: f64) -> Result<TrialFunction> {
    let c = Complex64::new;
    let field = PerturbationField::capped_homogeneous(0.6, 2.0)?.with_offset([0.2, 0.1]);
    let phi = RegularPart::from_field(GaussianMode::new(c(0.5, -0.2), 0, 1.0, 1.0)?)
        .with_field(GaussianMode::new(c(0.1, 0.3), -1, 1.0, 0.8)?);
    TrialFunction::new(alpha, 1.0, [c(0.7, 0.2), c(-0.3, 0.4)], Cutoff::new(0.5, 1.5)?, field, phi)
}

fn form_checks() -> Result<Vec<Check>> {
    let gauss = RegularPart::from_field(GaussianMode::new(Complex64::new(1.0, 0.0), 0, 0.0, 1.0)?);
    let q = friedrichs_form(&gauss, 0.0, &PerturbationField::zero(), &GridSpec::default())?.value;

    let psi = TrialFunction::new(
        0.3,
        1.0,
        [Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)],
        Cutoff::new(0.5, 1.5)?,
        PerturbationField::capped_homogeneous(1.0, 2.0)?,
        RegularPart::zero(),
    )?;
    let xi = xi_matrix(&psi, &GridSpec::default())?;
    let err01 = xi.errors[0][1] + xi.errors[1][0];
    let herm = xi.asymmetry() / (10.0 * err01).max(1e-300);
    let off = xi.entries[0][1].norm() / (10.0 * xi.errors[0][1]).max(1e-300);

    let beta = HermitianCoupling::new(0.2, -0.1, Complex64::new(0.05, -0.02));
    let trial = sample_trial(0.3)?;
    let grid = GridSpec::default();
    let base = qbeta_eval(&trial, &beta, &grid)?.value;
    let moved = qbeta_eval(&trial.change_lambda(2.0)?, &beta, &grid)?.value;
    let recut = qbeta_eval(&trial.change_cutoff(Cutoff::new(1.0, 3.0)?), &beta, &grid)?.value;
    let scale = base.abs().max(1.0);
    let invariance = ((base - moved).abs() / scale).max((base - recut).abs() / scale);
    Ok(vec![
        at_most("forms.gaussian_friedrichs", (q - PI).abs() / PI, 1e-10),
        at_most("forms.xi_hermitian_over_10err", herm, 1.0),
        at_most("forms.xi_offdiagonal_over_10err", off, 1.0),
        at_most("forms.lambda_cutoff_invariance", invariance, 1e-4),
    ])
}

fn extension_checks() -> Result<Vec<Check>> {
    let beta = HermitianCoupling::diagonal(-PI * PI, PI * PI);
    let found = bound_states(&beta, 0.5, (0.1, 10.0))?;
    let root = match found.states.as_slice() {
        [only] => (only.lambda - 1.0).abs(),
        _ => f64::INFINITY,
    };
    let friedrichs = bound_states(&HermitianCoupling::diagonal(1e12, 1e12), 0.5, (0.1, 10.0))?;
    let alpha = 0.3;
    let radii = geometric_radii(1e-2, 24);
    let trace = boundary_trace(
        |r| {
            let f = r.powf(alpha) * (1.0 + r * r);
            let df = alpha * r.powf(alpha - 1.0) * (1.0 + r * r) + 2.0 * r.powf(alpha + 1.0);
            Ok((f.into(), df.into()))
        },
        0,
        alpha,
        &radii,
    )?;
    Ok(vec![
        at_most("extensions.bound_state_root", root, 1e-10),
        Check {
            name: "extensions.friedrichs_limit_empty",
            value: friedrichs.states.len() as f64,
            threshold: 0.0,
            passed: friedrichs.states.is_empty(),
        },
        at_most("extensions.trace_of_r_pow_nu", (trace.value - 2.0 * alpha).norm(), 1e-6),
    ])
}

fn spectral_checks() -> Result<Vec<Check>> {
    let field = |r: f64| 0.5 * r;
    let grid = RadialGrid::standard(20.0, 400)?;
    let landau = extrapolated_eigenvalues(0, 0.0, &field, &grid, 1)?[0].value;
    let shifted = extrapolated_eigenvalues(0, 0.5, &field, &grid, 1)?[0].value;
    let study_grid = RadialGrid::standard(12.0, 400)?;
    let alphas = [0.2, 0.1, 0.05, 0.025, 0.0125];
    let rows = resolvent_study(&alphas, 0, Complex64::new(-1.0, 0.0), &|r| (-r * r / 2.0).exp(), &study_grid)?;
    let decreasing = rows.windows(2).all(|w| w[1].relative_gap < w[0].relative_gap);
    let ratio = rows[4].relative_gap / rows[0].relative_gap;
    let psi0 = GaussianMode::new(Complex64::new(1.0, 0.0), 0, 0.0, 1.0)?;
    let study = gamma_recovery_study(&psi0, &alphas, &PerturbationField::zero(), &GridSpec::coarse())?;
    Ok(vec![
        at_most("spectral.landau_level", (landau - 1.0).abs(), 1e-3),
        at_most("spectral.flux_oscillator_level", (shifted - 2.0).abs(), 1e-3),
        Check { name: "spectral.resolvent_ratio", value: ratio, threshold: 0.25, passed: decreasing && ratio <= 0.25 },
        Check {
            name: "spectral.gamma_gap_ratio",
            value: study.gap_ratio(),
            threshold: 0.25,
            passed: study.gap_decreasing() && study.gap_ratio() <= 0.25,
        },
    ])
}

fn determinism_check() -> Result<Vec<Check>> {
    let cfg = RunConfig { alphas: Some(vec![0.3, 0.7]), lambdas: Some(vec![0.5, 1.0]), ..RunConfig::default() };
    let first = commands::norms(&cfg)?.artifact.render();
    let second = commands::norms(&cfg)?.artifact.render();
    Ok(vec![Check {
        name: "cli.byte_identical_csv",
        value: if first == second { 0.0 } else { 1.0 },
        threshold: 0.0,
        passed: first == second,
    }])
}

type Group = (&'static str, fn() -> Result<Vec<Check>>);

/// Every check, in a fixed order. A group that errors counts as one failure.
pub fn run_checks() -> Vec<Check> {
    let groups: [Group; 7] = [
        ("specfun", bessel_checks),
        ("fields", flux_checks),
        ("greens", green_checks),
        ("forms", form_checks),
        ("extensions", extension_checks),
        ("spectral", spectral_checks),
        ("cli", determinism_check),
    ];
    groups
        .par_iter()
        .map(|(name, group)| group().unwrap_or_else(|_| vec![failed(name)]))
        .collect::<Vec<_>>()
        .into_iter()
        .flatten()
        .collect()
}
