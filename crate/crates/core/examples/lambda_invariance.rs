//! The extended form does not depend on the lambda or cutoff used to split
//! a trial function, and it is bounded below once lambda is large.

use num_complex::Complex64;

use abq_forms::fields::{Cutoff, PerturbationField};
use abq_forms::forms::{
    coercivity_sweep, qbeta_breakdown, GaussianMode, GridSpec, HermitianCoupling, RegularPart, TrialFunction,
};

fn main() -> abq_forms::error::Result<()> {
    let c = Complex64::new;
    let field = PerturbationField::capped_homogeneous(0.6, 2.0)?.with_offset([0.2, 0.1]);
    let regular = RegularPart::from_field(GaussianMode::new(c(0.5, -0.2), 0, 1.0, 1.0)?)
        .with_field(GaussianMode::new(c(0.1, 0.3), -1, 1.0, 0.8)?);
    let psi = TrialFunction::new(0.3, 1.0, [c(0.7, 0.2), c(-0.3, 0.4)], Cutoff::new(0.5, 1.5)?, field, regular)?;
    let beta = HermitianCoupling::new(0.2, -0.1, c(0.05, -0.02));
    let grid = GridSpec::default();

    for (label, rep) in [
        ("lambda 1, cutoff (0.5, 1.5)", psi.clone()),
        ("lambda 2, cutoff (0.5, 1.5)", psi.change_lambda(2.0)?),
        ("lambda 3, cutoff (0.5, 1.5)", psi.change_lambda(3.0)?),
        ("lambda 1, cutoff (1, 3)    ", psi.change_cutoff(Cutoff::new(1.0, 3.0)?)),
    ] {
        let b = qbeta_breakdown(&rep, &beta, &grid)?;
        println!(
            "{label}: Q = {:.12} (Friedrichs {:.6}, mass {:.6}, cross {:.6}, charges {:.6})",
            b.total, b.friedrichs, b.mass_shift, b.cross, b.charge_block
        );
    }

    let (rows, threshold) = coercivity_sweep(&[psi], &HermitianCoupling::diagonal(-5.0, -5.0), &[0.5, 2.0, 8.0, 16.0], &grid)?;
    for (lambda, value) in rows {
        println!("Q + lambda^2 ||psi||^2 at lambda {lambda:>4}: {value:.6}");
    }
    println!("positive from lambda = {threshold:?}");
    Ok(())
}
