//! Boundary traces of regular parts and the charges they determine.

use num_complex::Complex64;

use abq_forms::extensions::{boundary_trace, charge_solve, domain_condition_residual, geometric_radii, regular_traces};
use abq_forms::fields::{Cutoff, PerturbationField};
use abq_forms::forms::{GaussianMode, HermitianCoupling, RegularPart, TrialFunction};

fn main() -> abq_forms::error::Result<()> {
    let radii = geometric_radii(1e-3, 20);
    for alpha in [0.3, 0.5] {
        let nu = alpha;
        let trace = boundary_trace(
            |r| {
                let f = r.powf(nu) * (1.0 + r);
                let df = nu * r.powf(nu - 1.0) * (1.0 + r) + r.powf(nu);
                Ok((f.into(), df.into()))
            },
            0,
            alpha,
            &radii,
        )?;
        println!("r^nu (1 + r), alpha {alpha}: trace {:.10} (2 nu = {}), error {:.1e}", trace.value.re, 2.0 * nu, trace.error);
    }

    let c = Complex64::new;
    let regular = RegularPart::from_field(GaussianMode::new(c(1.0, 0.0), 0, 0.3, 1.0)?);
    let probe = TrialFunction::new(0.3, 1.0, [c(0.0, 0.0); 2], Cutoff::new(0.5, 1.5)?, PerturbationField::zero(), regular.clone())?;
    let traces = regular_traces(&probe)?;
    println!("regular part traces: t0 = {:.6}, t-1 = {:.6}", traces[0].value, traces[1].value);

    let beta = HermitianCoupling::diagonal(1.0, 2.0);
    let charges = charge_solve(&beta, 0.3, 1.0, [traces[0].value, traces[1].value])?;
    println!("charges solving the domain condition: q0 = {:.6}, q-1 = {:.6}", charges[0], charges[1]);
    let psi = TrialFunction::new(0.3, 1.0, charges, Cutoff::new(0.5, 1.5)?, PerturbationField::zero(), regular)?;
    let residual = domain_condition_residual(&psi, &beta)?;
    println!("domain condition residual: {:.1e}, {:.1e}", residual[0].norm(), residual[1].norm());
    Ok(())
}
