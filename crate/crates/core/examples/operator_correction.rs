//! Correction terms in the action of the extended operator on a trial
//! function carrying charges.

use num_complex::Complex64;

use abq_forms::extensions::hbeta_apply_correction;
use abq_forms::fields::{Cutoff, PerturbationField};
use abq_forms::forms::{RegularPart, TrialFunction};

fn main() -> abq_forms::error::Result<()> {
    let charges = [Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.5)];
    let points: Vec<[f64; 2]> = [0.1, 0.4, 0.8, 1.2, 1.6].iter().map(|&r| [r, 0.3 * r]).collect();
    for field in [PerturbationField::zero(), PerturbationField::homogeneous(1.0)] {
        let psi = TrialFunction::new(0.4, 1.0, charges, Cutoff::new(0.5, 1.5)?, field.clone(), RegularPart::zero())?;
        let values = hbeta_apply_correction(&psi, &points)?;
        println!("field {}:", field.label());
        for (x, v) in points.iter().zip(values) {
            println!("  x = ({:.2}, {:.2}): {:.6e}", x[0], x[1], v);
        }
    }
    Ok(())
}
