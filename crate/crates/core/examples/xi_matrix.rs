//! The charge-block correction `Xi(lambda)` for an azimuthal and a
//! non-azimuthal field.

use num_complex::Complex64;

use abq_forms::fields::{Cutoff, PerturbationField};
use abq_forms::forms::{xi_matrix, GridSpec, RegularPart, TrialFunction};

fn main() -> abq_forms::error::Result<()> {
    let fields = [
        PerturbationField::capped_homogeneous(1.0, 2.0)?,
        PerturbationField::sheared(0.7).with_offset([0.3, -0.2]),
    ];
    for field in fields {
        println!("field {}", field.label());
        for lambda in [0.5, 1.0, 2.0] {
            let psi = TrialFunction::new(
                0.4,
                lambda,
                [Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)],
                Cutoff::new(0.5, 1.5)?,
                field.clone(),
                RegularPart::zero(),
            )?;
            let xi = xi_matrix(&psi, &GridSpec::default())?;
            println!(
                "  lambda {lambda}: Xi_00 = {:.8}, Xi_11 = {:.8}, Xi_01 = {:.3e}, asymmetry {:.1e}, null entry {:.1e}",
                xi.entries[0][0].re,
                xi.entries[1][1].re,
                xi.entries[0][1],
                xi.asymmetry(),
                xi.null_entry.norm()
            );
        }
    }
    Ok(())
}
