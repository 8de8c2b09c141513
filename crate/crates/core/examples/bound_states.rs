//! Negative eigenvalues of the unperturbed extensions from the roots of
//! `det M(lambda)`.

use std::f64::consts::PI;

use num_complex::Complex64;

use abq_forms::extensions::{bound_states, diagonal_roots, extension_matrix};
use abq_forms::forms::HermitianCoupling;

fn main() -> abq_forms::error::Result<()> {
    let cases = [
        ("s-wave attraction", 0.5, HermitianCoupling::diagonal(-PI * PI, PI * PI)),
        ("both channels", 0.3, HermitianCoupling::diagonal(-4.0, -20.0)),
        ("pure coupling", 0.5, HermitianCoupling::new(0.0, 0.0, Complex64::new(3.0, 4.0))),
        ("Friedrichs-like", 0.5, HermitianCoupling::diagonal(1e12, 1e12)),
        ("repulsive", 0.7, HermitianCoupling::diagonal(2.0, 3.0)),
    ];
    for (label, alpha, beta) in cases {
        let found = bound_states(&beta, alpha, (1e-3, 1e3))?;
        println!("{label} (alpha {alpha}): {} state(s)", found.states.len());
        for s in &found.states {
            let m = extension_matrix(&beta, alpha, s.lambda)?;
            println!(
                "  lambda* = {:.12}, E = {:.12}, charges = ({:.3}, {:.3}), |det M| = {:.1e}",
                s.lambda,
                s.energy,
                s.charges[0],
                s.charges[1],
                m.determinant().abs()
            );
        }
        if beta.b01 == Complex64::new(0.0, 0.0) {
            println!("  closed-form diagonal roots {:?}", diagonal_roots(&beta, alpha));
        }
        if let Some(w) = found.warning {
            println!("  note: {w}");
        }
    }
    Ok(())
}
