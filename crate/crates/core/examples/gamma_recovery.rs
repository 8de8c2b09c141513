//! Recovery sequences `eta_alpha psi_0` and the vanishing-flux limit of
//! the Friedrichs form.

use num_complex::Complex64;

use abq_forms::fields::PerturbationField;
use abq_forms::forms::{GaussianMode, GridSpec};
use abq_forms::spectral::{gamma_recovery_study, singular_norm_without_profile};

fn main() -> abq_forms::error::Result<()> {
    let psi0 = GaussianMode::new(Complex64::new(1.0, 0.0), 0, 0.0, 1.0)?;
    println!("without a profile: {:?}", singular_norm_without_profile(&psi0, 0.1)?);
    let alphas = [0.2, 0.1, 0.05, 0.025, 0.0125];
    for field in [PerturbationField::zero(), PerturbationField::capped_homogeneous(1.0, 2.0)?] {
        let study = gamma_recovery_study(&psi0, &alphas, &field, &GridSpec::coarse())?;
        println!("field {}: Q_0[psi_0] = {:.10}", field.label(), study.q0);
        for r in &study.rows {
            println!(
                "  alpha {:<7} Q = {:.8}  gap {:.4e}  ||A eta psi||^2 {:.4e} <= {:.4e}  H1 gap {:.3e}",
                r.alpha, r.q_alpha, r.gap, r.singular_norm, r.singular_bound, r.h1_gap
            );
        }
        println!("  gap ratio last/first {:.3}", study.gap_ratio());
    }
    Ok(())
}
