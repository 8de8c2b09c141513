//! Mode resolvents `(H_alpha + 1)^{-1} f` approach the flux-free one as
//! `alpha -> 0`.

use num_complex::Complex64;

use abq_forms::spectral::{resolvent_study, RadialGrid};

fn main() -> abq_forms::error::Result<()> {
    let grid = RadialGrid::standard(12.0, 800)?;
    let alphas = [0.2, 0.1, 0.05, 0.025, 0.0125];
    for k in [0, -1, 1] {
        let rows = resolvent_study(&alphas, k, Complex64::new(-1.0, 0.0), &|r| (-r * r / 2.0).exp(), &grid)?;
        println!("mode {k}:");
        for row in rows {
            println!("  alpha {:<7} relative gap {:.6e}  residual {:.1e}", row.alpha, row.relative_gap, row.residual);
        }
    }
    Ok(())
}
