//! Friedrichs eigenvalues per angular mode in a homogeneous field, with
//! and without flux.

use abq_forms::spectral::{extrapolated_eigenvalues, observed_order, RadialGrid};

fn main() -> abq_forms::error::Result<()> {
    let b = 1.0;
    let field = move |r: f64| 0.5 * b * r;
    let grid = RadialGrid::standard(20.0, 800)?;
    for alpha in [0.0, 0.3, 0.5] {
        for k in [-1, 0, 1] {
            let levels = extrapolated_eigenvalues(k, alpha, &field, &grid, 3)?;
            let kappa = k as f64 + alpha;
            let line: Vec<String> = levels
                .iter()
                .enumerate()
                .map(|(n, e)| format!("{:.8} ({:.8})", e.value, b * (2.0 * n as f64 + kappa.abs() + kappa + 1.0)))
                .collect();
            println!("alpha {alpha}, k {k:>2}: {}", line.join("  "));
        }
    }
    let coarse = RadialGrid::standard(20.0, 200)?;
    println!("observed order at alpha 0.3: {:.3}", observed_order(0, 0.3, &field, &coarse)?);
    Ok(())
}
