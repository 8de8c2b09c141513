//! Green functions of the two singular channels: profiles, small-r
//! expansion, defect residuals and L2 norms.

use abq_forms::greens::{
    defect_residual, green_asymptotic, green_norm_closed, green_norm_quadrature, GreenFunction, CHANNELS,
};

fn main() -> abq_forms::error::Result<()> {
    let alpha = 0.3;
    let lambda = 1.0;
    for k in CHANNELS {
        let g = GreenFunction::new(alpha, k, lambda)?;
        println!("k = {k}, order {:.2}", g.order());
        println!("  {:>8} {:>16} {:>16} {:>12} {:>10}", "r", "g(r)", "two-term", "remainder", "defect");
        for r in [1e-4, 1e-3, 1e-2, 0.1, 0.5] {
            let asym = green_asymptotic(alpha, k, lambda, r)?;
            println!(
                "  {r:>8.0e} {:>16.9e} {:>16.9e} {:>12.3e} {:>10.1e}",
                g.radial(r)?,
                asym.value,
                (g.radial(r)? - asym.value).abs(),
                defect_residual(alpha, k, lambda, r)?
            );
        }
        let closed = green_norm_closed(alpha, k, lambda)?;
        let quad = green_norm_quadrature(alpha, k, lambda, 1e-10)?;
        println!("  ||G||^2 closed {closed:.12} quadrature {:.12} (+- {:.1e})\n", quad.value, quad.error);
    }
    Ok(())
}
