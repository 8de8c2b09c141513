//! Modified Bessel functions and the Gamma function against closed forms.

use std::f64::consts::PI;

use abq_forms::specfun::{bessel_k, bessel_k_derivative, bessel_k_reflection, gamma};

fn main() -> abq_forms::error::Result<()> {
    println!("{:>6} {:>22} {:>22} {:>10}", "x", "K_1/2(x)", "sqrt(pi/2x) e^-x", "rel err");
    for x in [0.01, 0.1, 1.0, 5.0, 20.0] {
        let exact = (PI / (2.0 * x)).sqrt() * (-x).exp();
        let k = bessel_k(0.5, x)?;
        println!("{x:>6} {k:>22.15e} {exact:>22.15e} {:>10.2e}", (k - exact).abs() / exact);
    }

    println!("\nseries and reflection routes for nu = 0.3:");
    for x in [0.05, 0.5, 1.5] {
        let a = bessel_k(0.3, x)?;
        let b = bessel_k_reflection(0.3, x)?;
        println!("  x = {x:<5} K = {a:.15e}  reflection = {b:.15e}  K' = {:.6e}", bessel_k_derivative(0.3, x)?);
    }

    println!("\nGamma reflection Gamma(v) Gamma(1 - v) sin(pi v) / pi:");
    for v in [0.1, 0.25, 0.5, 0.9] {
        println!("  v = {v:<4} -> {:.16}", gamma(v)? * gamma(1.0 - v)? * (PI * v).sin() / PI);
    }
    Ok(())
}
