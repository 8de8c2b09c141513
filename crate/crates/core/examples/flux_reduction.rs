//! Reducing an arbitrary flux to `alpha` in `(0, 1)`.

use abq_forms::fields::FluxParameter;

fn main() {
    for raw in [0.3, 2.7, -0.3, -3.6, 11.25, 4.0, 3.0] {
        match FluxParameter::reduce(raw) {
            Ok(f) => println!(
                "{raw:>6} -> alpha = {:.6}, ell = {:>2}, conjugated = {:<5} (round trip {})",
                f.alpha,
                f.ell,
                f.conjugated,
                f.original()
            ),
            Err(e) => println!("{raw:>6} -> {e}"),
        }
    }
}
