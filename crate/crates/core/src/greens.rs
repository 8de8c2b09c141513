//! Defect Green functions `G_lambda^(k)(x) = lambda^nu K_nu(lambda r) e^{i k theta}`
//! with `nu = |k + alpha|` and `k` in `{0, -1}`.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fields::{check_alpha, Point};
use crate::quad::{integrate, Estimate};
use crate::specfun::{bessel_k, bessel_k_derivative, bessel_k_second_derivative, gamma};

/// The two angular channels carrying a singular defect.
pub const CHANNELS: [i32; 2] = [0, -1];

/// Order `|k + alpha|` of the Bessel function in channel `k`.
pub fn channel_order(alpha: f64, k: i32) -> f64 {
    (k as f64 + alpha).abs()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GreenFunction {
    pub alpha: f64,
    pub k: i32,
    pub lambda: f64,
    nu: f64,
    leading: f64,
    prefactor: f64,
}

impl GreenFunction {
    pub fn new(alpha: f64, k: i32, lambda: f64) -> Result<Self> {
        check_alpha(alpha)?;
        if !CHANNELS.contains(&k) {
            return Err(Error::InvalidInput(format!("channel must be 0 or -1, got {k}")));
        }
        if !(lambda > 0.0 && lambda.is_finite()) {
            return Err(Error::InvalidInput(format!("lambda must be positive, got {lambda}")));
        }
        let nu = channel_order(alpha, k);
        Ok(GreenFunction {
            alpha,
            k,
            lambda,
            nu,
            leading: gamma(nu)? * 2f64.powf(nu - 1.0),
            prefactor: PI / (2.0 * (PI * nu).sin()),
        })
    }

    pub fn order(&self) -> f64 {
        self.nu
    }

    /// Coefficient of `r^{-nu}` in the small-r expansion.
    pub fn leading_coefficient(&self) -> f64 {
        self.leading
    }

    /// Coefficient of `r^{nu}` in the small-r expansion.
    pub fn subleading_coefficient(&self) -> f64 {
        gamma(-self.nu).expect("order is not an integer") * 2f64.powf(-1.0 - self.nu) * self.lambda.powf(2.0 * self.nu)
    }

    fn check_radius(r: f64) -> Result<()> {
        if r > 0.0 && r.is_finite() {
            Ok(())
        } else if r == 0.0 {
            Err(Error::OriginSingularity)
        } else {
            Err(Error::domain("green function", format!("radius {r} must be positive")))
        }
    }

    /// `g(r) = lambda^nu K_nu(lambda r)`.
    pub fn radial(&self, r: f64) -> Result<f64> {
        Self::check_radius(r)?;
        Ok(self.lambda.powf(self.nu) * bessel_k(self.nu, self.lambda * r)?)
    }

    /// `g'(r)`.
    pub fn radial_derivative(&self, r: f64) -> Result<f64> {
        Self::check_radius(r)?;
        Ok(self.lambda.powf(self.nu + 1.0) * bessel_k_derivative(self.nu, self.lambda * r)?)
    }

    /// `g''(r)`.
    pub fn radial_second_derivative(&self, r: f64) -> Result<f64> {
        Self::check_radius(r)?;
        Ok(self.lambda.powf(self.nu + 2.0) * bessel_k_second_derivative(self.nu, self.lambda * r)?)
    }

    /// `(g(r) - c r^{-nu}, d/dr of the same)` where `c` is the leading coefficient.
    ///
    /// The subtraction is carried out analytically below `lambda r = 2`, so
    /// differences of Green functions with different `lambda` stay accurate
    /// arbitrarily close to the origin.
    pub fn regular_part(&self, r: f64) -> Result<(f64, f64)> {
        Self::check_radius(r)?;
        let x = self.lambda * r;
        if x > 2.0 {
            let sing = self.leading * r.powf(-self.nu);
            return Ok((self.radial(r)? - sing, self.radial_derivative(r)? + self.nu * sing / r));
        }
        let nu = self.nu;
        let q = 0.25 * x * x;
        let mut minus_term = 1.0 / gamma(1.0 - nu)?;
        let mut plus_term = 1.0 / gamma(1.0 + nu)?;
        let mut minus_sum = 0.0;
        let mut minus_deriv = 0.0;
        let mut plus_sum = plus_term;
        let mut plus_deriv = plus_term * nu;
        for j in 1..200 {
            let fj = j as f64;
            minus_term *= q / (fj * (fj - nu));
            plus_term *= q / (fj * (fj + nu));
            minus_sum += minus_term;
            minus_deriv += minus_term * (2.0 * fj - nu);
            plus_sum += plus_term;
            plus_deriv += plus_term * (2.0 * fj + nu);
            if minus_term.abs() < 1e-17 * minus_sum.abs() && plus_term.abs() < 1e-17 * plus_sum.abs() {
                break;
            }
        }
        let lower = 2f64.powf(nu) * r.powf(-nu);
        let upper = self.lambda.powf(2.0 * nu) * 2f64.powf(-nu) * r.powf(nu);
        let value = self.prefactor * (lower * minus_sum - upper * plus_sum);
        let deriv = self.prefactor * (lower * minus_deriv - upper * plus_deriv) / r;
        Ok((value, deriv))
    }

    /// `G(x)`.
    pub fn eval(&self, x: Point) -> Result<Complex64> {
        let r = x[0].hypot(x[1]);
        Ok(self.radial(r)? * phase(self.k, x, r))
    }

    /// `grad G(x)` as a pair of complex components.
    pub fn gradient(&self, x: Point) -> Result<[Complex64; 2]> {
        let r = x[0].hypot(x[1]);
        let g = self.radial(r)?;
        let dg = self.radial_derivative(r)?;
        Ok(radial_mode_gradient(self.k, x, r, g, dg))
    }
}

/// `e^{i k theta}` at `x`, with `r = |x|`.
pub(crate) fn phase(k: i32, x: Point, r: f64) -> Complex64 {
    let unit = Complex64::new(x[0] / r, x[1] / r);
    match k {
        0 => Complex64::new(1.0, 0.0),
        -1 => unit.conj(),
        _ => unit.powi(k),
    }
}

/// Gradient of `f(r) e^{i k theta}` from `f` and `f'`.
pub(crate) fn radial_mode_gradient(k: i32, x: Point, r: f64, f: f64, df: f64) -> [Complex64; 2] {
    let ph = phase(k, x, r);
    let (c, s) = (x[0] / r, x[1] / r);
    let radial = df * ph;
    let angular = Complex64::new(0.0, k as f64 * f / r) * ph;
    [radial * c - angular * s, radial * s + angular * c]
}

/// `G_lambda^(k)(x)`.
pub fn green_eval(alpha: f64, k: i32, lambda: f64, x: Point) -> Result<Complex64> {
    GreenFunction::new(alpha, k, lambda)?.eval(x)
}

/// `||G_lambda^(k)||^2 = pi^2 nu lambda^{2 nu - 2} / sin(pi alpha)`.
pub fn green_norm_closed(alpha: f64, k: i32, lambda: f64) -> Result<f64> {
    let g = GreenFunction::new(alpha, k, lambda)?;
    let nu = g.order();
    Ok(PI * PI * nu * lambda.powf(2.0 * nu - 2.0) / (PI * alpha).sin())
}

/// `||G_lambda^(k)||^2` by adaptive quadrature of `2 pi int r g(r)^2 dr`.
pub fn green_norm_quadrature(alpha: f64, k: i32, lambda: f64, rel_tol: f64) -> Result<Estimate<f64>> {
    let g = GreenFunction::new(alpha, k, lambda)?;
    if !(rel_tol > 0.0) {
        return Err(Error::InvalidInput(format!("relative tolerance must be positive, got {rel_tol}")));
    }
    let nu = g.order();
    let rel = (0.01 * rel_tol).max(1e-13);
    let reach = 30.0;
    let inner = 1e-3;
    let power = 1.0 / (2.0 - 2.0 * nu);
    let density = |x: f64| -> f64 {
        let kx = bessel_k(nu, x).unwrap_or(f64::NAN);
        x * kx * kx
    };
    let core = integrate(
        |u: f64| {
            let x = inner * u.powf(power);
            if x == 0.0 {
                return 0.0;
            }
            density(x) * inner * power * u.powf(power - 1.0)
        },
        0.0,
        1.0,
        rel,
        0.0,
    )?;
    let mut points = vec![inner];
    while *points.last().unwrap() < reach {
        let next = (points.last().unwrap() * 2.0).min(reach);
        points.push(next);
    }
    let body = crate::quad::integrate_segments(density, &points, rel, 0.0)?;
    let tail = PI / 4.0 * (-2.0 * reach).exp() * (1.0 + 1.0 / reach).powi(2);
    let scale = 2.0 * PI * lambda.powf(2.0 * nu - 2.0);
    let value = scale * (core.value + body.value);
    if !value.is_finite() {
        return Err(Error::no_convergence("green norm quadrature", format!("alpha = {alpha}, k = {k}")));
    }
    Ok(Estimate { value, error: scale * (core.error + body.error + tail) })
}

/// Two-term small-r expansion of the radial profile.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Asymptotic {
    /// `c_- r^{-nu} + c_+ r^{nu}`.
    pub value: f64,
    /// Size of the first omitted term, of order `r^{2 - nu}`.
    pub remainder: f64,
}

/// Two-term expansion of `lambda^nu K_nu(lambda r)`, valid for `lambda r < 1`.
pub fn green_asymptotic(alpha: f64, k: i32, lambda: f64, r: f64) -> Result<Asymptotic> {
    let g = GreenFunction::new(alpha, k, lambda)?;
    GreenFunction::check_radius(r)?;
    if lambda * r >= 1.0 {
        return Err(Error::AsymptoticRange(lambda * r));
    }
    let nu = g.order();
    let lead = g.leading_coefficient() * r.powf(-nu);
    let value = lead + g.subleading_coefficient() * r.powf(nu);
    let remainder = lead * (lambda * r).powi(2) / (4.0 * (1.0 - nu));
    Ok(Asymptotic { value, remainder })
}

/// Relative residual of `-f'' - f'/r + (nu_eq^2/r^2 + lambda^2) f` for
/// `f = lambda^nu K_nu(lambda r)`.
pub fn radial_defect(nu_function: f64, nu_equation: f64, lambda: f64, r: f64) -> Result<f64> {
    GreenFunction::check_radius(r)?;
    let x = lambda * r;
    let f = lambda.powf(nu_function) * bessel_k(nu_function, x)?;
    let d1 = lambda.powf(nu_function + 1.0) * bessel_k_derivative(nu_function, x)?;
    let d2 = lambda.powf(nu_function + 2.0) * bessel_k_second_derivative(nu_function, x)?;
    let potential = nu_equation * nu_equation / (r * r) + lambda * lambda;
    let residual = -d2 - d1 / r + potential * f;
    let scale = d2.abs() + (d1 / r).abs() + (potential * f).abs();
    Ok(residual.abs() / scale)
}

/// Relative defect residual of `G_lambda^(k)` at radius `r`.
pub fn defect_residual(alpha: f64, k: i32, lambda: f64, r: f64) -> Result<f64> {
    let nu = GreenFunction::new(alpha, k, lambda)?.order();
    radial_defect(nu, nu, lambda, r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn half_flux_closed_form() {
        let g = green_eval(0.5, 0, 1.0, [1.0, 0.0]).unwrap();
        assert_relative_eq!(g.re, (PI / 2.0).sqrt() * (-1.0f64).exp(), max_relative = 1e-13);
        assert_eq!(g.im, 0.0);
        let g = green_eval(0.5, -1, 1.0, [0.0, 1.0]).unwrap();
        assert_relative_eq!(g.im, -(PI / 2.0).sqrt() * (-1.0f64).exp(), max_relative = 1e-13);
    }

    #[test]
    fn norm_examples() {
        assert_relative_eq!(green_norm_closed(0.5, 0, 1.0).unwrap(), PI * PI / 2.0, max_relative = 1e-14);
        assert_relative_eq!(green_norm_closed(0.5, -1, 2.0).unwrap(), PI * PI / 4.0, max_relative = 1e-14);
        let q = green_norm_quadrature(0.3, -1, 1.5, 1e-10).unwrap();
        assert_relative_eq!(q.value, green_norm_closed(0.3, -1, 1.5).unwrap(), max_relative = 1e-9);
    }

    #[test]
    fn origin_and_channel_errors() {
        assert!(matches!(green_eval(0.3, 0, 1.0, [0.0, 0.0]), Err(Error::OriginSingularity)));
        assert!(GreenFunction::new(0.3, 1, 1.0).is_err());
        assert!(GreenFunction::new(1.3, 0, 1.0).is_err());
        assert!(matches!(green_asymptotic(0.3, 0, 1.0, 1.0), Err(Error::AsymptoticRange(_))));
    }

    #[test]
    fn regular_part_matches_direct_subtraction() {
        for &(alpha, k) in &[(0.3, 0), (0.3, -1), (0.5, 0), (0.8, -1)] {
            let g = GreenFunction::new(alpha, k, 1.7).unwrap();
            for &r in &[0.05, 0.3, 1.0, 1.1, 1.2, 3.0] {
                let (v, d) = g.regular_part(r).unwrap();
                let sing = g.leading_coefficient() * r.powf(-g.order());
                assert_relative_eq!(v + sing, g.radial(r).unwrap(), max_relative = 1e-12);
                let ds = -g.order() * sing / r;
                assert_relative_eq!(d + ds, g.radial_derivative(r).unwrap(), max_relative = 1e-11);
            }
        }
    }

    #[test]
    fn regular_part_tends_to_subleading_term() {
        let g = GreenFunction::new(0.3, -1, 2.0).unwrap();
        let r: f64 = 1e-12;
        let (v, _) = g.regular_part(r).unwrap();
        assert_relative_eq!(v, g.subleading_coefficient() * r.powf(g.order()), max_relative = 1e-6);
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let g = GreenFunction::new(0.3, -1, 1.3).unwrap();
        let x = [0.4, -0.7];
        let grad = g.gradient(x).unwrap();
        let h = 1e-6;
        for axis in 0..2 {
            let mut p = x;
            let mut m = x;
            p[axis] += h;
            m[axis] -= h;
            let fd = (g.eval(p).unwrap() - g.eval(m).unwrap()) / (2.0 * h);
            assert!((fd - grad[axis]).norm() < 1e-7 * grad[axis].norm().max(1.0));
        }
    }

    #[test]
    fn asymptotic_remainder_estimate_is_sharp() {
        let g = GreenFunction::new(0.4, 0, 1.0).unwrap();
        let r = 1e-3;
        let a = green_asymptotic(0.4, 0, 1.0, r).unwrap();
        let actual = g.radial(r).unwrap() - a.value;
        assert_relative_eq!(actual, a.remainder, max_relative = 1e-2);
    }

    #[test]
    fn defect_residual_is_small_and_control_is_not() {
        for &r in &[0.01, 0.5, 2.0, 7.0] {
            assert!(defect_residual(0.3, 0, 1.0, r).unwrap() < 1e-10);
        }
        let perturbed = (0.09f64 + 0.1).sqrt();
        assert!(radial_defect(0.3, perturbed, 1.0, 1.0).unwrap() > 1e-2);
    }
}
