//! Gamma function and modified Bessel functions of the second kind.
//!
//! `bessel_k` evaluates `K_nu(x)` for fractional orders `0 < nu < 2` and
//! positive arguments. Small arguments use Temme's form of the series
//! `pi (I_{-mu} - I_mu) / (2 sin(pi mu))`, which stays finite when `mu`
//! approaches an integer; large arguments use Steed's continued fraction.
//! Both return the pair `(K_mu, K_{mu+1})` for `|mu| <= 1/2` and the
//! requested order is reached by forward recurrence.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::tolerances::Tolerances;

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

/// Taylor coefficients of `1/Gamma(z) = sum_k c_k z^k`, starting at `k = 1`.
const RGAMMA_TAYLOR: [f64; 26] = [
    1.0,
    0.5772156649015329,
    -0.6558780715202539,
    -0.04200263503409524,
    0.16653861138229148,
    -0.04219773455554433,
    -0.009621971527876973,
    0.0072189432466631,
    -0.0011651675918590652,
    -0.00021524167411495098,
    0.0001280502823881162,
    -2.013485478078824e-05,
    -1.2504934821426706e-06,
    1.133027231981696e-06,
    -2.056338416977607e-07,
    6.116095104481416e-09,
    5.002007644469223e-09,
    -1.18127457048702e-09,
    1.0434267116911005e-10,
    7.782263439905071e-12,
    -3.696805618642206e-12,
    5.100370287454476e-13,
    -2.0583260535665066e-14,
    -5.348122539423018e-15,
    1.2267786282382608e-15,
    -1.1812593016974588e-16,
];

/// Gamma function on the real line (Lanczos approximation with reflection).
pub fn gamma(x: f64) -> Result<f64> {
    if !x.is_finite() {
        return Err(Error::domain("gamma", format!("non-finite argument {x}")));
    }
    if x <= 0.0 && x == x.round() {
        return Err(Error::GammaPole(x));
    }
    Ok(gamma_unchecked(x))
}

fn gamma_unchecked(x: f64) -> f64 {
    if x < 0.5 {
        PI / ((PI * x).sin() * gamma_unchecked(1.0 - x))
    } else {
        let z = x - 1.0;
        let mut acc = LANCZOS[0];
        for (i, c) in LANCZOS.iter().enumerate().skip(1) {
            acc += c / (z + i as f64);
        }
        let t = z + LANCZOS_G + 0.5;
        (2.0 * PI).sqrt() * t.powf(z + 0.5) * (-t).exp() * acc
    }
}

/// Temme's auxiliary values for `|mu| <= 1/2`:
/// `(gamma1, gamma2, 1/Gamma(1+mu), 1/Gamma(1-mu))`.
fn temme_gammas(mu: f64) -> (f64, f64, f64, f64) {
    let mu2 = mu * mu;
    let mut even = 0.0;
    let mut odd = 0.0;
    let mut pow = 1.0;
    for pair in RGAMMA_TAYLOR.chunks(2) {
        odd += pair[0] * pow;
        even += pair[1] * pow;
        pow *= mu2;
    }
    let gam1 = -even;
    let gam2 = odd;
    (gam1, gam2, gam2 - mu * gam1, gam2 + mu * gam1)
}

fn temme_series(mu: f64, x: f64, tol: &Tolerances) -> Result<(f64, f64)> {
    let (gam1, gam2, gampl, gammi) = temme_gammas(mu);
    let half = 0.5 * x;
    let pimu = PI * mu;
    let fact = if pimu.abs() < 1e-300 { 1.0 } else { pimu / pimu.sin() };
    let d = -half.ln();
    let e = mu * d;
    let fact2 = if e.abs() < 1e-300 { 1.0 } else { e.sinh() / e };
    let mut ff = fact * (gam1 * e.cosh() + gam2 * fact2 * d);
    let mut sum = ff;
    let ee = e.exp();
    let mut p = 0.5 * ee / gampl;
    let mut q = 0.5 / (ee * gammi);
    let mut c = 1.0;
    let quarter = half * half;
    let mut sum1 = p;
    for i in 1..=tol.bessel_max_terms {
        let fi = i as f64;
        ff = (fi * ff + p + q) / (fi * fi - mu * mu);
        c *= quarter / fi;
        p /= fi - mu;
        q /= fi + mu;
        let del = c * ff;
        sum += del;
        sum1 += c * (p - fi * ff);
        if del.abs() < sum.abs() * tol.bessel_eps {
            return Ok((sum, sum1 * 2.0 / x));
        }
    }
    Err(Error::no_convergence("bessel_k series", format!("mu = {mu}, x = {x}")))
}

fn steed_fraction(mu: f64, x: f64, tol: &Tolerances) -> Result<(f64, f64)> {
    let a1 = 0.25 - mu * mu;
    let mut b = 2.0 * (1.0 + x);
    let mut d = 1.0 / b;
    let mut h = d;
    let mut delh = d;
    let mut q1 = 0.0;
    let mut q2 = 1.0;
    let mut q = a1;
    let mut c = a1;
    let mut a = -a1;
    let mut s = 1.0 + q * delh;
    let mut converged = false;
    for i in 2..=tol.bessel_max_terms {
        a -= 2.0 * (i - 1) as f64;
        c = -a * c / i as f64;
        let qnew = (q1 - b * q2) / a;
        q1 = q2;
        q2 = qnew;
        q += c * qnew;
        b += 2.0;
        d = 1.0 / (b + a * d);
        delh *= b * d - 1.0;
        h += delh;
        let dels = q * delh;
        s += dels;
        if (dels / s).abs() < tol.bessel_eps {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::no_convergence("bessel_k continued fraction", format!("mu = {mu}, x = {x}")));
    }
    h *= a1;
    let kmu = (PI / (2.0 * x)).sqrt() * (-x).exp() / s;
    let k1 = kmu * (mu + x + 0.5 - h) / x;
    Ok((kmu, k1))
}

fn raise_order(nu: f64, x: f64, base: impl Fn(f64) -> Result<(f64, f64)>) -> Result<(f64, f64)> {
    let steps = (nu + 0.5).floor();
    let mu = nu - steps;
    let (mut k0, mut k1) = base(mu)?;
    for i in 1..=steps as usize {
        let next = (mu + i as f64) * (2.0 / x) * k1 + k0;
        k0 = k1;
        k1 = next;
    }
    Ok((k0, k1))
}

fn check_argument(func: &'static str, nu: f64, x: f64, max_order: f64) -> Result<()> {
    if !(nu >= 0.0 && nu < max_order) {
        return Err(Error::domain(func, format!("order {nu} outside [0, {max_order})")));
    }
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::domain(func, format!("argument {x} must be positive and finite")));
    }
    Ok(())
}

/// `(K_nu(x), K_{nu+1}(x))` from the series route, for any `nu >= 0`.
pub fn bessel_k_series(nu: f64, x: f64) -> Result<(f64, f64)> {
    check_argument("bessel_k_series", nu, x, f64::INFINITY)?;
    let tol = Tolerances::DEFAULT;
    raise_order(nu, x, |mu| temme_series(mu, x, &tol))
}

/// `(K_nu(x), K_{nu+1}(x))` from the continued-fraction route, for any `nu >= 0`.
pub fn bessel_k_continued_fraction(nu: f64, x: f64) -> Result<(f64, f64)> {
    check_argument("bessel_k_continued_fraction", nu, x, f64::INFINITY)?;
    let tol = Tolerances::DEFAULT;
    raise_order(nu, x, |mu| steed_fraction(mu, x, &tol))
}

/// `K_nu(x)` and `K_{nu+1}(x)` for any non-negative order.
pub(crate) fn bessel_k_pair(nu: f64, x: f64) -> Result<(f64, f64)> {
    if x <= Tolerances::DEFAULT.bessel_crossover {
        bessel_k_series(nu, x)
    } else {
        bessel_k_continued_fraction(nu, x)
    }
}

/// Modified Bessel function of the second kind `K_nu(x)`, `0 < nu < 2`, `x > 0`.
pub fn bessel_k(nu: f64, x: f64) -> Result<f64> {
    if nu == 0.0 {
        return Err(Error::domain("bessel_k", "order must be positive"));
    }
    check_argument("bessel_k", nu, x, 2.0)?;
    Ok(bessel_k_pair(nu, x)?.0)
}

/// Literal reflection series `pi (I_{-nu} - I_nu) / (2 sin(pi nu))` for `0 < nu < 1`.
///
/// Accurate for moderate arguments and orders away from 0 and 1.
pub fn bessel_k_reflection(nu: f64, x: f64) -> Result<f64> {
    if !(nu > 0.0 && nu < 1.0) {
        return Err(Error::domain("bessel_k_reflection", format!("order {nu} outside (0, 1)")));
    }
    check_argument("bessel_k_reflection", nu, x, 1.0)?;
    let i_minus = bessel_i_series(-nu, x)?;
    let i_plus = bessel_i_series(nu, x)?;
    Ok(PI * (i_minus - i_plus) / (2.0 * (PI * nu).sin()))
}

/// Power series of `I_order(x)` for real `order > -1`.
pub fn bessel_i_series(order: f64, x: f64) -> Result<f64> {
    let tol = Tolerances::DEFAULT;
    let half = 0.5 * x;
    let mut term = half.powf(order) / gamma(1.0 + order)?;
    let mut sum = term;
    let quarter = half * half;
    for j in 1..=tol.bessel_max_terms {
        let fj = j as f64;
        term *= quarter / (fj * (fj + order));
        sum += term;
        if j >= 30 && term.abs() <= sum.abs() * tol.bessel_eps {
            return Ok(sum);
        }
    }
    Err(Error::no_convergence("bessel_i series", format!("order = {order}, x = {x}")))
}

/// `dK_nu/dx` through `K'_nu = -(K_{nu-1} + K_{nu+1}) / 2`.
pub fn bessel_k_derivative(nu: f64, x: f64) -> Result<f64> {
    let k = bessel_k(nu, x)?;
    let below = bessel_k_pair((nu - 1.0).abs(), x)?.0;
    let above = below + 2.0 * nu / x * k;
    Ok(-0.5 * (below + above))
}

/// `d^2K_nu/dx^2` through `K''_nu = (K_{nu-2} + 2 K_nu + K_{nu+2}) / 4`.
pub fn bessel_k_second_derivative(nu: f64, x: f64) -> Result<f64> {
    let k = bessel_k(nu, x)?;
    let below = bessel_k_pair((nu - 1.0).abs(), x)?.0;
    let above = below + 2.0 * nu / x * k;
    let below2 = k - 2.0 * (nu - 1.0) / x * below;
    let above2 = k + 2.0 * (nu + 1.0) / x * above;
    Ok(0.25 * (below2 + 2.0 * k + above2))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn gamma_known_values() {
        assert_relative_eq!(gamma(0.5).unwrap(), PI.sqrt(), max_relative = 1e-14);
        assert_relative_eq!(gamma(5.0).unwrap(), 24.0, max_relative = 1e-14);
        assert_relative_eq!(gamma(1.0).unwrap(), 1.0, max_relative = 1e-14);
        assert_relative_eq!(gamma(-0.5).unwrap(), -2.0 * PI.sqrt(), max_relative = 1e-14);
        assert_relative_eq!(gamma(0.1).unwrap(), 9.513_507_698_668_732, max_relative = 1e-13);
    }

    #[test]
    fn gamma_poles_rejected() {
        for x in [0.0, -1.0, -2.0, -7.0] {
            assert!(matches!(gamma(x), Err(Error::GammaPole(_))));
        }
    }

    #[test]
    fn temme_gammas_match_lanczos() {
        for i in 0..=20 {
            let mu = -0.5 + i as f64 * 0.05;
            let (_, _, gampl, gammi) = temme_gammas(mu);
            assert_relative_eq!(gampl, 1.0 / gamma(1.0 + mu).unwrap(), max_relative = 1e-14);
            assert_relative_eq!(gammi, 1.0 / gamma(1.0 - mu).unwrap(), max_relative = 1e-14);
        }
    }

    #[test]
    fn half_order_closed_form() {
        for &x in &[0.01, 0.3, 1.0, 1.9, 2.1, 5.0, 20.0] {
            let exact = (PI / (2.0 * x)).sqrt() * (-x).exp();
            assert_relative_eq!(bessel_k(0.5, x).unwrap(), exact, max_relative = 1e-13);
            let exact_d = -exact * (1.0 + 1.0 / (2.0 * x));
            assert_relative_eq!(bessel_k_derivative(0.5, x).unwrap(), exact_d, max_relative = 1e-12);
        }
    }

    #[test]
    fn series_and_fraction_agree_on_crossover_band() {
        for i in 0..=20 {
            let x = 1.5 + i as f64 * 0.05;
            for j in 1..40 {
                let nu = j as f64 * 0.049;
                let (a, _) = bessel_k_series(nu, x).unwrap();
                let (b, _) = bessel_k_continued_fraction(nu, x).unwrap();
                assert_relative_eq!(a, b, max_relative = 1e-12);
            }
        }
    }

    #[test]
    fn reflection_series_matches_temme() {
        for &x in &[0.01, 0.2, 1.0, 2.0] {
            for &nu in &[0.1, 0.3, 0.5, 0.77, 0.9] {
                assert_relative_eq!(
                    bessel_k_reflection(nu, x).unwrap(),
                    bessel_k(nu, x).unwrap(),
                    max_relative = 1e-12
                );
            }
        }
    }

    #[test]
    fn domain_errors() {
        assert!(bessel_k(0.3, 0.0).is_err());
        assert!(bessel_k(0.3, -1.0).is_err());
        assert!(bessel_k(2.0, 1.0).is_err());
        assert!(bessel_k(0.0, 1.0).is_err());
    }

    #[test]
    fn small_argument_leading_term() {
        for &nu in &[0.4, 0.6, 0.9, 1.3, 1.8] {
            let x: f64 = 1e-8;
            let lead = gamma(nu).unwrap() * 2f64.powf(nu - 1.0);
            assert_relative_eq!(bessel_k(nu, x).unwrap() * x.powf(nu), lead, max_relative = 1e-6);
        }
    }

    #[test]
    fn small_argument_two_term_law() {
        for &nu in &[0.05, 0.1, 0.2, 0.3] {
            let x: f64 = 1e-6;
            let two_term = gamma(nu).unwrap() * 2f64.powf(nu - 1.0) * x.powf(-nu)
                + gamma(-nu).unwrap() * 2f64.powf(-nu - 1.0) * x.powf(nu);
            assert_relative_eq!(bessel_k(nu, x).unwrap(), two_term, max_relative = 1e-10);
        }
    }

    #[test]
    fn order_one_neighbourhood_is_smooth() {
        let x = 0.7;
        let below = bessel_k(1.0 - 1e-9, x).unwrap();
        let at = bessel_k(1.0, x).unwrap();
        let above = bessel_k(1.0 + 1e-9, x).unwrap();
        assert_relative_eq!(below, at, max_relative = 1e-8);
        assert_relative_eq!(above, at, max_relative = 1e-8);
        assert_relative_eq!(at, 1.050_283_535_312_918, max_relative = 1e-11);
    }

    #[test]
    fn second_derivative_satisfies_bessel_equation() {
        for &nu in &[0.2, 0.5, 0.8] {
            for &x in &[0.05, 0.5, 3.0, 12.0] {
                let k = bessel_k(nu, x).unwrap();
                let d1 = bessel_k_derivative(nu, x).unwrap();
                let d2 = bessel_k_second_derivative(nu, x).unwrap();
                let residual = d2 + d1 / x - (1.0 + nu * nu / (x * x)) * k;
                let scale = d2.abs() + (d1 / x).abs() + ((1.0 + nu * nu / (x * x)) * k).abs();
                assert!(residual.abs() <= 1e-12 * scale, "nu={nu} x={x} r={residual}");
            }
        }
    }
}
