//! Extension matrices, bound states of the unperturbed extensions, boundary
//! traces of regular parts and the corrected operator action.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fields::{check_alpha, Point};
use crate::forms::{charge_diagonal, HermitianCoupling, TrialFunction};
use crate::greens::{channel_order, phase, GreenFunction, CHANNELS};
use crate::specfun::gamma;
use crate::tolerances::Tolerances;

type Matrix = [[Complex64; 2]; 2];

/// `M(lambda) = beta + pi^2 lambda^{2 nu_k} / sin(pi alpha) delta`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExtensionMatrix {
    pub alpha: f64,
    pub lambda: f64,
    pub beta: HermitianCoupling,
    pub entries: Matrix,
}

pub fn extension_matrix(beta: &HermitianCoupling, alpha: f64, lambda: f64) -> Result<ExtensionMatrix> {
    check_alpha(alpha)?;
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(Error::InvalidInput(format!("lambda must be positive, got {lambda}")));
    }
    let mut entries = beta.matrix();
    let diag = charge_diagonal(alpha, lambda);
    entries[0][0] += diag[0];
    entries[1][1] += diag[1];
    Ok(ExtensionMatrix { alpha, lambda, beta: *beta, entries })
}

impl ExtensionMatrix {
    /// Complex determinant; its imaginary part vanishes for Hermitian `beta`.
    pub fn determinant_complex(&self) -> Complex64 {
        let m = &self.entries;
        m[0][0] * m[1][1] - m[0][1] * m[1][0]
    }

    pub fn determinant(&self) -> f64 {
        self.determinant_complex().re
    }

    /// Real eigenvalues in increasing order.
    pub fn eigenvalues(&self) -> [f64; 2] {
        let (a, d) = (self.entries[0][0].re, self.entries[1][1].re);
        let mid = 0.5 * (a + d);
        let radius = (0.25 * (a - d) * (a - d) + self.entries[0][1].norm_sqr()).sqrt();
        [mid - radius, mid + radius]
    }

    /// Frobenius norm.
    pub fn norm(&self) -> f64 {
        self.entries.iter().flatten().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Two-norm condition number.
    pub fn condition(&self) -> f64 {
        let [lo, hi] = self.eigenvalues();
        let (small, large) = (lo.abs().min(hi.abs()), lo.abs().max(hi.abs()));
        if small == 0.0 {
            f64::INFINITY
        } else {
            large / small
        }
    }

    /// Unit vector spanning the near-kernel of the matrix.
    pub fn null_vector(&self) -> [Complex64; 2] {
        let m = &self.entries;
        let row0 = m[0][0].norm_sqr() + m[0][1].norm_sqr();
        let row1 = m[1][0].norm_sqr() + m[1][1].norm_sqr();
        let v = if row0 == 0.0 && row1 == 0.0 {
            [Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)]
        } else if row0 >= row1 {
            [m[0][1], -m[0][0]]
        } else {
            [m[1][1], -m[1][0]]
        };
        let n = (v[0].norm_sqr() + v[1].norm_sqr()).sqrt();
        [v[0] / n, v[1] / n]
    }

    pub fn apply(&self, q: [Complex64; 2]) -> [Complex64; 2] {
        let m = &self.entries;
        [m[0][0] * q[0] + m[0][1] * q[1], m[1][0] * q[0] + m[1][1] * q[1]]
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundState {
    pub lambda: f64,
    pub energy: f64,
    /// Charges `(q^(0), q^(-1))` of the eigenfunction `sum_k q_k G_lambda^(k)`.
    pub charges: [Complex64; 2],
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct BoundStates {
    pub states: Vec<BoundState>,
    pub warning: Option<String>,
}

fn is_positive_semidefinite(beta: &HermitianCoupling) -> bool {
    let det = beta.b00 * beta.b11 - beta.b01.norm_sqr();
    beta.b00 >= 0.0 && beta.b11 >= 0.0 && det >= 0.0
}

/// Negative eigenvalues `-lambda*^2` of the unperturbed extension, found as
/// roots of `det M(lambda)` inside `bracket`.
pub fn bound_states(beta: &HermitianCoupling, alpha: f64, bracket: (f64, f64)) -> Result<BoundStates> {
    check_alpha(alpha)?;
    let (lo, hi) = bracket;
    if !(lo > 0.0 && hi > lo && hi.is_finite()) {
        return Err(Error::InvalidInput(format!("bracket must satisfy 0 < lo < hi, got ({lo}, {hi})")));
    }
    let tol = Tolerances::DEFAULT;
    let det = |lambda: f64| -> Result<f64> { Ok(extension_matrix(beta, alpha, lambda)?.determinant()) };
    let n = tol.bound_state_samples;
    let ratio = (hi / lo).ln();
    let grid: Vec<f64> = (0..n).map(|i| lo * (ratio * i as f64 / (n - 1) as f64).exp()).collect();
    let values: Vec<f64> = grid.iter().map(|&l| det(l)).collect::<Result<_>>()?;

    let mut out = BoundStates::default();
    for i in 0..n - 1 {
        let (mut a, mut b) = (grid[i], grid[i + 1]);
        let (fa, fb) = (values[i], values[i + 1]);
        let root = if fa == 0.0 {
            a
        } else if fb == 0.0 {
            if i + 1 == n - 1 {
                b
            } else {
                continue;
            }
        } else if fa.signum() != fb.signum() {
            let mut f_left = fa;
            while b - a > tol.bound_state_bisection * b {
                let mid = 0.5 * (a + b);
                let fm = det(mid)?;
                if fm == 0.0 {
                    a = mid;
                    b = mid;
                    break;
                }
                if fm.signum() == f_left.signum() {
                    a = mid;
                    f_left = fm;
                } else {
                    b = mid;
                }
            }
            0.5 * (a + b)
        } else {
            continue;
        };
        let m = extension_matrix(beta, alpha, root)?;
        out.states.push(BoundState { lambda: root, energy: -root * root, charges: m.null_vector() });
    }

    if out.states.is_empty() && !is_positive_semidefinite(beta) {
        let increasing = values.windows(2).all(|w| w[1] >= w[0]);
        let decreasing = values.windows(2).all(|w| w[1] <= w[0]);
        if increasing || decreasing {
            out.warning = Some(format!(
                "det M keeps the sign {} and is monotone on [{lo}, {hi}]; the bracket may be too small",
                if values[0] > 0.0 { "+" } else { "-" }
            ));
        }
    }
    Ok(out)
}

/// Closed-form roots for diagonal `beta`: `(-b_k sin(pi alpha) / pi^2)^{1 / (2 nu_k)}` for `b_k < 0`.
pub fn diagonal_roots(beta: &HermitianCoupling, alpha: f64) -> Vec<f64> {
    let mut roots: Vec<f64> = [beta.b00, beta.b11]
        .iter()
        .zip(CHANNELS)
        .filter(|(b, _)| **b < 0.0)
        .map(|(b, k)| (-b * (PI * alpha).sin() / (PI * PI)).powf(0.5 / channel_order(alpha, k)))
        .collect();
    roots.sort_by(f64::total_cmp);
    roots
}

/// Trace extracted from the regular part, with an error estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Trace {
    pub value: Complex64,
    pub error: f64,
}

/// Radii `start, start/2, start/4, ...`.
pub fn geometric_radii(start: f64, count: usize) -> Vec<f64> {
    (0..count).map(|i| start * 0.5f64.powi(i as i32)).collect()
}

fn aitken(seq: &[Complex64]) -> Vec<Complex64> {
    seq.windows(3)
        .map(|w| {
            let d1 = w[1] - w[0];
            let d2 = w[2] - w[1];
            let denom = d2 - d1;
            if denom.norm() <= 1e-300 || denom.norm() <= 1e-14 * (w[2].norm() + d2.norm()) {
                w[2]
            } else {
                w[2] - d2 * d2 / denom
            }
        })
        .collect()
}

/// Limit of a sequence sampled on radii halving at every step, by iterated
/// Aitken extrapolation.
pub fn extrapolate_to_origin(samples: &[Complex64]) -> Result<Trace> {
    if samples.len() < 4 {
        return Err(Error::InvalidInput("extrapolation needs at least 4 samples".into()));
    }
    let tail = &samples[samples.len() - 4..];
    let d_prev = (tail[2] - tail[1]).norm();
    let d_last = (tail[3] - tail[2]).norm();
    let scale = 1.0 + tail[3].norm();
    if d_last > 1.05 * d_prev && d_last > 1e-10 * scale {
        return Err(Error::no_convergence(
            "boundary trace",
            format!("samples diverge towards the origin (last step {d_last:e} after {d_prev:e})"),
        ));
    }
    let mut best = Trace { value: tail[3], error: d_last };
    let mut level = samples.to_vec();
    for _ in 0..3 {
        if level.len() < 3 {
            break;
        }
        level = aitken(&level);
        if level.len() >= 2 {
            let n = level.len();
            let error = (level[n - 1] - level[n - 2]).norm();
            if error < best.error {
                best = Trace { value: level[n - 1], error };
            }
        }
    }
    if best.error > 1e-6 * (1.0 + best.value.norm()) {
        return Err(Error::no_convergence(
            "boundary trace",
            format!("extrapolants differ by {:e} near {}", best.error, best.value),
        ));
    }
    Ok(best)
}

/// `lim (nu <e^{-ik theta} phi>(r) + r <e^{-ik theta} d_r phi>(r)) / r^nu` for a
/// mode profile returning the angular average and its radial derivative.
pub fn boundary_trace<F>(profile: F, k: i32, alpha: f64, radii: &[f64]) -> Result<Trace>
where
    F: Fn(f64) -> Result<(Complex64, Complex64)>,
{
    check_alpha(alpha)?;
    if radii.len() < 4 {
        return Err(Error::InvalidInput("need at least 4 radii".into()));
    }
    let ratio = radii[1] / radii[0];
    if !(ratio > 0.0 && ratio < 1.0) || radii.windows(2).any(|w| ((w[1] / w[0]) / ratio - 1.0).abs() > 1e-9) {
        return Err(Error::InvalidInput("radii must decrease geometrically".into()));
    }
    let smallest = *radii.last().unwrap();
    if smallest > 1e-5 {
        return Err(Error::InvalidInput(format!("smallest radius must be at most 1e-5, got {smallest:e}")));
    }
    let nu = channel_order(alpha, k);
    let samples: Vec<Complex64> = radii
        .iter()
        .map(|&r| {
            let (f, df) = profile(r)?;
            Ok((nu * f + r * df) / r.powf(nu))
        })
        .collect::<Result<_>>()?;
    extrapolate_to_origin(&samples)
}

/// Angular mode `<e^{-ik theta} phi>(r)` and `<e^{-ik theta} d_r phi>(r)` of the
/// regular part of `psi`.
pub fn regular_mode(psi: &TrialFunction, k: i32, r: f64) -> Result<(Complex64, Complex64)> {
    let n = 64;
    let mut value = Complex64::default();
    let mut radial = Complex64::default();
    for j in 0..n {
        let t = 2.0 * PI * (j as f64 + 0.5) / n as f64;
        let x = [r * t.cos(), r * t.sin()];
        let (v, g) = psi.regular_with_gradient(x)?;
        let weight = phase(k, x, r).conj();
        value += weight * v;
        radial += weight * (g[0] * t.cos() + g[1] * t.sin());
    }
    Ok((value / n as f64, radial / n as f64))
}

/// Boundary traces `(t_0, t_-1)` of the regular part of `psi`.
pub fn regular_traces(psi: &TrialFunction) -> Result<[Trace; 2]> {
    let radii = geometric_radii(1e-2, 24);
    let t0 = boundary_trace(|r| regular_mode(psi, 0, r), 0, psi.alpha, &radii)?;
    let t1 = boundary_trace(|r| regular_mode(psi, -1, r), -1, psi.alpha, &radii)?;
    Ok([t0, t1])
}

fn trace_weight(alpha: f64, k: i32) -> Result<f64> {
    let nu = channel_order(alpha, k);
    Ok(2f64.powf(1.0 - nu) / gamma(nu)?)
}

/// Charges satisfying `(2^{1-nu_k} / Gamma(nu_k)) sum_k' M_kk' q_k' = t_k`.
pub fn charge_solve(
    beta: &HermitianCoupling,
    alpha: f64,
    lambda: f64,
    traces: [Complex64; 2],
) -> Result<[Complex64; 2]> {
    let m = extension_matrix(beta, alpha, lambda)?;
    let cond = m.condition();
    if cond > Tolerances::DEFAULT.max_condition {
        return Err(Error::SingularMatrix(cond));
    }
    let rhs = [traces[0] / trace_weight(alpha, 0)?, traces[1] / trace_weight(alpha, -1)?];
    let e = &m.entries;
    let det = m.determinant_complex();
    Ok([(e[1][1] * rhs[0] - e[0][1] * rhs[1]) / det, (e[0][0] * rhs[1] - e[1][0] * rhs[0]) / det])
}

/// Residual `t_k - (2^{1-nu_k}/Gamma(nu_k)) (M q)_k` of the operator-domain
/// boundary condition for `psi`.
pub fn domain_condition_residual(psi: &TrialFunction, beta: &HermitianCoupling) -> Result<[Complex64; 2]> {
    let traces = regular_traces(psi)?;
    let m = extension_matrix(beta, psi.alpha, psi.lambda)?;
    let mq = m.apply(psi.charges);
    Ok([
        traces[0].value - trace_weight(psi.alpha, 0)? * mq[0],
        traces[1].value - trace_weight(psi.alpha, -1)? * mq[1],
    ])
}

/// Correction term of the operator action on `psi` at the given points:
/// `sum_k q_k e^{-i S(0).x} [2 V.(-i grad + A) G_k + (T^2 chi + 2 T.(-i grad chi) - lap chi) G_k]`
/// with `T = S - S(0)` and `V = T chi - i grad chi`.
pub fn hbeta_apply_correction(psi: &TrialFunction, points: &[Point]) -> Result<Vec<Complex64>> {
    let greens: Vec<GreenFunction> = CHANNELS
        .iter()
        .map(|&k| GreenFunction::new(psi.alpha, k, psi.lambda))
        .collect::<Result<_>>()?;
    let i = Complex64::i();
    points
        .iter()
        .map(|&x| {
            let r = x[0].hypot(x[1]);
            if r == 0.0 {
                return Err(Error::OriginSingularity);
            }
            let (chi, dchi, _) = psi.cutoff.eval(r);
            if chi == 0.0 && dchi == 0.0 {
                return Ok(Complex64::default());
            }
            let (c, s) = (x[0] / r, x[1] / r);
            let t = psi.field.shifted(x);
            let a = [-psi.alpha * s / r, psi.alpha * c / r];
            let grad_chi = [dchi * c, dchi * s];
            let v = [t[0] * chi - i * grad_chi[0], t[1] * chi - i * grad_chi[1]];
            let scalar = (t[0] * t[0] + t[1] * t[1]) * chi - 2.0 * i * (t[0] * grad_chi[0] + t[1] * grad_chi[1])
                - psi.cutoff.laplacian(r);
            let mut total = Complex64::default();
            for (q, g) in psi.charges.iter().zip(&greens) {
                if *q == Complex64::default() {
                    continue;
                }
                let value = g.eval(x)?;
                let grad = g.gradient(x)?;
                let p = [-i * grad[0] + a[0] * value, -i * grad[1] + a[1] * value];
                total += q * (2.0 * (v[0] * p[0] + v[1] * p[1]) + scalar * value);
            }
            Ok(psi.phase_factor(x) * total)
        })
        .collect()
}
