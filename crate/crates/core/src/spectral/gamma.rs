//! Recovery sequences `eta_alpha psi_0` as the flux is switched off.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fields::{PerturbationField, RecoveryProfile};
use crate::forms::{GridSpec, RegularField};
use crate::quad::{integrate, integrate_segments, Bundle, Estimate, PolarGrid, RadialSpec};

/// One flux value of the recovery study.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GammaRow {
    pub alpha: f64,
    /// `Q^(F)_{alpha,S}[eta_alpha psi_0]`.
    pub q_alpha: f64,
    /// `||A_alpha eta_alpha psi_0||^2`.
    pub singular_norm: f64,
    /// `alpha ||psi_0||^2 + e^{-2 - alpha log alpha + 2 alpha} W_alpha`.
    pub singular_bound: f64,
    /// `||psi_alpha - psi_0||_{H^1}`.
    pub h1_gap: f64,
    /// Singular norm, cross term, `||D psi_alpha||^2` and `-||D psi_0||^2`.
    pub telescopic: [f64; 4],
    /// `|Q_alpha[psi_alpha] - Q_0[psi_0]|`.
    pub gap: f64,
    pub error: f64,
}

impl GammaRow {
    /// Sum of the four telescopic terms.
    pub fn telescopic_sum(&self) -> f64 {
        self.telescopic.iter().sum()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GammaStudy {
    /// `Q^(F)_{0,S}[psi_0]`.
    pub q0: f64,
    pub psi0_norm_sq: f64,
    pub rows: Vec<GammaRow>,
}

impl GammaStudy {
    /// Gap strictly decreasing along the rows.
    pub fn gap_decreasing(&self) -> bool {
        self.rows.windows(2).all(|w| w[1].gap < w[0].gap)
    }

    /// Last gap over first gap.
    pub fn gap_ratio(&self) -> f64 {
        match (self.rows.first(), self.rows.last()) {
            (Some(a), Some(b)) if a.gap > 0.0 => b.gap / a.gap,
            _ => f64::NAN,
        }
    }
}

fn ring_mean_sq(psi0: &dyn RegularField, r: f64) -> f64 {
    let n = 64;
    (0..n)
        .map(|j| {
            let t = 2.0 * PI * (j as f64 + 0.5) / n as f64;
            psi0.value([r * t.cos(), r * t.sin()]).norm_sqr()
        })
        .sum::<f64>()
        / n as f64
}

/// `int_{B_radius} |psi_0|^2 / (|x|^2 (1 + |log |x||)^2) dx` for `radius <= 1`.
pub fn sobolev_weight_norm(psi0: &dyn RegularField, radius: f64) -> Result<Estimate<f64>> {
    if !(radius > 0.0 && radius <= 1.0) {
        return Err(Error::InvalidInput(format!("radius must lie in (0, 1], got {radius}")));
    }
    let s_start = -radius.ln();
    let s_end = 600.0;
    let mut points = vec![s_start];
    let mut width = 1.0;
    while *points.last().unwrap() + width < s_end {
        points.push(points.last().unwrap() + width);
        width *= 2.0;
    }
    points.push(s_end);
    let body = integrate_segments(
        |s: f64| ring_mean_sq(psi0, (-s).exp()) / ((1.0 + s) * (1.0 + s)),
        &points,
        1e-12,
        1e-300,
    )?;
    let tail = ring_mean_sq(psi0, (-s_end).exp()) / (1.0 + s_end);
    let value = 2.0 * PI * (body.value + tail);
    if !value.is_finite() {
        return Err(Error::no_convergence("weighted norm", "integrand is not finite"));
    }
    Ok(Estimate { value, error: 2.0 * PI * (body.error + 1e-3 * tail) })
}

/// Value of `||A_alpha psi_0||^2` without a recovery profile.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SingularNorm {
    Finite(f64),
    Divergent,
}

/// `||A_alpha psi_0||^2`, flagged as divergent when the inner integral grows
/// logarithmically.
pub fn singular_norm_without_profile(psi0: &dyn RegularField, alpha: f64) -> Result<SingularNorm> {
    let per_log = |a: f64, b: f64| -> Result<f64> {
        Ok(integrate(|s: f64| ring_mean_sq(psi0, s.exp()), a, b, 1e-10, 1e-300)?.value)
    };
    let decades: Vec<f64> = (0..5).map(|j| -4.0 * j as f64 * 10f64.ln()).collect();
    let increments: Vec<f64> = decades.windows(2).map(|w| per_log(w[1], w[0])).collect::<Result<_>>()?;
    let inner: f64 = increments.iter().sum();
    let last = *increments.last().unwrap();
    if last > 0.5 * increments[0] && last > 1e-12 * inner.max(1e-300) {
        return Ok(SingularNorm::Divergent);
    }
    let reach = psi0.reach().max(1.0);
    let outer = integrate(|r: f64| ring_mean_sq(psi0, r) / r, 1.0, reach, 1e-10, 1e-300)?.value;
    Ok(SingularNorm::Finite(2.0 * PI * alpha * alpha * (inner + outer)))
}

/// Recovery study along `alphas` for a bounded azimuthal or general field.
pub fn gamma_recovery_study(
    psi0: &dyn RegularField,
    alphas: &[f64],
    field: &PerturbationField,
    grid: &GridSpec,
) -> Result<GammaStudy> {
    if field.sup_bound().is_none() {
        return Err(Error::InvalidInput("the recovery study needs a bounded field".into()));
    }
    let i = Complex64::i();
    let r_max = grid.r_max.unwrap_or(psi0.reach());
    let mut rows = Vec::with_capacity(alphas.len());
    let mut q0 = f64::NAN;
    let mut psi0_norm_sq = f64::NAN;
    for &alpha in alphas {
        let eta = RecoveryProfile::new(alpha)?;
        let knee = eta.knee();
        let mut layout = RadialSpec::new(r_max, 2.0 * alpha).with_breakpoints([knee, 2.0 * knee]);
        layout.max_panel = grid.max_panel;
        let polar = PolarGrid::new(&layout, grid.n_theta)?;
        let parts = polar.integrate_bundle::<10, _>(|_, node| {
            let x = node.point();
            let r = node.r;
            let v0 = psi0.value(x);
            let g0 = psi0.gradient(x);
            let (h, dh) = eta.eval(r);
            let va = h * v0;
            let ga = [h * g0[0] + dh * node.cos * v0, h * g0[1] + dh * node.sin * v0];
            let s = field.eval(x);
            let a = [-alpha * node.sin / r, alpha * node.cos / r];
            let d0 = [-i * g0[0] + s[0] * v0, -i * g0[1] + s[1] * v0];
            let da = [-i * ga[0] + s[0] * va, -i * ga[1] + s[1] * va];
            let aa = [a[0] * va, a[1] * va];
            let full = [da[0] + aa[0], da[1] + aa[1]];
            let sq = |v: [Complex64; 2]| v[0].norm_sqr() + v[1].norm_sqr();
            let mut out = Bundle::<10>::default();
            out.0[0] = sq(aa).into();
            out.0[1] = (2.0 * (da[0].conj() * aa[0] + da[1].conj() * aa[1]).re).into();
            out.0[2] = sq(da).into();
            out.0[3] = sq(d0).into();
            out.0[4] = sq(full).into();
            out.0[5] = (va - v0).norm_sqr().into();
            out.0[6] = sq([ga[0] - g0[0], ga[1] - g0[1]]).into();
            out.0[7] = v0.norm_sqr().into();
            out.0[8] = (sq(full) - sq(d0)).into();
            out.0[9] = sq(g0).into();
            out
        });
        let h1 = parts[7].value.re + parts[9].value.re;
        if !h1.is_finite() {
            return Err(Error::no_convergence("recovery study", "psi_0 fails the H^1 quadrature"));
        }
        q0 = parts[3].value.re;
        psi0_norm_sq = parts[7].value.re;
        let weighted = sobolev_weight_norm(psi0, knee.min(1.0))?;
        let bound = alpha * psi0_norm_sq + (-2.0 - alpha * alpha.ln() + 2.0 * alpha).exp() * weighted.value;
        rows.push(GammaRow {
            alpha,
            q_alpha: parts[4].value.re,
            singular_norm: parts[0].value.re,
            singular_bound: bound,
            h1_gap: (parts[5].value.re + parts[6].value.re).sqrt(),
            telescopic: [parts[0].value.re, parts[1].value.re, parts[2].value.re, -parts[3].value.re],
            gap: parts[8].value.re.abs(),
            error: parts[8].error + parts[4].error,
        });
    }
    Ok(GammaStudy { q0, psi0_norm_sq, rows })
}
