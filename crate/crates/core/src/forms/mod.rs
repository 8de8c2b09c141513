//! Quadratic forms on trial functions: the Friedrichs form, the matrix `Xi`
//! and the extended forms `Q^(beta)`.

mod trial;
mod xi;

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

pub use trial::{
    ClosureField, CVector, GaussianMode, GreenTerm, GriddedField, HermitianCoupling, RegularField, RegularPart,
    TrialFunction,
};
pub use xi::{xi_matrix, XiMatrix};

use crate::error::{Error, Result};
use crate::fields::{Cutoff, PerturbationField};
use crate::greens::{channel_order, phase, CHANNELS};
use crate::quad::{Bundle, Estimate, PolarGrid, RadialSpec};
use trial::{cross, ChannelRadial};

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

/// Resolution of the polar grids built for a trial function.
#[derive(Debug, Clone, PartialEq)]
pub struct GridSpec {
    pub n_theta: usize,
    pub max_panel: f64,
    /// Outer radius; defaults to the reach of the function.
    pub r_max: Option<f64>,
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec { n_theta: 256, max_panel: 0.25, r_max: None }
    }
}

impl GridSpec {
    pub fn coarse() -> Self {
        GridSpec { n_theta: 64, max_panel: 0.5, r_max: None }
    }

    pub(crate) fn build(&self, psi: &TrialFunction) -> Result<PolarGrid> {
        let reach = psi.regular.reach().max(psi.cutoff.outer);
        let r_max = self.r_max.unwrap_or(reach);
        if !(r_max > 0.0) {
            return Err(Error::InvalidInput(format!("grid radius must be positive, got {r_max}")));
        }
        let mut layout = RadialSpec::new(r_max, psi.origin_exponent()).with_breakpoints(psi.breakpoints());
        layout.max_panel = self.max_panel;
        PolarGrid::new(&layout, self.n_theta)
    }
}

/// Radial data shared by every node of one ring.
struct Ring {
    channels: [ChannelRadial; 2],
    green: [f64; 2],
    chi: f64,
    dchi: f64,
    lap_chi: f64,
}

fn rings(psi: &TrialFunction, grid: &PolarGrid) -> Result<Vec<Ring>> {
    let terms = psi.prepared_terms()?;
    let greens = if psi.alpha > 0.0 { Some(psi.charge_greens()?) } else { None };
    grid.radial
        .nodes
        .par_iter()
        .map(|&r| {
            let (chi, dchi, _) = psi.cutoff.eval(r);
            let green = match &greens {
                Some(g) if chi != 0.0 || dchi != 0.0 => [g[0].radial(r)?, g[1].radial(r)?],
                _ => [0.0; 2],
            };
            Ok(Ring {
                channels: TrialFunction::channel_radials(&terms, r)?,
                green,
                chi,
                dchi,
                lap_chi: psi.cutoff.laplacian(r),
            })
        })
        .collect()
}

/// Integrals sharing one grid pass over a trial function.
struct Pass {
    friedrichs: Estimate<Complex64>,
    psi_norm: Estimate<Complex64>,
    phi_norm: Estimate<Complex64>,
    norm_gap: Estimate<Complex64>,
    cross: [Estimate<Complex64>; 2],
}

fn main_pass(psi: &TrialFunction, grid: &PolarGrid) -> Result<Pass> {
    let terms = psi.prepared_terms()?;
    let table = rings(psi, grid)?;
    let alpha = psi.alpha;
    let s0 = psi.field.at_origin();
    let charged = psi.charges.iter().any(|q| *q != ZERO);
    let i = Complex64::i();
    let [f, pn, phn, gap, c0, c1] = grid.integrate_bundle::<6, _>(|idx, node| {
        let ring = &table[idx];
        let x = node.point();
        let r = node.r;
        let (phi, gphi) = psi.regular_at(&terms, &ring.channels, x);
        let a = [-alpha * node.sin / r, alpha * node.cos / r];
        let s = psi.field.eval(x);
        let p_phi = [-i * gphi[0] + a[0] * phi, -i * gphi[1] + a[1] * phi];
        let d_phi = [p_phi[0] + s[0] * phi, p_phi[1] + s[1] * phi];
        let mut out = Bundle::<6>::default();
        out.0[0] = (d_phi[0].norm_sqr() + d_phi[1].norm_sqr()).into();
        out.0[2] = phi.norm_sqr().into();
        out.0[1] = out.0[2];
        if ring.chi == 0.0 && ring.dchi == 0.0 {
            return out;
        }
        let e = psi.phase_factor(x);
        let eg: [Complex64; 2] = std::array::from_fn(|c| e * ring.green[c] * phase(CHANNELS[c], x, r));
        if charged {
            let singular = ring.chi * (psi.charges[0] * eg[0] + psi.charges[1] * eg[1]);
            let total = phi + singular;
            out.0[1] = total.norm_sqr().into();
            out.0[3] = (singular.norm_sqr() + 2.0 * (phi.conj() * singular).re).into();
        }
        let t = [s[0] - s0[0], s[1] - s0[1]];
        let v = [
            Complex64::new(t[0] * ring.chi, -ring.dchi * node.cos),
            Complex64::new(t[1] * ring.chi, -ring.dchi * node.sin),
        ];
        let w = (t[0] * t[0] + t[1] * t[1]) * ring.chi + 2.0 * (s0[0] * v[0] + s0[1] * v[1]) + ring.lap_chi;
        for (slot, &g) in out.0[4..6].iter_mut().zip(&eg) {
            *slot = 2.0 * cross(p_phi, [v[0] * g, v[1] * g]) + phi.conj() * w * g;
        }
        out
    });
    Ok(Pass { friedrichs: f, psi_norm: pn, phi_norm: phn, norm_gap: gap, cross: [c0, c1] })
}

fn real(e: Estimate<Complex64>) -> Estimate<f64> {
    Estimate { value: e.value.re, error: e.error }
}

/// `Q^(F)[phi]`, the Friedrichs form of the regular part alone.
pub fn friedrichs_form(
    phi: &RegularPart,
    alpha: f64,
    field: &PerturbationField,
    grid: &GridSpec,
) -> Result<Estimate<f64>> {
    let cutoff = Cutoff::new(0.5, 1.0)?;
    let psi = TrialFunction::new(alpha, 1.0, [ZERO; 2], cutoff, field.clone(), phi.clone())?;
    friedrichs_of(&psi, grid)
}

pub(crate) fn friedrichs_of(psi: &TrialFunction, grid: &GridSpec) -> Result<Estimate<f64>> {
    let pass = main_pass(psi, &grid.build(psi)?)?;
    Ok(real(pass.friedrichs))
}

/// Squared norm `||psi||^2`.
pub fn norm_squared(psi: &TrialFunction, grid: &GridSpec) -> Result<Estimate<f64>> {
    Ok(real(main_pass(psi, &grid.build(psi)?)?.psi_norm))
}

/// `pi^2 lambda^{2 nu_k} / sin(pi alpha)` for both channels.
pub fn charge_diagonal(alpha: f64, lambda: f64) -> [f64; 2] {
    let s = (PI * alpha).sin();
    CHANNELS.map(|k| PI * PI * lambda.powf(2.0 * channel_order(alpha, k)) / s)
}

/// Every contribution to `Q^(beta)[psi]`.
#[derive(Debug, Clone, PartialEq)]
pub struct QBetaBreakdown {
    pub friedrichs: f64,
    pub psi_norm_sq: f64,
    pub phi_norm_sq: f64,
    /// `-lambda^2 (||psi||^2 - ||phi||^2)`.
    pub mass_shift: f64,
    /// `2 Re sum_k q_k (cross term)_k`.
    pub cross: f64,
    /// `q^* (beta + D + Xi) q`.
    pub charge_block: f64,
    pub xi: Option<XiMatrix>,
    pub total: f64,
    pub error: f64,
}

/// `Q^(beta)[psi]` with all its parts.
pub fn qbeta_breakdown(psi: &TrialFunction, beta: &HermitianCoupling, grid: &GridSpec) -> Result<QBetaBreakdown> {
    let polar = grid.build(psi)?;
    let pass = main_pass(psi, &polar)?;
    let lambda2 = psi.lambda * psi.lambda;
    let friedrichs = pass.friedrichs.value.re;
    let mut error = pass.friedrichs.error + lambda2 * pass.norm_gap.error;
    let mass_shift = -lambda2 * pass.norm_gap.value.re;

    let q = psi.charges;
    let mut cross_sum = 0.0;
    let mut charge_block = 0.0;
    let mut xi = None;
    if q.iter().any(|c| *c != ZERO) {
        for (qc, cross) in q.iter().zip(&pass.cross) {
            cross_sum += 2.0 * (qc * cross.value).re;
            error += 2.0 * qc.norm() * cross.error;
        }
        let m = xi::xi_on_grid(psi, &polar)?;
        let diag = charge_diagonal(psi.alpha, psi.lambda);
        let b = beta.matrix();
        let mut block = ZERO;
        for k in 0..2 {
            for kp in 0..2 {
                let d = if k == kp { diag[k] } else { 0.0 };
                block += q[k].conj() * q[kp] * (b[k][kp] + d + m.entries[k][kp]);
                error += q[k].norm() * q[kp].norm() * m.errors[k][kp];
            }
        }
        charge_block = block.re;
        xi = Some(m);
    }
    Ok(QBetaBreakdown {
        friedrichs,
        psi_norm_sq: pass.psi_norm.value.re,
        phi_norm_sq: pass.phi_norm.value.re,
        mass_shift,
        cross: cross_sum,
        charge_block,
        xi,
        total: friedrichs + mass_shift + cross_sum + charge_block,
        error,
    })
}

/// `Q^(beta)[psi]`.
pub fn qbeta_eval(psi: &TrialFunction, beta: &HermitianCoupling, grid: &GridSpec) -> Result<Estimate<f64>> {
    let b = qbeta_breakdown(psi, beta, grid)?;
    Ok(Estimate { value: b.total, error: b.error })
}

/// `Q^(beta)[psi] + lambda^2 ||psi||^2`, with `psi` re-represented at `lambda`.
pub fn coercivity_probe(
    psi: &TrialFunction,
    beta: &HermitianCoupling,
    lambda: f64,
    grid: &GridSpec,
) -> Result<Estimate<f64>> {
    let moved = psi.change_lambda(lambda)?;
    let b = qbeta_breakdown(&moved, beta, grid)?;
    Ok(Estimate { value: b.total + lambda * lambda * b.psi_norm_sq, error: b.error })
}

/// Rows of `(lambda, smallest probe value)` and the first `lambda` from which every probe is positive.
pub type CoercivitySweep = (Vec<(f64, f64)>, Option<f64>);

/// Smallest probe value over `lambdas`, and the first `lambda` from which every probe is positive.
pub fn coercivity_sweep(
    psis: &[TrialFunction],
    beta: &HermitianCoupling,
    lambdas: &[f64],
    grid: &GridSpec,
) -> Result<CoercivitySweep> {
    let mut rows = Vec::with_capacity(lambdas.len());
    for &lambda in lambdas {
        let mut worst = f64::INFINITY;
        for psi in psis {
            worst = worst.min(coercivity_probe(psi, beta, lambda, grid)?.value);
        }
        rows.push((lambda, worst));
    }
    let mut threshold = None;
    for &(lambda, worst) in rows.iter().rev() {
        if worst > 0.0 {
            threshold = Some(lambda);
        } else {
            break;
        }
    }
    Ok((rows, threshold))
}
