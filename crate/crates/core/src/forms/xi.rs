use num_complex::Complex64;
use rayon::prelude::*;

use super::trial::TrialFunction;
use super::GridSpec;
use crate::error::Result;
use crate::greens::{phase, CHANNELS};
use crate::quad::{Bundle, PolarGrid};

/// The Hermitian matrix `Xi(lambda)` with per-entry quadrature errors.
#[derive(Debug, Clone, PartialEq)]
pub struct XiMatrix {
    pub entries: [[Complex64; 2]; 2],
    pub errors: [[f64; 2]; 2],
    /// `2 <chi G0 | T.(-i grad)(chi G0)>`, zero for divergence-free `T`.
    pub null_entry: Complex64,
    pub null_error: f64,
}

impl XiMatrix {
    /// `|Xi_{01} - conj(Xi_{10})|`.
    pub fn asymmetry(&self) -> f64 {
        (self.entries[0][1] - self.entries[1][0].conj()).norm()
    }
}

/// `Xi(lambda)` for the cutoff and field carried by `psi`.
pub fn xi_matrix(psi: &TrialFunction, grid: &GridSpec) -> Result<XiMatrix> {
    xi_on_grid(psi, &grid.build(psi)?)
}

pub(crate) fn xi_on_grid(psi: &TrialFunction, grid: &PolarGrid) -> Result<XiMatrix> {
    let greens = psi.charge_greens()?;
    let table: Vec<([f64; 2], [f64; 2], f64, f64)> = grid
        .radial
        .nodes
        .par_iter()
        .map(|&r| {
            let (chi, dchi, _) = psi.cutoff.eval(r);
            if chi == 0.0 && dchi == 0.0 {
                return Ok(([0.0; 2], [0.0; 2], 0.0, 0.0));
            }
            Ok((
                [greens[0].radial(r)?, greens[1].radial(r)?],
                [greens[0].radial_derivative(r)?, greens[1].radial_derivative(r)?],
                chi,
                dchi,
            ))
        })
        .collect::<Result<_>>()?;
    let alpha = psi.alpha;
    let i = Complex64::i();
    let parts = grid.integrate_bundle::<5, _>(|idx, node| {
        let (g, dg, chi, dchi) = table[idx];
        let mut out = Bundle::<5>::default();
        if chi == 0.0 && dchi == 0.0 {
            return out;
        }
        let x = node.point();
        let r = node.r;
        let t = psi.field.shifted(x);
        let a = [-alpha * node.sin / r, alpha * node.cos / r];
        let potential = t[0] * t[0] + t[1] * t[1] + 2.0 * (t[0] * a[0] + t[1] * a[1]);
        let mut h = [Complex64::default(); 2];
        let mut t_grad = [Complex64::default(); 2];
        for c in 0..2 {
            let k = CHANNELS[c];
            let ph = phase(k, x, r);
            h[c] = chi * g[c] * ph;
            let radial = (dchi * g[c] + chi * dg[c]) * ph;
            let angular = i * (k as f64 / r) * h[c];
            let grad = [radial * node.cos - angular * node.sin, radial * node.sin + angular * node.cos];
            t_grad[c] = -i * (t[0] * grad[0] + t[1] * grad[1]);
        }
        let grad_chi_sq = dchi * dchi;
        for k in 0..2 {
            for kp in 0..2 {
                let mut v = h[k].conj() * potential * h[kp] + 2.0 * h[k].conj() * t_grad[kp];
                v += grad_chi_sq * g[k] * g[kp] * (phase(CHANNELS[k], x, r).conj() * phase(CHANNELS[kp], x, r));
                out.0[2 * k + kp] = v;
            }
        }
        out.0[4] = 2.0 * h[0].conj() * t_grad[0];
        out
    });
    Ok(XiMatrix {
        entries: [[parts[0].value, parts[1].value], [parts[2].value, parts[3].value]],
        errors: [[parts[0].error, parts[1].error], [parts[2].error, parts[3].error]],
        null_entry: parts[4].value,
        null_error: parts[4].error,
    })
}
