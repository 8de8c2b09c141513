//! Radial discretization of the Friedrichs Hamiltonian in one angular mode,
//! for azimuthal perturbations `S = s(r) e_theta`.
//!
//! A mode `f(r) e^{ik theta}` is written as `f = r^nu w` with `nu = |k + alpha|`.
//! The reduced function solves `-(r^{2nu+1} w')' / r^{2nu+1} + v w = E w`
//! with the bounded potential `v = 2 (k + alpha) s / r + s^2`, so the Friedrichs
//! behaviour at the origin is the natural boundary condition `w'(0) = 0`.
//! The equation is discretized by cell-centred finite volumes on the mapped
//! coordinate `r = r_max t^grading` with a Dirichlet wall at `r_max`.

mod gamma;

pub use gamma::{
    gamma_recovery_study, singular_norm_without_profile, sobolev_weight_norm, GammaRow, GammaStudy, SingularNorm,
};

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::tolerances::Tolerances;

/// Cell-centred radial grid `r_i = r_max ((i + 1/2) / n)^grading`.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialGrid {
    pub r_max: f64,
    pub n: usize,
    pub grading: f64,
    centres: Vec<f64>,
    faces: Vec<f64>,
}

impl RadialGrid {
    pub fn new(r_max: f64, n: usize, grading: f64) -> Result<Self> {
        if !(r_max > 0.0 && r_max.is_finite()) || n < 200 || !(grading >= 1.0) {
            return Err(Error::InvalidInput(format!(
                "radial grid needs r_max > 0, n >= 200 and grading >= 1, got ({r_max}, {n}, {grading})"
            )));
        }
        let map = |t: f64| r_max * t.powf(grading);
        let centres: Vec<f64> = (0..n).map(|i| map((i as f64 + 0.5) / n as f64)).collect();
        let faces: Vec<f64> = (0..=n).map(|i| map(i as f64 / n as f64)).collect();
        if centres[0] > 1e-4 * r_max {
            return Err(Error::InvalidInput(format!(
                "first node {:e} exceeds 1e-4 r_max; raise n or the grading",
                centres[0]
            )));
        }
        Ok(RadialGrid { r_max, n, grading, centres, faces })
    }

    /// Default layout: quadratic grading.
    pub fn standard(r_max: f64, n: usize) -> Result<Self> {
        Self::new(r_max, n, 2.0)
    }

    pub fn refined(&self) -> Result<Self> {
        Self::new(self.r_max, 2 * self.n, self.grading)
    }

    pub fn nodes(&self) -> &[f64] {
        &self.centres
    }

    pub fn faces(&self) -> &[f64] {
        &self.faces
    }

    /// `int r dr` over every cell.
    pub fn plane_weights(&self) -> Vec<f64> {
        self.faces.windows(2).map(|w| 0.5 * (w[1] * w[1] - w[0] * w[0])).collect()
    }

    fn jacobian(&self, t: f64) -> f64 {
        self.r_max * self.grading * t.powf(self.grading - 1.0)
    }
}

/// Symmetric tridiagonal representation of one angular mode.
#[derive(Debug, Clone)]
pub struct ModeOperator {
    pub k: i32,
    pub alpha: f64,
    /// `|k + alpha|`.
    pub nu: f64,
    pub grid: RadialGrid,
    pub diagonal: Vec<f64>,
    pub off_diagonal: Vec<f64>,
    /// Cell masses `int r^{2nu+1} dr`.
    pub mass: Vec<f64>,
    /// Bounded part `2 (k + alpha) s / r + s^2` at the cell centres.
    pub potential: Vec<f64>,
    pub warning: Option<String>,
}

/// Full potential `(k + alpha + r s(r))^2 / r^2` of the mode.
pub fn mode_potential(k: i32, alpha: f64, profile: &dyn Fn(f64) -> f64, r: f64) -> f64 {
    let c = k as f64 + alpha + r * profile(r);
    c * c / (r * r)
}

fn assemble(k: i32, alpha: f64, profile: &(dyn Fn(f64) -> f64 + Sync), grid: &RadialGrid) -> ModeOperator {
    let kappa = k as f64 + alpha;
    let nu = kappa.abs();
    let p = 2.0 * nu + 1.0;
    let n = grid.n;
    let dt = 1.0 / n as f64;
    let stiffness: Vec<f64> = (0..=n)
        .map(|i| {
            let t = i as f64 * dt;
            if i == 0 {
                0.0
            } else {
                grid.faces[i].powf(p) / grid.jacobian(t)
            }
        })
        .collect();
    let mass: Vec<f64> = grid
        .faces
        .windows(2)
        .map(|w| (w[1].powf(p + 1.0) - w[0].powf(p + 1.0)) / (p + 1.0))
        .collect();
    let potential: Vec<f64> = grid
        .centres
        .iter()
        .map(|&r| {
            let s = profile(r);
            2.0 * kappa * s / r + s * s
        })
        .collect();
    let diagonal = (0..n)
        .map(|i| {
            let right = if i + 1 == n { 2.0 * stiffness[n] } else { stiffness[i + 1] };
            (stiffness[i] + right) / (dt * mass[i]) + potential[i]
        })
        .collect();
    let off_diagonal = (0..n - 1).map(|i| -stiffness[i + 1] / (dt * (mass[i] * mass[i + 1]).sqrt())).collect();
    ModeOperator { k, alpha, nu, grid: grid.clone(), diagonal, off_diagonal, mass, potential, warning: None }
}

/// Builds the mode operator and probes it against a grid of half the size.
pub fn assemble_mode_operator(
    k: i32,
    alpha: f64,
    profile: &(dyn Fn(f64) -> f64 + Sync),
    grid: &RadialGrid,
) -> Result<ModeOperator> {
    if !(0.0..1.0).contains(&alpha) {
        return Err(Error::InvalidInput(format!("flux must lie in [0, 1), got {alpha}")));
    }
    let s0 = profile(0.0);
    if s0.abs() > 1e-12 {
        return Err(Error::ProfileNotVanishing(s0));
    }
    let mut op = assemble(k, alpha, profile, grid);
    if op.potential.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidInput("azimuthal profile is not finite on the grid".into()));
    }
    if grid.n >= 400 {
        let coarse = RadialGrid::new(grid.r_max, grid.n / 2, grid.grading)?;
        let e_coarse = eigenvalues(&assemble(k, alpha, profile, &coarse), 1)?[0];
        let e_fine = eigenvalues(&op, 1)?[0];
        let drift = (e_fine - e_coarse).abs() / e_fine.abs().max(1.0);
        if drift > 1e-2 {
            op.warning = Some(format!("lowest eigenvalue moves by {drift:.2e} between n/2 and n; grid too coarse"));
        }
    }
    Ok(op)
}

impl ModeOperator {
    pub fn len(&self) -> usize {
        self.diagonal.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diagonal.is_empty()
    }

    /// Number of eigenvalues below `x`.
    pub fn count_below(&self, x: f64) -> usize {
        let mut count = 0;
        let mut q = 1.0;
        for i in 0..self.len() {
            let coupling = if i == 0 { 0.0 } else { self.off_diagonal[i - 1] * self.off_diagonal[i - 1] / q };
            q = self.diagonal[i] - x - coupling;
            if q == 0.0 {
                q = -f64::EPSILON * (self.diagonal[i].abs() + x.abs()).max(f64::MIN_POSITIVE);
            }
            if q < 0.0 {
                count += 1;
            }
        }
        count
    }

    fn gershgorin(&self) -> (f64, f64) {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..self.len() {
            let left = if i > 0 { self.off_diagonal[i - 1].abs() } else { 0.0 };
            let right = if i + 1 < self.len() { self.off_diagonal[i].abs() } else { 0.0 };
            lo = lo.min(self.diagonal[i] - left - right);
            hi = hi.max(self.diagonal[i] + left + right);
        }
        (lo, hi)
    }

    /// `y = H x` for the symmetric matrix.
    pub fn apply(&self, x: &[Complex64]) -> Vec<Complex64> {
        let n = self.len();
        (0..n)
            .map(|i| {
                let mut y = self.diagonal[i] * x[i];
                if i > 0 {
                    y += self.off_diagonal[i - 1] * x[i - 1];
                }
                if i + 1 < n {
                    y += self.off_diagonal[i] * x[i + 1];
                }
                y
            })
            .collect()
    }

    /// Converts mode values `f(r_i)` to the symmetric representation.
    pub fn to_symmetric(&self, f: &[Complex64]) -> Vec<Complex64> {
        f.iter()
            .zip(&self.grid.centres)
            .zip(&self.mass)
            .map(|((v, r), m)| v / r.powf(self.nu) * m.sqrt())
            .collect()
    }

    /// Inverse of [`ModeOperator::to_symmetric`].
    pub fn from_symmetric(&self, y: &[Complex64]) -> Vec<Complex64> {
        y.iter()
            .zip(&self.grid.centres)
            .zip(&self.mass)
            .map(|((v, r), m)| v / m.sqrt() * r.powf(self.nu))
            .collect()
    }

    /// Reduced values `w_i = f_i / r_i^nu` from the symmetric representation.
    pub fn reduced(&self, y: &[Complex64]) -> Vec<Complex64> {
        y.iter().zip(&self.mass).map(|(v, m)| v / m.sqrt()).collect()
    }
}

/// Lowest `count` eigenvalues by Sturm bisection.
pub fn eigenvalues(op: &ModeOperator, count: usize) -> Result<Vec<f64>> {
    if count == 0 || count > 10 || count > op.len() {
        return Err(Error::InvalidInput(format!("eigenvalue count must lie in 1..=10, got {count}")));
    }
    let tol = Tolerances::DEFAULT.eigen_bisection;
    let (lo, hi) = op.gershgorin();
    (0..count)
        .map(|j| {
            let (mut a, mut b) = (lo, hi);
            for _ in 0..400 {
                let mid = 0.5 * (a + b);
                if op.count_below(mid) > j {
                    b = mid;
                } else {
                    a = mid;
                }
                if b - a <= tol * (a.abs() + b.abs()).max(1.0) {
                    break;
                }
            }
            Ok(0.5 * (a + b))
        })
        .collect()
}

/// Solves `(H - z) x = y` for the symmetric tridiagonal matrix.
fn thomas(op: &ModeOperator, z: Complex64, y: &[Complex64]) -> Result<Vec<Complex64>> {
    let n = op.len();
    let mut c = vec![Complex64::default(); n];
    let mut d = vec![Complex64::default(); n];
    let mut pivot = Complex64::new(op.diagonal[0], 0.0) - z;
    for i in 0..n {
        if i > 0 {
            let e = op.off_diagonal[i - 1];
            pivot = op.diagonal[i] - z - e * c[i - 1];
            if pivot.norm() == 0.0 {
                return Err(Error::SingularMatrix(f64::INFINITY));
            }
            d[i] = (y[i] - e * d[i - 1]) / pivot;
        } else {
            if pivot.norm() == 0.0 {
                return Err(Error::SingularMatrix(f64::INFINITY));
            }
            d[0] = y[0] / pivot;
        }
        if i + 1 < n {
            c[i] = op.off_diagonal[i] / pivot;
        }
    }
    for i in (0..n - 1).rev() {
        let next = d[i + 1];
        d[i] -= c[i] * next;
    }
    Ok(d)
}

/// Normalized eigenvector (symmetric representation) for eigenvalue `index`.
pub fn eigenvector(op: &ModeOperator, index: usize) -> Result<(f64, Vec<f64>)> {
    let values = eigenvalues(op, index + 1)?;
    let e = values[index];
    let gap = if index > 0 { e - values[index - 1] } else { (e.abs()).max(1.0) };
    let shift = e + 1e-9 * gap.max(1e-6);
    let mut x: Vec<Complex64> = (0..op.len()).map(|i| Complex64::new(1.0 + (i % 7) as f64 * 1e-3, 0.0)).collect();
    for _ in 0..4 {
        x = thomas(op, Complex64::new(shift, 0.0), &x)?;
        let norm = x.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
        x.iter_mut().for_each(|v| *v /= norm);
    }
    let sign = if x.iter().map(|v| v.re).sum::<f64>() < 0.0 { -1.0 } else { 1.0 };
    Ok((e, x.iter().map(|v| sign * v.re).collect()))
}

/// Eigenvalue extrapolated from grids of `n` and `2n` cells.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EigenEstimate {
    pub value: f64,
    pub coarse: f64,
    pub fine: f64,
    /// `|extrapolated - fine|`.
    pub error: f64,
}

/// Lowest `count` eigenvalues, Richardson-extrapolated over `grid` and its refinement.
pub fn extrapolated_eigenvalues(
    k: i32,
    alpha: f64,
    profile: &(dyn Fn(f64) -> f64 + Sync),
    grid: &RadialGrid,
    count: usize,
) -> Result<Vec<EigenEstimate>> {
    let grids = [grid.clone(), grid.refined()?];
    let levels: Vec<Vec<f64>> = grids
        .par_iter()
        .map(|g| eigenvalues(&assemble_mode_operator(k, alpha, profile, g)?, count))
        .collect::<Result<_>>()?;
    Ok((0..count)
        .map(|j| {
            let (coarse, fine) = (levels[0][j], levels[1][j]);
            let value = (4.0 * fine - coarse) / 3.0;
            EigenEstimate { value, coarse, fine, error: (value - fine).abs() }
        })
        .collect())
}

/// Observed convergence order of the lowest eigenvalue over `n`, `2n`, `4n`.
pub fn observed_order(k: i32, alpha: f64, profile: &(dyn Fn(f64) -> f64 + Sync), grid: &RadialGrid) -> Result<f64> {
    let g2 = grid.refined()?;
    let g4 = g2.refined()?;
    let e: Vec<f64> = [grid, &g2, &g4]
        .par_iter()
        .map(|g| Ok(eigenvalues(&assemble_mode_operator(k, alpha, profile, g)?, 1)?[0]))
        .collect::<Result<_>>()?;
    Ok(((e[0] - e[1]) / (e[1] - e[2])).abs().log2())
}

/// Solution of `(H - z) u = f` in mode values.
#[derive(Debug, Clone)]
pub struct ResolventSolution {
    pub u: Vec<Complex64>,
    /// `||(H - z) u - f|| / ||f||` in the plane norm.
    pub residual: f64,
    pub warning: Option<String>,
}

/// Applies `(H - z)^{-1}` to mode values `f(r_i)` given at the grid nodes.
pub fn resolvent_apply(op: &ModeOperator, z: Complex64, f: &[Complex64]) -> Result<ResolventSolution> {
    if f.len() != op.len() {
        return Err(Error::InvalidInput(format!("expected {} values, got {}", op.len(), f.len())));
    }
    if z.im == 0.0 && z.re >= 0.0 {
        return Err(Error::InvalidInput(format!("z = {z} lies on the spectrum half-line")));
    }
    let y = op.to_symmetric(f);
    let x = thomas(op, z, &y)?;
    let hx = op.apply(&x);
    let res: f64 = hx.iter().zip(&x).zip(&y).map(|((h, x), y)| (h - z * x - y).norm_sqr()).sum::<f64>().sqrt();
    let norm: f64 = y.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
    let lowest = eigenvalues(op, 1)?[0];
    let distance = (z - lowest).norm().min(z.im.abs().max(if z.re < 0.0 { -z.re } else { 0.0 }));
    let warning = (distance < 1e-8 * lowest.abs().max(1.0))
        .then(|| format!("z = {z} is within {distance:e} of the spectrum"));
    Ok(ResolventSolution { u: op.from_symmetric(&x), residual: if norm > 0.0 { res / norm } else { 0.0 }, warning })
}

/// Plane norm `(int |f|^2 r dr)^{1/2}` of mode values.
pub fn mode_norm(grid: &RadialGrid, f: &[Complex64]) -> f64 {
    f.iter().zip(grid.plane_weights()).map(|(v, w)| v.norm_sqr() * w).sum::<f64>().sqrt()
}

/// Row of the resolvent convergence study.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResolventRow {
    pub alpha: f64,
    /// `||u_alpha - u_0|| / ||u_0||`.
    pub relative_gap: f64,
    pub residual: f64,
}

/// `(H_alpha - z)^{-1} f` against `(H_0 - z)^{-1} f` in mode `k` for `S = 0`.
pub fn resolvent_study(
    alphas: &[f64],
    k: i32,
    z: Complex64,
    source: &(dyn Fn(f64) -> f64 + Sync),
    grid: &RadialGrid,
) -> Result<Vec<ResolventRow>> {
    let zero = |_: f64| 0.0;
    let f: Vec<Complex64> = grid.nodes().iter().map(|&r| source(r).into()).collect();
    let base = resolvent_apply(&assemble_mode_operator(k, 0.0, &zero, grid)?, z, &f)?;
    let base_norm = mode_norm(grid, &base.u);
    alphas
        .par_iter()
        .map(|&alpha| {
            let sol = resolvent_apply(&assemble_mode_operator(k, alpha, &zero, grid)?, z, &f)?;
            let diff: Vec<Complex64> = sol.u.iter().zip(&base.u).map(|(a, b)| a - b).collect();
            Ok(ResolventRow { alpha, relative_gap: mode_norm(grid, &diff) / base_norm, residual: sol.residual })
        })
        .collect()
}

/// Mode profile `(f, f')` near the origin from the first cells of an
/// eigenvector, using `w(r) ~ a + b r^2`.
pub fn profile_near_origin(op: &ModeOperator, y: &[f64]) -> impl Fn(f64) -> (f64, f64) {
    let (r1, r2) = (op.grid.centres[0], op.grid.centres[1]);
    let w1 = y[0] / op.mass[0].sqrt();
    let w2 = y[1] / op.mass[1].sqrt();
    let b = (w2 - w1) / (r2 * r2 - r1 * r1);
    let a = w1 - b * r1 * r1;
    let nu = op.nu;
    move |r: f64| {
        let w = a + b * r * r;
        let dw = 2.0 * b * r;
        let f = r.powf(nu) * w;
        (f, nu * f / r + r.powf(nu) * dw)
    }
}
