//! One function per subcommand, each producing a report.

use num_complex::Complex64;
use rayon::prelude::*;
use serde_json::json;

use super::config::RunConfig;
use super::output::{Cell, Table};
use crate::error::{Error, Result};
use crate::extensions::bound_states;
use crate::fields::FluxParameter;
use crate::forms::{qbeta_breakdown, qbeta_eval, xi_matrix, GaussianMode, GridSpec, RegularPart, TrialFunction};
use crate::greens::{defect_residual, green_asymptotic, green_norm_closed, green_norm_quadrature, GreenFunction};
use crate::spectral::{extrapolated_eigenvalues, gamma_recovery_study, resolvent_study};

/// Result of a subcommand.
#[derive(Debug, Clone)]
pub enum Artifact {
    Csv(Table),
    Json(serde_json::Value),
}

impl Artifact {
    pub fn render(&self) -> String {
        match self {
            Artifact::Csv(t) => t.to_csv(),
            Artifact::Json(v) => {
                let mut s = serde_json::to_string_pretty(v).unwrap_or_default();
                s.push('\n');
                s
            }
        }
    }
}

#[derive(Debug, Clone)]
pub struct Report {
    pub artifact: Artifact,
    pub summary: String,
    /// Whether the command itself judged its result acceptable.
    pub passed: bool,
}

impl Report {
    fn ok(table: Table, summary: String) -> Self {
        Report { artifact: Artifact::Csv(table), summary, passed: true }
    }
}

const GAMMA_ALPHAS: [f64; 5] = [0.2, 0.1, 0.05, 0.025, 0.0125];

pub fn reduce(cfg: &RunConfig) -> Result<Report> {
    let raw = cfg.raw.ok_or_else(|| Error::config("raw", "missing"))?;
    let flux = FluxParameter::reduce(raw)?;
    Ok(Report {
        artifact: Artifact::Json(json!({
            "alpha": flux.alpha,
            "ell": flux.ell,
            "conjugated": flux.conjugated,
        })),
        summary: format!("reduce: {raw} -> alpha = {}, ell = {}, conjugated = {}", flux.alpha, flux.ell, flux.conjugated),
        passed: true,
    })
}

pub fn green(cfg: &RunConfig) -> Result<Report> {
    let alpha = cfg.require_alpha()?;
    let lambda = cfg.lambda.unwrap_or(1.0);
    let radii = cfg.radii.clone().unwrap_or_else(|| vec![1e-3, 1e-2, 0.1, 0.5, 1.0, 2.0, 5.0]);
    let mut table = Table::new(&[
        "alpha",
        "k",
        "lambda",
        "r",
        "value",
        "derivative",
        "asymptotic",
        "remainder",
        "defect_residual",
    ]);
    for k in cfg.k_list() {
        let g = GreenFunction::new(alpha, k, lambda)?;
        for &r in &radii {
            let (asym, rem) = match green_asymptotic(alpha, k, lambda, r) {
                Ok(a) => (a.value, a.remainder),
                Err(Error::AsymptoticRange(_)) => (f64::NAN, f64::NAN),
                Err(e) => return Err(e),
            };
            table.push(vec![
                alpha.into(),
                k.into(),
                lambda.into(),
                r.into(),
                g.radial(r)?.into(),
                g.radial_derivative(r)?.into(),
                asym.into(),
                rem.into(),
                defect_residual(alpha, k, lambda, r)?.into(),
            ]);
        }
    }
    let n = table.rows.len();
    Ok(Report::ok(table, format!("green: {n} samples at alpha = {alpha}, lambda = {lambda}")))
}

pub fn norms(cfg: &RunConfig) -> Result<Report> {
    let alphas = cfg.alpha_list(&[0.1, 0.3, 0.5, 0.7, 0.9]);
    let lambdas = cfg.lambda_list(&[0.5, 1.0, 2.0]);
    let rel = cfg.quad_rel();
    let mut points = Vec::new();
    for &alpha in &alphas {
        for k in cfg.k_list() {
            points.extend(lambdas.iter().map(|&lambda| (alpha, k, lambda)));
        }
    }
    let rows: Vec<Vec<Cell>> = points
        .par_iter()
        .map(|&(alpha, k, lambda)| {
            let closed = green_norm_closed(alpha, k, lambda)?;
            let quad = green_norm_quadrature(alpha, k, lambda, rel)?;
            let rel_err = (quad.value - closed).abs() / closed;
            Ok(vec![alpha.into(), k.into(), lambda.into(), closed.into(), quad.value.into(), rel_err.into()])
        })
        .collect::<Result<_>>()?;
    let worst = rows
        .iter()
        .filter_map(|r| match r[5] {
            Cell::Float(v) => Some(v),
            _ => None,
        })
        .fold(0.0, f64::max);
    let mut table = Table::new(&["alpha", "k", "lambda", "closed", "quadrature", "rel_err"]);
    table.rows = rows;
    Ok(Report::ok(table, format!("norms: {} points, worst relative error {worst:.3e}", points.len())))
}

pub fn xi(cfg: &RunConfig) -> Result<Report> {
    let alphas = cfg.alpha_list(&[0.3, 0.5]);
    let lambdas = cfg.lambda_list(&[0.5, 1.0, 2.0]);
    let field = cfg.perturbation("capped")?;
    let cutoff = cfg.cutoff()?;
    let grid = cfg.grid_spec();
    let mut table = Table::new(&[
        "alpha",
        "lambda",
        "xi00",
        "xi00_err",
        "xi11",
        "xi11_err",
        "xi01_re",
        "xi01_im",
        "xi01_err",
        "asymmetry",
        "null_re",
        "null_im",
        "null_err",
    ]);
    let mut worst: f64 = 0.0;
    for &alpha in &alphas {
        for &lambda in &lambdas {
            let psi = TrialFunction::new(
                alpha,
                lambda,
                [Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)],
                cutoff,
                field.clone(),
                RegularPart::zero(),
            )?;
            let m = xi_matrix(&psi, &grid)?;
            worst = worst.max(m.asymmetry());
            table.push(vec![
                alpha.into(),
                lambda.into(),
                m.entries[0][0].re.into(),
                m.errors[0][0].into(),
                m.entries[1][1].re.into(),
                m.errors[1][1].into(),
                m.entries[0][1].re.into(),
                m.entries[0][1].im.into(),
                m.errors[0][1].into(),
                m.asymmetry().into(),
                m.null_entry.re.into(),
                m.null_entry.im.into(),
                m.null_error.into(),
            ]);
        }
    }
    Ok(Report::ok(table, format!("xi: {} matrices, field {}, largest asymmetry {worst:.3e}", alphas.len() * lambdas.len(), field.label())))
}

fn trial(cfg: &RunConfig, alpha: f64, lambda: f64, default_field: &str) -> Result<TrialFunction> {
    TrialFunction::new(
        alpha,
        lambda,
        cfg.charges(),
        cfg.cutoff()?,
        cfg.perturbation(default_field)?,
        cfg.regular_part()?,
    )
}

pub fn qbeta(cfg: &RunConfig) -> Result<Report> {
    let alpha = cfg.require_alpha()?;
    let lambda = cfg.lambda.unwrap_or(1.0);
    let psi = trial(cfg, alpha, lambda, "zero")?;
    let b = qbeta_breakdown(&psi, &cfg.coupling(), &cfg.grid_spec())?;
    let mut table = Table::new(&[
        "alpha",
        "lambda",
        "friedrichs",
        "psi_norm_sq",
        "phi_norm_sq",
        "mass_shift",
        "cross",
        "charge_block",
        "total",
        "error",
    ]);
    table.push(vec![
        alpha.into(),
        lambda.into(),
        b.friedrichs.into(),
        b.psi_norm_sq.into(),
        b.phi_norm_sq.into(),
        b.mass_shift.into(),
        b.cross.into(),
        b.charge_block.into(),
        b.total.into(),
        b.error.into(),
    ]);
    Ok(Report::ok(table, format!("qbeta: Q = {:.10e} +- {:.1e}", b.total, b.error)))
}

pub fn lambda_invariance(cfg: &RunConfig) -> Result<Report> {
    let alpha = cfg.require_alpha()?;
    let lambdas = cfg.lambda_list(&[1.0, 2.0]);
    let cutoffs = cfg.cutoffs.clone().unwrap_or_else(|| vec![[0.5, 1.5], [1.0, 3.0]]);
    let beta = cfg.coupling();
    let grid = cfg.grid_spec();
    let base = trial(cfg, alpha, lambdas[0], "capped")?;
    let cases: Vec<(f64, [f64; 2])> = lambdas.iter().flat_map(|&l| cutoffs.iter().map(move |&c| (l, c))).collect();
    let values: Vec<(f64, f64)> = cases
        .par_iter()
        .map(|&(lambda, [a, b])| {
            let cutoff = crate::fields::Cutoff::new(a, b).map_err(|e| Error::config("cutoffs", e.to_string()))?;
            let psi = base.change_lambda(lambda)?.change_cutoff(cutoff);
            let q = qbeta_eval(&psi, &beta, &grid)?;
            Ok((q.value, q.error))
        })
        .collect::<Result<_>>()?;
    let reference = values[0].0;
    let scale = reference.abs().max(1.0);
    let mut table = Table::new(&["lambda", "cutoff_inner", "cutoff_outer", "value", "error", "rel_dev"]);
    let mut worst: f64 = 0.0;
    for (&(lambda, [a, b]), &(value, error)) in cases.iter().zip(&values) {
        let dev = (value - reference).abs() / scale;
        worst = worst.max(dev);
        table.push(vec![lambda.into(), a.into(), b.into(), value.into(), error.into(), dev.into()]);
    }
    Ok(Report::ok(table, format!("lambda-invariance: {} representations, largest relative deviation {worst:.3e}", cases.len())))
}

pub fn boundstates(cfg: &RunConfig) -> Result<Report> {
    let alpha = cfg.require_alpha()?;
    let [lo, hi] = cfg.bracket.unwrap_or([0.1, 10.0]);
    let found = bound_states(&cfg.coupling(), alpha, (lo, hi))?;
    let mut table = Table::new(&["alpha", "lambda_star", "energy", "q0_re", "q0_im", "q1_re", "q1_im"]);
    for s in &found.states {
        table.push(vec![
            alpha.into(),
            s.lambda.into(),
            s.energy.into(),
            s.charges[0].re.into(),
            s.charges[0].im.into(),
            s.charges[1].re.into(),
            s.charges[1].im.into(),
        ]);
    }
    let mut summary = format!("boundstates: {} state(s) in ({lo}, {hi})", found.states.len());
    if let Some(w) = &found.warning {
        summary.push_str(&format!("; warning: {w}"));
    }
    Ok(Report::ok(table, summary))
}

pub fn spectrum(cfg: &RunConfig) -> Result<Report> {
    let alphas = cfg.alpha_list(&[0.3, 0.5]);
    let ks = cfg.k_list();
    let count = cfg.count.unwrap_or(3);
    let field = cfg.perturbation("homogeneous")?;
    let profile = field
        .azimuthal_profile()
        .ok_or_else(|| Error::config("field.kind", "the spectrum needs an azimuthal field"))?;
    if field.at_origin() != [0.0, 0.0] {
        return Err(Error::config("field.offset", "the spectrum needs a field without offset"));
    }
    let grid = cfg.radial_grid(20.0, 800)?;
    let cases: Vec<(f64, i32)> = alphas.iter().flat_map(|&a| ks.iter().map(move |&k| (a, k))).collect();
    let levels: Vec<_> = cases
        .par_iter()
        .map(|&(alpha, k)| extrapolated_eigenvalues(k, alpha, profile, &grid, count))
        .collect::<Result<_>>()?;
    let mut table = Table::new(&["alpha", "k", "n", "value", "error_estimate"]);
    for (&(alpha, k), est) in cases.iter().zip(&levels) {
        for (n, e) in est.iter().enumerate() {
            table.push(vec![alpha.into(), k.into(), n.into(), e.value.into(), e.error.into()]);
        }
    }
    Ok(Report::ok(table, format!("spectrum: {count} level(s) for {} (alpha, k) pairs, field {}", cases.len(), field.label())))
}

pub fn resolvent(cfg: &RunConfig) -> Result<Report> {
    let alphas = cfg.alpha_list(&GAMMA_ALPHAS);
    let k = cfg.k.unwrap_or(0);
    let [re, im] = cfg.z.unwrap_or([-1.0, 0.0]);
    let grid = cfg.radial_grid(12.0, 800)?;
    let rows = resolvent_study(&alphas, k, Complex64::new(re, im), &|r| (-r * r / 2.0).exp(), &grid)?;
    let mut table = Table::new(&["alpha", "k", "n", "value", "error_estimate"]);
    for row in &rows {
        table.push(vec![row.alpha.into(), k.into(), grid.n.into(), row.relative_gap.into(), row.residual.into()]);
    }
    let decreasing = rows.windows(2).all(|w| w[1].relative_gap < w[0].relative_gap);
    let ratio = rows.last().map_or(f64::NAN, |l| l.relative_gap) / rows[0].relative_gap;
    Ok(Report::ok(table, format!("resolvent: {} fluxes, decreasing = {decreasing}, last/first = {ratio:.3e}", rows.len())))
}

pub fn gamma(cfg: &RunConfig) -> Result<Report> {
    let alphas = cfg.alphas.clone().unwrap_or_else(|| GAMMA_ALPHAS.to_vec());
    let field = cfg.perturbation("zero")?;
    let mode = cfg.trial.modes.as_ref().and_then(|m| m.first()).cloned();
    let psi0 = match mode {
        Some(m) => GaussianMode::new(Complex64::new(m.re, m.im), m.m, m.power, m.width)
            .map_err(|e| Error::config("trial.modes", e.to_string()))?,
        None => GaussianMode::new(Complex64::new(1.0, 0.0), 0, 0.0, 1.0)?,
    };
    let coarse = GridSpec::coarse();
    let grid = GridSpec {
        n_theta: cfg.grid.n_theta.unwrap_or(coarse.n_theta),
        max_panel: cfg.grid.max_panel.unwrap_or(coarse.max_panel),
        r_max: cfg.grid.r_max,
    };
    let study = gamma_recovery_study(&psi0, &alphas, &field, &grid)?;
    let mut table = Table::new(&[
        "alpha",
        "q_alpha",
        "q_zero",
        "gap",
        "singular_norm",
        "singular_bound",
        "h1_gap",
        "error_estimate",
    ]);
    for r in &study.rows {
        table.push(vec![
            r.alpha.into(),
            r.q_alpha.into(),
            study.q0.into(),
            r.gap.into(),
            r.singular_norm.into(),
            r.singular_bound.into(),
            r.h1_gap.into(),
            r.error.into(),
        ]);
    }
    Ok(Report::ok(
        table,
        format!(
            "gamma: Q_0 = {:.10e}, gap decreasing = {}, last/first = {:.3e}",
            study.q0,
            study.gap_decreasing(),
            study.gap_ratio()
        ),
    ))
}
