//! Run configuration: file loading, flag overrides and validation.

use std::path::{Path, PathBuf};

use clap::Args;
use num_complex::Complex64;
use serde::Deserialize;

use crate::error::{Error, Result};
use crate::fields::{Cutoff, PerturbationField};
use crate::forms::{GaussianMode, GridSpec, HermitianCoupling, RegularPart};
use crate::spectral::RadialGrid;

/// Perturbing field description.
#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldConfig {
    /// `zero`, `homogeneous`, `capped`, `sheared` or `tabulated`.
    pub kind: Option<String>,
    pub b: Option<f64>,
    pub cap_radius: Option<f64>,
    /// Two-column text file `r s(r)` for tabulated profiles.
    pub path: Option<PathBuf>,
    pub offset: Option<[f64; 2]>,
}

/// Extension parameter `beta`.
#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BetaConfig {
    pub b00: Option<f64>,
    pub b11: Option<f64>,
    pub b01_re: Option<f64>,
    pub b01_im: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub r_max: Option<f64>,
    pub n: Option<usize>,
    pub grading: Option<f64>,
    pub n_theta: Option<usize>,
    pub max_panel: Option<f64>,
}

/// Gaussian mode `(re, im) r^power e^{-r^2/(2 width^2)} e^{i m theta}`.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModeConfig {
    pub re: f64,
    pub im: f64,
    pub m: i32,
    pub power: f64,
    pub width: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrialConfig {
    /// `[re q0, im q0, re q-1, im q-1]`.
    pub charges: Option<[f64; 4]>,
    pub modes: Option<Vec<ModeConfig>>,
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ToleranceConfig {
    pub quad_rel: Option<f64>,
}

/// Everything a subcommand may read. Unset keys fall back to per-command defaults.
#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub raw: Option<f64>,
    pub alpha: Option<f64>,
    pub alphas: Option<Vec<f64>>,
    pub k: Option<i32>,
    pub lambda: Option<f64>,
    pub lambdas: Option<Vec<f64>>,
    pub bracket: Option<[f64; 2]>,
    pub cutoff: Option<[f64; 2]>,
    pub cutoffs: Option<Vec<[f64; 2]>>,
    pub radii: Option<Vec<f64>>,
    pub count: Option<usize>,
    pub z: Option<[f64; 2]>,
    pub output: Option<PathBuf>,
    #[serde(default)]
    pub field: FieldConfig,
    #[serde(default)]
    pub beta: BetaConfig,
    #[serde(default)]
    pub grid: GridConfig,
    #[serde(default)]
    pub trial: TrialConfig,
    #[serde(default)]
    pub tolerances: ToleranceConfig,
}

/// Command-line overrides shared by every subcommand.
#[derive(Debug, Clone, Default, Args)]
pub struct Overrides {
    /// TOML or JSON configuration file.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Output file; stdout when absent.
    #[arg(long, short)]
    pub output: Option<PathBuf>,
    /// Unreduced flux.
    #[arg(long)]
    pub raw: Option<f64>,
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Comma-separated flux list.
    #[arg(long, allow_hyphen_values = true, value_delimiter = ',')]
    pub alphas: Option<Vec<f64>>,
    #[arg(long)]
    pub k: Option<i32>,
    #[arg(long)]
    pub lambda: Option<f64>,
    #[arg(long, allow_hyphen_values = true, value_delimiter = ',')]
    pub lambdas: Option<Vec<f64>>,
    /// `lo,hi`.
    #[arg(long, allow_hyphen_values = true, value_delimiter = ',')]
    pub bracket: Option<Vec<f64>>,
    /// `inner,outer`.
    #[arg(long, allow_hyphen_values = true, value_delimiter = ',')]
    pub cutoff: Option<Vec<f64>>,
    #[arg(long, allow_hyphen_values = true, value_delimiter = ',')]
    pub radii: Option<Vec<f64>>,
    /// Number of eigenvalues.
    #[arg(long)]
    pub count: Option<usize>,
    /// Spectral parameter `re,im`.
    #[arg(long, allow_hyphen_values = true, value_delimiter = ',')]
    pub z: Option<Vec<f64>>,
    /// Field kind: zero, homogeneous, capped, sheared, tabulated.
    #[arg(long)]
    pub field: Option<String>,
    #[arg(long)]
    pub b: Option<f64>,
    #[arg(long)]
    pub cap_radius: Option<f64>,
    #[arg(long)]
    pub field_file: Option<PathBuf>,
    /// `b00,b11,re b01,im b01`.
    #[arg(long, allow_hyphen_values = true, value_delimiter = ',')]
    pub beta: Option<Vec<f64>>,
    #[arg(long)]
    pub r_max: Option<f64>,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub grading: Option<f64>,
    #[arg(long)]
    pub n_theta: Option<usize>,
    #[arg(long)]
    pub max_panel: Option<f64>,
    /// `re q0,im q0,re q-1,im q-1`.
    #[arg(long, allow_hyphen_values = true, value_delimiter = ',')]
    pub charges: Option<Vec<f64>>,
    #[arg(long)]
    pub quad_rel: Option<f64>,
}

fn fixed<const N: usize>(key: &str, v: &Option<Vec<f64>>) -> Result<Option<[f64; N]>> {
    v.as_ref()
        .map(|v| <[f64; N]>::try_from(v.as_slice()).map_err(|_| Error::config(key, format!("expected {N} values, got {}", v.len()))))
        .transpose()
}

impl RunConfig {
    /// Parses a TOML file, or JSON when the extension is `.json`.
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::config("config", format!("{}: {e}", path.display())))?;
        let is_json = path.extension().is_some_and(|e| e.eq_ignore_ascii_case("json"));
        if is_json {
            serde_json::from_str(&text).map_err(|e| Error::config("config", e.to_string()))
        } else {
            toml::from_str(&text).map_err(|e| Error::config("config", e.message().to_string()))
        }
    }

    /// File values, if any, overridden by flags.
    pub fn resolve(flags: &Overrides) -> Result<Self> {
        let mut cfg = match &flags.config {
            Some(path) => Self::from_file(path)?,
            None => Self::default(),
        };
        macro_rules! take {
            ($($dst:expr => $src:expr),* $(,)?) => {
                $(if let Some(v) = $src.clone() { $dst = Some(v); })*
            };
        }
        take! {
            cfg.output => flags.output,
            cfg.raw => flags.raw,
            cfg.alpha => flags.alpha,
            cfg.alphas => flags.alphas,
            cfg.k => flags.k,
            cfg.lambda => flags.lambda,
            cfg.lambdas => flags.lambdas,
            cfg.radii => flags.radii,
            cfg.count => flags.count,
            cfg.field.kind => flags.field,
            cfg.field.b => flags.b,
            cfg.field.cap_radius => flags.cap_radius,
            cfg.field.path => flags.field_file,
            cfg.grid.r_max => flags.r_max,
            cfg.grid.n => flags.n,
            cfg.grid.grading => flags.grading,
            cfg.grid.n_theta => flags.n_theta,
            cfg.grid.max_panel => flags.max_panel,
            cfg.tolerances.quad_rel => flags.quad_rel,
        }
        take! {
            cfg.bracket => fixed::<2>("bracket", &flags.bracket)?,
            cfg.cutoff => fixed::<2>("cutoff", &flags.cutoff)?,
            cfg.z => fixed::<2>("z", &flags.z)?,
            cfg.trial.charges => fixed::<4>("charges", &flags.charges)?,
        }
        if let Some([b00, b11, re, im]) = fixed::<4>("beta", &flags.beta)? {
            cfg.beta = BetaConfig { b00: Some(b00), b11: Some(b11), b01_re: Some(re), b01_im: Some(im) };
        }
        cfg.check_ranges()?;
        Ok(cfg)
    }

    /// Range checks on every key that is present.
    pub fn check_ranges(&self) -> Result<()> {
        let finite = |key: &str, v: f64| {
            if v.is_finite() {
                Ok(())
            } else {
                Err(Error::config(key, format!("must be finite, got {v}")))
            }
        };
        let flux = |key: &str, v: f64| {
            if v > 0.0 && v < 1.0 {
                Ok(())
            } else {
                Err(Error::config(key, format!("flux must lie in (0, 1), got {v}")))
            }
        };
        let positive = |key: &str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(Error::config(key, format!("must be positive, got {v}")))
            }
        };
        if let Some(v) = self.raw {
            finite("raw", v)?;
        }
        if let Some(v) = self.alpha {
            if !(0.0..1.0).contains(&v) {
                return Err(Error::config("alpha", format!("flux must lie in [0, 1), got {v}")));
            }
        }
        if let Some(list) = &self.alphas {
            if list.is_empty() {
                return Err(Error::config("alphas", "list is empty"));
            }
            list.iter().try_for_each(|&v| flux("alphas", v))?;
        }
        if let Some(k) = self.k {
            if !(-50..=50).contains(&k) {
                return Err(Error::config("k", format!("mode index must lie in [-50, 50], got {k}")));
            }
        }
        if let Some(v) = self.lambda {
            positive("lambda", v)?;
        }
        if let Some(list) = &self.lambdas {
            if list.is_empty() {
                return Err(Error::config("lambdas", "list is empty"));
            }
            list.iter().try_for_each(|&v| positive("lambdas", v))?;
        }
        if let Some([lo, hi]) = self.bracket {
            if !(lo > 0.0 && hi > lo && hi.is_finite()) {
                return Err(Error::config("bracket", format!("need 0 < lo < hi, got ({lo}, {hi})")));
            }
        }
        let cutoffs = self.cutoff.iter().chain(self.cutoffs.iter().flatten());
        for &[a, b] in cutoffs {
            if !(a > 0.0 && b > a && b.is_finite()) {
                return Err(Error::config("cutoff", format!("need 0 < inner < outer, got ({a}, {b})")));
            }
        }
        if let Some(radii) = &self.radii {
            radii.iter().try_for_each(|&v| positive("radii", v))?;
        }
        if let Some(c) = self.count {
            if !(1..=10).contains(&c) {
                return Err(Error::config("count", format!("must lie in 1..=10, got {c}")));
            }
        }
        if let Some([re, im]) = self.z {
            finite("z", re)?;
            finite("z", im)?;
            if im == 0.0 && re >= 0.0 {
                return Err(Error::config("z", format!("{re} lies on the spectrum half-line [0, inf)")));
            }
        }
        if let Some(kind) = &self.field.kind {
            if !["zero", "homogeneous", "capped", "sheared", "tabulated"].contains(&kind.as_str()) {
                return Err(Error::config("field.kind", format!("unknown field kind `{kind}`")));
            }
        }
        if let Some(v) = self.field.b {
            finite("field.b", v)?;
        }
        if let Some(v) = self.field.cap_radius {
            positive("field.cap_radius", v)?;
        }
        if let Some(o) = self.field.offset {
            finite("field.offset", o[0])?;
            finite("field.offset", o[1])?;
        }
        for (key, v) in [
            ("beta.b00", self.beta.b00),
            ("beta.b11", self.beta.b11),
            ("beta.b01_re", self.beta.b01_re),
            ("beta.b01_im", self.beta.b01_im),
        ] {
            if let Some(v) = v {
                finite(key, v)?;
            }
        }
        if let Some(v) = self.grid.r_max {
            positive("grid.r_max", v)?;
        }
        if let Some(n) = self.grid.n {
            if !(200..=200_000).contains(&n) {
                return Err(Error::config("grid.n", format!("must lie in 200..=200000, got {n}")));
            }
        }
        if let Some(g) = self.grid.grading {
            if !(1.0..=4.0).contains(&g) {
                return Err(Error::config("grid.grading", format!("must lie in [1, 4], got {g}")));
            }
        }
        if let Some(n) = self.grid.n_theta {
            if !(8..=4096).contains(&n) {
                return Err(Error::config("grid.n_theta", format!("must lie in 8..=4096, got {n}")));
            }
        }
        if let Some(v) = self.grid.max_panel {
            positive("grid.max_panel", v)?;
        }
        if let Some(q) = self.trial.charges {
            q.iter().try_for_each(|&v| finite("trial.charges", v))?;
        }
        for mode in self.trial.modes.iter().flatten() {
            finite("trial.modes", mode.re)?;
            finite("trial.modes", mode.im)?;
            positive("trial.modes.width", mode.width)?;
            if mode.power < 0.0 {
                return Err(Error::config("trial.modes.power", format!("must be non-negative, got {}", mode.power)));
            }
        }
        if let Some(v) = self.tolerances.quad_rel {
            if !(1e-15..1.0).contains(&v) {
                return Err(Error::config("tolerances.quad_rel", format!("must lie in [1e-15, 1), got {v}")));
            }
        }
        Ok(())
    }

    pub fn require_alpha(&self) -> Result<f64> {
        match self.alpha {
            Some(a) if a > 0.0 => Ok(a),
            Some(a) => Err(Error::config("alpha", format!("flux must lie in (0, 1), got {a}"))),
            None => Err(Error::config("alpha", "missing")),
        }
    }

    /// `alphas`, else `[alpha]`, else the default list.
    pub fn alpha_list(&self, default: &[f64]) -> Vec<f64> {
        self.alphas.clone().or(self.alpha.map(|a| vec![a])).unwrap_or_else(|| default.to_vec())
    }

    pub fn lambda_list(&self, default: &[f64]) -> Vec<f64> {
        self.lambdas.clone().or(self.lambda.map(|l| vec![l])).unwrap_or_else(|| default.to_vec())
    }

    pub fn k_list(&self) -> Vec<i32> {
        self.k.map(|k| vec![k]).unwrap_or_else(|| vec![0, -1])
    }

    pub fn cutoff(&self) -> Result<Cutoff> {
        let [a, b] = self.cutoff.unwrap_or([0.5, 1.5]);
        Cutoff::new(a, b).map_err(|e| Error::config("cutoff", e.to_string()))
    }

    pub fn coupling(&self) -> HermitianCoupling {
        let b = &self.beta;
        HermitianCoupling::new(
            b.b00.unwrap_or(0.0),
            b.b11.unwrap_or(0.0),
            Complex64::new(b.b01_re.unwrap_or(0.0), b.b01_im.unwrap_or(0.0)),
        )
    }

    pub fn charges(&self) -> [Complex64; 2] {
        let q = self.trial.charges.unwrap_or([1.0, 0.0, 0.5, -0.5]);
        [Complex64::new(q[0], q[1]), Complex64::new(q[2], q[3])]
    }

    /// Regular part built from `trial.modes`, by default two Gaussian modes.
    pub fn regular_part(&self) -> Result<RegularPart> {
        let default = [
            ModeConfig { re: 0.5, im: -0.2, m: 0, power: 1.0, width: 1.0 },
            ModeConfig { re: 0.1, im: 0.3, m: -1, power: 1.0, width: 0.8 },
        ];
        let modes = self.trial.modes.as_deref().unwrap_or(&default);
        let mut part = RegularPart::zero();
        for m in modes {
            let mode = GaussianMode::new(Complex64::new(m.re, m.im), m.m, m.power, m.width)
                .map_err(|e| Error::config("trial.modes", e.to_string()))?;
            part = part.with_field(mode);
        }
        Ok(part)
    }

    /// Field built from the `field` section; `default_kind` applies when unset.
    pub fn perturbation(&self, default_kind: &str) -> Result<PerturbationField> {
        let f = &self.field;
        let b = f.b.unwrap_or(1.0);
        let kind = f.kind.as_deref().unwrap_or(default_kind);
        let wrap = |e: Error| Error::config("field", e.to_string());
        let field = match kind {
            "zero" => PerturbationField::zero(),
            "homogeneous" => PerturbationField::homogeneous(b),
            "capped" => PerturbationField::capped_homogeneous(b, f.cap_radius.unwrap_or(2.0)).map_err(wrap)?,
            "sheared" => PerturbationField::sheared(b),
            "tabulated" => {
                let path = f.path.as_ref().ok_or_else(|| Error::config("field.path", "tabulated field needs a file"))?;
                let (radii, values) = read_columns(path)?;
                PerturbationField::tabulated(radii, values, f.cap_radius).map_err(wrap)?
            }
            other => return Err(Error::config("field.kind", format!("unknown field kind `{other}`"))),
        };
        Ok(match f.offset {
            Some(o) => field.with_offset(o),
            None => field,
        })
    }

    pub fn grid_spec(&self) -> GridSpec {
        let base = GridSpec::default();
        GridSpec {
            n_theta: self.grid.n_theta.unwrap_or(base.n_theta),
            max_panel: self.grid.max_panel.unwrap_or(base.max_panel),
            r_max: self.grid.r_max,
        }
    }

    pub fn radial_grid(&self, r_max: f64, n: usize) -> Result<RadialGrid> {
        RadialGrid::new(
            self.grid.r_max.unwrap_or(r_max),
            self.grid.n.unwrap_or(n),
            self.grid.grading.unwrap_or(2.0),
        )
        .map_err(|e| Error::config("grid", e.to_string()))
    }

    pub fn quad_rel(&self) -> f64 {
        self.tolerances.quad_rel.unwrap_or(1e-10)
    }
}

/// Two whitespace-separated columns; `#` starts a comment.
fn read_columns(path: &Path) -> Result<(Vec<f64>, Vec<f64>)> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::config("field.path", format!("{}: {e}", path.display())))?;
    let mut radii = Vec::new();
    let mut values = Vec::new();
    for (line_no, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let cols: Vec<f64> = line
            .split(|c: char| c.is_whitespace() || c == ',')
            .filter(|s| !s.is_empty())
            .map(str::parse)
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| Error::config("field.path", format!("line {}: {e}", line_no + 1)))?;
        if cols.len() != 2 {
            return Err(Error::config("field.path", format!("line {}: expected 2 columns", line_no + 1)));
        }
        radii.push(cols[0]);
        values.push(cols[1]);
    }
    Ok((radii, values))
}
