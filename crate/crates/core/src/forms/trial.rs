//! Trial functions `psi = phi_lambda + e^{-i S(0).x} chi sum_k q_k G_lambda^(k)`.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fields::{Cutoff, PerturbationField, Point};
use crate::greens::{phase, radial_mode_gradient, GreenFunction, CHANNELS};

pub type CVector = [Complex64; 2];

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

/// A smooth regular function with known gradient.
pub trait RegularField: Send + Sync {
    fn value(&self, x: Point) -> Complex64;
    fn gradient(&self, x: Point) -> CVector;
    /// Exponent `g` with `|phi| = O(r^g)` at the origin; 0 for functions regular there.
    fn vanishing_rate(&self) -> f64;
    /// Radius beyond which the function is negligible.
    fn reach(&self) -> f64;
}

/// `amp r^power exp(-r^2 / (2 width^2)) e^{i m theta}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianMode {
    pub amplitude: Complex64,
    pub m: i32,
    pub power: f64,
    pub width: f64,
}

impl GaussianMode {
    pub fn new(amplitude: Complex64, m: i32, power: f64, width: f64) -> Result<Self> {
        if !(power >= 0.0 && width > 0.0) {
            return Err(Error::InvalidInput(format!("mode needs power >= 0 and width > 0, got ({power}, {width})")));
        }
        if m != 0 && power == 0.0 {
            return Err(Error::InvalidInput("non-radial mode must vanish at the origin".into()));
        }
        Ok(GaussianMode { amplitude, m, power, width })
    }

    fn radial(&self, r: f64) -> (f64, f64) {
        let w2 = self.width * self.width;
        let gauss = (-0.5 * r * r / w2).exp();
        if self.power == 0.0 {
            return (gauss, -r / w2 * gauss);
        }
        let f = r.powf(self.power) * gauss;
        (f, f * (self.power / r - r / w2))
    }
}

impl RegularField for GaussianMode {
    fn value(&self, x: Point) -> Complex64 {
        let r = x[0].hypot(x[1]);
        if r == 0.0 {
            return if self.power == 0.0 { self.amplitude } else { ZERO };
        }
        self.amplitude * self.radial(r).0 * phase(self.m, x, r)
    }

    fn gradient(&self, x: Point) -> CVector {
        let r = x[0].hypot(x[1]);
        if r == 0.0 {
            return [ZERO, ZERO];
        }
        let (f, df) = self.radial(r);
        let g = radial_mode_gradient(self.m, x, r, f, df);
        [self.amplitude * g[0], self.amplitude * g[1]]
    }

    fn vanishing_rate(&self) -> f64 {
        self.power
    }

    fn reach(&self) -> f64 {
        self.width * (9.0 + self.power)
    }
}

type ValueFn = dyn Fn(Point) -> Complex64 + Send + Sync;
type GradientFn = dyn Fn(Point) -> CVector + Send + Sync;

/// Regular part given by a value closure and a gradient closure.
#[derive(Clone)]
pub struct ClosureField {
    value: Arc<ValueFn>,
    gradient: Arc<GradientFn>,
    rate: f64,
    reach: f64,
}

impl ClosureField {
    pub fn new<V, G>(value: V, gradient: G, rate: f64, reach: f64) -> Self
    where
        V: Fn(Point) -> Complex64 + Send + Sync + 'static,
        G: Fn(Point) -> CVector + Send + Sync + 'static,
    {
        ClosureField { value: Arc::new(value), gradient: Arc::new(gradient), rate, reach }
    }
}

impl RegularField for ClosureField {
    fn value(&self, x: Point) -> Complex64 {
        (self.value)(x)
    }
    fn gradient(&self, x: Point) -> CVector {
        (self.gradient)(x)
    }
    fn vanishing_rate(&self) -> f64 {
        self.rate
    }
    fn reach(&self) -> f64 {
        self.reach
    }
}

/// Samples on an annular polar grid, interpolated by cubic splines in `r`
/// and trigonometric polynomials in `theta`.
#[derive(Debug, Clone)]
pub struct GriddedField {
    r_lo: f64,
    step: f64,
    /// Fourier coefficients per ring, modes `0..n_theta` in FFT order.
    coefficients: Vec<Vec<Complex64>>,
    rate: f64,
}

impl GriddedField {
    /// `samples[i][j]` is the value at radius `r_lo + i step` and angle `2 pi j / n_theta`.
    pub fn new(r_lo: f64, r_hi: f64, samples: Vec<Vec<Complex64>>, rate: f64) -> Result<Self> {
        let n_r = samples.len();
        if n_r < 4 || !(r_lo > 0.0 && r_hi > r_lo) {
            return Err(Error::InvalidInput("gridded field needs at least 4 rings on 0 < r_lo < r_hi".into()));
        }
        let n_theta = samples[0].len();
        if n_theta < 4 || samples.iter().any(|row| row.len() != n_theta) {
            return Err(Error::InvalidInput("gridded field rings must share at least 4 angular samples".into()));
        }
        let coefficients = samples
            .iter()
            .map(|row| {
                (0..n_theta)
                    .map(|m| {
                        let mut acc = ZERO;
                        for (j, v) in row.iter().enumerate() {
                            let angle = -2.0 * PI * (m * j) as f64 / n_theta as f64;
                            acc += v * Complex64::from_polar(1.0, angle);
                        }
                        acc / n_theta as f64
                    })
                    .collect()
            })
            .collect();
        Ok(GriddedField { r_lo, step: (r_hi - r_lo) / (n_r - 1) as f64, coefficients, rate })
    }

    fn r_hi(&self) -> f64 {
        self.r_lo + self.step * (self.coefficients.len() - 1) as f64
    }

    fn ring(&self, i: isize) -> &[Complex64] {
        let last = self.coefficients.len() as isize - 1;
        &self.coefficients[i.clamp(0, last) as usize]
    }

    fn interpolate(&self, r: f64, theta: f64) -> Complex64 {
        let n_theta = self.coefficients[0].len();
        let pos = (r - self.r_lo) / self.step;
        let i = (pos.floor() as isize).min(self.coefficients.len() as isize - 2);
        let t = pos - i as f64;
        let weights = [
            0.5 * (-t * t * t + 2.0 * t * t - t),
            0.5 * (3.0 * t * t * t - 5.0 * t * t + 2.0),
            0.5 * (-3.0 * t * t * t + 4.0 * t * t + t),
            0.5 * (t * t * t - t * t),
        ];
        let rows = [self.ring(i - 1), self.ring(i), self.ring(i + 1), self.ring(i + 2)];
        let mut total = ZERO;
        for m in 0..n_theta {
            let signed = if m <= n_theta / 2 { m as f64 } else { m as f64 - n_theta as f64 };
            let mut c = ZERO;
            for (row, w) in rows.iter().zip(weights) {
                c += row[m] * w;
            }
            total += c * Complex64::from_polar(1.0, signed * theta);
        }
        total
    }
}

impl RegularField for GriddedField {
    fn value(&self, x: Point) -> Complex64 {
        let r = x[0].hypot(x[1]);
        let theta = x[1].atan2(x[0]);
        if r >= self.r_hi() {
            ZERO
        } else if r < self.r_lo {
            self.interpolate(self.r_lo, theta) * (r / self.r_lo).powf(self.rate)
        } else {
            self.interpolate(r, theta)
        }
    }

    fn gradient(&self, x: Point) -> CVector {
        let h = 0.25 * self.step;
        let mut out = [ZERO; 2];
        for (axis, slot) in out.iter_mut().enumerate() {
            let at = |offset: f64| {
                let mut p = x;
                p[axis] += offset;
                self.value(p)
            };
            *slot = (at(-2.0 * h) - at(-h) * 8.0 + at(h) * 8.0 - at(2.0 * h)) / (12.0 * h);
        }
        out
    }

    fn vanishing_rate(&self) -> f64 {
        self.rate
    }

    fn reach(&self) -> f64 {
        self.r_hi()
    }
}

/// `coefficient e^{-i S(0).x} chi(r) G_lambda^(k)(x)` inside a regular part.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GreenTerm {
    pub k: i32,
    pub lambda: f64,
    pub cutoff: Cutoff,
    pub coefficient: Complex64,
}

/// Regular part: user fields plus combinations of Green functions whose
/// singular parts cancel.
#[derive(Clone, Default)]
pub struct RegularPart {
    pub fields: Vec<Arc<dyn RegularField>>,
    pub green_terms: Vec<GreenTerm>,
}

impl RegularPart {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn from_field(field: impl RegularField + 'static) -> Self {
        RegularPart { fields: vec![Arc::new(field)], green_terms: Vec::new() }
    }

    pub fn with_field(mut self, field: impl RegularField + 'static) -> Self {
        self.fields.push(Arc::new(field));
        self
    }

    /// Slowest vanishing rate among the user fields (`None` without fields).
    pub fn field_rate(&self) -> Option<f64> {
        self.fields.iter().map(|f| f.vanishing_rate()).reduce(f64::min)
    }

    pub fn reach(&self) -> f64 {
        let fields = self.fields.iter().map(|f| f.reach()).fold(0.0, f64::max);
        self.green_terms.iter().map(|t| t.cutoff.outer).fold(fields, f64::max)
    }
}

/// Hermitian 2x2 coupling `beta`, indexed by the channels `(0, -1)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HermitianCoupling {
    pub b00: f64,
    pub b11: f64,
    pub b01: Complex64,
}

impl HermitianCoupling {
    pub fn new(b00: f64, b11: f64, b01: Complex64) -> Self {
        HermitianCoupling { b00, b11, b01 }
    }

    pub fn diagonal(b00: f64, b11: f64) -> Self {
        Self::new(b00, b11, ZERO)
    }

    pub fn matrix(&self) -> [[Complex64; 2]; 2] {
        [[self.b00.into(), self.b01], [self.b01.conj(), self.b11.into()]]
    }
}

/// A trial function of the extended form domain.
#[derive(Clone)]
pub struct TrialFunction {
    pub alpha: f64,
    pub lambda: f64,
    /// Charges `(q^(0), q^(-1))`.
    pub charges: [Complex64; 2],
    pub cutoff: Cutoff,
    pub field: PerturbationField,
    pub regular: RegularPart,
}

/// Radial data of a Green combination `sum_j c_j chi_j(r) g_j(r)` in one channel.
#[derive(Debug, Clone, Copy, Default)]
pub(crate) struct ChannelRadial {
    pub value: Complex64,
    pub derivative: Complex64,
}

pub(crate) struct PreparedGreen {
    k: i32,
    green: GreenFunction,
    cutoff: Cutoff,
    coefficient: Complex64,
}

impl TrialFunction {
    pub fn new(
        alpha: f64,
        lambda: f64,
        charges: [Complex64; 2],
        cutoff: Cutoff,
        field: PerturbationField,
        regular: RegularPart,
    ) -> Result<Self> {
        if alpha == 0.0 {
            if charges.iter().any(|q| *q != ZERO) || !regular.green_terms.is_empty() {
                return Err(Error::InvalidInput("charges need a flux in (0, 1)".into()));
            }
        } else {
            crate::fields::check_alpha(alpha)?;
            GreenFunction::new(alpha, 0, lambda)?;
        }
        if charges.iter().any(|q| !q.is_finite()) {
            return Err(Error::InvalidInput("charges must be finite".into()));
        }
        let psi = TrialFunction { alpha, lambda, charges, cutoff, field, regular };
        psi.check_domain()?;
        Ok(psi)
    }

    /// Checks the declared vanishing rate and the form-domain asymptotics.
    pub fn check_domain(&self) -> Result<()> {
        let required = self.alpha.min(1.0 - self.alpha);
        if let Some(rate) = self.regular.field_rate() {
            if rate < required {
                return Err(Error::InsufficientDecay { rate, required });
            }
        }
        let mean = |r: f64| -> f64 {
            (0..16)
                .map(|j| {
                    let t = 2.0 * PI * j as f64 / 16.0;
                    self.regular_value([r * t.cos(), r * t.sin()]).map(|v| v.norm_sqr()).unwrap_or(f64::INFINITY)
                })
                .sum::<f64>()
                / 16.0
        };
        let (near, far) = (mean(1e-10), mean(1e-5));
        if !near.is_finite() || near > 10.0 * far + 1e-300 {
            return Err(Error::InvalidInput(format!(
                "regular part does not vanish at the origin: <|phi|^2>(1e-10) = {near:e}, <|phi|^2>(1e-5) = {far:e}"
            )));
        }
        Ok(())
    }

    /// Required origin exponent of the quadrature grid.
    pub(crate) fn origin_exponent(&self) -> f64 {
        let nu_min = self.alpha.min(1.0 - self.alpha);
        let field = match self.regular.field_rate() {
            Some(rate) if rate > 0.0 => 2.0 * rate,
            _ => 2.0,
        };
        if nu_min == 0.0 {
            field
        } else {
            (2.0 * nu_min).min(field)
        }
    }

    /// All radii at which integrands have kinks.
    pub(crate) fn breakpoints(&self) -> Vec<f64> {
        let mut points = vec![self.cutoff.inner, self.cutoff.outer];
        for t in &self.regular.green_terms {
            points.push(t.cutoff.inner);
            points.push(t.cutoff.outer);
        }
        points
    }

    pub(crate) fn phase_factor(&self, x: Point) -> Complex64 {
        let s0 = self.field.at_origin();
        Complex64::from_polar(1.0, -(s0[0] * x[0] + s0[1] * x[1]))
    }

    pub(crate) fn prepared_terms(&self) -> Result<Vec<PreparedGreen>> {
        self.regular
            .green_terms
            .iter()
            .map(|t| {
                Ok(PreparedGreen {
                    k: t.k,
                    green: GreenFunction::new(self.alpha, t.k, t.lambda)?,
                    cutoff: t.cutoff,
                    coefficient: t.coefficient,
                })
            })
            .collect()
    }

    pub(crate) fn charge_greens(&self) -> Result<[GreenFunction; 2]> {
        Ok([GreenFunction::new(self.alpha, 0, self.lambda)?, GreenFunction::new(self.alpha, -1, self.lambda)?])
    }

    /// Radial tables of the Green combinations inside the regular part,
    /// with the singular `r^{-nu}` pieces summed before they are scaled.
    pub(crate) fn channel_radials(terms: &[PreparedGreen], r: f64) -> Result<[ChannelRadial; 2]> {
        let mut out = [ChannelRadial::default(); 2];
        for (slot, &k) in out.iter_mut().zip(CHANNELS.iter()) {
            let mut weight = ZERO;
            let mut weight_d = ZERO;
            let mut lead = 0.0;
            let mut nu = 0.0;
            for t in terms.iter().filter(|t| t.k == k) {
                let (chi, dchi, _) = t.cutoff.eval(r);
                if chi == 0.0 && dchi == 0.0 {
                    continue;
                }
                let (reg, dreg) = t.green.regular_part(r)?;
                slot.value += t.coefficient * (chi * reg);
                slot.derivative += t.coefficient * (dchi * reg + chi * dreg);
                weight += t.coefficient * chi;
                weight_d += t.coefficient * dchi;
                lead = t.green.leading_coefficient();
                nu = t.green.order();
            }
            if lead != 0.0 {
                let sing = lead * r.powf(-nu);
                slot.value += weight * sing;
                slot.derivative += weight_d * sing - weight * (nu * sing / r);
            }
        }
        Ok(out)
    }

    /// Value and gradient of the regular part at `x != 0`.
    pub(crate) fn regular_at(&self, terms: &[PreparedGreen], radial: &[ChannelRadial; 2], x: Point) -> (Complex64, CVector) {
        let mut value = ZERO;
        let mut grad = [ZERO; 2];
        for f in &self.regular.fields {
            value += f.value(x);
            let g = f.gradient(x);
            grad[0] += g[0];
            grad[1] += g[1];
        }
        if !terms.is_empty() {
            let r = x[0].hypot(x[1]);
            let e = self.phase_factor(x);
            let s0 = self.field.at_origin();
            for (&k, rad) in CHANNELS.iter().zip(radial.iter()) {
                if rad.value == ZERO && rad.derivative == ZERO {
                    continue;
                }
                let ph = phase(k, x, r);
                let f = rad.value * ph;
                let (c, s) = (x[0] / r, x[1] / r);
                let dr = rad.derivative * ph;
                let dt = Complex64::new(0.0, k as f64 / r) * f;
                let gf = [dr * c - dt * s, dr * s + dt * c];
                value += e * f;
                grad[0] += e * (gf[0] - Complex64::new(0.0, s0[0]) * f);
                grad[1] += e * (gf[1] - Complex64::new(0.0, s0[1]) * f);
            }
        }
        (value, grad)
    }

    /// `phi_lambda(x)`.
    pub fn regular_value(&self, x: Point) -> Result<Complex64> {
        let r = x[0].hypot(x[1]);
        let terms = self.prepared_terms()?;
        let radial = if r > 0.0 { Self::channel_radials(&terms, r)? } else { [ChannelRadial::default(); 2] };
        Ok(self.regular_at(&terms, &radial, x).0)
    }

    /// `phi_lambda(x)` and its gradient at `x != 0`.
    pub fn regular_with_gradient(&self, x: Point) -> Result<(Complex64, CVector)> {
        let r = x[0].hypot(x[1]);
        if r == 0.0 {
            return Err(Error::OriginSingularity);
        }
        let terms = self.prepared_terms()?;
        let radial = Self::channel_radials(&terms, r)?;
        Ok(self.regular_at(&terms, &radial, x))
    }

    /// `psi(x)` at `x != 0`.
    pub fn value(&self, x: Point) -> Result<Complex64> {
        let r = x[0].hypot(x[1]);
        if r == 0.0 {
            return Err(Error::OriginSingularity);
        }
        let mut total = self.regular_value(x)?;
        let chi = self.cutoff.value(r);
        if chi != 0.0 {
            let e = self.phase_factor(x);
            for (q, g) in self.charges.iter().zip(self.charge_greens()?) {
                total += q * e * chi * g.eval(x)?;
            }
        }
        Ok(total)
    }

    /// The same function represented with spectral parameter `lambda2`.
    pub fn change_lambda(&self, lambda2: f64) -> Result<TrialFunction> {
        GreenFunction::new(self.alpha, 0, lambda2)?;
        let mut out = self.clone();
        if lambda2 == self.lambda {
            return Ok(out);
        }
        for (&k, &q) in CHANNELS.iter().zip(self.charges.iter()) {
            if q == ZERO {
                continue;
            }
            out.regular.green_terms.push(GreenTerm { k, lambda: self.lambda, cutoff: self.cutoff, coefficient: q });
            out.regular.green_terms.push(GreenTerm { k, lambda: lambda2, cutoff: self.cutoff, coefficient: -q });
        }
        out.lambda = lambda2;
        Ok(out)
    }

    /// The same function represented with a different cutoff.
    pub fn change_cutoff(&self, cutoff: Cutoff) -> TrialFunction {
        let mut out = self.clone();
        if cutoff == self.cutoff {
            return out;
        }
        for (&k, &q) in CHANNELS.iter().zip(self.charges.iter()) {
            if q == ZERO {
                continue;
            }
            out.regular.green_terms.push(GreenTerm { k, lambda: self.lambda, cutoff: self.cutoff, coefficient: q });
            out.regular.green_terms.push(GreenTerm { k, lambda: self.lambda, cutoff, coefficient: -q });
        }
        out.cutoff = cutoff;
        out
    }
}

pub(crate) fn cross(a: CVector, b: CVector) -> Complex64 {
    a[0].conj() * b[0] + a[1].conj() * b[1]
}
