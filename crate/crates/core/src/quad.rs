//! Gauss-Kronrod quadrature: a global adaptive integrator on finite
//! intervals and fixed composite rules on polar grids.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::f64::consts::PI;
use std::ops::{Add, Mul};

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::tolerances::Tolerances;

const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.0,
];

const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_208_980_393_482,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

/// Ten-point Gauss weights, attached to the odd-indexed Kronrod abscissae.
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

/// A value together with an absolute error estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate<T> {
    pub value: T,
    pub error: f64,
}

/// The 21 Kronrod nodes of `[a, b]` with Kronrod and embedded Gauss weights.
pub fn gk21_nodes(a: f64, b: f64) -> [(f64, f64, f64); 21] {
    let centre = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut out = [(0.0, 0.0, 0.0); 21];
    for i in 0..10 {
        let wg = if i % 2 == 1 { WG[i / 2] } else { 0.0 };
        out[2 * i] = (centre - half * XGK[i], half * WGK[i], half * wg);
        out[2 * i + 1] = (centre + half * XGK[i], half * WGK[i], half * wg);
    }
    out[20] = (centre, half * WGK[10], 0.0);
    out
}

/// One 21-point Kronrod application: `(kronrod, gauss, integral of |f|)`.
pub fn gk21<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> (f64, f64, f64) {
    let mut kron = 0.0;
    let mut gauss = 0.0;
    let mut abs = 0.0;
    for (x, wk, wg) in gk21_nodes(a, b) {
        let v = f(x);
        kron += wk * v;
        gauss += wg * v;
        abs += wk * v.abs();
    }
    (kron, gauss, abs)
}

struct Piece {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Piece {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Piece {}
impl PartialOrd for Piece {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Piece {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn piece<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> Piece {
    let (kron, gauss, abs) = gk21(f, a, b);
    let roundoff = 50.0 * f64::EPSILON * abs;
    Piece { a, b, value: kron, error: (kron - gauss).abs().max(roundoff) }
}

/// Global adaptive Gauss-Kronrod integration of `f` over `[a, b]`.
pub fn integrate<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, rel: f64, abs: f64) -> Result<Estimate<f64>> {
    if !(a.is_finite() && b.is_finite()) {
        return Err(Error::domain("integrate", "interval must be finite"));
    }
    if a == b {
        return Ok(Estimate { value: 0.0, error: 0.0 });
    }
    let limit = Tolerances::DEFAULT.quad_max_intervals;
    let mut heap = BinaryHeap::new();
    let first = piece(&mut f, a, b);
    let mut total = first.value;
    let mut error = first.error;
    heap.push(first);
    while error > abs.max(rel * total.abs()) {
        if heap.len() >= limit {
            return Err(Error::no_convergence(
                "adaptive quadrature",
                format!("[{a}, {b}]: error {error:e} after {limit} subintervals"),
            ));
        }
        let worst = heap.pop().expect("heap is never empty");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            heap.push(worst);
            break;
        }
        let left = piece(&mut f, worst.a, mid);
        let right = piece(&mut f, mid, worst.b);
        total += left.value + right.value - worst.value;
        error += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
    }
    let value: f64 = heap.iter().map(|p| p.value).sum();
    let error: f64 = heap.iter().map(|p| p.error).sum();
    Ok(Estimate { value, error })
}

/// Adaptive integration over consecutive segments of a sorted list of points.
pub fn integrate_segments<F: FnMut(f64) -> f64>(mut f: F, points: &[f64], rel: f64, abs: f64) -> Result<Estimate<f64>> {
    let mut value = 0.0;
    let mut error = 0.0;
    for w in points.windows(2) {
        let e = integrate(&mut f, w[0], w[1], rel, abs)?;
        value += e.value;
        error += e.error;
    }
    Ok(Estimate { value, error })
}

/// Layout of a composite radial rule on `[0, r_max]`.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialSpec {
    pub r_max: f64,
    /// Radii that must be panel edges.
    pub breakpoints: Vec<f64>,
    /// Positive exponent `e` such that the integrand behaves like `r^(e - 1)` at the origin.
    pub origin_exponent: f64,
    /// Radius of the innermost region, integrated after the substitution `r = inner * u^m`.
    pub inner_radius: f64,
    /// Ratio between consecutive panel edges near the origin.
    pub ratio: f64,
    /// Maximal panel width away from the origin.
    pub max_panel: f64,
}

impl RadialSpec {
    pub fn new(r_max: f64, origin_exponent: f64) -> Self {
        RadialSpec {
            r_max,
            breakpoints: Vec::new(),
            origin_exponent,
            inner_radius: 1e-3,
            ratio: 0.5,
            max_panel: 0.25,
        }
    }

    pub fn with_breakpoints(mut self, points: impl IntoIterator<Item = f64>) -> Self {
        self.breakpoints.extend(points);
        self
    }
}

/// Composite Gauss-Kronrod rule on `[0, r_max]` graded towards the origin.
#[derive(Debug, Clone)]
pub struct RadialRule {
    pub nodes: Vec<f64>,
    pub kronrod: Vec<f64>,
    pub gauss: Vec<f64>,
    panels: Vec<(usize, usize)>,
}

impl RadialRule {
    pub fn new(layout: &RadialSpec) -> Result<Self> {
        if !(layout.r_max > 0.0 && layout.origin_exponent > 0.0 && layout.ratio > 0.0 && layout.ratio < 1.0) {
            return Err(Error::InvalidInput(format!("bad radial layout {layout:?}")));
        }
        let mut breaks: Vec<f64> = layout
            .breakpoints
            .iter()
            .copied()
            .filter(|&b| b > 0.0 && b < layout.r_max)
            .collect();
        breaks.sort_by(f64::total_cmp);
        let first = breaks.first().copied().unwrap_or(layout.r_max).min(1.0);
        let inner = layout.inner_radius.min(0.5 * first);

        let mut rule = RadialRule { nodes: Vec::new(), kronrod: Vec::new(), gauss: Vec::new(), panels: Vec::new() };

        let power = (1.0 / layout.origin_exponent).max(1.0);
        let smallest_node = 0.5 * (1.0 - XGK[0]);
        let u_floor = ((1e-140 / inner).powf(1.0 / power) / smallest_node).clamp(1e-10, 0.5);
        let mut u_edges = vec![1.0];
        while u_edges.last().unwrap() * 0.25 > u_floor {
            let next = u_edges.last().unwrap() * 0.25;
            u_edges.push(next);
        }
        u_edges.push(u_floor);
        u_edges.push(0.0);
        u_edges.reverse();
        for w in u_edges.windows(2) {
            let start = rule.nodes.len();
            for (u, wk, wg) in gk21_nodes(w[0], w[1]) {
                let r = inner * u.powf(power);
                let jac = inner * power * u.powf(power - 1.0);
                if r > 0.0 {
                    rule.nodes.push(r);
                    rule.kronrod.push(wk * jac);
                    rule.gauss.push(wg * jac);
                }
            }
            rule.panels.push((start, rule.nodes.len()));
        }

        let mut edges = vec![inner];
        while edges.last().unwrap() / layout.ratio < first {
            let next = edges.last().unwrap() / layout.ratio;
            edges.push(next);
        }
        let mut stops: Vec<f64> = vec![first];
        stops.extend(breaks.iter().copied().filter(|&b| b > first));
        stops.push(layout.r_max);
        for &stop in &stops {
            let last = *edges.last().unwrap();
            if stop <= last * (1.0 + 1e-12) {
                continue;
            }
            let pieces = ((stop - last) / layout.max_panel).ceil().max(1.0) as usize;
            for i in 1..=pieces {
                edges.push(if i == pieces { stop } else { last + (stop - last) * i as f64 / pieces as f64 });
            }
        }
        for w in edges.windows(2) {
            let start = rule.nodes.len();
            for (r, wk, wg) in gk21_nodes(w[0], w[1]) {
                rule.nodes.push(r);
                rule.kronrod.push(wk);
                rule.gauss.push(wg);
            }
            rule.panels.push((start, rule.nodes.len()));
        }
        Ok(rule)
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Integrates values given at the rule nodes.
    pub fn apply<T>(&self, values: &[T]) -> Estimate<T>
    where
        T: Copy + Add<Output = T> + Mul<f64, Output = T> + Default + Magnitude,
    {
        let mut total = T::default();
        let mut error = 0.0;
        let mut abs = 0.0;
        for &(s, e) in &self.panels {
            let mut kron = T::default();
            let mut gauss = T::default();
            for ((&v, &wk), &wg) in values[s..e].iter().zip(&self.kronrod[s..e]).zip(&self.gauss[s..e]) {
                kron = kron + v * wk;
                gauss = gauss + v * wg;
                abs += v.magnitude() * wk;
            }
            total = total + kron;
            error += (kron + gauss * -1.0).magnitude();
        }
        Estimate { value: total, error: error + 50.0 * f64::EPSILON * abs }
    }

    /// Integrates `f` over `[0, r_max]`.
    pub fn integrate<F: Fn(f64) -> f64>(&self, f: F) -> Estimate<f64> {
        let values: Vec<f64> = self.nodes.iter().map(|&r| f(r)).collect();
        self.apply(&values)
    }
}

/// Absolute value used for error estimates.
pub trait Magnitude {
    fn magnitude(&self) -> f64;
}

impl Magnitude for f64 {
    fn magnitude(&self) -> f64 {
        self.abs()
    }
}

impl Magnitude for Complex64 {
    fn magnitude(&self) -> f64 {
        self.norm()
    }
}

/// Tensor grid of a radial rule and the angular trapezoid rule.
#[derive(Debug, Clone)]
pub struct PolarGrid {
    pub radial: RadialRule,
    pub n_theta: usize,
    cos: Vec<f64>,
    sin: Vec<f64>,
}

/// One node of a polar grid.
#[derive(Debug, Clone, Copy)]
pub struct PolarNode {
    pub r: f64,
    pub theta: f64,
    pub cos: f64,
    pub sin: f64,
}

impl PolarNode {
    pub fn point(&self) -> [f64; 2] {
        [self.r * self.cos, self.r * self.sin]
    }
}

impl PolarGrid {
    pub fn new(layout: &RadialSpec, n_theta: usize) -> Result<Self> {
        if n_theta < 4 {
            return Err(Error::InvalidInput(format!("need at least 4 angular nodes, got {n_theta}")));
        }
        let radial = RadialRule::new(layout)?;
        let (cos, sin) = (0..n_theta)
            .map(|j| {
                let t = 2.0 * PI * j as f64 / n_theta as f64;
                (t.cos(), t.sin())
            })
            .unzip();
        Ok(PolarGrid { radial, n_theta, cos, sin })
    }

    pub fn node(&self, i: usize, j: usize) -> PolarNode {
        PolarNode {
            r: self.radial.nodes[i],
            theta: 2.0 * PI * j as f64 / self.n_theta as f64,
            cos: self.cos[j],
            sin: self.sin[j],
        }
    }

    /// Angular averages of `f` on every ring, computed in parallel.
    pub fn ring_means<T, F>(&self, f: F) -> Vec<T>
    where
        T: Copy + Add<Output = T> + Mul<f64, Output = T> + Default + Send,
        F: Fn(usize, PolarNode) -> T + Sync,
    {
        let scale = 1.0 / self.n_theta as f64;
        (0..self.radial.len())
            .into_par_iter()
            .map(|i| {
                let mut acc = T::default();
                for j in 0..self.n_theta {
                    acc = acc + f(i, self.node(i, j));
                }
                acc * scale
            })
            .collect()
    }

    /// Plane integral `int f dx` over the disc of radius `r_max`.
    pub fn integrate<T, F>(&self, f: F) -> Estimate<T>
    where
        T: Copy + Add<Output = T> + Mul<f64, Output = T> + Default + Send + Magnitude,
        F: Fn(usize, PolarNode) -> T + Sync,
    {
        let means = self.ring_means(f);
        let weighted: Vec<T> = means
            .iter()
            .zip(&self.radial.nodes)
            .map(|(&m, &r)| m * (2.0 * PI * r))
            .collect();
        self.radial.apply(&weighted)
    }
}

/// Fixed-size bundle of complex integrands sharing one grid pass.
#[derive(Debug, Clone, Copy)]
pub struct Bundle<const N: usize>(pub [Complex64; N]);

impl<const N: usize> Default for Bundle<N> {
    fn default() -> Self {
        Bundle([Complex64::new(0.0, 0.0); N])
    }
}

impl<const N: usize> Add for Bundle<N> {
    type Output = Self;
    fn add(mut self, other: Self) -> Self {
        for (a, b) in self.0.iter_mut().zip(other.0) {
            *a += b;
        }
        self
    }
}

impl<const N: usize> Mul<f64> for Bundle<N> {
    type Output = Self;
    fn mul(mut self, s: f64) -> Self {
        for a in self.0.iter_mut() {
            *a *= s;
        }
        self
    }
}

impl PolarGrid {
    /// Plane integrals of several integrands, each with its own error estimate.
    pub fn integrate_bundle<const N: usize, F>(&self, f: F) -> [Estimate<Complex64>; N]
    where
        F: Fn(usize, PolarNode) -> Bundle<N> + Sync,
    {
        let means = self.ring_means(f);
        std::array::from_fn(|c| {
            let weighted: Vec<Complex64> = means
                .iter()
                .zip(&self.radial.nodes)
                .map(|(m, &r)| m.0[c] * (2.0 * PI * r))
                .collect();
            self.radial.apply(&weighted)
        })
    }
}
