//! Flux reduction, the Aharonov-Bohm potential, regular magnetic
//! perturbations, the cutoff `chi` and the recovery profile `eta`.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

/// A point of the plane.
pub type Point = [f64; 2];
/// A real planar vector.
pub type Vector = [f64; 2];

/// Flux reduced to `alpha` in `(0, 1)` by an integer gauge shift and,
/// if needed, complex conjugation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FluxParameter {
    pub alpha: f64,
    /// Half of the removed even integer.
    pub ell: i64,
    /// Whether the reduction went through complex conjugation.
    pub conjugated: bool,
}

impl FluxParameter {
    /// Reduces an arbitrary real flux.
    pub fn reduce(raw: f64) -> Result<Self> {
        if !raw.is_finite() {
            return Err(Error::InvalidInput(format!("flux must be finite, got {raw}")));
        }
        let ell = (raw / 2.0).round();
        let rest = raw - 2.0 * ell;
        if rest == 0.0 {
            return Err(Error::TrivialFlux(raw));
        }
        if rest.abs() >= 1.0 {
            return Err(Error::BoundaryFlux(raw));
        }
        let ell = ell as i64;
        Ok(if rest > 0.0 {
            FluxParameter { alpha: rest, ell, conjugated: false }
        } else {
            FluxParameter { alpha: -rest, ell: -ell, conjugated: true }
        })
    }

    /// A flux already in `(0, 1)`.
    pub fn new(alpha: f64) -> Result<Self> {
        check_alpha(alpha)?;
        Ok(FluxParameter { alpha, ell: 0, conjugated: false })
    }

    /// The flux this parameter was reduced from.
    pub fn original(&self) -> f64 {
        let value = 2.0 * self.ell as f64 + self.alpha;
        if self.conjugated {
            -value
        } else {
            value
        }
    }
}

pub(crate) fn check_alpha(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidInput(format!("reduced flux must lie in (0, 1), got {alpha}")))
    }
}

/// `A_alpha(x) = alpha (-y, x) / |x|^2`.
pub fn a_alpha(alpha: f64, x: Point) -> Result<Vector> {
    let r2 = x[0] * x[0] + x[1] * x[1];
    if r2 == 0.0 {
        return Err(Error::OriginSingularity);
    }
    Ok([-alpha * x[1] / r2, alpha * x[0] / r2])
}

type VectorFn = dyn Fn(Point) -> Vector + Send + Sync;
type ProfileFn = dyn Fn(f64) -> f64 + Send + Sync;

#[derive(Clone)]
enum Shape {
    Azimuthal(Arc<ProfileFn>),
    General(Arc<VectorFn>),
}

/// Divergence-free, locally Lipschitz perturbation `S`.
#[derive(Clone)]
pub struct PerturbationField {
    shape: Shape,
    offset: Vector,
    at_origin: Vector,
    lipschitz: f64,
    sup: Option<f64>,
    label: String,
}

impl fmt::Debug for PerturbationField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PerturbationField")
            .field("label", &self.label)
            .field("offset", &self.offset)
            .field("lipschitz", &self.lipschitz)
            .field("sup", &self.sup)
            .finish()
    }
}

fn sampled_lipschitz(profile: &ProfileFn) -> f64 {
    let mut best: f64 = 0.0;
    for i in 0..=400 {
        let r = 10f64.powf(-6.0 + 8.0 * i as f64 / 400.0);
        let h = 1e-6 * r;
        let slope = (profile(r + h) - profile(r - h)) / (2.0 * h);
        best = best.max((profile(r) / r).abs()).max(slope.abs());
    }
    best
}

impl PerturbationField {
    pub fn zero() -> Self {
        PerturbationField {
            shape: Shape::Azimuthal(Arc::new(|_| 0.0)),
            offset: [0.0; 2],
            at_origin: [0.0; 2],
            lipschitz: 0.0,
            sup: Some(0.0),
            label: "zero".into(),
        }
    }

    /// Azimuthal field `s(r) e_theta` with `s(0) = 0`, optionally capped by
    /// replacing `r` with `R tanh(r / R)`.
    pub fn azimuthal<F>(profile: F, cap_radius: Option<f64>) -> Result<Self>
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        let s0 = profile(0.0);
        if s0.abs() > 1e-12 {
            return Err(Error::ProfileNotVanishing(s0));
        }
        let profile: Arc<ProfileFn> = match cap_radius {
            None => Arc::new(profile),
            Some(cap) if cap > 0.0 => Arc::new(move |r: f64| profile(cap * (r / cap).tanh())),
            Some(cap) => return Err(Error::InvalidInput(format!("cap radius must be positive, got {cap}"))),
        };
        let lipschitz = sampled_lipschitz(profile.as_ref());
        let sup = cap_radius.map(|cap| {
            (0..=2000)
                .map(|i| profile(cap * 50.0 * i as f64 / 2000.0).abs())
                .fold(0.0, f64::max)
        });
        Ok(PerturbationField {
            shape: Shape::Azimuthal(profile),
            offset: [0.0; 2],
            at_origin: [0.0; 2],
            lipschitz,
            sup,
            label: "azimuthal".into(),
        })
    }

    /// Field of a homogeneous magnetic field `b` in the symmetric gauge.
    pub fn homogeneous(b: f64) -> Self {
        let mut f = Self::azimuthal(move |r| 0.5 * b * r, None).expect("linear profile vanishes at 0");
        f.lipschitz = 0.5 * b.abs();
        f.label = format!("homogeneous(b={b})");
        f
    }

    /// Homogeneous field whose potential saturates at `|b| cap / 2`.
    pub fn capped_homogeneous(b: f64, cap_radius: f64) -> Result<Self> {
        let mut f = Self::azimuthal(move |r| 0.5 * b * r, Some(cap_radius))?;
        f.lipschitz = 0.5 * b.abs();
        f.sup = Some(0.5 * b.abs() * cap_radius);
        f.label = format!("capped-homogeneous(b={b},cap={cap_radius})");
        Ok(f)
    }

    /// Azimuthal profile interpolated linearly from samples `(r_i, s_i)`.
    pub fn tabulated(radii: Vec<f64>, values: Vec<f64>, cap_radius: Option<f64>) -> Result<Self> {
        if radii.len() != values.len() || radii.len() < 2 {
            return Err(Error::InvalidInput("tabulated profile needs matching columns of length >= 2".into()));
        }
        if radii.windows(2).any(|w| w[1] <= w[0]) || radii[0] < 0.0 {
            return Err(Error::InvalidInput("tabulated radii must be non-negative and increasing".into()));
        }
        let (mut rs, mut ss) = (radii, values);
        if rs[0] > 0.0 {
            rs.insert(0, 0.0);
            ss.insert(0, 0.0);
        }
        let profile = move |r: f64| {
            if r >= *rs.last().unwrap() {
                return *ss.last().unwrap();
            }
            let i = rs.partition_point(|&x| x <= r).max(1) - 1;
            let t = (r - rs[i]) / (rs[i + 1] - rs[i]);
            ss[i] + t * (ss[i + 1] - ss[i])
        };
        let mut f = Self::azimuthal(profile, cap_radius)?;
        f.label = "tabulated".into();
        Ok(f)
    }

    /// Bounded non-azimuthal field with stream function `amp x y exp(-|x|^2/2)`.
    pub fn sheared(amplitude: f64) -> Self {
        let eval = move |x: Point| {
            let g = (-(x[0] * x[0] + x[1] * x[1]) / 2.0).exp();
            [amplitude * x[0] * g * (1.0 - x[1] * x[1]), -amplitude * x[1] * g * (1.0 - x[0] * x[0])]
        };
        PerturbationField {
            shape: Shape::General(Arc::new(eval)),
            offset: [0.0; 2],
            at_origin: [0.0; 2],
            lipschitz: amplitude.abs() * 2.0,
            sup: Some(amplitude.abs()),
            label: format!("sheared(amp={amplitude})"),
        }
    }

    /// Arbitrary field given by its values; the caller vouches for the
    /// divergence and Lipschitz properties.
    pub fn custom<F>(eval: F, lipschitz: f64, sup: Option<f64>) -> Self
    where
        F: Fn(Point) -> Vector + Send + Sync + 'static,
    {
        let at_origin = eval([0.0, 0.0]);
        PerturbationField {
            shape: Shape::General(Arc::new(eval)),
            offset: [0.0; 2],
            at_origin,
            lipschitz,
            sup,
            label: "custom".into(),
        }
    }

    /// The same field plus a constant vector.
    pub fn with_offset(mut self, offset: Vector) -> Self {
        self.offset = [self.offset[0] + offset[0], self.offset[1] + offset[1]];
        self.at_origin = [self.at_origin[0] + offset[0], self.at_origin[1] + offset[1]];
        if let Some(s) = self.sup.as_mut() {
            *s += offset[0].hypot(offset[1]);
        }
        self.label = format!("{}+({},{})", self.label, offset[0], offset[1]);
        self
    }

    pub fn eval(&self, x: Point) -> Vector {
        let base = match &self.shape {
            Shape::Azimuthal(profile) => {
                let r = x[0].hypot(x[1]);
                if r == 0.0 {
                    [0.0, 0.0]
                } else {
                    let s = profile(r) / r;
                    [-s * x[1], s * x[0]]
                }
            }
            Shape::General(f) => f(x),
        };
        [base[0] + self.offset[0], base[1] + self.offset[1]]
    }

    /// `S(0)`.
    pub fn at_origin(&self) -> Vector {
        self.at_origin
    }

    /// `S - S(0)`.
    pub fn shifted(&self, x: Point) -> Vector {
        let s = self.eval(x);
        [s[0] - self.at_origin[0], s[1] - self.at_origin[1]]
    }

    pub fn lipschitz_bound(&self) -> f64 {
        self.lipschitz
    }

    /// Bound on `sup |S|` when the field is uniformly bounded.
    pub fn sup_bound(&self) -> Option<f64> {
        self.sup
    }

    /// The profile `s(r)` when `S = s(r) e_theta` exactly.
    pub fn azimuthal_profile(&self) -> Option<&ProfileFn> {
        match &self.shape {
            Shape::Azimuthal(p) if self.offset == [0.0, 0.0] => Some(p.as_ref()),
            _ => None,
        }
    }

    pub fn label(&self) -> &str {
        &self.label
    }
}

/// Smooth cutoff equal to 1 on `[0, a]` and 0 on `[b, inf)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Cutoff {
    pub inner: f64,
    pub outer: f64,
}

impl Cutoff {
    pub fn new(inner: f64, outer: f64) -> Result<Self> {
        if !(inner > 0.0 && outer > inner && outer.is_finite()) {
            return Err(Error::InvalidInput(format!("cutoff radii must satisfy 0 < a < b, got ({inner}, {outer})")));
        }
        Ok(Cutoff { inner, outer })
    }

    /// `(chi, chi', chi'')` at radius `r`; quintic smoothstep on the bridge.
    pub fn eval(&self, r: f64) -> (f64, f64, f64) {
        if r <= self.inner {
            return (1.0, 0.0, 0.0);
        }
        if r >= self.outer {
            return (0.0, 0.0, 0.0);
        }
        let w = self.outer - self.inner;
        let t = (r - self.inner) / w;
        let value = 1.0 - t * t * t * (10.0 - 15.0 * t + 6.0 * t * t);
        let d1 = -30.0 * t * t * (1.0 - t) * (1.0 - t) / w;
        let d2 = -60.0 * t * (1.0 - t) * (1.0 - 2.0 * t) / (w * w);
        (value, d1, d2)
    }

    pub fn value(&self, r: f64) -> f64 {
        self.eval(r).0
    }

    /// `grad chi` at `x`.
    pub fn gradient(&self, x: Point) -> Vector {
        let r = x[0].hypot(x[1]);
        let (_, d1, _) = self.eval(r);
        if d1 == 0.0 {
            [0.0, 0.0]
        } else {
            [d1 * x[0] / r, d1 * x[1] / r]
        }
    }

    /// `Delta chi = chi'' + chi' / r`.
    pub fn laplacian(&self, r: f64) -> f64 {
        let (_, d1, d2) = self.eval(r);
        if d1 == 0.0 && d2 == 0.0 {
            0.0
        } else {
            d2 + d1 / r
        }
    }
}

/// Recovery profile `eta_alpha(r) = (r / sqrt(alpha))^alpha` below `sqrt(alpha)`.
///
/// The power branch already reaches 1 at `sqrt(alpha)`, so a monotone profile
/// with values in `[0, 1]` is identically 1 beyond it. The profile is
/// Lipschitz with a corner at `sqrt(alpha)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RecoveryProfile {
    pub alpha: f64,
}

impl RecoveryProfile {
    pub fn new(alpha: f64) -> Result<Self> {
        check_alpha(alpha)?;
        Ok(RecoveryProfile { alpha })
    }

    /// Radius where the power branch ends.
    pub fn knee(&self) -> f64 {
        self.alpha.sqrt()
    }

    /// `(eta, eta')`; at the knee the derivative is the limit from the left.
    pub fn eval(&self, r: f64) -> (f64, f64) {
        let s = self.knee();
        if r <= 0.0 {
            return (0.0, if self.alpha < 1.0 { f64::INFINITY } else { 1.0 });
        }
        if r <= s {
            let ratio = r / s;
            let value = ratio.powf(self.alpha);
            (value, self.alpha * value / r)
        } else {
            (1.0, 0.0)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    #[test]
    fn flux_reduction_examples() {
        let f = FluxParameter::reduce(2.7).unwrap();
        assert_relative_eq!(f.alpha, 0.7, epsilon = 1e-12);
        assert_eq!((f.ell, f.conjugated), (1, false));
        let f = FluxParameter::reduce(-0.3).unwrap();
        assert_relative_eq!(f.alpha, 0.3, epsilon = 1e-12);
        assert_eq!((f.ell, f.conjugated), (0, true));
        assert!(matches!(FluxParameter::reduce(4.0), Err(Error::TrivialFlux(_))));
        assert!(matches!(FluxParameter::reduce(3.0), Err(Error::BoundaryFlux(_))));
    }

    proptest! {
        #[test]
        fn flux_reduction_round_trips(raw in -50.0f64..50.0) {
            prop_assume!((raw - raw.round()).abs() > 1e-9);
            let f = FluxParameter::reduce(raw).unwrap();
            prop_assert!(f.alpha > 0.0 && f.alpha < 1.0);
            prop_assert!((f.original() - raw).abs() < 1e-12 * (1.0 + raw.abs()));
        }

        #[test]
        fn potential_is_orthogonal_to_radius(x in -5.0f64..5.0, y in -5.0f64..5.0, alpha in 0.01f64..0.99) {
            prop_assume!(x.hypot(y) > 1e-6);
            let a = a_alpha(alpha, [x, y]).unwrap();
            prop_assert!((a[0] * x + a[1] * y).abs() < 1e-12);
            let norm = a[0].hypot(a[1]);
            prop_assert!((norm - alpha / x.hypot(y)).abs() <= 1e-12 * norm);
        }

        #[test]
        fn cutoff_stays_in_unit_interval(r in 0.0f64..5.0, a in 0.1f64..1.0, w in 0.1f64..2.0) {
            let c = Cutoff::new(a, a + w).unwrap();
            let (v, d1, _) = c.eval(r);
            prop_assert!((0.0..=1.0).contains(&v));
            prop_assert!(d1 <= 0.0);
        }

        #[test]
        fn recovery_profile_monotone_and_bounded(alpha in 0.01f64..0.9, r1 in 0.0f64..3.0, r2 in 0.0f64..3.0) {
            let p = RecoveryProfile::new(alpha).unwrap();
            let (lo, hi) = if r1 < r2 { (r1, r2) } else { (r2, r1) };
            let (a, _) = p.eval(lo);
            let (b, _) = p.eval(hi);
            prop_assert!(a <= b + 1e-15);
            prop_assert!((0.0..=1.0).contains(&b));
        }
    }

    #[test]
    fn potential_rejects_origin() {
        assert!(matches!(a_alpha(0.5, [0.0, 0.0]), Err(Error::OriginSingularity)));
        let a = a_alpha(0.5, [1.0, 0.0]).unwrap();
        assert_eq!(a, [0.0, 0.5]);
    }

    fn divergence(field: &PerturbationField, x: Point) -> f64 {
        let h = 1e-5;
        let dx = (field.eval([x[0] + h, x[1]])[0] - field.eval([x[0] - h, x[1]])[0]) / (2.0 * h);
        let dy = (field.eval([x[0], x[1] + h])[1] - field.eval([x[0], x[1] - h])[1]) / (2.0 * h);
        dx + dy
    }

    #[test]
    fn builtin_fields_are_divergence_free() {
        let fields = [
            PerturbationField::homogeneous(1.3),
            PerturbationField::capped_homogeneous(1.0, 5.0).unwrap(),
            PerturbationField::sheared(0.7),
            PerturbationField::capped_homogeneous(1.0, 2.0).unwrap().with_offset([0.3, -0.2]),
        ];
        for f in &fields {
            for &x in &[[0.3, 0.4], [-1.2, 0.7], [2.5, -3.1], [6.0, 1.0]] {
                assert!(divergence(f, x).abs() < 1e-8, "{} at {x:?}", f.label());
            }
        }
    }

    #[test]
    fn capped_field_is_bounded() {
        let f = PerturbationField::capped_homogeneous(2.0, 5.0).unwrap();
        for i in 0..200 {
            let r = i as f64 * 0.5;
            let v = f.eval([r, 0.0]);
            assert!(v[0].hypot(v[1]) <= 5.0 + 1e-12);
        }
        assert_eq!(f.sup_bound(), Some(5.0));
        assert_relative_eq!(f.lipschitz_bound(), 1.0);
    }

    #[test]
    fn lipschitz_bound_holds_near_origin() {
        let f = PerturbationField::sheared(1.5);
        for i in 1..50 {
            let r = i as f64 * 0.02;
            let v = f.eval([r * 0.6, r * 0.8]);
            assert!(v[0].hypot(v[1]) <= f.lipschitz_bound() * r + 1e-12);
        }
    }

    #[test]
    fn profile_must_vanish_at_origin() {
        assert!(matches!(PerturbationField::azimuthal(|r| 1.0 + r, None), Err(Error::ProfileNotVanishing(_))));
    }

    #[test]
    fn tabulated_profile_interpolates() {
        let f = PerturbationField::tabulated(vec![0.0, 1.0, 2.0], vec![0.0, 0.5, 0.5], None).unwrap();
        let v = f.eval([0.0, 1.5]);
        assert_relative_eq!(v[0], -0.5, epsilon = 1e-14);
    }

    #[test]
    fn cutoff_examples() {
        let c = Cutoff::new(1.0, 2.0).unwrap();
        assert_eq!(c.value(0.5), 1.0);
        assert_eq!(c.value(2.5), 0.0);
        assert_relative_eq!(c.value(1.5), 0.5, epsilon = 1e-15);
        assert_eq!(c.eval(1.0).1, 0.0);
        assert_eq!(c.eval(2.0).1, 0.0);
    }

    #[test]
    fn recovery_profile_examples() {
        let p = RecoveryProfile::new(0.25).unwrap();
        assert_relative_eq!(p.eval(0.25).0, 0.5f64.powf(0.25), max_relative = 1e-14);
        assert_relative_eq!(p.eval(0.5).1, 0.5, max_relative = 1e-14);
        assert_eq!(p.eval(1.0), (1.0, 0.0));
        assert_eq!(p.eval(0.75), (1.0, 0.0));
    }
}
