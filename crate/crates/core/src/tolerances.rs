//! Numerical tolerances shared by every module.

/// One record holding every accuracy knob used by the library.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// Argument at which `bessel_k` switches from the series to the continued fraction.
    pub bessel_crossover: f64,
    /// Maximal number of series or continued-fraction terms.
    pub bessel_max_terms: usize,
    /// Relative truncation threshold for the Bessel series and continued fraction.
    pub bessel_eps: f64,
    /// Default relative tolerance of adaptive one-dimensional quadrature.
    pub quad_rel: f64,
    /// Default absolute tolerance of adaptive one-dimensional quadrature.
    pub quad_abs: f64,
    /// Maximal number of subintervals of the adaptive integrator.
    pub quad_max_intervals: usize,
    /// Number of angular trapezoid nodes on polar grids.
    pub angular_nodes: usize,
    /// Ratio between consecutive radii of the boundary-trace sequence.
    pub trace_ratio: f64,
    /// Convergence threshold of the extrapolated boundary trace.
    pub trace_tol: f64,
    /// Number of log-spaced samples in the bound-state scan.
    pub bound_state_samples: usize,
    /// Relative width at which the bound-state bisection stops.
    pub bound_state_bisection: f64,
    /// Condition number above which the extension matrix is treated as singular.
    pub max_condition: f64,
    /// Relative tolerance of Sturm-sequence bisection.
    pub eigen_bisection: f64,
}

impl Tolerances {
    pub const DEFAULT: Tolerances = Tolerances {
        bessel_crossover: 2.0,
        bessel_max_terms: 500,
        bessel_eps: 1e-16,
        quad_rel: 1e-12,
        quad_abs: 1e-300,
        quad_max_intervals: 4000,
        angular_nodes: 256,
        trace_ratio: 0.5,
        trace_tol: 1e-6,
        bound_state_samples: 200,
        bound_state_bisection: 1e-13,
        max_condition: 1e13,
        eigen_bisection: 1e-13,
    };
}

impl Default for Tolerances {
    fn default() -> Self {
        Self::DEFAULT
    }
}
