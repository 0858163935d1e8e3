//! Bounds on the generalized Zalcman functional `λ a_n^2 - a_{2n-1}` over
//! close-to-convex functions, with brute-force numerical verification.
//!
//! The math modules are generic over [`Scalar`] (`f32` or `f64`); the aliases
//! below fix the scalar to `f64`, which is what the verification harness and
//! the command-line tool use.

pub mod cli;
pub mod error;
pub mod extremal;
pub mod optimize;
pub mod params;
pub mod scalar;
pub mod surface;
pub mod verify;

pub use error::{Error, Result};
pub use extremal::{
    extreme_coeff, j_convexity_remainder, rotate, sweep_extreme_points, sweep_extreme_points_with,
    zalcman_functional, SweepObjective,
};
pub use optimize::{edge_max, grid_max, GridSpec, Lipschitz};
pub use params::{classify, theorem_bound, thresholds, Regime};
pub use scalar::Scalar;
pub use surface::{
    boundary_max_f, boundary_restrictions, critical_points, cubic_a, discriminant, eval_f, eval_g,
    f_at_interior_critical, gradient_f,
};

pub type ProblemParams = params::ProblemParams<f64>;
pub type RegimeThresholds = params::RegimeThresholds<f64>;
pub type ExtremePoint = extremal::ExtremePoint<f64>;
pub type CoefficientVector = extremal::CoefficientVector<f64>;
pub type FunctionalValue = extremal::FunctionalValue<f64>;
pub type SweepResult = extremal::SweepResult<f64>;
pub type Surface = surface::Surface<f64>;
pub type SurfacePoint = surface::SurfacePoint<f64>;
pub type CriticalPoint = surface::CriticalPoint<f64>;
pub type CriticalPointSet = surface::CriticalPointSet<f64>;
pub type BoundaryRestrictions = surface::BoundaryRestrictions<f64>;
pub type MaxResult = optimize::MaxResult<f64>;
pub type EdgeMaxResult = optimize::EdgeMaxResult<f64>;
pub type Rect = optimize::Rect<f64>;
pub type Interval = optimize::Interval<f64>;
