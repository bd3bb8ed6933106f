//! Charted manifolds, smooth maps and differential forms.
//!
//! Everything here is evaluated pointwise: a form is a closure that takes a
//! point and tangent vectors in that point's chart. Derivatives are analytic
//! where a model supplies them and Richardson-extrapolated central
//! differences otherwise.

mod form;
mod map;
mod quadrature;
mod space;

pub use form::{
    angle_differential, antisymmetry_residual, ext_derivative, ext_derivative_with_step, linear_combine, multilinearity_residual,
    patchwise, pullback, random_frame, scale, wedge, FormField, SelectFn,
};
pub use map::SmoothMap;
pub use quadrature::{cube_space, gauss_legendre, integrate_cube, CubeIntegral, DEFAULT_NODES};
pub use space::{AtlasBuilder, Chart, ChartedSpace, Point, Predicate, SamplerFn, TransitionFn, TransitionJacobianFn};
pub(crate) use space::uniform;

/// Base step of every central-difference stencil.
pub const DEFAULT_STEP: f64 = 1e-4;

/// Real stand-in for the factor `−1/(2πi)` once connections are taken real
/// valued (vertical generator pairs to 1).
pub const KAPPA: f64 = -1.0 / (2.0 * std::f64::consts::PI);
