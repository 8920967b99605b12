//! Numerical laboratory for 2D penetrable scattering: interior transmission
//! eigenvalues and eigenfunctions, Herglotz wave synthesis and fitting,
//! Lippmann-Schwinger forward scattering with far-field patterns, and
//! Laplace transforms of harmonic polynomials over corner cones with the
//! associated CGO phase geometry.

// validation guards use negated comparisons (`!(x > 0.0)`) on purpose: they
// reject NaN along with out-of-range values
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cone;
pub mod error;
pub mod geometry;
pub mod herglotz;
pub mod quad;
pub mod scattering;
pub mod specfun;
pub mod teig;

pub use error::{Error, Result};

pub type Complex64 = num_complex::Complex<f64>;
pub type Vec2 = nalgebra::Vector2<f64>;
