//! Time-stepping discontinuous Galerkin solver for the fractional
//! diffusion-wave problem
//!
//! ```text
//! u' - Δ D^{-α} u = f   in (0,1) × (0,T),   u = 0 on the boundary,   u(0) = u0,
//! ```
//!
//! with piecewise-constant approximation in time and continuous piecewise-linear
//! finite elements in space, together with the scalar-mode machinery used to
//! validate it (generating function ψ, contour-integral inversions,
//! Mittag-Leffler references) and a convergence harness.
//!
//! Module map:
//! - [`frac_kernel`]: gamma function, convolution weights, fractional integrals
//!   of piecewise constants, ψ, Mittag-Leffler, contour quadratures.
//! - [`scalar_ode`]: the homogeneous and forced scalar recurrences and the
//!   empirical constants of their decay estimates.
//! - [`fem1d`]: uniform-grid P1 finite elements on (0,1).
//! - [`dg_solver`]: the full scheme with naive and FFT-blocked memory terms.
//! - [`reference`]: spectral and fine-grid reference solutions.
//! - [`harness`]: norms, convergence tables, lemma scans, experiment drivers.

pub mod dg_solver;
pub mod error;
pub mod fem1d;
pub mod frac_kernel;
pub mod harness;
pub mod reference;
pub mod scalar_ode;

pub use error::{Error, Result};
