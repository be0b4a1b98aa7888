//! Free-energy machinery for fast diffusion with attractive interactions on
//! rotationally symmetric, non-positively curved model manifolds.
//!
//! The energy under study is
//!
//! ```text
//! E[mu] = 1/(q-1) * integral rho^q dV  +  1/2 * double integral h(d(x,y)) dmu dmu
//! ```
//!
//! with fast-diffusion exponent `0 < q < 1` and a non-decreasing interaction
//! profile `h`. The crate provides:
//!
//! * [`geometry`] — radial curvature profiles, the comparison ODE
//!   `psi'' = c(theta) psi`, its closed forms and two-sided bounds, geodesic
//!   ball volumes, Jacobian bounds, and distances on constant-curvature
//!   model spaces;
//! * [`measures`] — radial densities, centred discrete measures, masses and
//!   weighted moments;
//! * [`energy`] — entropy and interaction terms, the uniform-ball energy
//!   upper bound, spreading/blow-up scans, and growth-condition checks;
//! * [`inequalities`] — explicit Carlson–Levin constants and numerical
//!   verification of the convexity and Carlson–Levin inequalities, the
//!   reversed-HLS Euclidean limit, tail bounds, and energy lower bounds;
//! * [`groundstate`] — a damped fixed-point search for the global minimizer
//!   over radial densities, with first-order-condition residuals and an
//!   existence certificate;
//! * [`config`] / [`csvio`] — run configuration and the CSV formats shared
//!   with the command-line driver.
//!
//! All computational routines are pure functions of immutable inputs and can
//! be evaluated from multiple threads without synchronization.

pub mod config;
pub mod csvio;
pub mod energy;
pub mod error;
pub mod geometry;
pub mod groundstate;
pub mod inequalities;
pub mod measures;
pub mod numeric;
pub mod quad;

pub use error::{Error, Result};
