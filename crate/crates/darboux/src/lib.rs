//! Darboux-frame toolkit for curves on oriented surfaces.
//!
//! The crate computes the adapted frame {T, g, n} of discrete curves on
//! parametric surface charts together with every scalar invariant hanging off
//! it (geodesic curvature, normal curvature, geodesic torsion, curvature,
//! torsion, frame angle), analyzes two-parameter curve families by checking
//! the adapted-frame evolution identities with finite-difference residuals,
//! and integrates inextensible tangential curve flows forward in time.
//!
//! Entry points:
//! - [`surface::ParametricSurface`] — charts with analytic derivatives.
//! - [`curve::DiscreteCurve`] — uniformly sampled curves in chart coordinates.
//! - [`family::FramedFamily`] — two-parameter families with adapted normals,
//!   plus the residual verification of the evolution identities.
//! - [`flow::run`] — arclength-preserving flow integration.
//! - [`cli`] — the `analyze` / `verify` / `simulate` / `render` commands.
//!
//! Run `cargo run -p darboux --example identity_residuals` (or any other
//! example) to see the main capabilities end to end.

pub mod cli;
pub mod config;
pub mod curve;
pub mod error;
pub mod expr;
pub mod family;
pub mod flow;
pub mod output;
pub mod report;
pub mod stencil;
pub mod surface;
pub mod vec3;

pub use error::{Error, Result};
pub use vec3::Vector3;
