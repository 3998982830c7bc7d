//! Convex bodies in ℝⁿ handled through their support functions.
//!
//! Bodies are immutable expression trees ([`BodyRep`]) evaluated lazily. On
//! top of support-function evaluation the crate provides spherical
//! quadrature, the Hausdorff metric, Steiner points and re-centering,
//! Schneider regularization, (ε, u)-truncation with symmetry destruction and
//! a congruence distance on bodies modulo rigid motions.

pub mod congruence;
pub mod error;
pub mod geometry;
pub mod io;
pub mod linalg;
pub mod optimize;
pub mod quadrature;
pub mod regularization;
pub mod truncation;

pub use error::{Error, Result};
pub use geometry::{
    curvature_positive, curvature_radius_2d, eval_support, gauss_preimage, hausdorff, minkowski_sum,
    recenter, sample_support, scale, steiner, BodyRep, Rotation, SteinerVector, SupportSamples,
};
pub use quadrature::{default_grid, integrate, make_grid_2d, make_grid_3d, GridSpec, SphericalGrid, UnitVector};
pub use regularization::{default_mollifier, mollify, regularize, MollifierSpec, RegularizationParams};
