//! Convex bodies and the metric toolkit built on their support functions.

pub mod body;
pub mod gauss;
pub mod hausdorff;
pub mod hull;
pub mod rotation;
pub mod steiner;

pub use body::{eval_support, minkowski_sum, sample_support, scale, vertex_sum_polytope, BodyRep, SupportSamples};
pub use gauss::{curvature_positive, curvature_radius_2d, gauss_preimage, CurvatureReport};
pub use hausdorff::{hausdorff, hausdorff_below, hausdorff_grid};
pub use hull::PolytopeGeometry;
pub use rotation::Rotation;
pub use steiner::{recenter, steiner, steiner_quadrature, SteinerVector};
