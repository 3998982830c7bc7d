//! Inverse Gauss map and finite-difference curvature tests on support
//! functions.

use crate::error::{Error, Result};
use crate::geometry::body::BodyRep;
use crate::linalg::{self, Coords};
use crate::quadrature::{SphericalGrid, UnitVector};

pub const DEFAULT_STEP: f64 = 1e-3;
pub const DEFAULT_MARGIN: f64 = 1e-6;

/// The boundary point with outward normal `u`, i.e. `∇h(u)`. Flat faces are
/// reported as [`Error::NotStrictlyConvex`] with their vertices.
pub fn gauss_preimage(body: &BodyRep, u: &UnitVector) -> Result<Coords> {
    if body.dim() != u.dim() {
        return Err(Error::DimensionMismatch {
            expected: body.dim(),
            found: u.dim(),
        });
    }
    body.support_point_impl(u, true)
}

/// Radius of curvature `h(θ) + h″(θ)` of a planar body at the boundary point
/// with normal angle θ.
pub fn curvature_radius_2d(body: &BodyRep, theta: f64, step: f64) -> Result<f64> {
    if !(step > 0.0) {
        return Err(Error::InvalidArgument(format!("finite-difference step must be positive, got {step}")));
    }
    if body.dim() != 2 {
        return Err(Error::DimensionMismatch { expected: 2, found: body.dim() });
    }
    let h = |t: f64| body.eval_unit(&[t.cos(), t.sin()]);
    let h0 = h(theta);
    Ok(h0 + (h(theta + step) - 2.0 * h0 + h(theta - step)) / (step * step))
}

/// Smallest principal radius of curvature at `u` in ℝ³: the minimum
/// eigenvalue of the geodesic Hessian of `h` on the sphere plus `h·I`.
pub fn min_curvature_radius_3d(body: &BodyRep, u: &[f64], step: f64) -> f64 {
    let (e, f) = linalg::tangent_basis(u);
    let h = |a: f64, b: f64| {
        let r = a.hypot(b);
        if r == 0.0 {
            return body.eval_unit(u);
        }
        let (s, c) = r.sin_cos();
        let p: Coords = (0..3).map(|i| c * u[i] + s * (a * e[i] + b * f[i]) / r).collect();
        body.eval_unit(&p)
    };
    let s2 = step * step;
    let h0 = h(0.0, 0.0);
    let h11 = (h(step, 0.0) - 2.0 * h0 + h(-step, 0.0)) / s2;
    let h22 = (h(0.0, step) - 2.0 * h0 + h(0.0, -step)) / s2;
    let h12 = (h(step, step) - h(step, -step) - h(-step, step) + h(-step, -step)) / (4.0 * s2);
    let (a, d) = (h11 + h0, h22 + h0);
    0.5 * (a + d) - (0.25 * (a - d) * (a - d) + h12 * h12).sqrt()
}

#[derive(Debug, Clone, PartialEq)]
pub struct CurvatureReport {
    pub positive: bool,
    /// Smallest radius seen (up to the failing node when the test fails).
    pub min_radius: f64,
    pub failing_node: Option<UnitVector>,
}

/// Positive-curvature test at every node of `grid`, stopping at the first
/// node whose smallest radius of curvature is not above `margin`.
pub fn curvature_report(body: &BodyRep, grid: &SphericalGrid, step: f64, margin: f64) -> Result<CurvatureReport> {
    if !(step > 0.0) {
        return Err(Error::InvalidArgument(format!("finite-difference step must be positive, got {step}")));
    }
    if body.dim() != grid.dim() {
        return Err(Error::DimensionMismatch {
            expected: grid.dim(),
            found: body.dim(),
        });
    }
    if !(2..=3).contains(&grid.dim()) {
        return Err(Error::Representation("curvature tests are implemented for n = 2, 3".into()));
    }
    let mut min_radius = f64::INFINITY;
    for u in grid.nodes() {
        let r = if grid.dim() == 2 {
            curvature_radius_2d(body, u[1].atan2(u[0]), step)?
        } else {
            min_curvature_radius_3d(body, u, step)
        };
        min_radius = min_radius.min(r);
        if !(r > margin) {
            return Ok(CurvatureReport {
                positive: false,
                min_radius,
                failing_node: Some(u.clone()),
            });
        }
    }
    Ok(CurvatureReport {
        positive: true,
        min_radius,
        failing_node: None,
    })
}

pub fn curvature_positive(body: &BodyRep, grid: &SphericalGrid, step: f64, margin: f64) -> Result<bool> {
    Ok(curvature_report(body, grid, step, margin)?.positive)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::{make_grid_2d, make_grid_3d};

    #[test]
    fn ball_preimage_and_radius() {
        let b = BodyRep::centered_ball(2, 1.0).unwrap();
        let u = UnitVector::from_angle(0.7);
        let p = gauss_preimage(&b, &u).unwrap();
        assert!(linalg::dist(&p, &u) < 1e-15);
        assert!((curvature_radius_2d(&b, 0.3, 1e-3).unwrap() - 1.0).abs() < 1e-9);
        let sum = BodyRep::sum(b, BodyRep::centered_ball(2, 0.25).unwrap()).unwrap();
        assert!((curvature_radius_2d(&sum, 0.3, 1e-3).unwrap() - 1.25).abs() < 1e-9);
    }

    #[test]
    fn ellipse_radius_at_axis() {
        let (a, b) = (2.0, 0.5);
        let e = BodyRep::axis_ellipsoid(&[a, b]).unwrap();
        let r = curvature_radius_2d(&e, 0.0, 1e-3).unwrap();
        assert!((r - b * b / a).abs() < 1e-5, "{r}");
    }

    #[test]
    fn ellipsoid_preimage_closed_form() {
        let m = nalgebra::DMatrix::from_row_slice(3, 3, &[2.0, 0.3, 0.0, 0.3, 1.0, 0.1, 0.0, 0.1, 0.5]);
        let e = BodyRep::ellipsoid(vec![0.0; 3], m.clone()).unwrap();
        let u = UnitVector::normalize(&[0.2, -0.5, 0.8]).unwrap();
        let p = gauss_preimage(&e, &u).unwrap();
        assert!((linalg::dot(&p, &u) - e.eval_unit(&u)).abs() < 1e-12);
        let g = e.support_gradient(&u, 1e-6);
        assert!(linalg::dist(&p, &g) < 1e-8);
    }

    #[test]
    fn square_face_is_reported() {
        let sq = BodyRep::cuboid(&[1.0, 1.0]).unwrap();
        match gauss_preimage(&sq, &UnitVector::axis(2, 0)) {
            Err(Error::NotStrictlyConvex { face }) => {
                assert_eq!(face.len(), 2);
                assert!(face.contains(&vec![1.0, -1.0]) && face.contains(&vec![1.0, 1.0]));
            }
            other => panic!("expected a face, got {other:?}"),
        }
    }

    #[test]
    fn curvature_positivity() {
        let g2 = make_grid_2d(256).unwrap();
        let g3 = make_grid_3d(12, 24).unwrap();
        let sq = BodyRep::cuboid(&[1.0, 1.0]).unwrap();
        let report = curvature_report(&sq, &g2, 1e-3, 1e-6).unwrap();
        assert!(!report.positive && report.failing_node.is_some());
        assert!(curvature_positive(&BodyRep::centered_ball(2, 1.0).unwrap(), &g2, 1e-3, 1e-6).unwrap());
        assert!(curvature_positive(&BodyRep::centered_ball(3, 1.0).unwrap(), &g3, 1e-3, 1e-6).unwrap());
        let e = BodyRep::axis_ellipsoid(&[1.0, 2.0, 0.5]).unwrap();
        let r = curvature_report(&e, &g3, 1e-3, 1e-6).unwrap();
        assert!(r.positive);
        // smallest radius of an ellipsoid is c²/a over its axes
        assert!(r.min_radius > 0.0625 - 1e-3);
        assert!(curvature_radius_2d(&sq, 0.0, 0.0).is_err());
    }
}
