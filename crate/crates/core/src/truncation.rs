//! (ε, u)-truncation of polytopes and the symmetry-destroying sequence of
//! truncations along the coordinate axes.

use std::f64::consts::PI;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::geometry::body::BodyRep;
use crate::geometry::hausdorff::{hausdorff, hausdorff_below};
use crate::geometry::hull::PolytopeGeometry;
use crate::geometry::rotation::{planar_candidates, platonic_rotation_groups, so3_grid, Rotation};
use crate::geometry::steiner::recenter;
use crate::linalg::{self, Coords};
use crate::quadrature::{SphericalGrid, UnitVector};
use crate::regularization::{mollified, RegularizationParams};

#[derive(Debug, Clone, PartialEq)]
pub struct TruncationSpec {
    pub u: UnitVector,
    pub eps: f64,
}

impl TruncationSpec {
    pub fn new(u: UnitVector, eps: f64) -> Result<Self> {
        if !(eps >= 0.0) || !eps.is_finite() {
            return Err(Error::InvalidArgument(format!("eps must be a finite nonnegative number, got {eps}")));
        }
        Ok(TruncationSpec { u, eps })
    }
}

/// A flat face created by a truncation.
#[derive(Debug, Clone, PartialEq)]
pub struct FaceRecord {
    pub normal: UnitVector,
    pub diameter: f64,
    pub vertex_set: Vec<Vec<f64>>,
}

impl FaceRecord {
    pub fn new(normal: UnitVector, vertex_set: Vec<Vec<f64>>) -> Self {
        let mut diameter: f64 = 0.0;
        for (i, a) in vertex_set.iter().enumerate() {
            for b in &vertex_set[i + 1..] {
                diameter = diameter.max(linalg::dist(a, b));
            }
        }
        FaceRecord {
            normal,
            diameter,
            vertex_set,
        }
    }

    fn translated(&self, w: &[f64]) -> FaceRecord {
        FaceRecord {
            normal: self.normal.clone(),
            diameter: self.diameter,
            vertex_set: self
                .vertex_set
                .iter()
                .map(|v| v.iter().zip(w).map(|(a, b)| a + b).collect())
                .collect(),
        }
    }
}

fn polytope_input(body: &BodyRep) -> Result<PolytopeGeometry> {
    let vertices = body
        .polytope_vertices()
        .ok_or_else(|| Error::Representation("truncation needs a polytope; approximate the body first".into()))?;
    let geo = PolytopeGeometry::new(&vertices)?;
    if !geo.is_full_dimensional() {
        return Err(Error::InvalidBody("truncation needs a full-dimensional polytope".into()));
    }
    Ok(geo)
}

fn scale_of(vertices: &[Coords]) -> f64 {
    vertices
        .iter()
        .map(|v| v.iter().map(|x| x.abs()).fold(0.0, f64::max))
        .fold(0.0, f64::max)
        .max(1e-300)
}

// K ∩ {⟨x,u⟩ ≤ h_K(u) − eps} without re-centering, with the new face.
fn clip(geo: &PolytopeGeometry, u: &UnitVector, eps: f64) -> Result<(Vec<Coords>, FaceRecord)> {
    let vals: Vec<f64> = geo.vertices.iter().map(|v| linalg::dot(v, u)).collect();
    let top = vals.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let bottom = vals.iter().copied().fold(f64::INFINITY, f64::min);
    let width = top - bottom;
    if eps >= width {
        return Err(Error::EmptyResult { eps, width });
    }
    let cut = top - eps;
    let tol = 1e-12 * scale_of(&geo.vertices);
    let mut points: Vec<Coords> = Vec::new();
    for (v, &h) in geo.vertices.iter().zip(&vals) {
        if h <= cut + tol {
            points.push(v.clone());
        }
    }
    if eps > 0.0 {
        for (i, j) in geo.edges() {
            let (a, b) = (vals[i] - cut, vals[j] - cut);
            if (a > tol && b < -tol) || (a < -tol && b > tol) {
                let s = a / (a - b);
                let p: Coords = geo.vertices[i]
                    .iter()
                    .zip(&geo.vertices[j])
                    .map(|(x, y)| x + s * (y - x))
                    .collect();
                points.push(p);
            }
        }
    }
    let clipped = PolytopeGeometry::new(&points)?;
    let face_tol = 1e-9 * scale_of(&clipped.vertices);
    let face: Vec<Vec<f64>> = clipped
        .vertices
        .iter()
        .filter(|v| (linalg::dot(v, u) - cut).abs() <= face_tol)
        .map(|v| v.to_vec())
        .collect();
    Ok((clipped.vertices, FaceRecord::new(u.clone(), face)))
}

/// `recenter(K ∩ {x : ⟨x,u⟩ ≤ h_K(u) − ε})` together with the new face (in
/// the coordinates of the re-centered result).
pub fn truncate_with_face(body: &BodyRep, spec: &TruncationSpec, grid: &SphericalGrid) -> Result<(BodyRep, FaceRecord)> {
    if spec.u.dim() != body.dim() {
        return Err(Error::DimensionMismatch {
            expected: body.dim(),
            found: spec.u.dim(),
        });
    }
    let geo = polytope_input(body)?;
    let (vertices, face) = clip(&geo, &spec.u, spec.eps)?;
    let (out, shift) = recenter_polytope(vertices, grid)?;
    Ok((out, face.translated(&shift)))
}

/// `recenter(K ∩ {x : ⟨x,u⟩ ≤ h_K(u) − ε})`.
pub fn truncate(body: &BodyRep, spec: &TruncationSpec, grid: &SphericalGrid) -> Result<BodyRep> {
    Ok(truncate_with_face(body, spec, grid)?.0)
}

fn recenter_polytope(vertices: Vec<Coords>, grid: &SphericalGrid) -> Result<(BodyRep, Coords)> {
    let p = BodyRep::polytope(vertices.iter().map(|v| v.to_vec()).collect())?;
    let s = crate::geometry::steiner::steiner(&p, grid)?;
    let shift = linalg::scale(&s, -1.0);
    Ok((p.translated(&shift), shift))
}

/// Whether some vertex has a normal cone wider than `tol_angle`, i.e. the
/// polytope has a corner that a C¹ body could not have.
pub fn is_c1_violated(body: &BodyRep, tol_angle: f64) -> Result<bool> {
    let geo = polytope_input(body)?;
    Ok(geo.normal_cone_widths().iter().any(|&w| w > tol_angle))
}

#[derive(Debug, Clone)]
pub struct DesymmetrizeParams {
    /// Truncation directions; `None` means e₁, …, eₙ.
    pub axes: Option<Vec<UnitVector>>,
    /// Separation margin as a fraction of the body's diameter.
    pub margin_factor: f64,
    /// Initial smoothing scale, as a fraction of the budget.
    pub smoothing_fraction: f64,
    /// Support directions used for the polytope approximation.
    pub approximation_directions_2d: usize,
    pub approximation_directions_3d: usize,
    pub max_bisections: usize,
}

impl Default for DesymmetrizeParams {
    fn default() -> Self {
        DesymmetrizeParams {
            axes: None,
            margin_factor: 1e-3,
            smoothing_fraction: 0.1,
            approximation_directions_2d: 720,
            approximation_directions_3d: 1500,
            max_bisections: 40,
        }
    }
}

/// Polytope with vertices at the support points of `body` in `count`
/// directions (equally spaced in 2D, a Fibonacci sphere in 3D).
pub fn polytope_approximation(body: &BodyRep, count: usize) -> Result<BodyRep> {
    let dirs: Vec<Coords> = match body.dim() {
        2 => (0..count)
            .map(|k| {
                let t = 2.0 * PI * (k as f64 + 0.5) / count as f64;
                Coords::from_slice(&[t.cos(), t.sin()])
            })
            .collect(),
        3 => fibonacci_sphere(count),
        n => {
            return Err(Error::Representation(format!(
                "polytope approximation is implemented for n = 2, 3 (got {n})"
            )))
        }
    };
    let points: Vec<Coords> = dirs.iter().map(|u| body.support_point(u)).collect();
    let geo = PolytopeGeometry::new(&points)?;
    BodyRep::polytope(geo.vertices.iter().map(|v| v.to_vec()).collect())
}

/// [`polytope_approximation`] followed by rounds of refinement: around every
/// vertex whose normal cone is wider than `max_cone`, the support points in
/// the incident facet normals are added. Stops when no cone is too wide or
/// after `max_rounds`.
pub fn polytope_approximation_fine(body: &BodyRep, count: usize, max_cone: f64, max_rounds: usize) -> Result<BodyRep> {
    let mut points = polytope_approximation(body, count)?.polytope_vertices().expect("polytope");
    for _ in 0..max_rounds {
        let geo = PolytopeGeometry::new(&points)?;
        let widths = geo.normal_cone_widths();
        let mut normals: Vec<usize> = geo
            .vertex_facets()
            .iter()
            .zip(&widths)
            .filter(|(_, &w)| w > max_cone)
            .flat_map(|(fs, _)| fs.iter().copied())
            .collect();
        if normals.is_empty() {
            break;
        }
        normals.sort_unstable();
        normals.dedup();
        points = geo.vertices.iter().map(|v| v.to_vec()).collect();
        points.extend(normals.iter().map(|&f| body.support_point(&geo.facets[f].normal).to_vec()));
    }
    let geo = PolytopeGeometry::new(&points)?;
    BodyRep::polytope(geo.vertices.iter().map(|v| v.to_vec()).collect())
}

fn fibonacci_sphere(count: usize) -> Vec<Coords> {
    let golden = PI * (3.0 - 5f64.sqrt());
    (0..count)
        .map(|k| {
            let z = 1.0 - (2.0 * k as f64 + 1.0) / count as f64;
            let r = (1.0 - z * z).sqrt();
            let phi = golden * k as f64;
            Coords::from_slice(&[r * phi.cos(), r * phi.sin(), z])
        })
        .collect()
}

fn support_set(vertices: &[Coords], u: &[f64]) -> Vec<Coords> {
    let vals: Vec<f64> = vertices.iter().map(|v| linalg::dot(v, u)).collect();
    let top = vals.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let tol = 1e-9 * (1.0 + top.abs());
    vertices
        .iter()
        .zip(&vals)
        .filter(|(_, &h)| h >= top - tol)
        .map(|(v, _)| v.clone())
        .collect()
}

fn diameter(vertices: &[Coords]) -> f64 {
    let mut d: f64 = 0.0;
    for (i, a) in vertices.iter().enumerate() {
        for b in &vertices[i + 1..] {
            d = d.max(linalg::dist(a, b));
        }
    }
    d
}

/// Destroys the symmetries of `body` by n successive truncations with
/// decreasing depths, keeping the Hausdorff displacement within `budget`.
///
/// The body is first smoothed and replaced by a fine polytope
/// approximation, so that every axis has a single support point and each cut
/// creates a small face whose diameter grows with its depth. Depths are found
/// by halving until the new face is smaller than the previous one, every cut
/// stays separated from the earlier faces and from the support points of the
/// later axes, and the displacement stays within budget.
pub fn desymmetrize(body: &BodyRep, budget: f64, grid: &SphericalGrid) -> Result<(BodyRep, Vec<FaceRecord>)> {
    desymmetrize_with(body, budget, grid, &DesymmetrizeParams::default())
}

pub fn desymmetrize_with(
    body: &BodyRep,
    budget: f64,
    grid: &SphericalGrid,
    params: &DesymmetrizeParams,
) -> Result<(BodyRep, Vec<FaceRecord>)> {
    if !(budget > 0.0) {
        return Err(Error::InvalidArgument(format!("budget must be positive, got {budget}")));
    }
    let n = body.dim();
    if body.dim() != grid.dim() {
        return Err(Error::DimensionMismatch {
            expected: grid.dim(),
            found: n,
        });
    }
    let axes: Vec<UnitVector> = match &params.axes {
        Some(a) => a.clone(),
        None => (0..n).map(|i| UnitVector::axis(n, i)).collect(),
    };
    if axes.iter().any(|a| a.dim() != n) {
        return Err(Error::InvalidArgument("truncation axes have the wrong dimension".into()));
    }
    let reference = recenter(body, grid)?;
    let count = if n == 2 {
        params.approximation_directions_2d
    } else {
        params.approximation_directions_3d
    };

    // smooth, then approximate; shrink the smoothing until it costs at most
    // half of the budget
    let mut t = (params.smoothing_fraction * budget).min(1.0);
    let mut approx = None;
    let mut best_displacement = f64::INFINITY;
    for _ in 0..8 {
        let rp = RegularizationParams::new(t)?;
        let smooth = BodyRep::sum(mollified(&reference, &rp)?, BodyRep::centered_ball(n, t)?)?;
        let p = recenter(&polytope_approximation(&smooth, count)?, grid)?;
        let d = hausdorff(&p, &reference, grid)?;
        best_displacement = best_displacement.min(d);
        if d <= 0.5 * budget {
            approx = Some(p);
            break;
        }
        t *= 0.5;
    }
    let Some(approx) = approx else {
        return Err(Error::InfeasibleBudget {
            budget,
            minimal_displacement: best_displacement,
        });
    };

    let base = polytope_input(&approx)?;
    let margin = params.margin_factor * diameter(&base.vertices);
    let width_min = axes
        .iter()
        .map(|a| approx.width(a))
        .fold(f64::INFINITY, f64::min);

    let mut current = base.clone();
    let mut faces: Vec<FaceRecord> = Vec::new();
    let mut cuts: Vec<(Coords, f64)> = Vec::new(); // (normal, plane offset)
    let mut eps = (0.25 * budget).min(0.25 * width_min);
    for (k, axis) in axes.iter().enumerate() {
        let later_support: Vec<Coords> = axes[k + 1..]
            .iter()
            .flat_map(|a| support_set(&current.vertices, a))
            .collect();
        let top = current
            .vertices
            .iter()
            .map(|v| linalg::dot(v, axis))
            .fold(f64::NEG_INFINITY, f64::max);
        let mut accepted = None;
        if k > 0 {
            eps *= 0.6;
        }
        for _ in 0..params.max_bisections {
            let plane = top - eps;
            let ok = (|| -> Result<Option<(PolytopeGeometry, FaceRecord)>> {
                let (vertices, face) = clip(&current, axis, eps)?;
                if face.vertex_set.len() < n {
                    return Ok(None);
                }
                if let Some(prev) = faces.last() {
                    if !(face.diameter < prev.diameter) {
                        return Ok(None);
                    }
                }
                // the new face keeps clear of earlier cut planes and the
                // earlier faces keep clear of the new one
                for (j, (normal, offset)) in cuts.iter().enumerate() {
                    if face.vertex_set.iter().any(|v| linalg::dot(v, normal) > offset - margin) {
                        return Ok(None);
                    }
                    if faces[j].vertex_set.iter().any(|v| linalg::dot(v, axis) > plane - margin) {
                        return Ok(None);
                    }
                }
                if later_support.iter().any(|v| linalg::dot(v, axis) > plane - margin) {
                    return Ok(None);
                }
                // later depths never exceed this one, so the removed cap must
                // also keep clear of every region a later cut can reach
                let mut cap = current
                    .vertices
                    .iter()
                    .map(|v| v.as_slice())
                    .filter(|v| linalg::dot(v, axis) > plane)
                    .chain(face.vertex_set.iter().map(|v| v.as_slice()));
                let reach: Vec<(Coords, f64)> = axes[k + 1..]
                    .iter()
                    .map(|a| {
                        let top_a = current.vertices.iter().map(|v| linalg::dot(v, a)).fold(f64::NEG_INFINITY, f64::max);
                        (a.coords().iter().copied().collect(), top_a - eps - margin)
                    })
                    .collect();
                if cap.any(|v| reach.iter().any(|(a, lim)| linalg::dot(v, a) > *lim)) {
                    return Ok(None);
                }
                let geo = PolytopeGeometry::new(&vertices)?;
                let trial = BodyRep::polytope(vertices.iter().map(|v| v.to_vec()).collect())?;
                let trial = recenter(&trial, grid)?;
                let d = hausdorff(&trial, &reference, grid)?;
                best_displacement = best_displacement.min(d);
                if d > budget {
                    return Ok(None);
                }
                Ok(Some((geo, face)))
            })()?;
            if let Some(found) = ok {
                accepted = Some(found);
                break;
            }
            eps *= 0.5;
        }
        let Some((geo, face)) = accepted else {
            return Err(Error::InfeasibleBudget {
                budget,
                minimal_displacement: best_displacement,
            });
        };
        cuts.push((axis.coords().iter().copied().collect(), top - eps));
        faces.push(face);
        current = geo;
    }
    let (out, shift) = recenter_polytope(current.vertices, grid)?;
    let faces = faces.iter().map(|f| f.translated(&shift)).collect();
    Ok((out, faces))
}

/// Candidates `g` with `hausdorff(gD, D) < tol`.
pub fn isotropy_estimate(
    body: &BodyRep,
    candidates: &[Rotation],
    tol: f64,
    grid: &SphericalGrid,
) -> Result<Vec<Rotation>> {
    let shared = Arc::new(body.clone());
    let mut out = Vec::new();
    for g in candidates {
        let moved = BodyRep::Rotated {
            rotation: g.clone(),
            inner: shared.clone(),
        };
        if hausdorff_below(&moved, body, grid, tol)? {
            out.push(g.clone());
        }
    }
    Ok(out)
}

/// Default candidate sets: 720 rotations and 720 reflections in the plane;
/// in space the octahedral and icosahedral rotation groups together with a
/// 576-element grid on SO(3), each also composed with −I. Duplicates removed.
pub fn default_candidates(n: usize) -> Result<Vec<Rotation>> {
    match n {
        2 => Ok(planar_candidates(720, true)),
        3 => {
            let mut proper = platonic_rotation_groups();
            proper.extend(so3_grid(72, 8));
            let mut out: Vec<Rotation> = Vec::new();
            for g in proper.iter().chain(proper.iter().map(|g| g.negated()).collect::<Vec<_>>().iter()) {
                if !out.iter().any(|h| h.distance(g) < 1e-9) {
                    out.push(g.clone());
                }
            }
            Ok(out)
        }
        _ => Err(Error::Representation(format!("no default candidate set for n = {n}"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::{make_grid_2d, make_grid_3d};

    #[test]
    fn refined_approximation_has_narrow_cones() {
        let e = BodyRep::axis_ellipsoid(&[1.0, 0.3, 0.6]).unwrap();
        let coarse = polytope_approximation(&e, 200).unwrap();
        let fine = polytope_approximation_fine(&e, 200, 0.15, 10).unwrap();
        let widest = |b: &BodyRep| {
            PolytopeGeometry::new(&b.polytope_vertices().unwrap())
                .unwrap()
                .normal_cone_widths()
                .into_iter()
                .fold(0.0, f64::max)
        };
        assert!(widest(&coarse) > 0.15);
        assert!(widest(&fine) <= 0.15);
        assert!(!is_c1_violated(&fine, 0.15).unwrap());
    }

    fn sorted(mut v: Vec<Vec<f64>>) -> Vec<Vec<f64>> {
        v.sort_by(|a, b| a.partial_cmp(b).unwrap());
        v
    }

    #[test]
    fn square_clip_by_hand() {
        let g = make_grid_2d(256).unwrap();
        let sq = BodyRep::cuboid(&[1.0, 1.0]).unwrap();
        let spec = TruncationSpec::new(UnitVector::axis(2, 0), 0.5).unwrap();
        let (out, face) = truncate_with_face(&sq, &spec, &g).unwrap();
        // [−1, 0.5] × [−1, 1], recentered by −(−0.25, 0)
        let want = sorted(vec![vec![-0.75, -1.0], vec![-0.75, 1.0], vec![0.75, -1.0], vec![0.75, 1.0]]);
        let got = sorted(out.polytope_vertices().unwrap());
        for (a, b) in want.iter().zip(&got) {
            assert!(linalg::dist(a, b) < 1e-12, "{got:?}");
        }
        assert!((face.diameter - 2.0).abs() < 1e-12);
    }

    #[test]
    fn zero_eps_is_recentering() {
        let g = make_grid_2d(256).unwrap();
        let tri = BodyRep::polytope(vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap();
        let spec = TruncationSpec::new(UnitVector::axis(2, 1), 0.0).unwrap();
        let a = truncate(&tri, &spec, &g).unwrap();
        let b = recenter(&tri, &g).unwrap();
        assert!(hausdorff(&a, &b, &g).unwrap() < 1e-15);
    }

    #[test]
    fn cube_corner_cut() {
        let g = make_grid_3d(16, 32).unwrap();
        let cube = BodyRep::cuboid(&[1.0, 1.0, 1.0]).unwrap();
        let u = UnitVector::normalize(&[1.0, 1.0, 1.0]).unwrap();
        let eps = 0.3;
        let (out, face) = truncate_with_face(&cube, &TruncationSpec::new(u.clone(), eps).unwrap(), &g).unwrap();
        assert_eq!(face.vertex_set.len(), 3);
        // the corner cut at depth ε has legs ε√3 along each edge
        let leg = eps * 3f64.sqrt();
        assert!((face.diameter - leg * 2f64.sqrt()).abs() < 1e-12);
        assert_eq!(out.polytope_vertices().unwrap().len(), 10);
    }

    #[test]
    fn empty_and_representation_errors() {
        let g = make_grid_2d(64).unwrap();
        let sq = BodyRep::cuboid(&[1.0, 1.0]).unwrap();
        let spec = TruncationSpec::new(UnitVector::axis(2, 0), 2.0).unwrap();
        assert!(matches!(truncate(&sq, &spec, &g), Err(Error::EmptyResult { .. })));
        let ball = BodyRep::centered_ball(2, 1.0).unwrap();
        let spec = TruncationSpec::new(UnitVector::axis(2, 0), 0.1).unwrap();
        assert!(matches!(truncate(&ball, &spec, &g), Err(Error::Representation(_))));
        assert!(TruncationSpec::new(UnitVector::axis(2, 0), -0.1).is_err());
    }

    #[test]
    fn c1_detection() {
        let sq = BodyRep::cuboid(&[1.0, 1.0]).unwrap();
        assert!(is_c1_violated(&sq, 0.1).unwrap());
        let disk = BodyRep::regular_polygon(2048, 1.0, 0.0).unwrap();
        assert!(!is_c1_violated(&disk, 0.1).unwrap());
    }

    #[test]
    fn square_has_dihedral_isotropy() {
        let g = make_grid_2d(512).unwrap();
        let sq = BodyRep::cuboid(&[1.0, 1.0]).unwrap();
        let iso = isotropy_estimate(&sq, &default_candidates(2).unwrap(), 1e-9, &g).unwrap();
        assert_eq!(iso.len(), 8);
        let ball = BodyRep::centered_ball(2, 1.0).unwrap();
        let all = default_candidates(2).unwrap();
        assert_eq!(isotropy_estimate(&ball, &all, 1e-9, &g).unwrap().len(), all.len());
    }

    #[test]
    fn desymmetrized_square_is_asymmetric() {
        let g = make_grid_2d(1024).unwrap();
        let sq = BodyRep::cuboid(&[1.0, 1.0]).unwrap();
        let (out, faces) = desymmetrize(&sq, 0.3, &g).unwrap();
        assert_eq!(faces.len(), 2);
        assert!(faces[1].diameter < faces[0].diameter);
        assert!(hausdorff(&out, &recenter(&sq, &g).unwrap(), &g).unwrap() <= 0.3);
        let iso = isotropy_estimate(&out, &default_candidates(2).unwrap(), 1e-6, &g).unwrap();
        assert_eq!(iso.len(), 1);
        assert!(iso[0].distance_to_identity() < 1e-12);
    }
}
