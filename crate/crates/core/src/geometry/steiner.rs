//! Steiner point `s(D) = (1/vol Bⁿ) ∫ u h_D(u) du` and re-centering.
//!
//! The integral is evaluated structurally where possible: it is Minkowski
//! linear and rigid-motion equivariant, balls and ellipsoids map to their
//! centers, and for a polytope it equals the external-angle weighted mean of
//! the vertices. Quadrature is only used for sampled leaves and for n > 3,
//! because the trapezoid rule converges slowly on the kinks of polytope
//! support functions.

use std::fmt;

use crate::error::{Error, Result};
use crate::geometry::body::BodyRep;
use crate::geometry::hull::PolytopeGeometry;
use crate::linalg::{self, Coords};
use crate::quadrature::{ball_volume, SphericalGrid};

#[derive(Debug, Clone, PartialEq)]
pub struct SteinerVector {
    pub coords: Vec<f64>,
}

impl SteinerVector {
    pub fn norm(&self) -> f64 {
        linalg::norm(&self.coords)
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }
}

impl std::ops::Deref for SteinerVector {
    type Target = [f64];

    fn deref(&self) -> &[f64] {
        &self.coords
    }
}

impl fmt::Display for SteinerVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.coords.iter().map(|x| format!("{x:.16e}")).collect();
        write!(f, "[{}]", parts.join(", "))
    }
}

fn check_dim(body: &BodyRep, grid: &SphericalGrid) -> Result<()> {
    if body.dim() != grid.dim() {
        return Err(Error::DimensionMismatch {
            expected: grid.dim(),
            found: body.dim(),
        });
    }
    Ok(())
}

/// Steiner point of `body`; `grid` is only used for leaves that need
/// quadrature.
pub fn steiner(body: &BodyRep, grid: &SphericalGrid) -> Result<SteinerVector> {
    check_dim(body, grid)?;
    Ok(SteinerVector {
        coords: structural(body, grid).to_vec(),
    })
}

/// The defining integral evaluated on `grid`, for every kind of body.
pub fn steiner_quadrature(body: &BodyRep, grid: &SphericalGrid) -> Result<SteinerVector> {
    check_dim(body, grid)?;
    Ok(SteinerVector {
        coords: quadrature(body, grid).to_vec(),
    })
}

fn quadrature(body: &BodyRep, grid: &SphericalGrid) -> Coords {
    let n = grid.dim();
    let mut acc: Coords = std::iter::repeat_n(0.0, n).collect();
    for (u, w) in grid.nodes().iter().zip(grid.weights()) {
        let h = body.eval_unit(u);
        for (a, ui) in acc.iter_mut().zip(u.iter()) {
            *a += w * h * ui;
        }
    }
    let vol = ball_volume(n);
    acc.iter_mut().for_each(|a| *a /= vol);
    acc
}

fn structural(body: &BodyRep, grid: &SphericalGrid) -> Coords {
    match body {
        BodyRep::Polytope { vertices } => polytope_steiner(vertices).unwrap_or_else(|_| quadrature(body, grid)),
        BodyRep::Ball { center, .. } | BodyRep::Ellipsoid { center, .. } => center.iter().copied().collect(),
        BodyRep::Sum { left, right } => linalg::add(&structural(left, grid), &structural(right, grid)),
        BodyRep::Scaled { factor, inner } => {
            if *factor == 0.0 {
                std::iter::repeat_n(0.0, body.dim()).collect()
            } else {
                linalg::scale(&structural(inner, grid), *factor)
            }
        }
        BodyRep::Rotated { rotation, inner } => rotation.apply(&structural(inner, grid)),
        // the mollifier is a rigid-motion equivariant Minkowski endomorphism
        BodyRep::Mollified { inner, .. } => structural(inner, grid),
        BodyRep::Sampled(_) => quadrature(body, grid),
    }
}

/// `Σ_v γ(v)·v` over the vertices of the hull, with `γ(v)` the fraction of
/// the sphere covered by the normal cone at `v`.
pub fn polytope_steiner(vertices: &[Vec<f64>]) -> Result<Coords> {
    let geo = PolytopeGeometry::new(vertices)?;
    let angles = geo.external_angles();
    let mut s: Coords = std::iter::repeat_n(0.0, geo.dim).collect();
    for (v, g) in geo.vertices.iter().zip(&angles) {
        for (si, vi) in s.iter_mut().zip(v) {
            *si += g * vi;
        }
    }
    Ok(s)
}

/// `D − s(D)`.
pub fn recenter(body: &BodyRep, grid: &SphericalGrid) -> Result<BodyRep> {
    let s = steiner(body, grid)?;
    Ok(body.translated(&linalg::scale(&s, -1.0)))
}
