use std::sync::Arc;

use nalgebra::DMatrix;
use rand::Rng;

use crate::error::{Error, Result};
use crate::geometry::hull::PolytopeGeometry;
use crate::geometry::rotation::Rotation;
use crate::linalg::{self, Coords};
use crate::quadrature::SphericalGrid;
use crate::regularization::MollifierKernel;

/// Step of the central differences used for support points of bodies known
/// only through support values (sampled and mollified nodes).
pub const GRADIENT_STEP: f64 = 1e-5;

/// Symbolic description of a convex compactum. Support functions are
/// evaluated lazily by walking the expression tree.
#[derive(Debug, Clone, PartialEq)]
pub enum BodyRep {
    /// Convex hull of the listed points. Interior points are allowed and
    /// simply never realize the maximum.
    Polytope { vertices: Vec<Vec<f64>> },
    Ball { center: Vec<f64>, radius: f64 },
    /// `center + A·Bⁿ` for a symmetric positive-definite `A`.
    Ellipsoid { center: Vec<f64>, matrix: DMatrix<f64> },
    Sum { left: Arc<BodyRep>, right: Arc<BodyRep> },
    Scaled { factor: f64, inner: Arc<BodyRep> },
    Rotated { rotation: Rotation, inner: Arc<BodyRep> },
    /// Intersection of the sampled support halfspaces, with support values
    /// between nodes given by the grid interpolant.
    Sampled(SupportSamples),
    /// Support function convolved with a radial bump kernel.
    Mollified { inner: Arc<BodyRep>, kernel: Arc<MollifierKernel> },
}

/// Values of a support function at the nodes of a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct SupportSamples {
    pub grid: Arc<SphericalGrid>,
    pub values: Vec<f64>,
}

impl SupportSamples {
    pub fn new(grid: Arc<SphericalGrid>, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::InvalidArgument(format!(
                "{} support values for a grid of {} nodes",
                values.len(),
                grid.len()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidBody("non-finite support value".into()));
        }
        Ok(SupportSamples { grid, values })
    }

    /// Homogeneous extension at an arbitrary point.
    pub fn eval(&self, x: &[f64]) -> f64 {
        self.grid.interpolate(&self.values, x)
    }

    /// Spot-checks sublinearity `ĥ(u+v) ≤ ĥ(u) + ĥ(v) + tol` on `trials`
    /// random node pairs; returns the worst violation found (≤ 0 is clean).
    pub fn audit_sublinearity<R: Rng + ?Sized>(&self, trials: usize, rng: &mut R) -> f64 {
        let nodes = self.grid.nodes();
        let mut worst = f64::NEG_INFINITY;
        for _ in 0..trials {
            let i = rng.random_range(0..nodes.len());
            let j = rng.random_range(0..nodes.len());
            let s = linalg::add(&nodes[i], &nodes[j]);
            if linalg::norm(&s) < 1e-9 {
                continue;
            }
            worst = worst.max(self.eval(&s) - self.values[i] - self.values[j]);
        }
        worst
    }
}

fn check_point(p: &[f64], what: &str) -> Result<()> {
    if p.is_empty() || p.iter().any(|x| !x.is_finite()) {
        return Err(Error::InvalidBody(format!("{what} must be a finite, nonempty vector")));
    }
    Ok(())
}

impl BodyRep {
    pub fn polytope(vertices: Vec<Vec<f64>>) -> Result<Self> {
        let Some(first) = vertices.first() else {
            return Err(Error::InvalidBody("polytope has an empty vertex list".into()));
        };
        let n = first.len();
        for v in &vertices {
            check_point(v, "polytope vertex")?;
            if v.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: v.len(),
                });
            }
        }
        Ok(BodyRep::Polytope { vertices })
    }

    /// A single point, i.e. the translation summand `{w}`.
    pub fn point(w: &[f64]) -> Self {
        BodyRep::Polytope {
            vertices: vec![w.to_vec()],
        }
    }

    pub fn ball(center: Vec<f64>, radius: f64) -> Result<Self> {
        check_point(&center, "ball centre")?;
        if !(radius > 0.0) || !radius.is_finite() {
            return Err(Error::InvalidBody(format!("ball radius must be > 0, got {radius}")));
        }
        Ok(BodyRep::Ball { center, radius })
    }

    /// Ball of radius `radius` about the origin of ℝⁿ.
    pub fn centered_ball(dim: usize, radius: f64) -> Result<Self> {
        BodyRep::ball(vec![0.0; dim], radius)
    }

    pub fn ellipsoid(center: Vec<f64>, matrix: DMatrix<f64>) -> Result<Self> {
        check_point(&center, "ellipsoid centre")?;
        let n = center.len();
        if matrix.nrows() != n || matrix.ncols() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: matrix.nrows(),
            });
        }
        let asym = (&matrix - matrix.transpose()).amax();
        if asym > 1e-12 * matrix.amax().max(1.0) {
            return Err(Error::InvalidBody("ellipsoid matrix is not symmetric".into()));
        }
        if matrix.clone().cholesky().is_none() {
            return Err(Error::InvalidBody("ellipsoid matrix is not positive definite".into()));
        }
        Ok(BodyRep::Ellipsoid { center, matrix })
    }

    /// Axis-aligned ellipsoid with the given semi-axis lengths.
    pub fn axis_ellipsoid(semi_axes: &[f64]) -> Result<Self> {
        BodyRep::ellipsoid(
            vec![0.0; semi_axes.len()],
            DMatrix::from_diagonal(&nalgebra::DVector::from_column_slice(semi_axes)),
        )
    }

    pub fn sum(left: BodyRep, right: BodyRep) -> Result<Self> {
        let (a, b) = (left.dim(), right.dim());
        if a != b {
            return Err(Error::DimensionMismatch { expected: a, found: b });
        }
        Ok(BodyRep::Sum {
            left: Arc::new(left),
            right: Arc::new(right),
        })
    }

    pub fn scaled(factor: f64, inner: BodyRep) -> Result<Self> {
        if !(factor >= 0.0) || !factor.is_finite() {
            return Err(Error::InvalidArgument(format!("scale factor must be >= 0, got {factor}")));
        }
        Ok(BodyRep::Scaled {
            factor,
            inner: Arc::new(inner),
        })
    }

    pub fn rotated(rotation: Rotation, inner: BodyRep) -> Result<Self> {
        if rotation.dim() != inner.dim() {
            return Err(Error::DimensionMismatch {
                expected: inner.dim(),
                found: rotation.dim(),
            });
        }
        Ok(BodyRep::Rotated {
            rotation,
            inner: Arc::new(inner),
        })
    }

    /// Axis-parallel box `[-a_1, a_1] × … × [-a_n, a_n]`.
    pub fn cuboid(half_extents: &[f64]) -> Result<Self> {
        let n = half_extents.len();
        let vertices = (0..1usize << n)
            .map(|mask| {
                (0..n)
                    .map(|i| if mask >> i & 1 == 1 { half_extents[i] } else { -half_extents[i] })
                    .collect()
            })
            .collect();
        BodyRep::polytope(vertices)
    }

    /// Regular polygon with `k` vertices on the circle of radius `r`.
    pub fn regular_polygon(k: usize, r: f64, phase: f64) -> Result<Self> {
        BodyRep::polytope(
            (0..k)
                .map(|i| {
                    let t = phase + 2.0 * std::f64::consts::PI * i as f64 / k as f64;
                    vec![r * t.cos(), r * t.sin()]
                })
                .collect(),
        )
    }

    pub fn dim(&self) -> usize {
        match self {
            BodyRep::Polytope { vertices } => vertices[0].len(),
            BodyRep::Ball { center, .. } | BodyRep::Ellipsoid { center, .. } => center.len(),
            BodyRep::Sum { left, .. } => left.dim(),
            BodyRep::Scaled { inner, .. } | BodyRep::Rotated { inner, .. } => inner.dim(),
            BodyRep::Mollified { inner, .. } => inner.dim(),
            BodyRep::Sampled(s) => s.grid.dim(),
        }
    }

    /// Whether some leaf is a sampled support function.
    pub fn contains_sampled(&self) -> bool {
        match self {
            BodyRep::Sampled(_) => true,
            BodyRep::Sum { left, right } => left.contains_sampled() || right.contains_sampled(),
            BodyRep::Scaled { inner, .. }
            | BodyRep::Rotated { inner, .. }
            | BodyRep::Mollified { inner, .. } => inner.contains_sampled(),
            _ => false,
        }
    }

    /// Depth of the expression tree (leaves have depth 1).
    pub fn depth(&self) -> usize {
        match self {
            BodyRep::Sum { left, right } => 1 + left.depth().max(right.depth()),
            BodyRep::Scaled { inner, .. }
            | BodyRep::Rotated { inner, .. }
            | BodyRep::Mollified { inner, .. } => 1 + inner.depth(),
            _ => 1,
        }
    }

    /// Support function `h(x) = sup⟨y, x⟩` of the positively homogeneous
    /// extension; `x` need not be a unit vector.
    pub fn eval_support(&self, x: &[f64]) -> f64 {
        match self {
            BodyRep::Polytope { vertices } => vertices
                .iter()
                .map(|v| linalg::dot(v, x))
                .fold(f64::NEG_INFINITY, f64::max),
            BodyRep::Ball { center, radius } => linalg::dot(center, x) + radius * linalg::norm(x),
            BodyRep::Ellipsoid { center, matrix } => linalg::dot(center, x) + transposed_norm(matrix, x),
            BodyRep::Sum { left, right } => left.eval_support(x) + right.eval_support(x),
            BodyRep::Scaled { factor, inner } => {
                if *factor == 0.0 {
                    0.0
                } else {
                    factor * inner.eval_support(x)
                }
            }
            BodyRep::Rotated { rotation, inner } => inner.eval_support(&rotation.apply_inverse(x)),
            BodyRep::Sampled(s) => s.eval(x),
            BodyRep::Mollified { inner, kernel } => {
                let r = linalg::norm(x);
                if r == 0.0 {
                    0.0
                } else {
                    r * kernel.eval_unit(inner, &linalg::scale(x, 1.0 / r))
                }
            }
        }
    }

    /// Support value at a direction known to have unit length. Balls use the
    /// radius directly so that `h_{rB}(u) = r` holds exactly.
    pub fn eval_unit(&self, u: &[f64]) -> f64 {
        match self {
            BodyRep::Ball { center, radius } => linalg::dot(center, u) + radius,
            BodyRep::Sum { left, right } => left.eval_unit(u) + right.eval_unit(u),
            BodyRep::Scaled { factor, inner } => {
                if *factor == 0.0 {
                    0.0
                } else {
                    factor * inner.eval_unit(u)
                }
            }
            BodyRep::Rotated { rotation, inner } => inner.eval_unit(&rotation.apply_inverse(u)),
            BodyRep::Mollified { inner, kernel } => kernel.eval_unit(inner, u),
            _ => self.eval_support(u),
        }
    }

    /// A point of the body realizing the support value in direction `u`
    /// (any maximizer when the support set is a face).
    pub fn support_point(&self, u: &[f64]) -> Coords {
        self.support_point_impl(u, false)
            .expect("non-strict support points are always defined")
    }

    pub(crate) fn support_point_impl(&self, u: &[f64], strict: bool) -> Result<Coords> {
        Ok(match self {
            BodyRep::Polytope { vertices } => {
                let vals: Vec<f64> = vertices.iter().map(|v| linalg::dot(v, u)).collect();
                let best = vals.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                let i = vals.iter().position(|&v| v == best).unwrap();
                if strict {
                    let tol = 1e-9 * (1.0 + best.abs());
                    let mut face: Vec<Vec<f64>> = Vec::new();
                    for (v, &h) in vertices.iter().zip(&vals) {
                        if h >= best - tol && !face.iter().any(|f| linalg::dist(f, v) <= tol) {
                            face.push(v.clone());
                        }
                    }
                    if face.len() > 1 {
                        return Err(Error::NotStrictlyConvex { face });
                    }
                }
                vertices[i].iter().copied().collect()
            }
            BodyRep::Ball { center, radius } => {
                let n = linalg::norm(u);
                center.iter().zip(u).map(|(c, x)| c + radius * x / n).collect()
            }
            BodyRep::Ellipsoid { center, matrix } => {
                let n = center.len();
                let atu: Vec<f64> = (0..n).map(|j| (0..n).map(|i| matrix[(i, j)] * u[i]).sum()).collect();
                let len = linalg::norm(&atu);
                (0..n)
                    .map(|i| center[i] + (0..n).map(|j| matrix[(i, j)] * atu[j]).sum::<f64>() / len)
                    .collect()
            }
            BodyRep::Sum { left, right } => {
                linalg::add(&left.support_point_impl(u, strict)?, &right.support_point_impl(u, strict)?)
            }
            BodyRep::Scaled { factor, inner } => {
                if *factor == 0.0 {
                    std::iter::repeat_n(0.0, u.len()).collect()
                } else {
                    linalg::scale(&inner.support_point_impl(u, strict)?, *factor)
                }
            }
            BodyRep::Rotated { rotation, inner } => {
                rotation.apply(&inner.support_point_impl(&rotation.apply_inverse(u), strict)?)
            }
            BodyRep::Sampled(_) | BodyRep::Mollified { .. } => self.support_gradient(u, GRADIENT_STEP),
        })
    }

    /// Central-difference gradient of the homogeneous support function.
    pub fn support_gradient(&self, x: &[f64], step: f64) -> Coords {
        let mut probe: Coords = x.iter().copied().collect();
        (0..x.len())
            .map(|i| {
                probe[i] = x[i] + step;
                let plus = self.eval_support(&probe);
                probe[i] = x[i] - step;
                let minus = self.eval_support(&probe);
                probe[i] = x[i];
                (plus - minus) / (2.0 * step)
            })
            .collect()
    }

    /// Body translated by `w`. Translations are pushed into the leaves where
    /// that is exact; otherwise the point `{w}` is added as a summand.
    pub fn translated(&self, w: &[f64]) -> BodyRep {
        if w.iter().all(|&x| x == 0.0) {
            return self.clone();
        }
        match self {
            BodyRep::Polytope { vertices } => BodyRep::Polytope {
                vertices: vertices
                    .iter()
                    .map(|v| v.iter().zip(w).map(|(a, b)| a + b).collect())
                    .collect(),
            },
            BodyRep::Ball { center, radius } => BodyRep::Ball {
                center: center.iter().zip(w).map(|(a, b)| a + b).collect(),
                radius: *radius,
            },
            BodyRep::Ellipsoid { center, matrix } => BodyRep::Ellipsoid {
                center: center.iter().zip(w).map(|(a, b)| a + b).collect(),
                matrix: matrix.clone(),
            },
            BodyRep::Sampled(s) => BodyRep::Sampled(SupportSamples {
                grid: s.grid.clone(),
                values: s
                    .grid
                    .nodes()
                    .iter()
                    .zip(&s.values)
                    .map(|(u, h)| h + linalg::dot(u, w))
                    .collect(),
            }),
            BodyRep::Sum { left, right } => BodyRep::Sum {
                left: Arc::new(left.translated(w)),
                right: right.clone(),
            },
            BodyRep::Scaled { factor, inner } if *factor > 0.0 => BodyRep::Scaled {
                factor: *factor,
                inner: Arc::new(inner.translated(&linalg::scale(w, 1.0 / factor))),
            },
            BodyRep::Rotated { rotation, inner } => BodyRep::Rotated {
                rotation: rotation.clone(),
                inner: Arc::new(inner.translated(&rotation.apply_inverse(w))),
            },
            // the kernel has unit mass and zero mean, so T(D + w) = T(D) + w
            BodyRep::Mollified { inner, kernel } => BodyRep::Mollified {
                inner: Arc::new(inner.translated(w)),
                kernel: kernel.clone(),
            },
            BodyRep::Scaled { .. } => BodyRep::Sum {
                left: Arc::new(self.clone()),
                right: Arc::new(BodyRep::point(w)),
            },
        }
    }

    /// Explicit vertex set when the body is a polytope expression
    /// (polytopes combined by sums, scalings and rotations).
    pub fn polytope_vertices(&self) -> Option<Vec<Vec<f64>>> {
        match self {
            BodyRep::Polytope { vertices } => Some(vertices.clone()),
            BodyRep::Sum { left, right } => {
                let (a, b) = (left.polytope_vertices()?, right.polytope_vertices()?);
                let sums: Vec<Vec<f64>> = a
                    .iter()
                    .flat_map(|p| b.iter().map(move |q| p.iter().zip(q).map(|(x, y)| x + y).collect()))
                    .collect();
                Some(reduce_vertices(sums))
            }
            BodyRep::Scaled { factor, inner } => Some(
                inner
                    .polytope_vertices()?
                    .iter()
                    .map(|v| v.iter().map(|x| x * factor).collect())
                    .collect(),
            ),
            BodyRep::Rotated { rotation, inner } => Some(
                inner
                    .polytope_vertices()?
                    .iter()
                    .map(|v| rotation.apply(v).to_vec())
                    .collect(),
            ),
            _ => None,
        }
    }

    /// Width `h(u) + h(-u)` in direction `u`.
    pub fn width(&self, u: &[f64]) -> f64 {
        let neg: Coords = u.iter().map(|x| -x).collect();
        self.eval_support(u) + self.eval_support(&neg)
    }
}

/// Hull vertices for n = 2, 3; other dimensions keep the list unchanged.
pub(crate) fn reduce_vertices(points: Vec<Vec<f64>>) -> Vec<Vec<f64>> {
    match PolytopeGeometry::new(&points) {
        Ok(g) => g.vertices.into_iter().map(|v| v.to_vec()).collect(),
        Err(_) => points,
    }
}

fn transposed_norm(m: &DMatrix<f64>, x: &[f64]) -> f64 {
    let n = x.len();
    let mut s = 0.0;
    for j in 0..n {
        let mut c = 0.0;
        for i in 0..n {
            c += m[(i, j)] * x[i];
        }
        s += c * c;
    }
    s.sqrt()
}

/// Support values of `body` at every node of `grid`.
pub fn sample_support(body: &BodyRep, grid: &Arc<SphericalGrid>) -> Result<SupportSamples> {
    if body.dim() != grid.dim() {
        return Err(Error::DimensionMismatch {
            expected: grid.dim(),
            found: body.dim(),
        });
    }
    let values = grid.nodes().iter().map(|u| body.eval_unit(u)).collect();
    SupportSamples::new(grid.clone(), values)
}

/// Support function at an arbitrary direction.
pub fn eval_support(body: &BodyRep, x: &[f64]) -> Result<f64> {
    if x.len() != body.dim() {
        return Err(Error::DimensionMismatch {
            expected: body.dim(),
            found: x.len(),
        });
    }
    Ok(body.eval_support(x))
}

/// Symbolic Minkowski sum.
pub fn minkowski_sum(a: &BodyRep, b: &BodyRep) -> Result<BodyRep> {
    BodyRep::sum(a.clone(), b.clone())
}

/// Symbolic dilation `a·A`, `a ≥ 0`.
pub fn scale(a: f64, body: &BodyRep) -> Result<BodyRep> {
    BodyRep::scaled(a, body.clone())
}

/// Explicit polytope `conv{p + q}` for two polytope expressions.
pub fn vertex_sum_polytope(a: &BodyRep, b: &BodyRep) -> Result<BodyRep> {
    let sum = BodyRep::sum(a.clone(), b.clone())?;
    match sum.polytope_vertices() {
        Some(v) => BodyRep::polytope(v),
        None => Err(Error::Representation("vertex sums need two polytope expressions".into())),
    }
}
