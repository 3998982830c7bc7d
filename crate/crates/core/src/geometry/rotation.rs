//! Elements of the orthogonal group O(n).

use std::f64::consts::PI;

use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::linalg::Coords;

/// Orthogonality tolerance for `gᵀg = I` and `|det| = 1`.
pub const ORTHO_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct Rotation {
    matrix: DMatrix<f64>,
}

impl Rotation {
    /// Validates `gᵀg = I` and `det = ±1` within [`ORTHO_TOL`].
    pub fn new(matrix: DMatrix<f64>) -> Result<Self> {
        if !matrix.is_square() || matrix.nrows() == 0 {
            return Err(Error::InvalidArgument("rotation matrix must be square".into()));
        }
        let n = matrix.nrows();
        let defect = (matrix.transpose() * &matrix - DMatrix::<f64>::identity(n, n)).amax();
        if defect > ORTHO_TOL {
            return Err(Error::InvalidArgument(format!(
                "matrix is not orthogonal: |gᵀg - I| = {defect:e}"
            )));
        }
        let det = matrix.determinant();
        if (det.abs() - 1.0).abs() > ORTHO_TOL {
            return Err(Error::InvalidArgument(format!("determinant {det} is not ±1")));
        }
        Ok(Rotation { matrix })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::InvalidArgument("rotation matrix must be square".into()));
        }
        Rotation::new(DMatrix::from_fn(n, n, |i, j| rows[i][j]))
    }

    pub fn identity(n: usize) -> Self {
        Rotation {
            matrix: DMatrix::identity(n, n),
        }
    }

    /// Planar rotation by `theta`.
    pub fn from_angle(theta: f64) -> Self {
        let (s, c) = theta.sin_cos();
        Rotation {
            matrix: DMatrix::from_row_slice(2, 2, &[c, -s, s, c]),
        }
    }

    /// Planar rotation by `theta` composed with the reflection `(x, y) ↦ (x, -y)`.
    pub fn reflection_from_angle(theta: f64) -> Self {
        let (s, c) = theta.sin_cos();
        Rotation {
            matrix: DMatrix::from_row_slice(2, 2, &[c, s, s, -c]),
        }
    }

    /// Rotation of ℝ³ about `axis` (need not be normalized) by `angle`.
    pub fn from_axis_angle(axis: &[f64], angle: f64) -> Self {
        let n = crate::linalg::norm(axis);
        if n == 0.0 || angle == 0.0 {
            return Rotation::identity(3);
        }
        let (x, y, z) = (axis[0] / n, axis[1] / n, axis[2] / n);
        let (s, c) = angle.sin_cos();
        let t = 1.0 - c;
        Rotation {
            matrix: DMatrix::from_row_slice(
                3,
                3,
                &[
                    t * x * x + c,
                    t * x * y - s * z,
                    t * x * z + s * y,
                    t * x * y + s * z,
                    t * y * y + c,
                    t * y * z - s * x,
                    t * x * z - s * y,
                    t * y * z + s * x,
                    t * z * z + c,
                ],
            ),
        }
    }

    /// Rotation `exp([w]×)` for a rotation vector `w`.
    pub fn from_rotation_vector(w: &[f64]) -> Self {
        Rotation::from_axis_angle(w, crate::linalg::norm(w))
    }

    /// Rotation from a (not necessarily unit) quaternion `(w, x, y, z)`.
    pub fn from_quaternion(q: [f64; 4]) -> Self {
        let n = (q[0] * q[0] + q[1] * q[1] + q[2] * q[2] + q[3] * q[3]).sqrt();
        let (w, x, y, z) = (q[0] / n, q[1] / n, q[2] / n, q[3] / n);
        Rotation {
            matrix: DMatrix::from_row_slice(
                3,
                3,
                &[
                    1.0 - 2.0 * (y * y + z * z),
                    2.0 * (x * y - w * z),
                    2.0 * (x * z + w * y),
                    2.0 * (x * y + w * z),
                    1.0 - 2.0 * (x * x + z * z),
                    2.0 * (y * z - w * x),
                    2.0 * (x * z - w * y),
                    2.0 * (y * z + w * x),
                    1.0 - 2.0 * (x * x + y * y),
                ],
            ),
        }
    }

    /// Haar-random element of O(n) (or SO(n) when `proper`).
    pub fn random<R: Rng + ?Sized>(n: usize, proper: bool, rng: &mut R) -> Self {
        let a = DMatrix::<f64>::from_fn(n, n, |_, _| rng.sample(StandardNormal));
        let qr = a.qr();
        let (mut q, r) = (qr.q(), qr.r());
        for j in 0..n {
            if r[(j, j)] < 0.0 {
                q.column_mut(j).neg_mut();
            }
        }
        if proper && q.determinant() < 0.0 {
            q.column_mut(0).neg_mut();
        }
        Rotation { matrix: q }
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        (0..self.dim())
            .map(|i| self.matrix.row(i).iter().copied().collect())
            .collect()
    }

    pub fn det(&self) -> f64 {
        self.matrix.determinant()
    }

    pub fn is_proper(&self) -> bool {
        self.det() > 0.0
    }

    /// `g·x`.
    pub fn apply(&self, x: &[f64]) -> Coords {
        let n = self.dim();
        (0..n)
            .map(|i| (0..n).map(|j| self.matrix[(i, j)] * x[j]).sum())
            .collect()
    }

    /// `gᵀ·x`.
    pub fn apply_inverse(&self, x: &[f64]) -> Coords {
        let n = self.dim();
        (0..n)
            .map(|i| (0..n).map(|j| self.matrix[(j, i)] * x[j]).sum())
            .collect()
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &Rotation) -> Rotation {
        Rotation {
            matrix: &self.matrix * &other.matrix,
        }
    }

    pub fn inverse(&self) -> Rotation {
        Rotation {
            matrix: self.matrix.transpose(),
        }
    }

    /// `-g`, which flips the determinant in odd dimensions.
    pub fn negated(&self) -> Rotation {
        Rotation {
            matrix: -&self.matrix,
        }
    }

    /// Frobenius distance to another rotation.
    pub fn distance(&self, other: &Rotation) -> f64 {
        (&self.matrix - &other.matrix).norm()
    }

    /// Frobenius distance to the identity.
    pub fn distance_to_identity(&self) -> f64 {
        self.distance(&Rotation::identity(self.dim()))
    }
}

/// `count` rotations by `2πk/count` and, when `with_reflections`, the same
/// angles composed with a reflection.
pub fn planar_candidates(count: usize, with_reflections: bool) -> Vec<Rotation> {
    let mut out: Vec<Rotation> = (0..count)
        .map(|k| planar_exact(k, count, false))
        .collect();
    if with_reflections {
        out.extend((0..count).map(|k| planar_exact(k, count, true)));
    }
    out
}

// Angles that are multiples of a quarter turn get exact entries.
fn planar_exact(k: usize, count: usize, reflect: bool) -> Rotation {
    let theta = 2.0 * PI * k as f64 / count as f64;
    let (s, c) = if (4 * k) % count == 0 {
        match (4 * k / count) % 4 {
            0 => (0.0, 1.0),
            1 => (1.0, 0.0),
            2 => (0.0, -1.0),
            _ => (-1.0, 0.0),
        }
    } else {
        theta.sin_cos()
    };
    let m = if reflect {
        [c, s, s, -c]
    } else {
        [c, -s, s, c]
    };
    Rotation {
        matrix: DMatrix::from_row_slice(2, 2, &m),
    }
}

/// Deterministic near-uniform grid on SO(3): Hopf coordinates with a
/// Fibonacci lattice of `base` points on S² and `fibres` equally spaced fibre
/// angles. `so3_grid(72, 8)` has 576 elements.
pub fn so3_grid(base: usize, fibres: usize) -> Vec<Rotation> {
    let golden = PI * (3.0 - 5f64.sqrt());
    let mut out = Vec::with_capacity(base * fibres);
    for i in 0..base {
        let z = 1.0 - (2.0 * i as f64 + 1.0) / base as f64;
        let theta = z.acos();
        let phi = (golden * i as f64).rem_euclid(2.0 * PI);
        for k in 0..fibres {
            let psi = 2.0 * PI * (k as f64 + 0.5) / fibres as f64;
            let (ct, st) = ((theta / 2.0).cos(), (theta / 2.0).sin());
            let q = [
                ct * (psi / 2.0).cos(),
                ct * (psi / 2.0).sin(),
                st * (phi + psi / 2.0).cos(),
                st * (phi + psi / 2.0).sin(),
            ];
            out.push(Rotation::from_quaternion(q));
        }
    }
    out
}

/// Closes a set of generators under composition (finite groups only).
pub fn generate_group(generators: &[Rotation], limit: usize) -> Vec<Rotation> {
    let Some(first) = generators.first() else {
        return Vec::new();
    };
    let mut group = vec![Rotation::identity(first.dim())];
    let mut frontier = group.clone();
    while !frontier.is_empty() && group.len() < limit {
        let mut next = Vec::new();
        for g in &frontier {
            for s in generators {
                let h = s.compose(g);
                if !group.iter().any(|k| k.distance(&h) < 1e-9) {
                    group.push(h.clone());
                    next.push(h);
                }
            }
        }
        frontier = next;
    }
    group
}

/// Rotation groups of the cube (order 24) and icosahedron (order 60).
pub fn platonic_rotation_groups() -> Vec<Rotation> {
    let quarter_z = Rotation::from_axis_angle(&[0.0, 0.0, 1.0], PI / 2.0);
    let quarter_x = Rotation::from_axis_angle(&[1.0, 0.0, 0.0], PI / 2.0);
    let mut out = generate_group(&[quarter_z, quarter_x], 100);
    // five-fold axis through (0, 1, φ) and three-fold axis through (1, 1, 1)
    let phi = (1.0 + 5f64.sqrt()) / 2.0;
    let five = Rotation::from_axis_angle(&[0.0, 1.0, phi], 2.0 * PI / 5.0);
    let three = Rotation::from_axis_angle(&[1.0, 1.0, 1.0], 2.0 * PI / 3.0);
    for g in generate_group(&[five, three], 200) {
        if !out.iter().any(|k| k.distance(&g) < 1e-9) {
            out.push(g);
        }
    }
    out
}
