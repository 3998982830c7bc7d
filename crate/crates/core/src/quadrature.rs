//! Quadrature grids on the unit sphere S^{n-1}.
//!
//! * n = 2: `m` equally spaced angles with the trapezoid rule.
//! * n = 3: Gauss-Legendre nodes in the height coordinate times uniform
//!   longitudes.
//! * n > 3: Monte-Carlo grids (uniform random directions, equal weights).
//!   These are much less accurate and exist so that the metric layer stays
//!   dimension generic.
//!
//! Grids are immutable once built and double as the interpolation stencil of
//! sampled support functions (see [`SphericalGrid::interpolate`]).

use std::f64::consts::PI;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::linalg::{self, Coords};

/// Default grid resolutions.
pub const DEFAULT_GRID_2D: usize = 2048;
pub const DEFAULT_GRID_3D: (usize, usize) = (64, 128);

const UNIT_TOL: f64 = 1e-12;

/// A direction on the unit sphere.
#[derive(Debug, Clone, PartialEq)]
pub struct UnitVector(Coords);

impl UnitVector {
    /// Wraps `coords`, which must already have unit length.
    pub fn new(coords: &[f64]) -> Result<Self> {
        let n = linalg::norm(coords);
        if (n - 1.0).abs() > UNIT_TOL {
            return Err(Error::InvalidArgument(format!(
                "expected a unit vector, got norm {n}"
            )));
        }
        Ok(UnitVector(coords.iter().copied().collect()))
    }

    /// Normalizes a nonzero vector.
    pub fn normalize(coords: &[f64]) -> Result<Self> {
        let n = linalg::norm(coords);
        if !(n > 0.0) || !n.is_finite() {
            return Err(Error::InvalidArgument("cannot normalize a zero vector".into()));
        }
        Ok(UnitVector(coords.iter().map(|x| x / n).collect()))
    }

    pub fn from_angle(theta: f64) -> Self {
        UnitVector([theta.cos(), theta.sin()].into_iter().collect())
    }

    /// Standard basis vector `e_i` in dimension `dim`.
    pub fn axis(dim: usize, i: usize) -> Self {
        let mut c: Coords = std::iter::repeat_n(0.0, dim).collect();
        c[i] = 1.0;
        UnitVector(c)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[f64] {
        &self.0
    }
}

impl std::ops::Deref for UnitVector {
    type Target = [f64];
    fn deref(&self) -> &[f64] {
        &self.0
    }
}

impl AsRef<[f64]> for UnitVector {
    fn as_ref(&self) -> &[f64] {
        &self.0
    }
}

/// Parameters that determine a grid; grids are rebuilt from these when a
/// sampled body is deserialized.
#[derive(Debug, Clone, PartialEq)]
pub enum GridSpec {
    Circle { m: usize },
    LatLon { n_lat: usize, n_lon: usize },
    MonteCarlo { dim: usize, count: usize, seed: u64 },
}

impl GridSpec {
    pub fn build(&self) -> Result<SphericalGrid> {
        match *self {
            GridSpec::Circle { m } => make_grid_2d(m),
            GridSpec::LatLon { n_lat, n_lon } => make_grid_3d(n_lat, n_lon),
            GridSpec::MonteCarlo { dim, count, seed } => make_grid_mc(dim, count, seed),
        }
    }
}

#[derive(Debug, Clone)]
pub struct SphericalGrid {
    dim: usize,
    nodes: Vec<UnitVector>,
    weights: Vec<f64>,
    spec: GridSpec,
    // ascending Gauss-Legendre heights for LatLon grids
    heights: Vec<f64>,
}

impl PartialEq for SphericalGrid {
    fn eq(&self, other: &Self) -> bool {
        self.spec == other.spec
    }
}

impl SphericalGrid {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[UnitVector] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn spec(&self) -> &GridSpec {
        &self.spec
    }

    /// Typical angular spacing between neighbouring nodes, in radians.
    pub fn spacing(&self) -> f64 {
        match self.spec {
            GridSpec::Circle { m } => 2.0 * PI / m as f64,
            GridSpec::LatLon { n_lat, n_lon } => (PI / n_lat as f64).max(2.0 * PI / n_lon as f64),
            GridSpec::MonteCarlo { dim, count, .. } => {
                (sphere_area(dim) / count as f64).powf(1.0 / (dim as f64 - 1.0))
            }
        }
    }

    /// Positively homogeneous interpolant of node values `values` at an
    /// arbitrary nonzero `x`.
    ///
    /// n = 2: linear in the cone spanned by the two adjacent nodes.
    /// n = 3: linear in the cone of a triangle of the lat-long cell (fan
    /// triangulation in the polar caps). Both introduce O(Δθ²) error for
    /// smooth support functions. Monte-Carlo grids use the nearest node.
    pub fn interpolate(&self, values: &[f64], x: &[f64]) -> f64 {
        debug_assert_eq!(values.len(), self.nodes.len());
        match self.spec {
            GridSpec::Circle { m } => {
                let step = 2.0 * PI / m as f64;
                let mut theta = x[1].atan2(x[0]);
                if theta < 0.0 {
                    theta += 2.0 * PI;
                }
                let k = ((theta / step).floor() as usize).min(m - 1);
                let k1 = (k + 1) % m;
                let (p, q) = (&self.nodes[k], &self.nodes[k1]);
                let det = p[0] * q[1] - p[1] * q[0];
                let a = (x[0] * q[1] - x[1] * q[0]) / det;
                let b = (p[0] * x[1] - p[1] * x[0]) / det;
                a * values[k] + b * values[k1]
            }
            GridSpec::LatLon { n_lat, n_lon } => {
                let r = linalg::norm(x);
                if r == 0.0 {
                    return 0.0;
                }
                let z = x[2] / r;
                let mut phi = x[1].atan2(x[0]);
                if phi < 0.0 {
                    phi += 2.0 * PI;
                }
                let idx = |i: usize, j: usize| i * n_lon + j;
                let h = &self.heights;
                if z < h[0] || z >= h[n_lat - 1] {
                    let ring = if z < h[0] { 0 } else { n_lat - 1 };
                    let tris = (1..n_lon - 1).map(|j| [idx(ring, 0), idx(ring, j), idx(ring, j + 1)]);
                    return self.best_triangle(values, x, tris);
                }
                let i = h.partition_point(|&hz| hz <= z) - 1;
                let step = 2.0 * PI / n_lon as f64;
                let j = ((phi / step).floor() as usize).min(n_lon - 1);
                let j1 = (j + 1) % n_lon;
                let tris = [
                    [idx(i, j), idx(i, j1), idx(i + 1, j1)],
                    [idx(i, j), idx(i + 1, j1), idx(i + 1, j)],
                ];
                self.best_triangle(values, x, tris.into_iter())
            }
            GridSpec::MonteCarlo { .. } => {
                let (k, _) = self
                    .nodes
                    .iter()
                    .enumerate()
                    .map(|(k, u)| (k, linalg::dot(u, x)))
                    .fold((0, f64::NEG_INFINITY), |b, c| if c.1 > b.1 { c } else { b });
                values[k] * linalg::norm(x)
            }
        }
    }

    fn best_triangle(&self, values: &[f64], x: &[f64], tris: impl Iterator<Item = [usize; 3]>) -> f64 {
        let mut best = (f64::NEG_INFINITY, 0.0);
        for t in tris {
            let (p, q, r) = (&self.nodes[t[0]], &self.nodes[t[1]], &self.nodes[t[2]]);
            let det = det3(p, q, r);
            if det.abs() < 1e-300 {
                continue;
            }
            let a = det3(x, q, r) / det;
            let b = det3(p, x, r) / det;
            let c = det3(p, q, x) / det;
            let worst = a.min(b).min(c);
            if worst > best.0 {
                best = (worst, a * values[t[0]] + b * values[t[1]] + c * values[t[2]]);
                if worst >= -1e-14 {
                    break;
                }
            }
        }
        best.1
    }
}

fn det3(p: &[f64], q: &[f64], r: &[f64]) -> f64 {
    linalg::dot(p, &linalg::cross(q, r))
}

/// Volume of the unit ball in ℝⁿ.
pub fn ball_volume(n: usize) -> f64 {
    match n {
        0 => 1.0,
        1 => 2.0,
        _ => 2.0 * PI / n as f64 * ball_volume(n - 2),
    }
}

/// Surface area of S^{n-1}.
pub fn sphere_area(n: usize) -> f64 {
    n as f64 * ball_volume(n)
}

/// Trapezoid grid of `m` equally spaced directions on the circle.
pub fn make_grid_2d(m: usize) -> Result<SphericalGrid> {
    if m < 4 {
        return Err(Error::InvalidArgument(format!("2d grid needs m >= 4, got {m}")));
    }
    let w = 2.0 * PI / m as f64;
    let nodes = (0..m)
        .map(|k| {
            // exact values on the axes keep the symmetric grids symmetric
            let theta = 2.0 * PI * k as f64 / m as f64;
            let (s, c) = match (4 * k).checked_rem(m) {
                Some(0) => quarter_turn(4 * k / m),
                _ => theta.sin_cos(),
            };
            UnitVector([c, s].into_iter().collect())
        })
        .collect();
    Ok(SphericalGrid {
        dim: 2,
        nodes,
        weights: vec![w; m],
        spec: GridSpec::Circle { m },
        heights: Vec::new(),
    })
}

fn quarter_turn(q: usize) -> (f64, f64) {
    match q % 4 {
        0 => (0.0, 1.0),
        1 => (1.0, 0.0),
        2 => (0.0, -1.0),
        _ => (-1.0, 0.0),
    }
}

/// Gauss-Legendre heights × uniform longitudes on S².
pub fn make_grid_3d(n_lat: usize, n_lon: usize) -> Result<SphericalGrid> {
    if n_lat < 2 || n_lon < 4 {
        return Err(Error::InvalidArgument(format!(
            "3d grid needs n_lat >= 2 and n_lon >= 4, got {n_lat}x{n_lon}"
        )));
    }
    let (z, wz) = gauss_legendre(n_lat);
    let wphi = 2.0 * PI / n_lon as f64;
    let mut nodes = Vec::with_capacity(n_lat * n_lon);
    let mut weights = Vec::with_capacity(n_lat * n_lon);
    for (zi, wi) in z.iter().zip(&wz) {
        let rho = (1.0 - zi * zi).sqrt();
        for j in 0..n_lon {
            let (s, c) = match (4 * j).checked_rem(n_lon) {
                Some(0) => quarter_turn(4 * j / n_lon),
                _ => (2.0 * PI * j as f64 / n_lon as f64).sin_cos(),
            };
            let v = [rho * c, rho * s, *zi];
            // renormalize to kill the last ulp of drift
            nodes.push(UnitVector(linalg::normalized(&v)));
            weights.push(wi * wphi);
        }
    }
    Ok(SphericalGrid {
        dim: 3,
        nodes,
        weights,
        spec: GridSpec::LatLon { n_lat, n_lon },
        heights: z,
    })
}

/// Uniform random directions with equal weights `area / count`.
pub fn make_grid_mc(dim: usize, count: usize, seed: u64) -> Result<SphericalGrid> {
    if dim < 2 || count < dim + 1 {
        return Err(Error::InvalidArgument(format!(
            "monte-carlo grid needs dim >= 2 and count > dim, got dim={dim}, count={count}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let nodes = (0..count)
        .map(|_| loop {
            let v: Coords = (0..dim).map(|_| StandardNormal.sample(&mut rng)).collect();
            if let Ok(u) = UnitVector::normalize(&v) {
                break u;
            }
        })
        .collect();
    Ok(SphericalGrid {
        dim,
        nodes,
        weights: vec![sphere_area(dim) / count as f64; count],
        spec: GridSpec::MonteCarlo { dim, count, seed },
        heights: Vec::new(),
    })
}

/// Default grid for a dimension: the documented resolutions for n = 2, 3
/// and a 20000-point Monte-Carlo grid above.
pub fn default_grid(dim: usize) -> Result<SphericalGrid> {
    match dim {
        2 => make_grid_2d(DEFAULT_GRID_2D),
        3 => make_grid_3d(DEFAULT_GRID_3D.0, DEFAULT_GRID_3D.1),
        d => make_grid_mc(d, 20_000, 0),
    }
}

/// Σ weights_k · f(nodes_k).
pub fn integrate(grid: &SphericalGrid, f: impl Fn(&UnitVector) -> f64) -> f64 {
    grid.nodes.iter().zip(&grid.weights).map(|(u, w)| w * f(u)).sum()
}

/// Gauss-Legendre nodes (ascending) and weights on [-1, 1].
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut z = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            // three-term recurrence for P_n and its derivative
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            if n == 1 {
                p0 = 1.0;
                p1 = z;
            }
            dp = n as f64 * (z * p1 - p0) / (z * z - 1.0);
            let dz = p1 / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    if n % 2 == 1 {
        x[n / 2] = 0.0;
    }
    (x, w)
}

/// Gauss-Legendre rule mapped to [a, b].
pub fn gauss_legendre_interval(n: usize, a: f64, b: f64) -> (Vec<f64>, Vec<f64>) {
    let (x, w) = gauss_legendre(n);
    let (mid, half) = ((a + b) / 2.0, (b - a) / 2.0);
    (
        x.iter().map(|t| mid + half * t).collect(),
        w.iter().map(|wi| wi * half).collect(),
    )
}
