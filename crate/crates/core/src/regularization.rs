//! Schneider-style regularization: convolve the support function with a
//! radial bump supported in the shell `t ≤ ‖z‖ ≤ 2t`, then add `t·Bⁿ`.
//!
//! The convolution is an integral over the shell radius of the mean of `h`
//! over spheres around the evaluation direction.
//!
//! For polytope leaves the sphere mean is computed by slicing into circles
//! around the evaluation direction. The mean over one circle of a maximum of
//! sinusoids is exact (upper envelope walk). In 3D the circle mean is a
//! piecewise analytic function of the latitude with square-root type
//! breakpoints where a circle touches a kink plane of `h` or crosses a kink
//! line; the latitude integral is split at those breakpoints and each piece
//! is integrated by Gauss-Legendre after a substitution that absorbs the
//! endpoint singularities. Nothing depends on a tangent frame, so the
//! operator commutes with O(n) up to rounding. Latitude slicing with fixed
//! nodes would not do: single circles are not convex in the direction, and
//! the sum shows negative curvature at the scale of the node spacing.
//!
//! For polytopes the sphere mean is in turn piecewise analytic in the radius,
//! with breakpoints at the distances from the evaluation direction to the
//! kinks of `h`; the radial integral is split there as well. A fixed radial
//! rule would leave the result with curvature jumps at every shell, which a
//! finite-difference Hessian reads as negative curvature of order 1/(Nt).
//!
//! Smooth leaves use a fixed radial rule, fixed latitudes and a trapezoid
//! rule on each circle.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use smallvec::SmallVec;

use crate::error::{Error, Result};
use crate::geometry::body::{sample_support, BodyRep};
use crate::geometry::hull::PolytopeGeometry;
use crate::geometry::steiner::recenter;
use crate::linalg::{self, Coords};
use crate::quadrature::{gauss_legendre_interval, SphericalGrid};

/// Trapezoid nodes on the circle for leaves without closed-form averages.
const SMOOTH_CIRCLE_NODES: usize = 64;

/// Lower bound on Gauss-Legendre nodes per latitude piece.
const PIECE_NODES_MIN: usize = 4;

/// Lower bound on Gauss-Legendre nodes per radial piece.
const RADIAL_PIECE_NODES_MIN: usize = 8;

/// The bump ψ: smooth, nonnegative, supported in [1, 2], unit integral.
#[derive(Clone)]
pub struct MollifierSpec {
    shape: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    normalization: f64,
    line_integral: f64,
}

impl fmt::Debug for MollifierSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("MollifierSpec")
            .field("normalization", &self.normalization)
            .field("line_integral", &self.line_integral)
            .finish()
    }
}

impl MollifierSpec {
    /// Normalizes an arbitrary bump shape on (1, 2). Fails if the shape is
    /// negative somewhere, nonzero outside (1, 2) or has zero mass.
    pub fn new(shape: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Result<Self> {
        for k in 0..=200 {
            let s = -1.0 + 4.0 * k as f64 / 200.0;
            let v = shape(s);
            if !(v >= 0.0) || !v.is_finite() {
                return Err(Error::InvalidArgument(format!("bump is negative or not finite at {s}")));
            }
            if !(s > 1.0 && s < 2.0) && v != 0.0 {
                return Err(Error::InvalidArgument(format!("bump is nonzero outside (1, 2) at {s}")));
            }
        }
        let (x, w) = gauss_legendre_interval(256, 1.0, 2.0);
        let mass: f64 = x.iter().zip(&w).map(|(s, wi)| wi * shape(*s)).sum();
        if !(mass > 0.0) {
            return Err(Error::InvalidArgument("bump has zero mass".into()));
        }
        let normalization = 1.0 / mass;
        // independent check of the normalization with composite Simpson
        let panels = 20_000;
        let h = 1.0 / panels as f64;
        let simpson: f64 = (0..=panels)
            .map(|i| {
                let c = if i == 0 || i == panels {
                    1.0
                } else if i % 2 == 1 {
                    4.0
                } else {
                    2.0
                };
                c * normalization * shape(1.0 + i as f64 * h)
            })
            .sum::<f64>()
            * h
            / 3.0;
        if (simpson - 1.0).abs() > 1e-8 {
            return Err(Error::InvalidArgument(format!(
                "bump normalization does not verify: ∫ψ = {simpson}"
            )));
        }
        Ok(MollifierSpec {
            shape: Arc::new(shape),
            normalization,
            line_integral: simpson,
        })
    }

    /// ψ(s).
    pub fn eval(&self, s: f64) -> f64 {
        self.normalization * (self.shape)(s)
    }

    pub fn normalization(&self) -> f64 {
        self.normalization
    }

    /// ∫ψ as verified at construction.
    pub fn line_integral(&self) -> f64 {
        self.line_integral
    }

    pub fn support(&self) -> (f64, f64) {
        (1.0, 2.0)
    }
}

fn standard_bump(s: f64) -> f64 {
    if s > 1.0 && s < 2.0 {
        (-1.0 / ((s - 1.0) * (2.0 - s))).exp()
    } else {
        0.0
    }
}

/// ψ(s) = C·exp(−1/((s−1)(2−s))) on (1, 2).
pub fn default_mollifier() -> MollifierSpec {
    MollifierSpec::new(standard_bump).expect("the standard bump is a valid mollifier")
}

#[derive(Debug, Clone)]
pub struct RegularizationParams {
    pub t: f64,
    pub mollifier: MollifierSpec,
    pub radial_nodes: usize,
    pub angular_nodes: usize,
}

impl RegularizationParams {
    pub const DEFAULT_RADIAL_NODES: usize = 64;
    pub const DEFAULT_ANGULAR_NODES: usize = 8;

    /// Default resolution with the standard bump. `t = 0` is accepted and
    /// means "no regularization".
    pub fn new(t: f64) -> Result<Self> {
        Self::with_resolution(t, Self::DEFAULT_RADIAL_NODES, Self::DEFAULT_ANGULAR_NODES)
    }

    pub fn with_resolution(t: f64, radial_nodes: usize, angular_nodes: usize) -> Result<Self> {
        if !(0.0..=1.0).contains(&t) {
            return Err(Error::InvalidArgument(format!("t must lie in [0, 1], got {t}")));
        }
        if radial_nodes < 2 || angular_nodes < 2 {
            return Err(Error::InvalidArgument(format!(
                "degenerate convolution quadrature {radial_nodes}x{angular_nodes}"
            )));
        }
        Ok(RegularizationParams {
            t,
            mollifier: default_mollifier(),
            radial_nodes,
            angular_nodes,
        })
    }
}

/// One circle of the fixed discretization used for smooth leaves: points
/// `y(φ) = a·u + b·(cos φ e + sin φ f)` in 3D, `(1 + ρ cos φ) u + ρ sin φ u⊥`
/// in 2D.
#[derive(Debug, Clone, Copy, PartialEq)]
struct Circle {
    rho: f64,
    axial: f64,
    transverse: f64,
    weight: f64,
}

/// Discretized normalized radial kernel `ψ(‖z‖/t) / (Zₙ tⁿ)`.
#[derive(Debug, Clone)]
pub struct MollifierKernel {
    dim: usize,
    t: f64,
    radial_nodes: usize,
    angular_nodes: usize,
    circles: Vec<Circle>,
    bump: MollifierSpec,
    /// Gauss-Legendre rules on [0, 1]; a radial piece of length ℓ uses
    /// max(ℓ·radial_nodes, PIECE_NODES_MIN) nodes.
    radial_rules: Vec<(Vec<f64>, Vec<f64>)>,
    /// ∫ ψ(s) s^(n−1) ds over [1, 2].
    radial_mass: f64,
    /// Gauss-Legendre rule on [0, 1] used on every latitude piece.
    latitude_rule: (Vec<f64>, Vec<f64>),
    ball_mean: f64,
}

// Kinks of a polytope support function near an evaluation direction, in the
// frame (u, e, f): planes ⟨v_i − v_j, y⟩ = 0 and, in 3D, lines where three
// linear pieces meet.
struct Kinks {
    planes: Vec<(usize, usize, [f64; 3])>,
    lines: Vec<(usize, usize, usize, [f64; 3])>,
}

fn smoothstep(lo: f64, width: f64, s: f64) -> (f64, f64) {
    // dx/ds vanishes at both ends, which turns square-root endpoint
    // behaviour into something Gauss-Legendre integrates spectrally
    (lo + width * s * s * (3.0 - 2.0 * s), width * 6.0 * s * (1.0 - s))
}

fn sorted_breaks(mut breaks: Vec<f64>) -> Vec<f64> {
    breaks.sort_by(f64::total_cmp);
    breaks.dedup_by(|x, y| (*x - *y).abs() < 1e-13);
    breaks
}

// the bump enters through the circle weights
impl PartialEq for MollifierKernel {
    fn eq(&self, other: &Self) -> bool {
        self.dim == other.dim
            && self.t == other.t
            && self.radial_nodes == other.radial_nodes
            && self.angular_nodes == other.angular_nodes
            && self.circles == other.circles
            && self.radial_mass == other.radial_mass
    }
}

impl MollifierKernel {
    pub fn new(dim: usize, params: &RegularizationParams) -> Result<Self> {
        if !(2..=3).contains(&dim) {
            return Err(Error::Representation(format!(
                "mollification is implemented for n = 2, 3 (got {dim})"
            )));
        }
        if !(params.t > 0.0) {
            return Err(Error::InvalidArgument("mollification needs t > 0".into()));
        }
        let t = params.t;
        let (s, ws) = gauss_legendre_interval(params.radial_nodes, 1.0, 2.0);
        let radial_rules = (0..=params.radial_nodes.max(RADIAL_PIECE_NODES_MIN))
            .map(|n| gauss_legendre_interval(n.max(1), 0.0, 1.0))
            .collect();
        let (sm, wm) = gauss_legendre_interval(256, 1.0, 2.0);
        let radial_mass: f64 = sm
            .iter()
            .zip(&wm)
            .map(|(sj, wj)| wj * params.mollifier.eval(*sj) * sj.powi(dim as i32 - 1))
            .sum();
        let mut circles = Vec::new();
        match dim {
            2 => {
                for (sj, wj) in s.iter().zip(&ws) {
                    circles.push(Circle {
                        rho: t * sj,
                        axial: 1.0,
                        transverse: t * sj,
                        weight: wj * params.mollifier.eval(*sj) * sj,
                    });
                }
            }
            _ => {
                let (c, wc) = gauss_legendre_interval(params.angular_nodes, -1.0, 1.0);
                for (sj, wj) in s.iter().zip(&ws) {
                    for (ck, wk) in c.iter().zip(&wc) {
                        let rho = t * sj;
                        circles.push(Circle {
                            rho,
                            axial: 1.0 + rho * ck,
                            transverse: rho * (1.0 - ck * ck).sqrt(),
                            weight: wj * params.mollifier.eval(*sj) * sj * sj * wk,
                        });
                    }
                }
            }
        }
        circles.retain(|c| c.weight > 0.0);
        let mass: f64 = circles.iter().map(|c| c.weight).sum();
        if !(mass > 0.0) {
            return Err(Error::InvalidArgument("kernel quadrature has no mass".into()));
        }
        for c in &mut circles {
            c.weight /= mass;
        }
        let mut kernel = MollifierKernel {
            dim,
            t,
            radial_nodes: params.radial_nodes,
            angular_nodes: params.angular_nodes,
            circles,
            bump: params.mollifier.clone(),
            radial_rules,
            radial_mass,
            latitude_rule: gauss_legendre_interval(params.angular_nodes.max(PIECE_NODES_MIN), 0.0, 1.0),
            ball_mean: 0.0,
        };
        // T applied to ‖·‖ is a constant
        let up = crate::quadrature::UnitVector::axis(dim, 0);
        kernel.ball_mean = kernel.smooth_average(&|y: &[f64]| linalg::norm(y), &up, 512);
        Ok(kernel)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn radial_nodes(&self) -> usize {
        self.radial_nodes
    }

    pub fn angular_nodes(&self) -> usize {
        self.angular_nodes
    }

    /// Total mass of the fixed discretization (1 up to rounding).
    pub fn mass(&self) -> f64 {
        self.circles.iter().map(|c| c.weight).sum()
    }

    /// Mollified support value of `body` at the unit direction `u`.
    pub fn eval_unit(&self, body: &BodyRep, u: &[f64]) -> f64 {
        match body {
            BodyRep::Polytope { vertices } => self.polytope_average(vertices, u),
            BodyRep::Ball { center, radius } => linalg::dot(center, u) + radius * self.ball_mean,
            BodyRep::Sum { left, right } => self.eval_unit(left, u) + self.eval_unit(right, u),
            BodyRep::Scaled { factor, inner } => {
                if *factor == 0.0 {
                    0.0
                } else {
                    factor * self.eval_unit(inner, u)
                }
            }
            BodyRep::Rotated { rotation, inner } => self.eval_unit(inner, &rotation.apply_inverse(u)),
            BodyRep::Ellipsoid { center, .. } => {
                let shifted = body.translated(&linalg::scale(center, -1.0));
                linalg::dot(center, u)
                    + self.smooth_average(&|y: &[f64]| shifted.eval_support(y), u, SMOOTH_CIRCLE_NODES)
            }
            BodyRep::Sampled(_) | BodyRep::Mollified { .. } => {
                self.smooth_average(&|y: &[f64]| body.eval_support(y), u, SMOOTH_CIRCLE_NODES)
            }
        }
    }

    fn frame(&self, u: &[f64]) -> (Coords, Coords) {
        linalg::tangent_basis(u)
    }

    // point on a circle for angle φ
    fn circle_point(&self, c: &Circle, u: &[f64], e: &[f64], f: &[f64], phi: f64, out: &mut Coords) {
        let (s, co) = phi.sin_cos();
        out.clear();
        if self.dim == 2 {
            for i in 0..2 {
                out.push((1.0 + c.rho * co) * u[i] + c.rho * s * e[i]);
            }
        } else {
            for i in 0..3 {
                out.push(c.axial * u[i] + c.transverse * (co * e[i] + s * f[i]));
            }
        }
    }

    fn smooth_average(&self, h: &dyn Fn(&[f64]) -> f64, u: &[f64], nodes: usize) -> f64 {
        let (e, f) = self.frame(u);
        let mut y = Coords::new();
        let mut total = 0.0;
        for c in &self.circles {
            let mut acc = 0.0;
            for m in 0..nodes {
                let phi = 2.0 * PI * (m as f64 + 0.5) / nodes as f64;
                self.circle_point(c, u, &e, &f, phi, &mut y);
                acc += h(&y);
            }
            total += c.weight * acc / nodes as f64;
        }
        total
    }

    fn polytope_average(&self, vertices: &[Vec<f64>], u: &[f64]) -> f64 {
        let (e, f) = self.frame(u);
        let dim = self.dim;
        // vertices in the frame (u, e, f), padded with zeros in 2D
        let all: Vec<[f64; 3]> = vertices
            .iter()
            .map(|v| {
                [
                    linalg::dot(v, u),
                    linalg::dot(v, &e),
                    if dim == 3 { linalg::dot(v, &f) } else { 0.0 },
                ]
            })
            .collect();
        let live = prune(&all, 2.0 * self.t);
        let vs: Vec<[f64; 3]> = live.iter().map(|&i| all[i]).collect();
        let top = vs.iter().map(|v| v[0]).fold(f64::NEG_INFINITY, f64::max);
        if vs.len() == 1 {
            return top;
        }
        let scale = vs.iter().map(|v| linalg::norm(v)).fold(0.0, f64::max).max(1e-300);
        let kinks = kinks(&vs, dim, scale);

        // Sphere means are piecewise analytic in the radius, with breakpoints
        // at the distances from u to the kinks of h. Below the nearest kink
        // the sphere sees one linear piece and its mean is h(u), so only the
        // excess over h(u) is integrated, piece by piece.
        let mut dists = vec![1.0];
        for &(i, j, n) in &kinks.planes {
            let y = [1.0 - n[0] * n[0], -n[0] * n[1], -n[0] * n[2]];
            if on_envelope(&vs, y, i, scale) && on_envelope(&vs, y, j, scale) {
                dists.push(n[0].abs());
            }
        }
        for &(_, _, _, d) in &kinks.lines {
            if d[0] > 0.0 {
                dists.push((1.0 - d[0] * d[0]).max(0.0).sqrt());
            }
        }
        let nearest = dists.iter().copied().fold(f64::INFINITY, f64::min) / self.t;
        if nearest >= 2.0 {
            return top;
        }
        let mut breaks: Vec<f64> = dists.iter().map(|d| (d / self.t).clamp(1.0, 2.0)).collect();
        breaks.extend([1.0, 2.0]);
        let breaks = sorted_breaks(breaks);

        let mut total = 0.0;
        for win in breaks.windows(2) {
            if win[1] <= nearest {
                continue;
            }
            let count = ((win[1] - win[0]) * self.radial_nodes as f64).ceil() as usize;
            let (nodes, weights) = &self.radial_rules[count.clamp(RADIAL_PIECE_NODES_MIN, self.radial_rules.len() - 1)];
            for (x, w) in nodes.iter().zip(weights) {
                let (s, jac) = smoothstep(win[0], win[1] - win[0], *x);
                let psi = self.bump.eval(s);
                if psi == 0.0 {
                    continue;
                }
                let rho = self.t * s;
                let mean = if dim == 2 {
                    self.circle_mean_2d(&vs, rho)
                } else {
                    self.sphere_mean_3d(&vs, &kinks, rho, scale)
                };
                total += w * jac * psi * s.powi(dim as i32 - 1) * (mean - top);
            }
        }
        top + total / self.radial_mass
    }

    // Mean of max_i ⟨v_i, y⟩ over the circle |y − u| = ρ.
    fn circle_mean_2d(&self, vs: &[[f64; 3]], rho: f64) -> f64 {
        let a: Vec<f64> = vs.iter().map(|v| v[0]).collect();
        let b: Vec<f64> = vs.iter().map(|v| rho * v[0]).collect();
        let c: Vec<f64> = vs.iter().map(|v| rho * v[1]).collect();
        max_sinusoid_mean(&a, &b, &c)
    }

    // Mean of max_i ⟨v_i, y⟩ over the sphere |y − u| = ρ, as an integral
    // over the latitude c of exact circle means.
    fn sphere_mean_3d(&self, vs: &[[f64; 3]], kinks: &Kinks, rho: f64, scale: f64) -> f64 {
        let live = prune(vs, rho);
        if live.len() == 1 {
            return vs[live[0]][0];
        }
        let mut is_live = vec![false; vs.len()];
        for &i in &live {
            is_live[i] = true;
        }
        let latitude = |y: [f64; 3]| ((y[0] - 1.0) / rho).clamp(-1.0, 1.0);
        let mut breaks = vec![-1.0, 1.0];
        for &(i, j, n) in &kinks.planes {
            // circles of latitude tangent to the plane
            if !(is_live[i] && is_live[j]) || n[0].abs() >= rho {
                continue;
            }
            let (nu, nt) = (n[0], n[1].hypot(n[2]));
            let phi = n[2].atan2(n[1]);
            let root = nt * (rho * rho - nu * nu).sqrt();
            for c in [(-nu * nu + root) / rho, (-nu * nu - root) / rho] {
                let c = c.clamp(-1.0, 1.0);
                let (axial, radius) = (1.0 + rho * c, rho * (1.0 - c * c).max(0.0).sqrt());
                let side = if axial * nu > 0.0 { PI } else { 0.0 };
                let y = [axial, radius * (phi + side).cos(), radius * (phi + side).sin()];
                if on_envelope(vs, y, i, scale) && on_envelope(vs, y, j, scale) {
                    breaks.push(c);
                }
            }
        }
        for &(i, j, k, d) in &kinks.lines {
            // circles through the points where the ray pierces the sphere
            if !(is_live[i] && is_live[j] && is_live[k]) {
                continue;
            }
            let disc = d[0] * d[0] - 1.0 + rho * rho;
            if disc < 0.0 {
                continue;
            }
            for s in [d[0] + disc.sqrt(), d[0] - disc.sqrt()] {
                let y = [s * d[0], s * d[1], s * d[2]];
                if on_envelope(vs, y, i, scale) && on_envelope(vs, y, j, scale) && on_envelope(vs, y, k, scale) {
                    breaks.push(latitude(y));
                }
            }
        }
        // in the cosine c the mean over a circle inside one linear piece is
        // affine, so pieces without kinks are integrated exactly and the
        // result agrees with the single-vertex shortcut above
        let breaks = sorted_breaks(breaks);

        let (nodes, weights) = &self.latitude_rule;
        let m = live.len();
        let (mut a, mut b, mut c) = (vec![0.0; m], vec![0.0; m], vec![0.0; m]);
        let mut total = 0.0;
        for win in breaks.windows(2) {
            for (s, w) in nodes.iter().zip(weights) {
                let (lat, jac) = smoothstep(win[0], win[1] - win[0], *s);
                let (axial, radius) = (1.0 + rho * lat, rho * (1.0 - lat * lat).max(0.0).sqrt());
                for (slot, &i) in live.iter().enumerate() {
                    a[slot] = axial * vs[i][0];
                    b[slot] = radius * vs[i][1];
                    c[slot] = radius * vs[i][2];
                }
                total += w * jac * max_sinusoid_mean(&a, &b, &c);
            }
        }
        0.5 * total
    }
}

// Vertices that can attain the maximum somewhere on the ball |y − u| ≤ ρ.
fn prune(vs: &[[f64; 3]], rho: f64) -> Vec<usize> {
    let norms: Vec<f64> = vs.iter().map(|v| linalg::norm(v)).collect();
    let floor = (0..vs.len()).map(|i| vs[i][0] - rho * norms[i]).fold(f64::NEG_INFINITY, f64::max);
    (0..vs.len()).filter(|&i| vs[i][0] + rho * norms[i] >= floor).collect()
}

fn on_envelope(vs: &[[f64; 3]], y: [f64; 3], i: usize, scale: f64) -> bool {
    let val = |v: &[f64; 3]| v[0] * y[0] + v[1] * y[1] + v[2] * y[2];
    let hi = vs.iter().map(val).fold(f64::NEG_INFINITY, f64::max);
    val(&vs[i]) >= hi - 1e-9 * scale * linalg::norm(&y)
}

/// Live sets larger than this take their fan from a convex hull instead of
/// testing every pair and triple.
const FAN_FROM_HULL: usize = 10;

fn kinks(vs: &[[f64; 3]], dim: usize, scale: f64) -> Kinks {
    if vs.len() > FAN_FROM_HULL {
        if let Some(k) = kinks_from_hull(vs, dim) {
            return k;
        }
    }
    let mut planes = Vec::new();
    let mut lines = Vec::new();
    for i in 0..vs.len() {
        for j in i + 1..vs.len() {
            let n = linalg::sub(&vs[i], &vs[j]);
            let len = linalg::norm(&n);
            if len > 1e-12 * scale {
                planes.push((i, j, [n[0] / len, n[1] / len, n[2] / len]));
            }
            if dim == 3 {
                for k in j + 1..vs.len() {
                    let d = linalg::cross(&linalg::sub(&vs[j], &vs[i]), &linalg::sub(&vs[k], &vs[i]));
                    let len = linalg::norm(&d);
                    if len <= 1e-12 * scale * scale {
                        continue;
                    }
                    let d = [d[0] / len, d[1] / len, d[2] / len];
                    // keep rays of the normal fan only
                    for sign in [1.0, -1.0] {
                        let y = [sign * d[0], sign * d[1], sign * d[2]];
                        if [i, j, k].iter().all(|&m| on_envelope(vs, y, m, scale)) {
                            lines.push((i, j, k, y));
                        }
                    }
                }
            }
        }
    }
    Kinks { planes, lines }
}

// Kink planes are the hull edges, kink rays the facet normals.
fn kinks_from_hull(vs: &[[f64; 3]], dim: usize) -> Option<Kinks> {
    let pts: Vec<Coords> = vs.iter().map(|v| Coords::from_slice(&v[..dim])).collect();
    let geo = PolytopeGeometry::new(&pts).ok()?;
    if !geo.is_full_dimensional() {
        return None;
    }
    let index: HashMap<Vec<u64>, usize> =
        pts.iter().enumerate().map(|(i, p)| (p.iter().map(|x| x.to_bits()).collect(), i)).collect();
    let back: Vec<usize> = geo
        .vertices
        .iter()
        .map(|v| index.get(&v.iter().map(|x| x.to_bits()).collect::<Vec<_>>()).copied())
        .collect::<Option<_>>()?;
    let planes = geo
        .edges()
        .into_iter()
        .map(|(a, b)| {
            let (i, j) = (back[a].min(back[b]), back[a].max(back[b]));
            let n = linalg::normalized(&linalg::sub(&vs[i], &vs[j]));
            (i, j, [n[0], n[1], n[2]])
        })
        .collect();
    let lines = if dim == 3 {
        geo.facets
            .iter()
            .map(|f| {
                let n = &f.normal;
                (back[f.vertices[0]], back[f.vertices[1]], back[f.vertices[2]], [n[0], n[1], n[2]])
            })
            .collect()
    } else {
        Vec::new()
    };
    Some(Kinks { planes, lines })
}

// Monotone stand-in for the angle of (x, y) in [0, 4), linear near 0.
fn diamond_angle(x: f64, y: f64) -> f64 {
    if y >= 0.0 {
        if x >= 0.0 {
            y / (x + y)
        } else {
            1.0 - x / (y - x)
        }
    } else if x < 0.0 {
        2.0 - y / (-x - y)
    } else {
        3.0 + x / (x - y)
    }
}

/// Mean over φ ∈ [0, 2π) of `max_i (a_i + b_i cos φ + c_i sin φ)`, computed
/// exactly by walking the upper envelope.
pub fn max_sinusoid_mean(a: &[f64], b: &[f64], c: &[f64]) -> f64 {
    let n = a.len();
    let amp: SmallVec<[f64; 32]> = (0..n).map(|i| (b[i] * b[i] + c[i] * c[i]).sqrt()).collect();
    let floor = (0..n).map(|i| a[i] - amp[i]).fold(f64::NEG_INFINITY, f64::max);
    let live: SmallVec<[usize; 32]> = (0..n).filter(|&i| a[i] + amp[i] >= floor).collect();
    if live.len() == 1 {
        return a[live[0]];
    }
    let scale = live.iter().map(|&i| a[i].abs() + amp[i]).fold(0.0, f64::max).max(1e-300);
    let tie = 1e-14 * scale;
    // value and slope at the point (cos φ, sin φ)
    let value = |i: usize, (co, si): (f64, f64)| a[i] + b[i] * co + c[i] * si;
    let slope = |i: usize, (co, si): (f64, f64)| -b[i] * si + c[i] * co;

    // the function on top just after φ = 0
    let origin = (1.0, 0.0);
    let mut cur = live[0];
    for &i in &live[1..] {
        let (vi, vc) = (value(i, origin), value(cur, origin));
        if vi > vc + tie || (vi >= vc - tie && slope(i, origin) > slope(cur, origin)) {
            cur = i;
        }
    }
    let two_pi = 2.0 * PI;
    let mut covered = 0.0;
    let mut here = origin;
    let mut total = 0.0;
    let piece = |i: usize, lo: (f64, f64), width: f64, hi: (f64, f64)| {
        a[i] * width + b[i] * (hi.1 - lo.1) - c[i] * (hi.0 - lo.0)
    };
    for _ in 0..(8 * live.len() + 16) {
        // next point where another function overtakes `cur`, as a pseudo-angle
        // ahead of `here`
        let mut next: Option<(f64, usize, (f64, f64))> = None;
        for &j in &live {
            if j == cur {
                continue;
            }
            let (da, db, dc) = (a[j] - a[cur], b[j] - b[cur], c[j] - c[cur]);
            let dr = (db * db + dc * dc).sqrt();
            if dr <= tie {
                continue;
            }
            let ratio = -da / dr;
            if ratio >= 1.0 || ratio <= -1.0 {
                continue;
            }
            // rotate (db, dc)/dr by −acos(ratio)
            let (wx, wy) = (db / dr, dc / dr);
            let sa = (1.0 - ratio * ratio).sqrt();
            let p = (wx * ratio + wy * sa, wy * ratio - wx * sa);
            let rel = (p.0 * here.0 + p.1 * here.1, here.0 * p.1 - here.1 * p.0);
            let mut d = diamond_angle(rel.0, rel.1);
            if d > 4.0 - 1e-12 {
                d = 0.0;
            }
            if d <= 1e-12 && slope(j, here) <= slope(cur, here) {
                // j is leaving, not entering, at the current point
                continue;
            }
            let better = match next {
                None => true,
                Some((best, k, q)) => d < best - 1e-12 || (d <= best + 1e-12 && slope(j, q) > slope(k, q)),
            };
            if better {
                next = Some((d, j, p));
            }
        }
        let Some((_, j, p)) = next else { break };
        let rel = (p.0 * here.0 + p.1 * here.1, here.0 * p.1 - here.1 * p.0);
        let width = rel.1.atan2(rel.0).rem_euclid(two_pi);
        let width = if width > two_pi - 1e-12 { 0.0 } else { width };
        if covered + width >= two_pi {
            break;
        }
        total += piece(cur, here, width, p);
        covered += width;
        here = p;
        cur = j;
    }
    total += piece(cur, here, two_pi - covered, origin);
    total / two_pi
}

/// Lazily evaluated mollified body `T(D)`.
pub fn mollified(body: &BodyRep, params: &RegularizationParams) -> Result<BodyRep> {
    if params.t == 0.0 {
        return Ok(body.clone());
    }
    let kernel = MollifierKernel::new(body.dim(), params)?;
    Ok(BodyRep::Mollified {
        inner: Arc::new(body.clone()),
        kernel: Arc::new(kernel),
    })
}

/// `T(D)` sampled at the nodes of `grid`.
pub fn mollify(body: &BodyRep, params: &RegularizationParams, grid: &Arc<SphericalGrid>) -> Result<BodyRep> {
    let lazy = mollified(body, params)?;
    Ok(BodyRep::Sampled(sample_support(&lazy, grid)?))
}

/// `recenter(T(D') + t·Bⁿ)` with `D' = recenter(D)`. The mollified summand is
/// kept symbolic so that evaluations anywhere on the sphere are exact
/// applications of the discrete operator.
pub fn regularize(body: &BodyRep, params: &RegularizationParams, grid: &SphericalGrid) -> Result<BodyRep> {
    let centered = recenter(body, grid)?;
    if params.t == 0.0 {
        return Ok(centered);
    }
    let smooth = mollified(&centered, params)?;
    let ball = BodyRep::centered_ball(body.dim(), params.t)?;
    recenter(&BodyRep::sum(smooth, ball)?, grid)
}
