//! Hausdorff distance as the sup-norm distance of support functions on the
//! unit sphere: grid maximum, then local maximization around the best nodes.
//! Two planar polytopes are compared exactly instead.

use crate::error::{Error, Result};
use crate::geometry::body::BodyRep;
use crate::geometry::hull::hull_2d;
use crate::linalg::{self, Coords};
use crate::optimize::{golden_section, nelder_mead, NelderMeadParams};
use crate::quadrature::{GridSpec, SphericalGrid};

/// Number of best grid nodes used as starting points for refinement.
const REFINE_STARTS: usize = 4;

/// Cap on refined local maxima on a circle grid.
const REFINE_STARTS_2D: usize = 64;

/// Largest vertex-count product compared by the exact planar rule.
const EXACT_PAIRS: usize = 4096;

fn check_dims(a: &BodyRep, b: &BodyRep, grid: &SphericalGrid) -> Result<()> {
    let n = grid.dim();
    for d in [a.dim(), b.dim()] {
        if d != n {
            return Err(Error::DimensionMismatch { expected: n, found: d });
        }
    }
    Ok(())
}

fn gap(a: &BodyRep, b: &BodyRep, u: &[f64]) -> f64 {
    (a.eval_unit(u) - b.eval_unit(u)).abs()
}

/// Grid maximum of `|h_A − h_B|` with no refinement.
pub fn hausdorff_grid(a: &BodyRep, b: &BodyRep, grid: &SphericalGrid) -> Result<f64> {
    check_dims(a, b, grid)?;
    Ok(grid.nodes().iter().map(|u| gap(a, b, u)).fold(0.0, f64::max))
}

/// Hausdorff distance `max_u |h_A(u) − h_B(u)|`. The grid maximum is refined
/// locally unless a sampled body is involved (its interpolant has no
/// meaningful off-grid maxima), so the result is never below the grid value.
/// Planar polytope expressions of moderate size are compared exactly and the
/// grid is not used.
pub fn hausdorff(a: &BodyRep, b: &BodyRep, grid: &SphericalGrid) -> Result<f64> {
    check_dims(a, b, grid)?;
    if let Some(d) = exact_planar(a, b) {
        return Ok(d);
    }
    let mut values = Vec::with_capacity(grid.len());
    let mut radii = [0.0f64; 2];
    for u in grid.nodes() {
        let (x, y) = (a.eval_unit(u), b.eval_unit(u));
        radii = [radii[0].max(x), radii[1].max(y)];
        values.push((x - y).abs());
    }
    Ok(refine(a, b, grid, &values, radii[0] + radii[1]))
}

/// Whether the Hausdorff distance is below `threshold`, scanning the grid in
/// a scattered order and stopping at the first node that exceeds it.
pub fn hausdorff_below(a: &BodyRep, b: &BodyRep, grid: &SphericalGrid, threshold: f64) -> Result<bool> {
    check_dims(a, b, grid)?;
    if let Some(d) = exact_planar(a, b) {
        return Ok(d < threshold);
    }
    let n = grid.len();
    let stride = scatter_stride(n);
    let mut values = vec![0.0; n];
    let mut radii = [0.0f64; 2];
    let mut k = 0;
    for _ in 0..n {
        let u = &grid.nodes()[k];
        let (x, y) = (a.eval_unit(u), b.eval_unit(u));
        radii = [radii[0].max(x), radii[1].max(y)];
        let v = (x - y).abs();
        if v >= threshold {
            return Ok(false);
        }
        values[k] = v;
        k = (k + stride) % n;
    }
    Ok(refine(a, b, grid, &values, radii[0] + radii[1]) < threshold)
}

// a stride coprime to n that jumps far across the grid
fn scatter_stride(n: usize) -> usize {
    fn gcd(a: usize, b: usize) -> usize {
        if b == 0 {
            a
        } else {
            gcd(b, a % b)
        }
    }
    let mut s = ((n as f64) * 0.381_966).round().max(1.0) as usize;
    while gcd(s, n) != 1 {
        s += 1;
    }
    s
}

// On every arc between consecutive breakpoints of the two normal fans the
// difference of support functions is ⟨a − b, u⟩ for fixed vertices a, b, so
// its modulus peaks at a breakpoint or at u = ±(a − b)/|a − b|. Evaluating
// at all of those directions (a superset is harmless) gives the maximum.
fn exact_planar(a: &BodyRep, b: &BodyRep) -> Option<f64> {
    if a.dim() != 2 {
        return None;
    }
    let (va, vb) = (a.polytope_vertices()?, b.polytope_vertices()?);
    let (ha, hb) = (hull_2d(&va).vertices, hull_2d(&vb).vertices);
    if ha.len() * hb.len() > EXACT_PAIRS {
        return None;
    }
    let support = |vs: &[Coords], u: &[f64; 2]| vs.iter().map(|v| v[0] * u[0] + v[1] * u[1]).fold(f64::NEG_INFINITY, f64::max);
    let mut best: f64 = 0.0;
    let mut probe = |w: [f64; 2]| {
        let len = w[0].hypot(w[1]);
        if len > 0.0 {
            for sign in [1.0, -1.0] {
                let u = [sign * w[0] / len, sign * w[1] / len];
                best = best.max((support(&ha, &u) - support(&hb, &u)).abs());
            }
        }
    };
    for hull in [&ha, &hb] {
        for (i, p) in hull.iter().enumerate() {
            let q = &hull[(i + 1) % hull.len()];
            probe([q[1] - p[1], p[0] - q[0]]);
        }
    }
    for p in &ha {
        for q in &hb {
            probe([p[0] - q[0], p[1] - q[1]]);
        }
    }
    Some(best)
}

// `radius_sum` bounds the sum of the circumradii of a and b up to the grid
// resolution.
fn refine(a: &BodyRep, b: &BodyRep, grid: &SphericalGrid, values: &[f64], radius_sum: f64) -> f64 {
    let grid_max = values.iter().copied().fold(0.0, f64::max);
    if a.contains_sampled() || b.contains_sampled() || grid_max == 0.0 {
        return grid_max;
    }
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&i, &j| values[j].total_cmp(&values[i]).then(i.cmp(&j)));
    let h = grid.spacing();
    let starts: Vec<usize> = if let GridSpec::Circle { m } = *grid.spec() {
        // |h_A − h_B| is (R_A + R_B)-Lipschitz on the circle, so a node more
        // than (R_A + R_B)·h/2 below the grid maximum cannot neighbour the
        // true one; refine every local maximum above that level
        let band = 1.01 * radius_sum * h / 2.0;
        order
            .iter()
            .copied()
            .take_while(|&k| values[k] >= grid_max - band)
            .filter(|&k| values[k] >= values[(k + 1) % m] && values[k] >= values[(k + m - 1) % m])
            .take(REFINE_STARTS_2D)
            .collect()
    } else {
        order.iter().copied().take(REFINE_STARTS).collect()
    };
    let mut best = grid_max;
    for &k in &starts {
        let u0 = grid.nodes()[k].coords();
        let local = match grid.dim() {
            2 => {
                let theta0 = u0[1].atan2(u0[0]);
                let f = |t: f64| -gap(a, b, &[t.cos(), t.sin()]);
                -golden_section(f, theta0 - h, theta0 + h, 1e-13, 120).1
            }
            3 => {
                let (e, f) = linalg::tangent_basis(u0);
                let chart = |x: &[f64]| -> Coords {
                    let p: Coords = (0..3).map(|i| u0[i] + x[0] * e[i] + x[1] * f[i]).collect();
                    linalg::normalized(&p)
                };
                let params = NelderMeadParams {
                    initial_step: 0.5 * h,
                    x_tol: 1e-11,
                    f_tol: 1e-15,
                    max_evals: 400,
                };
                -nelder_mead(|x: &[f64]| -gap(a, b, &chart(x)), &[0.0, 0.0], params).1
            }
            _ => 0.0,
        };
        best = best.max(local);
    }
    best
}
