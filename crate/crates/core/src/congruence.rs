//! Distance between congruence classes: both bodies are Steiner-centered and
//! `hausdorff(gD, K)` is minimized over g ∈ O(n) by a coarse scan followed by
//! local refinement from the best scan points.

use std::f64::consts::PI;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::geometry::body::BodyRep;
use crate::geometry::hausdorff::hausdorff;
use crate::geometry::rotation::{so3_grid, Rotation};
use crate::geometry::steiner::recenter;
use crate::optimize::{golden_section, nelder_mead_restarts, NelderMeadParams};
use crate::quadrature::SphericalGrid;

/// Accuracy claimed for a refined distance with the default search; the
/// pseudometric laws are expected to hold up to twice this.
pub const REFINEMENT_TOL: f64 = 1e-6;

#[derive(Debug, Clone)]
pub struct SearchParams {
    /// Angles in the planar scan; each is tried as a rotation and a reflection.
    pub coarse_2d: usize,
    /// Base points and fibre samples of the SO(3) grid.
    pub so3_base: usize,
    pub so3_fibres: usize,
    /// Number of best scan points refined locally; in the plane also every
    /// point the Lipschitz bound cannot rule out.
    pub starts: usize,
    /// Search SO(n) only.
    pub proper_only: bool,
    pub golden_tol: f64,
    pub simplex: NelderMeadParams,
    pub restarts: usize,
}

impl Default for SearchParams {
    fn default() -> Self {
        SearchParams {
            coarse_2d: 360,
            so3_base: 72,
            so3_fibres: 8,
            starts: 5,
            proper_only: false,
            golden_tol: 1e-12,
            simplex: NelderMeadParams {
                initial_step: 0.25,
                x_tol: 1e-11,
                f_tol: 1e-15,
                max_evals: 600,
            },
            restarts: 6,
        }
    }
}

#[derive(Debug, Clone)]
pub struct CongruenceResult {
    pub distance: f64,
    pub optimizer: Rotation,
    /// Every coarse evaluation `(g, hausdorff(gD, K))`.
    pub certificate: Vec<(Rotation, f64)>,
}

// A point of the search space: the planar angle (with orientation) or a base
// rotation for the local chart in SO(3)·{±I}.
#[derive(Debug, Clone)]
enum Candidate {
    Planar { theta: f64, reflect: bool },
    Spatial(Rotation),
}

impl Candidate {
    fn rotation(&self) -> Rotation {
        match self {
            Candidate::Planar { theta, reflect: false } => Rotation::from_angle(*theta),
            Candidate::Planar { theta, reflect: true } => Rotation::reflection_from_angle(*theta),
            Candidate::Spatial(g) => g.clone(),
        }
    }
}

fn coarse_candidates(n: usize, search: &SearchParams) -> Result<Vec<Candidate>> {
    match n {
        2 => {
            let m = search.coarse_2d.max(1);
            let mut out = Vec::new();
            for reflect in [false, true] {
                if reflect && search.proper_only {
                    continue;
                }
                for k in 0..m {
                    out.push(Candidate::Planar {
                        theta: 2.0 * PI * k as f64 / m as f64,
                        reflect,
                    });
                }
            }
            Ok(out)
        }
        3 => {
            let mut proper = vec![Rotation::identity(3)];
            proper.extend(so3_grid(search.so3_base, search.so3_fibres));
            let mut out: Vec<Candidate> = proper.iter().cloned().map(Candidate::Spatial).collect();
            if !search.proper_only {
                out.extend(proper.iter().map(|g| Candidate::Spatial(g.negated())));
            }
            Ok(out)
        }
        _ => Err(Error::Representation(format!(
            "congruence search is implemented for n = 2, 3 (got {n})"
        ))),
    }
}

/// `min_g hausdorff(g·r(D), r(K))` with its minimizer and the scan values.
pub fn congruence_distance(
    d: &BodyRep,
    k: &BodyRep,
    grid: &SphericalGrid,
    search: &SearchParams,
) -> Result<CongruenceResult> {
    let n = grid.dim();
    for dim in [d.dim(), k.dim()] {
        if dim != n {
            return Err(Error::DimensionMismatch { expected: n, found: dim });
        }
    }
    let dc = Arc::new(recenter(d, grid)?);
    let kc = recenter(k, grid)?;
    let objective = |g: &Rotation| -> f64 {
        let moved = BodyRep::Rotated {
            rotation: g.clone(),
            inner: dc.clone(),
        };
        hausdorff(&moved, &kc, grid).expect("dimensions checked")
    };

    let candidates = coarse_candidates(n, search)?;
    let mut certificate = Vec::with_capacity(candidates.len());
    for c in &candidates {
        let g = c.rotation();
        let v = objective(&g);
        certificate.push((g, v));
    }
    let mut order: Vec<usize> = (0..candidates.len()).collect();
    order.sort_by(|&i, &j| certificate[i].1.total_cmp(&certificate[j].1).then(i.cmp(&j)));

    // In the plane the objective is R-Lipschitz in the angle, R the
    // circumradius of the centered D. A scan point can only sit next to the
    // global minimum if its value is within R·step/2 of it, so every such
    // point is refined, not just the best few.
    let step_2d = 2.0 * PI / search.coarse_2d.max(1) as f64;
    let slack = if n == 2 {
        let radius = grid.nodes().iter().map(|u| dc.eval_unit(u)).fold(0.0, f64::max);
        1.01 * radius * step_2d / 2.0
    } else {
        f64::NEG_INFINITY
    };

    let (mut best_g, mut best_v) = certificate[order[0]].clone();
    for (rank, &i) in order.iter().enumerate() {
        if rank >= search.starts.max(1) && certificate[i].1 - slack >= best_v {
            break;
        }
        let (g, v) = match &candidates[i] {
            Candidate::Planar { theta, reflect } => {
                let step = step_2d;
                let make = |t: f64| {
                    Candidate::Planar {
                        theta: t,
                        reflect: *reflect,
                    }
                    .rotation()
                };
                let (t, v) = golden_section(
                    |t| objective(&make(t)),
                    theta - step,
                    theta + step,
                    search.golden_tol,
                    200,
                );
                (make(t), v)
            }
            Candidate::Spatial(base) => {
                let make = |w: &[f64]| base.compose(&Rotation::from_rotation_vector(w));
                let (w, v) = nelder_mead_restarts(
                    |w| objective(&make(w)),
                    &[0.0, 0.0, 0.0],
                    search.simplex,
                    search.restarts,
                );
                (make(&w), v)
            }
        };
        if v < best_v {
            best_v = v;
            best_g = g;
        }
    }
    Ok(CongruenceResult {
        distance: best_v,
        optimizer: best_g,
        certificate,
    })
}

pub fn same_congruence_class(
    d: &BodyRep,
    k: &BodyRep,
    tol: f64,
    grid: &SphericalGrid,
    search: &SearchParams,
) -> Result<bool> {
    Ok(congruence_distance(d, k, grid, search)?.distance < tol)
}
