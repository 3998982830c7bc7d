//! Convex hulls of point sets in ℝ² and ℝ³ with face structure.
//!
//! Used for vertex reduction, exact external angles (Steiner points of
//! polytopes), halfspace clipping and face bookkeeping during truncation.
//! Lower-dimensional point sets are handled in their affine hull.

use std::collections::HashMap;
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::linalg::{self, Coords};

/// Relative tolerance for coplanarity / collinearity decisions.
const REL_TOL: f64 = 1e-10;

/// A facet of a full-dimensional hull: an edge in ℝ², a planar polygon in ℝ³.
#[derive(Debug, Clone)]
pub struct Facet {
    pub normal: Coords,
    pub offset: f64,
    /// Indices into [`PolytopeGeometry::vertices`]; counter-clockwise seen
    /// from outside for n = 3.
    pub vertices: Vec<usize>,
}

#[derive(Debug, Clone)]
pub struct PolytopeGeometry {
    pub dim: usize,
    pub affine_dim: usize,
    pub vertices: Vec<Coords>,
    /// Only populated when `affine_dim == dim`.
    pub facets: Vec<Facet>,
}

impl PolytopeGeometry {
    /// Hull of `points` in dimension 2 or 3.
    pub fn new(points: &[impl AsRef<[f64]>]) -> Result<Self> {
        let Some(first) = points.first() else {
            return Err(Error::InvalidBody("polytope has no vertices".into()));
        };
        let dim = first.as_ref().len();
        if !(2..=3).contains(&dim) {
            return Err(Error::Representation(format!(
                "hull computations are implemented for n = 2, 3 (got {dim})"
            )));
        }
        let (affine_dim, frame) = linalg::affine_frame(points, REL_TOL);
        if affine_dim == dim {
            return Ok(match dim {
                2 => hull_2d(points),
                _ => hull_3d(points)?,
            });
        }
        // work inside the affine hull and lift back
        let origin: Coords = first.as_ref().iter().copied().collect();
        let local: Vec<Coords> = points
            .iter()
            .map(|p| {
                let r = linalg::sub(p.as_ref(), &origin);
                frame.iter().map(|b| linalg::dot(&r, b)).collect()
            })
            .collect();
        let local_vertices = match affine_dim {
            0 => vec![local[0].clone()],
            1 => {
                let lo = local.iter().min_by(|a, b| a[0].total_cmp(&b[0])).unwrap();
                let hi = local.iter().max_by(|a, b| a[0].total_cmp(&b[0])).unwrap();
                vec![lo.clone(), hi.clone()]
            }
            _ => hull_2d(&local).vertices,
        };
        let vertices = local_vertices
            .iter()
            .map(|l| {
                let mut p = origin.clone();
                for (c, b) in l.iter().zip(&frame) {
                    for (pi, bi) in p.iter_mut().zip(b) {
                        *pi += c * bi;
                    }
                }
                p
            })
            .collect();
        Ok(PolytopeGeometry {
            dim,
            affine_dim,
            vertices,
            facets: Vec::new(),
        })
    }

    pub fn is_full_dimensional(&self) -> bool {
        self.affine_dim == self.dim
    }

    /// Facets incident to each vertex.
    pub fn vertex_facets(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.vertices.len()];
        for (f, facet) in self.facets.iter().enumerate() {
            for &v in &facet.vertices {
                out[v].push(f);
            }
        }
        out
    }

    /// Undirected edges as vertex index pairs.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        if !self.is_full_dimensional() {
            // all pairs: a superset of the edges of a low-dimensional hull
            let n = self.vertices.len();
            return (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
        }
        let mut seen = std::collections::HashSet::new();
        for f in &self.facets {
            let k = f.vertices.len();
            for i in 0..k {
                let (a, b) = (f.vertices[i], f.vertices[(i + 1) % k]);
                if k == 2 && i == 1 {
                    break;
                }
                seen.insert((a.min(b), a.max(b)));
            }
        }
        let mut e: Vec<_> = seen.into_iter().collect();
        e.sort_unstable();
        e
    }

    /// Normalized external angle of every vertex: the fraction of the unit
    /// sphere covered by its normal cone. The fractions sum to 1.
    pub fn external_angles(&self) -> Vec<f64> {
        match self.affine_dim {
            0 => vec![1.0],
            1 => vec![0.5, 0.5],
            2 if self.dim == 3 => {
                // normal cone = planar normal cone × line, same sphere fraction
                let (_, frame) = linalg::affine_frame(&self.vertices, REL_TOL);
                let local: Vec<Coords> = self
                    .vertices
                    .iter()
                    .map(|p| frame.iter().map(|b| linalg::dot(p, b)).collect())
                    .collect();
                polygon_external_angles(&local)
            }
            2 => polygon_external_angles(&self.vertices),
            _ => {
                let inc = self.vertex_facets();
                inc.iter()
                    .enumerate()
                    .map(|(v, fs)| {
                        let normals: Vec<&[f64]> =
                            fs.iter().map(|&f| self.facets[f].normal.as_slice()).collect();
                        spherical_polygon_area(&normals, &self.vertices[v], self) / (4.0 * PI)
                    })
                    .collect()
            }
        }
    }

    /// Angular width of each vertex's normal cone: the largest angle between
    /// two of its incident facet normals (π for lower-dimensional hulls).
    pub fn normal_cone_widths(&self) -> Vec<f64> {
        if !self.is_full_dimensional() {
            return vec![PI; self.vertices.len()];
        }
        self.vertex_facets()
            .iter()
            .map(|fs| {
                let mut w: f64 = 0.0;
                for (i, &a) in fs.iter().enumerate() {
                    for &b in &fs[i + 1..] {
                        let c = linalg::dot(&self.facets[a].normal, &self.facets[b].normal);
                        w = w.max(c.clamp(-1.0, 1.0).acos());
                    }
                }
                w
            })
            .collect()
    }
}

fn polygon_external_angles(ccw_or_any: &[Coords]) -> Vec<f64> {
    // vertices come from hull_2d and are in counter-clockwise order
    let k = ccw_or_any.len();
    if k == 1 {
        return vec![1.0];
    }
    if k == 2 {
        return vec![0.5, 0.5];
    }
    (0..k)
        .map(|i| {
            let prev = &ccw_or_any[(i + k - 1) % k];
            let cur = &ccw_or_any[i];
            let next = &ccw_or_any[(i + 1) % k];
            let a = linalg::sub(cur, prev);
            let b = linalg::sub(next, cur);
            let turn = (a[0] * b[1] - a[1] * b[0]).atan2(linalg::dot(&a, &b));
            turn.abs() / (2.0 * PI)
        })
        .collect()
}

// Area of the spherical polygon spanned by the normals of the facets around
// vertex `v`, ordered cyclically about their mean direction.
fn spherical_polygon_area(normals: &[&[f64]], _v: &[f64], _geo: &PolytopeGeometry) -> f64 {
    if normals.len() < 3 {
        return 0.0;
    }
    let mut mean = [0.0; 3];
    for n in normals {
        for i in 0..3 {
            mean[i] += n[i];
        }
    }
    let mean = linalg::normalized(&mean);
    let (e, f) = linalg::tangent_basis(&mean);
    let mut order: Vec<(f64, &[f64])> = normals
        .iter()
        .map(|n| (linalg::dot(n, &f).atan2(linalg::dot(n, &e)), *n))
        .collect();
    order.sort_by(|a, b| a.0.total_cmp(&b.0));
    // fan of spherical triangles around the mean direction
    let k = order.len();
    (0..k)
        .map(|i| triangle_solid_angle(&mean, order[i].1, order[(i + 1) % k].1))
        .sum()
}

/// Solid angle of the spherical triangle with unit vertices a, b, c
/// (Van Oosterom-Strackee).
pub fn triangle_solid_angle(a: &[f64], b: &[f64], c: &[f64]) -> f64 {
    let num = linalg::dot(a, &linalg::cross(b, c)).abs();
    let den = 1.0 + linalg::dot(a, b) + linalg::dot(b, c) + linalg::dot(c, a);
    2.0 * num.atan2(den)
}

/// Counter-clockwise convex hull in the plane (Andrew's monotone chain),
/// collinear boundary points removed.
pub fn hull_2d(points: &[impl AsRef<[f64]>]) -> PolytopeGeometry {
    let mut pts: Vec<[f64; 2]> = points.iter().map(|p| [p.as_ref()[0], p.as_ref()[1]]).collect();
    pts.sort_by(|a, b| a[0].total_cmp(&b[0]).then(a[1].total_cmp(&b[1])));
    pts.dedup();
    let scale = pts
        .iter()
        .flat_map(|p| p.iter().map(|x| x.abs()))
        .fold(0.0, f64::max)
        .max(1e-300);
    let eps = REL_TOL * scale * scale;
    let cross = |o: &[f64; 2], a: &[f64; 2], b: &[f64; 2]| {
        (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])
    };
    let mut hull: Vec<[f64; 2]> = Vec::with_capacity(2 * pts.len());
    for pass in 0..2 {
        let start = hull.len();
        let iter: Box<dyn Iterator<Item = &[f64; 2]>> = if pass == 0 {
            Box::new(pts.iter())
        } else {
            Box::new(pts.iter().rev())
        };
        for p in iter {
            while hull.len() >= start + 2 && cross(&hull[hull.len() - 2], &hull[hull.len() - 1], p) <= eps {
                hull.pop();
            }
            hull.push(*p);
        }
        hull.pop();
    }
    if hull.len() < 3 {
        let vertices: Vec<Coords> = hull.iter().map(|p| p.iter().copied().collect()).collect();
        let affine_dim = vertices.len().saturating_sub(1).min(1);
        return PolytopeGeometry {
            dim: 2,
            affine_dim,
            vertices,
            facets: Vec::new(),
        };
    }
    let k = hull.len();
    let facets = (0..k)
        .map(|i| {
            let (a, b) = (hull[i], hull[(i + 1) % k]);
            let n = linalg::normalized(&[b[1] - a[1], a[0] - b[0]]);
            Facet {
                offset: linalg::dot(&n, &a),
                normal: n,
                vertices: vec![i, (i + 1) % k],
            }
        })
        .collect();
    PolytopeGeometry {
        dim: 2,
        affine_dim: 2,
        vertices: hull.iter().map(|p| p.iter().copied().collect()).collect(),
        facets,
    }
}

#[derive(Clone)]
struct Tri {
    v: [usize; 3],
    n: [f64; 3],
    d: f64,
    alive: bool,
}

fn plane(p: &[[f64; 3]], a: usize, b: usize, c: usize) -> ([f64; 3], f64) {
    let ab = linalg::sub(&p[b], &p[a]);
    let ac = linalg::sub(&p[c], &p[a]);
    let n = linalg::cross(&ab, &ac);
    let len = linalg::norm(&n);
    let n = if len > 0.0 { [n[0] / len, n[1] / len, n[2] / len] } else { n };
    (n, linalg::dot(&n, &p[a]))
}

/// Incremental 3D hull; coplanar triangles are merged into polygonal facets.
fn hull_3d(points: &[impl AsRef<[f64]>]) -> Result<PolytopeGeometry> {
    let p: Vec<[f64; 3]> = points
        .iter()
        .map(|q| [q.as_ref()[0], q.as_ref()[1], q.as_ref()[2]])
        .collect();
    let scale = p
        .iter()
        .flat_map(|q| q.iter().map(|x| x.abs()))
        .fold(0.0, f64::max)
        .max(1e-300);
    let eps = REL_TOL * scale;

    // initial tetrahedron from extreme points
    let i0 = (0..p.len()).min_by(|&a, &b| p[a][0].total_cmp(&p[b][0])).unwrap();
    let i1 = (0..p.len())
        .max_by(|&a, &b| linalg::dist(&p[a], &p[i0]).total_cmp(&linalg::dist(&p[b], &p[i0])))
        .unwrap();
    let line = linalg::normalized(&linalg::sub(&p[i1], &p[i0]));
    let off_line = |q: &[f64; 3]| {
        let r = linalg::sub(q, &p[i0]);
        let t = linalg::dot(&r, &line);
        linalg::norm(&linalg::sub(&r, &linalg::scale(&line, t)))
    };
    let i2 = (0..p.len())
        .max_by(|&a, &b| off_line(&p[a]).total_cmp(&off_line(&p[b])))
        .unwrap();
    let (n012, d012) = plane(&p, i0, i1, i2);
    let i3 = (0..p.len())
        .max_by(|&a, &b| {
            (linalg::dot(&n012, &p[a]) - d012)
                .abs()
                .total_cmp(&(linalg::dot(&n012, &p[b]) - d012).abs())
        })
        .unwrap();
    if (linalg::dot(&n012, &p[i3]) - d012).abs() <= eps {
        return Err(Error::InvalidBody("point set is not full-dimensional".into()));
    }

    let mut tris: Vec<Tri> = Vec::new();
    let mut edges: HashMap<(usize, usize), usize> = HashMap::new();
    let add = |tris: &mut Vec<Tri>, edges: &mut HashMap<(usize, usize), usize>, v: [usize; 3]| {
        let (n, d) = plane(&p, v[0], v[1], v[2]);
        let id = tris.len();
        tris.push(Tri { v, n, d, alive: true });
        for k in 0..3 {
            edges.insert((v[k], v[(k + 1) % 3]), id);
        }
    };
    let centroid: Vec<f64> = (0..3)
        .map(|k| (p[i0][k] + p[i1][k] + p[i2][k] + p[i3][k]) / 4.0)
        .collect();
    for f in [[i0, i1, i2], [i0, i1, i3], [i0, i2, i3], [i1, i2, i3]] {
        let (n, d) = plane(&p, f[0], f[1], f[2]);
        let v = if linalg::dot(&n, &centroid) - d > 0.0 {
            [f[0], f[2], f[1]]
        } else {
            f
        };
        add(&mut tris, &mut edges, v);
    }

    let initial = [i0, i1, i2, i3];
    for q in 0..p.len() {
        if initial.contains(&q) {
            continue;
        }
        let pt = p[q];
        let height = |t: &Tri| linalg::dot(&t.n, &pt) - t.d;
        let Some(seed) = (0..tris.len())
            .filter(|&t| tris[t].alive)
            .max_by(|&a, &b| height(&tris[a]).total_cmp(&height(&tris[b])))
        else {
            continue;
        };
        if height(&tris[seed]) <= eps {
            continue;
        }
        // visible region, grown from the most visible triangle
        let mut visible = vec![seed];
        let mut mark = HashMap::from([(seed, true)]);
        let mut k = 0;
        while k < visible.len() {
            let t = visible[k];
            k += 1;
            let v = tris[t].v;
            for e in 0..3 {
                if let Some(&nb) = edges.get(&(v[(e + 1) % 3], v[e])) {
                    if !mark.contains_key(&nb) {
                        let vis = height(&tris[nb]) > eps;
                        mark.insert(nb, vis);
                        if vis {
                            visible.push(nb);
                        }
                    }
                }
            }
        }
        let mut horizon = Vec::new();
        for &t in &visible {
            let v = tris[t].v;
            for e in 0..3 {
                let (a, b) = (v[e], v[(e + 1) % 3]);
                let twin = edges.get(&(b, a)).copied();
                if twin.is_none_or(|nb| !mark.get(&nb).copied().unwrap_or(false)) {
                    horizon.push((a, b));
                }
            }
        }
        for &t in &visible {
            tris[t].alive = false;
            let v = tris[t].v;
            for e in 0..3 {
                let key = (v[e], v[(e + 1) % 3]);
                if edges.get(&key) == Some(&t) {
                    edges.remove(&key);
                }
            }
        }
        for (a, b) in horizon {
            add(&mut tris, &mut edges, [a, b, q]);
        }
    }

    merge_faces(&p, &tris, &edges, eps)
}

fn merge_faces(
    p: &[[f64; 3]],
    tris: &[Tri],
    edges: &HashMap<(usize, usize), usize>,
    eps: f64,
) -> Result<PolytopeGeometry> {
    let alive: Vec<usize> = (0..tris.len()).filter(|&t| tris[t].alive).collect();
    let mut parent: HashMap<usize, usize> = alive.iter().map(|&t| (t, t)).collect();
    fn find(parent: &mut HashMap<usize, usize>, x: usize) -> usize {
        let mut r = x;
        while parent[&r] != r {
            r = parent[&r];
        }
        let mut y = x;
        while parent[&y] != r {
            let next = parent[&y];
            parent.insert(y, r);
            y = next;
        }
        r
    }
    for &t in &alive {
        let v = tris[t].v;
        for e in 0..3 {
            if let Some(&nb) = edges.get(&(v[(e + 1) % 3], v[e])) {
                let opposite = tris[nb].v.iter().copied().find(|x| !v.contains(x));
                let coplanar = linalg::dot(&tris[t].n, &tris[nb].n) > 1.0 - 1e-9
                    && opposite.is_none_or(|o| (linalg::dot(&tris[t].n, &p[o]) - tris[t].d).abs() <= eps);
                if coplanar {
                    let (ra, rb) = (find(&mut parent, t), find(&mut parent, nb));
                    if ra != rb {
                        parent.insert(ra, rb);
                    }
                }
            }
        }
    }
    let mut groups: HashMap<usize, Vec<usize>> = HashMap::new();
    for &t in &alive {
        let r = find(&mut parent, t);
        groups.entry(r).or_default().push(t);
    }
    let mut roots: Vec<usize> = groups.keys().copied().collect();
    roots.sort_unstable();

    let mut raw_faces: Vec<(Coords, Vec<usize>)> = Vec::new();
    for r in roots {
        let members = &groups[&r];
        let mut next: HashMap<usize, usize> = HashMap::new();
        let mut normal = [0.0; 3];
        for &t in members {
            let v = tris[t].v;
            let area = linalg::norm(&linalg::cross(
                &linalg::sub(&p[v[1]], &p[v[0]]),
                &linalg::sub(&p[v[2]], &p[v[0]]),
            ));
            for k in 0..3 {
                normal[k] += area * tris[t].n[k];
            }
            for e in 0..3 {
                let (a, b) = (v[e], v[(e + 1) % 3]);
                let interior = edges
                    .get(&(b, a))
                    .is_some_and(|nb| find(&mut parent, *nb) == r);
                if !interior {
                    next.insert(a, b);
                }
            }
        }
        let Some(&start) = next.keys().min() else {
            continue;
        };
        let mut cycle = vec![start];
        let mut cur = next[&start];
        while cur != start {
            if cycle.len() > next.len() {
                return Err(Error::Representation("non-manifold hull boundary".into()));
            }
            cycle.push(cur);
            cur = match next.get(&cur) {
                Some(&n) => n,
                None => return Err(Error::Representation("open hull face boundary".into())),
            };
        }
        // drop collinear corners
        let mut changed = true;
        while changed && cycle.len() > 3 {
            changed = false;
            let k = cycle.len();
            for i in 0..k {
                let (a, b, c) = (cycle[(i + k - 1) % k], cycle[i], cycle[(i + 1) % k]);
                let ab = linalg::sub(&p[b], &p[a]);
                let bc = linalg::sub(&p[c], &p[b]);
                let ac = linalg::dist(&p[c], &p[a]).max(1e-300);
                if linalg::norm(&linalg::cross(&ab, &bc)) / ac <= eps {
                    cycle.remove(i);
                    changed = true;
                    break;
                }
            }
        }
        raw_faces.push((linalg::normalized(&normal), cycle));
    }

    // re-index the vertices actually used as corners
    let mut index: HashMap<usize, usize> = HashMap::new();
    let mut vertices: Vec<Coords> = Vec::new();
    let mut facets = Vec::with_capacity(raw_faces.len());
    for (normal, cycle) in raw_faces {
        let verts: Vec<usize> = cycle
            .iter()
            .map(|&g| {
                *index.entry(g).or_insert_with(|| {
                    vertices.push(p[g].iter().copied().collect());
                    vertices.len() - 1
                })
            })
            .collect();
        let offset = cycle
            .iter()
            .map(|&g| linalg::dot(&normal, &p[g]))
            .fold(f64::NEG_INFINITY, f64::max);
        facets.push(Facet {
            normal,
            offset,
            vertices: verts,
        });
    }
    // corners dropped from one loop but kept in another stay; vertices that
    // were dropped everywhere are simply absent
    Ok(PolytopeGeometry {
        dim: 3,
        affine_dim: 3,
        vertices,
        facets,
    })
}
