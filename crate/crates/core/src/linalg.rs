//! Dense helpers on plain `f64` slices. Hot loops in support evaluation work
//! on slices so that no allocation happens per direction.

use smallvec::SmallVec;

/// Stack-allocated coordinate buffer for the dimensions used in practice.
pub type Coords = SmallVec<[f64; 4]>;

#[inline]
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[inline]
pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

#[inline]
pub fn sub(a: &[f64], b: &[f64]) -> Coords {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

#[inline]
pub fn add(a: &[f64], b: &[f64]) -> Coords {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

#[inline]
pub fn scale(a: &[f64], s: f64) -> Coords {
    a.iter().map(|x| x * s).collect()
}

#[inline]
pub fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

pub fn normalized(a: &[f64]) -> Coords {
    let n = norm(a);
    a.iter().map(|x| x / n).collect()
}

pub fn cross(a: &[f64], b: &[f64]) -> [f64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

/// Orthonormal basis of the orthogonal complement of the unit vector `u`
/// (n = 2 or 3). For n = 2 the single vector is `u` rotated by +90°.
pub fn tangent_basis(u: &[f64]) -> (Coords, Coords) {
    match u.len() {
        2 => {
            let e: Coords = [-u[1], u[0]].into_iter().collect();
            (e.clone(), e)
        }
        3 => {
            // pick the coordinate axis least aligned with u
            let (ax, _) = u
                .iter()
                .enumerate()
                .map(|(i, x)| (i, x.abs()))
                .fold((0, f64::INFINITY), |best, c| if c.1 < best.1 { c } else { best });
            let mut a = [0.0; 3];
            a[ax] = 1.0;
            let e = cross(u, &a);
            let e = normalized(&e);
            let f = cross(u, &e);
            (e, f.into_iter().collect())
        }
        n => panic!("tangent_basis is only defined for n = 2, 3 (got {n})"),
    }
}

/// Affine dimension of a point set together with an orthonormal frame of its
/// affine hull (rows), computed by Gram-Schmidt with relative tolerance.
pub fn affine_frame(points: &[impl AsRef<[f64]>], tol: f64) -> (usize, Vec<Coords>) {
    let Some(first) = points.first() else {
        return (0, Vec::new());
    };
    let origin = first.as_ref();
    let scale = points
        .iter()
        .map(|p| dist(p.as_ref(), origin))
        .fold(0.0, f64::max)
        .max(1e-300);
    let mut basis: Vec<Coords> = Vec::new();
    loop {
        // farthest point from the current affine span
        let mut best: Option<(f64, Coords)> = None;
        for p in points {
            let mut r = sub(p.as_ref(), origin);
            for b in &basis {
                let c = dot(&r, b);
                for (ri, bi) in r.iter_mut().zip(b) {
                    *ri -= c * bi;
                }
            }
            let len = norm(&r);
            if best.as_ref().is_none_or(|(l, _)| len > *l) {
                best = Some((len, r));
            }
        }
        match best {
            Some((len, r)) if len > tol * scale && basis.len() < origin.len() => {
                basis.push(scale_coords(&r, 1.0 / len));
            }
            _ => break,
        }
    }
    (basis.len(), basis)
}

fn scale_coords(a: &[f64], s: f64) -> Coords {
    scale(a, s)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tangent_basis_is_orthonormal() {
        let u = normalized(&[0.3, -0.4, 0.8]);
        let (e, f) = tangent_basis(&u);
        assert!(dot(&u, &e).abs() < 1e-15);
        assert!(dot(&u, &f).abs() < 1e-15);
        assert!(dot(&e, &f).abs() < 1e-15);
        assert!((norm(&e) - 1.0).abs() < 1e-15 && (norm(&f) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn affine_dimension_of_degenerate_sets() {
        let seg = [[0.0, 0.0, 0.0], [1.0, 1.0, 0.0], [2.0, 2.0, 0.0]];
        assert_eq!(affine_frame(&seg, 1e-12).0, 1);
        let tri = [[0.0, 0.0, 1.0], [1.0, 0.0, 1.0], [0.0, 1.0, 1.0], [0.3, 0.3, 1.0]];
        assert_eq!(affine_frame(&tri, 1e-12).0, 2);
        let pt = [[1.0, 2.0]];
        assert_eq!(affine_frame(&pt, 1e-12).0, 0);
    }
}
