use std::f64::consts::PI;

use convexhyper::congruence::{congruence_distance, SearchParams};
use convexhyper::geometry::gauss::min_curvature_radius_3d;
use convexhyper::io::random_polytope;
use convexhyper::io::svg::{outline, render_svg_2d};
use convexhyper::truncation::{default_candidates, desymmetrize, is_c1_violated, isotropy_estimate, truncate, TruncationSpec};
use convexhyper::{
    curvature_positive, curvature_radius_2d, default_mollifier, gauss_preimage, hausdorff, integrate, make_grid_2d,
    make_grid_3d, regularize, steiner, BodyRep, RegularizationParams, Rotation, UnitVector,
};

fn square() -> BodyRep {
    BodyRep::cuboid(&[1.0, 1.0]).unwrap()
}

fn cube() -> BodyRep {
    BodyRep::cuboid(&[1.0, 1.0, 1.0]).unwrap()
}

fn same_points(mut a: Vec<Vec<f64>>, mut b: Vec<Vec<f64>>, tol: f64) -> bool {
    let key = |p: &Vec<f64>| p.iter().map(|x| (x / tol).round() as i64).collect::<Vec<_>>();
    a.sort_by_key(key);
    b.sort_by_key(key);
    a.len() == b.len() && a.iter().zip(&b).all(|(p, q)| p.iter().zip(q).all(|(x, y)| (x - y).abs() < tol))
}

#[test]
fn quadrature_second_moments() {
    let g = make_grid_2d(2048).unwrap();
    assert!((integrate(&g, |u| u[0] * u[0]) - PI).abs() < 1e-10);
    let g = make_grid_3d(32, 64).unwrap();
    assert!((integrate(&g, |u| u[2] * u[2]) - 4.0 * PI / 3.0).abs() < 1e-10);
    assert!((integrate(&g, |_| 1.0) - 4.0 * PI).abs() < 1e-10);
}

#[test]
fn square_support_and_disk_distance() {
    let sq = square();
    for k in 0..50 {
        let t = 0.37 * k as f64;
        let want = t.cos().abs() + t.sin().abs();
        assert!((sq.eval_unit(&[t.cos(), t.sin()]) - want).abs() < 1e-15);
    }
    let disk = BodyRep::centered_ball(2, 1.0).unwrap();
    let d = hausdorff(&sq, &disk, &make_grid_2d(2048).unwrap()).unwrap();
    // boundary oracle: farthest square point from the disk, nearest disk is radial
    let far = (0..4000)
        .map(|k| {
            let s = -1.0 + 2.0 * k as f64 / 3999.0;
            (1.0 + s * s).sqrt() - 1.0
        })
        .fold(0.0, f64::max);
    assert!((d - far).abs() < 1e-9, "{d} {far}");
}

#[test]
fn steiner_point_of_a_triangle_against_dense_integral() {
    let tri = BodyRep::polytope(vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap();
    let s = steiner(&tri, &make_grid_2d(64).unwrap()).unwrap();
    let m = 1_000_000;
    let mut acc = [0.0; 2];
    for k in 0..m {
        let t = 2.0 * PI * (k as f64 + 0.5) / m as f64;
        let u = [t.cos(), t.sin()];
        let h = tri.eval_unit(&u);
        acc[0] += h * u[0];
        acc[1] += h * u[1];
    }
    for i in 0..2 {
        let want = acc[i] * 2.0 * PI / m as f64 / PI;
        assert!((s[i] - want).abs() < 1e-9, "{} {want}", s[i]);
    }
}

#[test]
fn square_plus_ball_support() {
    let body = BodyRep::sum(square(), BodyRep::centered_ball(2, 1.0).unwrap()).unwrap();
    let disk_poly = BodyRep::regular_polygon(4096, 1.0, 0.0).unwrap();
    for k in 0..40 {
        let t = 0.157 * k as f64;
        let u = [t.cos(), t.sin()];
        let exact = u[0].abs() + u[1].abs() + 1.0;
        assert!((body.eval_unit(&u) - exact).abs() < 1e-14);
        let approx = square().eval_unit(&u) + disk_poly.eval_unit(&u);
        assert!((approx - exact).abs() < 1e-6);
    }
}

#[test]
fn ellipsoid_gauss_preimage_and_curvature() {
    let (a, b) = (2.0, 0.5);
    let e = BodyRep::axis_ellipsoid(&[a, b]).unwrap();
    for k in 0..12 {
        let t = 0.5 * k as f64 + 0.1;
        let u = UnitVector::from_angle(t);
        let p = gauss_preimage(&e, &u).unwrap();
        // dense boundary argmax
        let best = (0..200_000)
            .map(|j| {
                let s = 2.0 * PI * j as f64 / 200_000.0;
                [a * s.cos(), b * s.sin()]
            })
            .max_by(|x, y| (x[0] * u[0] + x[1] * u[1]).total_cmp(&(y[0] * u[0] + y[1] * u[1])))
            .unwrap();
        assert!((p[0] - best[0]).abs() < 1e-4 && (p[1] - best[1]).abs() < 1e-4);
    }
    // radius of curvature at the end of the major axis
    let r = curvature_radius_2d(&e, 0.0, 1e-3).unwrap();
    assert!((r - b * b / a).abs() < 1e-5, "{r}");
}

#[test]
fn curvature_test_separates_smooth_from_kinked() {
    let g = make_grid_2d(512).unwrap();
    let rounded = BodyRep::sum(square(), BodyRep::centered_ball(2, 0.5).unwrap()).unwrap();
    assert!(curvature_positive(&rounded, &g, 1e-3, 1e-3).unwrap());
    assert!(!curvature_positive(&square(), &g, 1e-3, 1e-3).unwrap());
}

#[test]
fn mollifier_shape() {
    let psi = default_mollifier();
    // oracle normalization by composite Simpson on the raw bump
    let bump = |s: f64| if s > 1.0 && s < 2.0 { (-1.0 / ((s - 1.0) * (2.0 - s))).exp() } else { 0.0 };
    let n = 100_000;
    let h = 1.0 / n as f64;
    let mass: f64 = (0..=n)
        .map(|i| {
            let w = if i == 0 || i == n { 1.0 } else if i % 2 == 1 { 4.0 } else { 2.0 };
            w * bump(1.0 + i as f64 * h)
        })
        .sum::<f64>()
        * h
        / 3.0;
    assert!((psi.eval(1.5) - (-4.0f64).exp() / mass).abs() < 1e-10);
    assert_eq!(psi.eval(0.9), 0.0);
    assert_eq!(psi.eval(2.0), 0.0);
}

#[test]
fn mollified_ball_and_square() {
    let g2 = make_grid_2d(512).unwrap();
    let ball = BodyRep::centered_ball(2, 1.0).unwrap();
    let p = RegularizationParams::new(0.1).unwrap();
    let m = convexhyper::regularization::mollified(&ball, &p).unwrap();
    // again a ball, slightly larger than the original
    let r = m.eval_unit(&[1.0, 0.0]);
    assert!(r > 1.0 && r < 1.0 + 0.1);
    for k in 0..16 {
        let t = 0.4 * k as f64;
        assert!((m.eval_unit(&[t.cos(), t.sin()]) - r).abs() < 1e-8);
    }
    let mut last = f64::INFINITY;
    for t in [0.4, 0.2, 0.1, 0.05] {
        let p = RegularizationParams::new(t).unwrap();
        let m = convexhyper::regularization::mollified(&square(), &p).unwrap();
        let d = hausdorff(&m, &square(), &g2).unwrap();
        assert!(d < last, "{t}: {d}");
        last = d;
    }
    let sm = convexhyper::regularization::mollified(&square(), &p).unwrap();
    for k in 0..360 {
        let t = 2.0 * PI * k as f64 / 360.0;
        assert!(curvature_radius_2d(&sm, t, 1e-3).unwrap() > -1e-3);
    }
}

#[test]
fn regularized_bodies() {
    let g2 = make_grid_2d(512).unwrap();
    let p = RegularizationParams::new(0.1).unwrap();
    let rb = regularize(&BodyRep::centered_ball(2, 1.0).unwrap(), &p, &g2).unwrap();
    assert!(steiner(&rb, &g2).unwrap().norm() < 1e-8);

    let rs = regularize(&square(), &p, &g2).unwrap();
    assert!(curvature_positive(&rs, &g2, 1e-3, 0.05).unwrap());
    let g = Rotation::from_angle(0.7);
    let lhs = regularize(&BodyRep::rotated(g.clone(), square()).unwrap(), &p, &g2).unwrap();
    let rhs = BodyRep::rotated(g, rs).unwrap();
    assert!(hausdorff(&lhs, &rhs, &g2).unwrap() < 1e-8);

    let g3 = make_grid_3d(8, 16).unwrap();
    let body = random_polytope(5, 3, 8).unwrap();
    let r = Rotation::from_axis_angle(&[1.0, 2.0, 2.0], 1.1);
    let lhs = regularize(&BodyRep::rotated(r.clone(), body.clone()).unwrap(), &p, &g3).unwrap();
    let rhs = BodyRep::rotated(r, regularize(&body, &p, &g3).unwrap()).unwrap();
    assert!(hausdorff(&lhs, &rhs, &g3).unwrap() < 1e-8);
    assert!(min_curvature_radius_3d(&rhs, &[0.0, 0.6, 0.8], 1e-3) > 0.0);
}

#[test]
fn truncated_square() {
    let g = make_grid_2d(256).unwrap();
    let spec = TruncationSpec::new(UnitVector::axis(2, 0), 0.5).unwrap();
    let cut = truncate(&square(), &spec, &g).unwrap();
    // rectangle [-1, 0.5] x [-1, 1] moved to its center
    let want = vec![vec![-0.75, -1.0], vec![0.75, -1.0], vec![0.75, 1.0], vec![-0.75, 1.0]];
    assert!(same_points(cut.polytope_vertices().unwrap(), want, 1e-12));
}

#[test]
fn truncated_cube_corner() {
    let g = make_grid_3d(8, 16).unwrap();
    let eps = 0.1;
    let u = UnitVector::normalize(&[1.0, 1.0, 1.0]).unwrap();
    let (cut, face) =
        convexhyper::truncation::truncate_with_face(&cube(), &TruncationSpec::new(u, eps).unwrap(), &g).unwrap();
    // the plane x + y + z = 3 - eps sqrt 3 meets the three edges at the corner
    let d = eps * 3f64.sqrt();
    assert_eq!(face.vertex_set.len(), 3);
    assert!((face.diameter - d * 2f64.sqrt()).abs() < 1e-12);
    assert_eq!(cut.polytope_vertices().unwrap().len(), 10);
}

#[test]
fn c1_violation_detection() {
    let fine = BodyRep::regular_polygon(2048, 1.0, 0.0).unwrap();
    assert!(!is_c1_violated(&fine, 0.1).unwrap());
    assert!(is_c1_violated(&square(), 0.1).unwrap());
}

#[test]
fn isotropy_of_ball_is_everything() {
    let g = make_grid_2d(256).unwrap();
    let cands = default_candidates(2).unwrap();
    let ball = BodyRep::centered_ball(2, 1.0).unwrap();
    assert_eq!(isotropy_estimate(&ball, &cands, 1e-12, &g).unwrap().len(), cands.len());
}

#[test]
fn desymmetrized_disk_and_random_polygon() {
    let g = make_grid_2d(512).unwrap();
    let cands = default_candidates(2).unwrap();
    let disk = BodyRep::centered_ball(2, 1.0).unwrap();
    for body in [disk, random_polytope(11, 2, 9).unwrap()] {
        let (out, faces) = desymmetrize(&body, 0.2, &g).unwrap();
        assert!(hausdorff(&out, &body, &g).unwrap() <= 0.2 + 1e-12);
        assert!(faces.windows(2).all(|w| w[1].diameter < w[0].diameter));
        let iso = isotropy_estimate(&out, &cands, 1e-6, &g).unwrap();
        assert_eq!(iso.len(), 1);
        assert!(iso[0].distance_to_identity() < 1e-12);
    }
}

#[test]
fn congruence_of_cubes() {
    let g = make_grid_3d(32, 64).unwrap();
    let search = SearchParams::default();
    let moved = BodyRep::rotated(Rotation::from_axis_angle(&[0.3, -1.0, 0.5], 0.9), cube())
        .unwrap()
        .translated(&[2.0, -1.0, 0.5]);
    assert!(congruence_distance(&cube(), &moved, &g, &search).unwrap().distance < 1e-5);
    let bigger = BodyRep::scaled(1.01, cube()).unwrap();
    let d = congruence_distance(&cube(), &bigger, &g, &search).unwrap().distance;
    assert!(d > 1e-3, "{d}");
}

#[test]
fn svg_of_ball_and_of_nothing() {
    let ball = BodyRep::centered_ball(2, 1.0).unwrap();
    assert!(outline(&ball).unwrap().len() >= 256);
    let empty = render_svg_2d(&[]).unwrap();
    assert!(empty.starts_with("<svg") && empty.trim_end().ends_with("</svg>"));
    assert!(!empty.contains("<path"));
}
