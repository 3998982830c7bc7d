use std::f64::consts::PI;

use proptest::prelude::*;

use convexhyper::geometry::vertex_sum_polytope;
use convexhyper::io::json::{parse_body, serialize_body, BodyDocument};
use convexhyper::io::random_polytope;
use convexhyper::{hausdorff, make_grid_2d, make_grid_3d, steiner, BodyRep, Rotation};

fn polygon() -> impl Strategy<Value = BodyRep> {
    prop::collection::vec(prop::array::uniform2(-2.0f64..2.0), 3..10)
        .prop_map(|pts| BodyRep::polytope(pts.iter().map(|p| p.to_vec()).collect()).unwrap())
}

fn points_of(body: &BodyRep) -> Vec<Vec<f64>> {
    body.polytope_vertices().unwrap()
}

fn rotate(body: &BodyRep, g: &Rotation, w: &[f64]) -> BodyRep {
    BodyRep::polytope(
        points_of(body)
            .iter()
            .map(|v| g.apply(v).iter().zip(w).map(|(a, b)| a + b).collect())
            .collect(),
    )
    .unwrap()
}

fn close(a: &[f64], b: &[f64], tol: f64) -> bool {
    a.iter().zip(b).all(|(x, y)| (x - y).abs() < tol)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn hausdorff_is_a_metric(a in polygon(), b in polygon(), c in polygon()) {
        let g = make_grid_2d(512).unwrap();
        let ab = hausdorff(&a, &b, &g).unwrap();
        let ba = hausdorff(&b, &a, &g).unwrap();
        let bc = hausdorff(&b, &c, &g).unwrap();
        let ac = hausdorff(&a, &c, &g).unwrap();
        prop_assert!((ab - ba).abs() < 1e-12);
        prop_assert!(ac <= ab + bc + 1e-9);
        prop_assert_eq!(hausdorff(&a, &a, &g).unwrap(), 0.0);
    }

    #[test]
    fn steiner_is_linear_and_equivariant(a in polygon(), b in polygon(), theta in 0.0..2.0 * PI, flip in any::<bool>(), w in prop::array::uniform2(-5.0f64..5.0)) {
        let g = make_grid_2d(64).unwrap();
        let (sa, sb) = (steiner(&a, &g).unwrap(), steiner(&b, &g).unwrap());
        let sum = steiner(&vertex_sum_polytope(&a, &b).unwrap(), &g).unwrap();
        prop_assert!(close(&sum, &[sa[0] + sb[0], sa[1] + sb[1]], 1e-10));
        let rot = if flip { Rotation::reflection_from_angle(theta) } else { Rotation::from_angle(theta) };
        let moved = steiner(&rotate(&a, &rot, &w), &g).unwrap();
        let want = rot.apply(&sa);
        prop_assert!(close(&moved, &[want[0] + w[0], want[1] + w[1]], 1e-10));
    }

    #[test]
    fn steiner_is_lipschitz(a in polygon(), b in polygon()) {
        // sharp constant for the Steiner point in the plane
        let g = make_grid_2d(1024).unwrap();
        let (sa, sb) = (steiner(&a, &g).unwrap(), steiner(&b, &g).unwrap());
        let gap = ((sa[0] - sb[0]).powi(2) + (sa[1] - sb[1]).powi(2)).sqrt();
        prop_assert!(gap <= 4.0 / PI * hausdorff(&a, &b, &g).unwrap() + 1e-12);
    }

    #[test]
    fn json_round_trip_is_bit_exact(body in tree(3)) {
        let doc = BodyDocument::new(body).with_metadata("note", "random tree");
        let text = serialize_body(&doc);
        let back = parse_body(&text).unwrap();
        prop_assert_eq!(&back, &doc);
        prop_assert_eq!(serialize_body(&back), text);
    }
}

fn leaf() -> impl Strategy<Value = BodyRep> {
    prop_oneof![
        polygon(),
        (prop::array::uniform2(-1e3f64..1e3), 1e-6f64..10.0).prop_map(|(c, r)| BodyRep::ball(c.to_vec(), r).unwrap()),
        (0.1f64..3.0, 0.1f64..3.0).prop_map(|(a, b)| BodyRep::axis_ellipsoid(&[a, b]).unwrap()),
    ]
}

fn tree(depth: u32) -> impl Strategy<Value = BodyRep> {
    leaf().prop_recursive(depth, 16, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| BodyRep::sum(a, b).unwrap()),
            (0.0f64..4.0, inner.clone()).prop_map(|(f, a)| BodyRep::scaled(f, a).unwrap()),
            (0.0f64..7.0, inner).prop_map(|(t, a)| BodyRep::rotated(Rotation::from_angle(t), a).unwrap()),
        ]
    })
}

#[test]
fn steiner_lipschitz_in_space() {
    let g = make_grid_3d(32, 64).unwrap();
    let mut worst: f64 = 0.0;
    for i in 0..20 {
        let a = random_polytope(300 + i, 3, 10).unwrap();
        let b = random_polytope(400 + i, 3, 10).unwrap();
        let (sa, sb) = (steiner(&a, &g).unwrap(), steiner(&b, &g).unwrap());
        let gap = (0..3).map(|k| (sa[k] - sb[k]).powi(2)).sum::<f64>().sqrt();
        worst = worst.max(gap / hausdorff(&a, &b, &g).unwrap());
    }
    assert!(worst <= 1.5, "{worst}");
}

#[test]
fn steiner_of_a_segment_is_its_midpoint() {
    let g = make_grid_3d(8, 16).unwrap();
    let seg = BodyRep::polytope(vec![vec![1.0, 2.0, 3.0], vec![-1.0, 0.0, 5.0]]).unwrap();
    assert!(close(&steiner(&seg, &g).unwrap(), &[0.0, 1.0, 4.0], 1e-15));
}
