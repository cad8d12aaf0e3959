//! Randomized property tests for the geometry invariants.

use proptest::prelude::*;

use mwgan_core::geometry::{self, wrap_angle, GeometryTag, Mat3, ManifoldPoint};

fn hsv_point() -> impl Strategy<Value = ManifoldPoint> {
    (
        -std::f64::consts::PI..std::f64::consts::PI,
        0.0..=1.0f64,
        0.0..=1.0f64,
    )
        .prop_map(|(h, s, v)| ManifoldPoint::Hsv { h, s, v })
}

fn sphere_point() -> impl Strategy<Value = ManifoldPoint> {
    (prop::array::uniform3(-1.0..1.0f64))
        .prop_filter_map("nonzero direction", |c| {
            let n = (c[0] * c[0] + c[1] * c[1] + c[2] * c[2]).sqrt();
            if n < 1e-3 {
                return None;
            }
            Some(ManifoldPoint::Sphere([c[0] / n, c[1] / n, c[2] / n]))
        })
}

fn spd_point() -> impl Strategy<Value = ManifoldPoint> {
    (prop::array::uniform6(-1.0..1.0f64)).prop_map(|c| {
        // Build an SPD matrix as exp of an arbitrary symmetric matrix.
        let sym: Mat3 = [
            [c[0], c[3], c[4]],
            [c[3], c[1], c[5]],
            [c[4], c[5], c[2]],
        ];
        ManifoldPoint::Spd(geometry::sym_matrix_exp(&sym))
    })
}

fn point_for(tag: GeometryTag) -> BoxedStrategy<ManifoldPoint> {
    match tag {
        GeometryTag::HsvProduct => hsv_point().boxed(),
        GeometryTag::Sphere2 => sphere_point().boxed(),
        GeometryTag::Spd3 => spd_point().boxed(),
    }
}

fn tags() -> impl Strategy<Value = GeometryTag> {
    prop_oneof![
        Just(GeometryTag::HsvProduct),
        Just(GeometryTag::Sphere2),
        Just(GeometryTag::Spd3),
    ]
}

fn pair() -> impl Strategy<Value = (ManifoldPoint, ManifoldPoint)> {
    tags().prop_flat_map(|tag| (point_for(tag), point_for(tag)))
}

fn triple() -> impl Strategy<Value = (ManifoldPoint, ManifoldPoint, ManifoldPoint)> {
    tags().prop_flat_map(|tag| (point_for(tag), point_for(tag), point_for(tag)))
}

/// Sphere log is undefined for (nearly) antipodal pairs; skip those cases.
fn well_posed(y: &ManifoldPoint, x: &ManifoldPoint) -> bool {
    match (y, x) {
        (ManifoldPoint::Sphere(a), ManifoldPoint::Sphere(b)) => {
            a.iter().zip(b).map(|(p, q)| p * q).sum::<f64>() > -0.999
        }
        _ => true,
    }
}

proptest! {
    #[test]
    fn wrap_angle_is_idempotent_and_in_range(a in -100.0..100.0f64) {
        let w = wrap_angle(a);
        prop_assert!((-std::f64::consts::PI..=std::f64::consts::PI).contains(&w));
        prop_assert!((wrap_angle(w) - w).abs() < 1e-15);
        // Wrapping preserves the angle modulo 2π.
        let diff = (a - w) / (2.0 * std::f64::consts::PI);
        prop_assert!((diff - diff.round()).abs() < 1e-9);
    }

    #[test]
    fn exp_log_round_trips((y, x) in pair()) {
        prop_assume!(well_posed(&y, &x));
        let v = geometry::log(&y, &x).unwrap();
        let back = geometry::exp(&y, &v).unwrap();
        back.validate().unwrap();
        prop_assert!(geometry::distance(&back, &x).unwrap() < 1e-8);
    }

    #[test]
    fn log_norm_equals_distance((y, x) in pair()) {
        prop_assume!(well_posed(&y, &x));
        let v = geometry::log(&y, &x).unwrap();
        let d = geometry::distance(&x, &y).unwrap();
        prop_assert!((v.norm() - d).abs() < 1e-8);
    }

    #[test]
    fn distance_is_a_metric((x, y, z) in triple()) {
        let dxy = geometry::distance(&x, &y).unwrap();
        let dyx = geometry::distance(&y, &x).unwrap();
        let dxz = geometry::distance(&x, &z).unwrap();
        let dyz = geometry::distance(&y, &z).unwrap();
        prop_assert!(dxy >= 0.0);
        prop_assert!((dxy - dyx).abs() < 1e-9);
        prop_assert!(geometry::distance(&x, &x).unwrap() < 1e-9);
        prop_assert!(dxz <= dxy + dyz + 1e-9);
    }

    #[test]
    fn exp_of_zero_is_identity(tag_point in tags().prop_flat_map(point_for)) {
        let v = geometry::log(&tag_point, &tag_point).unwrap();
        prop_assert!(v.norm() < 1e-9);
        let back = geometry::exp(&tag_point, &v).unwrap();
        prop_assert!(geometry::distance(&back, &tag_point).unwrap() < 1e-9);
    }
}
