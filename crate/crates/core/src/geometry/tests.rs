use super::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn ambient_gap(a: &ManifoldPoint, b: &ManifoldPoint) -> f64 {
    let (av, bv) = (a.ambient(), b.ambient());
    av.iter()
        .zip(&bv)
        .map(|(x, y)| {
            let mut d = x - y;
            // hue channel compares on the circle
            if matches!(a, ManifoldPoint::Hsv { .. }) {
                d = wrap_angle(d);
            }
            d * d
        })
        .sum::<f64>()
        .sqrt()
}

#[test]
fn round_trip_sweep_all_tags() {
    let mut r = rng(7);
    for (tag, tol) in [
        (GeometryTag::HsvProduct, 1e-12),
        (GeometryTag::Sphere2, 1e-12),
        (GeometryTag::Spd3, 1e-9),
    ] {
        let mut worst = 0.0f64;
        for _ in 0..1000 {
            let y = random::random_point(tag, &mut r);
            let x = random::random_point(tag, &mut r);
            let v = log(&y, &x).unwrap();
            let back = exp(&y, &v).unwrap();
            worst = worst.max(ambient_gap(&back, &x));
        }
        assert!(worst < tol, "{tag:?} round trip worst {worst}");
    }
}

#[test]
fn norm_equals_distance() {
    let mut r = rng(11);
    for tag in [
        GeometryTag::HsvProduct,
        GeometryTag::Sphere2,
        GeometryTag::Spd3,
    ] {
        for _ in 0..500 {
            let y = random::random_point(tag, &mut r);
            let x = random::random_point(tag, &mut r);
            let v = log(&y, &x).unwrap();
            let d = distance(&x, &y).unwrap();
            assert!(
                (v.norm() - d).abs() < 1e-10,
                "{tag:?}: |log| {} vs d {}",
                v.norm(),
                d
            );
        }
    }
}

#[test]
fn anchor_nullity() {
    let mut r = rng(13);
    for tag in [
        GeometryTag::HsvProduct,
        GeometryTag::Sphere2,
        GeometryTag::Spd3,
    ] {
        let y = random::random_point(tag, &mut r);
        let v = log(&y, &y).unwrap();
        assert!(v.norm() < 1e-12);
    }
}

#[test]
fn sphere_log_tangency_and_exp_norm() {
    let mut r = rng(17);
    for _ in 0..500 {
        let y = random::random_sphere(&mut r);
        let x = random::random_sphere(&mut r);
        let v = match log(&y, &x) {
            Ok(v) => v,
            Err(Error::Antipodal { .. }) => continue,
            Err(e) => panic!("{e}"),
        };
        if let (TangentCoords::Sphere(d), ManifoldPoint::Sphere(yv)) = (&v.coords, &y) {
            assert!(dot3(d, yv).abs() < 1e-10);
        }
        let back = exp(&y, &v).unwrap();
        if let ManifoldPoint::Sphere(b) = &back {
            assert!((norm3(b) - 1.0).abs() < 1e-12);
        }
    }
}

#[test]
fn spd_exp_closure() {
    let mut r = rng(19);
    for _ in 0..200 {
        let y = random::random_spd(&mut r, 0.6);
        // arbitrary symmetric tangent
        let t = random::random_spd(&mut r, 0.8);
        let v = log(&y, &t).unwrap();
        let out = exp(&y, &v).unwrap();
        out.validate().unwrap();
    }
}

#[test]
fn spd_log_matches_finite_difference_of_log_euclidean_geodesic() {
    // central difference of t -> exp((1-t) log y + t log x) at t=0 is the
    // initial velocity of the geodesic, i.e. spd_log(y, x)
    let mut r = rng(23);
    for _ in 0..50 {
        let y = random::random_spd(&mut r, 0.5);
        let x = random::random_spd(&mut r, 0.5);
        let (ym, xm) = match (&y, &x) {
            (ManifoldPoint::Spd(a), ManifoldPoint::Spd(b)) => (a, b),
            _ => unreachable!(),
        };
        let ly = sym_matrix_log(ym).unwrap();
        let lx = sym_matrix_log(xm).unwrap();
        let h = 1e-6;
        let at = |t: f64| {
            let mix = eig::add(&eig::scale(&ly, 1.0 - t), &eig::scale(&lx, t));
            sym_matrix_exp(&mix)
        };
        let fd = eig::scale(&eig::sub(&at(h), &at(-h)), 1.0 / (2.0 * h));
        let v = log(&y, &x).unwrap();
        if let TangentCoords::Spd(m) = &v.coords {
            let err = eig::frobenius_norm(&eig::sub(m, &fd));
            assert!(err < 1e-5, "finite difference mismatch {err}");
        }
    }
}

#[test]
fn interpolate_endpoints_and_midpoint() {
    let anchors = AnchorSet::default();
    let y = anchors.hsv.clone();
    let x = ManifoldPoint::hsv(-PI + 0.2, 0.0, 0.0); // log_y(x) = (0.2, 0, 0)
    let g = TangentVector {
        anchor: y.clone(),
        coords: TangentCoords::Hsv([0.6, 0.0, 0.0]),
    };
    let at0 = interpolate(&y, &x, &g, 0.0).unwrap();
    let at1 = interpolate(&y, &x, &g, 1.0).unwrap();
    let mid = interpolate(&y, &x, &g, 0.5).unwrap();
    let expect = |v: &TangentVector, e: f64| match &v.coords {
        TangentCoords::Hsv(d) => assert!((d[0] - e).abs() < 1e-14, "{} vs {}", d[0], e),
        _ => unreachable!(),
    };
    expect(&at0, 0.2);
    expect(&at1, 0.6);
    expect(&mid, 0.4);
}

#[test]
fn interpolate_canonicalizes_generator_output() {
    // raw hue delta of 3pi wraps: exp then log lands at -pi + base
    let anchors = AnchorSet::default();
    let y = anchors.hsv.clone();
    let x = y.clone();
    let g = TangentVector {
        anchor: y.clone(),
        coords: TangentCoords::Hsv([3.0 * PI, 0.0, 0.0]),
    };
    let at1 = interpolate(&y, &x, &g, 1.0).unwrap();
    match &at1.coords {
        TangentCoords::Hsv(d) => assert!((d[0] - wrap_angle(3.0 * PI)).abs() < 1e-12),
        _ => unreachable!(),
    }
}

#[test]
fn tangent_basis_round_trip_sweep() {
    let mut r = rng(29);
    let anchors = AnchorSet::default();
    for tag in [
        GeometryTag::HsvProduct,
        GeometryTag::Sphere2,
        GeometryTag::Spd3,
    ] {
        let anchor = anchors.anchor(tag);
        let b = basis::tangent_basis(tag, &anchor).unwrap();
        for _ in 0..1000 {
            let coords: Vec<f64> = (0..b.dim())
                .map(|_| rand::Rng::gen_range(&mut r, -2.0..2.0))
                .collect();
            let v = b.basis_to_ambient(&coords).unwrap();
            let back = b.ambient_to_basis(&v).unwrap();
            for (a, c) in back.iter().zip(&coords) {
                assert!((a - c).abs() < 1e-12);
            }
        }
    }
}

#[test]
fn distance_axioms_spot_checks() {
    let orth_a = ManifoldPoint::sphere([0.0, 0.0, 1.0]).unwrap();
    let orth_b = ManifoldPoint::sphere([1.0, 0.0, 0.0]).unwrap();
    assert!((distance(&orth_a, &orth_b).unwrap() - PI / 2.0).abs() < 1e-14);

    let e = std::f64::consts::E;
    let a = ManifoldPoint::Spd([[e, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]]);
    let i = ManifoldPoint::Spd(eig::IDENTITY);
    assert!((distance(&a, &i).unwrap() - 1.0).abs() < 1e-12);
}
