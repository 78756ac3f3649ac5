use super::*;
use crate::families::make_family;
use std::f64::consts::{FRAC_1_SQRT_2, SQRT_2};

fn fam(s: &str) -> MaxZonoid {
    make_family(&s.parse().unwrap()).unwrap().into_zonoid()
}

fn spectral(norm: ReferenceNorm, atoms: &[(&[f64], f64)]) -> MaxZonoid {
    MaxZonoid::from_spectral(
        SpectralMeasure::new(norm, atoms.iter().map(|(p, w)| Atom::new(p.to_vec(), *w)).collect()).unwrap(),
    )
}

#[test]
fn support_examples() {
    let cube = MaxZonoid::unit_cube(2);
    let cross = MaxZonoid::unit_cross(2);
    assert_eq!(cube.support(&[1.0, 2.0]).unwrap(), 3.0);
    assert_eq!(cross.support(&[1.0, 2.0]).unwrap(), 2.0);
    assert!(cube.support(&[1.0]).is_err());
    assert!(cube.support(&[-1.0, 1.0]).is_err());
}

#[test]
fn infinite_arguments() {
    let cube = MaxZonoid::unit_cube(2);
    assert_eq!(cube.support(&[f64::INFINITY, 0.0]).unwrap(), f64::INFINITY);
    // no mass on the second axis: 0 · ∞ = 0
    let k = spectral(ReferenceNorm::L1, &[(&[1.0, 0.0], 1.0)]);
    assert_eq!(k.support(&[2.0, f64::INFINITY]).unwrap(), 2.0);
}

#[test]
fn cross_polytope_support() {
    let c = CrossPolytope::new(vec![2.0, 0.5]).unwrap();
    assert_eq!(c.support(&[1.0, 3.0]), 2.0);
    assert_eq!(c.to_zonoid().unwrap().support(&[1.0, 3.0]).unwrap(), 2.0);
    assert!(CrossPolytope::new(vec![-1.0]).is_err());
}

#[test]
fn scale_examples() {
    let cube = MaxZonoid::unit_cube(2);
    assert!((scale(&cube, &[2.0, 1.0]).unwrap().support(&[1.0, 1.0]).unwrap() - 3.0).abs() < 1e-15);
    assert_eq!(scale(&cube, &[1.0, 1.0]).unwrap(), cube);
    let cross = MaxZonoid::unit_cross(2);
    assert!((scale(&cross, &[2.0, 2.0]).unwrap().support(&[1.0, 1.0]).unwrap() - 2.0).abs() < 1e-15);
    assert!(scale(&cube, &[0.0, 1.0]).is_err());
    // analytic bodies go through a composite
    let lg = fam("logistic(p=2)");
    let s = scale(&lg, &[3.0, 0.5]).unwrap();
    let x = [0.4, 1.7];
    assert!((s.support(&x).unwrap() - lg.support(&[1.2, 0.85]).unwrap()).abs() < 1e-15);
}

#[test]
fn projection_examples() {
    let cube3 = MaxZonoid::unit_cube(3);
    let p = project(&cube3, &[0, 1]).unwrap();
    assert_eq!(p.support(&[0.3, 0.4]).unwrap(), 0.7);
    let s3 = 3f64.sqrt();
    let dep = spectral(ReferenceNorm::L2, &[(&[1.0 / s3, 1.0 / s3, 1.0 / s3], s3)]);
    let p = project(&dep, &[0, 1]).unwrap();
    match p.representation() {
        Representation::Spectral(s) => {
            assert_eq!(s.atoms().len(), 1);
            assert!((s.atoms()[0].point[0] - FRAC_1_SQRT_2).abs() < 1e-15);
            assert!((s.atoms()[0].mass - SQRT_2).abs() < 1e-15);
        }
        other => panic!("{other:?}"),
    }
    for j in 0..=32 {
        let t = j as f64 / 32.0;
        assert!((p.support(&[t, 1.0 - t]).unwrap() - dep.support(&[t, 1.0 - t, 0.0]).unwrap()).abs() < 1e-15);
    }
    assert!(project(&cube3, &[]).is_err());
    assert!(project(&cube3, &[3]).is_err());
    // projection of an analytic dependency set stays a dependency set
    let lg = fam("logistic(p=3, d=4)");
    let p = project(&lg, &[3, 1]).unwrap();
    assert!(DependencySet::new(p.clone()).is_ok());
    assert!((p.support(&[1.0, 2.0]).unwrap() - lg.support(&[0.0, 2.0, 0.0, 1.0]).unwrap()).abs() < 1e-15);
}

#[test]
fn product_examples() {
    let sq = MaxZonoid::unit_cube(2);
    let prod = cartesian_product(&sq, &sq);
    assert_eq!(prod.support(&[1.0, 1.0, 1.0, 1.0]).unwrap(), 4.0);
    let cr = MaxZonoid::unit_cross(2);
    let prod = cartesian_product(&cr, &cr);
    assert!((prod.support(&[1.0, 1.0, 1.0, 1.0]).unwrap() - 2.0).abs() < 1e-15);
    assert!(DependencySet::new(prod).is_ok());
    let mixed = cartesian_product(&fam("logistic(p=2)"), &cr);
    let x = [0.3, 0.4, 1.0, 2.0];
    assert!((mixed.support(&x).unwrap() - (0.5 + 2.0)).abs() < 1e-15);
    assert!(DependencySet::new(mixed).is_ok());
}

#[test]
fn minkowski_sum_and_difference() {
    let cube = MaxZonoid::unit_cube(2);
    let cross = MaxZonoid::unit_cross(2);
    let sum = minkowski_combine(&cube, &cross, &Weight::Scalar(0.5), CombineMode::Sum).unwrap();
    assert!((sum.support(&[1.0, 1.0]).unwrap() - 1.5).abs() < 1e-15);
    let k1 = spectral(ReferenceNorm::L1, &[(&[1.0, 0.0], 1.0), (&[0.0, 1.0], 1.0), (&[0.5, 0.5], 1.0)]);
    let diff = minkowski_combine(&k1, &cross, &Weight::Scalar(0.5), CombineMode::Difference).unwrap();
    for x in [[1.0, 1.0], [0.2, 0.9], [3.0, 0.0]] {
        assert!((diff.support(&x).unwrap() - cube.support(&x).unwrap()).abs() < 1e-15);
    }
    // subtracting too much is reported with the offending atom
    match minkowski_combine(&k1, &cross, &Weight::Scalar(1.0), CombineMode::Difference) {
        Err(Error::NegativeMass { atom, mass }) => {
            assert_eq!(atom, vec![0.5, 0.5]);
            assert!((mass + 1.0).abs() < 1e-15);
        }
        other => panic!("{other:?}"),
    }
    assert!(minkowski_combine(&cube, &cross, &Weight::Scalar(1.5), CombineMode::Sum).is_err());
    // analytic sum stays exact
    let lg = fam("logistic(p=2)");
    let s = minkowski_combine(&lg, &cube, &Weight::Vector(vec![0.25, 0.75]), CombineMode::Sum).unwrap();
    let x = [0.6, 0.8];
    let want = lg.support(&[0.15, 0.6]).unwrap() + 0.75 * 0.6 + 0.25 * 0.8;
    assert!((s.support(&x).unwrap() - want).abs() < 1e-15);
}

#[test]
fn combine_2d_examples() {
    let cross = MaxZonoid::unit_cross(2);
    let square = MaxZonoid::unit_cube(2);
    let h = combine_2d(&cross, &cross, Combine2d::Hull).unwrap();
    assert_eq!(h.to_polygon_2d().unwrap(), Polygon2D::unit_cross());
    let i = combine_2d(&square, &cross, Combine2d::Intersection).unwrap();
    assert_eq!(i.to_polygon_2d().unwrap(), Polygon2D::unit_cross());
    let pm = combine_2d(&cross, &square, Combine2d::PowerMean { p: 2.0, lambda: 0.5 }).unwrap();
    assert!((pm.support(&[1.0, 1.0]).unwrap() - 2.5f64.sqrt()).abs() < 1e-12);
    assert!(DependencySet::new(pm).is_ok());
    assert!(combine_2d(&MaxZonoid::unit_cube(3), &square, Combine2d::Hull).is_err());
    assert!(combine_2d(&cross, &square, Combine2d::PowerMean { p: 0.5, lambda: 0.5 }).is_err());
}

#[test]
fn polar_examples() {
    assert_eq!(polar_2d(&MaxZonoid::unit_cube(2)).unwrap(), Polygon2D::unit_cross());
    assert_eq!(polar_2d(&MaxZonoid::unit_cross(2)).unwrap(), Polygon2D::unit_square());
    assert!(polar_2d(&MaxZonoid::unit_cube(3)).is_err());
}

#[test]
fn polar_volumes() {
    let sq = polar_volume(&MaxZonoid::unit_cube(2), VolumeMethod::Exact2d).unwrap();
    assert!((sq.value - 0.5).abs() < 1e-15);
    for d in [2, 3, 4] {
        let v = polar_volume(&MaxZonoid::unit_cross(d), VolumeMethod::MonteCarlo { samples: 10_000, seed: 1 }).unwrap();
        assert_eq!(v.value, 1.0);
        assert_eq!(v.std_error, 0.0);
    }
    let ball = polar_volume(&fam("logistic(p=2, d=3)"), VolumeMethod::MonteCarlo { samples: 200_000, seed: 9 }).unwrap();
    let want = std::f64::consts::PI / 6.0;
    assert!((ball.value - want).abs() < 3.0 * ball.std_error, "{} ± {}", ball.value, ball.std_error);
    let quarter = polar_volume(&fam("logistic(p=2)"), VolumeMethod::Exact2d).unwrap();
    assert!((quarter.value - std::f64::consts::FRAC_PI_4).abs() < 1e-10);
    assert!(polar_volume(&MaxZonoid::unit_cube(3), VolumeMethod::Exact2d).is_err());
}

#[test]
fn hausdorff_examples() {
    let sq = MaxZonoid::unit_cube(2);
    let cr = MaxZonoid::unit_cross(2);
    assert_eq!(hausdorff_distance(&sq, &sq, 4096).unwrap(), 0.0);
    let d = hausdorff_distance(&sq, &cr, 4096).unwrap();
    assert!((d - FRAC_1_SQRT_2).abs() < 1e-12);
    // nested grids refine monotonically
    let lg = fam("logistic(p=3)");
    let mut prev = 0.0;
    for n in [64, 128, 256, 512] {
        let d = hausdorff_distance(&lg, &cr, n).unwrap();
        assert!(d >= prev);
        prev = d;
    }
}

#[test]
fn m_distance_examples() {
    let sq = MaxZonoid::unit_cube(2);
    let cr = MaxZonoid::unit_cross(2);
    let m = m_distance(&cr, &sq, 0).unwrap();
    assert!((m - 4f64.ln()).abs() < 1e-6, "{m}");
    assert!((m_distance(&sq, &cr, 0).unwrap() - m).abs() < 1e-9);
    assert!(m_distance(&sq, &sq, 0).unwrap().abs() < 1e-9);
    let lg = fam("logistic(p=2)");
    assert!(m_distance(&lg, &lg, 512).unwrap().abs() < 1e-9);
}

#[test]
fn m_distance_three_dimensional_upper_bound() {
    let sq = MaxZonoid::unit_cube(3);
    let cr = MaxZonoid::unit_cross(3);
    let m = m_distance(&cr, &sq, 600).unwrap();
    // square ⊆ λΔ needs Σ 1/λ_i ≤ 1, minimized at λ_i = 3
    assert!(m >= 3.0 * 3f64.ln() - 1e-6 && m < 3.0 * 3f64.ln() + 1e-3, "{m}");
}

#[test]
fn dependency_set_checks() {
    assert!(DependencySet::new(MaxZonoid::unit_cube(3)).is_ok());
    let k = spectral(ReferenceNorm::L1, &[(&[1.0, 0.0], 2.0), (&[0.0, 1.0], 0.5)]);
    assert!(matches!(DependencySet::new(k.clone()), Err(Error::NotDependency { .. })));
    let n = DependencySet::normalize(&k).unwrap();
    assert_eq!(n.marginals(), vec![1.0, 1.0]);
}

#[test]
fn kinks_of_discrete_bodies() {
    let mo = fam("marshall_olkin(alpha1=0.4, alpha2=0.7)");
    let ks = mo.kinks_2d();
    let atoms = mo.exact_spectral().unwrap();
    assert_eq!(ks.len(), atoms.atoms().iter().filter(|a| a.point[0] > 0.0 && a.point[1] > 0.0).count());
    let sp = MaxZonoid::from_spectral(atoms);
    assert_eq!(sp.kinks_2d(), ks);
}

#[test]
fn composite_has_exact_atoms_when_leaves_do() {
    let lg1 = fam("logistic(p=1)");
    let s = scale(&lg1, &[2.0, 0.5]).unwrap();
    let atoms = s.exact_spectral().unwrap();
    for x in [[0.3, 0.9], [1.0, 0.0]] {
        assert!((atoms.support(&x) - s.support(&x).unwrap()).abs() < 1e-15);
    }
    assert!(scale(&fam("logistic(p=2)"), &[2.0, 0.5]).unwrap().exact_spectral().is_none());
}
