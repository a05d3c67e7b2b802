use nalgebra::DVector;
use ppav_core::exact::{int, QMatrix};
use ppav_core::fixtures;
use ppav_core::hodge::{check_riemann, even_to_weight_one, weil_jacobian, PolarizationForm};
use ppav_core::linalg::{rel_diff, RMat};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn q_preserved(c: &RMat, q: &RMat) -> f64 {
    rel_diff(&(c.transpose() * q * c), q)
}

#[test]
fn weight_two_fixtures_satisfy_riemann_conditions() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for _ in 0..20 {
        let (hs, q) = fixtures::random_weight_two(&mut rng, 1);
        let rc = check_riemann(&hs, &q).unwrap();
        assert!(rc.first && rc.second, "{rc:?}");
        let c = hs.weil_operator().unwrap();
        assert!(q_preserved(c.matrix(), &q.gram().to_f64()) < 1e-9);
        assert!(q.is_unimodular());
    }
}

#[test]
fn even_weight_torus_postconditions() {
    let mut rng = ChaCha8Rng::seed_from_u64(22);
    for scale in [1, 2] {
        for _ in 0..10 {
            let (hs, q) = fixtures::random_weight_two(&mut rng, scale);
            let t = even_to_weight_one(&hs, &q).unwrap();
            assert!(t.q.is_antisymmetric());
            let j = t.j.matrix();
            let qf = t.q.to_f64();
            assert!(rel_diff(&(j * j), &(-RMat::identity(6, 6))) < 1e-10);
            assert!(q_preserved(j, &qf) < 1e-10);
            for _ in 0..50 {
                let v = DVector::from_vec(fixtures::random_vector(&mut rng, 6));
                assert!((v.transpose() * &qf * j * &v)[(0, 0)] > 0.0);
                assert!((v.transpose() * t.q_convention.to_f64() * j * &v)[(0, 0)] < 0.0);
            }
            let det = t.q.determinant();
            assert_eq!(det == int(1) || det == int(-1), scale == 1);
        }
    }
}

#[test]
fn weight_three_jacobian() {
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    for _ in 0..10 {
        let (hs, q) = fixtures::random_weight_three(&mut rng);
        let c = hs.weil_operator().unwrap();
        assert!(rel_diff(&(c.matrix() * c.matrix()), &(-RMat::identity(4, 4))) < 1e-12);
        let jac = weil_jacobian(&hs, &q).unwrap();
        assert_eq!(jac.ppav.g(), 2);
        assert_eq!(jac.sign, -1);
        assert!(jac.ppav.principal);
        let j = jac.ppav.j.matrix();
        assert!(rel_diff(&(j * j), &(-RMat::identity(4, 4))) < 1e-10);
    }
}

#[test]
fn weight_one_jacobian_is_principal_iff_unimodular() {
    let mut rng = ChaCha8Rng::seed_from_u64(24);
    for _ in 0..10 {
        let (hs, q) = fixtures::random_weight_one(&mut rng);
        assert!(weil_jacobian(&hs, &q).unwrap().ppav.principal);
        let q3 = PolarizationForm::new(q.gram().scale(&int(3)), 1).unwrap();
        let jac = weil_jacobian(&hs, &q3).unwrap();
        assert!(!jac.ppav.principal);
        assert!(jac.ppav.siegel_point.is_none());
    }
}

#[test]
fn riemann_failure_is_reported() {
    let mut rng = ChaCha8Rng::seed_from_u64(25);
    let (hs, q) = fixtures::random_weight_two(&mut rng, 1);
    let neg = PolarizationForm::new(-q.gram().clone(), 2).unwrap();
    assert!(even_to_weight_one(&hs, &neg).is_err());
    let (hs3, _) = fixtures::random_weight_three(&mut rng);
    let bad = PolarizationForm::new(
        QMatrix::from_i64(4, 4, &[0, 1, 0, 0, -1, 0, 0, 0, 0, 0, 0, 1, 0, 0, -1, 0]),
        3,
    )
    .unwrap();
    assert!(weil_jacobian(&hs3, &bad).is_err());
}
