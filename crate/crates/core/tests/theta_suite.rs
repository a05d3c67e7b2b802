use nalgebra::Complex;
use ppav_core::fixtures;
use ppav_core::lattice::IntegralSkewForm;
use ppav_core::linalg::{CMat, C64};
use ppav_core::siegel::SiegelPoint;
use ppav_core::theta::{
    multiplier_from_basis, quasi_periodicity_defect, theta_eval, theta_sum, Characteristic, Parity,
    ShiftKind,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const TOL: f64 = 1e-10;

fn origin(g: usize) -> Vec<C64> {
    vec![Complex::new(0.0, 0.0); g]
}

#[test]
fn quasi_periodicity_defects() {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    for case in 0..60 {
        let g = 1 + case % 3;
        let z = fixtures::random_siegel_in(&mut rng, g, 0.3, 5.0);
        let chars = Characteristic::all(g);
        let ch = &chars[rng.random_range(0..chars.len())];
        let arg = fixtures::random_complex_vector(&mut rng, g, 0.3);
        let m: Vec<i64> = (0..g).map(|_| rng.random_range(-1..=1)).collect();
        for kind in [ShiftKind::Integer, ShiftKind::Period] {
            let d = quasi_periodicity_defect(&z, ch, &arg, &m, kind, TOL).unwrap();
            assert!(d <= 2.0 * TOL, "case {case} {kind:?}: defect {d:e}");
        }
    }
}

#[test]
fn diagonal_period_factorizes() {
    let mut rng = ChaCha8Rng::seed_from_u64(32);
    for _ in 0..5 {
        let t1 = Complex::new(rng.random_range(-1.0..1.0), rng.random_range(0.6..2.0));
        let t2 = Complex::new(rng.random_range(-1.0..1.0), rng.random_range(0.6..2.0));
        let zero = Complex::new(0.0, 0.0);
        let z = SiegelPoint::new(CMat::from_row_slice(2, 2, &[t1, zero, zero, t2])).unwrap();
        let w = fixtures::random_complex_vector(&mut rng, 2, 0.2);
        for ch in Characteristic::all(2) {
            let (u, v) = (ch.u_bits(), ch.v_bits());
            let c1 = Characteristic::from_halves(&[i64::from(u[0])], &[i64::from(v[0])]).unwrap();
            let c2 = Characteristic::from_halves(&[i64::from(u[1])], &[i64::from(v[1])]).unwrap();
            let s1 = SiegelPoint::new(CMat::from_element(1, 1, t1)).unwrap();
            let s2 = SiegelPoint::new(CMat::from_element(1, 1, t2)).unwrap();
            let full = theta_eval(&z, &ch, &w, 1e-13).unwrap().value;
            let a = theta_eval(&s1, &c1, &w[..1], 1e-13).unwrap().value;
            let b = theta_eval(&s2, &c2, &w[1..], 1e-13).unwrap().value;
            assert!((full - a * b).norm() <= 1e-10, "{ch}");
        }
    }
}

#[test]
fn doubling_the_radius_changes_nothing() {
    let mut rng = ChaCha8Rng::seed_from_u64(33);
    for g in 1..=3 {
        for _ in 0..3 {
            let z = fixtures::random_siegel_in(&mut rng, g, 0.3, 5.0);
            let ch = Characteristic::zero(g);
            let w = fixtures::random_complex_vector(&mut rng, g, 0.2);
            let v = theta_eval(&z, &ch, &w, TOL).unwrap();
            let wide = theta_sum(&z, &ch, &w, 2.0 * v.radius).unwrap();
            assert!((v.value - wide.value).norm() < TOL);
            assert!(wide.terms > v.terms);
        }
    }
}

#[test]
fn odd_characteristics_vanish_at_origin() {
    let mut rng = ChaCha8Rng::seed_from_u64(34);
    for g in 1..=3 {
        let z = fixtures::random_siegel(&mut rng, g);
        for ch in Characteristic::all(g) {
            let v = theta_eval(&z, &ch, &origin(g), TOL).unwrap().value;
            if ch.parity() == Parity::Odd {
                assert!(v.norm() <= TOL, "{ch}");
            }
        }
    }
}

#[test]
fn evaluation_is_deterministic() {
    let mut rng = ChaCha8Rng::seed_from_u64(35);
    let z = fixtures::random_siegel(&mut rng, 2);
    let ch = Characteristic::parse("1/2,0:0,1/2").unwrap();
    let w = fixtures::random_complex_vector(&mut rng, 2, 0.3);
    let a = theta_eval(&z, &ch, &w, TOL).unwrap();
    let b = theta_eval(&z, &ch, &w, TOL).unwrap();
    assert_eq!(a.value.re.to_bits(), b.value.re.to_bits());
    assert_eq!(a.value.im.to_bits(), b.value.im.to_bits());
}

#[test]
fn random_multipliers_satisfy_the_cocycle_law() {
    let mut rng = ChaCha8Rng::seed_from_u64(36);
    let omega = IntegralSkewForm::standard(3);
    let eps: Vec<i8> = (0..6)
        .map(|_| if rng.random_bool(0.5) { -1 } else { 1 })
        .collect();
    let m = multiplier_from_basis(&eps, &omega).unwrap();
    for _ in 0..500 {
        let x: Vec<i64> = (0..6).map(|_| rng.random_range(-5..=5)).collect();
        let y: Vec<i64> = (0..6).map(|_| rng.random_range(-5..=5)).collect();
        assert!(m.cocycle_holds(&x, &y).unwrap());
    }
}
