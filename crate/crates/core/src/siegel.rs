//! Siegel upper half-space and its dictionary with complex structures tamed
//! by the standard symplectic form.
//!
//! The symplectic group acts by `<T> Z = (A + Z C)^{-1} (B + Z D)`. This is a
//! right action, `<T1 T2> Z = <T2> <T1> Z`, whose stabilizer at `i 1` is the
//! commutant of the standard `J`. It agrees with `(A + C Z)^{-1} (B + D Z)`
//! whenever `C = 0` or `g = 1`; for `g >= 2` the latter does not preserve
//! symmetry of `Z`.

use std::fmt;

use nalgebra::Complex;

use crate::error::{Error, Result};
use crate::forms::{induced_metric, is_coherent, tame, ComplexStructureOp, MetricForm, SkewForm};
use crate::linalg::{
    condition_number, condition_number_c, ensure_even, ensure_square, im, inverse, inverse_c,
    min_sym_eigenvalue, re, rel_diff, rel_diff_c, standard_j, symmetrize, to_complex, CMat, RMat,
    DEFAULT_TOL, MAX_CONDITION,
};

/// Complex symmetric `g x g` matrix with positive definite imaginary part.
#[derive(Debug, Clone, PartialEq)]
pub struct SiegelPoint {
    z: CMat,
}

impl SiegelPoint {
    pub fn new(z: CMat) -> Result<Self> {
        if z.nrows() != z.ncols() || z.nrows() == 0 {
            return Err(Error::Dimension(format!(
                "period matrix must be square and non-empty, got {}x{}",
                z.nrows(),
                z.ncols()
            )));
        }
        let res = (&z - z.transpose()).norm() / z.norm().max(1e-300);
        if res > DEFAULT_TOL {
            return Err(Error::NotSymmetric(res));
        }
        let z = (&z + z.transpose()) * Complex::new(0.5, 0.0);
        let lmin = min_sym_eigenvalue(&im(&z));
        if !(lmin > 0.0) {
            return Err(Error::NotPositiveDefinite(lmin));
        }
        Ok(Self { z })
    }

    pub fn from_parts(x: &RMat, y: &RMat) -> Result<Self> {
        if x.shape() != y.shape() {
            return Err(Error::Dimension(format!(
                "real part is {:?} but imaginary part is {:?}",
                x.shape(),
                y.shape()
            )));
        }
        Self::new(CMat::from_fn(x.nrows(), x.ncols(), |i, j| {
            Complex::new(x[(i, j)], y[(i, j)])
        }))
    }

    /// The base point `i 1`.
    pub fn base(g: usize) -> Self {
        Self {
            z: CMat::from_diagonal_element(g, g, Complex::new(0.0, 1.0)),
        }
    }

    pub fn g(&self) -> usize {
        self.z.nrows()
    }

    pub fn z(&self) -> &CMat {
        &self.z
    }

    pub fn re(&self) -> RMat {
        re(&self.z)
    }

    pub fn im(&self) -> RMat {
        im(&self.z)
    }
}

/// Real `2g x 2g` matrix with `T^T J T = J`.
#[derive(Debug, Clone, PartialEq)]
pub struct SymplecticMatrix {
    t: RMat,
}

impl SymplecticMatrix {
    pub fn new(t: RMat) -> Result<Self> {
        let n = ensure_square(&t, "symplectic matrix")?;
        let g = ensure_even(n, "symplectic matrix")?;
        let res = symplectic_residual(&t, g);
        if res > DEFAULT_TOL {
            return Err(Error::NotSymplectic(res));
        }
        Ok(Self { t })
    }

    pub fn identity(g: usize) -> Self {
        Self {
            t: RMat::identity(2 * g, 2 * g),
        }
    }

    pub fn g(&self) -> usize {
        self.t.nrows() / 2
    }

    pub fn matrix(&self) -> &RMat {
        &self.t
    }

    /// Blocks `(A, B, C, D)` of `T = [[A, B], [C, D]]`.
    pub fn blocks(&self) -> (RMat, RMat, RMat, RMat) {
        let g = self.g();
        (
            self.t.view((0, 0), (g, g)).into_owned(),
            self.t.view((0, g), (g, g)).into_owned(),
            self.t.view((g, 0), (g, g)).into_owned(),
            self.t.view((g, g), (g, g)).into_owned(),
        )
    }

    pub fn compose(&self, other: &Self) -> Result<Self> {
        Self::new(&self.t * &other.t)
    }
}

fn symplectic_residual(t: &RMat, g: usize) -> f64 {
    let j = standard_j(g);
    rel_diff(&(t.transpose() * &j * t), &j)
}

/// Frobenius residual test of `T^T J T = J` at the default tolerance.
pub fn is_symplectic(t: &RMat) -> bool {
    if t.nrows() != t.ncols() || t.nrows() == 0 || t.nrows() % 2 != 0 {
        return false;
    }
    symplectic_residual(t, t.nrows() / 2) <= DEFAULT_TOL
}

/// `<T> Z = (A + Z C)^{-1} (B + Z D)`.
pub fn moebius_act(t: &SymplecticMatrix, z: &SiegelPoint) -> Result<SiegelPoint> {
    if t.g() != z.g() {
        return Err(Error::Dimension(format!(
            "symplectic matrix acts on genus {} but point has genus {}",
            t.g(),
            z.g()
        )));
    }
    let (a, b, c, d) = t.blocks();
    let zm = z.z();
    let lhs = to_complex(&a) + zm * to_complex(&c);
    let cond = condition_number_c(&lhs);
    if !(cond <= MAX_CONDITION) {
        return Err(Error::Singular(format!(
            "A + ZC is singular (condition number {cond:.3e})"
        )));
    }
    let rhs = to_complex(&b) + zm * to_complex(&d);
    let image = inverse_c(&lhs, "A + ZC")? * rhs;
    SiegelPoint::new(image)
        .map_err(|e| Error::Postcondition(format!("Moebius image left the Siegel space: {e}")))
}

/// The frame `T = [[Y^{-1/2}, Y^{-1/2} X], [0, Y^{1/2}]]` with `<T> i1 = Z`.
pub fn siegel_frame(z: &SiegelPoint) -> Result<SymplecticMatrix> {
    let g = z.g();
    let x = z.re();
    let y = z.im();
    let cond = condition_number(&y);
    if !(cond <= MAX_CONDITION) {
        return Err(Error::Degenerate(cond));
    }
    let eig = nalgebra::SymmetricEigen::new(symmetrize(&y));
    let v = &eig.eigenvectors;
    let sqrt = eig.eigenvalues.map(f64::sqrt);
    let y_half = symmetrize(&(v * RMat::from_diagonal(&sqrt) * v.transpose()));
    let y_mhalf = symmetrize(&(v * RMat::from_diagonal(&sqrt.map(|s| 1.0 / s)) * v.transpose()));
    let mut t = RMat::zeros(2 * g, 2 * g);
    t.view_mut((0, 0), (g, g)).copy_from(&y_mhalf);
    t.view_mut((0, g), (g, g)).copy_from(&(&y_mhalf * &x));
    t.view_mut((g, g), (g, g)).copy_from(&y_half);
    SymplecticMatrix::new(t)
}

/// `(J, b) = (T^{-1} J T, T^T T)` for the frame of `Z`.
///
/// Explicitly, `J = [[X Y^-1, Y + X Y^-1 X], [-Y^-1, -Y^-1 X]]` and
/// `b = [[Y^-1, Y^-1 X], [X Y^-1, X Y^-1 X + Y]]`.
pub fn siegel_to_structure(z: &SiegelPoint) -> Result<(ComplexStructureOp, MetricForm)> {
    let frame = siegel_frame(z)?;
    let t = frame.matrix();
    let t_inv = inverse(t, "Siegel frame")?;
    let j = ComplexStructureOp::new(&t_inv * standard_j(z.g()) * t)?;
    let b = MetricForm::new(t.transpose() * t)?;
    let w0 = SkewForm::standard(z.g());
    let induced = induced_metric(&w0, &j)?;
    let res = rel_diff(induced.gram(), b.gram());
    if res > 1e-8 {
        return Err(Error::Postcondition(format!(
            "frame metric is not the induced metric (residual {res:.3e})"
        )));
    }
    Ok((j, b))
}

/// Period point of a complex structure tamed by the standard form.
///
/// Builds a symplectic basis `e_1..e_g, f_1..f_g` that is orthonormal for
/// `w0(x, Jy)` by symplectic Gram-Schmidt with `f_k = -J e_k`, and moves
/// `i 1` by the inverse of that basis.
pub fn structure_to_siegel(j: &ComplexStructureOp) -> Result<SiegelPoint> {
    let n = j.dim();
    let g = ensure_even(n, "complex structure")?;
    let w0 = SkewForm::standard(g);
    let metric = induced_metric(&w0, j)?;
    let gram = metric.gram();
    let jm = j.matrix();
    let inner =
        |x: &nalgebra::DVector<f64>, y: &nalgebra::DVector<f64>| (x.transpose() * gram * y)[(0, 0)];

    let mut es: Vec<nalgebra::DVector<f64>> = Vec::with_capacity(g);
    let mut fs: Vec<nalgebra::DVector<f64>> = Vec::with_capacity(g);
    for _ in 0..g {
        // Pick the coordinate vector with the largest component outside the
        // current span to keep the elimination well conditioned.
        let mut best: Option<(f64, nalgebra::DVector<f64>)> = None;
        for c in 0..n {
            let mut v = nalgebra::DVector::zeros(n);
            v[c] = 1.0;
            for _ in 0..2 {
                for u in es.iter().chain(fs.iter()) {
                    let p = inner(u, &v);
                    v -= u * p;
                }
            }
            let norm = inner(&v, &v).max(0.0).sqrt();
            if best.as_ref().map_or(true, |(b, _)| norm > *b) {
                best = Some((norm, v));
            }
        }
        let (norm, v) = best.expect("non-empty candidate set");
        if norm <= 1e-12 {
            return Err(Error::Postcondition(
                "symplectic Gram-Schmidt ran out of directions".into(),
            ));
        }
        let e = v / norm;
        let f = -(jm * &e);
        es.push(e);
        fs.push(f);
    }
    let mut p = RMat::zeros(n, n);
    for k in 0..g {
        p.set_column(k, &es[k]);
        p.set_column(g + k, &fs[k]);
    }
    let t = SymplecticMatrix::new(inverse(&p, "symplectic basis")?)
        .map_err(|e| Error::Postcondition(format!("Gram-Schmidt basis is not symplectic: {e}")))?;
    moebius_act(&t, &SiegelPoint::base(g))
}

/// Period point of `b` relative to the standard symplectic form.
///
/// `siegel_to_structure` of the result returns `tame(b, w0)`; the metric
/// itself round-trips only when `(b, w0)` is coherent with scale one.
pub fn pair_to_siegel(b: &MetricForm) -> Result<SiegelPoint> {
    let g = ensure_even(b.dim(), "metric")?;
    let j = tame(b, &SkewForm::standard(g))?;
    structure_to_siegel(&j)
}

/// Comparison of the block matrices as commonly printed against direct
/// evaluation of `T^{-1} J T` and `T^T T`.
#[derive(Debug, Clone, PartialEq)]
pub struct DictionaryReport {
    pub g: usize,
    /// `||J_printed - J_direct|| / ||J_direct||`.
    pub printed_j_residual: f64,
    /// Same, after flipping the global sign of the printed `J`.
    pub negated_printed_j_residual: f64,
    /// `||b_printed - b_direct|| / ||b_direct||` with `Y` in the top-left block.
    pub printed_b_residual: f64,
    /// Same with `Y^{-1}` in the top-left block.
    pub corrected_b_residual: f64,
    /// Whether the printed `J` tames the standard form.
    pub printed_j_tames: bool,
    /// Whether the direct `J` tames the standard form with `b` coherent at scale one.
    pub direct_j_tames: bool,
}

impl DictionaryReport {
    pub fn sign_discrepancy(&self) -> bool {
        self.printed_j_residual > 1e-8 && self.negated_printed_j_residual <= 1e-8
    }

    pub fn inverse_discrepancy(&self) -> bool {
        self.printed_b_residual > 1e-8 && self.corrected_b_residual <= 1e-8
    }
}

impl fmt::Display for DictionaryReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Siegel dictionary check (g = {})", self.g)?;
        writeln!(
            f,
            "  J printed [[-XY^-1, -Y-XY^-1X], [Y^-1, Y^-1X]]: residual {:.3e}, negated {:.3e}",
            self.printed_j_residual, self.negated_printed_j_residual
        )?;
        writeln!(
            f,
            "  b printed [[Y, Y^-1X], [XY^-1, XY^-1X+Y]]: residual {:.3e}; with Y^-1 top-left {:.3e}",
            self.printed_b_residual, self.corrected_b_residual
        )?;
        writeln!(
            f,
            "  printed J tames w0: {}; direct J tames w0: {}",
            self.printed_j_tames, self.direct_j_tames
        )?;
        writeln!(
            f,
            "  verdict: global sign of J {}; top-left block of b {}",
            if self.sign_discrepancy() {
                "flipped"
            } else {
                "consistent"
            },
            if self.inverse_discrepancy() {
                "should be Y^-1"
            } else {
                "consistent"
            }
        )
    }
}

pub fn dictionary_report(z: &SiegelPoint) -> Result<DictionaryReport> {
    let g = z.g();
    let x = z.re();
    let y = z.im();
    let yi = inverse(&y, "Im Z")?;
    let (j, b) = siegel_to_structure(z)?;

    let assemble = |tl: &RMat, tr: &RMat, bl: &RMat, br: &RMat| {
        let mut m = RMat::zeros(2 * g, 2 * g);
        m.view_mut((0, 0), (g, g)).copy_from(tl);
        m.view_mut((0, g), (g, g)).copy_from(tr);
        m.view_mut((g, 0), (g, g)).copy_from(bl);
        m.view_mut((g, g), (g, g)).copy_from(br);
        m
    };
    let printed_j = assemble(&(-(&x * &yi)), &(-(&y + &x * &yi * &x)), &yi, &(&yi * &x));
    let xyx_y = &x * &yi * &x + &y;
    let printed_b = assemble(&y, &(&yi * &x), &(&x * &yi), &xyx_y);
    let corrected_b = assemble(&yi, &(&yi * &x), &(&x * &yi), &xyx_y);

    let w0 = SkewForm::standard(g);
    let printed_j_tames = ComplexStructureOp::new(printed_j.clone())
        .and_then(|pj| induced_metric(&w0, &pj))
        .is_ok();
    let direct_j_tames = induced_metric(&w0, &j).is_ok()
        && is_coherent(&b, &w0, 1e-9).is_some_and(|l| (l - 1.0).abs() < 1e-9);

    Ok(DictionaryReport {
        g,
        printed_j_residual: rel_diff(&printed_j, j.matrix()),
        negated_printed_j_residual: rel_diff(&(-&printed_j), j.matrix()),
        printed_b_residual: rel_diff(&printed_b, b.gram()),
        corrected_b_residual: rel_diff(&corrected_b, b.gram()),
        printed_j_tames,
        direct_j_tames,
    })
}

/// `||Z1 - Z2|| / ||Z2||`.
pub fn distance(z1: &SiegelPoint, z2: &SiegelPoint) -> f64 {
    rel_diff_c(z1.z(), z2.z())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex<f64> {
        Complex::new(re, im)
    }

    #[test]
    fn identity_action_is_exact() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let z = fixtures::random_siegel(&mut rng, 3);
        let w = moebius_act(&SymplecticMatrix::identity(3), &z).unwrap();
        assert_eq!(w, z);
    }

    #[test]
    fn scalar_inversion() {
        // [[0,1],[-1,0]] sends z to (0 - z)^{-1}(1 + 0) = -1/z.
        let t = SymplecticMatrix::new(RMat::from_row_slice(2, 2, &[0.0, 1.0, -1.0, 0.0])).unwrap();
        let z = SiegelPoint::new(CMat::from_element(1, 1, c(0.5, 2.0))).unwrap();
        let w = moebius_act(&t, &z).unwrap();
        let expected = -c(1.0, 0.0) / c(0.5, 2.0);
        assert!((w.z()[(0, 0)] - expected).norm() < 1e-15);
        assert!(w.z()[(0, 0)].im > 0.0);
    }

    #[test]
    fn frame_moves_base_point() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for g in 1..=4 {
            let z = fixtures::random_siegel(&mut rng, g);
            let frame = siegel_frame(&z).unwrap();
            let w = moebius_act(&frame, &SiegelPoint::base(g)).unwrap();
            assert!(distance(&w, &z) < 1e-12);
        }
    }

    #[test]
    fn action_is_a_right_action() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for g in 1..=3 {
            let t1 = SymplecticMatrix::new(fixtures::random_symplectic(&mut rng, g)).unwrap();
            let t2 = SymplecticMatrix::new(fixtures::random_symplectic(&mut rng, g)).unwrap();
            let z = fixtures::random_siegel(&mut rng, g);
            let composed = moebius_act(&t1.compose(&t2).unwrap(), &z).unwrap();
            let stepwise = moebius_act(&t2, &moebius_act(&t1, &z).unwrap()).unwrap();
            assert!(distance(&composed, &stepwise) < 1e-10);
        }
    }

    #[test]
    fn action_with_left_blocks_breaks_symmetry() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let t = SymplecticMatrix::new(fixtures::random_symplectic(&mut rng, 2)).unwrap();
        let z = fixtures::random_siegel(&mut rng, 2);
        let (a, b, cc, d) = t.blocks();
        let lhs = to_complex(&a) + to_complex(&cc) * z.z();
        let rhs = to_complex(&b) + to_complex(&d) * z.z();
        let w = lhs.try_inverse().unwrap() * rhs;
        assert!((&w - w.transpose()).norm() > 1e-6);
    }

    #[test]
    fn base_point_structure() {
        for g in 1..=3 {
            let (j, b) = siegel_to_structure(&SiegelPoint::base(g)).unwrap();
            assert!(rel_diff(j.matrix(), &standard_j(g)) < 1e-12);
            assert!(rel_diff(b.gram(), &RMat::identity(2 * g, 2 * g)) < 1e-12);
        }
    }

    #[test]
    fn genus_one_closed_form() {
        let (x, y) = (0.7, 1.9);
        let z = SiegelPoint::new(CMat::from_element(1, 1, c(x, y))).unwrap();
        let (j, b) = siegel_to_structure(&z).unwrap();
        let expected = RMat::from_row_slice(2, 2, &[x / y, y + x * x / y, -1.0 / y, -x / y]);
        assert!(rel_diff(j.matrix(), &expected) < 1e-14);
        let expected_b = RMat::from_row_slice(2, 2, &[1.0 / y, x / y, x / y, x * x / y + y]);
        assert!(rel_diff(b.gram(), &expected_b) < 1e-14);
    }

    #[test]
    fn metric_matches_independent_product() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let z = fixtures::random_siegel(&mut rng, 3);
        let (_, b) = siegel_to_structure(&z).unwrap();
        let t = siegel_frame(&z).unwrap();
        let mut direct = RMat::zeros(6, 6);
        for i in 0..6 {
            for k in 0..6 {
                direct[(i, k)] = (0..6)
                    .map(|r| t.matrix()[(r, i)] * t.matrix()[(r, k)])
                    .sum();
            }
        }
        assert!(rel_diff(b.gram(), &direct) < 1e-10);
    }

    #[test]
    fn pair_to_siegel_base_and_round_trip() {
        let z = pair_to_siegel(&MetricForm::identity(4)).unwrap();
        assert!(distance(&z, &SiegelPoint::base(2)) < 1e-12);
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for g in 1..=4 {
            let z0 = fixtures::random_siegel(&mut rng, g);
            let (j0, b0) = siegel_to_structure(&z0).unwrap();
            let z1 = pair_to_siegel(&b0).unwrap();
            let (j1, _) = siegel_to_structure(&z1).unwrap();
            assert!(rel_diff(j1.matrix(), j0.matrix()) < 1e-8);
        }
    }

    #[test]
    fn non_coherent_metric_only_round_trips_j() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let b = fixtures::random_metric(&mut rng, 4);
        let z = pair_to_siegel(&b).unwrap();
        let (j, bz) = siegel_to_structure(&z).unwrap();
        let jb = tame(&b, &SkewForm::standard(2)).unwrap();
        assert!(rel_diff(j.matrix(), jb.matrix()) < 1e-8);
        assert!(rel_diff(bz.gram(), b.gram()) > 1e-3);
    }

    #[test]
    fn is_symplectic_cases() {
        assert!(is_symplectic(&RMat::identity(4, 4)));
        assert!(is_symplectic(&standard_j(2)));
        let mut d = RMat::identity(4, 4);
        d[(0, 0)] = 2.0;
        assert!(!is_symplectic(&d));
        assert!(!is_symplectic(&RMat::identity(3, 3)));
    }

    #[test]
    fn report_flags_both_discrepancies() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let z = fixtures::random_siegel(&mut rng, 2);
        let rep = dictionary_report(&z).unwrap();
        assert!(rep.sign_discrepancy());
        assert!(rep.inverse_discrepancy());
        assert!(rep.direct_j_tames);
        assert!(!rep.printed_j_tames);
    }

    #[test]
    fn rejects_invalid_points() {
        let bad = CMat::from_row_slice(2, 2, &[c(0.0, 1.0), c(1.0, 0.0), c(0.0, 0.0), c(0.0, 1.0)]);
        assert!(matches!(SiegelPoint::new(bad), Err(Error::NotSymmetric(_))));
        let neg = CMat::from_element(1, 1, c(0.0, -1.0));
        assert!(matches!(
            SiegelPoint::new(neg),
            Err(Error::NotPositiveDefinite(_))
        ));
    }
}
