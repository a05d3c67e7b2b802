//! Metrics, symplectic forms and the complex structure they determine.
//!
//! Matrix conventions: a metric `b` and a skew form `w` on `R^{2n}` are
//! stored as Gram matrices with `b(x, y) = x^T G y` and `w(x, y) = x^T W y`.
//! The operator `A` defined by `w(x, y) = b(Ax, y)` is then `A = -G^{-1} W`,
//! and the taming complex structure is the orthogonal factor of the
//! `b`-polar decomposition `A = Q J`.

use nalgebra::{Complex, SymmetricEigen};

use crate::error::{Error, Result};
use crate::linalg::{
    antisymmetric_residual, condition_number, ensure_even, ensure_square, min_sym_eigenvalue,
    rel_diff, standard_skew_gram, symmetric_residual, symmetrize, CMat, RMat, DEFAULT_TOL,
    MAX_CONDITION,
};

/// Positive definite symmetric bilinear form.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricForm {
    gram: RMat,
}

impl MetricForm {
    pub fn new(gram: RMat) -> Result<Self> {
        ensure_square(&gram, "metric Gram matrix")?;
        let res = symmetric_residual(&gram);
        if res > DEFAULT_TOL {
            return Err(Error::NotSymmetric(res));
        }
        let gram = symmetrize(&gram);
        let lmin = min_sym_eigenvalue(&gram);
        if lmin <= 0.0 || gram.clone().cholesky().is_none() {
            return Err(Error::NotPositiveDefinite(lmin));
        }
        Ok(Self { gram })
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            gram: RMat::identity(dim, dim),
        }
    }

    pub fn gram(&self) -> &RMat {
        &self.gram
    }

    pub fn into_gram(self) -> RMat {
        self.gram
    }

    pub fn dim(&self) -> usize {
        self.gram.nrows()
    }

    pub fn eval(&self, x: &[f64], y: &[f64]) -> f64 {
        bilinear(&self.gram, x, y)
    }

    pub fn scaled(&self, factor: f64) -> Result<Self> {
        Self::new(&self.gram * factor)
    }
}

/// Nondegenerate antisymmetric bilinear form.
#[derive(Debug, Clone, PartialEq)]
pub struct SkewForm {
    gram: RMat,
}

impl SkewForm {
    /// Rejects forms whose condition number exceeds `1e10`; nothing is
    /// regularized.
    pub fn new(gram: RMat) -> Result<Self> {
        let n = ensure_square(&gram, "skew Gram matrix")?;
        ensure_even(n, "skew Gram matrix")?;
        let res = antisymmetric_residual(&gram);
        if res > DEFAULT_TOL {
            return Err(Error::NotAntisymmetric(res));
        }
        let gram = (&gram - gram.transpose()) * 0.5;
        let cond = condition_number(&gram);
        if !(cond <= MAX_CONDITION) {
            return Err(Error::Degenerate(cond));
        }
        Ok(Self { gram })
    }

    /// `w0(x, y) = y^T J x` on `R^{2n}`.
    pub fn standard(n: usize) -> Self {
        Self {
            gram: standard_skew_gram(n),
        }
    }

    pub fn gram(&self) -> &RMat {
        &self.gram
    }

    pub fn dim(&self) -> usize {
        self.gram.nrows()
    }

    pub fn eval(&self, x: &[f64], y: &[f64]) -> f64 {
        bilinear(&self.gram, x, y)
    }

    pub fn scaled(&self, factor: f64) -> Result<Self> {
        Self::new(&self.gram * factor)
    }

    pub fn negated(&self) -> Self {
        Self { gram: -&self.gram }
    }
}

/// Linear operator with `J^2 = -I`.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexStructureOp {
    matrix: RMat,
}

impl ComplexStructureOp {
    pub fn new(matrix: RMat) -> Result<Self> {
        let n = ensure_square(&matrix, "complex structure")?;
        ensure_even(n, "complex structure")?;
        let id = RMat::identity(n, n);
        let res = rel_diff(&(&matrix * &matrix), &(-&id));
        if res > DEFAULT_TOL {
            return Err(Error::NotComplexStructure(res));
        }
        Ok(Self { matrix })
    }

    pub fn standard(n: usize) -> Self {
        Self {
            matrix: crate::linalg::standard_j(n),
        }
    }

    pub fn matrix(&self) -> &RMat {
        &self.matrix
    }

    pub fn into_matrix(self) -> RMat {
        self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn negated(&self) -> Self {
        Self {
            matrix: -&self.matrix,
        }
    }
}

/// The operator `A` with `w(x, y) = b(Ax, y)`.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorA {
    matrix: RMat,
}

impl OperatorA {
    pub fn matrix(&self) -> &RMat {
        &self.matrix
    }

    /// `||A^T G + G A|| / ||G A||`, zero for a `b`-skew-adjoint operator.
    pub fn skew_adjoint_residual(&self, b: &MetricForm) -> f64 {
        let ga = b.gram() * &self.matrix;
        (ga.transpose() + &ga).norm() / ga.norm().max(1e-300)
    }
}

/// A metric and skew form with `b = scale * b_{w,J}` for the taming `J`.
#[derive(Debug, Clone, PartialEq)]
pub struct CoherentPair {
    pub metric: MetricForm,
    pub skew: SkewForm,
    pub scale: f64,
    pub structure: ComplexStructureOp,
}

impl CoherentPair {
    pub fn try_new(metric: MetricForm, skew: SkewForm, tol: f64) -> Option<Self> {
        let scale = is_coherent(&metric, &skew, tol)?;
        let structure = tame(&metric, &skew).ok()?;
        Some(Self {
            metric,
            skew,
            scale,
            structure,
        })
    }
}

fn bilinear(gram: &RMat, x: &[f64], y: &[f64]) -> f64 {
    let n = gram.nrows();
    assert!(
        x.len() == n && y.len() == n,
        "vector length must match form"
    );
    let mut acc = 0.0;
    for i in 0..n {
        for j in 0..n {
            acc += x[i] * gram[(i, j)] * y[j];
        }
    }
    acc
}

fn check_same_dim(b: &MetricForm, w: &SkewForm) -> Result<usize> {
    if b.dim() != w.dim() {
        return Err(Error::Dimension(format!(
            "metric has size {} but skew form has size {}",
            b.dim(),
            w.dim()
        )));
    }
    ensure_even(b.dim(), "metric")?;
    Ok(b.dim())
}

/// Solves `w(x, y) = b(Ax, y)` for `A`.
pub fn operator_a(b: &MetricForm, w: &SkewForm) -> Result<OperatorA> {
    check_same_dim(b, w)?;
    let chol = b
        .gram()
        .clone()
        .cholesky()
        .ok_or(Error::NotPositiveDefinite(min_sym_eigenvalue(b.gram())))?;
    let a = -chol.solve(w.gram());
    let res = rel_diff(&(a.transpose() * b.gram()), w.gram());
    if res > DEFAULT_TOL {
        return Err(Error::Postcondition(format!(
            "defining identity w(x,y) = b(Ax,y) violated (residual {res:.3e})"
        )));
    }
    Ok(OperatorA { matrix: a })
}

struct SpdRoots {
    root: RMat,
    inv_root: RMat,
}

fn spd_roots(p: &RMat) -> Result<SpdRoots> {
    ensure_square(p, "SPD matrix")?;
    let res = symmetric_residual(p);
    if res > DEFAULT_TOL {
        return Err(Error::NotSymmetric(res));
    }
    let eig = SymmetricEigen::new(symmetrize(p));
    let lmax = eig
        .eigenvalues
        .iter()
        .cloned()
        .fold(f64::NEG_INFINITY, f64::max);
    let lmin = eig
        .eigenvalues
        .iter()
        .cloned()
        .fold(f64::INFINITY, f64::min);
    if !(lmax > 0.0) || lmin <= 1e-12 * lmax {
        return Err(Error::NotPositiveDefinite(lmin));
    }
    let v = &eig.eigenvectors;
    let sqrt = eig.eigenvalues.map(f64::sqrt);
    let root = v * RMat::from_diagonal(&sqrt) * v.transpose();
    let inv_root = v * RMat::from_diagonal(&sqrt.map(|s| 1.0 / s)) * v.transpose();
    Ok(SpdRoots {
        root: symmetrize(&root),
        inv_root: symmetrize(&inv_root),
    })
}

/// The unique symmetric positive definite square root.
///
/// Inputs whose smallest eigenvalue is at most `1e-12` times the largest are
/// rejected.
pub fn spd_sqrt(p: &RMat) -> Result<RMat> {
    spd_roots(p).map(|r| r.root)
}

/// The unique complex structure that is `b`-orthogonal, `w`-symplectic and
/// makes `w(x, Jy)` positive definite.
pub fn tame(b: &MetricForm, w: &SkewForm) -> Result<ComplexStructureOp> {
    tame_with_tol(b, w, DEFAULT_TOL)
}

pub fn tame_with_tol(b: &MetricForm, w: &SkewForm, tol: f64) -> Result<ComplexStructureOp> {
    let n = check_same_dim(b, w)?;
    // Work in b-orthonormal coordinates: with S = G^{1/2}, the conjugate
    // S A S^{-1} = -S^{-1} W S^{-1} is antisymmetric, and the b-polar
    // decomposition becomes the ordinary one.
    let s = spd_roots(b.gram())?;
    let a_tilde = -(&s.inv_root * w.gram() * &s.inv_root);
    let p_tilde = a_tilde.transpose() * &a_tilde;
    let q = spd_roots(&p_tilde)?;
    let j_tilde = &q.inv_root * &a_tilde;
    let j = &s.inv_root * &j_tilde * &s.root;

    // A and Q = P^{1/2} must commute; asserted, not assumed.
    let comm = &a_tilde * &q.root - &q.root * &a_tilde;
    let comm_res = comm.norm() / (a_tilde.norm() * q.root.norm()).max(1e-300);
    if comm_res > tol {
        return Err(Error::Postcondition(format!(
            "A and its polar modulus do not commute (residual {comm_res:.3e})"
        )));
    }

    let id = RMat::identity(n, n);
    let checks = [
        ("J^2 = -I", rel_diff(&(&j * &j), &(-&id))),
        (
            "b(Jx, Jy) = b(x, y)",
            rel_diff(&(j.transpose() * b.gram() * &j), b.gram()),
        ),
        (
            "w(Jx, Jy) = w(x, y)",
            rel_diff(&(j.transpose() * w.gram() * &j), w.gram()),
        ),
    ];
    for (name, res) in checks {
        if !(res <= tol) {
            return Err(Error::Postcondition(format!(
                "{name} violated (residual {res:.3e})"
            )));
        }
    }
    let induced = w.gram() * &j;
    let lmin = min_sym_eigenvalue(&induced);
    if !(lmin > 0.0) || symmetric_residual(&induced) > tol {
        return Err(Error::Postcondition(format!(
            "induced metric not positive definite (smallest eigenvalue {lmin:.3e})"
        )));
    }
    Ok(ComplexStructureOp { matrix: j })
}

/// Gram matrix of `(x, y) -> w(x, Jy)`.
pub fn induced_metric(w: &SkewForm, j: &ComplexStructureOp) -> Result<MetricForm> {
    if w.dim() != j.dim() {
        return Err(Error::Dimension(format!(
            "skew form has size {} but complex structure has size {}",
            w.dim(),
            j.dim()
        )));
    }
    let res = rel_diff(&(j.matrix().transpose() * w.gram() * j.matrix()), w.gram());
    if res > DEFAULT_TOL {
        return Err(Error::NotTamed(format!(
            "w(Jx, Jy) != w(x, y) (residual {res:.3e})"
        )));
    }
    let m = w.gram() * j.matrix();
    let sres = symmetric_residual(&m);
    if sres > DEFAULT_TOL {
        return Err(Error::NotTamed(format!(
            "w(x, Jy) is not symmetric (residual {sres:.3e})"
        )));
    }
    MetricForm::new(m).map_err(|e| match e {
        Error::NotPositiveDefinite(l) => Error::NotTamed(format!(
            "w(x, Jx) is not positive (smallest eigenvalue {l:.3e})"
        )),
        other => other,
    })
}

/// Gram matrix of `h(x, y) = w(x, Jy) + i w(x, y)`.
///
/// `h` is conjugate-linear in the first slot and complex-linear in the
/// second: `h(x, Jy) = i h(x, y)` and `h(Jx, y) = -i h(x, y)`.
pub fn hermitian_form(w: &SkewForm, j: &ComplexStructureOp) -> Result<CMat> {
    let metric = induced_metric(w, j)?;
    let n = w.dim();
    Ok(CMat::from_fn(n, n, |r, c| {
        Complex::new(metric.gram()[(r, c)], w.gram()[(r, c)])
    }))
}

/// Returns the scale `λ > 0` with `b = λ b_{w,J}` when one exists within `tol`.
///
/// `λ` is the median of entrywise ratios over entries of the induced metric
/// above a magnitude floor; the full residual is then checked.
pub fn is_coherent(b: &MetricForm, w: &SkewForm, tol: f64) -> Option<f64> {
    let j = tame(b, w).ok()?;
    let induced = w.gram() * j.matrix();
    let max = induced.amax();
    let floor = 1e-8 * max;
    let mut ratios: Vec<f64> = induced
        .iter()
        .zip(b.gram().iter())
        .filter(|(d, _)| d.abs() > floor)
        .map(|(d, g)| g / d)
        .collect();
    if ratios.is_empty() {
        return None;
    }
    ratios.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mid = ratios.len() / 2;
    let lambda = if ratios.len() % 2 == 1 {
        ratios[mid]
    } else {
        0.5 * (ratios[mid - 1] + ratios[mid])
    };
    if !(lambda > 0.0) {
        return None;
    }
    let res = rel_diff(&(induced * lambda), b.gram());
    (res <= tol).then_some(lambda)
}

/// Pulls back both forms along `gamma`: `b_γ(x, y) = b(γx, γy)`.
pub fn group_act(gamma: &RMat, b: &MetricForm, w: &SkewForm) -> Result<(MetricForm, SkewForm)> {
    let n = check_same_dim(b, w)?;
    if gamma.nrows() != n || gamma.ncols() != n {
        return Err(Error::Dimension(format!(
            "transformation must be {n}x{n}, got {}x{}",
            gamma.nrows(),
            gamma.ncols()
        )));
    }
    let det = gamma.determinant();
    if !(det > 0.0) || condition_number(gamma) > MAX_CONDITION {
        return Err(Error::NotOrientationPreserving(det));
    }
    let bg = MetricForm::new(gamma.transpose() * b.gram() * gamma)?;
    let wg = SkewForm::new(gamma.transpose() * w.gram() * gamma)?;
    Ok((bg, wg))
}

/// True iff both metrics retract to the same complex structure for `w`.
pub fn same_fiber(b: &MetricForm, other: &MetricForm, w: &SkewForm, tol: f64) -> bool {
    match (tame(b, w), tame(other, w)) {
        (Ok(j1), Ok(j2)) => rel_diff(j1.matrix(), j2.matrix()) <= tol,
        _ => false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::linalg::standard_j;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn rng() -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(0x5eed)
    }

    #[test]
    fn operator_a_identity_metric_is_j() {
        let a = operator_a(&MetricForm::identity(2), &SkewForm::standard(1)).unwrap();
        assert_eq!(a.matrix(), &standard_j(1));
    }

    #[test]
    fn operator_a_scaled_metric() {
        // w0(x,y) = x1 y2 ... solved by hand: A = G^{-1} J = J / 2.
        let b = MetricForm::new(RMat::from_diagonal_element(2, 2, 2.0)).unwrap();
        let a = operator_a(&b, &SkewForm::standard(1)).unwrap();
        assert!(rel_diff(a.matrix(), &(standard_j(1) * 0.5)) < 1e-15);
    }

    #[test]
    fn operator_a_defining_identity_random() {
        let mut r = rng();
        let b = fixtures::random_metric(&mut r, 6);
        let w = fixtures::random_skew(&mut r, 6);
        let a = operator_a(&b, &w).unwrap();
        for i in 0..6 {
            for k in 0..6 {
                let mut x = [0.0; 6];
                let mut y = [0.0; 6];
                x[i] = 1.0;
                y[k] = 1.0;
                let ax: Vec<f64> = (a.matrix() * nalgebra::DVector::from_row_slice(&x))
                    .iter()
                    .copied()
                    .collect();
                assert!((w.eval(&x, &y) - b.eval(&ax, &y)).abs() < 1e-12);
            }
        }
        assert!(a.skew_adjoint_residual(&b) < 1e-12);
    }

    #[test]
    fn operator_a_dimension_mismatch() {
        let err = operator_a(&MetricForm::identity(4), &SkewForm::standard(1)).unwrap_err();
        assert!(matches!(err, Error::Dimension(_)));
    }

    #[test]
    fn spd_sqrt_cases() {
        assert_eq!(
            spd_sqrt(&RMat::identity(3, 3)).unwrap(),
            RMat::identity(3, 3)
        );
        let d = spd_sqrt(&RMat::from_diagonal(&nalgebra::DVector::from_vec(vec![
            4.0, 9.0,
        ])))
        .unwrap();
        assert!(
            rel_diff(
                &d,
                &RMat::from_diagonal(&nalgebra::DVector::from_vec(vec![2.0, 3.0]))
            ) < 1e-15
        );
        let mut r = rng();
        let p = fixtures::random_metric(&mut r, 10).into_gram();
        let q = spd_sqrt(&p).unwrap();
        assert!(rel_diff(&(&q * &q), &p) < 1e-10);
        assert!(min_sym_eigenvalue(&q) > 0.0);
    }

    #[test]
    fn spd_sqrt_rejects_indefinite() {
        let p = RMat::from_diagonal(&nalgebra::DVector::from_vec(vec![1.0, -1.0]));
        assert!(matches!(spd_sqrt(&p), Err(Error::NotPositiveDefinite(_))));
        let p = RMat::from_diagonal(&nalgebra::DVector::from_vec(vec![1.0, 1e-14]));
        assert!(matches!(spd_sqrt(&p), Err(Error::NotPositiveDefinite(_))));
    }

    #[test]
    fn tame_standard_pair_is_standard_j() {
        for n in 1..4 {
            let j = tame(&MetricForm::identity(2 * n), &SkewForm::standard(n)).unwrap();
            assert!(rel_diff(j.matrix(), &standard_j(n)) < 1e-15);
        }
    }

    #[test]
    fn tame_sign_and_scaling() {
        let mut r = rng();
        for dim in [2, 4, 6] {
            let b = fixtures::random_metric(&mut r, dim);
            let w = fixtures::random_skew(&mut r, dim);
            let j = tame(&b, &w).unwrap();
            let j_scaled = tame(&b.scaled(3.7).unwrap(), &w.scaled(0.2).unwrap()).unwrap();
            assert!(rel_diff(j_scaled.matrix(), j.matrix()) < 1e-12);
            let j_neg = tame(&b, &w.negated()).unwrap();
            assert!(rel_diff(j_neg.matrix(), &(-j.matrix())) < 1e-12);
        }
    }

    #[test]
    fn skew_form_rejects_degenerate() {
        let w = RMat::from_row_slice(2, 2, &[0.0, 1e-13, -1e-13, 0.0]);
        assert!(SkewForm::new(w).is_ok(), "scale alone is not degeneracy");
        let mut w = RMat::zeros(4, 4);
        w[(0, 1)] = 1.0;
        w[(1, 0)] = -1.0;
        w[(2, 3)] = 1e-12;
        w[(3, 2)] = -1e-12;
        assert!(matches!(SkewForm::new(w), Err(Error::Degenerate(_))));
        assert!(matches!(
            SkewForm::new(RMat::identity(2, 2)),
            Err(Error::NotAntisymmetric(_))
        ));
    }

    #[test]
    fn induced_metric_cases() {
        let m = induced_metric(&SkewForm::standard(2), &ComplexStructureOp::standard(2)).unwrap();
        assert_eq!(m.gram(), &RMat::identity(4, 4));
        let err = induced_metric(
            &SkewForm::standard(1),
            &ComplexStructureOp::standard(1).negated(),
        )
        .unwrap_err();
        assert!(matches!(err, Error::NotTamed(_)));
    }

    #[test]
    fn induced_metric_matches_direct_assembly() {
        let mut r = rng();
        let b = fixtures::random_metric(&mut r, 6);
        let w = fixtures::random_skew(&mut r, 6);
        let j = tame(&b, &w).unwrap();
        let m = induced_metric(&w, &j).unwrap();
        let mut direct = RMat::zeros(6, 6);
        for i in 0..6 {
            for k in 0..6 {
                let mut x = vec![0.0; 6];
                x[i] = 1.0;
                let jy: Vec<f64> = j.matrix().column(k).iter().copied().collect();
                direct[(i, k)] = w.eval(&x, &jy);
            }
        }
        assert!(rel_diff(m.gram(), &direct) < 1e-12);
    }

    #[test]
    fn hermitian_form_standard() {
        let h = hermitian_form(&SkewForm::standard(1), &ComplexStructureOp::standard(1)).unwrap();
        assert_eq!(crate::linalg::re(&h), RMat::identity(2, 2));
        assert_eq!(crate::linalg::im(&h), crate::linalg::standard_skew_gram(1));
    }

    #[test]
    fn coherence_scale_recovered() {
        let mut r = rng();
        let b = fixtures::random_metric(&mut r, 4);
        let w = fixtures::random_skew(&mut r, 4);
        let j = tame(&b, &w).unwrap();
        let ind = induced_metric(&w, &j).unwrap();
        let l1 = is_coherent(&ind, &w, 1e-9).unwrap();
        assert!((l1 - 1.0).abs() < 1e-12);
        let l5 = is_coherent(&ind.scaled(5.0).unwrap(), &w, 1e-9).unwrap();
        assert!((l5 - 5.0).abs() < 1e-11);
        assert!(is_coherent(&b, &w, 1e-9).is_none());
        assert!(CoherentPair::try_new(ind, w, 1e-9).is_some());
    }

    #[test]
    fn group_act_identity_and_errors() {
        let mut r = rng();
        let b = fixtures::random_metric(&mut r, 4);
        let w = fixtures::random_skew(&mut r, 4);
        let (bg, wg) = group_act(&RMat::identity(4, 4), &b, &w).unwrap();
        assert_eq!(bg, b);
        assert_eq!(wg, w);
        let mut flip = RMat::identity(4, 4);
        flip[(0, 0)] = -1.0;
        assert!(matches!(
            group_act(&flip, &b, &w),
            Err(Error::NotOrientationPreserving(_))
        ));
        assert!(group_act(&RMat::zeros(4, 4), &b, &w).is_err());
    }

    #[test]
    fn same_fiber_conformal() {
        let mut r = rng();
        let b = fixtures::random_metric(&mut r, 4);
        let w = fixtures::random_skew(&mut r, 4);
        assert!(same_fiber(&b, &b.scaled(2.0).unwrap(), &w, 1e-9));
        let other = fixtures::random_metric(&mut r, 4);
        assert!(!same_fiber(&b, &other, &w, 1e-9));
    }
}
