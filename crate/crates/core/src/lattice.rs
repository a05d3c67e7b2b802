//! Integral layer: lattices with integral or rational skew pairings and the
//! polarized abelian variety `V / Λ` they define together with a metric.
//!
//! Lattices are always presented in a fixed standard basis; changes of basis
//! are explicit integer matrices acting on columns.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::exact::{is_unit, QMatrix, ZMatrix};
use crate::forms::{hermitian_form, is_coherent, tame, ComplexStructureOp, MetricForm, SkewForm};
use crate::linalg::{condition_number, ensure_even, CMat, RMat, MAX_CONDITION};
use crate::siegel::{structure_to_siegel, SiegelPoint};

/// Nondegenerate antisymmetric integer Gram matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntegralSkewForm {
    gram: ZMatrix,
}

impl IntegralSkewForm {
    pub fn new(gram: ZMatrix) -> Result<Self> {
        if gram.nrows() != gram.ncols() || gram.nrows() == 0 {
            return Err(Error::Dimension(format!(
                "skew Gram matrix must be square, got {}x{}",
                gram.nrows(),
                gram.ncols()
            )));
        }
        ensure_even(gram.nrows(), "integral skew form")?;
        if !gram.is_antisymmetric() {
            return Err(Error::NotAntisymmetric(f64::NAN));
        }
        if gram.determinant().is_zero() {
            return Err(Error::Degenerate(f64::INFINITY));
        }
        Ok(Self { gram })
    }

    /// Gram matrix of the standard form `w0(x, y) = y^T J x`.
    pub fn standard(g: usize) -> Self {
        Self {
            gram: ZMatrix::from_fn(2 * g, 2 * g, |i, j| {
                if j == i + g && i < g {
                    BigInt::from(-1)
                } else if i == j + g && j < g {
                    BigInt::one()
                } else {
                    BigInt::zero()
                }
            }),
        }
    }

    pub fn gram(&self) -> &ZMatrix {
        &self.gram
    }

    pub fn rank(&self) -> usize {
        self.gram.nrows()
    }

    pub fn determinant(&self) -> BigInt {
        self.gram.determinant()
    }

    pub fn to_real(&self) -> Result<SkewForm> {
        SkewForm::new(self.gram.to_f64())
    }

    pub fn eval(&self, x: &[i64], y: &[i64]) -> BigInt {
        let n = self.rank();
        let mut acc = BigInt::zero();
        for i in 0..n {
            for j in 0..n {
                acc += &self.gram[(i, j)] * x[i] * y[j];
            }
        }
        acc
    }
}

/// Nondegenerate antisymmetric rational Gram matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RationalSkewForm {
    gram: QMatrix,
}

impl RationalSkewForm {
    pub fn new(gram: QMatrix) -> Result<Self> {
        if !gram.is_square() || gram.nrows() == 0 {
            return Err(Error::Dimension(format!(
                "skew Gram matrix must be square, got {}x{}",
                gram.nrows(),
                gram.ncols()
            )));
        }
        ensure_even(gram.nrows(), "rational skew form")?;
        if !gram.is_antisymmetric() {
            return Err(Error::NotAntisymmetric(f64::NAN));
        }
        if gram.determinant().is_zero() {
            return Err(Error::Degenerate(f64::INFINITY));
        }
        Ok(Self { gram })
    }

    pub fn gram(&self) -> &QMatrix {
        &self.gram
    }
}

impl From<&IntegralSkewForm> for RationalSkewForm {
    fn from(w: &IntegralSkewForm) -> Self {
        Self {
            gram: w.gram.to_rational(),
        }
    }
}

pub fn is_unimodular(w: &IntegralSkewForm) -> bool {
    is_unit(&w.determinant())
}

/// Gram of `(x, y) -> w(γx, γy)`, exactly.
pub fn twist_pairing(w: &RationalSkewForm, gamma: &QMatrix) -> Result<RationalSkewForm> {
    let n = w.gram.nrows();
    if gamma.nrows() != n || gamma.ncols() != n {
        return Err(Error::Dimension(format!(
            "twist must be {n}x{n}, got {}x{}",
            gamma.nrows(),
            gamma.ncols()
        )));
    }
    if gamma.determinant().is_zero() {
        return Err(Error::Singular("twist matrix".into()));
    }
    RationalSkewForm::new(&(&gamma.transpose() * &w.gram) * gamma)
}

/// Least `N > 0` with `N w` integral: the LCM of reduced denominators.
pub fn minimal_integral_scale(w: &RationalSkewForm) -> BigInt {
    w.gram.denominator_lcm()
}

/// `N w` for the minimal integral scale `N`.
pub fn clear_denominators(w: &RationalSkewForm) -> Result<IntegralSkewForm> {
    let n = minimal_integral_scale(w);
    let scaled = w.gram.scale(&num_rational::BigRational::from_integer(n));
    IntegralSkewForm::new(scaled.to_integer()?)
}

/// Decides coherence of `(b_τ, w_γ)` by the direct numerical test.
pub fn twisted_coherence_probe(
    b: &MetricForm,
    tau: &RMat,
    w: &SkewForm,
    gamma: &RMat,
    tol: f64,
) -> Result<Option<f64>> {
    let n = b.dim();
    for (name, m) in [("tau", tau), ("gamma", gamma)] {
        if m.nrows() != n || m.ncols() != n {
            return Err(Error::Dimension(format!(
                "{name} must be {n}x{n}, got {}x{}",
                m.nrows(),
                m.ncols()
            )));
        }
        if !(condition_number(m) <= MAX_CONDITION) {
            return Err(Error::Singular(format!("twist {name}")));
        }
    }
    let bt = MetricForm::new(tau.transpose() * b.gram() * tau)?;
    let wg = SkewForm::new(gamma.transpose() * w.gram() * gamma)?;
    Ok(is_coherent(&bt, &wg, tol))
}

/// Integer change of basis `M` with `det M = ±1` and `M^T W M = W0`.
///
/// Columns of `M` are `e_1..e_g, f_1..f_g` with `w(e_i, f_j) = -δ_ij` and all
/// other pairings zero.
pub fn symplectic_basis(w: &IntegralSkewForm) -> Result<ZMatrix> {
    if !is_unimodular(w) {
        return Err(Error::NotUnimodular(w.determinant().abs().to_string()));
    }
    let n = w.rank();
    let g = n / 2;
    // Columns of `basis` are lattice vectors; `pair` evaluates w on them.
    let mut basis: Vec<Vec<BigInt>> = (0..n)
        .map(|i| (0..n).map(|j| BigInt::from(i64::from(i == j))).collect())
        .collect();
    let pair = |x: &[BigInt], y: &[BigInt]| -> BigInt {
        let mut acc = BigInt::zero();
        for i in 0..n {
            if x[i].is_zero() {
                continue;
            }
            for j in 0..n {
                acc += &x[i] * &w.gram()[(i, j)] * &y[j];
            }
        }
        acc
    };
    let combine = |v: &mut Vec<BigInt>, k: &BigInt, u: &[BigInt]| {
        for (a, b) in v.iter_mut().zip(u) {
            *a += k * b;
        }
    };

    let mut es = Vec::with_capacity(g);
    let mut fs = Vec::with_capacity(g);
    while !basis.is_empty() {
        let e = basis.remove(0);
        // Euclid on the pairings w(e, v) over the remaining vectors.
        loop {
            let vals: Vec<BigInt> = basis.iter().map(|v| pair(&e, v)).collect();
            let nonzero: Vec<usize> = (0..vals.len()).filter(|&i| !vals[i].is_zero()).collect();
            if nonzero.is_empty() {
                return Err(Error::NotUnimodular("pairing vanishes on a vector".into()));
            }
            let piv = *nonzero
                .iter()
                .min_by_key(|&&i| vals[i].abs())
                .expect("non-empty");
            if nonzero.len() == 1 {
                break;
            }
            let pv = basis[piv].clone();
            for &i in &nonzero {
                if i != piv {
                    let q = -vals[i].div_floor(&vals[piv]);
                    combine(&mut basis[i], &q, &pv);
                }
            }
        }
        let idx = basis
            .iter()
            .position(|v| !pair(&e, v).is_zero())
            .expect("pivot exists");
        let mut f = basis.remove(idx);
        let d = pair(&e, &f);
        if !d.abs().is_one() {
            return Err(Error::NotUnimodular(format!(
                "elementary divisor {}",
                d.abs()
            )));
        }
        if d.is_positive() {
            f.iter_mut().for_each(|x| *x = -x.clone());
        }
        // Now w(e, f) = -1; split off the hyperbolic plane.
        for v in basis.iter_mut() {
            let a = pair(&e, v);
            let c = pair(&f, v);
            combine(v, &a, &f);
            combine(v, &(-c), &e);
        }
        es.push(e);
        fs.push(f);
    }
    let cols: Vec<&Vec<BigInt>> = es.iter().chain(fs.iter()).collect();
    let m = ZMatrix::from_fn(n, n, |i, j| cols[j][i].clone());
    let check = &(&m.transpose() * w.gram()) * &m;
    if check != *IntegralSkewForm::standard(g).gram() {
        return Err(Error::Postcondition(
            "symplectic basis reduction failed".into(),
        ));
    }
    Ok(m)
}

/// `V / Λ` with complex structure `J`, Riemann form `w` and hermitian form `h`.
#[derive(Debug, Clone, PartialEq)]
pub struct PolarizedAbelianVariety {
    pub rank: usize,
    pub j: ComplexStructureOp,
    pub omega: IntegralSkewForm,
    pub h: CMat,
    pub principal: bool,
    /// Period point in a symplectic basis of the lattice; principal case only.
    pub siegel_point: Option<SiegelPoint>,
}

impl PolarizedAbelianVariety {
    pub fn g(&self) -> usize {
        self.rank / 2
    }

    /// Minimum of `w(x, Jx)` over the given lattice vectors, and the
    /// `J`-invariance residual of `w`.
    pub fn riemann_form_check(&self, samples: &[Vec<i64>]) -> (f64, f64) {
        let w = self.omega.gram().to_f64();
        let jm = self.j.matrix();
        let inv = crate::linalg::rel_diff(&(jm.transpose() * &w * jm), &w);
        let min = samples
            .iter()
            .map(|x| {
                let v = nalgebra::DVector::from_iterator(x.len(), x.iter().map(|&a| a as f64));
                (v.transpose() * &w * jm * &v)[(0, 0)]
            })
            .fold(f64::INFINITY, f64::min);
        (min, inv)
    }
}

/// Assembles the polarized abelian variety of `(Z^{2g}, b, w)`.
pub fn build_ppav(b: &MetricForm, w: &IntegralSkewForm) -> Result<PolarizedAbelianVariety> {
    let real = w.to_real()?;
    if real.dim() != b.dim() {
        return Err(Error::Dimension(format!(
            "metric has size {} but skew form has size {}",
            b.dim(),
            real.dim()
        )));
    }
    let j = tame(b, &real)?;
    ppav_from_structure(j, w)
}

/// Assembles the polarized abelian variety for a complex structure already
/// tamed by `w`.
pub fn ppav_from_structure(
    j: ComplexStructureOp,
    w: &IntegralSkewForm,
) -> Result<PolarizedAbelianVariety> {
    let real = w.to_real()?;
    let h = hermitian_form(&real, &j)?;
    let principal = is_unimodular(w);
    let siegel_point = if principal {
        let m = symplectic_basis(w)?.to_f64();
        let m_inv = crate::linalg::inverse(&m, "symplectic basis")?;
        let j_std = ComplexStructureOp::new(&m_inv * j.matrix() * &m)?;
        Some(structure_to_siegel(&j_std)?)
    } else {
        None
    };
    Ok(PolarizedAbelianVariety {
        rank: w.rank(),
        j,
        omega: w.clone(),
        h,
        principal,
        siegel_point,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{int, rat};
    use crate::fixtures;
    use crate::linalg::{rel_diff, standard_j};
    use crate::siegel::siegel_to_structure;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn unimodularity() {
        let w = IntegralSkewForm::standard(2);
        assert!(is_unimodular(&w));
        assert!(!is_unimodular(
            &IntegralSkewForm::new(w.gram().scale(2)).unwrap()
        ));
    }

    #[test]
    fn rejects_bad_integral_forms() {
        assert!(IntegralSkewForm::new(ZMatrix::identity(2)).is_err());
        assert!(IntegralSkewForm::new(ZMatrix::from_i64(2, 2, &[0, 0, 0, 0])).is_err());
        assert!(IntegralSkewForm::new(ZMatrix::from_i64(1, 1, &[0])).is_err());
    }

    #[test]
    fn ppav_standard_and_scaled() {
        let p = build_ppav(&MetricForm::identity(2), &IntegralSkewForm::standard(1)).unwrap();
        assert!(p.principal);
        assert!(rel_diff(p.j.matrix(), &standard_j(1)) < 1e-15);
        let z = p.siegel_point.unwrap();
        assert!((z.z()[(0, 0)] - nalgebra::Complex::new(0.0, 1.0)).norm() < 1e-12);

        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let b = fixtures::random_metric(&mut rng, 2);
        let w3 = IntegralSkewForm::new(IntegralSkewForm::standard(1).gram().scale(3)).unwrap();
        let p = build_ppav(&b, &w3).unwrap();
        assert!(!p.principal);
        assert!(p.siegel_point.is_none());
    }

    #[test]
    fn twist_cases() {
        let w = RationalSkewForm::from(&IntegralSkewForm::standard(2));
        assert_eq!(twist_pairing(&w, &QMatrix::identity(4)).unwrap(), w);
        let twice = twist_pairing(&w, &QMatrix::identity(4).scale(&int(2))).unwrap();
        assert_eq!(twice.gram(), &w.gram().scale(&int(4)));
        assert!(twist_pairing(&w, &QMatrix::zeros(4, 4)).is_err());
    }

    #[test]
    fn scales() {
        let w = RationalSkewForm::from(&IntegralSkewForm::standard(1));
        assert_eq!(minimal_integral_scale(&w), BigInt::one());
        let half = RationalSkewForm::new(w.gram().scale(&rat(1, 2))).unwrap();
        assert_eq!(minimal_integral_scale(&half), BigInt::from(2));
        let mixed = RationalSkewForm::new(
            QMatrix::from_rows(vec![
                vec![int(0), rat(1, 3), int(0), int(0)],
                vec![rat(-1, 3), int(0), int(0), int(0)],
                vec![int(0), int(0), int(0), rat(1, 4)],
                vec![int(0), int(0), rat(-1, 4), int(0)],
            ])
            .unwrap(),
        )
        .unwrap();
        assert_eq!(minimal_integral_scale(&mixed), BigInt::from(12));
        let cleared = clear_denominators(&mixed).unwrap();
        assert_eq!(
            minimal_integral_scale(&RationalSkewForm::from(&cleared)),
            BigInt::one()
        );
    }

    #[test]
    fn symplectic_basis_of_scrambled_standard_form() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for g in 1..=3 {
            let u = fixtures::random_unimodular(&mut rng, 2 * g, 20);
            let flat: Vec<i64> = u.iter().flatten().copied().collect();
            let u = ZMatrix::from_i64(2 * g, 2 * g, &flat);
            let w = IntegralSkewForm::new(
                &(&u.transpose() * IntegralSkewForm::standard(g).gram()) * &u,
            )
            .unwrap();
            let m = symplectic_basis(&w).unwrap();
            assert!(is_unit(&m.determinant()));
        }
        let w2 = IntegralSkewForm::new(IntegralSkewForm::standard(1).gram().scale(2)).unwrap();
        assert!(matches!(
            symplectic_basis(&w2),
            Err(Error::NotUnimodular(_))
        ));
    }

    #[test]
    fn period_point_is_basis_independent() {
        // The PPAV of (Z^{2g}, b, w0) and of the same data in a scrambled
        // lattice basis must have the same J up to that basis change, and a
        // period point that reproduces it.
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let z0 = fixtures::random_siegel(&mut rng, 2);
        let (j0, b0) = siegel_to_structure(&z0).unwrap();
        let u = fixtures::random_unimodular(&mut rng, 4, 12);
        let flat: Vec<i64> = u.iter().flatten().copied().collect();
        let uz = ZMatrix::from_i64(4, 4, &flat);
        let ur = uz.to_f64();
        let w =
            IntegralSkewForm::new(&(&uz.transpose() * IntegralSkewForm::standard(2).gram()) * &uz)
                .unwrap();
        let b = MetricForm::new(ur.transpose() * b0.gram() * &ur).unwrap();
        let p = build_ppav(&b, &w).unwrap();
        let ui = ur.clone().try_inverse().unwrap();
        assert!(rel_diff(&(&ur * p.j.matrix() * &ui), j0.matrix()) < 1e-9);
        let (jz, _) = siegel_to_structure(p.siegel_point.as_ref().unwrap()).unwrap();
        let m = symplectic_basis(&w).unwrap().to_f64();
        let mi = m.clone().try_inverse().unwrap();
        assert!(rel_diff(jz.matrix(), &(&mi * p.j.matrix() * &m)) < 1e-9);
    }

    #[test]
    fn coherence_probe_cases() {
        let mut rng = ChaCha8Rng::seed_from_u64(14);
        let z = fixtures::random_siegel(&mut rng, 2);
        let (_, b) = siegel_to_structure(&z).unwrap();
        let w = SkewForm::standard(2);
        let gamma = fixtures::random_symplectic(&mut rng, 2);
        let l = twisted_coherence_probe(&b, &gamma, &w, &gamma, 1e-9)
            .unwrap()
            .unwrap();
        assert!((l - 1.0).abs() < 1e-9);
        let l2 = twisted_coherence_probe(&b, &(&gamma * 2.0), &w, &gamma, 1e-9)
            .unwrap()
            .unwrap();
        assert!((l2 - 4.0).abs() < 1e-8);
        let other = fixtures::well_conditioned(&mut rng, 4);
        assert!(twisted_coherence_probe(&b, &other, &w, &gamma, 1e-9)
            .unwrap()
            .is_none());
        assert!(twisted_coherence_probe(&b, &RMat::zeros(4, 4), &w, &gamma, 1e-9).is_err());
    }
}
