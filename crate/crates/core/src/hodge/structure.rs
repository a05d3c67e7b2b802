//! Hodge structures given by explicit bases of their `(p, q)` pieces, the
//! Weil operator, the Riemann conditions, and the two constructions of
//! complex tori from polarized Hodge structures.

use nalgebra::Complex;

use crate::error::{Error, Result};
use crate::exact::{QMatrix, Rational};
use crate::forms::ComplexStructureOp;
use crate::lattice::{ppav_from_structure, IntegralSkewForm, PolarizedAbelianVariety};
use crate::linalg::{im, inverse_c, rank_c, re, rel_diff, symmetrize, CMat, RMat, C64};

/// One piece `W^{p,q}` as the column span of `basis` in `C^n`.
#[derive(Debug, Clone, PartialEq)]
pub struct HodgePiece {
    pub p: i32,
    pub q: i32,
    pub basis: CMat,
}

#[derive(Debug, Clone, PartialEq)]
pub struct HodgeStructure {
    weight: i32,
    dim: usize,
    pieces: Vec<HodgePiece>,
}

const RANK_CUTOFF: f64 = 1e-10;

impl HodgeStructure {
    pub fn new(weight: i32, dim: usize, pieces: Vec<HodgePiece>) -> Result<Self> {
        let mut total = 0;
        for pc in &pieces {
            if pc.p + pc.q != weight {
                return Err(Error::Hodge(format!(
                    "piece ({}, {}) does not have weight {weight}",
                    pc.p, pc.q
                )));
            }
            if pc.basis.nrows() != dim {
                return Err(Error::Dimension(format!(
                    "piece ({}, {}) lives in C^{} but the structure is on C^{dim}",
                    pc.p,
                    pc.q,
                    pc.basis.nrows()
                )));
            }
            if rank_c(&pc.basis, RANK_CUTOFF) != pc.basis.ncols() {
                return Err(Error::Hodge(format!(
                    "basis of piece ({}, {}) is linearly dependent",
                    pc.p, pc.q
                )));
            }
            total += pc.basis.ncols();
        }
        for (i, a) in pieces.iter().enumerate() {
            if pieces[..i].iter().any(|b| b.p == a.p) {
                return Err(Error::Hodge(format!(
                    "piece ({}, {}) listed twice",
                    a.p, a.q
                )));
            }
        }
        if total != dim {
            return Err(Error::Hodge(format!(
                "pieces have total dimension {total}, expected {dim}"
            )));
        }
        let all = concat_columns(pieces.iter().map(|p| &p.basis), dim);
        if rank_c(&all, RANK_CUTOFF) != dim {
            return Err(Error::Hodge("pieces do not span".into()));
        }
        for pc in &pieces {
            let partner = pieces
                .iter()
                .find(|o| o.p == pc.q)
                .ok_or_else(|| Error::Hodge(format!("piece ({}, {}) is missing", pc.q, pc.p)))?;
            let conj = pc.basis.map(|z| z.conj());
            let joint = concat_columns([&partner.basis, &conj], dim);
            if partner.basis.ncols() != pc.basis.ncols()
                || rank_c(&joint, RANK_CUTOFF) != partner.basis.ncols()
            {
                return Err(Error::Hodge(format!(
                    "conjugate of ({}, {}) is not ({}, {})",
                    pc.p, pc.q, pc.q, pc.p
                )));
            }
        }
        Ok(Self {
            weight,
            dim,
            pieces,
        })
    }

    pub fn weight(&self) -> i32 {
        self.weight
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn pieces(&self) -> &[HodgePiece] {
        &self.pieces
    }

    /// `(p, q, h^{p,q})` sorted by decreasing `p`.
    pub fn hodge_numbers(&self) -> Vec<(i32, i32, usize)> {
        let mut v: Vec<_> = self
            .pieces
            .iter()
            .map(|p| (p.p, p.q, p.basis.ncols()))
            .collect();
        v.sort_by(|a, b| b.0.cmp(&a.0));
        v
    }

    pub fn weil_operator(&self) -> Result<WeilOperator> {
        let p = concat_columns(self.pieces.iter().map(|p| &p.basis), self.dim);
        let mut eig = Vec::with_capacity(self.dim);
        for pc in &self.pieces {
            let e = i_power(pc.p - pc.q);
            eig.extend(std::iter::repeat(e).take(pc.basis.ncols()));
        }
        let d = CMat::from_diagonal(&nalgebra::DVector::from_vec(eig));
        let c = &p * d * inverse_c(&p, "Hodge basis")?;
        let imag = im(&c).norm() / c.norm().max(1e-300);
        if imag > 1e-9 {
            return Err(Error::Hodge(format!(
                "Weil operator is not real (relative imaginary part {imag:.3e})"
            )));
        }
        WeilOperator::new(re(&c), self.weight)
    }

    /// Same structure in coordinates `x' = g x`.
    pub fn transformed(&self, g: &RMat) -> Result<Self> {
        let gc = g.map(|x| Complex::new(x, 0.0));
        Self::new(
            self.weight,
            self.dim,
            self.pieces
                .iter()
                .map(|p| HodgePiece {
                    p: p.p,
                    q: p.q,
                    basis: &gc * &p.basis,
                })
                .collect(),
        )
    }
}

fn i_power(k: i32) -> C64 {
    match k.rem_euclid(4) {
        0 => Complex::new(1.0, 0.0),
        1 => Complex::new(0.0, 1.0),
        2 => Complex::new(-1.0, 0.0),
        _ => Complex::new(0.0, -1.0),
    }
}

fn concat_columns<'a>(mats: impl IntoIterator<Item = &'a CMat>, rows: usize) -> CMat {
    let mats: Vec<&CMat> = mats.into_iter().collect();
    let cols: usize = mats.iter().map(|m| m.ncols()).sum();
    let mut out = CMat::zeros(rows, cols);
    let mut at = 0;
    for m in mats {
        out.view_mut((0, at), (rows, m.ncols())).copy_from(m);
        at += m.ncols();
    }
    out
}

/// Real operator acting as `i^{p-q}` on `W^{p,q}`.
#[derive(Debug, Clone, PartialEq)]
pub struct WeilOperator {
    c: RMat,
    weight: i32,
}

impl WeilOperator {
    pub fn new(c: RMat, weight: i32) -> Result<Self> {
        let n = c.nrows();
        let sign = if weight % 2 == 0 { 1.0 } else { -1.0 };
        let res = rel_diff(&(&c * &c), &(RMat::identity(n, n) * sign));
        if res > 1e-9 {
            return Err(Error::Hodge(format!(
                "C^2 != (-1)^k (relative residual {res:.3e})"
            )));
        }
        Ok(Self { c, weight })
    }

    pub fn matrix(&self) -> &RMat {
        &self.c
    }

    pub fn weight(&self) -> i32 {
        self.weight
    }
}

/// Rational bilinear form, symmetric in even weight and antisymmetric in odd.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PolarizationForm {
    q: QMatrix,
    weight: i32,
}

impl PolarizationForm {
    pub fn new(q: QMatrix, weight: i32) -> Result<Self> {
        if !q.is_square() {
            return Err(Error::Dimension("polarization must be square".into()));
        }
        let parity_ok = if weight % 2 == 0 {
            q.is_symmetric()
        } else {
            q.is_antisymmetric()
        };
        if !parity_ok {
            return Err(Error::Hodge(format!(
                "polarization of weight {weight} must be {}",
                if weight % 2 == 0 {
                    "symmetric"
                } else {
                    "antisymmetric"
                }
            )));
        }
        if num_traits::Zero::is_zero(&q.determinant()) {
            return Err(Error::Degenerate(f64::INFINITY));
        }
        Ok(Self { q, weight })
    }

    pub fn gram(&self) -> &QMatrix {
        &self.q
    }

    pub fn weight(&self) -> i32 {
        self.weight
    }

    pub fn is_unimodular(&self) -> bool {
        let d = self.q.determinant();
        d.is_integer() && crate::exact::is_unit(&d.to_integer())
    }
}

/// Outcome of the two Riemann conditions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RiemannCheck {
    pub first: bool,
    pub second: bool,
    /// Largest relative `|Q(W^{p,q}, W^{r,s})|` over pairs with `r != q`.
    pub orthogonality_residual: f64,
    /// Smallest eigenvalue of the hermitian forms `Q(Cx, ȳ)` over the pieces.
    pub min_positivity: f64,
}

/// First condition: `Q(W^{p,q}, W^{r,s}) = 0` unless `(r, s) = (q, p)`.
/// Second: `Q(Cx, x̄) > 0` for nonzero `x` in each piece, tested as positive
/// definiteness of the hermitian Gram on the piece's basis.
pub fn check_riemann(hs: &HodgeStructure, q: &PolarizationForm) -> Result<RiemannCheck> {
    if q.gram().nrows() != hs.dim() {
        return Err(Error::Dimension(format!(
            "polarization has size {} but structure has dimension {}",
            q.gram().nrows(),
            hs.dim()
        )));
    }
    let qc = q.gram().to_f64().map(|x| Complex::new(x, 0.0));
    let scale = qc.norm().max(1e-300);
    let mut orth = 0.0f64;
    for a in hs.pieces() {
        for b in hs.pieces() {
            if b.p == a.q {
                continue;
            }
            let m = a.basis.transpose() * &qc * &b.basis;
            let denom = scale * a.basis.norm() * b.basis.norm();
            orth = orth.max(m.norm() / denom.max(1e-300));
        }
    }
    let c = hs.weil_operator()?;
    let cc = c.matrix().map(|x| Complex::new(x, 0.0));
    let mut min_pos = f64::INFINITY;
    for pc in hs.pieces() {
        let h = (&cc * &pc.basis).transpose() * &qc * pc.basis.map(|z| z.conj());
        let herm = (&h - h.adjoint()).norm() / h.norm().max(1e-300);
        let lmin = if herm > 1e-8 {
            f64::NEG_INFINITY
        } else {
            let hs = (&h + h.adjoint()) * Complex::new(0.5, 0.0);
            hs.symmetric_eigenvalues()
                .iter()
                .copied()
                .fold(f64::INFINITY, f64::min)
                / (scale * pc.basis.norm_squared())
        };
        min_pos = min_pos.min(lmin);
    }
    Ok(RiemannCheck {
        first: orth <= 1e-9,
        second: min_pos > 1e-12,
        orthogonality_residual: orth,
        min_positivity: min_pos,
    })
}

/// Complex torus of an odd-weight polarized Hodge structure.
#[derive(Debug, Clone, PartialEq)]
pub struct WeilJacobian {
    pub ppav: PolarizedAbelianVariety,
    /// `+1` if `Q` itself tames `C`, `-1` if `-Q` was used.
    pub sign: i8,
}

/// Uses `J = C` and `ω = ±Q`, the sign chosen so that `ω(x, Jx) > 0`.
/// Riemann's second condition gives `Q(Cx, x) > 0`, which in odd weight
/// means `ω = -Q`.
pub fn weil_jacobian(hs: &HodgeStructure, q: &PolarizationForm) -> Result<WeilJacobian> {
    if hs.weight() % 2 == 0 {
        return Err(Error::Hodge(format!(
            "Weil jacobian needs odd weight, got {}",
            hs.weight()
        )));
    }
    if q.weight() != hs.weight() {
        return Err(Error::Hodge(
            "polarization weight differs from structure weight".into(),
        ));
    }
    let rc = check_riemann(hs, q)?;
    if !(rc.first && rc.second) {
        return Err(Error::Riemann(format!(
            "first condition {}, second condition {}",
            rc.first, rc.second
        )));
    }
    let c = hs.weil_operator()?;
    let j = ComplexStructureOp::new(c.matrix().clone())?;
    let qz = q.gram().to_integer()?;
    let qf = qz.to_f64();
    let tames = crate::linalg::min_sym_eigenvalue(&symmetrize(&(&qf * c.matrix()))) > 0.0;
    let sign: i8 = if tames { 1 } else { -1 };
    let omega = IntegralSkewForm::new(qz.scale(i64::from(sign)))?;
    let ppav = ppav_from_structure(j, &omega)?;
    Ok(WeilJacobian { ppav, sign })
}

/// Weight-one structure on `V = W ⊕ W^∨(-k)` from an even-weight one.
#[derive(Debug, Clone, PartialEq)]
pub struct EvenWeightTorus {
    /// `J(x, y) = (-C y, C x)` in coordinates `x + Q̂ y`.
    pub j: ComplexStructureOp,
    /// Skew form `[[0, Q], [-Q, 0]]`, the sign with `q(v, Jv) > 0`.
    pub q: QMatrix,
    /// `q((x1, y1), (x2, y2)) = -Q(x1, y2) + Q(y1, x2)`, that is
    /// `[[0, -Q], [Q, 0]]`; it is negative on `(v, Jv)`.
    pub q_convention: QMatrix,
}

pub fn even_to_weight_one(hs: &HodgeStructure, q: &PolarizationForm) -> Result<EvenWeightTorus> {
    if hs.weight() % 2 != 0 {
        return Err(Error::Hodge(format!(
            "construction needs even weight, got {}",
            hs.weight()
        )));
    }
    if q.weight() != hs.weight() {
        return Err(Error::Hodge(
            "polarization weight differs from structure weight".into(),
        ));
    }
    let rc = check_riemann(hs, q)?;
    if !(rc.first && rc.second) {
        return Err(Error::Riemann(format!(
            "first condition {}, second condition {}",
            rc.first, rc.second
        )));
    }
    let c = hs.weil_operator()?;
    let n = hs.dim();
    let mut jm = RMat::zeros(2 * n, 2 * n);
    jm.view_mut((0, n), (n, n)).copy_from(&(-c.matrix()));
    jm.view_mut((n, 0), (n, n)).copy_from(c.matrix());
    let j = ComplexStructureOp::new(jm)?;
    let qq = q.gram();
    let block = |sign: i64| {
        QMatrix::from_fn(2 * n, 2 * n, |r, s| {
            let k = Rational::from_integer(sign.into());
            match (r < n, s < n) {
                (true, false) => &qq[(r, s - n)] * &k,
                (false, true) => -(&qq[(r - n, s)] * &k),
                _ => Rational::from_integer(0.into()),
            }
        })
    };
    Ok(EvenWeightTorus {
        j,
        q: block(1),
        q_convention: block(-1),
    })
}

/// Weight-one structure on `R^2` with `W^{1,0}` spanned by `(1, τ)`.
pub fn weight_one_curve(tau: C64) -> Result<HodgeStructure> {
    if !(tau.im > 0.0) {
        return Err(Error::InvalidArgument(
            "τ must lie in the upper half-plane".into(),
        ));
    }
    let v = CMat::from_column_slice(2, 1, &[Complex::new(1.0, 0.0), tau]);
    HodgeStructure::new(
        1,
        2,
        vec![
            HodgePiece {
                p: 1,
                q: 0,
                basis: v.clone(),
            },
            HodgePiece {
                p: 0,
                q: 1,
                basis: v.map(|z| z.conj()),
            },
        ],
    )
}

/// `[[0, 1], [-1, 0]]`, which polarizes [`weight_one_curve`].
pub fn curve_polarization() -> PolarizationForm {
    PolarizationForm::new(QMatrix::from_i64(2, 2, &[0, 1, -1, 0]), 1).expect("valid form")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::standard_j;

    fn c(re: f64, im: f64) -> C64 {
        Complex::new(re, im)
    }

    #[test]
    fn curve_weil_operator_is_rotation() {
        let hs = weight_one_curve(c(0.0, 1.0)).unwrap();
        let w = hs.weil_operator().unwrap();
        assert!(
            rel_diff(
                w.matrix(),
                &RMat::from_row_slice(2, 2, &[0.0, 1.0, -1.0, 0.0])
            ) < 1e-15
        );
    }

    #[test]
    fn pure_one_one_is_identity() {
        let basis = CMat::identity(3, 3);
        let hs = HodgeStructure::new(2, 3, vec![HodgePiece { p: 1, q: 1, basis }]).unwrap();
        assert!(rel_diff(hs.weil_operator().unwrap().matrix(), &RMat::identity(3, 3)) < 1e-15);
    }

    #[test]
    fn curve_riemann_conditions() {
        let hs = weight_one_curve(c(0.3, 1.4)).unwrap();
        let q = curve_polarization();
        let rc = check_riemann(&hs, &q).unwrap();
        assert!(rc.first && rc.second);
        let neg = PolarizationForm::new(-q.gram().clone(), 1).unwrap();
        let rc = check_riemann(&hs, &neg).unwrap();
        assert!(rc.first && !rc.second);
    }

    #[test]
    fn curve_jacobian() {
        let hs = weight_one_curve(c(0.0, 1.0)).unwrap();
        let jac = weil_jacobian(&hs, &curve_polarization()).unwrap();
        assert_eq!(jac.sign, -1);
        assert!(jac.ppav.principal);
        assert!(rel_diff(jac.ppav.j.matrix(), &standard_j(1)) < 1e-15);
    }

    #[test]
    fn smallest_even_case() {
        let hs = HodgeStructure::new(
            2,
            1,
            vec![HodgePiece {
                p: 1,
                q: 1,
                basis: CMat::identity(1, 1),
            }],
        )
        .unwrap();
        let q = PolarizationForm::new(QMatrix::from_i64(1, 1, &[1]), 2).unwrap();
        let t = even_to_weight_one(&hs, &q).unwrap();
        assert!(rel_diff(t.j.matrix(), &(-standard_j(1))) < 1e-15);
        assert!(t.q.is_antisymmetric());
        assert_eq!(t.q.determinant(), crate::exact::int(1));
        assert_eq!(t.q_convention, -t.q.clone());
    }

    #[test]
    fn rejects_inconsistent_structures() {
        let v = CMat::from_column_slice(2, 1, &[c(1.0, 0.0), c(0.0, 1.0)]);
        let w = CMat::from_column_slice(2, 1, &[c(1.0, 0.0), c(0.0, 2.0)]);
        let bad = HodgeStructure::new(
            1,
            2,
            vec![
                HodgePiece {
                    p: 1,
                    q: 0,
                    basis: v,
                },
                HodgePiece {
                    p: 0,
                    q: 1,
                    basis: w,
                },
            ],
        );
        assert!(matches!(bad, Err(Error::Hodge(_))));
        let wrong_weight = HodgeStructure::new(
            2,
            1,
            vec![HodgePiece {
                p: 1,
                q: 0,
                basis: CMat::identity(1, 1),
            }],
        );
        assert!(wrong_weight.is_err());
        assert!(weight_one_curve(c(1.0, -1.0)).is_err());
        let odd_sym = PolarizationForm::new(QMatrix::identity(2), 1);
        assert!(odd_sym.is_err());
    }
}
