//! Periods of `H^1(E) ⊗ H^1(E)` for the elliptic curve `E_τ`, the two
//! Plücker coordinates of the resulting block matrix, and finite-difference
//! Wirtinger probes of their ratio.

use nalgebra::Complex;

use crate::error::{Error, Result};
use crate::linalg::{CMat, C64};

/// Column selection of the first Plücker coordinate, the stacked `(M; N)`.
pub const FIRST_PLUCKER_COLUMNS: [usize; 4] = [0, 1, 2, 3];
/// Same minor with its first column replaced by the last column of `B`.
pub const SECOND_PLUCKER_COLUMNS: [usize; 4] = [7, 1, 2, 3];

#[derive(Debug, Clone, PartialEq)]
pub struct EtauFixture {
    pub tau: C64,
    /// Rows `(τ², τ, τ, 1)` and its conjugate.
    pub m: CMat,
    /// Rows `(|τ|², -(τ+τ̄), 0, 1)` and `(0, 1, -1, 0)`.
    pub n: CMat,
    /// `[[M, iι(M)], [N, -iι(N)]]` with `ι` reversing columns.
    pub b: CMat,
}

fn reversed_columns(m: &CMat) -> CMat {
    let c = m.ncols();
    CMat::from_fn(m.nrows(), c, |i, j| m[(i, c - 1 - j)])
}

pub fn etau_build(tau: C64) -> Result<EtauFixture> {
    if !(tau.im > 0.0) || !tau.re.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "τ = {tau} must lie in the upper half-plane"
        )));
    }
    let one = Complex::new(1.0, 0.0);
    let zero = Complex::new(0.0, 0.0);
    let tb = tau.conj();
    let m = CMat::from_row_slice(2, 4, &[tau * tau, tau, tau, one, tb * tb, tb, tb, one]);
    let n = CMat::from_row_slice(
        2,
        4,
        &[
            Complex::new(tau.norm_sqr(), 0.0),
            -(tau + tb),
            zero,
            one,
            zero,
            one,
            -one,
            zero,
        ],
    );
    let i = Complex::new(0.0, 1.0);
    let mut b = CMat::zeros(4, 8);
    b.view_mut((0, 0), (2, 4)).copy_from(&m);
    b.view_mut((0, 4), (2, 4))
        .copy_from(&(reversed_columns(&m) * i));
    b.view_mut((2, 0), (2, 4)).copy_from(&n);
    b.view_mut((2, 4), (2, 4))
        .copy_from(&(reversed_columns(&n) * -i));
    Ok(EtauFixture { tau, m, n, b })
}

impl EtauFixture {
    /// `max |M ι Nᵀ|`: rows of `N` span the kernel of `M` under the
    /// antidiagonal Gram `ι`.
    pub fn kernel_residual(&self) -> f64 {
        let k = reversed_columns(&self.m) * self.n.transpose();
        k.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn plucker(&self, cols: [usize; 4]) -> Result<C64> {
        if cols.iter().any(|&c| c >= 8) {
            return Err(Error::InvalidArgument(
                "Plücker column index out of range".into(),
            ));
        }
        Ok(CMat::from_fn(4, 4, |i, j| self.b[(i, cols[j])]).determinant())
    }

    /// `det(M; N)`.
    pub fn determinant(&self) -> C64 {
        self.plucker(FIRST_PLUCKER_COLUMNS).expect("valid columns")
    }

    pub fn second_plucker(&self) -> C64 {
        self.plucker(SECOND_PLUCKER_COLUMNS).expect("valid columns")
    }

    /// Ratio of the two Plücker coordinates computed from determinants.
    pub fn plucker_ratio(&self) -> Result<C64> {
        ratio_pole_check(self.tau)?;
        Ok(self.determinant() / self.second_plucker())
    }
}

/// `(τ-τ̄)(τ²+6|τ|²+τ̄²)`.
pub fn determinant_closed_form(tau: C64) -> C64 {
    let tb = tau.conj();
    (tau - tb) * (tau * tau + tau.norm_sqr() * 6.0 + tb * tb)
}

/// `-i(τ-τ̄)(τ+τ̄)²` as printed; the minor itself is its negative.
pub fn printed_second_plucker(tau: C64) -> C64 {
    let tb = tau.conj();
    Complex::new(0.0, -1.0) * (tau - tb) * (tau + tb) * (tau + tb)
}

/// `i(τ-τ̄)(τ+τ̄)²`, the value of the minor on [`SECOND_PLUCKER_COLUMNS`].
pub fn second_plucker_closed_form(tau: C64) -> C64 {
    -printed_second_plucker(tau)
}

fn ratio_pole_check(tau: C64) -> Result<()> {
    if tau.re.abs() < 1e-8 * tau.norm().max(1.0) {
        return Err(Error::InvalidArgument(format!(
            "τ = {tau} is on the imaginary axis, where the Plücker ratio has a pole"
        )));
    }
    Ok(())
}

/// `-i(τ²+6|τ|²+τ̄²)/(τ+τ̄)²`.
pub fn plucker_ratio_closed_form(tau: C64) -> Result<C64> {
    ratio_pole_check(tau)?;
    let tb = tau.conj();
    let s = tau + tb;
    Ok(Complex::new(0.0, -1.0) * (tau * tau + tau.norm_sqr() * 6.0 + tb * tb) / (s * s))
}

/// Plücker ratio via the two determinants of `B`.
pub fn plucker_ratio(tau: C64) -> Result<C64> {
    etau_build(tau)?.plucker_ratio()
}

/// Central-difference Wirtinger derivatives `(∂f/∂τ̄, ∂f/∂τ)` at `τ`.
pub fn wirtinger_derivatives(
    f: impl Fn(C64) -> Result<C64>,
    tau: C64,
    h: f64,
) -> Result<(C64, C64)> {
    if !(1e-6..=1e-3).contains(&h) {
        return Err(Error::InvalidArgument(format!(
            "finite-difference step {h} must lie in [1e-6, 1e-3]"
        )));
    }
    let dx = (f(tau + h)? - f(tau - h)?) / (2.0 * h);
    let ih = Complex::new(0.0, h);
    let dy = (f(tau + ih)? - f(tau - ih)?) / (2.0 * h);
    let i = Complex::new(0.0, 1.0);
    Ok(((dx + i * dy) * 0.5, (dx - i * dy) * 0.5))
}

/// Wirtinger derivatives of the determinant-path Plücker ratio.
pub fn nonholomorphy_probe(tau: C64, h: f64) -> Result<(C64, C64)> {
    ratio_pole_check(tau)?;
    if tau.im <= h {
        return Err(Error::InvalidArgument(
            "step leaves the upper half-plane".into(),
        ));
    }
    wirtinger_derivatives(plucker_ratio, tau, h)
}
