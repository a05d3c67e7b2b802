//! Small dense linear-algebra helpers shared by the numerical modules.

use nalgebra::{Complex, DMatrix, SymmetricEigen};

use crate::error::{Error, Result};

pub type RMat = DMatrix<f64>;
pub type CMat = DMatrix<Complex<f64>>;
pub type C64 = Complex<f64>;

/// Default relative tolerance for postcondition checks.
pub const DEFAULT_TOL: f64 = 1e-9;

/// Condition number above which a skew form counts as degenerate.
pub const MAX_CONDITION: f64 = 1e10;

/// The standard complex structure `[[0, I], [-I, 0]]` on `R^{2n}`.
pub fn standard_j(n: usize) -> RMat {
    let mut j = RMat::zeros(2 * n, 2 * n);
    for i in 0..n {
        j[(i, n + i)] = 1.0;
        j[(n + i, i)] = -1.0;
    }
    j
}

/// Gram matrix of the standard symplectic form `w0(x, y) = y^T J x`.
///
/// With the row convention `w(x, y) = x^T W y` this is `J^T`, so that the
/// metric induced by `(w0, J)` is the identity.
pub fn standard_skew_gram(n: usize) -> RMat {
    standard_j(n).transpose()
}

pub fn frobenius(m: &RMat) -> f64 {
    m.norm()
}

/// `||a - b||_F / max(||b||_F, 1e-300)`.
pub fn rel_diff(a: &RMat, b: &RMat) -> f64 {
    (a - b).norm() / b.norm().max(1e-300)
}

pub fn rel_diff_c(a: &CMat, b: &CMat) -> f64 {
    (a - b).norm() / b.norm().max(1e-300)
}

pub fn symmetric_residual(m: &RMat) -> f64 {
    (m - m.transpose()).norm() / m.norm().max(1e-300)
}

pub fn antisymmetric_residual(m: &RMat) -> f64 {
    (m + m.transpose()).norm() / m.norm().max(1e-300)
}

pub fn symmetrize(m: &RMat) -> RMat {
    (m + m.transpose()) * 0.5
}

pub fn ensure_square(m: &RMat, what: &str) -> Result<usize> {
    if m.nrows() != m.ncols() || m.nrows() == 0 {
        return Err(Error::Dimension(format!(
            "{what} must be square and non-empty, got {}x{}",
            m.nrows(),
            m.ncols()
        )));
    }
    Ok(m.nrows())
}

pub fn ensure_even(n: usize, what: &str) -> Result<usize> {
    if n % 2 != 0 {
        return Err(Error::Dimension(format!(
            "{what} must have even size, got {n}"
        )));
    }
    Ok(n / 2)
}

/// Eigenvalues of the symmetric part, ascending.
pub fn sym_eigenvalues(m: &RMat) -> Vec<f64> {
    let mut ev: Vec<f64> = SymmetricEigen::new(symmetrize(m))
        .eigenvalues
        .iter()
        .copied()
        .collect();
    ev.sort_by(|a, b| a.partial_cmp(b).unwrap());
    ev
}

pub fn min_sym_eigenvalue(m: &RMat) -> f64 {
    sym_eigenvalues(m)[0]
}

/// Ratio of extreme singular values; infinite for singular input.
pub fn condition_number(m: &RMat) -> f64 {
    let sv = m.clone().singular_values();
    let max = sv.iter().cloned().fold(0.0, f64::max);
    let min = sv.iter().cloned().fold(f64::INFINITY, f64::min);
    if min == 0.0 {
        f64::INFINITY
    } else {
        max / min
    }
}

pub fn condition_number_c(m: &CMat) -> f64 {
    let sv = m.clone().singular_values();
    let max = sv.iter().cloned().fold(0.0, f64::max);
    let min = sv.iter().cloned().fold(f64::INFINITY, f64::min);
    if min == 0.0 {
        f64::INFINITY
    } else {
        max / min
    }
}

pub fn inverse(m: &RMat, what: &str) -> Result<RMat> {
    m.clone()
        .try_inverse()
        .ok_or_else(|| Error::Singular(what.to_string()))
}

pub fn inverse_c(m: &CMat, what: &str) -> Result<CMat> {
    m.clone()
        .try_inverse()
        .ok_or_else(|| Error::Singular(what.to_string()))
}

pub fn to_complex(m: &RMat) -> CMat {
    m.map(|x| C64::new(x, 0.0))
}

pub fn re(m: &CMat) -> RMat {
    m.map(|z| z.re)
}

pub fn im(m: &CMat) -> RMat {
    m.map(|z| z.im)
}

/// Numerical rank from singular values with a relative cutoff.
pub fn rank_c(m: &CMat, rel_cutoff: f64) -> usize {
    if m.nrows() == 0 || m.ncols() == 0 {
        return 0;
    }
    let sv = m.clone().singular_values();
    let max = sv.iter().cloned().fold(0.0, f64::max);
    if max == 0.0 {
        return 0;
    }
    sv.iter().filter(|s| **s > rel_cutoff * max).count()
}

pub fn rank(m: &RMat, rel_cutoff: f64) -> usize {
    rank_c(&to_complex(m), rel_cutoff)
}

/// Orthonormal basis (columns) of the null space of `m`.
pub fn null_space(m: &RMat, rel_cutoff: f64) -> RMat {
    let ncols = m.ncols();
    if m.nrows() == 0 {
        return RMat::identity(ncols, ncols);
    }
    // Pad to a square matrix so the SVD returns a full right basis.
    let rows = m.nrows().max(ncols);
    let mut padded = RMat::zeros(rows, ncols);
    padded.view_mut((0, 0), (m.nrows(), ncols)).copy_from(m);
    let svd = padded.svd(false, true);
    let vt = svd.v_t.expect("requested V^T");
    let max = svd.singular_values.iter().cloned().fold(0.0, f64::max);
    let cutoff = if max == 0.0 { 0.0 } else { rel_cutoff * max };
    let null_rows: Vec<usize> = (0..vt.nrows())
        .filter(|&i| svd.singular_values[i] <= cutoff)
        .collect();
    let mut basis = RMat::zeros(ncols, null_rows.len());
    for (c, &r) in null_rows.iter().enumerate() {
        basis.set_column(c, &vt.row(r).transpose());
    }
    basis
}
