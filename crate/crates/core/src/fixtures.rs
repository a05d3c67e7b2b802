//! Random and canned inputs used by tests, the acceptance suite and the CLI
//! self-checks. Every generator is driven by a caller-supplied RNG so runs
//! are reproducible from a seed.

use nalgebra::{Complex, DVector, SymmetricEigen};
use rand::Rng;

use crate::exact::ZMatrix;
use crate::forms::{MetricForm, SkewForm};
use crate::hodge::{
    curve_polarization, weight_one_curve, HodgePiece, HodgeStructure, PolarizationForm,
};
use crate::lattice::IntegralSkewForm;
use crate::linalg::{standard_skew_gram, symmetrize, CMat, RMat};
use crate::siegel::SiegelPoint;

pub fn uniform<R: Rng + ?Sized>(rng: &mut R, lo: f64, hi: f64) -> f64 {
    rng.random_range(lo..hi)
}

pub fn random_matrix<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> RMat {
    RMat::from_fn(rows, cols, |_, _| rng.random_range(-1.0..1.0))
}

pub fn random_vector<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.random_range(-1.0..1.0)).collect()
}

/// Symmetric matrix with entries in `[-1, 1]`.
pub fn random_symmetric<R: Rng + ?Sized>(rng: &mut R, n: usize) -> RMat {
    symmetrize(&random_matrix(rng, n, n))
}

/// Random orthogonal matrix from the eigenvectors of a symmetric one.
pub fn random_orthogonal<R: Rng + ?Sized>(rng: &mut R, n: usize) -> RMat {
    SymmetricEigen::new(random_symmetric(rng, n)).eigenvectors
}

/// SPD matrix with spectrum drawn from `[lo, hi]`.
pub fn random_spd_in<R: Rng + ?Sized>(rng: &mut R, n: usize, lo: f64, hi: f64) -> RMat {
    let o = random_orthogonal(rng, n);
    let d = DVector::from_fn(n, |_, _| rng.random_range(lo..=hi));
    symmetrize(&(&o * RMat::from_diagonal(&d) * o.transpose()))
}

pub fn random_metric<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> MetricForm {
    MetricForm::new(random_spd_in(rng, dim, 0.2, 5.0)).expect("well-conditioned SPD")
}

/// `M^T W0 M` for a well-conditioned random `M`.
pub fn random_skew<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> SkewForm {
    let m = well_conditioned(rng, dim);
    let n = dim / 2;
    SkewForm::new(m.transpose() * standard_skew_gram(n) * m).expect("nondegenerate skew form")
}

/// Invertible matrix with singular values in `[0.5, 2]` and positive determinant.
pub fn well_conditioned<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> RMat {
    let u = random_orthogonal(rng, dim);
    let mut v = random_orthogonal(rng, dim);
    let s = DVector::from_fn(dim, |_, _| rng.random_range(0.5..2.0));
    if (u.determinant() * v.determinant()) < 0.0 {
        v.column_mut(0).neg_mut();
    }
    &u * RMat::from_diagonal(&s) * v.transpose()
}

/// Random element of `Sp(2g, R)` for the standard form, as a product of
/// shears and a block-diagonal factor.
pub fn random_symplectic<R: Rng + ?Sized>(rng: &mut R, g: usize) -> RMat {
    let id = RMat::identity(g, g);
    let mut upper = RMat::identity(2 * g, 2 * g);
    upper
        .view_mut((0, g), (g, g))
        .copy_from(&(random_symmetric(rng, g) * 0.7));
    let mut lower = RMat::identity(2 * g, 2 * g);
    lower
        .view_mut((g, 0), (g, g))
        .copy_from(&(random_symmetric(rng, g) * 0.7));
    let a = &id + random_matrix(rng, g, g) * 0.3;
    let a_inv_t = a.clone().try_inverse().expect("near identity").transpose();
    let mut diag = RMat::zeros(2 * g, 2 * g);
    diag.view_mut((0, 0), (g, g)).copy_from(&a);
    diag.view_mut((g, g), (g, g)).copy_from(&a_inv_t);
    upper * diag * lower
}

/// Siegel point with `Re Z` entries in `[-1, 1]` and `Im Z` spectrum in `[lo, hi]`.
pub fn random_siegel_in<R: Rng + ?Sized>(rng: &mut R, g: usize, lo: f64, hi: f64) -> SiegelPoint {
    let x = random_symmetric(rng, g);
    let y = random_spd_in(rng, g, lo, hi);
    SiegelPoint::from_parts(&x, &y).expect("valid Siegel point")
}

pub fn random_siegel<R: Rng + ?Sized>(rng: &mut R, g: usize) -> SiegelPoint {
    random_siegel_in(rng, g, 0.5, 2.0)
}

/// Uniform point of the upper half-plane with `|Re| <= 2`, `Im` in `[0.2, 3]`.
pub fn random_upper_half_plane<R: Rng + ?Sized>(rng: &mut R) -> Complex<f64> {
    Complex::new(rng.random_range(-2.0..2.0), rng.random_range(0.2..3.0))
}

pub fn random_complex_vector<R: Rng + ?Sized>(
    rng: &mut R,
    n: usize,
    im_bound: f64,
) -> Vec<Complex<f64>> {
    (0..n)
        .map(|_| {
            Complex::new(
                rng.random_range(-1.0..1.0),
                rng.random_range(-im_bound..=im_bound),
            )
        })
        .collect()
}

/// Integer matrix with determinant one built from elementary operations.
pub fn random_unimodular<R: Rng + ?Sized>(rng: &mut R, n: usize, steps: usize) -> Vec<Vec<i64>> {
    let mut m: Vec<Vec<i64>> = (0..n)
        .map(|i| (0..n).map(|j| i64::from(i == j)).collect())
        .collect();
    if n < 2 {
        return m;
    }
    for _ in 0..steps {
        let i = rng.random_range(0..n);
        let mut j = rng.random_range(0..n - 1);
        if j >= i {
            j += 1;
        }
        let k: i64 = if rng.random_bool(0.5) { 1 } else { -1 };
        for c in 0..n {
            m[i][c] += k * m[j][c];
        }
    }
    m
}

pub fn int_to_real(m: &[Vec<i64>]) -> RMat {
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    RMat::from_fn(rows, cols, |i, j| m[i][j] as f64)
}

pub fn complex_from_parts(re: &RMat, im: &RMat) -> CMat {
    CMat::from_fn(re.nrows(), re.ncols(), |i, j| {
        Complex::new(re[(i, j)], im[(i, j)])
    })
}

fn boost(a: f64, i: usize, j: usize) -> RMat {
    let mut m = RMat::identity(3, 3);
    m[(i, i)] = a.cosh();
    m[(j, j)] = a.cosh();
    m[(i, j)] = a.sinh();
    m[(j, i)] = a.sinh();
    m
}

fn rotation(t: f64) -> RMat {
    let mut m = RMat::identity(3, 3);
    m[(1, 1)] = t.cos();
    m[(2, 2)] = t.cos();
    m[(1, 2)] = -t.sin();
    m[(2, 1)] = t.sin();
    m
}

/// Integral polarized weight-two structure with `h^{2,0} = h^{1,1} = 1`.
///
/// Starts from `Q = scale·diag(1, -1, -1)` with `W^{1,1} = e_1`,
/// `W^{2,0} = e_2 + i e_3`, moves it by a random element of `SO(1, 2)` and
/// then by a random unimodular change of lattice basis.
pub fn random_weight_two<R: Rng + ?Sized>(
    rng: &mut R,
    scale: i64,
) -> (HodgeStructure, PolarizationForm) {
    let g = boost(uniform(rng, -1.0, 1.0), 0, 1)
        * rotation(uniform(rng, 0.0, 6.3))
        * boost(uniform(rng, -1.0, 1.0), 0, 2);
    let m = random_unimodular(rng, 3, 4);
    let mf = int_to_real(&m);
    let m_inv = mf.clone().try_inverse().expect("unimodular");
    let change = m_inv * g;
    let one = Complex::new(1.0, 0.0);
    let i = Complex::new(0.0, 1.0);
    let zero = Complex::new(0.0, 0.0);
    let w20 = CMat::from_column_slice(3, 1, &[zero, one, i]);
    let w11 = CMat::from_column_slice(3, 1, &[one, zero, zero]);
    let base = HodgeStructure::new(
        2,
        3,
        vec![
            HodgePiece {
                p: 2,
                q: 0,
                basis: w20.clone(),
            },
            HodgePiece {
                p: 1,
                q: 1,
                basis: w11,
            },
            HodgePiece {
                p: 0,
                q: 2,
                basis: w20.map(|z| z.conj()),
            },
        ],
    )
    .expect("valid structure");
    let hs = base.transformed(&change).expect("valid structure");
    let q0 = ZMatrix::from_i64(3, 3, &[scale, 0, 0, 0, -scale, 0, 0, 0, -scale]);
    let mz = ZMatrix::from_fn(3, 3, |r, c| m[r][c].into());
    let q = &(&mz.transpose() * &q0) * &mz;
    (
        hs,
        PolarizationForm::new(q.to_rational(), 2).expect("valid polarization"),
    )
}

/// Polarized weight-three structure with all Hodge numbers one, on the
/// standard symplectic lattice of rank four, moved by a random real
/// symplectic matrix.
pub fn random_weight_three<R: Rng + ?Sized>(rng: &mut R) -> (HodgeStructure, PolarizationForm) {
    let s = random_symplectic(rng, 2);
    let one = Complex::new(1.0, 0.0);
    let i = Complex::new(0.0, 1.0);
    let zero = Complex::new(0.0, 0.0);
    let w30 = CMat::from_column_slice(4, 1, &[one, zero, i, zero]);
    let w21 = CMat::from_column_slice(4, 1, &[zero, one, zero, -i]);
    let base = HodgeStructure::new(
        3,
        4,
        vec![
            HodgePiece {
                p: 3,
                q: 0,
                basis: w30.clone(),
            },
            HodgePiece {
                p: 2,
                q: 1,
                basis: w21.clone(),
            },
            HodgePiece {
                p: 1,
                q: 2,
                basis: w21.map(|z| z.conj()),
            },
            HodgePiece {
                p: 0,
                q: 3,
                basis: w30.map(|z| z.conj()),
            },
        ],
    )
    .expect("valid structure");
    let hs = base.transformed(&s).expect("valid structure");
    let q = IntegralSkewForm::standard(2).gram().to_rational();
    (hs, PolarizationForm::new(q, 3).expect("valid polarization"))
}

/// Weight-one structure of a random elliptic curve with its polarization.
pub fn random_weight_one<R: Rng + ?Sized>(rng: &mut R) -> (HodgeStructure, PolarizationForm) {
    let tau = random_upper_half_plane(rng);
    (
        weight_one_curve(tau).expect("upper half-plane"),
        curve_polarization(),
    )
}
