//! Multipliers for an integral unimodular skew form and their theta
//! characteristics.
//!
//! A multiplier satisfies `α(x+y) = (-1)^{ω(x,y)} α(x) α(y)`. Two
//! multipliers differ by a character `(-1)^{ω(θ,·)}`, so every one has the
//! form `α(y) = (-1)^{q(y) + ω(θ,y)}` with the fixed solution
//! `q(y) = Σ_{i<j} ω_ij y_i y_j`, which vanishes on basis vectors.

use num_bigint::BigInt;
use num_integer::Integer;

use crate::error::{Error, Result};
use crate::lattice::{is_unimodular, IntegralSkewForm};
use crate::theta::eval::Characteristic;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Multiplier {
    omega: IntegralSkewForm,
    /// `θ mod 2`.
    theta: Vec<u8>,
}

fn parity_of(b: &BigInt) -> u8 {
    u8::from(b.is_odd())
}

impl Multiplier {
    pub fn from_theta(theta: &[i64], omega: &IntegralSkewForm) -> Result<Self> {
        if theta.len() != omega.rank() {
            return Err(Error::Dimension(format!(
                "θ has length {}, lattice rank is {}",
                theta.len(),
                omega.rank()
            )));
        }
        Ok(Self {
            omega: omega.clone(),
            theta: theta.iter().map(|t| t.rem_euclid(2) as u8).collect(),
        })
    }

    pub fn theta_vector(&self) -> &[u8] {
        &self.theta
    }

    pub fn omega(&self) -> &IntegralSkewForm {
        &self.omega
    }

    /// `α(y)` as `+1` or `-1`.
    pub fn eval(&self, y: &[i64]) -> Result<i8> {
        let n = self.omega.rank();
        if y.len() != n {
            return Err(Error::Dimension(format!(
                "vector has length {}, expected {n}",
                y.len()
            )));
        }
        let w = self.omega.gram();
        let odd: Vec<bool> = y.iter().map(|k| k % 2 != 0).collect();
        let mut exponent = 0u8;
        for i in 0..n {
            for j in 0..n {
                if !odd[j] {
                    continue;
                }
                let wij = parity_of(&w[(i, j)]);
                if odd[i] && i < j {
                    exponent ^= wij;
                }
                exponent ^= self.theta[i] & wij;
            }
        }
        Ok(if exponent == 0 { 1 } else { -1 })
    }

    /// Values `α(e_j)` on the lattice basis.
    pub fn basis_values(&self) -> Vec<i8> {
        let n = self.omega.rank();
        (0..n)
            .map(|j| {
                let mut e = vec![0i64; n];
                e[j] = 1;
                self.eval(&e).expect("basis vector")
            })
            .collect()
    }

    /// Checks `α(x+y) = (-1)^{ω(x,y)} α(x) α(y)`.
    pub fn cocycle_holds(&self, x: &[i64], y: &[i64]) -> Result<bool> {
        let sum: Vec<i64> = x.iter().zip(y).map(|(a, b)| a + b).collect();
        let sign: i8 = if self.omega.eval(x, y).is_odd() {
            -1
        } else {
            1
        };
        Ok(self.eval(&sum)? == sign * self.eval(x)? * self.eval(y)?)
    }
}

/// Solves `A t = s` over GF(2); `None` when singular.
fn solve_gf2(a: Vec<Vec<u8>>, s: Vec<u8>) -> Option<Vec<u8>> {
    let n = s.len();
    let mut rows: Vec<Vec<u8>> = a
        .into_iter()
        .zip(s)
        .map(|(mut r, b)| {
            r.push(b);
            r
        })
        .collect();
    for col in 0..n {
        let pivot = (col..n).find(|&r| rows[r][col] == 1)?;
        rows.swap(col, pivot);
        for r in 0..n {
            if r != col && rows[r][col] == 1 {
                let (src, dst) = if r < col {
                    let (lo, hi) = rows.split_at_mut(col);
                    (&hi[0], &mut lo[r])
                } else {
                    let (lo, hi) = rows.split_at_mut(r);
                    (&lo[col], &mut hi[0])
                };
                for (d, s) in dst.iter_mut().zip(src.iter()) {
                    *d ^= s;
                }
            }
        }
    }
    Some(rows.iter().map(|r| r[n]).collect())
}

/// The unique multiplier with `α(e_j) = ε_j` on the lattice basis.
pub fn multiplier_from_basis(eps: &[i8], omega: &IntegralSkewForm) -> Result<Multiplier> {
    let n = omega.rank();
    if eps.len() != n {
        return Err(Error::Dimension(format!(
            "need {n} basis values, got {}",
            eps.len()
        )));
    }
    if eps.iter().any(|&e| e != 1 && e != -1) {
        return Err(Error::InvalidArgument(
            "basis values must be +1 or -1".into(),
        ));
    }
    if !is_unimodular(omega) {
        return Err(Error::NotUnimodular(omega.determinant().to_string()));
    }
    // α(e_j) = (-1)^{Σ_i θ_i ω_ij}: solve ωᵀ θ = s mod 2.
    let w = omega.gram();
    let a: Vec<Vec<u8>> = (0..n)
        .map(|j| (0..n).map(|i| parity_of(&w[(i, j)])).collect())
        .collect();
    let s: Vec<u8> = eps.iter().map(|&e| u8::from(e == -1)).collect();
    let theta =
        solve_gf2(a, s).ok_or_else(|| Error::NotUnimodular("form is singular mod 2".into()))?;
    Ok(Multiplier {
        omega: omega.clone(),
        theta,
    })
}

fn require_standard(omega: &IntegralSkewForm) -> Result<usize> {
    let g = omega.rank() / 2;
    if omega.rank() % 2 != 0 || omega != &IntegralSkewForm::standard(g) {
        return Err(Error::InvalidArgument(
            "characteristics need the standard symplectic form".into(),
        ));
    }
    Ok(g)
}

/// `θ = (θ_1, θ_2)` along `Λ_1 ⊕ Λ_2`; `u = θ_1/2`, `v = θ_2/2` mod 1.
pub fn characteristic_from_multiplier(m: &Multiplier) -> Result<Characteristic> {
    let g = require_standard(&m.omega)?;
    let t: Vec<i64> = m.theta.iter().map(|&b| i64::from(b)).collect();
    Characteristic::from_halves(&t[..g], &t[g..])
}

/// Inverse of [`characteristic_from_multiplier`].
pub fn multiplier_from_characteristic(
    ch: &Characteristic,
    omega: &IntegralSkewForm,
) -> Result<Multiplier> {
    let g = require_standard(omega)?;
    if ch.g() != g {
        return Err(Error::Dimension(format!(
            "characteristic has genus {}, form {g}",
            ch.g()
        )));
    }
    let theta: Vec<i64> = ch
        .u_bits()
        .iter()
        .chain(ch.v_bits())
        .map(|&b| i64::from(b))
        .collect();
    Multiplier::from_theta(&theta, omega)
}

/// All `2^{2g}` multipliers, indexed by basis values in lexicographic order.
pub fn enumerate_multipliers(g: usize) -> Result<Vec<Multiplier>> {
    let omega = IntegralSkewForm::standard(g);
    let n = 2 * g;
    (0u32..(1u32 << n))
        .map(|mask| {
            let eps: Vec<i8> = (0..n)
                .map(|j| {
                    if (mask >> (n - 1 - j)) & 1 == 1 {
                        -1
                    } else {
                        1
                    }
                })
                .collect();
            multiplier_from_basis(&eps, &omega)
        })
        .collect()
}
