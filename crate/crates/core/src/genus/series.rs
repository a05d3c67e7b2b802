//! Multiplicative sequences from a characteristic power series, the
//! `Â`-series, the Chern character and Pontryagin classes.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use super::poly::{Polynomial, Var};
use crate::error::{Error, Result};
use crate::exact::{int, Rational};

/// Power series `1 + q_1 z + q_2 z^2 + ...` truncated at a finite order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PowerSeriesQ {
    coeffs: Vec<Rational>,
}

impl PowerSeriesQ {
    pub fn new(coeffs: Vec<Rational>) -> Result<Self> {
        match coeffs.first() {
            Some(c) if c.is_one() => Ok(Self { coeffs }),
            _ => Err(Error::InvalidArgument(
                "characteristic series must start with q0 = 1".into(),
            )),
        }
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// `q_k`, zero beyond the stored order.
    pub fn coeff(&self, k: usize) -> Rational {
        self.coeffs.get(k).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }
}

fn factorial(n: usize) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * BigInt::from(k))
}

/// Reciprocal of a series with nonzero constant term, to `order`.
pub fn invert_series(a: &[Rational], order: usize) -> Vec<Rational> {
    assert!(
        !a[0].is_zero(),
        "series must have an invertible constant term"
    );
    let mut b = vec![Rational::zero(); order + 1];
    b[0] = a[0].recip();
    for n in 1..=order {
        let mut s = Rational::zero();
        for k in 1..=n.min(a.len() - 1) {
            s += &a[k] * &b[n - k];
        }
        b[n] = -s * &b[0];
    }
    b
}

/// Coefficients of `(z/2) / sinh(z/2)` in the variable `w = z^2`.
///
/// Pontryagin roots enter squared, so the series is indexed by `w`; this
/// gives `q_1 = -1/24` and `q_2 = 7/5760`.
pub fn a_hat_q_coefficients(order: usize) -> PowerSeriesQ {
    // sinh(z/2)/(z/2) = sum_k w^k / (4^k (2k+1)!)
    let sinh_ratio: Vec<Rational> = (0..=order)
        .map(|k| {
            Rational::new(
                BigInt::one(),
                num_traits::pow(BigInt::from(4), k) * factorial(2 * k + 1),
            )
        })
        .collect();
    PowerSeriesQ::new(invert_series(&sinh_ratio, order)).expect("constant term is one")
}

/// Partitions of `n` into at most `max_parts` parts, weakly decreasing.
pub fn partitions(n: usize, max_parts: usize) -> Vec<Vec<usize>> {
    fn rec(
        n: usize,
        max_part: usize,
        parts_left: usize,
        cur: &mut Vec<usize>,
        out: &mut Vec<Vec<usize>>,
    ) {
        if n == 0 {
            out.push(cur.clone());
            return;
        }
        if parts_left == 0 {
            return;
        }
        for p in (1..=max_part.min(n)).rev() {
            cur.push(p);
            rec(n - p, p, parts_left - 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(n, n, max_parts, &mut Vec::new(), &mut out);
    out
}

/// Polynomial in explicit roots `b_1..b_m`, keyed by exponent vectors.
type RootPoly = BTreeMap<Vec<u32>, Rational>;

fn root_mul(a: &RootPoly, b: &RootPoly) -> RootPoly {
    let mut out = RootPoly::new();
    for (ea, ca) in a {
        for (eb, cb) in b {
            let e: Vec<u32> = ea.iter().zip(eb).map(|(x, y)| x + y).collect();
            let entry = out.entry(e).or_insert_with(Rational::zero);
            *entry += ca * cb;
        }
    }
    out.retain(|_, c| !c.is_zero());
    out
}

fn elementary_root_poly(m: usize, k: usize) -> RootPoly {
    let mut out = RootPoly::new();
    for mask in 0u32..(1 << m) {
        if mask.count_ones() as usize == k {
            let e: Vec<u32> = (0..m).map(|i| (mask >> i) & 1).collect();
            out.insert(e, Rational::one());
        }
    }
    out
}

/// Monomial symmetric polynomial `m_λ` in `m` roots.
fn monomial_symmetric(lambda: &[usize], m: usize) -> RootPoly {
    let mut exps: Vec<u32> = lambda.iter().map(|&x| x as u32).collect();
    exps.resize(m, 0);
    exps.sort_unstable();
    let mut out = RootPoly::new();
    loop {
        out.insert(exps.clone(), Rational::one());
        if !next_permutation(&mut exps) {
            break;
        }
    }
    out
}

fn next_permutation(v: &mut [u32]) -> bool {
    if v.len() < 2 {
        return false;
    }
    let mut i = v.len() - 1;
    while i > 0 && v[i - 1] >= v[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = v.len() - 1;
    while v[j] <= v[i - 1] {
        j -= 1;
    }
    v.swap(i - 1, j);
    v[i..].reverse();
    true
}

/// Rewrites a symmetric polynomial in `m` roots in the elementary symmetric
/// functions, named by `var(i)`, by repeatedly cancelling the
/// lexicographically leading monomial.
fn to_elementary(mut f: RootPoly, m: usize, var: impl Fn(usize) -> Var) -> Polynomial {
    let es: Vec<RootPoly> = (0..=m).map(|k| elementary_root_poly(m, k)).collect();
    let mut out = Polynomial::zero();
    while let Some((lead, c)) = f.iter().next_back().map(|(e, c)| (e.clone(), c.clone())) {
        let mut mono = Polynomial::one();
        let mut prod = RootPoly::from([(vec![0; m], Rational::one())]);
        for k in 1..=m {
            let next = if k < m { lead[k] } else { 0 };
            let power = lead[k - 1]
                .checked_sub(next)
                .expect("leading monomial of a symmetric polynomial is a partition");
            for _ in 0..power {
                prod = root_mul(&prod, &es[k]);
            }
            mono = &mono * &Polynomial::var(var(k)).pow(power);
        }
        out = &out + &mono.scale(&c);
        for (e, pc) in prod {
            let entry = f.entry(e).or_insert_with(Rational::zero);
            *entry -= &c * pc;
        }
        f.retain(|_, x| !x.is_zero());
    }
    out
}

/// Multiplicative sequence `Q_1..Q_m` of `q`: the `z^j` coefficient of
/// `prod_i q(b_i z)`, rewritten in `p_k = e_k(b)`.
pub fn q_series_for_p(q: &PowerSeriesQ, order: usize) -> Vec<Polynomial> {
    q_series_in(q, order, order, Var::p)
}

/// As [`q_series_for_p`] with `roots` auxiliary roots and the elementary
/// functions named by `var`. With `roots >= order` the result is the
/// universal sequence; fewer roots set `p_k = 0` for `k > roots`.
pub fn q_series_in(
    q: &PowerSeriesQ,
    order: usize,
    roots: usize,
    var: impl Fn(usize) -> Var + Copy,
) -> Vec<Polynomial> {
    let m = roots.max(1);
    (1..=order)
        .map(|j| {
            let mut sym = RootPoly::new();
            for lambda in partitions(j, m) {
                let coeff = lambda
                    .iter()
                    .fold(Rational::one(), |acc, &k| acc * q.coeff(k));
                if coeff.is_zero() {
                    continue;
                }
                for (e, c) in monomial_symmetric(&lambda, m) {
                    let entry = sym.entry(e).or_insert_with(Rational::zero);
                    *entry += &coeff * c;
                }
            }
            sym.retain(|_, c| !c.is_zero());
            to_elementary(sym, m, var)
        })
        .collect()
}

/// `Â_1..Â_order` in Pontryagin variables.
pub fn a_hat_series(order: usize) -> Vec<Polynomial> {
    q_series_for_p(&a_hat_q_coefficients(order), order)
}

/// `1 + Â_1 + ... + Â_order`.
pub fn a_hat_total(order: usize) -> Polynomial {
    a_hat_series(order)
        .iter()
        .fold(Polynomial::one(), |acc, t| &acc + t)
}

/// `ch_0..ch_order` of a rank-`rank` bundle in its Chern classes `c_i` of
/// the given family: `ch_k = s_k / k!` with power sums from Newton's
/// identities.
pub fn chern_character(rank: usize, order: usize, family: u8) -> Result<Vec<Polynomial>> {
    if rank == 0 {
        return Err(Error::InvalidArgument(
            "bundle rank must be at least 1".into(),
        ));
    }
    let e = |i: usize| {
        if i <= rank {
            Polynomial::var(Var::c_in(family, i))
        } else {
            Polynomial::zero()
        }
    };
    let mut s: Vec<Polynomial> = vec![Polynomial::constant(int(rank as i64))];
    for k in 1..=order {
        let mut sk = e(k).scale(&int(if k % 2 == 1 { k as i64 } else { -(k as i64) }));
        for i in 1..k {
            let sign = if i % 2 == 1 { int(1) } else { int(-1) };
            sk = &sk + &(&e(i) * &s[k - i]).scale(&sign);
        }
        s.push(sk);
    }
    Ok(s.into_iter()
        .enumerate()
        .map(|(k, sk)| sk.scale(&Rational::new(BigInt::one(), factorial(k))))
        .collect())
}

/// Chern classes of the complexification of a complex bundle with classes
/// `c[0] = c_1, c[1] = c_2, ...`: `c(F) c(F̄)` with `c_i(F̄) = (-1)^i c_i(F)`.
pub fn complexify(c: &[Polynomial]) -> Vec<Polynomial> {
    let r = c.len();
    let get = |i: usize| {
        if i == 0 {
            Polynomial::one()
        } else {
            c[i - 1].clone()
        }
    };
    (1..=2 * r)
        .map(|k| {
            let mut acc = Polynomial::zero();
            for i in k.saturating_sub(r)..=k.min(r) {
                let j = k - i;
                let term = &get(i) * &get(j);
                acc = if j % 2 == 0 {
                    &acc + &term
                } else {
                    &acc - &term
                };
            }
            acc
        })
        .collect()
}

/// `p_i = (-1)^i c_{2i}` from the Chern classes `c_1, c_2, ...` of a
/// complexified bundle.
pub fn pontryagin(c_complex: &[Polynomial]) -> Vec<Polynomial> {
    (1..=c_complex.len() / 2)
        .map(|i| {
            let c = &c_complex[2 * i - 1];
            if i % 2 == 0 {
                c.clone()
            } else {
                -c
            }
        })
        .collect()
}
