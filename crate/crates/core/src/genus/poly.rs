//! Multivariate polynomials with exact rational coefficients in Pontryagin
//! and Chern variables.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Signed, Zero};

use crate::exact::Rational;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum VarKind {
    Pontryagin,
    Chern,
}

/// A variable `p_i` or `c_i`; `family` distinguishes independent bundles.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Var {
    pub kind: VarKind,
    pub family: u8,
    pub index: usize,
}

impl Var {
    pub fn p(index: usize) -> Self {
        Self::p_in(0, index)
    }

    pub fn c(index: usize) -> Self {
        Self::c_in(0, index)
    }

    pub fn p_in(family: u8, index: usize) -> Self {
        Self {
            kind: VarKind::Pontryagin,
            family,
            index,
        }
    }

    pub fn c_in(family: u8, index: usize) -> Self {
        Self {
            kind: VarKind::Chern,
            family,
            index,
        }
    }

    /// Cohomological degree: `4i` for `p_i`, `2i` for `c_i`.
    pub fn cohomological_degree(&self) -> usize {
        match self.kind {
            VarKind::Pontryagin => 4 * self.index,
            VarKind::Chern => 2 * self.index,
        }
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let letter = match self.kind {
            VarKind::Pontryagin => 'p',
            VarKind::Chern => 'c',
        };
        write!(f, "{letter}{}", self.index)?;
        for _ in 0..self.family {
            write!(f, "'")?;
        }
        Ok(())
    }
}

/// Product of variable powers; the empty monomial is `1`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Monomial(BTreeMap<Var, u32>);

impl Monomial {
    pub fn one() -> Self {
        Self::default()
    }

    pub fn var(v: Var) -> Self {
        Self(BTreeMap::from([(v, 1)]))
    }

    pub fn exponent(&self, v: Var) -> u32 {
        self.0.get(&v).copied().unwrap_or(0)
    }

    pub fn vars(&self) -> impl Iterator<Item = (Var, u32)> + '_ {
        self.0.iter().map(|(v, e)| (*v, *e))
    }

    /// Sum of `index * exponent`.
    pub fn weight(&self) -> usize {
        self.0.iter().map(|(v, e)| v.index * *e as usize).sum()
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    fn times(&self, other: &Self) -> Self {
        let mut out = self.0.clone();
        for (v, e) in &other.0 {
            *out.entry(*v).or_insert(0) += e;
        }
        Self(out)
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "1");
        }
        let parts: Vec<String> = self
            .0
            .iter()
            .rev()
            .map(|(v, e)| {
                if *e == 1 {
                    v.to_string()
                } else {
                    format!("{v}^{e}")
                }
            })
            .collect();
        write!(f, "{}", parts.join("*"))
    }
}

/// Polynomial with exact rational coefficients; zero terms are never stored.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Polynomial {
    terms: BTreeMap<Monomial, Rational>,
}

impl Polynomial {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::constant(Rational::one())
    }

    pub fn constant(c: Rational) -> Self {
        Self::term(c, Monomial::one())
    }

    pub fn var(v: Var) -> Self {
        Self::term(Rational::one(), Monomial::var(v))
    }

    pub fn term(c: Rational, m: Monomial) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        Self { terms }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Rational)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, m: &Monomial) -> Rational {
        self.terms.get(m).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn constant_term(&self) -> Rational {
        self.coefficient(&Monomial::one())
    }

    pub fn add_term(&mut self, m: Monomial, c: Rational) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(m).or_insert_with(Rational::zero);
        *entry += c;
        if entry.is_zero() {
            self.terms.retain(|_, v| !v.is_zero());
        }
    }

    pub fn scale(&self, k: &Rational) -> Self {
        if k.is_zero() {
            return Self::zero();
        }
        Self {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), c * k)).collect(),
        }
    }

    pub fn pow(&self, e: u32) -> Self {
        (0..e).fold(Self::one(), |acc, _| &acc * self)
    }

    /// Terms of weight exactly `w`.
    pub fn weight_part(&self, w: usize) -> Self {
        Self {
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| m.weight() == w)
                .map(|(m, c)| (m.clone(), c.clone()))
                .collect(),
        }
    }

    /// Drops terms of weight above `w`.
    pub fn truncate(&self, w: usize) -> Self {
        Self {
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| m.weight() <= w)
                .map(|(m, c)| (m.clone(), c.clone()))
                .collect(),
        }
    }

    pub fn is_homogeneous(&self) -> bool {
        let mut weights = self.terms.keys().map(Monomial::weight);
        match weights.next() {
            Some(w) => weights.all(|x| x == w),
            None => true,
        }
    }

    pub fn variables(&self) -> Vec<Var> {
        let mut vs: Vec<Var> = self
            .terms
            .keys()
            .flat_map(|m| m.0.keys().copied())
            .collect();
        vs.sort();
        vs.dedup();
        vs
    }

    /// Replaces each variable `v` by `f(v)`, keeping it when `f` returns `None`.
    pub fn substitute(&self, f: impl Fn(Var) -> Option<Polynomial>) -> Self {
        let mut out = Self::zero();
        for (m, c) in &self.terms {
            let mut prod = Self::constant(c.clone());
            for (v, e) in m.vars() {
                let base = f(v).unwrap_or_else(|| Self::var(v));
                prod = &prod * &base.pow(e);
            }
            out = &out + &prod;
        }
        out
    }

    /// Evaluates at rational values of the variables.
    pub fn eval(&self, f: impl Fn(Var) -> Rational) -> Rational {
        self.terms.iter().fold(Rational::zero(), |acc, (m, c)| {
            let val = m
                .vars()
                .fold(c.clone(), |p, (v, e)| p * num_traits::pow(f(v), e as usize));
            acc + val
        })
    }
}

impl Add for &Polynomial {
    type Output = Polynomial;
    fn add(self, rhs: &Polynomial) -> Polynomial {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }
}

impl Sub for &Polynomial {
    type Output = Polynomial;
    fn sub(self, rhs: &Polynomial) -> Polynomial {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), -c.clone());
        }
        out
    }
}

impl Mul for &Polynomial {
    type Output = Polynomial;
    fn mul(self, rhs: &Polynomial) -> Polynomial {
        let mut out = Polynomial::zero();
        for (m1, c1) in &self.terms {
            for (m2, c2) in &rhs.terms {
                out.add_term(m1.times(m2), c1 * c2);
            }
        }
        out
    }
}

impl Neg for &Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        self.scale(&-Rational::one())
    }
}

/// Terms are listed with the highest variable's exponent first, so
/// `-1/1440 p2 + 7/5760 p1^2` rather than the reverse.
impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut vars = self.variables();
        vars.reverse();
        let mut terms: Vec<(&Monomial, &Rational)> = self.terms.iter().collect();
        terms.sort_by(|(a, _), (b, _)| {
            let ka: Vec<u32> = vars.iter().map(|v| a.exponent(*v)).collect();
            let kb: Vec<u32> = vars.iter().map(|v| b.exponent(*v)).collect();
            kb.cmp(&ka)
        });
        for (i, (m, c)) in terms.iter().enumerate() {
            let neg = c.is_negative();
            let abs = c.abs();
            match (i, neg) {
                (0, true) => write!(f, "-")?,
                (0, false) => {}
                (_, true) => write!(f, " - ")?,
                (_, false) => write!(f, " + ")?,
            }
            if m.is_one() {
                write!(f, "{abs}")?;
            } else if abs.is_one() {
                write!(f, "{m}")?;
            } else {
                write!(f, "{abs} {m}")?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{int, rat};

    #[test]
    fn arithmetic_and_display() {
        let p1 = Polynomial::var(Var::p(1));
        let p2 = Polynomial::var(Var::p(2));
        let q = &p2.scale(&rat(-1, 1440)) + &p1.pow(2).scale(&rat(7, 5760));
        assert_eq!(q.to_string(), "-1/1440 p2 + 7/5760 p1^2");
        assert!(q.is_homogeneous());
        assert_eq!((&q - &q), Polynomial::zero());
        assert_eq!(Polynomial::zero().to_string(), "0");
        let r = &Polynomial::one() - &p1;
        assert_eq!(r.to_string(), "-p1 + 1");
    }

    #[test]
    fn substitution_and_eval() {
        let c1 = Polynomial::var(Var::c(1));
        let sq = c1.pow(2);
        let sub = sq.substitute(|v| {
            (v == Var::c(1)).then(|| &Polynomial::var(Var::c(2)) + &Polynomial::one())
        });
        assert_eq!(sub.eval(|_| int(2)), int(9));
        assert_eq!(sub.truncate(1).weight_part(0), Polynomial::one());
    }
}
