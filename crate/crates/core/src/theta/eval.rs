//! Truncated evaluation of `Θ[u, v](z, Z)` with a certified tail bound.

use std::fmt;

use nalgebra::Complex;

use crate::error::{Error, Result};
use crate::exact::{parse_rational, Rational};
use crate::linalg::{min_sym_eigenvalue, C64};
use crate::siegel::SiegelPoint;

/// Largest admissible truncation radius.
pub const RADIUS_CAP: f64 = 40.0;
/// Smallest admissible absolute tolerance.
pub const MIN_TOL: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Parity {
    Even,
    Odd,
}

impl fmt::Display for Parity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Parity::Even => "even",
            Parity::Odd => "odd",
        })
    }
}

/// Half-integer characteristic `(u, v)` reduced mod `Z^g`, stored as bits:
/// entry `1` means `1/2`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Characteristic {
    u: Vec<u8>,
    v: Vec<u8>,
}

impl Characteristic {
    /// Builds `(u, v) = (a/2, b/2)` reduced mod 1.
    pub fn from_halves(a: &[i64], b: &[i64]) -> Result<Self> {
        if a.len() != b.len() {
            return Err(Error::Dimension(format!(
                "u has length {} but v has length {}",
                a.len(),
                b.len()
            )));
        }
        let bits = |x: &[i64]| x.iter().map(|k| k.rem_euclid(2) as u8).collect();
        Ok(Self {
            u: bits(a),
            v: bits(b),
        })
    }

    pub fn zero(g: usize) -> Self {
        Self {
            u: vec![0; g],
            v: vec![0; g],
        }
    }

    /// Parses `u1,..,ug:v1,..,vg` with entries like `0`, `1/2`, `1`.
    pub fn parse(s: &str) -> Result<Self> {
        let (us, vs) = s
            .split_once(':')
            .ok_or_else(|| Error::InvalidArgument(format!("characteristic `{s}` needs `u:v`")))?;
        let halves = |part: &str| -> Result<Vec<i64>> {
            part.split(',')
                .filter(|t| !t.trim().is_empty())
                .map(|t| {
                    let q: Rational = parse_rational(t.trim())? * Rational::from_integer(2.into());
                    if !q.is_integer() {
                        return Err(Error::InvalidArgument(format!(
                            "characteristic entry `{t}` is not a half-integer"
                        )));
                    }
                    i64::try_from(q.to_integer())
                        .map_err(|_| Error::InvalidArgument(format!("entry `{t}` is too large")))
                })
                .collect()
        };
        Self::from_halves(&halves(us)?, &halves(vs)?)
    }

    pub fn g(&self) -> usize {
        self.u.len()
    }

    pub fn u_bits(&self) -> &[u8] {
        &self.u
    }

    pub fn v_bits(&self) -> &[u8] {
        &self.v
    }

    pub fn u(&self) -> Vec<f64> {
        self.u.iter().map(|&b| 0.5 * f64::from(b)).collect()
    }

    pub fn v(&self) -> Vec<f64> {
        self.v.iter().map(|&b| 0.5 * f64::from(b)).collect()
    }

    /// Odd iff `4⟨u, v⟩` is odd.
    pub fn parity(&self) -> Parity {
        let dot: u32 = self
            .u
            .iter()
            .zip(&self.v)
            .map(|(a, b)| u32::from(a & b))
            .sum();
        if dot % 2 == 1 {
            Parity::Odd
        } else {
            Parity::Even
        }
    }

    /// All `2^{2g}` characteristics in lexicographic bit order.
    pub fn all(g: usize) -> Vec<Self> {
        (0u32..(1u32 << (2 * g)))
            .map(|mask| {
                let bit = |i: usize| ((mask >> (2 * g - 1 - i)) & 1) as u8;
                Self {
                    u: (0..g).map(bit).collect(),
                    v: (g..2 * g).map(bit).collect(),
                }
            })
            .collect()
    }
}

impl fmt::Display for Characteristic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let show = |x: &[u8]| {
            x.iter()
                .map(|&b| if b == 1 { "1/2" } else { "0" })
                .collect::<Vec<_>>()
                .join(",")
        };
        write!(f, "{}:{}", show(&self.u), show(&self.v))
    }
}

/// Truncation parameters for one evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThetaTruncation {
    pub tol: f64,
    pub radius: f64,
    pub lambda_min: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThetaValue {
    pub value: C64,
    pub radius: f64,
    pub terms: usize,
}

/// Bound on the summands with `k <= |x| < k + 1`, summed over `k >= r`:
/// at most `(2k+3)^g` points, each at most `exp(-πλk² + 2πks)`.
fn tail_bound(g: usize, lambda: f64, s: f64, r: usize) -> f64 {
    let mut total = 0.0;
    let mut k = r;
    loop {
        let kf = k as f64;
        let log_term = (g as f64) * (2.0 * kf + 3.0).ln()
            - std::f64::consts::PI * (lambda * kf * kf - 2.0 * kf * s);
        let term = log_term.exp();
        total += term;
        if kf > s / lambda + 1.0 && (term < 1e-300 || term < total * 1e-17) {
            return total;
        }
        k += 1;
    }
}

/// Smallest integer radius whose tail bound is below `tol`.
pub fn truncation_radius(
    g: usize,
    lambda_min: f64,
    im_norm: f64,
    tol: f64,
) -> Result<ThetaTruncation> {
    if !(tol >= MIN_TOL) {
        return Err(Error::InvalidArgument(format!(
            "tolerance {tol:e} is below the minimum {MIN_TOL:e}"
        )));
    }
    if !(lambda_min > 0.0) {
        return Err(Error::NotPositiveDefinite(lambda_min));
    }
    let start = ((im_norm / lambda_min).ceil() as usize).max(1);
    let mut r = start;
    while tail_bound(g, lambda_min, im_norm, r) >= tol {
        r += 1;
        if r > 100_000 {
            break;
        }
    }
    let radius = r as f64;
    if radius > RADIUS_CAP {
        return Err(Error::TruncationUnreachable {
            radius,
            cap: RADIUS_CAP,
        });
    }
    Ok(ThetaTruncation {
        tol,
        radius,
        lambda_min,
    })
}

/// Sum with a fixed pairwise reduction tree.
fn pairwise_sum(v: &[C64]) -> C64 {
    match v.len() {
        0 => Complex::new(0.0, 0.0),
        1 => v[0],
        n => pairwise_sum(&v[..n / 2]) + pairwise_sum(&v[n / 2..]),
    }
}

fn validate(z: &SiegelPoint, ch: &Characteristic, arg: &[C64]) -> Result<usize> {
    let g = z.g();
    if ch.g() != g || arg.len() != g {
        return Err(Error::Dimension(format!(
            "period has genus {g}, characteristic {} and argument {}",
            ch.g(),
            arg.len()
        )));
    }
    Ok(g)
}

/// `Σ_{x ∈ Z^g + u, |x| <= R} exp(iπ xᵀZx + 2πi xᵀ(z + v))` with `R` chosen
/// so the omitted terms sum to less than `tol` in absolute value.
pub fn theta_eval(
    z: &SiegelPoint,
    ch: &Characteristic,
    arg: &[C64],
    tol: f64,
) -> Result<ThetaValue> {
    let g = validate(z, ch, arg)?;
    let lambda = min_sym_eigenvalue(&z.im());
    let im_norm = arg.iter().map(|w| w.im * w.im).sum::<f64>().sqrt();
    let trunc = truncation_radius(g, lambda, im_norm, tol)?;
    theta_sum(z, ch, arg, trunc.radius)
}

/// The truncated sum over `|x| <= radius`. Terms are visited in
/// lexicographic order over the integer box and summed pairwise, so the
/// result is bit-reproducible.
pub fn theta_sum(
    z: &SiegelPoint,
    ch: &Characteristic,
    arg: &[C64],
    radius: f64,
) -> Result<ThetaValue> {
    let g = validate(z, ch, arg)?;
    if !(radius > 0.0) || radius > 2.0 * RADIUS_CAP {
        return Err(Error::InvalidArgument(format!(
            "radius {radius} out of range"
        )));
    }
    if g == 0 {
        return Ok(ThetaValue {
            value: Complex::new(1.0, 0.0),
            radius,
            terms: 1,
        });
    }
    let zm = z.z();
    let u = ch.u();
    let shifted: Vec<C64> = arg.iter().zip(ch.v()).map(|(w, v)| w + v).collect();
    let bound = radius.ceil() as i64 + 1;
    let mut n = vec![-bound; g];
    let mut terms = Vec::new();
    let pi = std::f64::consts::PI;
    let i = Complex::new(0.0, 1.0);
    loop {
        let x: Vec<f64> = n.iter().zip(&u).map(|(&k, &a)| k as f64 + a).collect();
        if x.iter().map(|a| a * a).sum::<f64>() <= radius * radius {
            let mut quad = Complex::new(0.0, 0.0);
            for a in 0..g {
                for b in 0..g {
                    quad += zm[(a, b)] * (x[a] * x[b]);
                }
            }
            let lin: C64 = x.iter().zip(&shifted).map(|(a, w)| w * *a).sum();
            terms.push((i * pi * quad + i * 2.0 * pi * lin).exp());
        }
        let mut idx = g;
        loop {
            if idx == 0 {
                return Ok(ThetaValue {
                    value: pairwise_sum(&terms),
                    radius,
                    terms: terms.len(),
                });
            }
            idx -= 1;
            if n[idx] < bound {
                n[idx] += 1;
                for later in n.iter_mut().skip(idx + 1) {
                    *later = -bound;
                }
                break;
            }
        }
    }
}

/// Which lattice direction a quasi-periodicity shift uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ShiftKind {
    /// `z -> z + m`.
    Integer,
    /// `z -> z + Zm`.
    Period,
}

/// Defect of the transformation law under `z -> z + m` or `z -> z + Zm`.
///
/// Integer shifts return `|Θ(z+m) - e^{2πi⟨u,m⟩}Θ(z)|`. Period shifts return
/// `|Θ(z+Zm)/e(m) - Θ(z)|` with `e(m) = exp(-iπ⟨m,Zm⟩ - 2πi⟨m,z+v⟩)`; the
/// shifted value is evaluated at tolerance `tol·min(1, |e(m)|)`, so both
/// defects are bounded by `2·tol` when the law holds.
pub fn quasi_periodicity_defect(
    z: &SiegelPoint,
    ch: &Characteristic,
    arg: &[C64],
    m: &[i64],
    kind: ShiftKind,
    tol: f64,
) -> Result<f64> {
    let g = validate(z, ch, arg)?;
    if m.len() != g {
        return Err(Error::Dimension(format!(
            "shift has length {}, expected {g}",
            m.len()
        )));
    }
    let pi = std::f64::consts::PI;
    let i = Complex::new(0.0, 1.0);
    let mf: Vec<f64> = m.iter().map(|&k| k as f64).collect();
    let base = theta_eval(z, ch, arg, tol)?.value;
    match kind {
        ShiftKind::Integer => {
            let moved: Vec<C64> = arg.iter().zip(&mf).map(|(w, k)| w + k).collect();
            let shifted = theta_eval(z, ch, &moved, tol)?.value;
            let phase: f64 = ch.u().iter().zip(&mf).map(|(a, k)| a * k).sum();
            Ok((shifted - (i * 2.0 * pi * phase).exp() * base).norm())
        }
        ShiftKind::Period => {
            let zm = z.z();
            let zmv: Vec<C64> = (0..g)
                .map(|a| (0..g).map(|b| zm[(a, b)] * mf[b]).sum())
                .collect();
            let moved: Vec<C64> = arg.iter().zip(&zmv).map(|(w, s)| w + s).collect();
            let quad: C64 = mf.iter().zip(&zmv).map(|(k, s)| s * *k).sum();
            let lin: C64 = mf
                .iter()
                .zip(arg.iter().zip(ch.v()))
                .map(|(k, (w, v))| (w + v) * *k)
                .sum();
            let factor = (-i * pi * quad - i * 2.0 * pi * lin).exp();
            let shifted_tol = (tol * factor.norm().min(1.0)).max(MIN_TOL);
            let shifted = theta_eval(z, ch, &moved, shifted_tol)?.value;
            Ok((shifted / factor - base).norm())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::CMat;

    fn c(re: f64, im: f64) -> C64 {
        Complex::new(re, im)
    }

    fn scalar(zv: C64) -> SiegelPoint {
        SiegelPoint::new(CMat::from_element(1, 1, zv)).unwrap()
    }

    #[test]
    fn brute_force_at_i() {
        let v = theta_eval(
            &scalar(c(0.0, 1.0)),
            &Characteristic::zero(1),
            &[c(0.0, 0.0)],
            1e-14,
        )
        .unwrap();
        let oracle: f64 = (-10i32..=10)
            .map(|n| (-std::f64::consts::PI * f64::from(n * n)).exp())
            .sum();
        assert!((v.value - c(oracle, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn odd_characteristic_vanishes() {
        let ch = Characteristic::parse("1/2:1/2").unwrap();
        assert_eq!(ch.parity(), Parity::Odd);
        for zv in [c(0.0, 1.0), c(1.0, 2.0)] {
            let v = theta_eval(&scalar(zv), &ch, &[c(0.0, 0.0)], 1e-12).unwrap();
            assert!(v.value.norm() <= 1e-12);
        }
    }

    #[test]
    fn parity_counts() {
        for (g, odd) in [(1, 1), (2, 6), (3, 28)] {
            let all = Characteristic::all(g);
            assert_eq!(all.len(), 1 << (2 * g));
            assert_eq!(
                all.iter().filter(|c| c.parity() == Parity::Odd).count(),
                odd
            );
        }
    }

    #[test]
    fn parse_and_display() {
        let ch = Characteristic::parse("1/2,1:0,3/2").unwrap();
        assert_eq!(ch.to_string(), "1/2,0:0,1/2");
        assert!(Characteristic::parse("1/3:0").is_err());
        assert!(Characteristic::parse("0,0:0").is_err());
    }

    #[test]
    fn zero_shift_has_zero_defect() {
        let z = scalar(c(0.2, 1.3));
        let ch = Characteristic::zero(1);
        for kind in [ShiftKind::Integer, ShiftKind::Period] {
            let d = quasi_periodicity_defect(&z, &ch, &[c(0.3, 0.1)], &[0], kind, 1e-12).unwrap();
            assert_eq!(d, 0.0);
        }
    }

    #[test]
    fn tolerance_and_cap() {
        assert!(matches!(
            truncation_radius(1, 1.0, 0.0, 1e-16),
            Err(Error::InvalidArgument(_))
        ));
        let err = truncation_radius(2, 1e-4, 0.0, 1e-12).unwrap_err();
        assert!(err.is_numerical());
        let t = truncation_radius(1, 1.0, 0.0, 1e-12).unwrap();
        assert!(t.radius <= 4.0);
    }
}
