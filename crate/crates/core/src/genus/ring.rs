//! Finite graded ring models of rational cohomology and the twisted
//! K-theoretic pairing `ω⁺_a(x, y) = ∫ a · x · ι(y)`.

use num_bigint::BigInt;
use num_traits::{One, Zero};

use super::poly::{Polynomial, Var};
use super::series::a_hat_total;
use crate::error::{Error, Result};
use crate::exact::{int, is_unit, rat, Rational, ZMatrix};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BasisElement {
    pub name: String,
    pub degree: usize,
}

/// Element of a ring model, as coefficients on the model's basis.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RingElement {
    coeffs: Vec<Rational>,
}

impl RingElement {
    pub fn new(coeffs: Vec<Rational>) -> Self {
        Self { coeffs }
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    pub fn scale(&self, k: &Rational) -> Self {
        Self::new(self.coeffs.iter().map(|c| c * k).collect())
    }

    pub fn add(&self, other: &Self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| a + b)
                .collect(),
        )
    }

    pub fn sub(&self, other: &Self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| a - b)
                .collect(),
        )
    }
}

/// Graded-commutative algebra with a basis whose first element is the unit,
/// structure constants, and an integration functional on the top degree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CohomologyRingModel {
    dimension: usize,
    basis: Vec<BasisElement>,
    /// `mult[i][j]` is the product of basis elements `i` and `j`.
    mult: Vec<Vec<Vec<Rational>>>,
    integrate: Vec<Rational>,
    lattice: Vec<RingElement>,
}

impl CohomologyRingModel {
    /// `mult` lists nonzero products `(i, j, coefficients)`; the product
    /// `(j, i)` is filled in by graded commutativity when absent.
    pub fn new(
        dimension: usize,
        basis: Vec<BasisElement>,
        mult: Vec<(usize, usize, Vec<Rational>)>,
        integrate: Vec<Rational>,
        lattice: Vec<Vec<Rational>>,
    ) -> Result<Self> {
        let n = basis.len();
        let bad = |msg: String| Err(Error::RingModel(msg));
        if n == 0 {
            return bad("empty basis".into());
        }
        if basis[0].degree != 0 {
            return bad("first basis element must be the unit in degree 0".into());
        }
        if basis.iter().any(|b| b.degree > dimension) {
            return bad(format!("basis degree exceeds dimension {dimension}"));
        }
        if integrate.len() != n {
            return bad(format!(
                "integration functional has {} entries, expected {n}",
                integrate.len()
            ));
        }
        for (c, b) in integrate.iter().zip(&basis) {
            if !c.is_zero() && b.degree != dimension {
                return bad(format!(
                    "integration is nonzero on {} below top degree",
                    b.name
                ));
            }
        }
        let koszul = |i: usize, j: usize| {
            if basis[i].degree % 2 == 1 && basis[j].degree % 2 == 1 {
                -Rational::one()
            } else {
                Rational::one()
            }
        };
        let mut table: Vec<Vec<Option<Vec<Rational>>>> = vec![vec![None; n]; n];
        for (i, j, coeffs) in mult {
            if i >= n || j >= n {
                return bad(format!(
                    "product ({i}, {j}) refers to a missing basis element"
                ));
            }
            if coeffs.len() != n {
                return bad(format!(
                    "product ({i}, {j}) has {} coefficients, expected {n}",
                    coeffs.len()
                ));
            }
            let target = basis[i].degree + basis[j].degree;
            for (k, c) in coeffs.iter().enumerate() {
                if !c.is_zero() && basis[k].degree != target {
                    return bad(format!(
                        "product of {} and {} has a component in degree {}",
                        basis[i].name, basis[j].name, basis[k].degree
                    ));
                }
            }
            if let Some(prev) = &table[i][j] {
                if *prev != coeffs {
                    return bad(format!("conflicting entries for product ({i}, {j})"));
                }
            }
            table[i][j] = Some(coeffs);
        }
        let mut full = vec![vec![vec![Rational::zero(); n]; n]; n];
        for i in 0..n {
            for j in 0..n {
                full[i][j] = match (&table[i][j], &table[j][i]) {
                    (Some(a), Some(b)) => {
                        let s = koszul(i, j);
                        if a.iter().zip(b).any(|(x, y)| *x != y * &s) {
                            return bad(format!(
                                "products ({i}, {j}) and ({j}, {i}) are not graded-commutative"
                            ));
                        }
                        a.clone()
                    }
                    (Some(a), None) => a.clone(),
                    (None, Some(b)) => b.iter().map(|y| y * koszul(i, j)).collect(),
                    (None, None) if i == 0 || j == 0 => {
                        let k = if i == 0 { j } else { i };
                        (0..n)
                            .map(|t| {
                                if t == k {
                                    Rational::one()
                                } else {
                                    Rational::zero()
                                }
                            })
                            .collect()
                    }
                    (None, None) => vec![Rational::zero(); n],
                };
            }
        }
        for k in 0..n {
            let expect: Vec<Rational> = (0..n)
                .map(|t| {
                    if t == k {
                        Rational::one()
                    } else {
                        Rational::zero()
                    }
                })
                .collect();
            if full[0][k] != expect {
                return bad("first basis element does not act as the unit".into());
            }
        }
        let mut model = Self {
            dimension,
            basis,
            mult: full,
            integrate,
            lattice: Vec::new(),
        };
        for (a, b, c) in itertriples(n) {
            let left = model.mul(
                &model.mul(&model.basis_element(a), &model.basis_element(b)),
                &model.basis_element(c),
            );
            let right = model.mul(
                &model.basis_element(a),
                &model.mul(&model.basis_element(b), &model.basis_element(c)),
            );
            if left != right {
                return bad(format!(
                    "multiplication is not associative on ({a}, {b}, {c})"
                ));
            }
        }
        for g in lattice {
            if g.len() != n {
                return bad(format!(
                    "lattice generator has {} coefficients, expected {n}",
                    g.len()
                ));
            }
            model.lattice.push(RingElement::new(g));
        }
        Ok(model)
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn basis(&self) -> &[BasisElement] {
        &self.basis
    }

    pub fn lattice(&self) -> &[RingElement] {
        &self.lattice
    }

    pub fn with_lattice(&self, lattice: Vec<RingElement>) -> Result<Self> {
        if lattice.iter().any(|g| g.coeffs.len() != self.basis.len()) {
            return Err(Error::RingModel(
                "lattice generator has the wrong length".into(),
            ));
        }
        Ok(Self {
            lattice,
            ..self.clone()
        })
    }

    pub fn zero(&self) -> RingElement {
        RingElement::new(vec![Rational::zero(); self.basis.len()])
    }

    pub fn one(&self) -> RingElement {
        self.basis_element(0)
    }

    pub fn constant(&self, c: Rational) -> RingElement {
        self.one().scale(&c)
    }

    pub fn basis_element(&self, i: usize) -> RingElement {
        let mut e = self.zero();
        e.coeffs[i] = Rational::one();
        e
    }

    pub fn element(&self, coeffs: Vec<Rational>) -> Result<RingElement> {
        if coeffs.len() != self.basis.len() {
            return Err(Error::Dimension(format!(
                "ring element has {} coefficients, expected {}",
                coeffs.len(),
                self.basis.len()
            )));
        }
        Ok(RingElement::new(coeffs))
    }

    pub fn mul(&self, x: &RingElement, y: &RingElement) -> RingElement {
        let n = self.basis.len();
        let mut out = vec![Rational::zero(); n];
        for i in 0..n {
            if x.coeffs[i].is_zero() {
                continue;
            }
            for j in 0..n {
                if y.coeffs[j].is_zero() {
                    continue;
                }
                let c = &x.coeffs[i] * &y.coeffs[j];
                for (k, m) in self.mult[i][j].iter().enumerate() {
                    if !m.is_zero() {
                        out[k] += &c * m;
                    }
                }
            }
        }
        RingElement::new(out)
    }

    pub fn pow(&self, x: &RingElement, e: u32) -> RingElement {
        (0..e).fold(self.one(), |acc, _| self.mul(&acc, x))
    }

    /// `exp(x)`; `x` must have no degree-0 component, so the sum terminates.
    pub fn exp(&self, x: &RingElement) -> Result<RingElement> {
        if !self.degree_part(x, 0).is_zero() {
            return Err(Error::InvalidArgument(
                "exp needs a nilpotent argument".into(),
            ));
        }
        let mut term = self.one();
        let mut acc = self.one();
        for k in 1..=self.dimension + 1 {
            term = self.mul(&term, x).scale(&rat(1, k as i64));
            if term.is_zero() {
                break;
            }
            acc = acc.add(&term);
        }
        Ok(acc)
    }

    pub fn degree_part(&self, x: &RingElement, degree: usize) -> RingElement {
        RingElement::new(
            x.coeffs
                .iter()
                .zip(&self.basis)
                .map(|(c, b)| {
                    if b.degree == degree {
                        c.clone()
                    } else {
                        Rational::zero()
                    }
                })
                .collect(),
        )
    }

    /// Degree if `x` is homogeneous and nonzero.
    pub fn homogeneous_degree(&self, x: &RingElement) -> Option<usize> {
        let mut degs = x
            .coeffs
            .iter()
            .zip(&self.basis)
            .filter(|(c, _)| !c.is_zero())
            .map(|(_, b)| b.degree);
        let first = degs.next()?;
        degs.all(|d| d == first).then_some(first)
    }

    /// `ι`: `+1` on degrees `0 mod 4`, `-1` on degrees `2 mod 4`.
    pub fn involution(&self, x: &RingElement) -> RingElement {
        RingElement::new(
            x.coeffs
                .iter()
                .zip(&self.basis)
                .map(|(c, b)| {
                    if b.degree % 4 == 2 {
                        -c.clone()
                    } else {
                        c.clone()
                    }
                })
                .collect(),
        )
    }

    pub fn integrate(&self, x: &RingElement) -> Rational {
        x.coeffs
            .iter()
            .zip(&self.integrate)
            .fold(Rational::zero(), |acc, (a, b)| acc + a * b)
    }

    /// `x` as a sum of named basis elements.
    pub fn format(&self, x: &RingElement) -> String {
        let parts: Vec<String> = x
            .coeffs
            .iter()
            .zip(&self.basis)
            .filter(|(c, _)| !c.is_zero())
            .map(|(c, b)| {
                if b.degree == 0 {
                    c.to_string()
                } else {
                    format!("{c} {}", b.name)
                }
            })
            .collect();
        if parts.is_empty() {
            "0".into()
        } else {
            parts.join(" + ").replace("+ -", "- ")
        }
    }
}

fn itertriples(n: usize) -> impl Iterator<Item = (usize, usize, usize)> {
    (0..n).flat_map(move |a| (0..n).flat_map(move |b| (0..n).map(move |c| (a, b, c))))
}

/// Substitutes ring elements for the variables of `poly`. Each assigned
/// element must be homogeneous of the variable's cohomological degree (or
/// zero); products above the top degree vanish in the model.
pub fn evaluate_in_ring(
    poly: &Polynomial,
    model: &CohomologyRingModel,
    assignment: impl Fn(Var) -> Option<RingElement>,
) -> Result<RingElement> {
    let mut out = model.zero();
    for v in poly.variables() {
        let val = assignment(v)
            .ok_or_else(|| Error::InvalidArgument(format!("no value assigned to {v}")))?;
        if let Some(d) = model.homogeneous_degree(&val) {
            if d != v.cohomological_degree() {
                return Err(Error::DegreeMismatch(format!(
                    "{v} has degree {} but was assigned an element of degree {d}",
                    v.cohomological_degree()
                )));
            }
        } else if !val.is_zero() {
            return Err(Error::DegreeMismatch(format!(
                "value assigned to {v} is not homogeneous"
            )));
        }
    }
    for (m, c) in poly.terms() {
        let mut term = model.constant(c.clone());
        for (v, e) in m.vars() {
            let val = assignment(v).expect("checked above");
            term = model.mul(&term, &model.pow(&val, e));
        }
        out = out.add(&term);
    }
    Ok(out)
}

/// `Â` of a model from its Pontryagin classes `p_1, p_2, ...`.
pub fn a_hat_in_ring(
    model: &CohomologyRingModel,
    pontryagin: &[RingElement],
) -> Result<RingElement> {
    let order = (model.dimension() / 4).max(1);
    let total = a_hat_total(order);
    evaluate_in_ring(&total, model, |v| match v.family {
        0 if v.index >= 1 => Some(
            pontryagin
                .get(v.index - 1)
                .cloned()
                .unwrap_or_else(|| model.zero()),
        ),
        _ => None,
    })
}

fn check_multiplier(model: &CohomologyRingModel, a: &RingElement) -> Result<()> {
    for (c, b) in a.coeffs.iter().zip(&model.basis) {
        if !c.is_zero() && b.degree % 4 != 0 {
            return Err(Error::NotInvolutionInvariant(format!(
                "component along {} has degree {}",
                b.name, b.degree
            )));
        }
    }
    if model.involution(a) != *a {
        return Err(Error::NotInvolutionInvariant("a != ι(a)".into()));
    }
    Ok(())
}

/// `ω⁺_a(x, y) = ∫ a · x · ι(y)`.
pub fn twisted_k_pairing(
    model: &CohomologyRingModel,
    a: &RingElement,
    x: &RingElement,
    y: &RingElement,
) -> Result<Rational> {
    check_multiplier(model, a)?;
    Ok(model.integrate(&model.mul(&model.mul(a, x), &model.involution(y))))
}

/// Degree-0 part one, and `ω⁺_a` integral on the lattice generators.
pub fn is_normalized_multiplier(model: &CohomologyRingModel, a: &RingElement) -> bool {
    if check_multiplier(model, a).is_err() || !a.coeffs[0].is_one() {
        return false;
    }
    let gens = model.lattice();
    gens.iter().all(|x| {
        gens.iter()
            .all(|y| twisted_k_pairing(model, a, x, y).is_ok_and(|v| v.is_integer()))
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnimodularityReport {
    pub gram: ZMatrix,
    pub determinant: BigInt,
    pub unimodular: bool,
}

/// Exact Gram of `ω⁺_a` on the lattice generators.
pub fn unimodularity_report(
    model: &CohomologyRingModel,
    a: &RingElement,
) -> Result<UnimodularityReport> {
    check_multiplier(model, a)?;
    if !is_normalized_multiplier(model, a) {
        return Err(Error::NotNormalized(if a.coeffs[0].is_one() {
            "pairing is not integral on the lattice".into()
        } else {
            format!("degree-0 part is {}", a.coeffs[0])
        }));
    }
    let gens = model.lattice();
    if gens.len() % 2 == 1 {
        return Err(Error::OddRank(gens.len()));
    }
    let n = gens.len();
    let mut gram = ZMatrix::from_fn(n, n, |_, _| BigInt::zero());
    for i in 0..n {
        for j in 0..n {
            gram[(i, j)] = twisted_k_pairing(model, a, &gens[i], &gens[j])?.to_integer();
        }
    }
    let determinant = gram.determinant();
    let unimodular = is_unit(&determinant);
    Ok(UnimodularityReport {
        gram,
        determinant,
        unimodular,
    })
}

/// `ℂP³`: basis `1, h, h², h³`, `∫ h³ = 1`, lattice `ch O(k) = e^{kh}` for
/// `k = 0..3`.
pub fn cp3() -> CohomologyRingModel {
    let basis: Vec<BasisElement> = ["1", "h", "h^2", "h^3"]
        .iter()
        .enumerate()
        .map(|(i, name)| BasisElement {
            name: (*name).into(),
            degree: 2 * i,
        })
        .collect();
    let unit = |k: usize| (0..4).map(|t| int(i64::from(t == k))).collect::<Vec<_>>();
    let mut mult = Vec::new();
    for i in 1..4 {
        for j in 1..4 {
            if i + j < 4 {
                mult.push((i, j, unit(i + j)));
            }
        }
    }
    let model =
        CohomologyRingModel::new(6, basis, mult, vec![int(0), int(0), int(0), int(1)], vec![])
            .expect("valid built-in model");
    let lattice = (0..4).map(|k| line_bundle_ch(&model, k)).collect();
    model.with_lattice(lattice).expect("valid lattice")
}

/// `e^{sh}` in the `ℂP³` model.
pub fn line_bundle_ch(model: &CohomologyRingModel, s: i64) -> RingElement {
    model
        .exp(&model.basis_element(1).scale(&int(s)))
        .expect("h is nilpotent")
}

/// Tangent Chern classes `c_i = binom(4, i) h^i` of `ℂP³`.
pub fn cp3_tangent_chern(model: &CohomologyRingModel) -> Vec<RingElement> {
    let h = model.basis_element(1);
    [4, 6, 4]
        .iter()
        .enumerate()
        .map(|(i, b)| model.pow(&h, i as u32 + 1).scale(&int(*b)))
        .collect()
}

/// Real two-torus: basis `1, x`, `∫ x = 1`, lattice `1, 1 + x`.
pub fn torus() -> CohomologyRingModel {
    let basis = vec![
        BasisElement {
            name: "1".into(),
            degree: 0,
        },
        BasisElement {
            name: "x".into(),
            degree: 2,
        },
    ];
    CohomologyRingModel::new(
        2,
        basis,
        vec![],
        vec![int(0), int(1)],
        vec![vec![int(1), int(0)], vec![int(1), int(1)]],
    )
    .expect("valid built-in model")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::genus::series::{complexify, pontryagin};

    fn cubic(u: i64) -> Rational {
        rat(u * u * u - u, 6)
    }

    #[test]
    fn cp3_a_hat() {
        let m = cp3();
        let c: Vec<Polynomial> = (1..=3).map(|i| Polynomial::var(Var::c(i))).collect();
        let p = pontryagin(&complexify(&c));
        let chern = cp3_tangent_chern(&m);
        let ps: Vec<RingElement> = p
            .iter()
            .map(|pi| evaluate_in_ring(pi, &m, |v| chern.get(v.index - 1).cloned()).unwrap())
            .collect();
        assert_eq!(ps[0], m.basis_element(2).scale(&int(4)));
        assert!(ps[1].is_zero());
        let a = a_hat_in_ring(&m, &ps).unwrap();
        assert_eq!(a, m.one().sub(&m.basis_element(2).scale(&rat(1, 6))));
    }

    #[test]
    fn nilpotency_and_zero_assignment() {
        let m = cp3();
        let h = m.basis_element(1);
        assert!(m.pow(&h, 4).is_zero());
        let total = a_hat_total(2);
        let v = evaluate_in_ring(&total, &m, |_| Some(m.zero())).unwrap();
        assert_eq!(v, m.one());
        let err =
            evaluate_in_ring(&Polynomial::var(Var::p(1)), &m, |_| Some(h.clone())).unwrap_err();
        assert!(matches!(err, Error::DegreeMismatch(_)));
    }

    #[test]
    fn cp3_pairing_closed_form() {
        let m = cp3();
        let a = m.one().sub(&m.basis_element(2).scale(&rat(1, 6)));
        for s in -3..=3 {
            for t in -3..=3 {
                let v = twisted_k_pairing(&m, &a, &line_bundle_ch(&m, s), &line_bundle_ch(&m, t))
                    .unwrap();
                assert_eq!(v, cubic(s - t));
            }
        }
        let bad = m.basis_element(1);
        assert!(matches!(
            twisted_k_pairing(&m, &bad, &m.one(), &m.one()),
            Err(Error::NotInvolutionInvariant(_))
        ));
    }

    #[test]
    fn cp3_unimodular() {
        let m = cp3();
        let a = m.one().sub(&m.basis_element(2).scale(&rat(1, 6)));
        assert!(is_normalized_multiplier(&m, &a));
        let rep = unimodularity_report(&m, &a).unwrap();
        assert!(rep.gram.is_antisymmetric());
        assert_eq!(rep.determinant, BigInt::one());
        assert!(!is_normalized_multiplier(&m, &m.constant(int(2))));
    }

    #[test]
    fn torus_trivial_multiplier() {
        let t = torus();
        assert!(is_normalized_multiplier(&t, &t.one()));
        let rep = unimodularity_report(&t, &t.one()).unwrap();
        assert!(rep.unimodular);
        let odd = t.with_lattice(vec![t.one()]).unwrap();
        assert!(matches!(
            unimodularity_report(&odd, &odd.one()),
            Err(Error::OddRank(1))
        ));
    }

    #[test]
    fn rejects_bad_models() {
        let basis = vec![
            BasisElement {
                name: "1".into(),
                degree: 0,
            },
            BasisElement {
                name: "x".into(),
                degree: 2,
            },
        ];
        let err = CohomologyRingModel::new(2, basis.clone(), vec![], vec![int(1), int(0)], vec![]);
        assert!(matches!(err, Err(Error::RingModel(_))));
        let err = CohomologyRingModel::new(
            2,
            basis,
            vec![(1, 1, vec![int(1), int(0)])],
            vec![int(0), int(1)],
            vec![],
        );
        assert!(matches!(err, Err(Error::RingModel(_))));
    }
}
