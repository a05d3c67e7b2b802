//! Finite Lefschetz modules: graded spaces with a degree-two operator `L`,
//! a Poincaré pairing, and optional Weil operators per degree. Supplies the
//! primitive decomposition, the Riemann form `Q_ω`, and Weil's `*`.

use crate::error::{Error, Result};
use crate::linalg::{rank, RMat};
use crate::siegel::{siegel_to_structure, SiegelPoint};

/// Graded real spaces `H^0..H^{2d}` with `L : H^j -> H^{j+2}`.
#[derive(Debug, Clone, PartialEq)]
pub struct LefschetzModule {
    d: usize,
    dims: Vec<usize>,
    /// `l[j]` maps `H^j` to `H^{j+2}`, for `j = 0..=2d-2`.
    l: Vec<RMat>,
    /// `pairing[j]` has `∫ x ∧ y = xᵀ P y` for `x` in `H^j`, `y` in `H^{2d-j}`.
    pairing: Vec<RMat>,
    /// Weil operator on each `H^j`, when Hodge data is attached.
    weil: Option<Vec<RMat>>,
}

/// Component `x_r` of `x = Σ L^r x_r`, primitive of degree `k - 2r`.
#[derive(Debug, Clone, PartialEq)]
pub struct PrimitiveComponent {
    pub r: usize,
    pub x: RMat,
}

const RANK_CUTOFF: f64 = 1e-10;

fn vector_check(x: &RMat, len: usize, what: &str) -> Result<()> {
    if x.ncols() != 1 || x.nrows() != len {
        return Err(Error::Dimension(format!(
            "{what} must be a column of length {len}, got {}x{}",
            x.nrows(),
            x.ncols()
        )));
    }
    Ok(())
}

impl LefschetzModule {
    pub fn new(d: usize, dims: Vec<usize>, l: Vec<RMat>, pairing: Vec<RMat>) -> Result<Self> {
        if dims.len() != 2 * d + 1 {
            return Err(Error::Dimension(format!(
                "need {} graded dimensions, got {}",
                2 * d + 1,
                dims.len()
            )));
        }
        if l.len() != (2 * d).saturating_sub(1) {
            return Err(Error::Dimension(format!(
                "need {} Lefschetz blocks, got {}",
                (2 * d).saturating_sub(1),
                l.len()
            )));
        }
        for (j, m) in l.iter().enumerate() {
            if m.nrows() != dims[j + 2] || m.ncols() != dims[j] {
                return Err(Error::Dimension(format!(
                    "L on H^{j} must be {}x{}, got {}x{}",
                    dims[j + 2],
                    dims[j],
                    m.nrows(),
                    m.ncols()
                )));
            }
        }
        if pairing.len() != 2 * d + 1 {
            return Err(Error::Dimension(format!(
                "need {} pairing blocks, got {}",
                2 * d + 1,
                pairing.len()
            )));
        }
        for (j, p) in pairing.iter().enumerate() {
            if p.nrows() != dims[j] || p.ncols() != dims[2 * d - j] {
                return Err(Error::Dimension(format!(
                    "pairing block {j} has the wrong shape"
                )));
            }
            if rank(p, RANK_CUTOFF) != dims[j] || dims[j] != dims[2 * d - j] {
                return Err(Error::RingModel(format!("pairing on H^{j} is degenerate")));
            }
        }
        let module = Self {
            d,
            dims,
            l,
            pairing,
            weil: None,
        };
        for k in 0..=d {
            let lk = module.l_power(d - k, k)?;
            if rank(&lk, RANK_CUTOFF) != module.dims[d - k]
                || module.dims[d - k] != module.dims[d + k]
            {
                return Err(Error::RingModel(format!(
                    "hard Lefschetz fails: L^{k} on H^{} is not an isomorphism",
                    d - k
                )));
            }
        }
        Ok(module)
    }

    /// Attaches Weil operators, one per degree.
    pub fn with_weil(mut self, weil: Vec<RMat>) -> Result<Self> {
        if weil.len() != self.dims.len() {
            return Err(Error::Dimension(
                "one Weil operator per degree is required".into(),
            ));
        }
        for (j, c) in weil.iter().enumerate() {
            if c.nrows() != self.dims[j] || c.ncols() != self.dims[j] {
                return Err(Error::Dimension(format!(
                    "Weil operator on H^{j} has the wrong shape"
                )));
            }
        }
        self.weil = Some(weil);
        Ok(self)
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn lefschetz_blocks(&self) -> &[RMat] {
        &self.l
    }

    pub fn pairing_blocks(&self) -> &[RMat] {
        &self.pairing
    }

    pub fn weil(&self) -> Option<&[RMat]> {
        self.weil.as_deref()
    }

    /// Matrix of `L^r : H^j -> H^{j+2r}`.
    pub fn l_power(&self, j: usize, r: usize) -> Result<RMat> {
        if j + 2 * r > 2 * self.d {
            return Err(Error::DegreeMismatch(format!(
                "L^{r} on H^{j} leaves the range 0..={}",
                2 * self.d
            )));
        }
        let mut m = RMat::identity(self.dims[j], self.dims[j]);
        for s in 0..r {
            m = &self.l[j + 2 * s] * m;
        }
        Ok(m)
    }

    /// Columns spanning the primitive part of `H^k`, `k <= d`.
    pub fn primitive_basis(&self, k: usize) -> Result<RMat> {
        if k > self.d {
            return Err(Error::DegreeMismatch(format!(
                "primitive classes live in degrees <= {}, got {k}",
                self.d
            )));
        }
        let kill = self
            .l_power(k, self.d - k + 1)
            .unwrap_or_else(|_| RMat::zeros(0, self.dims[k]));
        Ok(crate::linalg::null_space(&kill, RANK_CUTOFF))
    }

    fn component_range(&self, k: usize) -> std::ops::RangeInclusive<usize> {
        k.saturating_sub(self.d)..=k / 2
    }

    /// Unique `x = Σ_r L^r x_r` with each `x_r` primitive.
    pub fn primitive_decomposition(&self, x: &RMat, k: usize) -> Result<Vec<PrimitiveComponent>> {
        if k > 2 * self.d {
            return Err(Error::DegreeMismatch(format!(
                "degree {k} exceeds {}",
                2 * self.d
            )));
        }
        vector_check(x, self.dims[k], "class")?;
        let mut blocks = Vec::new();
        for r in self.component_range(k) {
            let p = self.primitive_basis(k - 2 * r)?;
            let img = self.l_power(k - 2 * r, r)? * &p;
            blocks.push((r, p, img));
        }
        let cols: usize = blocks.iter().map(|b| b.2.ncols()).sum();
        if cols != self.dims[k] {
            return Err(Error::RingModel(format!(
                "primitive pieces have total dimension {cols}, H^{k} has {}",
                self.dims[k]
            )));
        }
        let mut a = RMat::zeros(self.dims[k], cols);
        let mut at = 0;
        for b in &blocks {
            a.view_mut((0, at), (self.dims[k], b.2.ncols()))
                .copy_from(&b.2);
            at += b.2.ncols();
        }
        let coeffs = a
            .lu()
            .solve(x)
            .ok_or_else(|| Error::RingModel("Lefschetz decomposition is singular".into()))?;
        let mut at = 0;
        Ok(blocks
            .into_iter()
            .map(|(r, p, _)| {
                let n = p.ncols();
                let c = coeffs.rows(at, n).into_owned();
                at += n;
                PrimitiveComponent { r, x: p * c }
            })
            .collect())
    }

    /// `Σ_r L^r x_r`.
    pub fn reassemble(&self, parts: &[PrimitiveComponent], k: usize) -> Result<RMat> {
        let mut out = RMat::zeros(self.dims[k], 1);
        for pc in parts {
            out += self.l_power(k - 2 * pc.r, pc.r)? * &pc.x;
        }
        Ok(out)
    }

    /// `∫ x ∧ y` for `x` in `H^j` and `y` in `H^{2d-j}`.
    pub fn integrate_product(&self, x: &RMat, y: &RMat, j: usize) -> Result<f64> {
        vector_check(x, self.dims[j], "left class")?;
        vector_check(y, self.dims[2 * self.d - j], "right class")?;
        Ok((x.transpose() * &self.pairing[j] * y)[(0, 0)])
    }

    /// `Q_ω(x, y) = ε_k Σ_r (-1)^r μ_r ∫ x_r ∧ L^{d-k+2r} y_r`
    /// with `ε_k = (-1)^{k(k+1)/2}` and `μ_r = r!/(d-k+r)!`.
    pub fn riemann_form(&self, x: &RMat, y: &RMat, k: usize) -> Result<f64> {
        let xs = self.primitive_decomposition(x, k)?;
        let ys = self.primitive_decomposition(y, k)?;
        self.riemann_from_parts(&xs, &ys, k)
    }

    fn riemann_from_parts(
        &self,
        xs: &[PrimitiveComponent],
        ys: &[PrimitiveComponent],
        k: usize,
    ) -> Result<f64> {
        let mut total = 0.0;
        for (a, b) in xs.iter().zip(ys) {
            let r = a.r;
            let deg = k - 2 * r;
            let ly = self.l_power(deg, self.d - deg)? * &b.x;
            total += sign(r) * mu(self.d, k, r) * self.integrate_product(&a.x, &ly, deg)?;
        }
        Ok(epsilon(k) * total)
    }

    /// Gram matrix of `Q_ω` on the standard basis of `H^k`.
    pub fn riemann_gram(&self, k: usize) -> Result<RMat> {
        let n = self.dims[k];
        let parts = (0..n)
            .map(|i| self.primitive_decomposition(&unit(n, i), k))
            .collect::<Result<Vec<_>>>()?;
        let mut g = RMat::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                g[(i, j)] = self.riemann_from_parts(&parts[i], &parts[j], k)?;
            }
        }
        Ok(g)
    }

    fn weil_on(&self, j: usize) -> Result<&RMat> {
        self.weil
            .as_ref()
            .map(|w| &w[j])
            .ok_or_else(|| Error::Hodge(format!("no Weil operator attached on H^{j}")))
    }

    /// Weil's `*`: `*(L^r x_r) = ε_k (-1)^r μ_r L^{d-k+r} C x_r`.
    pub fn weil_star(&self, x: &RMat, k: usize) -> Result<RMat> {
        let parts = self.primitive_decomposition(x, k)?;
        let mut out = RMat::zeros(self.dims[2 * self.d - k], 1);
        for pc in &parts {
            let deg = k - 2 * pc.r;
            let cx = self.weil_on(deg)? * &pc.x;
            let lifted = self.l_power(deg, self.d + pc.r - k)? * cx;
            out += lifted * (epsilon(k) * sign(pc.r) * mu(self.d, k, pc.r));
        }
        Ok(out)
    }

    /// Gram of the Hodge metric `b(x, y) = ∫ x ∧ *y` on `H^k`.
    pub fn hodge_metric_gram(&self, k: usize) -> Result<RMat> {
        let n = self.dims[k];
        let mut g = RMat::zeros(n, n);
        for j in 0..n {
            let sy = self.weil_star(&unit(n, j), k)?;
            for i in 0..n {
                g[(i, j)] = self.integrate_product(&unit(n, i), &sy, k)?;
            }
        }
        Ok(g)
    }

    /// Gram of `Q_ω(x, C y)` on `H^k`.
    pub fn riemann_weil_gram(&self, k: usize) -> Result<RMat> {
        Ok(self.riemann_gram(k)? * self.weil_on(k)?)
    }
}

fn unit(n: usize, i: usize) -> RMat {
    let mut v = RMat::zeros(n, 1);
    v[(i, 0)] = 1.0;
    v
}

fn sign(r: usize) -> f64 {
    if r % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

fn epsilon(k: usize) -> f64 {
    sign((k * (k + 1) / 2) % 2)
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|i| i as f64).product()
}

fn mu(d: usize, k: usize, r: usize) -> f64 {
    factorial(r) / factorial(d + r - k)
}

/// Sign of `e_A ∧ e_B` relative to the sorted wedge, zero if they overlap.
fn wedge_sign(a: u32, b: u32) -> f64 {
    if a & b != 0 {
        return 0.0;
    }
    let mut inversions = 0u32;
    let mut rest = a;
    while rest != 0 {
        let i = rest.trailing_zeros();
        inversions += (b & ((1u32 << i) - 1)).count_ones();
        rest &= rest - 1;
    }
    sign(inversions as usize)
}

fn masks_of_size(n: usize, k: usize) -> Vec<u32> {
    (0u32..(1u32 << n))
        .filter(|m| m.count_ones() as usize == k)
        .collect()
}

fn minor(m: &RMat, rows: u32, cols: u32) -> f64 {
    let r: Vec<usize> = (0..m.nrows()).filter(|i| rows >> i & 1 == 1).collect();
    let c: Vec<usize> = (0..m.ncols()).filter(|j| cols >> j & 1 == 1).collect();
    if r.is_empty() {
        return 1.0;
    }
    RMat::from_fn(r.len(), c.len(), |i, j| m[(r[i], c[j])]).determinant()
}

/// Cohomology of the real torus `R^{2d} / Z^{2d}` as an exterior algebra on
/// `e_1..e_{2d}`, with Kähler class `Σ e_i ∧ e_{d+i}` normalized so that
/// `∫ ω^d / d! = 1`. The Weil operators are the exterior powers of the
/// complex structure of the Siegel point acting on one-forms.
pub fn torus_module(z: &SiegelPoint) -> Result<LefschetzModule> {
    let d = z.g();
    let n = 2 * d;
    if n > 16 {
        return Err(Error::InvalidArgument(format!(
            "torus of complex dimension {d} is too large"
        )));
    }
    let bases: Vec<Vec<u32>> = (0..=n).map(|k| masks_of_size(n, k)).collect();
    let dims: Vec<usize> = bases.iter().map(Vec::len).collect();
    let index = |k: usize, m: u32| bases[k].binary_search(&m).expect("mask of the right size");
    let mut l = Vec::new();
    for j in 0..n.saturating_sub(1) {
        let mut m = RMat::zeros(dims[j + 2], dims[j]);
        for (col, &a) in bases[j].iter().enumerate() {
            for i in 0..d {
                let pair = (1u32 << i) | (1u32 << (d + i));
                let s = wedge_sign(pair, a);
                if s != 0.0 {
                    m[(index(j + 2, pair | a), col)] += s;
                }
            }
        }
        l.push(m);
    }
    let kahler_top: u32 = (0..d).fold(0, |acc, i| acc | (1 << i) | (1 << (d + i)));
    // ∫ e_1 ∧ .. ∧ e_{2d}, fixed by ∫ Π (e_i ∧ e_{d+i}) = 1.
    let mut top_sign = 1.0;
    let mut acc = 0u32;
    for i in 0..d {
        let pair = (1u32 << i) | (1u32 << (d + i));
        top_sign *= wedge_sign(acc, pair);
        acc |= pair;
    }
    debug_assert_eq!(acc, kahler_top);
    let full = (1u32 << n) - 1;
    let pairing: Vec<RMat> = (0..=n)
        .map(|j| {
            let mut p = RMat::zeros(dims[j], dims[n - j]);
            for (r, &a) in bases[j].iter().enumerate() {
                let b = full & !a;
                p[(r, index(n - j, b))] = top_sign * wedge_sign(a, b);
            }
            p
        })
        .collect();
    let module = LefschetzModule::new(d, dims, l, pairing)?;
    let (j, _) = siegel_to_structure(z)?;
    let c1 = j.matrix();
    let weil = (0..=n)
        .map(|k| {
            RMat::from_fn(bases[k].len(), bases[k].len(), |r, c| {
                minor(c1, bases[k][r], bases[k][c])
            })
        })
        .collect();
    module.with_weil(weil)
}
