//! JSON schemas, parsing of command-line values, and error plumbing.

use std::path::{Path, PathBuf};

use ppav_core::exact::{parse_rational, QMatrix, Rational, ZMatrix};
use ppav_core::forms::{MetricForm, SkewForm};
use ppav_core::genus::{BasisElement, CohomologyRingModel};
use ppav_core::hodge::{HodgePiece, HodgeStructure, PolarizationForm};
use ppav_core::lattice::IntegralSkewForm;
use ppav_core::linalg::{CMat, RMat, C64};
use ppav_core::siegel::SiegelPoint;
use serde::Deserialize;
use serde_json::{json, Value};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("invalid JSON in {path}: {source}")]
    Json {
        path: PathBuf,
        source: serde_json::Error,
    },
    #[error("{0}")]
    Input(String),
    #[error(transparent)]
    Core(#[from] ppav_core::Error),
}

impl CliError {
    /// 3 for a breached numerical postcondition, 2 for rejected input.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(e) if e.is_numerical() => 3,
            _ => 2,
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;

fn input<T>(msg: impl Into<String>) -> CliResult<T> {
    Err(CliError::Input(msg.into()))
}

pub fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> CliResult<T> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    serde_json::from_str(&text).map_err(|source| CliError::Json {
        path: path.to_path_buf(),
        source,
    })
}

#[derive(Debug, Deserialize)]
pub struct MatrixJson<T> {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<T>,
}

impl<T: Clone> MatrixJson<T> {
    fn checked(&self) -> CliResult<&[T]> {
        if self.data.len() != self.rows * self.cols {
            return input(format!(
                "matrix declares {}x{} but has {} entries",
                self.rows,
                self.cols,
                self.data.len()
            ));
        }
        Ok(&self.data)
    }
}

impl MatrixJson<f64> {
    pub fn to_real(&self) -> CliResult<RMat> {
        Ok(RMat::from_row_slice(self.rows, self.cols, self.checked()?))
    }
}

/// A rational entry: JSON integer or a `"p/q"` string.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum RationalJson {
    Int(i64),
    Text(String),
}

impl RationalJson {
    pub fn value(&self) -> CliResult<Rational> {
        match self {
            RationalJson::Int(n) => Ok(Rational::from_integer((*n).into())),
            RationalJson::Text(s) => Ok(parse_rational(s)?),
        }
    }
}

impl MatrixJson<RationalJson> {
    pub fn to_rational(&self) -> CliResult<QMatrix> {
        let data = self.checked()?;
        let rows = (0..self.rows)
            .map(|i| {
                data[i * self.cols..(i + 1) * self.cols]
                    .iter()
                    .map(RationalJson::value)
                    .collect()
            })
            .collect::<CliResult<Vec<Vec<Rational>>>>()?;
        Ok(QMatrix::from_rows(rows)?)
    }
}

#[derive(Debug, Deserialize)]
pub struct FormJson {
    pub kind: String,
    pub matrix: MatrixJson<f64>,
}

impl FormJson {
    fn expect(&self, kind: &str) -> CliResult<RMat> {
        if self.kind != kind {
            return input(format!(
                "expected a form of kind \"{kind}\", found \"{}\"",
                self.kind
            ));
        }
        self.matrix.to_real()
    }
}

#[derive(Debug, Deserialize)]
pub struct PairJson {
    pub metric: FormJson,
    pub skew: FormJson,
}

impl PairJson {
    pub fn metric(&self) -> CliResult<MetricForm> {
        Ok(MetricForm::new(self.metric.expect("metric")?)?)
    }

    pub fn skew(&self) -> CliResult<SkewForm> {
        Ok(SkewForm::new(self.skew.expect("skew")?)?)
    }

    /// The skew form as an integral form; every entry must be an integer.
    pub fn integral_skew(&self) -> CliResult<IntegralSkewForm> {
        integral_form(&self.skew.expect("skew")?)
    }
}

pub fn integral_form(m: &RMat) -> CliResult<IntegralSkewForm> {
    if m.iter().any(|x| x.fract() != 0.0 || x.abs() > 1e15) {
        return input("skew form entries must be integers for a lattice polarization");
    }
    let z = ZMatrix::from_fn(m.nrows(), m.ncols(), |i, j| (m[(i, j)] as i64).into());
    Ok(IntegralSkewForm::new(z)?)
}

#[derive(Debug, Deserialize)]
pub struct SiegelJson {
    pub g: usize,
    pub re: MatrixJson<f64>,
    pub im: MatrixJson<f64>,
}

impl SiegelJson {
    pub fn point(&self) -> CliResult<SiegelPoint> {
        let (x, y) = (self.re.to_real()?, self.im.to_real()?);
        if x.nrows() != self.g || y.nrows() != self.g {
            return input(format!("period matrix blocks must be {0}x{0}", self.g));
        }
        Ok(SiegelPoint::from_parts(&x, &y)?)
    }
}

#[derive(Debug, Deserialize)]
pub struct PieceJson {
    pub p: i32,
    pub q: i32,
    pub basis: MatrixJson<[f64; 2]>,
}

#[derive(Debug, Deserialize)]
pub struct HodgeJson {
    pub weight: i32,
    pub dim: usize,
    pub pieces: Vec<PieceJson>,
    pub polarization: MatrixJson<RationalJson>,
}

impl HodgeJson {
    pub fn build(&self) -> CliResult<(HodgeStructure, PolarizationForm)> {
        let pieces = self
            .pieces
            .iter()
            .map(|piece| {
                let data: Vec<C64> = piece
                    .basis
                    .checked()?
                    .iter()
                    .map(|[re, im]| C64::new(*re, *im))
                    .collect();
                Ok(HodgePiece {
                    p: piece.p,
                    q: piece.q,
                    basis: CMat::from_row_slice(piece.basis.rows, piece.basis.cols, &data),
                })
            })
            .collect::<CliResult<Vec<_>>>()?;
        let hs = HodgeStructure::new(self.weight, self.dim, pieces)?;
        let q = PolarizationForm::new(self.polarization.to_rational()?, self.weight)?;
        Ok((hs, q))
    }
}

#[derive(Debug, Deserialize)]
pub struct RingJson {
    pub dimension_param: usize,
    pub basis: Vec<BasisJson>,
    #[serde(default)]
    pub mult: Vec<(usize, usize, Vec<RationalJson>)>,
    pub integrate: Vec<RationalJson>,
    #[serde(default)]
    pub lattice: Vec<Vec<RationalJson>>,
}

#[derive(Debug, Deserialize)]
pub struct BasisJson {
    pub name: String,
    pub degree: usize,
}

fn rationals(v: &[RationalJson]) -> CliResult<Vec<Rational>> {
    v.iter().map(RationalJson::value).collect()
}

impl RingJson {
    pub fn build(&self) -> CliResult<CohomologyRingModel> {
        let basis = self
            .basis
            .iter()
            .map(|b| BasisElement {
                name: b.name.clone(),
                degree: b.degree,
            })
            .collect();
        let mult = self
            .mult
            .iter()
            .map(|(i, j, c)| Ok((*i, *j, rationals(c)?)))
            .collect::<CliResult<Vec<_>>>()?;
        let lattice = self
            .lattice
            .iter()
            .map(|l| rationals(l))
            .collect::<CliResult<Vec<_>>>()?;
        Ok(CohomologyRingModel::new(
            self.dimension_param,
            basis,
            mult,
            rationals(&self.integrate)?,
            lattice,
        )?)
    }
}

/// `"1,0,-1/6"` as a list of rationals.
pub fn parse_rational_list(s: &str) -> CliResult<Vec<Rational>> {
    s.split(',')
        .map(|t| Ok(parse_rational(t.trim())?))
        .collect()
}

pub fn parse_i64_list(s: &str) -> CliResult<Vec<i64>> {
    s.split(',')
        .map(|t| {
            t.trim()
                .parse::<i64>()
                .or_else(|_| input(format!("not an integer: {t:?}")))
        })
        .collect()
}

fn parse_f64(t: &str) -> CliResult<f64> {
    t.trim()
        .parse::<f64>()
        .or_else(|_| input(format!("not a number: {t:?}")))
}

/// Accepts `a+bi`, `a-bi`, `bi`, `a`, or `a,b`.
pub fn parse_complex(s: &str) -> CliResult<C64> {
    let s = s.trim().replace(' ', "");
    if let Some((re, im)) = s.split_once(',') {
        return Ok(C64::new(parse_f64(re)?, parse_f64(im)?));
    }
    let Some(body) = s.strip_suffix('i') else {
        return Ok(C64::new(parse_f64(&s)?, 0.0));
    };
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&k| matches!(bytes[k], b'+' | b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
    let imag = |t: &str| match t {
        "" | "+" => Ok(1.0),
        "-" => Ok(-1.0),
        _ => parse_f64(t),
    };
    match split {
        Some(k) => Ok(C64::new(parse_f64(&body[..k])?, imag(&body[k..])?)),
        None => Ok(C64::new(0.0, imag(body)?)),
    }
}

/// `re,im,re,im,...` as complex numbers.
pub fn parse_complex_vector(s: &str) -> CliResult<Vec<C64>> {
    let nums = s
        .split(',')
        .map(parse_f64)
        .collect::<CliResult<Vec<f64>>>()?;
    if nums.len() % 2 != 0 {
        return input("complex vector needs an even count of numbers (re,im pairs)");
    }
    Ok(nums.chunks(2).map(|c| C64::new(c[0], c[1])).collect())
}

pub fn real_json(m: &RMat) -> Value {
    let data: Vec<f64> = m.transpose().iter().copied().collect();
    json!({ "rows": m.nrows(), "cols": m.ncols(), "data": data })
}

pub fn complex_json(c: C64) -> Value {
    json!([c.re, c.im])
}

pub fn complex_matrix_json(m: &CMat) -> Value {
    let data: Vec<Value> = m.transpose().iter().map(|c| complex_json(*c)).collect();
    json!({ "rows": m.nrows(), "cols": m.ncols(), "data": data })
}

pub fn rational_json(q: &QMatrix) -> Value {
    let data: Vec<String> = (0..q.nrows())
        .flat_map(|i| q.row(i).iter().map(|x| x.to_string()))
        .collect();
    json!({ "rows": q.nrows(), "cols": q.ncols(), "data": data })
}

pub fn integer_json(z: &ZMatrix) -> Value {
    let data: Vec<Value> = (0..z.nrows())
        .flat_map(|i| {
            z.row(i)
                .iter()
                .map(|x| i64::try_from(x).map_or_else(|_| json!(x.to_string()), |v| json!(v)))
        })
        .collect();
    json!({ "rows": z.nrows(), "cols": z.ncols(), "data": data })
}

pub fn siegel_json(z: &SiegelPoint) -> Value {
    json!({ "g": z.g(), "re": real_json(&z.re()), "im": real_json(&z.im()) })
}

/// Complex number for humans: `8i`, `-3+0.5i`, `2`.
pub fn show_complex(c: C64) -> String {
    let trim = |x: f64| {
        let x = if x.abs() < 5e-13 { 0.0 } else { x };
        let s = format!("{x:.10}");
        let s = s.trim_end_matches('0').trim_end_matches('.');
        if s == "-0" {
            "0".to_string()
        } else {
            s.to_string()
        }
    };
    let (re, im) = (trim(c.re), trim(c.im));
    match (re.as_str(), im.as_str()) {
        (_, "0") => re,
        ("0", "1") => "i".into(),
        ("0", "-1") => "-i".into(),
        ("0", _) => format!("{im}i"),
        (_, "1") => format!("{re}+i"),
        (_, "-1") => format!("{re}-i"),
        _ if im.starts_with('-') => format!("{re}{im}i"),
        _ => format!("{re}+{im}i"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complex_parsing() {
        assert_eq!(parse_complex("0+1i").unwrap(), C64::new(0.0, 1.0));
        assert_eq!(parse_complex("1-2.5i").unwrap(), C64::new(1.0, -2.5));
        assert_eq!(parse_complex("2i").unwrap(), C64::new(0.0, 2.0));
        assert_eq!(parse_complex("-i").unwrap(), C64::new(0.0, -1.0));
        assert_eq!(parse_complex("1e-3+1e+2i").unwrap(), C64::new(1e-3, 100.0));
        assert_eq!(parse_complex("0.5,1").unwrap(), C64::new(0.5, 1.0));
        assert!(parse_complex("x+i").is_err());
    }

    #[test]
    fn complex_display() {
        assert_eq!(show_complex(C64::new(0.0, 8.0)), "8i");
        assert_eq!(show_complex(C64::new(-8.0, 1e-15)), "-8");
        assert_eq!(show_complex(C64::new(0.25, -3.0)), "0.25-3i");
        assert_eq!(show_complex(C64::new(1.0, 1.0)), "1+i");
    }

    #[test]
    fn matrix_round_trip() {
        let m = RMat::from_row_slice(2, 3, &[1.0, 2.0, 3.0, 4.0, 5.0, 6.0]);
        let v = real_json(&m);
        let back: MatrixJson<f64> = serde_json::from_value(v).unwrap();
        assert_eq!(back.to_real().unwrap(), m);
    }

    #[test]
    fn rational_entries() {
        let m: MatrixJson<RationalJson> =
            serde_json::from_value(json!({"rows": 1, "cols": 2, "data": [3, "-1/6"]})).unwrap();
        let q = m.to_rational().unwrap();
        assert_eq!(q.row(0)[1].to_string(), "-1/6");
        assert!(serde_json::from_value::<MatrixJson<RationalJson>>(
            json!({"rows": 1, "cols": 1, "data": [0.5]})
        )
        .is_err());
    }
}
