//! JSON document format. Integers are written as decimal strings and read
//! from strings or numbers; p-adic scalars use `"p^v * m mod p^N"`.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use serde::de::{self, Deserializer, Visitor};
use serde::{Deserialize, Serialize, Serializer};

use sigma_nabla_core::lfunction::CharPolyTable;
use sigma_nabla_core::{Error, IntPolynomial, LaurentSeries, Matrix, PadicNumber, RingLabel, SeriesMatrix, SigmaNablaModule};

pub const FORMAT_VERSION: u32 = 1;

/// Integer carried as a decimal string.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Int(pub BigInt);

impl Serialize for Int {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.0.to_string())
    }
}

impl<'de> Deserialize<'de> for Int {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        struct V;
        impl Visitor<'_> for V {
            type Value = Int;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("an integer or a decimal string")
            }
            fn visit_i64<E: de::Error>(self, v: i64) -> std::result::Result<Int, E> {
                Ok(Int(v.into()))
            }
            fn visit_u64<E: de::Error>(self, v: u64) -> std::result::Result<Int, E> {
                Ok(Int(v.into()))
            }
            fn visit_str<E: de::Error>(self, v: &str) -> std::result::Result<Int, E> {
                BigInt::from_str(v.trim()).map(Int).map_err(|_| E::custom(format!("not an integer: {v:?}")))
            }
        }
        d.deserialize_any(V)
    }
}

impl Int {
    pub fn small<T: TryFrom<BigInt>>(&self, what: &str) -> Result<T, Error> {
        T::try_from(self.0.clone()).map_err(|_| Error::InvalidInput(format!("{what} = {} is out of range", self.0)))
    }
}

impl<T: Into<BigInt>> From<T> for Int {
    fn from(v: T) -> Self {
        Int(v.into())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeriesDoc {
    /// Known coefficients as `[exponent, scalar]`, exact zeros omitted.
    pub terms: Vec<(i64, String)>,
    pub window: (i64, i64),
    #[serde(default = "yes")]
    pub exact_above: bool,
    /// Absolute precision bound for all coefficients below the window.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tail: Option<i64>,
}

fn yes() -> bool {
    true
}

pub type SeriesMatrixDoc = Vec<Vec<SeriesDoc>>;
pub type ScalarMatrixDoc = Vec<Vec<String>>;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModuleDoc {
    pub format_version: u32,
    pub p: Int,
    pub q: Int,
    pub ring: String,
    pub rank: Int,
    pub phi: SeriesMatrixDoc,
    pub n: SeriesMatrixDoc,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub b: Option<SeriesMatrixDoc>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeriesMatrixFile {
    pub format_version: u32,
    pub p: Int,
    pub matrix: SeriesMatrixDoc,
    /// Optional diagonal `[scalar, exponent]` used by the Robba factorization.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub diagonal: Option<Vec<(String, i64)>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScalarMatrixFile {
    pub format_version: u32,
    pub p: Int,
    pub matrix: ScalarMatrixDoc,
}

/// Matrices over the rationals, entries `"a"` or `"a/b"`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProjectorDoc {
    pub format_version: u32,
    pub pi: Vec<Vec<String>>,
    pub frobenius: Vec<Vec<String>>,
    pub n: Int,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CompanionDoc {
    pub format_version: u32,
    pub block: Vec<Vec<String>>,
    pub n: Int,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PolyEntry {
    pub place: String,
    pub point: String,
    pub coeffs: Vec<Int>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TableDoc {
    pub format_version: u32,
    pub q: Int,
    pub places: Vec<String>,
    pub points: Vec<(String, Int)>,
    pub polys: Vec<PolyEntry>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CohomologyDoc {
    pub format_version: u32,
    pub p0: Vec<Int>,
    pub p1: Vec<Int>,
    pub p2: Vec<Int>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PolyDoc {
    pub format_version: u32,
    pub q: Int,
    pub poly: Vec<Int>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub deg: Option<Int>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weight: Option<Int>,
}

pub fn check_version(v: u32) -> Result<(), Error> {
    if v != FORMAT_VERSION {
        return Err(Error::Parse(format!("unsupported format_version {v}, expected {FORMAT_VERSION}")));
    }
    Ok(())
}

/// Parses a JSON document, reporting the line and column of syntax errors.
pub fn parse_doc<T: for<'de> Deserialize<'de>>(text: &str) -> Result<T, Error> {
    let text = text.replace("\r\n", "\n");
    serde_json::from_str(&text).map_err(|e| Error::Parse(format!("line {} column {}: {e}", e.line(), e.column())))
}

pub fn emit_doc<T: Serialize>(doc: &T) -> String {
    let mut s = serde_json::to_string_pretty(doc).expect("documents serialize");
    s.push('\n');
    s
}

pub fn scalar_to_doc(x: &PadicNumber) -> String {
    x.to_string()
}

pub fn scalar_from_doc(s: &str, p: u64, prec: u32) -> Result<PadicNumber, Error> {
    PadicNumber::parse(s, p, prec)
}

pub fn series_to_doc(a: &LaurentSeries) -> SeriesDoc {
    SeriesDoc {
        terms: a.terms().filter(|(_, c)| !c.is_exact_zero()).map(|(e, c)| (e, scalar_to_doc(&c))).collect(),
        window: a.window(),
        exact_above: a.is_exact_above(),
        tail: a.tail(),
    }
}

pub fn series_from_doc(d: &SeriesDoc, p: u64, prec: u32, max_width: usize) -> Result<LaurentSeries, Error> {
    let (lo, hi) = d.window;
    if hi < lo - 1 {
        return Err(Error::Parse(format!("empty window [{lo}, {hi}]")));
    }
    let width = (hi - lo + 1) as usize;
    if width > max_width {
        return Err(Error::WindowOverflow { width, max: max_width });
    }
    let mut coeffs = vec![PadicNumber::zero(p); width];
    for (e, s) in &d.terms {
        if *e < lo || *e > hi {
            return Err(Error::Parse(format!("exponent {e} outside the window [{lo}, {hi}]")));
        }
        coeffs[(e - lo) as usize] = scalar_from_doc(s, p, prec)?;
    }
    LaurentSeries::from_parts(p, lo, coeffs, d.exact_above, d.tail, max_width)
}

pub fn series_matrix_to_doc(m: &SeriesMatrix) -> SeriesMatrixDoc {
    m.to_rows().iter().map(|r| r.iter().map(series_to_doc).collect()).collect()
}

fn square<T: Clone>(rows: Vec<Vec<T>>, what: &str) -> Result<Matrix<T>, Error> {
    let n = rows.len();
    if n == 0 || rows.iter().any(|r| r.len() != n) {
        return Err(Error::DimensionMismatch(format!("{what} must be a nonempty square matrix")));
    }
    Matrix::from_rows(rows)
}

pub fn series_matrix_from_doc(d: &SeriesMatrixDoc, p: u64, prec: u32, max_width: usize, what: &str) -> Result<SeriesMatrix, Error> {
    let rows = d
        .iter()
        .map(|r| r.iter().map(|s| series_from_doc(s, p, prec, max_width)).collect::<Result<Vec<_>, _>>())
        .collect::<Result<Vec<_>, _>>()?;
    square(rows, what)
}

pub fn scalar_matrix_to_doc(m: &Matrix<PadicNumber>) -> ScalarMatrixDoc {
    m.to_rows().iter().map(|r| r.iter().map(scalar_to_doc).collect()).collect()
}

pub fn scalar_matrix_from_doc(d: &ScalarMatrixDoc, p: u64, prec: u32, what: &str) -> Result<Matrix<PadicNumber>, Error> {
    let rows = d
        .iter()
        .map(|r| r.iter().map(|s| scalar_from_doc(s, p, prec)).collect::<Result<Vec<_>, _>>())
        .collect::<Result<Vec<_>, _>>()?;
    square(rows, what)
}

pub fn rational_from_doc(s: &str) -> Result<BigRational, Error> {
    let t = s.trim();
    let bad = || Error::Parse(format!("malformed rational {s:?}"));
    match t.split_once('/') {
        Some((a, b)) => {
            let a = BigInt::from_str(a.trim()).map_err(|_| bad())?;
            let b = BigInt::from_str(b.trim()).map_err(|_| bad())?;
            if b == BigInt::from(0) {
                return Err(Error::Parse(format!("zero denominator in {s:?}")));
            }
            Ok(BigRational::new(a, b))
        }
        None => Ok(BigRational::from_integer(BigInt::from_str(t).map_err(|_| bad())?)),
    }
}

pub fn rational_matrix_from_doc(d: &[Vec<String>], what: &str) -> Result<Matrix<BigRational>, Error> {
    let rows = d
        .iter()
        .map(|r| r.iter().map(|s| rational_from_doc(s)).collect::<Result<Vec<_>, _>>())
        .collect::<Result<Vec<_>, _>>()?;
    square(rows, what)
}

pub fn rational_matrix_to_doc(m: &Matrix<BigRational>) -> Vec<Vec<String>> {
    m.to_rows().iter().map(|r| r.iter().map(|x| x.to_string()).collect()).collect()
}

pub fn poly_from_doc(c: &[Int]) -> IntPolynomial {
    IntPolynomial::new(c.iter().map(|x| x.0.clone()).collect())
}

pub fn poly_to_doc(p: &IntPolynomial) -> Vec<Int> {
    p.coeffs().iter().map(|x| Int(x.clone())).collect()
}

pub fn prime_of(p: &Int) -> Result<u64, Error> {
    let p: u64 = p.small("p")?;
    if !sigma_nabla_core::padic::is_prime(p) {
        return Err(Error::InvalidInput(format!("p = {p} is not prime")));
    }
    Ok(p)
}

pub fn module_to_doc(m: &SigmaNablaModule) -> ModuleDoc {
    ModuleDoc {
        format_version: FORMAT_VERSION,
        p: m.p().into(),
        q: m.q.into(),
        ring: m.ring.to_string(),
        rank: (m.rank() as u64).into(),
        phi: series_matrix_to_doc(&m.phi),
        n: series_matrix_to_doc(&m.n),
        b: m.b.as_ref().map(series_matrix_to_doc),
    }
}

pub fn module_from_doc(d: &ModuleDoc, prec: u32, max_width: usize) -> Result<SigmaNablaModule, Error> {
    check_version(d.format_version)?;
    let p = prime_of(&d.p)?;
    let q: u64 = d.q.small("q")?;
    let ring = RingLabel::from_str(&d.ring)?;
    let phi = series_matrix_from_doc(&d.phi, p, prec, max_width, "Phi")?;
    let n = series_matrix_from_doc(&d.n, p, prec, max_width, "N")?;
    let b = d.b.as_ref().map(|b| series_matrix_from_doc(b, p, prec, max_width, "B")).transpose()?;
    let rank: usize = d.rank.small("rank")?;
    if rank != phi.rows() {
        return Err(Error::DimensionMismatch(format!("declared rank {rank} but Phi has {} rows", phi.rows())));
    }
    SigmaNablaModule::new(ring, q, phi, n, b)
}

pub fn table_to_doc(t: &CharPolyTable) -> TableDoc {
    TableDoc {
        format_version: FORMAT_VERSION,
        q: t.q.into(),
        places: t.places.clone(),
        points: t.points.iter().map(|(x, d)| (x.clone(), (*d).into())).collect(),
        polys: t
            .polys
            .iter()
            .map(|((place, point), f)| PolyEntry { place: place.clone(), point: point.clone(), coeffs: poly_to_doc(f) })
            .collect(),
    }
}

pub fn table_from_doc(d: &TableDoc) -> Result<CharPolyTable, Error> {
    check_version(d.format_version)?;
    let q: u64 = d.q.small("q")?;
    let points = d.points.iter().map(|(x, deg)| Ok((x.clone(), deg.small("degree")?))).collect::<Result<Vec<_>, Error>>()?;
    let mut polys = BTreeMap::new();
    for e in &d.polys {
        if polys.insert((e.place.clone(), e.point.clone()), poly_from_doc(&e.coeffs)).is_some() {
            return Err(Error::InvalidInput(format!("duplicate entry for ({}, {})", e.place, e.point)));
        }
    }
    CharPolyTable::new(q, d.places.clone(), points, polys)
}
