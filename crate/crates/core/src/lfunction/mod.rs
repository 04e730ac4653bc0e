//! Compatible systems of local factors, truncated L-functions and the
//! trace-formula comparison.

use std::collections::{BTreeMap, HashMap};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::frobenius::{purity_check, Purity};
use crate::padic::IntPolynomial;

/// Local factors `det(1 - t^{deg x} Frob_x)` per place and closed point.
#[derive(Clone, Debug, PartialEq)]
pub struct CharPolyTable {
    pub q: u64,
    pub places: Vec<String>,
    /// Point identifiers with their degrees.
    pub points: Vec<(String, u32)>,
    pub polys: BTreeMap<(String, String), IntPolynomial>,
}

impl CharPolyTable {
    pub fn new(
        q: u64,
        places: Vec<String>,
        points: Vec<(String, u32)>,
        polys: BTreeMap<(String, String), IntPolynomial>,
    ) -> Result<Self> {
        let t = CharPolyTable { q, places, points, polys };
        t.validate()?;
        Ok(t)
    }

    pub fn validate(&self) -> Result<()> {
        let degrees: HashMap<&str, u32> = self.points.iter().map(|(x, d)| (x.as_str(), *d)).collect();
        if degrees.len() != self.points.len() {
            return Err(Error::InvalidInput("duplicate point identifier".into()));
        }
        let mut rank: Option<usize> = None;
        for ((place, point), poly) in &self.polys {
            if !self.places.contains(place) {
                return Err(Error::InvalidInput(format!("unknown place {place}")));
            }
            let d = *degrees.get(point.as_str()).ok_or_else(|| Error::InvalidInput(format!("unknown point {point}")))?;
            if d == 0 {
                return Err(Error::InvalidInput(format!("point {point} has degree 0")));
            }
            if poly.coeff(0) != BigInt::one() {
                return Err(Error::InvalidInput(format!("local factor at ({place}, {point}) has constant term != 1")));
            }
            let deg = poly.degree().unwrap_or(0);
            if deg % d as usize != 0 {
                return Err(Error::InvalidInput(format!("local factor at ({place}, {point}) has degree {deg} not divisible by {d}")));
            }
            let r = deg / d as usize;
            match rank {
                None => rank = Some(r),
                Some(r0) if r0 != r => {
                    return Err(Error::InvalidInput(format!("local factor at ({place}, {point}) has rank {r}, expected {r0}")))
                }
                _ => {}
            }
        }
        Ok(())
    }

    pub fn degree_of(&self, point: &str) -> Option<u32> {
        self.points.iter().find(|(x, _)| x == point).map(|(_, d)| *d)
    }

    pub fn poly(&self, place: &str, point: &str) -> Option<&IntPolynomial> {
        self.polys.get(&(place.to_string(), point.to_string()))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Compatibility {
    Compatible,
    Mismatch { point: String, place1: String, place2: String },
}

/// Compares local factors across places point by point. Places are visited
/// in sorted order so the verdict does not depend on input order.
pub fn check_compatible(table: &CharPolyTable) -> Compatibility {
    let mut places = table.places.clone();
    places.sort();
    let mut points: Vec<&String> = table.points.iter().map(|(x, _)| x).collect();
    points.sort();
    for point in points {
        let mut first: Option<(&String, &IntPolynomial)> = None;
        for place in &places {
            let Some(poly) = table.poly(place, point) else { continue };
            match first {
                None => first = Some((place, poly)),
                Some((p0, f0)) if f0 != poly => {
                    return Compatibility::Mismatch { point: point.clone(), place1: p0.clone(), place2: place.clone() }
                }
                _ => {}
            }
        }
    }
    Compatibility::Compatible
}

/// Power series truncated after `t^T`, with exact rational coefficients.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LSeries {
    pub coeffs: Vec<BigRational>,
    pub t: usize,
}

impl LSeries {
    pub fn one(t: usize) -> Self {
        let mut coeffs = vec![BigRational::zero(); t + 1];
        coeffs[0] = BigRational::one();
        LSeries { coeffs, t }
    }

    pub fn from_integers(c: &[BigInt], t: usize) -> Self {
        LSeries { coeffs: (0..=t).map(|i| BigRational::from_integer(c.get(i).cloned().unwrap_or_default())).collect(), t }
    }

    pub fn mul(&self, o: &Self) -> Self {
        let t = self.t.min(o.t);
        let mut c = vec![BigRational::zero(); t + 1];
        for (i, a) in self.coeffs.iter().enumerate().take(t + 1) {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.coeffs.iter().enumerate().take(t + 1 - i) {
                c[i + j] += a * b;
            }
        }
        LSeries { coeffs: c, t }
    }

    /// Inverse of a series with constant term 1.
    pub fn inverse(&self) -> Result<Self> {
        if self.coeffs[0] != BigRational::one() {
            return Err(Error::InvalidInput("series must have constant term 1".into()));
        }
        let mut r = vec![BigRational::zero(); self.t + 1];
        r[0] = BigRational::one();
        for k in 1..=self.t {
            let mut s = BigRational::zero();
            for j in 1..=k {
                s += &self.coeffs[j] * &r[k - j];
            }
            r[k] = -s;
        }
        Ok(LSeries { coeffs: r, t: self.t })
    }

    pub fn of_poly(p: &IntPolynomial, t: usize) -> Self {
        Self::from_integers(p.coeffs(), t)
    }
}

/// Integer power series inverse of a polynomial with constant term 1.
fn inverse_int(p: &IntPolynomial, t: usize) -> Vec<BigInt> {
    let c = p.coeffs();
    let mut r = vec![BigInt::zero(); t + 1];
    r[0] = BigInt::one();
    for k in 1..=t {
        let mut s = BigInt::zero();
        for j in 1..=k.min(c.len() - 1) {
            s += &c[j] * &r[k - j];
        }
        r[k] = -s;
    }
    r
}

fn mul_int(a: &[BigInt], b: &[BigInt], t: usize) -> Vec<BigInt> {
    let mut c = vec![BigInt::zero(); t + 1];
    for (i, x) in a.iter().enumerate().take(t + 1) {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate().take(t + 1 - i) {
            c[i + j] += x * y;
        }
    }
    c
}

fn pow_int(a: &[BigInt], mut e: usize, t: usize) -> Vec<BigInt> {
    let mut acc = vec![BigInt::zero(); t + 1];
    acc[0] = BigInt::one();
    let mut base = a.to_vec();
    while e > 0 {
        if e & 1 == 1 {
            acc = mul_int(&acc, &base, t);
        }
        e >>= 1;
        if e > 0 {
            base = mul_int(&base, &base, t);
        }
    }
    acc
}

/// Euler product `prod_x det(1 - t^{deg x} Frob_x)^{-1}` at `place`, expanded
/// through `t^T`. Points of degree above `T` contribute nothing.
pub fn lfunction_truncated(table: &CharPolyTable, place: &str, t: usize) -> Result<LSeries> {
    if !table.places.iter().any(|x| x == place) {
        return Err(Error::InvalidInput(format!("unknown place {place}")));
    }
    let mut counts: BTreeMap<Vec<BigInt>, usize> = BTreeMap::new();
    for (point, d) in &table.points {
        if *d as usize > t {
            continue;
        }
        if let Some(poly) = table.poly(place, point) {
            *counts.entry(poly.coeffs().to_vec()).or_default() += 1;
        }
    }
    let mut acc = vec![BigInt::zero(); t + 1];
    acc[0] = BigInt::one();
    for (c, k) in counts {
        let inv = inverse_int(&IntPolynomial::new(c), t);
        acc = mul_int(&acc, &pow_int(&inv, k, t), t);
    }
    Ok(LSeries::from_integers(&acc, t))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TraceVerdict {
    /// Agreement through `t^degree`.
    Consistent { degree: usize },
    Inconsistent { degree: usize },
}

impl TraceVerdict {
    pub fn is_consistent(&self) -> bool {
        matches!(self, TraceVerdict::Consistent { .. })
    }
}

/// Compares the Euler product with `P1 / (P0 P2)` through `t^T`.
pub fn trace_formula_check(table: &CharPolyTable, place: &str, cohomology: &[IntPolynomial; 3], t: usize) -> Result<TraceVerdict> {
    let euler = lfunction_truncated(table, place, t)?;
    for (i, p) in cohomology.iter().enumerate() {
        if p.coeff(0) != BigInt::one() {
            return Err(Error::InvalidInput(format!("P{i} must have constant term 1")));
        }
    }
    let p0 = LSeries::of_poly(&cohomology[0], t);
    let p1 = LSeries::of_poly(&cohomology[1], t);
    let p2 = LSeries::of_poly(&cohomology[2], t);
    let rhs = p1.mul(&p0.mul(&p2).inverse()?);
    for k in 0..=t {
        if euler.coeffs[k] != rhs.coeffs[k] {
            return Ok(TraceVerdict::Inconsistent { degree: k });
        }
    }
    Ok(TraceVerdict::Consistent { degree: t })
}

/// Multiplicity of the root `t = q^{-d}` by repeated exact division by `1 - q^d t`.
pub fn pole_order_at(p: &IntPolynomial, q: u64, d: u32) -> usize {
    if p.is_zero() {
        return 0;
    }
    let a = BigInt::from(q).pow(d);
    let mut cur = p.clone();
    let mut k = 0;
    while cur.degree().is_some_and(|x| x > 0) {
        match cur.div_one_minus(&a) {
            Some(next) => {
                cur = next;
                k += 1;
            }
            None => break,
        }
    }
    k
}

/// Purity verdict for every stored local factor, sorted by place then point.
pub fn check_pure_system(table: &CharPolyTable, w: i64, tol: f64) -> Result<Vec<(String, String, Purity)>> {
    let mut out = vec![];
    for ((place, point), poly) in &table.polys {
        let d = table.degree_of(point).ok_or_else(|| Error::InvalidInput(format!("unknown point {point}")))?;
        out.push((place.clone(), point.clone(), purity_check(poly, table.q, d, w, tol)?));
    }
    Ok(out)
}
