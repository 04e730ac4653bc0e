use std::fmt;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Polynomial in one variable with exact integer coefficients, lowest degree first.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct IntPolynomial {
    coeffs: Vec<BigInt>,
}

impl IntPolynomial {
    pub fn new(mut coeffs: Vec<BigInt>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        IntPolynomial { coeffs }
    }

    pub fn from_i64s(c: &[i64]) -> Self {
        Self::new(c.iter().map(|&x| BigInt::from(x)).collect())
    }

    pub fn zero() -> Self {
        IntPolynomial { coeffs: vec![] }
    }

    pub fn one() -> Self {
        Self::from_i64s(&[1])
    }

    /// `1 - a t^d`.
    pub fn one_minus(a: BigInt, d: usize) -> Self {
        let mut c = vec![BigInt::zero(); d + 1];
        c[0] = BigInt::one();
        c[d] -= a;
        Self::new(c)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> BigInt {
        self.coeffs.get(i).cloned().unwrap_or_default()
    }

    pub fn add(&self, o: &Self) -> Self {
        let n = self.coeffs.len().max(o.coeffs.len());
        Self::new((0..n).map(|i| self.coeff(i) + o.coeff(i)).collect())
    }

    pub fn sub(&self, o: &Self) -> Self {
        let n = self.coeffs.len().max(o.coeffs.len());
        Self::new((0..n).map(|i| self.coeff(i) - o.coeff(i)).collect())
    }

    pub fn mul(&self, o: &Self) -> Self {
        if self.is_zero() || o.is_zero() {
            return Self::zero();
        }
        let mut c = vec![BigInt::zero(); self.coeffs.len() + o.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in o.coeffs.iter().enumerate() {
                c[i + j] += a * b;
            }
        }
        Self::new(c)
    }

    pub fn pow(&self, e: u32) -> Self {
        (0..e).fold(Self::one(), |acc, _| acc.mul(self))
    }

    /// Substitutes `t -> t^d`.
    pub fn compose_power(&self, d: usize) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        let mut c = vec![BigInt::zero(); (self.coeffs.len() - 1) * d + 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            c[i * d] = a.clone();
        }
        Self::new(c)
    }

    pub fn eval(&self, x: &BigRational) -> BigRational {
        self.coeffs.iter().rev().fold(BigRational::zero(), |acc, c| acc * x + BigRational::from_integer(c.clone()))
    }

    /// Quotient by `1 - a t` when it divides exactly.
    pub fn div_one_minus(&self, a: &BigInt) -> Option<Self> {
        if self.is_zero() {
            return Some(Self::zero());
        }
        let n = self.coeffs.len();
        let mut r = Vec::with_capacity(n - 1);
        let mut prev = BigInt::zero();
        for i in 0..n - 1 {
            prev = &self.coeffs[i] + a * &prev;
            r.push(prev.clone());
        }
        let rem = &self.coeffs[n - 1] + a * &prev;
        rem.is_zero().then(|| Self::new(r))
    }
}

impl fmt::Display for IntPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let sign = if c.is_negative() { "-" } else { "+" };
            let a = c.abs();
            if first {
                if c.is_negative() {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            first = false;
            match (i, a.is_one()) {
                (0, _) => write!(f, "{a}")?,
                (1, true) => write!(f, "t")?,
                (1, false) => write!(f, "{a}*t")?,
                (_, true) => write!(f, "t^{i}")?,
                (_, false) => write!(f, "{a}*t^{i}")?,
            }
        }
        Ok(())
    }
}

type QPoly = Vec<BigRational>;

fn q_trim(mut a: QPoly) -> QPoly {
    while a.last().is_some_and(|c| c.is_zero()) {
        a.pop();
    }
    a
}

fn q_deriv(a: &QPoly) -> QPoly {
    q_trim(a.iter().enumerate().skip(1).map(|(i, c)| c * BigRational::from_integer(i.into())).collect())
}

fn q_divrem(a: &QPoly, b: &QPoly) -> (QPoly, QPoly) {
    let mut r = a.clone();
    let db = b.len() - 1;
    let lead = b[db].clone();
    if r.len() < b.len() {
        return (vec![], r);
    }
    let mut q = vec![BigRational::zero(); r.len() - db];
    for i in (0..q.len()).rev() {
        let c = &r[i + db] / &lead;
        if !c.is_zero() {
            for (j, bj) in b.iter().enumerate() {
                r[i + j] -= &c * bj;
            }
        }
        q[i] = c;
    }
    (q_trim(q), q_trim(r))
}

fn q_monic(a: QPoly) -> QPoly {
    let l = a.last().cloned().unwrap();
    a.into_iter().map(|c| c / &l).collect()
}

fn q_gcd(a: &QPoly, b: &QPoly) -> QPoly {
    let (mut x, mut y) = (a.clone(), b.clone());
    while !y.is_empty() {
        let r = q_divrem(&x, &y).1;
        x = y;
        y = if r.is_empty() { r } else { q_monic(r) };
    }
    q_monic(x)
}

fn q_sub(a: &QPoly, b: &QPoly) -> QPoly {
    let n = a.len().max(b.len());
    let z = BigRational::zero();
    q_trim((0..n).map(|i| a.get(i).unwrap_or(&z) - b.get(i).unwrap_or(&z)).collect())
}

/// Squarefree decomposition (Yun): pairs (factor, multiplicity).
fn squarefree(f: &QPoly) -> Vec<(QPoly, usize)> {
    let f = q_monic(f.clone());
    let df = q_deriv(&f);
    let a0 = q_gcd(&f, &df);
    let mut b = q_divrem(&f, &a0).0;
    let mut c = q_divrem(&df, &a0).0;
    let mut d = q_sub(&c, &q_deriv(&b));
    let mut out = vec![];
    let mut i = 1;
    while b.len() > 1 {
        let a = if d.is_empty() { b.clone() } else { q_gcd(&b, &d) };
        b = q_divrem(&b, &a).0;
        c = q_divrem(&d, &a).0;
        d = q_sub(&c, &q_deriv(&b));
        if a.len() > 1 {
            out.push((a, i));
        }
        i += 1;
    }
    out
}

fn ln_abs(x: &BigRational) -> f64 {
    let ln = |n: &BigInt| {
        let bits = n.bits();
        if bits < 1000 {
            n.abs().to_f64().unwrap().ln()
        } else {
            let sh = bits - 900;
            (n.abs() >> sh).to_f64().unwrap().ln() + sh as f64 * std::f64::consts::LN_2
        }
    };
    ln(x.numer()) - ln(x.denom())
}

/// Complex roots of a squarefree polynomial with nonzero constant term
/// (Aberth–Ehrlich iteration after rescaling the variable).
fn aberth(f: &QPoly) -> Result<Vec<Complex64>> {
    let n = f.len() - 1;
    let lns: Vec<Option<f64>> = f.iter().map(|c| (!c.is_zero()).then(|| ln_abs(c))).collect();
    let ln_s = (lns[0].unwrap() - lns[n].unwrap()) / n as f64;
    let scaled: Vec<Option<f64>> = lns.iter().enumerate().map(|(i, l)| l.map(|l| l + i as f64 * ln_s)).collect();
    let top = scaled.iter().flatten().cloned().fold(f64::NEG_INFINITY, f64::max);
    let coeffs: Vec<f64> = f
        .iter()
        .zip(&scaled)
        .map(|(c, l)| match l {
            Some(l) => {
                let s = if c.is_negative() { -1.0 } else { 1.0 };
                s * (l - top).exp()
            }
            None => 0.0,
        })
        .collect();
    let eval = |z: Complex64| -> (Complex64, Complex64) {
        let mut pv = Complex64::new(0.0, 0.0);
        let mut dv = Complex64::new(0.0, 0.0);
        for c in coeffs.iter().rev() {
            dv = dv * z + pv;
            pv = pv * z + c;
        }
        (pv, dv)
    };
    let mut z: Vec<Complex64> = (0..n)
        .map(|k| Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * k as f64 / n as f64 + 0.4))
        .collect();
    let mut converged = false;
    for _ in 0..2000 {
        let mut worst: f64 = 0.0;
        for k in 0..n {
            let (pv, dv) = eval(z[k]);
            if pv.norm() == 0.0 {
                continue;
            }
            let w = pv / dv;
            let s: Complex64 = (0..n).filter(|&j| j != k).map(|j| 1.0 / (z[k] - z[j])).sum();
            let step = w / (Complex64::new(1.0, 0.0) - w * s);
            if step.is_finite() {
                z[k] -= step;
                worst = worst.max(step.norm() / z[k].norm().max(1e-300));
            }
        }
        if worst < 1e-15 {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::NumericalFailure(format!("root iteration did not converge for degree {n}")));
    }
    for zk in z.iter_mut() {
        for _ in 0..3 {
            let (pv, dv) = eval(*zk);
            if dv.norm() > 0.0 {
                let step = pv / dv;
                if step.is_finite() {
                    *zk -= step;
                }
            }
        }
    }
    let s = ln_s.exp();
    Ok(z.into_iter().map(|x| x * s).collect())
}

/// Magnitudes of the reciprocal roots of `poly`, i.e. the `|alpha|` with
/// `poly(t) = c * prod (1 - alpha t) * t^k`, sorted ascending and repeated
/// with multiplicity. Roots at `t = 0` have no reciprocal and are skipped.
///
/// Multiple roots are separated exactly over Q before the numerical stage;
/// on squarefree factors of degree at most 64 with moderate coefficients the
/// relative error is below 1e-9.
pub fn complex_root_magnitudes(poly: &IntPolynomial) -> Result<Vec<f64>> {
    if poly.is_zero() {
        return Err(Error::InvalidInput("zero polynomial has no roots".into()));
    }
    let start = poly.coeffs.iter().position(|c| !c.is_zero()).unwrap();
    let rev: QPoly = poly.coeffs[start..].iter().rev().map(|c| BigRational::from_integer(c.clone())).collect();
    if rev.len() == 1 {
        return Ok(vec![]);
    }
    let mut out = vec![];
    for (factor, mult) in squarefree(&rev) {
        let roots = if factor.len() == 2 {
            vec![Complex64::new((-(&factor[0] / &factor[1])).to_f64().unwrap(), 0.0)]
        } else {
            aberth(&factor)?
        };
        for r in roots {
            for _ in 0..mult {
                out.push(r.norm());
            }
        }
    }
    out.sort_by(|a, b| a.partial_cmp(b).unwrap());
    Ok(out)
}

/// Gcd of the coefficients.
pub fn content(poly: &IntPolynomial) -> BigInt {
    poly.coeffs.iter().fold(BigInt::zero(), |g, c| g.gcd(c))
}
