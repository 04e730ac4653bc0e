use std::fmt;
use std::sync::Arc;

use super::number::PadicNumber;
use crate::error::{Error, Result};
use crate::matrix::{FieldElem, Matrix, RingElem, SigmaScalar};

/// The unramified extension Q_p[x]/(g) of degree f, with g monic and
/// irreducible modulo p, together with the matrix of its Frobenius.
#[derive(Debug, PartialEq)]
pub struct UnramifiedField {
    p: u64,
    prec: u32,
    modulus: Vec<i64>,
    frobenius: Matrix<PadicNumber>,
}

/// Element of an unramified extension in the power basis `1, x, ..., x^{f-1}`.
#[derive(Clone, Debug)]
pub struct UnramifiedScalar {
    field: Arc<UnramifiedField>,
    coeffs: Vec<PadicNumber>,
}

impl PartialEq for UnramifiedScalar {
    fn eq(&self, o: &Self) -> bool {
        self.coeffs == o.coeffs && Arc::ptr_eq(&self.field, &o.field)
    }
}

fn poly_mod_p_is_irreducible(g: &[i64], p: u64) -> bool {
    // Rabin-style check: gcd(x^{p^k} - x, g) = 1 for k < f and x^{p^f} = x.
    let p = p as i64;
    let f = g.len() - 1;
    let red = |a: &[i64]| -> Vec<i64> { a.iter().map(|c| c.rem_euclid(p)).collect() };
    let g = red(g);
    let mulmod = |a: &[i64], b: &[i64]| -> Vec<i64> {
        let mut c = vec![0i64; a.len() + b.len() - 1];
        for (i, x) in a.iter().enumerate() {
            for (j, y) in b.iter().enumerate() {
                c[i + j] = (c[i + j] + x * y) % p;
            }
        }
        for k in (f..c.len()).rev() {
            let t = c[k];
            if t != 0 {
                for j in 0..=f {
                    c[k - f + j] = (c[k - f + j] - t * g[j]).rem_euclid(p);
                }
            }
        }
        c.truncate(f);
        c.resize(f, 0);
        c
    };
    let powp = |a: &[i64]| -> Vec<i64> {
        let mut acc = {
            let mut v = vec![0i64; f];
            v[0] = 1;
            v
        };
        for _ in 0..p {
            acc = mulmod(&acc, a);
        }
        acc
    };
    let trim = |mut a: Vec<i64>| {
        while a.last() == Some(&0) {
            a.pop();
        }
        a
    };
    let inv = |a: i64| -> i64 { (1..p).find(|b| (a * b) % p == 1).unwrap() };
    let gcd_deg = |a: Vec<i64>, b: Vec<i64>| -> usize {
        let (mut x, mut y) = (trim(a), trim(b));
        while !y.is_empty() {
            let mut r = x.clone();
            let dy = y.len() - 1;
            let li = inv(y[dy]);
            while r.len() >= y.len() {
                let c = (r[r.len() - 1] * li) % p;
                let s = r.len() - 1 - dy;
                for j in 0..=dy {
                    r[s + j] = (r[s + j] - c * y[j]).rem_euclid(p);
                }
                r = trim(r);
                if r.is_empty() {
                    break;
                }
            }
            x = y;
            y = r;
        }
        x.len().saturating_sub(1)
    };
    let mut xk = vec![0i64; f];
    if f == 1 {
        return true;
    }
    xk[1] = 1;
    let x = xk.clone();
    for k in 1..=f {
        xk = powp(&xk);
        let mut d = xk.clone();
        d[1] = (d[1] - 1).rem_euclid(p);
        if k < f && gcd_deg(d.clone(), g.clone()) > 0 {
            return false;
        }
        if k == f && trim(d) != Vec::<i64>::new() {
            return false;
        }
    }
    let _ = x;
    true
}

impl UnramifiedField {
    /// `modulus` lists the coefficients of a monic polynomial, lowest first.
    pub fn new(p: u64, modulus: &[i64], prec: u32) -> Result<Arc<Self>> {
        let f = modulus.len().checked_sub(1).filter(|&f| f >= 1).ok_or_else(|| {
            Error::InvalidInput("modulus must have degree at least 1".into())
        })?;
        if modulus[f] != 1 {
            return Err(Error::InvalidInput("modulus must be monic".into()));
        }
        if !poly_mod_p_is_irreducible(modulus, p) {
            return Err(Error::InvalidInput(format!("modulus is reducible modulo {p}")));
        }
        let zero = PadicNumber::zero(p);
        let mut field = UnramifiedField {
            p,
            prec,
            modulus: modulus.to_vec(),
            frobenius: Matrix::zeros_like(f, f, &zero),
        };
        let tmp = Arc::new(UnramifiedField { frobenius: Matrix::identity_like(f, &zero), ..field.clone_parts() });
        let x = UnramifiedScalar::gen(&tmp);
        // Newton lift of x^p to a root of g.
        let mut y = x.pow(p);
        for _ in 0..(2 * prec.ilog2() + 4) {
            let gy = tmp.eval_modulus(&y)?;
            let dgy = tmp.eval_modulus_derivative(&y)?;
            y = y.sub_r(&gy.mul_r(&dgy.inv_r()?)?)?;
        }
        let mut cols = vec![UnramifiedScalar::one(&tmp)];
        for j in 1..f {
            cols.push(cols[j - 1].mul_r(&y)?);
        }
        field.frobenius = Matrix::from_fn(f, f, |i, j| cols[j].coeffs[i]);
        Ok(Arc::new(field))
    }

    /// `Q_p(sqrt(d))` for `d` a non-square unit modulo `p`.
    pub fn quadratic(p: u64, d: i64, prec: u32) -> Result<Arc<Self>> {
        Self::new(p, &[-d, 0, 1], prec)
    }

    fn clone_parts(&self) -> UnramifiedField {
        UnramifiedField { p: self.p, prec: self.prec, modulus: self.modulus.clone(), frobenius: self.frobenius.clone() }
    }

    pub fn degree(&self) -> usize {
        self.modulus.len() - 1
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn frobenius_matrix(&self) -> &Matrix<PadicNumber> {
        &self.frobenius
    }

    fn eval_modulus(self: &Arc<Self>, y: &UnramifiedScalar) -> Result<UnramifiedScalar> {
        let mut acc = UnramifiedScalar::zero(self);
        for &c in self.modulus.iter().rev() {
            acc = acc.mul_r(y)?.add_r(&UnramifiedScalar::from_padic(self, PadicNumber::from_i64(self.p, c, self.prec)))?;
        }
        Ok(acc)
    }

    fn eval_modulus_derivative(self: &Arc<Self>, y: &UnramifiedScalar) -> Result<UnramifiedScalar> {
        let mut acc = UnramifiedScalar::zero(self);
        for (i, &c) in self.modulus.iter().enumerate().skip(1).rev() {
            let k = PadicNumber::from_i64(self.p, c * i as i64, self.prec);
            acc = acc.mul_r(y)?.add_r(&UnramifiedScalar::from_padic(self, k))?;
        }
        Ok(acc)
    }
}

impl UnramifiedScalar {
    pub fn new(field: &Arc<UnramifiedField>, coeffs: Vec<PadicNumber>) -> Result<Self> {
        if coeffs.len() != field.degree() {
            return Err(Error::DimensionMismatch(format!("{} coordinates for degree {}", coeffs.len(), field.degree())));
        }
        Ok(UnramifiedScalar { field: field.clone(), coeffs })
    }

    pub fn zero(field: &Arc<UnramifiedField>) -> Self {
        UnramifiedScalar { field: field.clone(), coeffs: vec![PadicNumber::zero(field.p); field.degree()] }
    }

    pub fn from_padic(field: &Arc<UnramifiedField>, c: PadicNumber) -> Self {
        let mut s = Self::zero(field);
        s.coeffs[0] = c;
        s
    }

    pub fn one(field: &Arc<UnramifiedField>) -> Self {
        Self::from_padic(field, PadicNumber::one(field.p, field.prec))
    }

    /// The class of `x`.
    pub fn gen(field: &Arc<UnramifiedField>) -> Self {
        let mut s = Self::zero(field);
        if field.degree() == 1 {
            s.coeffs[0] = PadicNumber::from_i64(field.p, -field.modulus[0], field.prec);
        } else {
            s.coeffs[1] = PadicNumber::one(field.p, field.prec);
        }
        s
    }

    pub fn coeffs(&self) -> &[PadicNumber] {
        &self.coeffs
    }

    pub fn field(&self) -> &Arc<UnramifiedField> {
        &self.field
    }

    fn pow(&self, e: u64) -> Self {
        let mut acc = Self::one(&self.field);
        for _ in 0..e {
            acc = acc.mul_r(self).expect("same field");
        }
        acc
    }

    fn check(&self, o: &Self) -> Result<()> {
        if !Arc::ptr_eq(&self.field, &o.field) && *self.field != *o.field {
            return Err(Error::InvalidInput("scalars from different unramified fields".into()));
        }
        Ok(())
    }

    /// Multiplication-by-self matrix in the power basis.
    fn mult_matrix(&self) -> Result<Matrix<PadicNumber>> {
        let f = self.field.degree();
        let mut cols = Vec::with_capacity(f);
        let x = Self::gen(&self.field);
        let mut b = self.clone();
        for _ in 0..f {
            cols.push(b.clone());
            b = b.mul_r(&x)?;
        }
        Ok(Matrix::from_fn(f, f, |i, j| cols[j].coeffs[i]))
    }

    fn apply(&self, m: &Matrix<PadicNumber>) -> Self {
        let f = self.field.degree();
        let coeffs = (0..f)
            .map(|i| (0..f).fold(PadicNumber::zero(self.field.p), |acc, j| acc + m.get(i, j).mul(&self.coeffs[j])))
            .collect();
        UnramifiedScalar { field: self.field.clone(), coeffs }
    }

    pub fn agrees_with(&self, o: &Self) -> bool {
        self.sub_r(o).map(|d| d.is_zero_r()).unwrap_or(false)
    }
}

impl RingElem for UnramifiedScalar {
    fn zero_like(&self) -> Self {
        Self::zero(&self.field)
    }
    fn one_like(&self) -> Self {
        Self::one(&self.field)
    }
    fn add_r(&self, o: &Self) -> Result<Self> {
        self.check(o)?;
        let coeffs = self.coeffs.iter().zip(&o.coeffs).map(|(a, b)| *a + *b).collect();
        Ok(UnramifiedScalar { field: self.field.clone(), coeffs })
    }
    fn sub_r(&self, o: &Self) -> Result<Self> {
        self.add_r(&o.neg_r())
    }
    fn mul_r(&self, o: &Self) -> Result<Self> {
        self.check(o)?;
        let f = self.field.degree();
        let p = self.field.p;
        let mut c = vec![PadicNumber::zero(p); 2 * f - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in o.coeffs.iter().enumerate() {
                c[i + j] = c[i + j] + a.mul(b);
            }
        }
        for k in (f..c.len()).rev() {
            let t = c[k];
            if !t.is_exact_zero() {
                for j in 0..f {
                    let g = self.field.modulus[j];
                    if g != 0 {
                        c[k - f + j] = c[k - f + j] - t.mul_int(g);
                    }
                }
            }
        }
        c.truncate(f);
        Ok(UnramifiedScalar { field: self.field.clone(), coeffs: c })
    }
    fn neg_r(&self) -> Self {
        UnramifiedScalar { field: self.field.clone(), coeffs: self.coeffs.iter().map(|c| -*c).collect() }
    }
    fn is_zero_r(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero_at_precision())
    }
    fn is_exact_zero_r(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_exact_zero())
    }
    fn from_int_like(&self, k: i64) -> Self {
        Self::from_padic(&self.field, PadicNumber::from_i64(self.field.p, k, self.field.prec))
    }
}

impl FieldElem for UnramifiedScalar {
    fn inv_r(&self) -> Result<Self> {
        if self.is_zero_r() {
            return Err(Error::DivisionByZero);
        }
        let inv = self.mult_matrix()?.inverse().map_err(|_| Error::DivisionByZero)?;
        Ok(Self::one(&self.field).apply(&inv))
    }
    fn pivot_rank(&self) -> Option<i64> {
        self.coeffs.iter().filter_map(|c| c.valuation()).min()
    }
}

impl SigmaScalar for UnramifiedScalar {
    fn sigma(&self) -> Self {
        self.apply(&self.field.frobenius)
    }
    fn sigma_inv(&self) -> Self {
        let mut s = self.clone();
        for _ in 1..self.field.degree() {
            s = s.sigma();
        }
        s
    }
}

impl fmt::Display for UnramifiedScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.coeffs.iter().map(|c| c.to_string()).collect();
        write!(f, "[{}]", parts.join(", "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quadratic_frobenius_is_conjugation() {
        let k = UnramifiedField::quadratic(5, 2, 10).unwrap();
        let x = UnramifiedScalar::gen(&k);
        assert!(x.sigma().agrees_with(&x.neg_r()));
        assert!(x.mul_r(&x).unwrap().agrees_with(&x.from_int_like(2)));
    }

    #[test]
    fn frobenius_has_order_f() {
        let k = UnramifiedField::new(3, &[1, 2, 0, 1], 12).unwrap(); // x^3 + 2x + 1 mod 3
        let a = UnramifiedScalar::new(&k, vec![PadicNumber::from_i64(3, 4, 12), PadicNumber::from_i64(3, -7, 12), PadicNumber::from_i64(3, 11, 12)]).unwrap();
        let mut s = a.clone();
        for _ in 0..3 {
            s = s.sigma();
        }
        assert!(s.agrees_with(&a));
        assert!(!a.sigma().agrees_with(&a));
        let prod = a.mul_r(&a.inv_r().unwrap()).unwrap();
        assert!(prod.agrees_with(&a.one_like()));
        // sigma is multiplicative
        let b = a.add_r(&UnramifiedScalar::gen(&k)).unwrap();
        assert!(a.mul_r(&b).unwrap().sigma().agrees_with(&a.sigma().mul_r(&b.sigma()).unwrap()));
    }

    #[test]
    fn reducible_modulus_rejected() {
        assert!(UnramifiedField::new(5, &[-4, 0, 1], 8).is_err());
        assert!(UnramifiedField::new(5, &[2, 1], 8).is_ok());
    }
}
