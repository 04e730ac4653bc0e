//! Dense matrices over any of the scalar or series types of the crate.

use std::fmt::Debug;

use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::padic::PadicNumber;

/// Commutative ring element. Operations are fallible because series
/// arithmetic can exceed its window budget.
pub trait RingElem: Clone + Debug {
    fn zero_like(&self) -> Self;
    fn one_like(&self) -> Self;
    fn add_r(&self, o: &Self) -> Result<Self>;
    fn sub_r(&self, o: &Self) -> Result<Self>;
    fn mul_r(&self, o: &Self) -> Result<Self>;
    fn neg_r(&self) -> Self;
    /// Indistinguishable from zero at working precision.
    fn is_zero_r(&self) -> bool;
    fn is_exact_zero_r(&self) -> bool;
    #[allow(clippy::wrong_self_convention)]
    fn from_int_like(&self, k: i64) -> Self;
}

pub trait FieldElem: RingElem {
    fn inv_r(&self) -> Result<Self>;
    /// Lower is a better pivot; `None` when the element cannot be a pivot.
    fn pivot_rank(&self) -> Option<i64>;
}

/// Scalars carrying the absolute Frobenius (identity over Q and Q_p).
pub trait SigmaScalar: FieldElem {
    fn sigma(&self) -> Self;
    fn sigma_inv(&self) -> Self;
}

impl RingElem for BigRational {
    fn zero_like(&self) -> Self {
        BigRational::zero()
    }
    fn one_like(&self) -> Self {
        BigRational::one()
    }
    fn add_r(&self, o: &Self) -> Result<Self> {
        Ok(self + o)
    }
    fn sub_r(&self, o: &Self) -> Result<Self> {
        Ok(self - o)
    }
    fn mul_r(&self, o: &Self) -> Result<Self> {
        Ok(self * o)
    }
    fn neg_r(&self) -> Self {
        -self
    }
    fn is_zero_r(&self) -> bool {
        self.is_zero()
    }
    fn is_exact_zero_r(&self) -> bool {
        self.is_zero()
    }
    fn from_int_like(&self, k: i64) -> Self {
        BigRational::from_integer(k.into())
    }
}

impl FieldElem for BigRational {
    fn inv_r(&self) -> Result<Self> {
        if self.is_zero() {
            Err(Error::DivisionByZero)
        } else {
            Ok(self.recip())
        }
    }
    fn pivot_rank(&self) -> Option<i64> {
        (!self.is_zero()).then_some(0)
    }
}

impl SigmaScalar for BigRational {
    fn sigma(&self) -> Self {
        self.clone()
    }
    fn sigma_inv(&self) -> Self {
        self.clone()
    }
}

impl RingElem for PadicNumber {
    fn zero_like(&self) -> Self {
        PadicNumber::zero(self.p())
    }
    fn one_like(&self) -> Self {
        PadicNumber::one(self.p(), crate::padic::max_precision(self.p()))
    }
    fn add_r(&self, o: &Self) -> Result<Self> {
        Ok(PadicNumber::add(self, o))
    }
    fn sub_r(&self, o: &Self) -> Result<Self> {
        Ok(PadicNumber::sub(self, o))
    }
    fn mul_r(&self, o: &Self) -> Result<Self> {
        Ok(PadicNumber::mul(self, o))
    }
    fn neg_r(&self) -> Self {
        PadicNumber::neg(self)
    }
    fn is_zero_r(&self) -> bool {
        self.is_zero_at_precision()
    }
    fn is_exact_zero_r(&self) -> bool {
        self.is_exact_zero()
    }
    fn from_int_like(&self, k: i64) -> Self {
        PadicNumber::one_like(self).mul_int(k)
    }
}

impl FieldElem for PadicNumber {
    fn inv_r(&self) -> Result<Self> {
        self.inv()
    }
    fn pivot_rank(&self) -> Option<i64> {
        self.valuation()
    }
}

impl SigmaScalar for PadicNumber {
    fn sigma(&self) -> Self {
        *self
    }
    fn sigma_inv(&self) -> Self {
        *self
    }
}

/// Row-major dense matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Clone> Matrix<T> {
    pub fn from_vec(rows: usize, cols: usize, data: Vec<T>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!("{} entries for a {rows}x{cols} matrix", data.len())));
        }
        Ok(Matrix { rows, cols, data })
    }

    pub fn from_rows(rows: Vec<Vec<T>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        if rows.iter().any(|x| x.len() != c) {
            return Err(Error::DimensionMismatch("ragged rows".into()));
        }
        Ok(Matrix { rows: r, cols: c, data: rows.into_iter().flatten().collect() })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Matrix { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &T {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: T) {
        self.data[i * self.cols + j] = v;
    }

    pub fn entries(&self) -> &[T] {
        &self.data
    }

    pub fn to_rows(&self) -> Vec<Vec<T>> {
        self.data.chunks(self.cols.max(1)).take(self.rows).map(|r| r.to_vec()).collect()
    }

    pub fn map<U: Clone>(&self, f: impl FnMut(&T) -> U) -> Matrix<U> {
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(f).collect() }
    }

    pub fn try_map<U: Clone>(&self, f: impl FnMut(&T) -> Result<U>) -> Result<Matrix<U>> {
        Ok(Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(f).collect::<Result<_>>()? })
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self.get(j, i).clone())
    }

    pub fn swap_rows(&mut self, a: usize, b: usize) {
        if a != b {
            for j in 0..self.cols {
                self.data.swap(a * self.cols + j, b * self.cols + j);
            }
        }
    }

    pub fn swap_cols(&mut self, a: usize, b: usize) {
        if a != b {
            for i in 0..self.rows {
                self.data.swap(i * self.cols + a, i * self.cols + b);
            }
        }
    }

    pub fn submatrix(&self, r0: usize, r1: usize, c0: usize, c1: usize) -> Self {
        Self::from_fn(r1 - r0, c1 - c0, |i, j| self.get(r0 + i, c0 + j).clone())
    }

    pub fn column(&self, j: usize) -> Vec<T> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }
}

impl<T: RingElem> Matrix<T> {
    pub fn zeros_like(rows: usize, cols: usize, sample: &T) -> Self {
        let z = sample.zero_like();
        Self::from_fn(rows, cols, |_, _| z.clone())
    }

    pub fn identity_like(n: usize, sample: &T) -> Self {
        let (z, o) = (sample.zero_like(), sample.one_like());
        Self::from_fn(n, n, |i, j| if i == j { o.clone() } else { z.clone() })
    }

    fn sample(&self) -> Result<&T> {
        self.data.first().ok_or_else(|| Error::DimensionMismatch("empty matrix".into()))
    }

    fn same_shape(&self, o: &Self) -> Result<()> {
        if self.rows != o.rows || self.cols != o.cols {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} vs {}x{}",
                self.rows, self.cols, o.rows, o.cols
            )));
        }
        Ok(())
    }

    pub fn add(&self, o: &Self) -> Result<Self> {
        self.same_shape(o)?;
        let data = self.data.iter().zip(&o.data).map(|(a, b)| a.add_r(b)).collect::<Result<_>>()?;
        Ok(Matrix { rows: self.rows, cols: self.cols, data })
    }

    pub fn sub(&self, o: &Self) -> Result<Self> {
        self.same_shape(o)?;
        let data = self.data.iter().zip(&o.data).map(|(a, b)| a.sub_r(b)).collect::<Result<_>>()?;
        Ok(Matrix { rows: self.rows, cols: self.cols, data })
    }

    pub fn neg(&self) -> Self {
        self.map(|a| a.neg_r())
    }

    pub fn mul(&self, o: &Self) -> Result<Self> {
        if self.cols != o.rows {
            return Err(Error::DimensionMismatch(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, o.rows, o.cols
            )));
        }
        let mut data = Vec::with_capacity(self.rows * o.cols);
        for i in 0..self.rows {
            for j in 0..o.cols {
                let mut acc: Option<T> = None;
                for k in 0..self.cols {
                    let t = self.get(i, k).mul_r(o.get(k, j))?;
                    acc = Some(match acc {
                        None => t,
                        Some(a) => a.add_r(&t)?,
                    });
                }
                data.push(match acc {
                    Some(a) => a,
                    None => self.sample().or_else(|_| o.sample())?.zero_like(),
                });
            }
        }
        Ok(Matrix { rows: self.rows, cols: o.cols, data })
    }

    pub fn scale(&self, c: &T) -> Result<Self> {
        self.try_map(|a| a.mul_r(c))
    }

    pub fn pow(&self, e: u32) -> Result<Self> {
        let mut acc = Self::identity_like(self.rows, self.sample()?);
        for _ in 0..e {
            acc = acc.mul(self)?;
        }
        Ok(acc)
    }

    pub fn is_zero_r(&self) -> bool {
        self.data.iter().all(|a| a.is_zero_r())
    }

    /// True unless some entry of `self - o` is provably nonzero.
    pub fn agrees_with(&self, o: &Self) -> Result<bool> {
        Ok(self.sub(o)?.is_zero_r())
    }

    /// Coefficients of `det(T I - A)`, leading coefficient first (Berkowitz,
    /// division free).
    pub fn char_poly(&self) -> Result<Vec<T>> {
        if !self.is_square() {
            return Err(Error::DimensionMismatch("characteristic polynomial of a non-square matrix".into()));
        }
        let n = self.rows;
        if n == 0 {
            return Err(Error::DimensionMismatch("empty matrix".into()));
        }
        let one = self.get(0, 0).one_like();
        let mut v = vec![one.clone(), self.get(0, 0).neg_r()];
        for r in 1..n {
            let a = self.get(r, r).clone();
            let row: Vec<T> = (0..r).map(|j| self.get(r, j).clone()).collect();
            let mut col: Vec<T> = (0..r).map(|i| self.get(i, r).clone()).collect();
            // Toeplitz column: 1, -a, -R C, -R M C, ..., -R M^{r-1} C
            let mut t = vec![one.clone(), a.neg_r()];
            for k in 0..r {
                let mut s = row[0].mul_r(&col[0])?;
                for j in 1..r {
                    s = s.add_r(&row[j].mul_r(&col[j])?)?;
                }
                t.push(s.neg_r());
                if k + 1 < r {
                    let mut next = Vec::with_capacity(r);
                    for i in 0..r {
                        let mut s = self.get(i, 0).mul_r(&col[0])?;
                        for (j, cj) in col.iter().enumerate().skip(1) {
                            s = s.add_r(&self.get(i, j).mul_r(cj)?)?;
                        }
                        next.push(s);
                    }
                    col = next;
                }
            }
            let mut nv = Vec::with_capacity(r + 2);
            for i in 0..r + 2 {
                let mut acc: Option<T> = None;
                for j in 0..=i.min(r) {
                    if i - j < t.len() {
                        let term = t[i - j].mul_r(&v[j])?;
                        acc = Some(match acc {
                            None => term,
                            Some(x) => x.add_r(&term)?,
                        });
                    }
                }
                nv.push(acc.unwrap());
            }
            v = nv;
        }
        Ok(v)
    }

    pub fn det(&self) -> Result<T> {
        let c = self.char_poly()?;
        let last = c.last().unwrap().clone();
        Ok(if self.rows % 2 == 1 { last.neg_r() } else { last })
    }

    /// Adjugate matrix (transpose of the cofactor matrix).
    pub fn adjugate(&self) -> Result<Self> {
        let n = self.rows;
        let s = self.sample()?;
        if n == 1 {
            return Ok(Self::identity_like(1, s));
        }
        let mut out = Self::zeros_like(n, n, s);
        for i in 0..n {
            for j in 0..n {
                let minor = Self::from_fn(n - 1, n - 1, |a, b| {
                    let r = if a < i { a } else { a + 1 };
                    let c = if b < j { b } else { b + 1 };
                    self.get(r, c).clone()
                });
                let d = minor.det()?;
                out.set(j, i, if (i + j) % 2 == 1 { d.neg_r() } else { d });
            }
        }
        Ok(out)
    }
}

impl<T: FieldElem> Matrix<T> {
    /// Gauss–Jordan inverse with minimal-rank pivots.
    pub fn inverse(&self) -> Result<Self> {
        if !self.is_square() {
            return Err(Error::DimensionMismatch("inverse of a non-square matrix".into()));
        }
        let n = self.rows;
        let mut a = self.clone();
        let mut inv = Self::identity_like(n, self.sample()?);
        for c in 0..n {
            let piv = (c..n)
                .filter_map(|r| a.get(r, c).pivot_rank().map(|k| (k, r)))
                .min()
                .ok_or_else(|| Error::SingularInput(format!("no pivot in column {c}")))?
                .1;
            a.swap_rows(c, piv);
            inv.swap_rows(c, piv);
            let pinv = a.get(c, c).inv_r()?;
            for j in 0..n {
                a.set(c, j, a.get(c, j).mul_r(&pinv)?);
                inv.set(c, j, inv.get(c, j).mul_r(&pinv)?);
            }
            for r in 0..n {
                if r == c || a.get(r, c).is_exact_zero_r() {
                    continue;
                }
                let f = a.get(r, c).clone();
                for j in 0..n {
                    a.set(r, j, a.get(r, j).sub_r(&f.mul_r(a.get(c, j))?)?);
                    inv.set(r, j, inv.get(r, j).sub_r(&f.mul_r(inv.get(c, j))?)?);
                }
            }
        }
        Ok(inv)
    }
}

impl<T: SigmaScalar> Matrix<T> {
    pub fn sigma(&self) -> Self {
        self.map(|a| a.sigma())
    }

    pub fn sigma_pow(&self, k: i64) -> Self {
        let mut m = self.clone();
        for _ in 0..k.unsigned_abs() {
            m = if k > 0 { m.sigma() } else { m.map(|a| a.sigma_inv()) };
        }
        m
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(a: i64) -> BigRational {
        BigRational::from_integer(a.into())
    }

    fn m(rows: &[&[i64]]) -> Matrix<BigRational> {
        Matrix::from_rows(rows.iter().map(|r| r.iter().map(|&x| q(x)).collect()).collect()).unwrap()
    }

    #[test]
    fn char_poly_small() {
        assert_eq!(m(&[&[2, 0], &[0, 3]]).char_poly().unwrap(), vec![q(1), q(-5), q(6)]);
        assert_eq!(m(&[&[0, 1], &[7, 0]]).char_poly().unwrap(), vec![q(1), q(0), q(-7)]);
    }

    #[test]
    fn det_and_inverse() {
        let a = m(&[&[2, 1, 0], &[1, 3, 1], &[0, 1, 4]]);
        assert_eq!(a.det().unwrap(), q(18));
        let i = a.inverse().unwrap();
        assert_eq!(a.mul(&i).unwrap(), Matrix::identity_like(3, &q(0)));
        let adj = a.adjugate().unwrap();
        assert_eq!(a.mul(&adj).unwrap(), Matrix::identity_like(3, &q(0)).scale(&q(18)).unwrap());
    }

    #[test]
    fn singular_inverse_fails() {
        assert!(matches!(m(&[&[1, 2], &[2, 4]]).inverse(), Err(Error::SingularInput(_))));
    }

    #[test]
    fn padic_inverse_of_dieudonne_frobenius() {
        let p = 5;
        let e = |x: i64| PadicNumber::from_i64(p, x, 10);
        let f = Matrix::from_rows(vec![vec![e(1), e(1)], vec![e(0), e(5)]]).unwrap();
        let b = f.inverse().unwrap().scale(&e(5)).unwrap();
        let want = Matrix::from_rows(vec![vec![e(5), e(-1)], vec![e(0), e(1)]]).unwrap();
        assert!(b.agrees_with(&want).unwrap());
    }
}
