//! Smith normal form over a discrete valuation ring and lattice operations.

use crate::error::{Error, Result};
use crate::matrix::{Matrix, RingElem};
use crate::padic::{max_precision, PadicNumber};
use crate::series::LaurentSeries;

/// Elements of a DVR with uniformizer `p` (or of its fraction field).
pub trait Dvr: RingElem {
    /// `None` when the element vanishes at working precision.
    fn dvr_valuation(&self) -> Result<Option<i64>>;
    /// `self / d` for `d` of valuation at most that of `self`.
    fn quotient(&self, d: &Self) -> Result<Self>;
    fn uniformizer_power(&self, k: i64) -> Self;
}

impl Dvr for PadicNumber {
    fn dvr_valuation(&self) -> Result<Option<i64>> {
        Ok(self.valuation())
    }
    fn quotient(&self, d: &Self) -> Result<Self> {
        self.checked_div(d)
    }
    fn uniformizer_power(&self, k: i64) -> Self {
        PadicNumber::p_power(self.p(), k, max_precision(self.p()))
    }
}

impl Dvr for LaurentSeries {
    fn dvr_valuation(&self) -> Result<Option<i64>> {
        if self.is_zero_at_precision() {
            return Ok(None);
        }
        self.gauss_valuation().map_err(|_| Error::PrecisionExhausted("Gauss valuation not determined".into()))
    }
    fn quotient(&self, d: &Self) -> Result<Self> {
        if self.is_exact_zero() {
            return Ok(self.clone());
        }
        self.mul(&d.invert_auto()?)
    }
    fn uniformizer_power(&self, k: i64) -> Self {
        LaurentSeries::constant(PadicNumber::p_power(self.p(), k, max_precision(self.p()))).with_max_width(self.max_width())
    }
}

/// `A = U D W` with `U`, `W` invertible over the valuation ring and `D`
/// diagonal with entries `p^{d_1}, p^{d_2}, ...` in increasing order. The
/// block after `rank` vanishes at working precision. `u_inv` and `w_inv`
/// are the inverses of `u` and `w`.
#[derive(Clone, Debug)]
pub struct Smith<T> {
    pub u: Matrix<T>,
    pub d: Matrix<T>,
    pub w: Matrix<T>,
    pub u_inv: Matrix<T>,
    pub w_inv: Matrix<T>,
    pub exponents: Vec<i64>,
    pub rank: usize,
}

fn row_axpy<T: RingElem>(m: &mut Matrix<T>, dst: usize, src: usize, f: &T) -> Result<()> {
    for j in 0..m.cols() {
        let v = m.get(dst, j).sub_r(&f.mul_r(m.get(src, j))?)?;
        m.set(dst, j, v);
    }
    Ok(())
}

fn col_axpy<T: RingElem>(m: &mut Matrix<T>, dst: usize, src: usize, f: &T) -> Result<()> {
    for i in 0..m.rows() {
        let v = m.get(i, dst).sub_r(&m.get(i, src).mul_r(f)?)?;
        m.set(i, dst, v);
    }
    Ok(())
}

fn scale_row<T: RingElem>(m: &mut Matrix<T>, r: usize, f: &T) -> Result<()> {
    for j in 0..m.cols() {
        m.set(r, j, m.get(r, j).mul_r(f)?);
    }
    Ok(())
}

fn scale_col<T: RingElem>(m: &mut Matrix<T>, c: usize, f: &T) -> Result<()> {
    for i in 0..m.rows() {
        m.set(i, c, m.get(i, c).mul_r(f)?);
    }
    Ok(())
}

/// Smith normal form; pivots have minimal valuation, ties broken by the
/// lexicographically smallest (row, column).
pub fn smith<T: Dvr>(a: &Matrix<T>) -> Result<Smith<T>> {
    let (m, n) = (a.rows(), a.cols());
    let sample = a.entries().first().ok_or_else(|| Error::DimensionMismatch("empty matrix".into()))?.clone();
    let mut d = a.clone();
    // l * a * r = d, with l_inv and r_inv tracked alongside.
    let mut l = Matrix::identity_like(m, &sample);
    let mut l_inv = l.clone();
    let mut r = Matrix::identity_like(n, &sample);
    let mut r_inv = r.clone();
    let mut exponents = vec![];
    let mut k = 0;
    while k < m.min(n) {
        let mut best: Option<(i64, usize, usize)> = None;
        for i in k..m {
            for j in k..n {
                if let Some(v) = d.get(i, j).dvr_valuation()? {
                    if best.is_none_or(|b| v < b.0) {
                        best = Some((v, i, j));
                    }
                }
            }
        }
        let Some((v, pi, pj)) = best else { break };
        d.swap_rows(k, pi);
        l.swap_rows(k, pi);
        l_inv.swap_cols(k, pi);
        d.swap_cols(k, pj);
        r.swap_cols(k, pj);
        r_inv.swap_rows(k, pj);
        // Normalize the pivot to p^v.
        let pv = sample.uniformizer_power(v);
        let unit = d.get(k, k).quotient(&pv)?;
        let unit_inv = pv.quotient(d.get(k, k))?;
        scale_row(&mut d, k, &unit_inv)?;
        scale_row(&mut l, k, &unit_inv)?;
        scale_col(&mut l_inv, k, &unit)?;
        d.set(k, k, pv.clone());
        for i in k + 1..m {
            if d.get(i, k).is_exact_zero_r() {
                continue;
            }
            let f = d.get(i, k).quotient(&pv)?;
            row_axpy(&mut d, i, k, &f)?;
            row_axpy(&mut l, i, k, &f)?;
            // l_inv <- l_inv * E^{-1}: column k gains f * column i.
            col_axpy(&mut l_inv, k, i, &f.neg_r())?;
            d.set(i, k, sample.zero_like());
        }
        for j in k + 1..n {
            if d.get(k, j).is_exact_zero_r() {
                continue;
            }
            let f = d.get(k, j).quotient(&pv)?;
            col_axpy(&mut d, j, k, &f)?;
            col_axpy(&mut r, j, k, &f)?;
            row_axpy(&mut r_inv, k, j, &f.neg_r())?;
            d.set(k, j, sample.zero_like());
        }
        exponents.push(v);
        k += 1;
    }
    Ok(Smith { u: l_inv, d, w: r_inv, u_inv: l, w_inv: r, exponents, rank: k })
}

/// Columns spanning a lattice over the valuation ring inside its fraction-field span.
#[derive(Clone, Debug, PartialEq)]
pub struct LatticeBasis<T> {
    pub vectors: Matrix<T>,
}

impl<T: Dvr> LatticeBasis<T> {
    pub fn new(vectors: Matrix<T>) -> Self {
        LatticeBasis { vectors }
    }

    pub fn rank(&self) -> usize {
        self.vectors.cols()
    }
}

pub fn lattice_smith<T: Dvr>(a: &Matrix<T>) -> Result<Smith<T>> {
    smith(a)
}

/// Kernel of `[A | -B]` gives the pairs `(x, y)` with `A x = B y`; the
/// intersection is spanned by `A x` over that kernel.
pub fn lattice_intersect<T: Dvr>(l1: &LatticeBasis<T>, l2: &LatticeBasis<T>) -> Result<LatticeBasis<T>> {
    let (a, b) = (&l1.vectors, &l2.vectors);
    if a.rows() != b.rows() {
        return Err(Error::DimensionMismatch("lattices in different ambient spaces".into()));
    }
    let (n, m1, m2) = (a.rows(), a.cols(), b.cols());
    let stacked = Matrix::from_fn(n, m1 + m2, |i, j| if j < m1 { a.get(i, j).clone() } else { b.get(i, j - m1).neg_r() });
    let s = smith(&stacked)?;
    let kdim = m1 + m2 - s.rank;
    let ka = Matrix::from_fn(m1, kdim, |i, j| s.w_inv.get(i, s.rank + j).clone());
    if kdim == 0 {
        return Ok(LatticeBasis { vectors: Matrix::from_fn(n, 0, |_, _| unreachable!()) });
    }
    Ok(LatticeBasis { vectors: a.mul(&ka)? })
}

/// Whether `v` lies in the lattice, i.e. `A x = v` has an integral solution.
pub fn lattice_contains<T: Dvr>(l: &LatticeBasis<T>, v: &[T]) -> Result<bool> {
    let a = &l.vectors;
    if v.len() != a.rows() {
        return Err(Error::DimensionMismatch("vector length differs from ambient rank".into()));
    }
    if a.cols() == 0 {
        for x in v {
            if x.dvr_valuation()?.is_some() {
                return Ok(false);
            }
        }
        return Ok(true);
    }
    let s = smith(a)?;
    let col = Matrix::from_fn(v.len(), 1, |i, _| v[i].clone());
    let y = s.u_inv.mul(&col)?;
    for i in 0..y.rows() {
        let val = y.get(i, 0).dvr_valuation()?;
        match (i < s.rank, val) {
            (_, None) => {}
            (true, Some(x)) if x >= s.exponents[i] => {}
            _ => return Ok(false),
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(x: i64) -> PadicNumber {
        PadicNumber::from_i64(3, x, 10)
    }

    fn pm(rows: &[&[i64]]) -> Matrix<PadicNumber> {
        Matrix::from_rows(rows.iter().map(|r| r.iter().map(|&x| c(x)).collect()).collect()).unwrap()
    }

    fn check_roundtrip<T: Dvr>(a: &Matrix<T>, s: &Smith<T>) {
        let back = s.u.mul(&s.d).unwrap().mul(&s.w).unwrap();
        assert!(back.agrees_with(a).unwrap());
        let n = a.rows();
        assert!(s.u.mul(&s.u_inv).unwrap().agrees_with(&Matrix::identity_like(n, a.get(0, 0))).unwrap());
    }

    #[test]
    fn sorted_diagonal() {
        let a = pm(&[&[3, 0], &[0, 1]]);
        let s = lattice_smith(&a).unwrap();
        assert_eq!(s.exponents, vec![0, 1]);
        check_roundtrip(&a, &s);
    }

    #[test]
    fn series_unit_absorbed() {
        let p = 3;
        let one = LaurentSeries::one(p);
        let u = LaurentSeries::monomial(c(1), 1);
        let a = Matrix::from_rows(vec![vec![one, u], vec![LaurentSeries::zero(p), LaurentSeries::constant(c(3))]]).unwrap();
        let s = lattice_smith(&a).unwrap();
        assert_eq!(s.exponents, vec![0, 1]);
        check_roundtrip(&a, &s);
    }

    #[test]
    fn intersections() {
        let l1 = LatticeBasis::new(pm(&[&[1, 0], &[0, 1]]));
        let l2 = LatticeBasis::new(pm(&[&[3, 0], &[0, 1]]));
        let i = lattice_intersect(&l1, &l2).unwrap();
        assert_eq!(i.rank(), 2);
        for v in [[c(3), c(0)], [c(0), c(1)]] {
            assert!(lattice_contains(&i, &v).unwrap());
        }
        assert!(!lattice_contains(&i, &[c(1), c(0)]).unwrap());

        let l1 = LatticeBasis::new(pm(&[&[1], &[0]]));
        let l2 = LatticeBasis::new(pm(&[&[1, 0], &[3, 3]]));
        let i = lattice_intersect(&l1, &l2).unwrap();
        assert_eq!(i.rank(), 1);
        assert!(lattice_contains(&i, &[c(1), c(0)]).unwrap());
        assert!(!lattice_contains(&i, &[c(0), c(1)]).unwrap());
    }
}
