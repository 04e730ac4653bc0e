//! Factorizations `X = Y Z` over the Cohen ring and over the Robba ring.

use super::lattice::smith;
use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::padic::{max_precision, PadicNumber};
use crate::series::{LaurentSeries, SeriesMatrix};

/// `X = Y Z` with `Y` invertible over Gamma and `Z` constant.
#[derive(Clone, Debug)]
pub struct GammaFactorization {
    pub y: SeriesMatrix,
    pub z: Matrix<PadicNumber>,
    /// Exponents `d_i` of the lattice `{w : X w integral} = V^{-1} diag(p^{-d}) Z_p^n`.
    pub exponents: Vec<i64>,
}

/// Factors an invertible matrix over E as (Gamma-invertible) times (constant).
///
/// The constant vectors `w` with `X w` integral form a `Z_p`-lattice whose
/// elementary divisors come from the Smith form of the stacked coefficient
/// matrices of `X`. A factorization exists exactly when the index of that
/// lattice matches the valuation of `det X`.
pub fn matfact_gamma(x: &SeriesMatrix) -> Result<GammaFactorization> {
    if !x.is_square() || x.rows() == 0 {
        return Err(Error::DimensionMismatch("matfact_gamma needs a square matrix".into()));
    }
    let n = x.rows();
    let p = x.p();
    let lo = x.entries().iter().filter(|a| !a.is_exact_zero()).map(|a| a.lo()).min();
    let hi = x.entries().iter().filter(|a| !a.is_exact_zero()).map(|a| a.hi()).max();
    let (Some(lo), Some(hi)) = (lo, hi) else {
        return Err(Error::SingularInput("zero matrix".into()));
    };
    let det = x.det()?;
    let det_val = match det.gauss_valuation() {
        Ok(Some(v)) => v,
        Ok(None) => return Err(Error::SingularInput("determinant is zero".into())),
        Err(_) if det.is_zero_at_precision() => {
            return Err(Error::SingularInput("determinant vanishes at working precision".into()))
        }
        Err(_) => return Err(Error::PrecisionExhausted("valuation of det X is not determined".into())),
    };
    let len = (hi - lo + 1) as usize;
    let zero = PadicNumber::zero(p);
    let c = Matrix::from_fn(n * len, n, |r, j| {
        let (k, i) = (lo + (r / n) as i64, r % n);
        x.get(i, j).coeff(k).unwrap_or(zero)
    });
    let s = smith(&c)?;
    if s.rank < n {
        return Err(Error::PrecisionExhausted(format!("coefficient matrix has rank {} < {n} at working precision", s.rank)));
    }
    let index: i64 = s.exponents.iter().sum();
    if index != det_val {
        return Err(Error::NotFactorable { det_valuation: det_val, lattice_index: index });
    }
    let prec = max_precision(p);
    let w = Matrix::from_fn(n, n, |i, j| s.w_inv.get(i, j).mul(&PadicNumber::p_power(p, -s.exponents[j], prec)));
    let z = Matrix::from_fn(n, n, |i, j| PadicNumber::p_power(p, s.exponents[i], prec).mul(s.w.get(i, j)));
    let y = x.mul(&SeriesMatrix::from_scalars(&w).with_max_width(x.get(0, 0).max_width()))?;
    Ok(GammaFactorization { y, z, exponents: s.exponents })
}

/// `X = Y Z` with `Y = D (I + A)` over the overconvergent field and
/// `Z = I + B` over the plus ring.
#[derive(Clone, Debug)]
pub struct RobbaFactorization {
    pub y: SeriesMatrix,
    pub z: SeriesMatrix,
    pub iterations: usize,
}

fn diag_monomials(d: &[(PadicNumber, i64)], p: u64, inverse: bool) -> Result<SeriesMatrix> {
    let n = d.len();
    let mut m = Matrix::zeros_like(n, n, &LaurentSeries::zero(p));
    for (i, (c, a)) in d.iter().enumerate() {
        let e = if inverse { LaurentSeries::monomial(c.inv()?, -a) } else { LaurentSeries::monomial(*c, *a) };
        m.set(i, i, e);
    }
    Ok(m)
}

/// Successive approximation for `I + M = (I + A)(I + B)` with `A` in
/// negative degrees and `B` in nonnegative degrees, where `X = D (I + M)`.
///
/// Requires the negative-degree part of `M` to be divisible by `p`; the
/// iteration then contracts. Inputs outside this regime report
/// `NotConverged(0)`.
pub fn matfact_robba(x: &SeriesMatrix, d: Option<&[(PadicNumber, i64)]>) -> Result<RobbaFactorization> {
    if !x.is_square() || x.rows() == 0 {
        return Err(Error::DimensionMismatch("matfact_robba needs a square matrix".into()));
    }
    let n = x.rows();
    let p = x.p();
    let maxw = x.get(0, 0).max_width();
    let ident = SeriesMatrix::identity_series(n, p).with_max_width(maxw);
    let (dm, dinv) = match d {
        Some(d) if d.len() != n => return Err(Error::DimensionMismatch("diagonal of the wrong length".into())),
        Some(d) => (diag_monomials(d, p, false)?, diag_monomials(d, p, true)?),
        None => (ident.clone(), ident.clone()),
    };
    let dm = dm.with_max_width(maxw);
    let m = dinv.with_max_width(maxw).mul(x)?.sub(&ident)?;
    let minus = m.map(|a| a.minus_part());
    if minus.entries().iter().any(|a| a.valuation_floor().is_some_and(|v| v < 1)) {
        return Err(Error::NotConverged(0));
    }
    let target = m.entries().iter().filter_map(|a| a.precision_floor()).min().unwrap_or(max_precision(p) as i64);
    let max_iter = 4 * target.max(1) as usize + 10;
    let mut a = minus;
    let mut b = m.map(|e| e.plus_part());
    for it in 1..=max_iter {
        let r = m.sub(&a.mul(&b)?)?;
        let a2 = r.map(|e| e.minus_part().trim_below(target));
        let b2 = r.map(|e| e.plus_part());
        let done = a2.first_difference(&a)?.is_none() && b2.first_difference(&b)?.is_none();
        a = a2;
        b = b2;
        if done {
            let y = dm.mul(&ident.add(&a)?)?;
            let z = ident.add(&b)?;
            return Ok(RobbaFactorization { y, z, iterations: it });
        }
    }
    Err(Error::NotConverged(max_iter))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::{membership, RingLabel};

    fn c(p: u64, x: i64) -> PadicNumber {
        PadicNumber::from_i64(p, x, 12)
    }

    fn s(p: u64, terms: &[(i64, i64)]) -> LaurentSeries {
        let t: Vec<(i64, PadicNumber)> = terms.iter().map(|&(e, x)| (e, c(p, x))).collect();
        LaurentSeries::from_terms(p, &t)
    }

    #[test]
    fn gamma_one_by_one() {
        let p = 3;
        let x = Matrix::from_rows(vec![vec![LaurentSeries::monomial(PadicNumber::p_power(p, -1, 12), 1)]]).unwrap();
        let f = matfact_gamma(&x).unwrap();
        assert!(f.y.get(0, 0).agrees_with(&s(p, &[(1, 1)])).unwrap());
        assert!(f.z.get(0, 0).agrees_with(&PadicNumber::p_power(p, -1, 12)));
    }

    #[test]
    fn gamma_diagonal() {
        let p = 5;
        let z = LaurentSeries::zero(p);
        let x = Matrix::from_rows(vec![
            vec![LaurentSeries::monomial(PadicNumber::p_power(p, -1, 12), 1), z.clone()],
            vec![z, s(p, &[(0, 1)])],
        ])
        .unwrap();
        let f = matfact_gamma(&x).unwrap();
        let back = f.y.mul(&SeriesMatrix::from_scalars(&f.z)).unwrap();
        assert!(back.agrees_with(&x).unwrap());
        assert_eq!(f.y.det().unwrap().gauss_valuation().unwrap(), Some(0));
        assert!(f.y.get(0, 0).agrees_with(&s(p, &[(1, 1)])).unwrap());
        assert!(f.z.get(0, 0).agrees_with(&PadicNumber::p_power(p, -1, 12)));
    }

    #[test]
    fn gamma_counterexample_is_reported() {
        let p = 3;
        let x = Matrix::from_rows(vec![vec![s(p, &[(0, 1)]), s(p, &[(1, 1)])], vec![LaurentSeries::zero(p), s(p, &[(0, 3)])]])
            .unwrap();
        assert!(matches!(matfact_gamma(&x), Err(Error::NotFactorable { det_valuation: 1, lattice_index: 0 })));
    }

    #[test]
    fn robba_identity() {
        let p = 3;
        let x = SeriesMatrix::identity_series(2, p);
        let f = matfact_robba(&x, None).unwrap();
        assert!(f.y.agrees_with(&x).unwrap());
        assert!(f.z.agrees_with(&x).unwrap());
    }

    #[test]
    fn robba_minus_only() {
        let p = 3;
        let one = s(p, &[(0, 1)]);
        let x = Matrix::from_rows(vec![vec![one.clone(), s(p, &[(-1, 3)])], vec![LaurentSeries::zero(p), one]]).unwrap();
        let f = matfact_robba(&x, None).unwrap();
        assert!(f.y.agrees_with(&x).unwrap());
        assert!(f.z.agrees_with(&SeriesMatrix::identity_series(2, p)).unwrap());
    }

    #[test]
    fn robba_product() {
        let p = 3;
        let one = s(p, &[(0, 1)]);
        let z = LaurentSeries::zero(p);
        let lower = Matrix::from_rows(vec![vec![one.clone(), z.clone()], vec![s(p, &[(-1, 3)]), one.clone()]]).unwrap();
        let upper = Matrix::from_rows(vec![vec![one.clone(), s(p, &[(1, 1)])], vec![z, one]]).unwrap();
        let x = lower.mul(&upper).unwrap();
        let f = matfact_robba(&x, None).unwrap();
        assert!(f.y.mul(&f.z).unwrap().agrees_with(&x).unwrap());
        for e in f.y.entries() {
            assert!(membership(e, &RingLabel::e_dagger()).is_consistent());
        }
        for e in f.z.entries() {
            assert!(membership(e, &RingLabel::RPlus).is_consistent());
        }
        assert!(f.y.agrees_with(&lower).unwrap());
    }

    #[test]
    fn robba_outside_regime() {
        let p = 3;
        let x = Matrix::from_rows(vec![vec![s(p, &[(0, 1), (-1, 1)])]]).unwrap();
        assert!(matches!(matfact_robba(&x, None), Err(Error::NotConverged(0))));
    }
}
