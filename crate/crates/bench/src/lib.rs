//! Shared fixtures for the benchmarks.

use sigma_nabla_core::lfunction::CharPolyTable;
use sigma_nabla_core::{IntPolynomial, LaurentSeries, Matrix, PadicNumber, RingLabel, SeriesMatrix, SigmaNablaModule};

pub const PREC: u32 = 12;

pub fn c(p: u64, x: i64) -> PadicNumber {
    PadicNumber::from_i64(p, x, PREC)
}

/// Dense Laurent polynomial on `[lo, hi]` with deterministic small coefficients.
pub fn dense_series(p: u64, lo: i64, hi: i64) -> LaurentSeries {
    let coeffs = (lo..=hi).map(|e| c(p, (e * 7 + 3).rem_euclid(23) - 11)).collect();
    LaurentSeries::from_coeffs(p, lo, coeffs)
}

/// `1 + p (u^{-1} + ... )` style unit of E.
pub fn unit_series(p: u64, spread: i64) -> LaurentSeries {
    let mut terms: Vec<(i64, PadicNumber)> = (-spread..=spread).filter(|&e| e != 0).map(|e| (e, c(p, p as i64 * (e % 5 + 1)))).collect();
    terms.push((0, c(p, 1)));
    LaurentSeries::from_terms(p, &terms)
}

/// Lower times upper unipotent matrix with polynomial entries, times a constant.
pub fn factorable_matrix(p: u64, n: usize) -> SeriesMatrix {
    let z = LaurentSeries::zero(p);
    let one = LaurentSeries::one(p);
    let l = Matrix::from_fn(n, n, |i, j| match i.cmp(&j) {
        std::cmp::Ordering::Greater => dense_series(p, -3, -1),
        std::cmp::Ordering::Equal => one.clone(),
        _ => z.clone(),
    });
    let u = Matrix::from_fn(n, n, |i, j| match i.cmp(&j) {
        std::cmp::Ordering::Less => dense_series(p, 0, 3),
        std::cmp::Ordering::Equal => one.clone(),
        _ => z.clone(),
    });
    let k = Matrix::from_fn(n, n, |i, j| if i == j { c(p, 1).shift_val(i as i64 - 1) } else { c(p, (i + 2 * j) as i64) });
    l.mul(&u).unwrap().mul(&SeriesMatrix::from_scalars(&k)).unwrap()
}

/// `N = -d(H) H^{-1}` for `H = I + u A`.
pub fn regular_connection(p: u64, n: usize) -> SeriesMatrix {
    let a = Matrix::from_fn(n, n, |i, j| c(p, (i as i64 - 2 * j as i64) % 4));
    let h = SeriesMatrix::identity_series(n, p).add(&SeriesMatrix::from_scalars(&a).shift(1)).unwrap();
    h.derivative().mul(&h.inverse_series().unwrap()).unwrap().neg()
}

pub fn conjugated_module(p: u64, n: usize) -> (SigmaNablaModule, SeriesMatrix) {
    let entries: Vec<(PadicNumber, i64)> = (0..n).map(|i| (c(p, i as i64 + 1), i as i64 - 1)).collect();
    let m = SigmaNablaModule::diagonal(p, p, PREC, &entries, RingLabel::Gamma).unwrap();
    let y = Matrix::from_fn(n, n, |i, j| if i == j { LaurentSeries::one(p) } else if i < j { dense_series(p, -1, 1) } else { LaurentSeries::zero(p) });
    (m, y)
}

/// Trivial rank-one system with `count` rational points and `count` points of degree 2.
pub fn point_table(q: u64, count: usize) -> CharPolyTable {
    let mut points = vec![];
    let mut polys = std::collections::BTreeMap::new();
    for k in 0..count {
        for d in 1..=2u32 {
            let id = format!("x{d}_{k}");
            points.push((id.clone(), d));
            polys.insert(("l".to_string(), id), IntPolynomial::one_minus(1.into(), d as usize));
        }
    }
    CharPolyTable::new(q, vec!["l".into()], points, polys).unwrap()
}
