//! Generators and independent oracles shared by the integration tests.
#![allow(dead_code)]

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use sigma_nabla_core::lfunction::CharPolyTable;
use sigma_nabla_core::matrix::Matrix;
use sigma_nabla_core::module::SigmaNablaModule;
use sigma_nabla_core::padic::{IntPolynomial, PadicNumber};
use sigma_nabla_core::series::{LaurentSeries, RingLabel, SeriesMatrix};

pub const PREC: u32 = 12;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn c(p: u64, x: i64) -> PadicNumber {
    PadicNumber::from_i64(p, x, PREC)
}

pub fn series(p: u64, terms: &[(i64, i64)]) -> LaurentSeries {
    let t: Vec<(i64, PadicNumber)> = terms.iter().map(|&(e, x)| (e, c(p, x))).collect();
    LaurentSeries::from_terms(p, &t)
}

pub fn one(p: u64) -> LaurentSeries {
    series(p, &[(0, 1)])
}

/// Random Laurent polynomial with integer coefficients in `[-b, b]`, each
/// multiplied by `p^min_val`.
pub fn random_poly(r: &mut ChaCha8Rng, p: u64, lo: i64, hi: i64, b: i64, min_val: i64) -> LaurentSeries {
    let mut terms = vec![];
    for e in lo..=hi {
        if r.gen_bool(0.6) {
            terms.push((e, c(p, r.gen_range(-b..=b)).shift_val(min_val)));
        }
    }
    LaurentSeries::from_terms(p, &terms)
}

fn unit(r: &mut ChaCha8Rng, p: u64) -> i64 {
    loop {
        let x = r.gen_range(-20i64..=20);
        if x % p as i64 != 0 {
            return x;
        }
    }
}

/// Strictly triangular plus identity, entries drawn by `entry`.
pub fn unipotent(n: usize, p: u64, lower: bool, mut entry: impl FnMut() -> LaurentSeries) -> SeriesMatrix {
    let mut m = SeriesMatrix::identity_series(n, p);
    for i in 0..n {
        for j in 0..n {
            if (lower && i > j) || (!lower && i < j) {
                m.set(i, j, entry());
            }
        }
    }
    m
}

pub fn diag(entries: Vec<LaurentSeries>) -> SeriesMatrix {
    let n = entries.len();
    let p = entries[0].p();
    let mut m = Matrix::zeros_like(n, n, &LaurentSeries::zero(p));
    for (i, e) in entries.into_iter().enumerate() {
        m.set(i, i, e);
    }
    m
}

pub fn permutation(r: &mut ChaCha8Rng, n: usize, p: u64) -> SeriesMatrix {
    let mut idx: Vec<usize> = (0..n).collect();
    idx.shuffle(r);
    let mut m = Matrix::zeros_like(n, n, &LaurentSeries::zero(p));
    for (i, &j) in idx.iter().enumerate() {
        m.set(i, j, one(p));
    }
    m
}

/// `P L U D` with unipotent `L`, `U` over the integral Laurent polynomials
/// and `D` a diagonal of unit monomials; invertible over Gamma.
pub fn gl_gamma(r: &mut ChaCha8Rng, p: u64, n: usize, spread: i64) -> SeriesMatrix {
    let l = unipotent(n, p, true, || random_poly(r, p, -spread, spread, 9, 0));
    let u = unipotent(n, p, false, || random_poly(r, p, -spread, spread, 9, 0));
    let d = diag((0..n).map(|_| series(p, &[(r.gen_range(-3..=3), unit(r, p))])).collect());
    permutation(r, n, p).mul(&l).unwrap().mul(&u).unwrap().mul(&d).unwrap()
}

/// Constant matrix over `Q_p` with nonzero determinant.
pub fn constant_invertible(r: &mut ChaCha8Rng, p: u64, n: usize) -> Matrix<PadicNumber> {
    loop {
        let m = Matrix::from_fn(n, n, |_, _| {
            if r.gen_bool(0.3) {
                PadicNumber::zero(p)
            } else {
                c(p, r.gen_range(-9i64..=9)).shift_val(r.gen_range(-2..=2))
            }
        });
        if m.det().unwrap().valuation().is_some() {
            return m;
        }
    }
}

/// Module with constant diagonal Frobenius and zero connection in the basis
/// given by the columns of `g`, i.e. `G^{-1} diag(lambda) G^sigma`, `G^{-1} dG`.
pub fn conjugated_constant(p: u64, q: u64, lambdas: &[i64], g: &SeriesMatrix, ginv: &SeriesMatrix, ring: RingLabel) -> SigmaNablaModule {
    let entries: Vec<(PadicNumber, i64)> = lambdas.iter().map(|&l| (c(p, l), 0)).collect();
    let base = SigmaNablaModule::diagonal(p, q, PREC, &entries, ring).unwrap();
    base.change_basis_with_inverse(g, ginv).unwrap()
}

/// Unipotent upper-triangular polynomial matrix and its inverse.
pub fn polynomial_unipotent(r: &mut ChaCha8Rng, p: u64, n: usize, deg: i64) -> (SeriesMatrix, SeriesMatrix) {
    let g = unipotent(n, p, false, || random_poly(r, p, 0, deg, 5, 0));
    let ginv = g.inverse_series().unwrap();
    (g, ginv)
}

/// The `t`-expansion of `1/P` for `P` with constant term 1.
pub fn inverse_series_int(p: &IntPolynomial, t: usize) -> Vec<BigInt> {
    let mut out = vec![BigInt::zero(); t + 1];
    out[0] = BigInt::one();
    for k in 1..=t {
        let mut s = BigInt::zero();
        for j in 1..=k {
            s -= p.coeff(j) * &out[k - j];
        }
        out[k] = s;
    }
    out
}

/// Power sums `s_m` of the reciprocal roots of `P`, from `-t P'/P`.
pub fn power_sums(p: &IntPolynomial, t: usize) -> Vec<BigInt> {
    let inv = inverse_series_int(p, t);
    let deriv: Vec<BigInt> = (0..=t).map(|k| p.coeff(k + 1) * BigInt::from(k as i64 + 1)).collect();
    let mut s = vec![BigInt::zero(); t + 1];
    for m in 1..=t {
        let mut acc = BigInt::zero();
        for j in 0..m {
            acc += &deriv[j] * &inv[m - 1 - j];
        }
        s[m] = -acc;
    }
    s
}

fn mobius(n: usize) -> i64 {
    let mut n = n;
    let mut res = 1;
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            n /= d;
            if n.is_multiple_of(d) {
                return 0;
            }
            res = -res;
        }
        d += 1;
    }
    if n > 1 {
        res = -res;
    }
    res
}

/// A rank-`r` constant system on a curve with `H^1` polynomial `h1`: every
/// closed point of degree `d` carries `(1 - t^d)^r`. Point counts come from
/// the Lefschetz formula `S_m = q^m - s_m`. Returns `None` when some count of
/// closed points is negative.
pub fn lefschetz_table(q: u64, h1: &IntPolynomial, r: u32, t: usize) -> Option<(CharPolyTable, [IntPolynomial; 3])> {
    let s = power_sums(h1, t);
    let counts: Vec<BigInt> = (0..=t).map(|m| BigInt::from(q).pow(m as u32) - &s[m]).collect();
    let mut points = vec![];
    let mut polys = BTreeMap::new();
    for d in 1..=t {
        let mut acc = BigInt::zero();
        for (e, ce) in counts.iter().enumerate().take(d + 1).skip(1) {
            if d % e == 0 {
                acc += BigInt::from(mobius(d / e)) * ce;
            }
        }
        assert!((&acc % BigInt::from(d as i64)).is_zero(), "closed point count not integral");
        let n: i64 = (acc / BigInt::from(d as i64)).try_into().ok()?;
        if n < 0 {
            return None;
        }
        let local = IntPolynomial::one_minus(BigInt::one(), d).pow(r);
        for k in 0..n {
            let id = format!("x{d}_{k}");
            points.push((id.clone(), d as u32));
            polys.insert(("l".to_string(), id), local.clone());
        }
    }
    let table = CharPolyTable::new(q, vec!["l".into()], points, polys).unwrap();
    let coh = [IntPolynomial::one(), h1.pow(r), IntPolynomial::one_minus(BigInt::from(q), 1).pow(r)];
    Some((table, coh))
}

/// Number of monic irreducible polynomials of each degree `1..=dmax` over
/// `F_q` (q prime), by exhaustive trial division.
pub fn irreducible_counts(q: u64, dmax: usize) -> Vec<usize> {
    fn rem(a: &[u64], b: &[u64], q: u64) -> Vec<u64> {
        // b monic, coefficients lowest degree first
        let mut a = a.to_vec();
        let db = b.len() - 1;
        while a.len() > db {
            let lead = *a.last().unwrap();
            let shift = a.len() - 1 - db;
            for (i, &bc) in b.iter().enumerate() {
                a[shift + i] = (a[shift + i] + q * q - lead * bc % q) % q;
            }
            a.pop();
        }
        a
    }
    fn monic(d: usize, idx: u64, q: u64) -> Vec<u64> {
        let mut v = vec![0; d + 1];
        let mut x = idx;
        for c in v.iter_mut().take(d) {
            *c = x % q;
            x /= q;
        }
        v[d] = 1;
        v
    }
    let mut irreducibles: Vec<Vec<Vec<u64>>> = vec![vec![]; dmax + 1];
    for d in 1..=dmax {
        for idx in 0..q.pow(d as u32) {
            let f = monic(d, idx, q);
            let reducible = (1..=d / 2).any(|e| irreducibles[e].iter().any(|g| rem(&f, g, q).iter().all(|&x| x == 0)));
            if !reducible {
                irreducibles[d].push(f);
            }
        }
    }
    irreducibles.iter().skip(1).map(|v| v.len()).collect()
}

pub fn qq(a: i64) -> BigRational {
    BigRational::from_integer(a.into())
}

pub fn random_qmat(r: &mut ChaCha8Rng, n: usize, b: i64) -> Matrix<BigRational> {
    Matrix::from_fn(n, n, |_, _| qq(r.gen_range(-b..=b)))
}

pub fn random_invertible_qmat(r: &mut ChaCha8Rng, n: usize, b: i64) -> Matrix<BigRational> {
    loop {
        let m = random_qmat(r, n, b);
        if !m.det().unwrap().is_zero() {
            return m;
        }
    }
}
