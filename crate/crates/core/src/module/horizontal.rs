//! Horizontal sections: solutions of `h' + N h = 0`.

use super::module::SigmaNablaModule;
use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::padic::PadicNumber;
use crate::series::{LaurentSeries, SeriesMatrix, DEFAULT_MAX_WIDTH};

/// Power-series solution matrix with `H(0) = I`.
#[derive(Clone, Debug, PartialEq)]
pub struct HorizontalBasis {
    /// Columns are horizontal sections, known through `achieved_degree`.
    pub h: SeriesMatrix,
    pub achieved_degree: usize,
    /// Lowest absolute precision of the coefficients of `u^k`, per degree.
    pub precision: Vec<i64>,
    /// Lowest absolute precision of `H' + N H` through degree `achieved_degree - 1`.
    pub residual_floor: Option<i64>,
}

fn coeff_matrices(n: &SeriesMatrix, upto: usize) -> Result<Vec<Matrix<PadicNumber>>> {
    let p = n.p();
    let r = n.rows();
    let mut out = vec![];
    for k in 0..upto {
        let mut m = Matrix::from_fn(r, r, |_, _| PadicNumber::zero(p));
        for i in 0..r {
            for j in 0..r {
                let c = n.get(i, j).coeff(k as i64).ok_or_else(|| {
                    Error::PrecisionExhausted(format!("connection matrix unknown in degree {k}"))
                })?;
                m.set(i, j, c);
            }
        }
        out.push(m);
    }
    Ok(out)
}

fn floor_of(m: &Matrix<PadicNumber>) -> i64 {
    m.entries().iter().filter_map(|c| c.abs_precision()).min().unwrap_or(i64::MAX)
}

fn assemble(p: u64, r: usize, hk: &[Matrix<PadicNumber>]) -> SeriesMatrix {
    let width = hk.len().max(DEFAULT_MAX_WIDTH);
    Matrix::from_fn(r, r, |i, j| {
        let coeffs = hk.iter().map(|m| *m.get(i, j)).collect();
        LaurentSeries::truncated(p, 0, coeffs, None).with_max_width(width)
    })
}

/// Solves `(k+1) h_{k+1} = -sum_j N_j h_{k-j}` from `h_0 = I` up to degree
/// `k_max`. When the division by `k+1` leaves no p-adic digits the partial
/// solution is returned inside `HorizontalExhausted`.
pub fn horizontal_basis(n: &SeriesMatrix, k_max: usize) -> Result<HorizontalBasis> {
    if !n.is_square() || n.rows() == 0 {
        return Err(Error::DimensionMismatch("connection matrix must be square".into()));
    }
    if n.entries().iter().any(|a| a.lo() < 0 && !a.minus_part().is_zero_at_precision()) {
        return Err(Error::InvalidInput("connection matrix has negative exponents".into()));
    }
    let p = n.p();
    let r = n.rows();
    let nk = coeff_matrices(n, k_max)?;
    let mut hk: Vec<Matrix<PadicNumber>> = vec![Matrix::identity_like(r, &PadicNumber::zero(p))];
    let mut precision = vec![floor_of(&hk[0])];
    for k in 0..k_max {
        let mut acc = Matrix::from_fn(r, r, |_, _| PadicNumber::zero(p));
        for j in 0..=k {
            acc = acc.add(&nk[j].mul(&hk[k - j])?)?;
        }
        let next = acc.map(|c| c.neg().div_int(k as i64 + 1));
        let fl = floor_of(&next);
        if fl <= 0 {
            let partial = finish(p, r, &hk, &nk, precision);
            return Err(Error::HorizontalExhausted { achieved_degree: k, partial: Box::new(partial) });
        }
        precision.push(fl);
        hk.push(next);
    }
    Ok(finish(p, r, &hk, &nk, precision))
}

fn finish(p: u64, r: usize, hk: &[Matrix<PadicNumber>], nk: &[Matrix<PadicNumber>], precision: Vec<i64>) -> HorizontalBasis {
    let deg = hk.len() - 1;
    // Residual (k+1) h_{k+1} + sum_j N_j h_{k-j} in degree k < deg.
    let mut floor: Option<i64> = None;
    for k in 0..deg {
        let mut acc = hk[k + 1].map(|c| c.mul_int(k as i64 + 1));
        for j in 0..=k {
            acc = acc.add(&nk[j].mul(&hk[k - j]).expect("square")).expect("square");
        }
        for c in acc.entries() {
            if let Some(a) = c.abs_precision() {
                floor = Some(floor.map_or(a, |f: i64| f.min(a)));
            }
            if c.valuation().is_some() {
                floor = Some(i64::MIN);
            }
        }
    }
    HorizontalBasis { h: assemble(p, r, hk), achieved_degree: deg, precision, residual_floor: floor }
}

/// Requires the compatibility identity before solving.
pub fn horizontal_basis_module(m: &SigmaNablaModule, k_max: usize) -> Result<HorizontalBasis> {
    if let super::module::CompatVerdict::Fails { row, col, valuation, .. } = m.check_compat()? {
        return Err(Error::InvalidInput(format!(
            "module is not compatible: entry ({row},{col}) differs at valuation {valuation}"
        )));
    }
    horizontal_basis(&m.n, k_max)
}

/// Echelon basis of the submodule spanned by the columns of `inclusion`
/// inside a module with horizontal basis and constant diagonal Frobenius.
///
/// Each column is normalised to have a 1 in its pivot row and zeros in the
/// other pivot rows; the pivots must be invertible. The result is checked
/// for horizontality, i.e. all entries are constants.
pub fn horizontal_sub_basis(inclusion: &SeriesMatrix, phi0: &Matrix<PadicNumber>) -> Result<SeriesMatrix> {
    let (n, l) = (inclusion.rows(), inclusion.cols());
    if phi0.rows() != n || phi0.cols() != n {
        return Err(Error::DimensionMismatch("Frobenius and inclusion sizes differ".into()));
    }
    for i in 0..n {
        for j in 0..n {
            if i != j && !phi0.get(i, j).is_zero_at_precision() {
                return Err(Error::InvalidInput("constant Frobenius must be diagonal".into()));
            }
        }
    }
    let mut m = inclusion.clone();
    let mut pivots: Vec<usize> = vec![];
    for j in 0..l {
        let mut chosen = None;
        for i in 0..n {
            if pivots.contains(&i) || m.get(i, j).is_zero_at_precision() {
                continue;
            }
            if let Ok(inv) = m.get(i, j).invert_auto() {
                chosen = Some((i, inv));
                break;
            }
        }
        let (pi, inv) = chosen.ok_or(Error::NonUnitPivot(j))?;
        for i in 0..n {
            let v = m.get(i, j).mul(&inv)?;
            m.set(i, j, v);
        }
        m.set(pi, j, LaurentSeries::one(inclusion.p()));
        for k in 0..l {
            if k == j || m.get(pi, k).is_exact_zero() {
                continue;
            }
            let f = m.get(pi, k).clone();
            for i in 0..n {
                let v = m.get(i, k).sub(&f.mul(m.get(i, j))?)?;
                m.set(i, k, v);
            }
        }
        pivots.push(pi);
    }
    for j in 0..l {
        for i in 0..n {
            let d = m.get(i, j).derivative();
            if let Some(v) = d.coeffs().iter().filter_map(|c| c.valuation()).min() {
                return Err(Error::NotHorizontal { column: j, valuation: v });
            }
        }
    }
    Ok(m)
}

/// Checks that `Phi0 sigma(v)` stays in the span of the echelon basis.
pub fn frobenius_stable(basis: &SeriesMatrix, phi0: &Matrix<PadicNumber>, q: u64) -> Result<()> {
    let image = SeriesMatrix::from_scalars(phi0).mul(&basis.frobenius(q)?)?;
    for j in 0..basis.cols() {
        let pivot = (0..basis.rows()).find(|&i| basis.get(i, j).agrees_with(&LaurentSeries::one(basis.p())).unwrap_or(false)
            && (0..basis.cols()).all(|k| k == j || basis.get(i, k).is_zero_at_precision()));
        let Some(pi) = pivot else { return Err(Error::NotFrobeniusStable { column: j }) };
        let lambda = image.get(pi, j).clone();
        for i in 0..basis.rows() {
            let want = basis.get(i, j).mul(&lambda)?;
            if !image.get(i, j).agrees_with(&want)? {
                return Err(Error::NotFrobeniusStable { column: j });
            }
        }
    }
    Ok(())
}
