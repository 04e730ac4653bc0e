use super::laurent::{LaurentSeries, Residual};
use super::ring::{membership, Membership, RingLabel};
use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::padic::PadicNumber;

pub type SeriesMatrix = Matrix<LaurentSeries>;

/// Position and summary of the first provably nonzero entry of a difference.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EntryResidual {
    pub row: usize,
    pub col: usize,
    pub residual: Residual,
}

impl Matrix<LaurentSeries> {
    pub fn from_scalars(m: &Matrix<PadicNumber>) -> Self {
        m.map(|c| LaurentSeries::constant(*c))
    }

    pub fn identity_series(n: usize, p: u64) -> Self {
        Matrix::identity_like(n, &LaurentSeries::zero(p))
    }

    pub fn p(&self) -> u64 {
        self.entries()[0].p()
    }

    pub fn with_max_width(&self, w: usize) -> Self {
        self.map(|a| a.clone().with_max_width(w))
    }

    pub fn frobenius(&self, q: u64) -> Result<Self> {
        self.try_map(|a| a.frobenius(q))
    }

    pub fn derivative(&self) -> Self {
        self.map(|a| a.derivative())
    }

    pub fn scale_scalar(&self, c: &PadicNumber) -> Self {
        self.map(|a| a.scale(c))
    }

    pub fn shift(&self, k: i64) -> Self {
        self.map(|a| a.shift(k))
    }

    /// Inverse via the adjugate and an inverse of the determinant.
    pub fn inverse_series(&self) -> Result<Self> {
        if !self.is_square() {
            return Err(Error::DimensionMismatch("inverse of a non-square matrix".into()));
        }
        let d = self.det()?;
        let dinv = d.invert_auto().map_err(|e| match e {
            Error::NotAUnit => Error::SingularInput("determinant vanishes at working precision".into()),
            e => e,
        })?;
        self.adjugate()?.scale(&dinv)
    }

    /// First entry where `self` and `o` provably differ.
    pub fn first_difference(&self, o: &Self) -> Result<Option<EntryResidual>> {
        let d = self.sub(o)?;
        for i in 0..d.rows() {
            for j in 0..d.cols() {
                let residual = Residual::of(d.get(i, j));
                if !residual.is_zero() {
                    return Ok(Some(EntryResidual { row: i, col: j, residual }));
                }
            }
        }
        Ok(None)
    }

    /// Lowest absolute precision among the entries of `self - o`.
    pub fn agreement_floor(&self, o: &Self) -> Result<Option<i64>> {
        let d = self.sub(o)?;
        Ok(d.entries().iter().filter_map(|a| a.precision_floor()).min())
    }

    /// First entry refuting membership in `label`.
    pub fn check_membership(&self, label: &RingLabel) -> Result<()> {
        for i in 0..self.rows() {
            for j in 0..self.cols() {
                if let Membership::Violated(e) = membership(self.get(i, j), label) {
                    return Err(Error::MembershipViolated { row: i, col: j, exponent: e, label: label.to_string() });
                }
            }
        }
        Ok(())
    }

    /// Entrywise restriction to a common window.
    pub fn restrict(&self, lo: i64, hi: i64) -> Self {
        self.map(|a| a.restrict(lo, hi))
    }

    pub fn cap_abs(&self, a: i64) -> Self {
        self.map(|x| x.cap_abs(a))
    }
}
