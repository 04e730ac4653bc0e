use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::padic::PadicNumber;
use crate::series::{LaurentSeries, RingLabel, SeriesMatrix};

/// Rank `n` module with Frobenius `Phi`, connection `N` and optional
/// Verschiebung `B`, all as matrices acting on columns.
#[derive(Clone, Debug, PartialEq)]
pub struct SigmaNablaModule {
    pub ring: RingLabel,
    pub q: u64,
    pub phi: SeriesMatrix,
    pub n: SeriesMatrix,
    pub b: Option<SeriesMatrix>,
}

/// Outcome of the compatibility check `N Phi + dPhi = q u^{q-1} Phi sigma(N)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CompatVerdict {
    /// Both sides agree; `floor` is the lowest absolute precision involved.
    Holds { floor: Option<i64> },
    Fails { row: usize, col: usize, exponent: i64, valuation: i64 },
}

impl CompatVerdict {
    pub fn holds(&self) -> bool {
        matches!(self, CompatVerdict::Holds { .. })
    }
}

fn q_factor(p: u64, q: u64) -> PadicNumber {
    PadicNumber::from_i64(p, q as i64, crate::padic::max_precision(p))
}

fn is_power_of(q: u64, p: u64) -> bool {
    let mut x = q;
    while x > 1 && x.is_multiple_of(p) {
        x /= p;
    }
    x == 1 && q > 1
}

impl SigmaNablaModule {
    pub fn new(ring: RingLabel, q: u64, phi: SeriesMatrix, n: SeriesMatrix, b: Option<SeriesMatrix>) -> Result<Self> {
        let r = phi.rows();
        if r == 0 || !phi.is_square() || n.rows() != r || n.cols() != r {
            return Err(Error::DimensionMismatch("Phi and N must be square of equal size".into()));
        }
        if let Some(b) = &b {
            if b.rows() != r || b.cols() != r {
                return Err(Error::DimensionMismatch("B must have the size of Phi".into()));
            }
        }
        let p = phi.p();
        if n.p() != p || b.as_ref().is_some_and(|b| b.p() != p) {
            return Err(Error::PrimeMismatch(p, n.p()));
        }
        if !is_power_of(q, p) {
            return Err(Error::InvalidInput(format!("q = {q} is not a power of p = {p}")));
        }
        Ok(SigmaNablaModule { ring, q, phi, n, b })
    }

    pub fn rank(&self) -> usize {
        self.phi.rows()
    }

    pub fn p(&self) -> u64 {
        self.phi.p()
    }

    pub fn with_max_width(&self, w: usize) -> Self {
        SigmaNablaModule {
            ring: self.ring,
            q: self.q,
            phi: self.phi.with_max_width(w),
            n: self.n.with_max_width(w),
            b: self.b.as_ref().map(|b| b.with_max_width(w)),
        }
    }

    /// `q u^{q-1} sigma(M)`, the matrix of the twisted differential applied to `M du`.
    fn d_sigma(&self, m: &SeriesMatrix) -> Result<SeriesMatrix> {
        Ok(m.frobenius(self.q)?.scale_scalar(&q_factor(self.p(), self.q)).shift(self.q as i64 - 1))
    }

    /// Both sides of the compatibility identity.
    pub fn compat_sides(&self) -> Result<(SeriesMatrix, SeriesMatrix)> {
        let lhs = self.n.mul(&self.phi)?.add(&self.phi.derivative())?;
        let rhs = self.phi.mul(&self.d_sigma(&self.n)?)?;
        Ok((lhs, rhs))
    }

    pub fn check_compat(&self) -> Result<CompatVerdict> {
        let (lhs, rhs) = self.compat_sides()?;
        verdict(&lhs, &rhs)
    }

    /// The Verschiebung side `dB + q u^{q-1} sigma(N) B = B N`.
    pub fn check_v_compat(&self) -> Result<CompatVerdict> {
        let b = self.b.as_ref().ok_or_else(|| Error::InvalidInput("module has no Verschiebung".into()))?;
        let lhs = b.derivative().add(&self.d_sigma(&self.n)?.mul(b)?)?;
        let rhs = b.mul(&self.n)?;
        verdict(&lhs, &rhs)
    }

    /// Checks `Phi B = B Phi = p I`.
    pub fn check_fv(&self) -> Result<CompatVerdict> {
        let b = self.b.as_ref().ok_or_else(|| Error::InvalidInput("module has no Verschiebung".into()))?;
        let p = self.p();
        let pi = SeriesMatrix::identity_series(self.rank(), p).scale_scalar(&PadicNumber::p_power(p, 1, crate::padic::max_precision(p)));
        let v1 = verdict(&self.phi.mul(b)?, &pi)?;
        if !v1.holds() {
            return Ok(v1);
        }
        let v2 = verdict(&b.mul(&self.phi)?, &pi)?;
        Ok(match (v1, v2) {
            (CompatVerdict::Holds { floor: a }, CompatVerdict::Holds { floor: b }) => {
                CompatVerdict::Holds { floor: a.into_iter().chain(b).min() }
            }
            (_, v) => v,
        })
    }

    /// Relabels the ring after checking every entry against `target`.
    pub fn base_change(&self, target: RingLabel) -> Result<Self> {
        self.phi.check_membership(&target)?;
        self.n.check_membership(&target)?;
        if let Some(b) = &self.b {
            b.check_membership(&target)?;
        }
        if !self.ring.is_subring_of(&target) {
            return Err(Error::InvalidInput(format!("{} is not contained in {}", self.ring, target)));
        }
        let mut m = self.clone();
        m.ring = target;
        Ok(m)
    }

    /// Adds `B = p Phi^{-1}`.
    pub fn recover_v(&self) -> Result<Self> {
        let p = self.p();
        let inv = self.phi.inverse_series().map_err(|e| match e {
            Error::SingularInput(_) | Error::NotAUnit | Error::DivisionByZero => Error::SingularFrobenius,
            e => e,
        })?;
        let mut m = self.clone();
        m.b = Some(inv.scale_scalar(&PadicNumber::p_power(p, 1, crate::padic::max_precision(p))));
        Ok(m)
    }

    /// Matrices in the basis given by the columns of `y`:
    /// `Y^{-1} Phi Y^sigma`, `Y^{-1} N Y + Y^{-1} dY`, `sigma(Y)^{-1} B Y`.
    pub fn change_basis(&self, y: &SeriesMatrix) -> Result<Self> {
        let yinv = y.inverse_series()?;
        self.change_basis_with_inverse(y, &yinv)
    }

    /// Same as [`change_basis`](Self::change_basis) with a known inverse.
    pub fn change_basis_with_inverse(&self, y: &SeriesMatrix, yinv: &SeriesMatrix) -> Result<Self> {
        let ys = y.frobenius(self.q)?;
        let phi = yinv.mul(&self.phi)?.mul(&ys)?;
        let n = yinv.mul(&self.n)?.mul(y)?.add(&yinv.mul(&y.derivative())?)?;
        let b = match &self.b {
            Some(b) => {
                let ysinv = yinv.frobenius(self.q)?;
                Some(ysinv.mul(b)?.mul(y)?)
            }
            None => None,
        };
        Ok(SigmaNablaModule { ring: self.ring, q: self.q, phi, n, b })
    }

    /// Checks all matrices against a ring label without relabeling.
    pub fn check_membership(&self, label: &RingLabel) -> Result<()> {
        self.phi.check_membership(label)?;
        self.n.check_membership(label)?;
        if let Some(b) = &self.b {
            b.check_membership(label)?;
        }
        Ok(())
    }

    /// Rank one module `Phi = [lambda u^a]`, `N = [a/(q-1) u^{-1}]`, and its
    /// diagonal sums.
    pub fn diagonal(p: u64, q: u64, prec: u32, entries: &[(PadicNumber, i64)], ring: RingLabel) -> Result<Self> {
        let r = entries.len();
        let zero = LaurentSeries::zero(p);
        let mut phi = Matrix::zeros_like(r, r, &zero);
        let mut n = Matrix::zeros_like(r, r, &zero);
        for (i, (lambda, a)) in entries.iter().enumerate() {
            phi.set(i, i, LaurentSeries::monomial(*lambda, *a));
            if *a != 0 {
                let c = PadicNumber::from_i64(p, *a, prec).div_int(q as i64 - 1);
                n.set(i, i, LaurentSeries::monomial(c, -1));
            }
        }
        Self::new(ring, q, phi, n, None)
    }
}

fn verdict(lhs: &SeriesMatrix, rhs: &SeriesMatrix) -> Result<CompatVerdict> {
    match lhs.first_difference(rhs)? {
        Some(e) => {
            let (exponent, valuation) = e.residual.first_nonzero.expect("nonzero residual");
            Ok(CompatVerdict::Fails { row: e.row, col: e.col, exponent, valuation })
        }
        None => Ok(CompatVerdict::Holds { floor: lhs.agreement_floor(rhs)? }),
    }
}
