use super::laurent::LaurentSeries;
use crate::error::Result;
use crate::padic::PadicNumber;

/// A differential `g du`.
#[derive(Clone, Debug, PartialEq)]
pub struct OneForm {
    pub coefficient: LaurentSeries,
}

impl OneForm {
    pub fn new(coefficient: LaurentSeries) -> Self {
        OneForm { coefficient }
    }

    /// `d(a) = a' du`.
    pub fn d(a: &LaurentSeries) -> Self {
        OneForm { coefficient: a.derivative() }
    }

    /// `d_sigma(g du) = sigma(g) q u^{q-1} du`.
    pub fn d_sigma(&self, q: u64) -> Result<Self> {
        let g = self.coefficient.frobenius(q)?;
        let factor = PadicNumber::from_i64(g.p(), q as i64, crate::padic::max_precision(g.p()));
        Ok(OneForm { coefficient: g.scale(&factor).shift(q as i64 - 1) })
    }

    pub fn agrees_with(&self, o: &OneForm) -> Result<bool> {
        self.coefficient.agrees_with(&o.coefficient)
    }
}
