use std::fmt;

use crate::error::{Error, Result};
use crate::matrix::RingElem;
use crate::padic::{max_precision, PadicNumber};

pub const DEFAULT_MAX_WIDTH: usize = 256;

/// Truncated bidirectional series `sum x_i u^i` over Q_p.
///
/// Coefficients are stored densely on the window `[lo, hi]`. Below the
/// window the series is either exactly zero (`tail == None`) or consists of
/// terms divisible by `p^tail`. Above the window it is exactly zero when
/// `exact_above` holds and unknown otherwise.
#[derive(Clone, Debug, PartialEq)]
pub struct LaurentSeries {
    p: u64,
    lo: i64,
    coeffs: Vec<PadicNumber>,
    exact_above: bool,
    tail: Option<i64>,
    max_width: usize,
}

impl LaurentSeries {
    fn raw(p: u64, lo: i64, coeffs: Vec<PadicNumber>, exact_above: bool, tail: Option<i64>, max_width: usize) -> Self {
        let mut s = LaurentSeries { p, lo, coeffs, exact_above, tail, max_width };
        s.normalize();
        s
    }

    fn normalize(&mut self) {
        if self.exact_above {
            while self.coeffs.last().is_some_and(|c| c.is_exact_zero()) {
                self.coeffs.pop();
            }
        }
        if self.tail.is_none() {
            let lead = self.coeffs.iter().take_while(|c| c.is_exact_zero()).count();
            if lead > 0 && (lead < self.coeffs.len() || self.exact_above) {
                self.coeffs.drain(..lead);
                self.lo += lead as i64;
            }
        }
        if self.coeffs.is_empty() && self.exact_above && self.tail.is_none() {
            self.lo = 0;
        }
    }

    pub fn zero(p: u64) -> Self {
        Self::raw(p, 0, vec![], true, None, DEFAULT_MAX_WIDTH)
    }

    pub fn constant(c: PadicNumber) -> Self {
        Self::raw(c.p(), 0, vec![c], true, None, DEFAULT_MAX_WIDTH)
    }

    pub fn one(p: u64) -> Self {
        Self::constant(PadicNumber::one(p, max_precision(p)))
    }

    pub fn monomial(c: PadicNumber, e: i64) -> Self {
        Self::raw(c.p(), e, vec![c], true, None, DEFAULT_MAX_WIDTH)
    }

    /// Exact Laurent polynomial with coefficients starting at exponent `lo`.
    pub fn from_coeffs(p: u64, lo: i64, coeffs: Vec<PadicNumber>) -> Self {
        Self::raw(p, lo, coeffs, true, None, DEFAULT_MAX_WIDTH)
    }

    /// Exact Laurent polynomial from `(exponent, coefficient)` terms.
    pub fn from_terms(p: u64, terms: &[(i64, PadicNumber)]) -> Self {
        if terms.is_empty() {
            return Self::zero(p);
        }
        let lo = terms.iter().map(|t| t.0).min().unwrap();
        let hi = terms.iter().map(|t| t.0).max().unwrap();
        let mut c = vec![PadicNumber::zero(p); (hi - lo + 1) as usize];
        for &(e, x) in terms {
            let k = (e - lo) as usize;
            c[k] = c[k] + x;
        }
        Self::from_coeffs(p, lo, c)
    }

    /// Series known on `[lo, lo + coeffs.len() - 1]` and unknown above.
    pub fn truncated(p: u64, lo: i64, coeffs: Vec<PadicNumber>, tail: Option<i64>) -> Self {
        Self::raw(p, lo, coeffs, false, tail, DEFAULT_MAX_WIDTH)
    }

    /// General constructor exposing every field of the representation.
    pub fn from_parts(
        p: u64,
        lo: i64,
        coeffs: Vec<PadicNumber>,
        exact_above: bool,
        tail: Option<i64>,
        max_width: usize,
    ) -> Result<Self> {
        if coeffs.iter().any(|c| c.p() != p) {
            return Err(Error::InvalidInput("coefficients over a different prime".into()));
        }
        Self::raw(p, lo, coeffs, exact_above, tail, max_width).fit()
    }

    pub fn with_max_width(mut self, w: usize) -> Self {
        self.max_width = w;
        self
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn max_width(&self) -> usize {
        self.max_width
    }

    pub fn lo(&self) -> i64 {
        self.lo
    }

    /// Highest stored exponent (`lo - 1` for an empty window).
    pub fn hi(&self) -> i64 {
        self.lo + self.coeffs.len() as i64 - 1
    }

    pub fn window(&self) -> (i64, i64) {
        (self.lo, self.hi())
    }

    pub fn width(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_exact_above(&self) -> bool {
        self.exact_above
    }

    pub fn tail(&self) -> Option<i64> {
        self.tail
    }

    /// Exact Laurent polynomial: no unknown part on either side.
    pub fn is_exact(&self) -> bool {
        self.exact_above && self.tail.is_none()
    }

    pub fn coeffs(&self) -> &[PadicNumber] {
        &self.coeffs
    }

    pub fn terms(&self) -> impl Iterator<Item = (i64, PadicNumber)> + '_ {
        self.coeffs.iter().enumerate().map(move |(k, c)| (self.lo + k as i64, *c))
    }

    /// Coefficient of `u^i`; `None` when it is not determined by the data.
    pub fn coeff(&self, i: i64) -> Option<PadicNumber> {
        if i < self.lo {
            Some(match self.tail {
                None => PadicNumber::zero(self.p),
                Some(t) => PadicNumber::zero_at(self.p, t),
            })
        } else if i > self.hi() {
            self.exact_above.then(|| PadicNumber::zero(self.p))
        } else {
            Some(self.coeffs[(i - self.lo) as usize])
        }
    }

    pub fn is_exact_zero(&self) -> bool {
        self.is_exact() && self.coeffs.is_empty()
    }

    /// True when no stored coefficient is provably nonzero.
    pub fn is_zero_at_precision(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero_at_precision())
    }

    /// Lower bound for all coefficient valuations, including the tail.
    /// Unknown coefficients above the window are assumed not to go below
    /// the visible bound. `None` means the series is exactly zero.
    pub fn valuation_floor(&self) -> Option<i64> {
        self.coeffs.iter().filter_map(|c| c.val_floor()).chain(self.tail).min()
    }

    /// Gauss valuation `min v_p(x_i)` when it is determined on the window.
    pub fn gauss_valuation(&self) -> Result<Option<i64>> {
        let m = self.coeffs.iter().filter_map(|c| c.valuation()).min();
        let Some(m) = m else {
            return if self.is_exact_zero() { Ok(None) } else { Err(Error::AmbiguousValuation(self.lo)) };
        };
        for (i, c) in self.terms() {
            if c.valuation().is_none() && c.val_floor().is_some_and(|a| a < m) {
                return Err(Error::AmbiguousValuation(i));
            }
        }
        if self.tail.is_some_and(|t| t < m) {
            return Err(Error::AmbiguousValuation(self.lo - 1));
        }
        Ok(Some(m))
    }

    /// Minimum absolute precision over the stored coefficients (`None` if all exact).
    pub fn precision_floor(&self) -> Option<i64> {
        self.coeffs.iter().filter_map(|c| c.abs_precision()).min()
    }

    fn check_p(&self, o: &Self) -> Result<()> {
        if self.p != o.p {
            return Err(Error::PrimeMismatch(self.p, o.p));
        }
        Ok(())
    }

    /// Enforces the width budget: truncated series lose their top, exact ones fail.
    fn fit(mut self) -> Result<Self> {
        if self.coeffs.len() > self.max_width {
            if self.exact_above {
                return Err(Error::WindowOverflow { width: self.coeffs.len(), max: self.max_width });
            }
            self.coeffs.truncate(self.max_width);
        }
        Ok(self)
    }

    fn combined_width(&self, o: &Self) -> usize {
        self.max_width.min(o.max_width)
    }

    pub fn add(&self, o: &Self) -> Result<Self> {
        self.check_p(o)?;
        if self.is_exact_zero() {
            return Ok(o.clone().with_max_width(self.combined_width(o)));
        }
        if o.is_exact_zero() {
            return Ok(self.clone().with_max_width(self.combined_width(o)));
        }
        let lo = self.lo.min(o.lo);
        let hi = match (self.exact_above, o.exact_above) {
            (true, true) => self.hi().max(o.hi()),
            (true, false) => o.hi(),
            (false, true) => self.hi(),
            (false, false) => self.hi().min(o.hi()),
        };
        let n = (hi - lo + 1).max(0) as usize;
        let mut c = Vec::with_capacity(n);
        for k in 0..n as i64 {
            let i = lo + k;
            let a = self.coeff(i).expect("inside known range");
            let b = o.coeff(i).expect("inside known range");
            c.push(a + b);
        }
        let tail = match (self.tail, o.tail) {
            (Some(a), Some(b)) => Some(a.min(b)),
            (a, b) => a.or(b),
        };
        Self::raw(self.p, lo, c, self.exact_above && o.exact_above, tail, self.combined_width(o)).fit()
    }

    pub fn neg(&self) -> Self {
        let mut s = self.clone();
        for c in s.coeffs.iter_mut() {
            *c = -*c;
        }
        s
    }

    pub fn sub(&self, o: &Self) -> Result<Self> {
        self.add(&o.neg())
    }

    pub fn mul(&self, o: &Self) -> Result<Self> {
        self.check_p(o)?;
        let maxw = self.combined_width(o);
        if self.is_exact_zero() || o.is_exact_zero() {
            return Ok(Self::zero(self.p).with_max_width(maxw));
        }
        let lo = self.lo + o.lo;
        let hi = match (self.exact_above, o.exact_above) {
            (true, true) => self.hi() + o.hi(),
            (true, false) => self.lo + o.hi(),
            (false, true) => o.lo + self.hi(),
            (false, false) => (self.lo + o.hi()).min(o.lo + self.hi()),
        };
        let exact = self.exact_above && o.exact_above;
        let mut n = (hi - lo + 1).max(0) as usize;
        if n > maxw {
            if exact {
                return Err(Error::WindowOverflow { width: n, max: maxw });
            }
            n = maxw;
        }
        let mut c = vec![PadicNumber::zero(self.p); n];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_exact_zero() {
                continue;
            }
            for (j, b) in o.coeffs.iter().enumerate() {
                let k = i + j;
                if k >= n {
                    break;
                }
                if !b.is_exact_zero() {
                    c[k] = c[k] + a.mul(b);
                }
            }
        }
        let cap = [
            self.tail.and_then(|t| o.valuation_floor().map(|v| t + v)),
            o.tail.and_then(|t| self.valuation_floor().map(|v| t + v)),
        ]
        .into_iter()
        .flatten()
        .min();
        if let Some(cap) = cap {
            for x in c.iter_mut() {
                *x = x.cap_abs(cap);
            }
        }
        let tail = if self.tail.is_some() || o.tail.is_some() { cap } else { None };
        Ok(Self::raw(self.p, lo, c, exact, tail, maxw))
    }

    pub fn scale(&self, k: &PadicNumber) -> Self {
        let mut s = self.clone();
        for c in s.coeffs.iter_mut() {
            *c = c.mul(k);
        }
        if let Some(t) = s.tail {
            s.tail = k.val_floor().map(|v| t + v);
        }
        s.normalize();
        s
    }

    pub fn mul_int(&self, k: i64) -> Self {
        if k == 0 {
            return Self::zero(self.p).with_max_width(self.max_width);
        }
        let mut s = self.clone();
        for c in s.coeffs.iter_mut() {
            *c = c.mul_int(k);
        }
        s
    }

    /// Multiplication by `u^k`.
    pub fn shift(&self, k: i64) -> Self {
        let mut s = self.clone();
        s.lo += k;
        s
    }

    /// Caps every coefficient (and the tail) at absolute precision `a`.
    pub fn cap_abs(&self, a: i64) -> Self {
        let mut s = self.clone();
        for c in s.coeffs.iter_mut() {
            *c = c.cap_abs(a);
        }
        s.tail = s.tail.map(|t| t.min(a));
        s
    }

    /// Restricts to `[lo, hi]`; dropped low terms go into the tail, dropped
    /// high terms make the series truncated.
    pub fn restrict(&self, lo: i64, hi: i64) -> Self {
        let mut s = self.clone();
        if lo > s.lo {
            let k = ((lo - s.lo) as usize).min(s.coeffs.len());
            let dropped = s.coeffs.drain(..k).filter_map(|c| c.val_floor()).min();
            s.tail = match (s.tail, dropped) {
                (Some(a), Some(b)) => Some(a.min(b)),
                (a, b) => a.or(b),
            };
            s.lo = lo;
        }
        if hi < s.hi() {
            let keep = (hi - s.lo + 1).max(0) as usize;
            s.coeffs.truncate(keep);
            s.exact_above = false;
        }
        s.normalize();
        s
    }

    /// Moves leading coefficients that vanish modulo `p^level` into the tail.
    pub fn trim_below(&self, level: i64) -> Self {
        let k = self.coeffs.iter().take_while(|c| c.val_floor().is_none_or(|f| f >= level)).count();
        if k == 0 || (k == self.coeffs.len() && self.tail.is_none() && self.coeffs.iter().all(|c| c.is_exact_zero())) {
            return self.clone();
        }
        self.restrict(self.lo + k as i64, self.hi().max(self.lo + k as i64 - 1))
    }

    /// Drops the part above `hi` (no effect below).
    pub fn truncate_above(&self, hi: i64) -> Self {
        self.restrict(self.lo, hi)
    }

    /// Part with exponents `< 0`.
    pub fn minus_part(&self) -> Self {
        if self.hi() < 0 {
            return self.clone();
        }
        let mut s = self.clone();
        let keep = (0 - s.lo).max(0) as usize;
        s.coeffs.truncate(keep);
        s.exact_above = true;
        s.normalize();
        s
    }

    /// Part with exponents `>= 0`.
    pub fn plus_part(&self) -> Self {
        let mut s = self.clone();
        if s.lo < 0 {
            let k = ((-s.lo) as usize).min(s.coeffs.len());
            s.coeffs.drain(..k);
            s.lo = 0;
            s.tail = None;
            if s.coeffs.is_empty() && !s.exact_above && self.hi() < -1 {
                // nothing is known in nonnegative degrees
                s.lo = 0;
            }
        } else if let Some(t) = s.tail {
            let mut c = vec![PadicNumber::zero_at(self.p, t); s.lo as usize];
            c.append(&mut s.coeffs);
            s.coeffs = c;
            s.lo = 0;
            s.tail = None;
        }
        s.normalize();
        s
    }

    /// Frobenius lift `u -> u^q` (coefficients in Q_p are fixed).
    pub fn frobenius(&self, q: u64) -> Result<Self> {
        let q = q as i64;
        let lo = self.lo * q;
        let n = if self.exact_above {
            ((self.coeffs.len() as i64 - 1) * q + 1).max(0) as usize
        } else {
            self.coeffs.len() * q as usize
        };
        if n > self.max_width && self.exact_above {
            return Err(Error::WindowOverflow { width: n, max: self.max_width });
        }
        let n = n.min(self.max_width);
        let mut c = vec![PadicNumber::zero(self.p); n];
        for (k, x) in self.coeffs.iter().enumerate() {
            let idx = k * q as usize;
            if idx < n {
                c[idx] = *x;
            }
        }
        Ok(Self::raw(self.p, lo, c, self.exact_above, self.tail, self.max_width))
    }

    /// `d/du`, as the coefficient of `du`.
    pub fn derivative(&self) -> Self {
        let mut s = self.clone();
        for (k, c) in s.coeffs.iter_mut().enumerate() {
            *c = c.mul_int(self.lo + k as i64);
        }
        s.lo -= 1;
        s.normalize();
        s
    }

    /// Inverse on `target = (lo, hi)` (see [`invert`](crate::series::invert)).
    pub fn invert(&self, target: (i64, i64)) -> Result<Self> {
        super::invert::invert(self, target)
    }

    /// Inverse on a window chosen from the shape of `self` and its width budget.
    pub fn invert_auto(&self) -> Result<Self> {
        super::invert::invert_auto(self)
    }

    /// Three-valued comparison summarised by a residual report.
    pub fn residual(&self, o: &Self) -> Result<Residual> {
        Ok(Residual::of(&self.sub(o)?))
    }

    pub fn agrees_with(&self, o: &Self) -> Result<bool> {
        Ok(self.residual(o)?.is_zero())
    }
}

/// Summary of a difference series on its window.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Residual {
    /// First exponent whose coefficient is provably nonzero, with its valuation.
    pub first_nonzero: Option<(i64, i64)>,
    /// Minimum valuation among provably nonzero coefficients.
    pub min_valuation: Option<i64>,
    /// Minimum absolute precision among coefficients that vanish at precision.
    pub floor: Option<i64>,
    pub window: (i64, i64),
}

impl Residual {
    pub fn of(s: &LaurentSeries) -> Self {
        let first_nonzero = s.terms().find_map(|(i, c)| c.valuation().map(|v| (i, v)));
        let min_valuation = s.coeffs.iter().filter_map(|c| c.valuation()).min();
        let floor = s.coeffs.iter().filter(|c| c.is_zero_at_precision()).filter_map(|c| c.abs_precision()).min();
        Residual { first_nonzero, min_valuation, floor, window: s.window() }
    }

    pub fn is_zero(&self) -> bool {
        self.first_nonzero.is_none()
    }
}

impl RingElem for LaurentSeries {
    fn zero_like(&self) -> Self {
        Self::zero(self.p).with_max_width(self.max_width)
    }
    fn one_like(&self) -> Self {
        Self::one(self.p).with_max_width(self.max_width)
    }
    fn add_r(&self, o: &Self) -> Result<Self> {
        self.add(o)
    }
    fn sub_r(&self, o: &Self) -> Result<Self> {
        self.sub(o)
    }
    fn mul_r(&self, o: &Self) -> Result<Self> {
        self.mul(o)
    }
    fn neg_r(&self) -> Self {
        self.neg()
    }
    fn is_zero_r(&self) -> bool {
        self.is_zero_at_precision()
    }
    fn is_exact_zero_r(&self) -> bool {
        self.is_exact_zero()
    }
    fn from_int_like(&self, k: i64) -> Self {
        if k == 0 {
            return self.zero_like();
        }
        Self::constant(PadicNumber::from_i64(self.p, k, max_precision(self.p))).with_max_width(self.max_width)
    }
}

impl fmt::Display for LaurentSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = vec![];
        if let Some(t) = self.tail {
            parts.push(format!("O({}^{})*u^<{}", self.p, t, self.lo));
        }
        for (i, c) in self.terms() {
            if !c.is_exact_zero() {
                parts.push(format!("({c})*u^{i}"));
            }
        }
        if !self.exact_above {
            parts.push(format!("O(u^{})", self.hi() + 1));
        }
        if parts.is_empty() {
            return write!(f, "0");
        }
        write!(f, "{}", parts.join(" + "))
    }
}
