//! Inversion of series that are `p^m` times a unit of the Cohen ring.
//!
//! Write `a = c u^{i0} (w + r)` where `c u^{i0}` is the lowest term of
//! minimal valuation, `w` collects the exponents `>= 0` and `r` the negative
//! ones. Then `w` is a power series with unit constant term, every
//! coefficient of `r` is divisible by `p`, and
//! `(w + r)^{-1} = s (1 + r s)^{-1}` with `s = w^{-1}`, the second factor
//! being a geometric series that converges p-adically.

use super::laurent::LaurentSeries;
use crate::error::{Error, Result};
use crate::padic::PadicNumber;

const INTERNAL_WIDTH_FACTOR: usize = 16;

struct Normalized {
    i0: i64,
    cinv: PadicNumber,
    w: LaurentSeries,
    r: LaurentSeries,
    /// Relative absolute-precision target.
    target_prec: i64,
    /// Number of geometric terms needed.
    terms: i64,
}

fn normalize(a: &LaurentSeries) -> Result<Normalized> {
    let m = a.coeffs().iter().filter_map(|c| c.valuation()).min().ok_or(Error::NotAUnit)?;
    let (i0, c) = a.terms().find(|(_, c)| c.valuation() == Some(m)).unwrap();
    for (i, x) in a.terms() {
        if x.valuation().is_none() {
            if let Some(f) = x.val_floor() {
                let need = if i < i0 { m + 1 } else { m };
                if f < need {
                    return Err(Error::AmbiguousValuation(i));
                }
            }
        }
    }
    if a.tail().is_some_and(|t| t < m + 1) {
        return Err(Error::AmbiguousValuation(a.lo() - 1));
    }
    let cinv = c.inv()?;
    let an = a.scale(&cinv).shift(-i0);
    let target_prec = an.coeffs().iter().filter_map(|c| c.abs_precision()).chain(an.tail()).min().unwrap();
    let w = an.plus_part();
    let r = an.minus_part();
    let terms = match r.valuation_floor() {
        None => 1,
        Some(delta) => {
            debug_assert!(delta >= 1);
            (target_prec + delta - 1).div_euclid(delta).max(1)
        }
    };
    Ok(Normalized { i0, cinv, w, r, target_prec, terms })
}

/// Inverse of a power series with unit constant term, up to degree `hi`.
fn power_series_inverse(w: &LaurentSeries, hi: i64) -> Result<LaurentSeries> {
    let p = w.p();
    let w0inv = w.coeff(0).ok_or(Error::NotAUnit)?.inv()?;
    if w.is_exact() && w.hi() == 0 {
        return Ok(LaurentSeries::constant(w0inv));
    }
    let hi = if w.is_exact_above() { hi } else { hi.min(w.hi()) };
    let n = (hi + 1).max(0) as usize;
    let wc: Vec<PadicNumber> = (0..n as i64).map(|j| w.coeff(j).unwrap_or(PadicNumber::zero(p))).collect();
    let mut s: Vec<PadicNumber> = Vec::with_capacity(n);
    for k in 0..n {
        if k == 0 {
            s.push(w0inv);
            continue;
        }
        let mut acc = PadicNumber::zero(p);
        for j in 1..=k {
            if !wc[j].is_exact_zero() && !s[k - j].is_exact_zero() {
                acc = acc + wc[j].mul(&s[k - j]);
            }
        }
        s.push(-(acc.mul(&w0inv)));
    }
    Ok(LaurentSeries::truncated(p, 0, s, None))
}

pub fn invert(a: &LaurentSeries, target: (i64, i64)) -> Result<LaurentSeries> {
    let nz = normalize(a)?;
    let p = a.p();
    let maxw = a.max_width();
    let finish = |x: LaurentSeries| x.scale(&nz.cinv).shift(-nz.i0).with_max_width(maxw);
    if nz.r.is_exact_zero() && nz.w.is_exact() && nz.w.hi() == 0 {
        return Ok(finish(LaurentSeries::constant(nz.w.coeff(0).unwrap().inv()?)));
    }
    let (lrel, hrel) = (target.0 + nz.i0, target.1 + nz.i0);
    if hrel < lrel {
        return Err(Error::InvalidInput(format!("empty target window {target:?}")));
    }
    let spread = if nz.r.is_exact_zero() { 0 } else { -nz.r.lo() };
    let hs = hrel + (nz.terms - 1) * spread;
    let needed = hs.max(0) as usize + spread as usize + 2;
    let budget = maxw.saturating_mul(INTERNAL_WIDTH_FACTOR);
    if needed > budget {
        return Err(Error::WindowOverflow { width: needed, max: budget });
    }
    let wide = needed.max(maxw) + 1;
    let s = power_series_inverse(&nz.w, hs.max(0))?.with_max_width(wide);
    let a_rel = nz.target_prec;
    let result = if nz.r.is_exact_zero() {
        s
    } else {
        let r = nz.r.clone().with_max_width(wide);
        let t = r.mul(&s)?.neg();
        let mut term = LaurentSeries::one(p).with_max_width(wide);
        let mut acc = term.clone();
        for _ in 1..nz.terms {
            term = term.mul(&t)?.trim_below(a_rel);
            acc = acc.add(&term)?;
        }
        let rest = LaurentSeries::from_parts(p, acc.lo(), vec![], true, Some(a_rel), wide)?;
        acc = acc.add(&rest)?;
        s.mul(&acc)?
    };
    let result = result.cap_abs(a_rel).restrict(lrel, hrel);
    Ok(finish(result))
}

/// Inverse on a window that starts where the geometric correction stops
/// mattering (or at the pivot for power-series-like input) and spans the
/// width budget of `a`.
pub fn invert_auto(a: &LaurentSeries) -> Result<LaurentSeries> {
    let nz = normalize(a)?;
    let maxw = a.max_width() as i64;
    let lo_rel = if nz.r.is_exact_zero() { 0 } else { ((nz.terms - 1) * nz.r.lo()).max(-(maxw / 2)) };
    let hi_rel = lo_rel + maxw - 1;
    invert(a, (lo_rel - nz.i0, hi_rel - nz.i0))
}
