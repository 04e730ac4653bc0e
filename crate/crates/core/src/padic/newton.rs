use num_rational::Rational64;

use super::number::PadicNumber;
use crate::error::{Error, Result};

/// Slopes of a Newton polygon, reported as valuations of the roots.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NewtonPolygon {
    /// Distinct root valuations in ascending order with multiplicities.
    pub slopes: Vec<(Rational64, usize)>,
    /// Number of roots at zero (index of the lowest nonzero coefficient).
    pub zero_roots: usize,
}

impl NewtonPolygon {
    /// Every slope repeated by its multiplicity.
    pub fn flat(&self) -> Vec<Rational64> {
        self.slopes.iter().flat_map(|&(s, m)| std::iter::repeat_n(s, m)).collect()
    }

    /// Multiset union (polygon of a product).
    pub fn union(&self, other: &NewtonPolygon) -> NewtonPolygon {
        let mut all = self.flat();
        all.extend(other.flat());
        all.sort();
        NewtonPolygon { slopes: group(&all), zero_roots: self.zero_roots + other.zero_roots }
    }
}

fn group(sorted: &[Rational64]) -> Vec<(Rational64, usize)> {
    let mut out: Vec<(Rational64, usize)> = vec![];
    for &s in sorted {
        match out.last_mut() {
            Some((t, m)) if *t == s => *m += 1,
            _ => out.push((s, 1)),
        }
    }
    out
}

/// Newton polygon of `sum coeffs[i] T^i` from the points `(i, v_p(a_i))`.
///
/// Values known only modulo `p^a` are allowed when they provably lie above
/// the hull; otherwise the result is `AmbiguousValuation`.
pub fn newton_polygon(coeffs: &[PadicNumber]) -> Result<NewtonPolygon> {
    let pts: Vec<(i64, i64)> =
        coeffs.iter().enumerate().filter_map(|(i, c)| c.valuation().map(|v| (i as i64, v))).collect();
    if pts.is_empty() {
        return Err(Error::InvalidInput("Newton polygon of a polynomial indistinguishable from zero".into()));
    }
    let mut hull: Vec<(i64, i64)> = vec![];
    for &pt in &pts {
        while hull.len() >= 2 {
            let (a, b) = (hull[hull.len() - 2], hull[hull.len() - 1]);
            let cross = (b.0 - a.0) as i128 * (pt.1 - a.1) as i128 - (b.1 - a.1) as i128 * (pt.0 - a.0) as i128;
            if cross <= 0 {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(pt);
    }
    let (first, last) = (pts[0].0, pts[pts.len() - 1].0);
    for (i, c) in coeffs.iter().enumerate() {
        let i = i as i64;
        let Some(a) = c.val_floor().filter(|_| c.valuation().is_none()) else { continue };
        if i < first || i > last {
            return Err(Error::AmbiguousValuation(i));
        }
        let seg = hull.windows(2).find(|w| w[0].0 <= i && i <= w[1].0);
        if let Some(w) = seg {
            let (x0, y0, x1, y1) = (w[0].0 as i128, w[0].1 as i128, w[1].0 as i128, w[1].1 as i128);
            // a < y0 + (y1-y0)(i-x0)/(x1-x0)
            if (a as i128) * (x1 - x0) < y0 * (x1 - x0) + (y1 - y0) * (i as i128 - x0) {
                return Err(Error::AmbiguousValuation(i));
            }
        }
    }
    let mut flat = vec![];
    for w in hull.windows(2) {
        let len = (w[1].0 - w[0].0) as usize;
        let s = -Rational64::new(w[1].1 - w[0].1, w[1].0 - w[0].0);
        flat.extend(std::iter::repeat_n(s, len));
    }
    flat.sort();
    Ok(NewtonPolygon { slopes: group(&flat), zero_roots: first as usize })
}
