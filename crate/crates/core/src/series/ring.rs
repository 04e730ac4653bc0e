use std::fmt;
use std::str::FromStr;

use num_rational::Rational64;

use super::laurent::LaurentSeries;
use crate::error::{Error, Result};

/// Growth certificate `v_p(x_i) >= lambda * (-i) - c` for `i < 0`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Overconvergence {
    pub lambda: Rational64,
    pub c: Rational64,
}

impl Overconvergence {
    pub fn new(lambda: Rational64, c: Rational64) -> Result<Self> {
        if lambda <= Rational64::from(0) {
            return Err(Error::InvalidInput("overconvergence rate must be positive".into()));
        }
        Ok(Overconvergence { lambda, c })
    }

    fn violated_by(&self, exponent: i64, valuation: i64) -> bool {
        exponent < 0 && Rational64::from(valuation) < self.lambda * Rational64::from(-exponent) - self.c
    }
}

impl Default for Overconvergence {
    fn default() -> Self {
        Overconvergence { lambda: Rational64::new(1, 2), c: Rational64::from(0) }
    }
}

/// The eight coefficient rings.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum RingLabel {
    GammaPlus,
    Gamma,
    GammaDagger(Overconvergence),
    EPlus,
    E,
    EDagger(Overconvergence),
    RPlus,
    R(Overconvergence),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Membership {
    Consistent,
    Violated(i64),
}

impl Membership {
    pub fn is_consistent(&self) -> bool {
        matches!(self, Membership::Consistent)
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
enum Kind {
    GammaPlus,
    Gamma,
    GammaDagger,
    EPlus,
    E,
    EDagger,
    RPlus,
    R,
}

impl RingLabel {
    fn kind(&self) -> Kind {
        match self {
            RingLabel::GammaPlus => Kind::GammaPlus,
            RingLabel::Gamma => Kind::Gamma,
            RingLabel::GammaDagger(_) => Kind::GammaDagger,
            RingLabel::EPlus => Kind::EPlus,
            RingLabel::E => Kind::E,
            RingLabel::EDagger(_) => Kind::EDagger,
            RingLabel::RPlus => Kind::RPlus,
            RingLabel::R(_) => Kind::R,
        }
    }

    pub fn name(&self) -> &'static str {
        match self.kind() {
            Kind::GammaPlus => "GammaPlus",
            Kind::Gamma => "Gamma",
            Kind::GammaDagger => "GammaDagger",
            Kind::EPlus => "EPlus",
            Kind::E => "E",
            Kind::EDagger => "EDagger",
            Kind::RPlus => "RPlus",
            Kind::R => "R",
        }
    }

    pub fn certificate(&self) -> Option<Overconvergence> {
        match self {
            RingLabel::GammaDagger(o) | RingLabel::EDagger(o) | RingLabel::R(o) => Some(*o),
            _ => None,
        }
    }

    pub fn gamma_dagger() -> Self {
        RingLabel::GammaDagger(Overconvergence::default())
    }

    pub fn e_dagger() -> Self {
        RingLabel::EDagger(Overconvergence::default())
    }

    pub fn robba() -> Self {
        RingLabel::R(Overconvergence::default())
    }

    /// All eight labels with default certificates.
    pub fn all() -> [RingLabel; 8] {
        [
            RingLabel::GammaPlus,
            RingLabel::Gamma,
            Self::gamma_dagger(),
            RingLabel::EPlus,
            RingLabel::E,
            Self::e_dagger(),
            RingLabel::RPlus,
            Self::robba(),
        ]
    }

    /// Immediate supersets in the inclusion lattice.
    pub fn covers(&self) -> Vec<RingLabel> {
        let o = self.certificate().unwrap_or_default();
        match self.kind() {
            Kind::GammaPlus => vec![RingLabel::GammaDagger(o), RingLabel::EPlus],
            Kind::GammaDagger => vec![RingLabel::Gamma, RingLabel::EDagger(o)],
            Kind::Gamma => vec![RingLabel::E],
            Kind::EPlus => vec![RingLabel::EDagger(o), RingLabel::RPlus],
            Kind::EDagger => vec![RingLabel::E, RingLabel::R(o)],
            Kind::RPlus => vec![RingLabel::R(o)],
            Kind::E | Kind::R => vec![],
        }
    }

    /// Reflexive-transitive inclusion (certificates are not compared).
    pub fn is_subring_of(&self, other: &RingLabel) -> bool {
        if self.kind() == other.kind() {
            return true;
        }
        self.covers().iter().any(|c| c.is_subring_of(other))
    }

    fn forbids_negative_exponents(&self) -> bool {
        matches!(self.kind(), Kind::GammaPlus | Kind::EPlus | Kind::RPlus)
    }

    fn needs_integrality(&self) -> bool {
        matches!(self.kind(), Kind::GammaPlus | Kind::Gamma | Kind::GammaDagger)
    }
}

/// Refutation-only membership test on the visible coefficients.
pub fn membership(a: &LaurentSeries, label: &RingLabel) -> Membership {
    let cert = label.certificate();
    for (i, c) in a.terms() {
        let Some(v) = c.valuation() else { continue };
        if label.forbids_negative_exponents() && i < 0 {
            return Membership::Violated(i);
        }
        if label.needs_integrality() && v < 0 {
            return Membership::Violated(i);
        }
        if cert.is_some_and(|o| o.violated_by(i, v)) {
            return Membership::Violated(i);
        }
    }
    Membership::Consistent
}

impl fmt::Display for RingLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.certificate() {
            Some(o) => write!(f, "{}({},{})", self.name(), o.lambda, o.c),
            None => write!(f, "{}", self.name()),
        }
    }
}

impl FromStr for RingLabel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        let (name, cert) = match s.split_once('(') {
            Some((n, rest)) => {
                let inner = rest.strip_suffix(')').ok_or_else(|| Error::Parse(format!("bad ring label {s:?}")))?;
                let (l, c) = inner.split_once(',').ok_or_else(|| Error::Parse(format!("bad certificate in {s:?}")))?;
                let l: Rational64 = l.parse().map_err(|_| Error::Parse(format!("bad rate in {s:?}")))?;
                let c: Rational64 = c.parse().map_err(|_| Error::Parse(format!("bad constant in {s:?}")))?;
                (n.to_string(), Some(Overconvergence::new(l, c)?))
            }
            None => (s.clone(), None),
        };
        let o = cert.unwrap_or_default();
        let label = match name.as_str() {
            "GammaPlus" => RingLabel::GammaPlus,
            "Gamma" => RingLabel::Gamma,
            "GammaDagger" => RingLabel::GammaDagger(o),
            "EPlus" => RingLabel::EPlus,
            "E" => RingLabel::E,
            "EDagger" => RingLabel::EDagger(o),
            "RPlus" => RingLabel::RPlus,
            "R" => RingLabel::R(o),
            _ => return Err(Error::Parse(format!("unknown ring label {name:?}"))),
        };
        if cert.is_some() && label.certificate().is_none() {
            return Err(Error::Parse(format!("{name} takes no certificate")));
        }
        Ok(label)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::padic::PadicNumber;

    #[test]
    fn examples() {
        let u_inv = LaurentSeries::monomial(PadicNumber::one(3, 5), -1);
        assert_eq!(membership(&u_inv, &RingLabel::GammaPlus), Membership::Violated(-1));
        let p_inv = LaurentSeries::constant(PadicNumber::p_power(3, -1, 5));
        assert_eq!(membership(&p_inv, &RingLabel::Gamma), Membership::Violated(0));
        let terms: Vec<(i64, PadicNumber)> = (1..=10).map(|k| (-k, PadicNumber::p_power(3, k, 5))).collect();
        let s = LaurentSeries::from_terms(3, &terms);
        assert_eq!(membership(&s, &RingLabel::gamma_dagger()), Membership::Consistent);
        let fast: Vec<(i64, PadicNumber)> = (1..=10).map(|k| (-4 * k, PadicNumber::p_power(3, k, 5))).collect();
        let s = LaurentSeries::from_terms(3, &fast);
        assert_eq!(membership(&s, &RingLabel::gamma_dagger()), Membership::Violated(-40));
    }

    #[test]
    fn label_roundtrip() {
        for l in RingLabel::all() {
            assert_eq!(l.to_string().parse::<RingLabel>().unwrap(), l);
        }
        assert!("Gamma(1,0)".parse::<RingLabel>().is_err());
        assert!("EDagger(0,0)".parse::<RingLabel>().is_err());
    }

    #[test]
    fn lattice() {
        assert!(RingLabel::GammaPlus.is_subring_of(&RingLabel::robba()));
        assert!(RingLabel::Gamma.is_subring_of(&RingLabel::E));
        assert!(!RingLabel::Gamma.is_subring_of(&RingLabel::robba()));
        assert!(!RingLabel::E.is_subring_of(&RingLabel::Gamma));
        assert!(RingLabel::EPlus.is_subring_of(&RingLabel::E));
    }
}
