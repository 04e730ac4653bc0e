//! Descent of modules to the bounded plus ring and gluing of Dieudonne modules.

use super::factor::{matfact_gamma, matfact_robba, GammaFactorization, RobbaFactorization};
use super::module::{CompatVerdict, SigmaNablaModule};
use crate::error::{Error, Result};
use crate::padic::PadicNumber;
use crate::series::{RingLabel, SeriesMatrix};

#[derive(Clone, Debug)]
pub struct Descent {
    pub module: SigmaNablaModule,
    pub factorization: RobbaFactorization,
    pub compat: CompatVerdict,
}

/// Given `M` over the overconvergent field and `X` over the Robba ring such
/// that the `X`-basis matrices lie in the plus ring, factor `X = Y Z` and
/// return the matrices in the `Y`-basis.
pub fn descend_to_eplus(m: &SigmaNablaModule, x: &SeriesMatrix, d: Option<&[(PadicNumber, i64)]>) -> Result<Descent> {
    m.check_membership(&RingLabel::EDagger(m.ring.certificate().unwrap_or_default()))?;
    let conj = m.change_basis(x)?;
    conj.phi.check_membership(&RingLabel::RPlus)?;
    conj.n.check_membership(&RingLabel::RPlus)?;
    let factorization = matfact_robba(x, d)?;
    let mut module = m.change_basis(&factorization.y)?;
    module.check_membership(&RingLabel::EPlus)?;
    module.ring = RingLabel::EPlus;
    let compat = module.check_compat()?;
    Ok(Descent { module, factorization, compat })
}

#[derive(Clone, Debug)]
pub struct Gluing {
    pub module: SigmaNablaModule,
    pub factorization: GammaFactorization,
    pub compat: CompatVerdict,
    pub fv: CompatVerdict,
}

/// Glues a Dieudonne module over Gamma with one over the bounded plus ring
/// along `X` (which carries the first basis to the second), producing a
/// Dieudonne module over the integral plus ring.
pub fn glue_dieudonne(m1: &SigmaNablaModule, m2: Option<&SigmaNablaModule>, x: &SeriesMatrix) -> Result<Gluing> {
    if m1.b.is_none() {
        return Err(Error::InvalidInput("first module has no Verschiebung".into()));
    }
    m1.check_membership(&RingLabel::Gamma)?;
    let conj = m1.change_basis(x)?;
    conj.check_membership(&RingLabel::EPlus)?;
    if let Some(m2) = m2 {
        m2.check_membership(&RingLabel::EPlus)?;
        let same = conj.phi.first_difference(&m2.phi)?.is_none()
            && conj.n.first_difference(&m2.n)?.is_none()
            && match (&conj.b, &m2.b) {
                (Some(a), Some(b)) => a.first_difference(b)?.is_none(),
                _ => true,
            };
        if !same {
            return Err(Error::InvalidInput("X does not carry the first module to the second".into()));
        }
    }
    let factorization = matfact_gamma(x)?;
    let mut module = m1.change_basis(&factorization.y)?;
    module.check_membership(&RingLabel::GammaPlus)?;
    module.ring = RingLabel::GammaPlus;
    let compat = module.check_compat()?;
    let fv = module.check_fv()?;
    Ok(Gluing { module, factorization, compat, fv })
}
