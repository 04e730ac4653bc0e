//! Probe for topological quasi-nilpotence of the connection.

use super::module::SigmaNablaModule;
use crate::error::Result;
use crate::series::SeriesMatrix;

/// Valuation of `D^n(e_j)` over all `j`, step by step; `None` is `+infinity`.
pub type Profile = Vec<Option<i64>>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ProbeOutcome {
    /// Every iterate reached valuation `v_target` (or vanished).
    Plausible(Profile),
    /// At step `n` the iterates lost valuation over a full period of `p` steps
    /// while already negative.
    Refuted(usize, Profile),
    /// Neither condition was met within `n_max` steps.
    Inconclusive(Profile),
}

fn lower_bound(m: &SeriesMatrix) -> Option<i64> {
    m.entries().iter().filter_map(|a| a.valuation_floor()).min()
}

fn provable(m: &SeriesMatrix) -> Option<i64> {
    m.entries().iter().flat_map(|a| a.coeffs().iter().filter_map(|c| c.valuation())).min()
}

/// Iterates `D(f) = f' + N f` on the standard basis.
pub fn quasi_nilpotence_probe(m: &SigmaNablaModule, n_max: usize, v_target: i64) -> Result<ProbeOutcome> {
    let p = m.p() as usize;
    let mut h = SeriesMatrix::identity_series(m.rank(), m.p()).with_max_width(m.n.get(0, 0).max_width());
    let mut profile: Profile = vec![Some(0)];
    let mut sure: Vec<Option<i64>> = vec![Some(0)];
    for step in 1..=n_max {
        h = h.derivative().add(&m.n.mul(&h)?)?;
        if h.entries().iter().all(|a| a.is_exact_zero()) {
            profile.push(None);
            return Ok(ProbeOutcome::Plausible(profile));
        }
        let lb = lower_bound(&h);
        profile.push(lb);
        sure.push(provable(&h));
        if lb.is_some_and(|v| v >= v_target) {
            return Ok(ProbeOutcome::Plausible(profile));
        }
        if step >= p {
            if let (Some(now), Some(before)) = (sure[step], profile[step - p]) {
                if now < 0 && now < before {
                    return Ok(ProbeOutcome::Refuted(step, profile));
                }
            }
        }
    }
    Ok(ProbeOutcome::Inconclusive(profile))
}
