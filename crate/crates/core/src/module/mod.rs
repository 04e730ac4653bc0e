//! Sigma-modules, (sigma, nabla)-modules and Dieudonne modules as matrix data.

pub mod descent;
pub mod factor;
pub mod horizontal;
pub mod lattice;
#[allow(clippy::module_inception)]
pub mod module;
pub mod nilpotence;

pub use descent::{descend_to_eplus, glue_dieudonne};
pub use factor::{matfact_gamma, matfact_robba, GammaFactorization, RobbaFactorization};
pub use horizontal::{horizontal_basis, horizontal_basis_module, horizontal_sub_basis, frobenius_stable, HorizontalBasis};
pub use lattice::{lattice_contains, lattice_intersect, lattice_smith, Dvr, LatticeBasis, Smith};
pub use module::{CompatVerdict, SigmaNablaModule};
pub use nilpotence::{quasi_nilpotence_probe, ProbeOutcome};
