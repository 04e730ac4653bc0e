//! Exact p-adic linear algebra for sigma-modules, (sigma, nabla)-modules and
//! Dieudonne modules over rings of truncated Laurent series, with tools for
//! Frobenius at points and L-functions of compatible systems.

pub mod error;
pub mod frobenius;
pub mod lfunction;
pub mod matrix;
pub mod module;
pub mod padic;
pub mod series;

pub use error::{Error, Precondition, Result};
pub use matrix::{FieldElem, Matrix, RingElem, SigmaScalar};
pub use padic::{IntPolynomial, PadicNumber, UnramifiedField, UnramifiedScalar};
pub use series::{LaurentSeries, OneForm, RingLabel, SeriesMatrix};
pub use module::SigmaNablaModule;
