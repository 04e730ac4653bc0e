//! Truncated Laurent series, the eight coefficient rings, one-forms and
//! matrices of series.

pub mod form;
pub mod invert;
pub mod laurent;
pub mod ring;
pub mod smatrix;

pub use form::OneForm;
pub use laurent::{LaurentSeries, Residual, DEFAULT_MAX_WIDTH};
pub use ring::{membership, Membership, Overconvergence, RingLabel};
pub use smatrix::{EntryResidual, SeriesMatrix};
