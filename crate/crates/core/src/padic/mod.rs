//! Scalars: p-adic numbers, unramified extensions, integer polynomials and
//! Newton polygons.

pub mod newton;
pub mod number;
pub mod poly;
pub mod unramified;

pub use newton::{newton_polygon, NewtonPolygon};
pub use number::{agrees_with_rational, is_prime, max_precision, rational_valuation, PadicNumber, PrecCmp};
pub use poly::{complex_root_magnitudes, IntPolynomial};
pub use unramified::{UnramifiedField, UnramifiedScalar};
