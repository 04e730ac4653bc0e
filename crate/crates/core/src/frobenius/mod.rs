//! Frobenius at a point: iterates, projector averaging, companions, slopes
//! and purity.

pub mod point;

pub use point::{
    average_projector, average_projector_group, block_companion, char_coeffs, frob_iterate, is_unit_root,
    newton_slopes_frob, purity_check, PointFrobenius, Purity,
};
