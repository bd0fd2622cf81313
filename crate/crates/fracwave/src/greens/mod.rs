//! Radiating Green's function of the fractional Helmholtz operator, its
//! principal-value and homogeneous parts, the truncated kernel and the
//! far-field constants.

mod green;
mod params;
mod table;

pub use green::{
    decay_exponent, far_field_constant, green, green_delta, green_homogeneous, green_leading, green_truncated,
    green_truncated_with, green_with, homogeneous_constant, GreenEval, Method, Policy, TruncationVariant,
};
pub use params::{alpha_threshold, m_threshold, potential_smoothness_order, ModelParams};
pub use table::GreenTable;
