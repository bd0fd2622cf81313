//! Direct scattering: outgoing resolvent, potential operator, Born series for
//! the Lippmann-Schwinger equation and the far-field split u_inf = F0 + F1 + F2.

mod born;
mod farfield;
mod resolvent;

pub use born::{born_solve, BornSolution, PotentialOperator};
pub use farfield::{
    default_directions, far_field, far_field_f0, far_field_f1_truncated, far_field_f1_truncation_error, far_field_sweep,
    BornCertificate, FarFieldEntry, FarFieldTable, SweepOutcome,
};
pub use resolvent::{apply_potential_op, apply_resolvent, cell_average, BornConfig, Convolution, Resolvent, ResolventMethod};
