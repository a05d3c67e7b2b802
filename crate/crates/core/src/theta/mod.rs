//! Theta functions with half-integer characteristics and the multipliers
//! that label them.

mod eval;
mod multiplier;

pub use eval::{
    quasi_periodicity_defect, theta_eval, theta_sum, truncation_radius, Characteristic, Parity,
    ShiftKind, ThetaTruncation, ThetaValue, MIN_TOL, RADIUS_CAP,
};
pub use multiplier::{
    characteristic_from_multiplier, enumerate_multipliers, multiplier_from_basis,
    multiplier_from_characteristic, Multiplier,
};
